//! Constrained Z2xZ2 flows: find a nowhere-zero flow, plant a constraint
//! that the flow violates, and repair it with a red/blue trail swap.

use std::collections::BTreeMap;

use cyclecover::flows::{
    build_swap_trail, constraint_is_good, find_nowhere_zero_flow, repair_flow_stats,
    ConstraintKind, FlowAssignment, FlowValue, VertexConstraint,
};
use cyclecover::multigraph::{EdgeId, Multigraph, VertexId};

fn main() {
    // Two vertices joined by five parallel edges: the canonical bad shape.
    // Color three edges red, one green, one blue, and demand that the
    // all-red triple sees at least two values.
    let g = Multigraph::from_edges(2, &[(0, 1); 5]);
    let mut values = BTreeMap::new();
    values.insert(EdgeId(0), FlowValue::Red);
    values.insert(EdgeId(1), FlowValue::Red);
    values.insert(EdgeId(2), FlowValue::Red);
    values.insert(EdgeId(3), FlowValue::Green);
    values.insert(EdgeId(4), FlowValue::Blue);
    let flow = FlowAssignment::new(values);
    flow.check(&g).unwrap();

    let constraint = VertexConstraint {
        vertex: VertexId(0),
        kind: ConstraintKind::Degree5 {
            a: vec![EdgeId(0), EdgeId(1), EdgeId(2)],
            b: vec![EdgeId(1), EdgeId(2), EdgeId(3)],
        },
    };
    println!(
        "before repair: vertex 0 good = {}",
        constraint_is_good(&g, &flow, &constraint)
    );
    let trail = build_swap_trail(&g, &flow, VertexId(0), std::slice::from_ref(&constraint)).unwrap();
    let ids: Vec<String> = trail.iter().map(|e| e.to_string()).collect();
    println!("swap trail through edges [{}]", ids.join(" "));

    let (repaired, stats) =
        repair_flow_stats(&g, &flow, std::slice::from_ref(&constraint)).unwrap();
    println!(
        "after {} swap(s): vertex 0 good = {}",
        stats.swaps,
        constraint_is_good(&g, &repaired, &constraint)
    );
    for e in g.edge_ids() {
        println!("  edge {e}: {:?} -> {:?}", flow.value(e), repaired.value(e));
    }

    // A fresh flow on a graph without small odd cuts always exists.
    let h = Multigraph::from_edges(2, &[(0, 1); 3]);
    let fresh = find_nowhere_zero_flow(&h).unwrap();
    println!(
        "theta flow: {:?}",
        h.edge_ids().map(|e| fresh.value(e)).collect::<Vec<_>>()
    );
}
