//! The multigraph model: text format round-trips, contraction, suppression,
//! expansion and lifting cycles back through a surgery trace.

use std::collections::BTreeSet;

use cyclecover::harness::named;
use cyclecover::multigraph::{EdgeId, Multigraph, VertexId};

fn main() {
    // Text format: loops via equal endpoints, parallels via distinct ids.
    let mut g = Multigraph::from_edges(3, &[(0, 1), (0, 1), (2, 2)]);
    g.set_weight(EdgeId(2), 7);
    let text = g.to_text();
    print!("{text}");
    assert_eq!(Multigraph::from_text(&text).unwrap(), g);

    // Contracting a Hamilton circuit of K4 leaves one vertex with two loops.
    let k4 = named::k4();
    let ham = BTreeSet::from([EdgeId(0), EdgeId(1), EdgeId(2), EdgeId(3)]);
    let (contracted, _) = k4.contract_edges(&ham).unwrap();
    println!(
        "k4 / hamilton: {} vertex, {} loops",
        contracted.vertex_count(),
        contracted.edge_count()
    );

    // Suppression with weights: a subdivided edge folds back to weight 2.
    let mut path = Multigraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (1, 3)]);
    path.weight_all_one();
    let (suppressed, trace) = path.suppress_degree_two();
    println!(
        "suppressed graph: {} vertices, weights {:?}",
        suppressed.vertex_count(),
        suppressed.edge_ids().map(|e| suppressed.weight(e)).collect::<Vec<_>>()
    );

    // Lift a cycle of the suppressed graph back: the path edges return and
    // the total weight is unchanged.
    let cycle: BTreeSet<EdgeId> = suppressed.edge_ids().collect();
    if suppressed.is_cycle(&cycle) {
        let lifted = trace.lift_cycle(&suppressed, &cycle).unwrap();
        println!(
            "lifted cycle: {} edges, weight {} = {}",
            lifted.len(),
            path.weight_of(&lifted),
            suppressed.weight_of(&cycle)
        );
    }

    // Expansion splits a degree-four vertex into an adjacent pair joined by
    // a weight-zero edge.
    let mut star = Multigraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (3, 4)]);
    star.weight_all_one();
    let (expanded, _) = star.expand(VertexId(0), &[VertexId(1), VertexId(2)]).unwrap();
    println!(
        "expanded: {} vertices, {} edges, total weight {}",
        expanded.vertex_count(),
        expanded.edge_count(),
        expanded.total_weight()
    );
}
