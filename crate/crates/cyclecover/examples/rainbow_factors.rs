//! Rainbow 2-factors: the 5-odd-connected 2-factor search, the flow-derived
//! coloring of the complementary matching, and the pattern guarantees on
//! short circuits.

use cyclecover::harness::{gen_cubic_bridgeless, named};
use cyclecover::multigraph::EdgeId;
use cyclecover::rainbow::{
    pattern_of, patterns_symmetric, rainbow_cubic, rainbow_mindegree, Pattern,
};

fn main() {
    // Petersen: the only admissible 2-factor shape is the pentagon pair.
    let g = named::petersen();
    let coloring = rainbow_cubic(&g).unwrap();
    println!("petersen 2-factor circuits:");
    for circuit in &coloring.factor.circuits {
        let p = pattern_of(&g, circuit, &coloring).unwrap();
        println!(
            "  length {} pattern {p} (vertices {:?})",
            circuit.len(),
            circuit.vertices.iter().map(|v| v.0).collect::<Vec<_>>()
        );
    }
    coloring.check_parity(&g).unwrap();

    // Every 4-circuit of a cubic rainbow factor has a pattern symmetric to
    // RRRR or RRGG; K4's Hamilton factor is the smallest witness.
    let rrrr = Pattern::parse("RRRR");
    let rrgg = Pattern::parse("RRGG");
    let mut four_circuits = 0;
    let mut hosts: Vec<_> = (0..20)
        .map(|seed| gen_cubic_bridgeless(12, seed).unwrap())
        .collect();
    hosts.push(named::k4());
    hosts.push(named::cube());
    for g in &hosts {
        let coloring = rainbow_cubic(g).unwrap();
        for circuit in &coloring.factor.circuits {
            if circuit.len() == 4 {
                let p = pattern_of(g, circuit, &coloring).unwrap();
                assert!(
                    patterns_symmetric(&p, &rrrr).unwrap() || patterns_symmetric(&p, &rrgg).unwrap()
                );
                four_circuits += 1;
            }
        }
    }
    println!("checked {four_circuits} four-circuits against the RRRR/RRGG rule");

    // Weighted variant: K4 with unit weights has a single weight-4 factor
    // circuit; the cube with zero-weight verticals splits into two weight-2
    // circuits, which need no positional clause.
    let mut k4 = named::k4();
    k4.weight_all_one();
    let out = rainbow_mindegree(&k4).unwrap();
    println!(
        "weighted k4: factor weight {} of total {}, {} weight-4 circuit(s) classified",
        out.coloring.factor.weight(&k4),
        k4.total_weight(),
        out.weight4.len()
    );
    for w4 in &out.weight4 {
        println!("  circuit case {:?}", w4.case);
    }

    let mut g = named::cube();
    g.weight_all_one();
    for e in [8, 9, 10, 11] {
        g.set_weight(EdgeId(e), 0);
    }
    let out = rainbow_mindegree(&g).unwrap();
    println!(
        "weighted cube: factor weight {} of total {} ({} weight-4 circuits)",
        out.coloring.factor.weight(&g),
        g.total_weight(),
        out.weight4.len()
    );
}
