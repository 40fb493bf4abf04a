//! Odd-connectivity-preserving vertex splits: the candidate orders of the
//! degree-4/6 lemmas and the full degree-8 resolution chain.

use cyclecover::cuts::{is_k_odd_connected, min_odd_cut_size};
use cyclecover::harness::gen_5oc_host;
use cyclecover::multigraph::{EdgeId, Multigraph, VertexId};
use cyclecover::splitting::{split_degree4, split_degree8_chain, split_preserving};

fn main() {
    // Degree-8 resolution on the 8-fold parallel pair.
    let g = Multigraph::from_edges(2, &[(0, 1); 8]);
    let order: [EdgeId; 8] = g.edges_at(VertexId(0)).try_into().unwrap();
    let (h, trace, outcome) = split_degree8_chain(&g, VertexId(0), &order).unwrap();
    println!(
        "degree-8 chain: rotation {}, case {}, pairs {:?}",
        outcome.rotation, outcome.case, outcome.pairs
    );
    println!(
        "  result: {} vertices, {} edges, min odd cut {:?}",
        h.vertex_count(),
        h.edge_count(),
        min_odd_cut_size(&h).unwrap()
    );
    assert_eq!(trace.replay(&g).unwrap(), h);

    // Degree-4 split with the two-candidate order.
    let g4 = Multigraph::from_edges(2, &[(0, 1); 4]);
    let order4: [EdgeId; 4] = g4.edges_at(VertexId(0)).try_into().unwrap();
    let (h4, _, plan) = split_degree4(&g4, VertexId(0), &order4).unwrap();
    println!(
        "degree-4 split chose candidate {} of {:?}; still 5-odd-connected: {}",
        plan.chosen,
        plan.candidates,
        is_k_odd_connected(&h4, 5).unwrap()
    );

    // Free splits on random 5-odd-connected hosts preserve the level.
    for seed in 0..5 {
        let g = gen_5oc_host(4, seed).unwrap();
        let v = g.vertices().find(|&v| g.degree(v) == 6).unwrap_or(VertexId(0));
        if g.degree(v) == 5 {
            continue; // split_preserving excludes degree == level
        }
        let (h, _, plan) = split_preserving(&g, v, 5).unwrap();
        println!(
            "host seed {seed}: split at {} candidate {} keeps 5-odd-connectivity: {}",
            v,
            plan.chosen,
            is_k_odd_connected(&h, 5).unwrap()
        );
    }
}
