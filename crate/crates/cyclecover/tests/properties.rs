//! Property tests for the structural invariants: surgery parity
//! preservation, cycle lifting, format round-trips and oracle monotonicity.

use std::collections::BTreeSet;

use proptest::prelude::*;

use cyclecover::cuts::find_bridges;
use cyclecover::multigraph::{EdgeId, Multigraph, VertexId};
use cyclecover::oracle;

/// Random multigraph on up to 7 vertices with loops and parallels allowed.
fn arb_multigraph() -> impl Strategy<Value = Multigraph> {
    (2u32..7, proptest::collection::vec((0u32..7, 0u32..7), 1..16)).prop_map(|(n, pairs)| {
        let pairs: Vec<(u32, u32)> = pairs
            .into_iter()
            .map(|(u, v)| (u % n, v % n))
            .collect();
        Multigraph::from_edges(n, &pairs)
    })
}

proptest! {
    #[test]
    fn split_preserves_degree_parity(g in arb_multigraph(), pick in any::<u64>()) {
        // Choose a vertex with at least two incident edges and split a
        // random pair of them; every surviving original vertex keeps its
        // degree parity.
        let candidates: Vec<VertexId> = g
            .vertices()
            .filter(|&v| g.edges_at(v).len() >= 2)
            .collect();
        prop_assume!(!candidates.is_empty());
        let v = candidates[(pick % candidates.len() as u64) as usize];
        let edges = g.edges_at(v);
        let i = (pick / 7 % edges.len() as u64) as usize;
        let j = (pick / 91 % edges.len() as u64) as usize;
        prop_assume!(i != j);
        let (h, _) = g.split_off_edges(v, edges[i], edges[j]).unwrap();
        for u in g.vertices() {
            prop_assert_eq!(
                g.degree(u) % 2,
                h.degree(u) % 2,
                "parity changed at {}", u
            );
        }
        prop_assert_eq!(g.edge_count(), h.edge_count());
    }

    #[test]
    fn lift_cycle_is_even_and_weight_preserving(g in arb_multigraph(), pick in any::<u64>()) {
        // Suppress, then lift each basis cycle of the suppressed graph back:
        // the lift must be an even-degree set of the original of equal
        // total weight.
        let mut g = g;
        g.weight_all_one();
        let (h, trace) = g.suppress_degree_two();
        let basis = oracle::cycle_space_basis(&h);
        prop_assume!(!basis.basis.is_empty());
        let cycle = &basis.basis[(pick % basis.basis.len() as u64) as usize];
        let lifted = trace.lift_cycle(&h, cycle).unwrap();
        prop_assert!(g.is_cycle(&lifted));
        prop_assert_eq!(g.weight_of(&lifted), h.weight_of(cycle));
    }

    #[test]
    fn lift_cycle_through_contraction_restores_evenness(g in arb_multigraph(), pick in any::<u64>()) {
        let all: Vec<EdgeId> = g.edge_ids().collect();
        prop_assume!(!all.is_empty());
        let chosen: BTreeSet<EdgeId> = all
            .iter()
            .enumerate()
            .filter(|(i, _)| (pick >> (i % 60)) & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        prop_assume!(!chosen.is_empty());
        let (h, trace) = g.contract_edges(&chosen).unwrap();
        let basis = oracle::cycle_space_basis(&h);
        prop_assume!(!basis.basis.is_empty());
        let cycle = &basis.basis[(pick % basis.basis.len() as u64) as usize];
        let lifted = trace.lift_cycle(&h, cycle).unwrap();
        prop_assert!(g.is_cycle(&lifted));
    }

    #[test]
    fn text_round_trip(g in arb_multigraph()) {
        let text = g.to_text();
        let parsed = Multigraph::from_text(&text).unwrap();
        prop_assert_eq!(&parsed, &g);
        prop_assert_eq!(parsed.to_text(), text);
    }

    #[test]
    fn replay_matches_surgery(g in arb_multigraph(), pick in any::<u64>()) {
        let candidates: Vec<VertexId> = g
            .vertices()
            .filter(|&v| g.edges_at(v).len() >= 2)
            .collect();
        prop_assume!(!candidates.is_empty());
        let v = candidates[(pick % candidates.len() as u64) as usize];
        let edges = g.edges_at(v);
        let (h, trace) = g.split_off_edges(v, edges[0], edges[1]).unwrap();
        let (h2, trace2) = h.suppress_degree_two();
        let mut full = trace;
        full.extend(trace2);
        prop_assert_eq!(full.replay(&g).unwrap(), h2);
    }
}

#[test]
fn oracle_monotone_over_cycle_budget_on_small_corpus() {
    for seed in 0..12u64 {
        let g = cyclecover::harness::gen_cubic_bridgeless(8, seed).unwrap();
        if !find_bridges(&g).is_empty() {
            continue;
        }
        let c3 = oracle::shortest_cover_bruteforce(&g, 3).unwrap().total_length;
        let c2 = oracle::shortest_cover_bruteforce(&g, 2).unwrap().total_length;
        let c1 = oracle::shortest_cover_bruteforce(&g, 1);
        assert!(c3 <= c2);
        if let Ok(c1) = c1 {
            assert!(c2 <= c1.total_length);
        }
    }
}
