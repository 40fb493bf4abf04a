//! Independent brute-force machinery: cycle-space enumeration, exact
//! shortest covers by at most three cycles on small graphs, and cover
//! validation. The oracle never shares code with the constructions it
//! checks; cycles here are arbitrary even-degree subgraphs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cuts::find_bridges;
use crate::multigraph::{EdgeId, Multigraph, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("cycle space dimension {0} exceeds the brute-force limit")]
    TooLarge(usize),
    #[error("graph has a bridge; no cycle cover exists")]
    Infeasible,
    #[error("graph has {0} edges, more than the 64 the bitmask oracle supports")]
    TooManyEdges(usize),
}

/// Up to three cycles (even-degree edge sets) with their total weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCover {
    pub cycles: Vec<BTreeSet<EdgeId>>,
    pub total_length: u64,
}

impl CycleCover {
    pub fn recompute_length(&self, g: &Multigraph) -> u64 {
        self.cycles.iter().map(|c| g.weight_of(c)).sum()
    }
}

/// Fundamental cycles of a deterministic spanning forest.
#[derive(Debug, Clone)]
pub struct CycleSpaceBasis {
    pub basis: Vec<BTreeSet<EdgeId>>,
    pub dimension: usize,
}

/// Basis of the cycle space w.r.t. the spanning forest formed by greedily
/// taking lowest-id edges. Dimension is m - n + components.
pub fn cycle_space_basis(g: &Multigraph) -> CycleSpaceBasis {
    let mut parent: BTreeMap<VertexId, VertexId> = g.vertices().map(|v| (v, v)).collect();
    fn find(parent: &mut BTreeMap<VertexId, VertexId>, v: VertexId) -> VertexId {
        let mut root = v;
        while parent[&root] != root {
            root = parent[&root];
        }
        let mut cur = v;
        while parent[&cur] != root {
            let next = parent[&cur];
            parent.insert(cur, root);
            cur = next;
        }
        root
    }
    let mut tree_adj: BTreeMap<VertexId, Vec<(VertexId, EdgeId)>> = BTreeMap::new();
    let mut cotree: Vec<EdgeId> = Vec::new();
    for (e, u, v) in g.edges() {
        let ru = find(&mut parent, u);
        let rv = find(&mut parent, v);
        if ru != rv {
            parent.insert(ru, rv);
            tree_adj.entry(u).or_default().push((v, e));
            tree_adj.entry(v).or_default().push((u, e));
        } else {
            cotree.push(e);
        }
    }
    let mut basis = Vec::new();
    for e in cotree {
        let (u, v) = g.endpoints(e).unwrap();
        let mut cycle = BTreeSet::from([e]);
        if u != v {
            for path_edge in tree_path(&tree_adj, u, v) {
                cycle.insert(path_edge);
            }
        }
        basis.push(cycle);
    }
    let dimension = basis.len();
    CycleSpaceBasis { basis, dimension }
}

fn tree_path(
    adj: &BTreeMap<VertexId, Vec<(VertexId, EdgeId)>>,
    from: VertexId,
    to: VertexId,
) -> Vec<EdgeId> {
    let mut prev: BTreeMap<VertexId, (VertexId, EdgeId)> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::from([from]);
    let mut seen = BTreeSet::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        if let Some(ns) = adj.get(&v) {
            for &(w, e) in ns {
                if seen.insert(w) {
                    prev.insert(w, (v, e));
                    queue.push_back(w);
                }
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while cur != from {
        let (p, e) = prev[&cur];
        path.push(e);
        cur = p;
    }
    path
}

/// Exact minimum-total-length cover of all edges by at most `max_cycles`
/// cycle-space elements. Deterministic tie-break: lexicographically smallest
/// sorted cycle encoding among minimum-length covers.
pub fn shortest_cover_bruteforce(
    g: &Multigraph,
    max_cycles: usize,
) -> Result<CycleCover, OracleError> {
    assert!((1..=3).contains(&max_cycles), "oracle supports 1..=3 cycles");
    if !find_bridges(g).is_empty() {
        return Err(OracleError::Infeasible);
    }
    let edge_ids: Vec<EdgeId> = g.edge_ids().collect();
    let m = edge_ids.len();
    if m > 64 {
        return Err(OracleError::TooManyEdges(m));
    }
    if m == 0 {
        return Ok(CycleCover { cycles: vec![], total_length: 0 });
    }
    let eindex: BTreeMap<EdgeId, usize> = edge_ids.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let basis = cycle_space_basis(g);
    if basis.dimension > 14 {
        return Err(OracleError::TooLarge(basis.dimension));
    }
    let basis_masks: Vec<u64> = basis
        .basis
        .iter()
        .map(|c| c.iter().map(|e| 1u64 << eindex[e]).fold(0, |a, b| a | b))
        .collect();
    let weights: Vec<u64> = edge_ids.iter().map(|&e| g.weight(e)).collect();

    // All cycle-space elements with their weights, in subset order of basis
    // coefficients (deterministic).
    let count = 1usize << basis.dimension;
    let mut elems: Vec<(u64, u64)> = Vec::with_capacity(count); // (mask, weight)
    for coeff in 0..count {
        let mut mask = 0u64;
        for (i, &bm) in basis_masks.iter().enumerate() {
            if (coeff >> i) & 1 == 1 {
                mask ^= bm;
            }
        }
        let w = weight_of_mask(mask, &weights);
        elems.push((mask, w));
    }

    // Edges sharing the same parity functional over the basis (the same
    // "column") are covered by exactly the same elements, so coverage
    // collapses onto the distinct columns. An all-zero column would be an
    // edge lying in no cycle, i.e. a bridge, excluded above.
    let mut col_of_edge: Vec<u64> = vec![0; m];
    for (i, &bm) in basis_masks.iter().enumerate() {
        for (j, col) in col_of_edge.iter_mut().enumerate() {
            if (bm >> j) & 1 == 1 {
                *col |= 1 << i;
            }
        }
    }
    let mut distinct: Vec<u64> = col_of_edge.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.first() == Some(&0) {
        return Err(OracleError::Infeasible);
    }
    let ncols = distinct.len();
    if ncols > 23 {
        // The superset-min table would not fit; the dimension gate keeps
        // corpus instances well inside this limit.
        return Err(OracleError::TooManyEdges(m));
    }
    let full_cols: u32 = if ncols == 32 { u32::MAX } else { (1u32 << ncols) - 1 };
    // Coverage mask of an element with coefficient vector `coeff`.
    let cov_of = |coeff: usize| -> u32 {
        let mut cov = 0u32;
        for (i, &c) in distinct.iter().enumerate() {
            if ((coeff as u64) & c).count_ones() % 2 == 1 {
                cov |= 1 << i;
            }
        }
        cov
    };
    // Superset-min table: table[s] = packed (weight << SHIFT | coeff) of the
    // cheapest element whose coverage contains s.
    const SHIFT: u32 = 14;
    let mut table: Vec<u32> = vec![u32::MAX; 1 << ncols];
    for (coeff, &(_, w)) in elems.iter().enumerate() {
        assert!(w < (1 << (32 - SHIFT)) && (coeff as u32) < (1 << SHIFT));
        let packed = ((w as u32) << SHIFT) | coeff as u32;
        let slot = &mut table[cov_of(coeff) as usize];
        if packed < *slot {
            *slot = packed;
        }
    }
    for bit in 0..ncols {
        let step = 1usize << bit;
        for s in 0..table.len() {
            if s & step == 0 && table[s | step] < table[s] {
                table[s] = table[s | step];
            }
        }
    }
    let lookup = |need: u32| -> Option<(u64, u64)> {
        let packed = table[need as usize];
        if packed == u32::MAX {
            return None;
        }
        let coeff = (packed & ((1 << SHIFT) - 1)) as usize;
        let (mask, w) = elems[coeff];
        Some((w, mask))
    };

    fn consider(winner: &mut Option<(u64, Vec<u64>)>, total: u64, mut masks: Vec<u64>) {
        masks.sort_unstable();
        let cand = (total, masks);
        if winner.as_ref().map_or(true, |w| cand < *w) {
            *winner = Some(cand);
        }
    }
    let mut winner: Option<(u64, Vec<u64>)> = None;
    let mut by_weight: Vec<(u64, u64, u32)> = elems
        .iter()
        .enumerate()
        .map(|(coeff, &(m, w))| (w, m, cov_of(coeff)))
        .collect();
    by_weight.sort_unstable();
    match max_cycles {
        1 => {
            if let Some((w, mask)) = lookup(full_cols) {
                consider(&mut winner, w, vec![mask]);
            }
        }
        2 => {
            for &(w1, m1, cov1) in &by_weight {
                if winner.as_ref().map_or(false, |b| w1 > b.0) {
                    break;
                }
                if let Some((w2, m2)) = lookup(full_cols & !cov1) {
                    consider(&mut winner, w1 + w2, vec![m1, m2]);
                }
            }
        }
        3 => {
            for i in 0..by_weight.len() {
                let (w1, m1, cov1) = by_weight[i];
                if winner.as_ref().map_or(false, |b| w1 > b.0) {
                    break;
                }
                for &(w2, m2, cov2) in &by_weight[i..] {
                    if winner.as_ref().map_or(false, |b| w1 + w2 > b.0) {
                        break;
                    }
                    if let Some((w3, m3)) = lookup(full_cols & !(cov1 | cov2)) {
                        consider(&mut winner, w1 + w2 + w3, vec![m1, m2, m3]);
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    let (total, masks) = winner.ok_or(OracleError::Infeasible)?;
    let cycles: Vec<BTreeSet<EdgeId>> = masks
        .into_iter()
        .filter(|&m| m != 0)
        .map(|mask| {
            edge_ids
                .iter()
                .enumerate()
                .filter(|(i, _)| (mask >> i) & 1 == 1)
                .map(|(_, &e)| e)
                .collect()
        })
        .collect();
    Ok(CycleCover { cycles, total_length: total })
}

fn weight_of_mask(mask: u64, weights: &[u64]) -> u64 {
    let mut w = 0;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        w += weights[i];
        m &= m - 1;
    }
    w
}

/// Machine-readable validity report for a candidate cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCheck {
    pub cycle_count_ok: bool,
    pub odd_degree_failures: Vec<(usize, VertexId)>,
    pub uncovered_edges: Vec<EdgeId>,
    pub unknown_edges: Vec<EdgeId>,
    pub recomputed_length: u64,
    pub stored_length: u64,
}

impl CoverCheck {
    pub fn passed(&self) -> bool {
        self.cycle_count_ok
            && self.odd_degree_failures.is_empty()
            && self.uncovered_edges.is_empty()
            && self.unknown_edges.is_empty()
            && self.recomputed_length == self.stored_length
    }
}

/// Checks even degrees per cycle, full coverage, cycle count and the stored
/// length. Never fails; the report carries the diagnostics.
pub fn verify_cover(g: &Multigraph, cover: &CycleCover) -> CoverCheck {
    let mut odd = Vec::new();
    let mut unknown = Vec::new();
    for (i, cycle) in cover.cycles.iter().enumerate() {
        for &e in cycle {
            if !g.has_edge(e) {
                unknown.push(e);
            }
        }
        for v in g.vertices() {
            if g.degree_in(v, cycle) % 2 != 0 {
                odd.push((i, v));
            }
        }
    }
    let covered: BTreeSet<EdgeId> = cover.cycles.iter().flatten().copied().collect();
    let uncovered: Vec<EdgeId> = g.edge_ids().filter(|e| !covered.contains(e)).collect();
    CoverCheck {
        cycle_count_ok: cover.cycles.len() <= 3,
        odd_degree_failures: odd,
        uncovered_edges: uncovered,
        unknown_edges: unknown,
        recomputed_length: cover.recompute_length(g),
        stored_length: cover.total_length,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::named;

    #[test]
    fn tree_has_dimension_zero() {
        let g = Multigraph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]);
        assert_eq!(cycle_space_basis(&g).dimension, 0);
    }

    #[test]
    fn circuit_has_dimension_one() {
        let g = Multigraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let b = cycle_space_basis(&g);
        assert_eq!(b.dimension, 1);
        assert_eq!(b.basis[0].len(), 5);
    }

    #[test]
    fn k4_has_dimension_three() {
        assert_eq!(cycle_space_basis(&named::k4()).dimension, 3);
    }

    #[test]
    fn basis_elements_are_even_degree() {
        let g = named::petersen();
        let b = cycle_space_basis(&g);
        assert_eq!(b.dimension, 6);
        for c in &b.basis {
            assert!(g.is_cycle(c));
        }
    }

    #[test]
    fn circuit_cover_is_the_circuit() {
        let g = Multigraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        let c = shortest_cover_bruteforce(&g, 3).unwrap();
        assert_eq!(c.total_length, 6);
        assert_eq!(c.cycles.len(), 1);
        assert!(verify_cover(&g, &c).passed());
    }

    #[test]
    fn k4_optimum_is_eight() {
        // Two 4-circuits; 7 is impossible because any cycle uses 0 or 2 of
        // the 3 edges at each vertex.
        let c = shortest_cover_bruteforce(&named::k4(), 3).unwrap();
        assert_eq!(c.total_length, 8);
        assert!(verify_cover(&named::k4(), &c).passed());
    }

    #[test]
    fn theta_optimum_is_four() {
        let c = shortest_cover_bruteforce(&named::theta(), 3).unwrap();
        assert_eq!(c.total_length, 4);
    }

    #[test]
    fn petersen_optimum_is_22_with_three_cycles() {
        let g = named::petersen();
        let c = shortest_cover_bruteforce(&g, 3).unwrap();
        assert_eq!(c.total_length, 22);
        assert!(verify_cover(&g, &c).passed());
    }

    #[test]
    fn bridge_is_infeasible() {
        let g = Multigraph::from_edges(2, &[(0, 1)]);
        assert_eq!(shortest_cover_bruteforce(&g, 3).unwrap_err(), OracleError::Infeasible);
    }

    #[test]
    fn oracle_is_monotone_in_cycle_budget() {
        let g = named::k4();
        let c3 = shortest_cover_bruteforce(&g, 3).unwrap().total_length;
        let c2 = shortest_cover_bruteforce(&g, 2).unwrap().total_length;
        assert!(c3 <= c2);
    }

    #[test]
    fn oracle_invariant_under_relabeling() {
        let g = Multigraph::from_edges(
            4,
            &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)],
        );
        let h = Multigraph::from_edges(
            4,
            &[(2, 3), (0, 2), (1, 3), (0, 1), (1, 2), (3, 0)],
        );
        let a = shortest_cover_bruteforce(&g, 3).unwrap().total_length;
        let b = shortest_cover_bruteforce(&h, 3).unwrap().total_length;
        assert_eq!(a, b);
    }

    #[test]
    fn verify_cover_flags_faults() {
        let g = named::k4();
        let mut cover = shortest_cover_bruteforce(&g, 3).unwrap();
        // Drop one edge from one cycle: both endpoints go odd.
        let victim = *cover.cycles[0].iter().next().unwrap();
        cover.cycles[0].remove(&victim);
        let check = verify_cover(&g, &cover);
        assert!(!check.passed());
        assert_eq!(check.odd_degree_failures.len(), 2);

        // Remove a whole cycle: coverage failure names the edges.
        let mut cover2 = shortest_cover_bruteforce(&g, 3).unwrap();
        cover2.cycles.pop();
        let check2 = verify_cover(&g, &cover2);
        assert!(!check2.passed());
        assert!(!check2.uncovered_edges.is_empty());

        // Tampered stored length is caught by recomputation.
        let mut cover3 = shortest_cover_bruteforce(&g, 3).unwrap();
        cover3.total_length += 1;
        assert!(!verify_cover(&g, &cover3).passed());
    }
}
