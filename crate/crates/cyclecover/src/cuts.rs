//! Edge-cut and connectivity queries: bridges, cut sizes, minimum odd cut
//! and k-odd-connectivity.
//!
//! Odd cuts are found by exact bipartition enumeration. Degree-two chains
//! are suppressed first — suppression changes neither the set of achievable
//! cut sizes nor their parities — so the enumeration runs on a small core
//! even when the input carries long subdivided paths.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::multigraph::{EdgeId, Multigraph, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CutError {
    #[error("k must be odd, got {0}")]
    InvalidParameter(u64),
    #[error("graph core too large for exact odd-cut enumeration ({0} vertices)")]
    TooLarge(usize),
}

/// A bipartition cut: `side_a`/`side_b` partition the vertices and
/// `edge_ids` are exactly the crossing edges. Loops never cross.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub side_a: BTreeSet<VertexId>,
    pub side_b: BTreeSet<VertexId>,
    pub edge_ids: BTreeSet<EdgeId>,
    pub size: usize,
}

impl Cut {
    pub fn between(g: &Multigraph, side_a: &BTreeSet<VertexId>) -> Cut {
        let side_b: BTreeSet<VertexId> = g.vertices().filter(|v| !side_a.contains(v)).collect();
        let edge_ids: BTreeSet<EdgeId> = g
            .edges()
            .filter(|&(_, u, v)| side_a.contains(&u) != side_a.contains(&v))
            .map(|(e, _, _)| e)
            .collect();
        let size = edge_ids.len();
        Cut { side_a: side_a.clone(), side_b, edge_ids, size }
    }
}

/// Number of edges with one endpoint in `x` and the other in `y`.
pub fn edge_count_between(g: &Multigraph, x: &BTreeSet<VertexId>, y: &BTreeSet<VertexId>) -> usize {
    g.edges()
        .filter(|&(_, u, v)| {
            (x.contains(&u) && y.contains(&v)) || (x.contains(&v) && y.contains(&u))
        })
        .count()
}

/// Exactly the edges whose removal increases the component count.
/// A graph is bridgeless iff the result is empty.
pub fn find_bridges(g: &Multigraph) -> BTreeSet<EdgeId> {
    // Iterative DFS lowpoint computation over edge ids; parallel edges and
    // loops are never bridges because each edge is tracked individually.
    let mut adj: BTreeMap<VertexId, Vec<(VertexId, EdgeId)>> = BTreeMap::new();
    for (e, u, v) in g.edges() {
        adj.entry(u).or_default().push((v, e));
        adj.entry(v).or_default().push((u, e));
    }
    let mut index: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut low: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut bridges = BTreeSet::new();
    let mut counter = 0usize;

    for start in g.vertices() {
        if index.contains_key(&start) {
            continue;
        }
        // stack of (vertex, incoming edge, next child index)
        let mut stack: Vec<(VertexId, Option<EdgeId>, usize)> = vec![(start, None, 0)];
        index.insert(start, counter);
        low.insert(start, counter);
        counter += 1;
        while let Some(&(v, via, next)) = stack.last() {
            let neighbors = adj.get(&v).map(|ns| ns.as_slice()).unwrap_or(&[]);
            if next < neighbors.len() {
                let (w, e) = neighbors[next];
                stack.last_mut().unwrap().2 += 1;
                if Some(e) == via || w == v {
                    continue; // incoming edge or loop
                }
                if let Some(&iw) = index.get(&w) {
                    let lv = low[&v].min(iw);
                    low.insert(v, lv);
                } else {
                    index.insert(w, counter);
                    low.insert(w, counter);
                    counter += 1;
                    stack.push((w, Some(e), 0));
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    let lv = low[&v];
                    let lp = low[&parent].min(lv);
                    low.insert(parent, lp);
                    if lv > index[&parent] {
                        // Tree edge between parent and v with low above the
                        // parent: a bridge when no parallel copy exists (a
                        // copy would have lowered low[v] already).
                        if let Some(e) = via {
                            bridges.insert(e);
                        }
                    }
                }
            }
        }
    }
    bridges
}

pub fn is_bridgeless(g: &Multigraph) -> bool {
    find_bridges(g).is_empty()
}

/// Minimum size of an odd edge-cut, or `Unbounded` when none exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OddCutSize {
    Size(usize),
    Unbounded,
}

impl OddCutSize {
    pub fn at_least(&self, k: usize) -> bool {
        match self {
            OddCutSize::Size(s) => *s >= k,
            OddCutSize::Unbounded => true,
        }
    }
}

/// Minimum over all vertex bipartitions (both sides nonempty, per component)
/// of the crossing count, restricted to odd counts. Components are handled
/// independently: the empty cut between components is even and never odd.
pub fn min_odd_cut_size(g: &Multigraph) -> Result<OddCutSize, CutError> {
    let mut best: Option<usize> = None;
    for comp in g.components() {
        let sub = g.induced(&comp);
        // Suppressing degree-two chains preserves achievable odd cut sizes:
        // normalizing a cut moves each suppressed vertex beside a neighbor,
        // changing the crossing count by steps of two.
        let (core, _) = sub.suppress_degree_two();
        if let OddCutSize::Size(s) = min_odd_cut_connected(&core)? {
            best = Some(best.map_or(s, |b| b.min(s)));
        }
    }
    Ok(best.map_or(OddCutSize::Unbounded, OddCutSize::Size))
}

fn min_odd_cut_connected(g: &Multigraph) -> Result<OddCutSize, CutError> {
    let verts: Vec<VertexId> = g.vertices().collect();
    let n = verts.len();
    if n <= 1 {
        return Ok(OddCutSize::Unbounded);
    }
    if n > 22 {
        return Err(CutError::TooLarge(n));
    }
    let vindex: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let edges: Vec<(usize, usize)> = g
        .edges()
        .filter(|&(_, u, v)| u != v)
        .map(|(_, u, v)| (vindex[&u], vindex[&v]))
        .collect();
    let mut best: Option<usize> = None;
    // Fix vertex 0 on side A; enumerate the rest.
    for mask in 0..(1u32 << (n - 1)) {
        let side = (mask as u64) << 1; // bit i set = vertex i on side B
        if side == 0 {
            continue; // side B empty
        }
        let mut crossing = 0usize;
        for &(a, b) in &edges {
            if ((side >> a) & 1) != ((side >> b) & 1) {
                crossing += 1;
            }
        }
        if crossing % 2 == 1 {
            best = Some(best.map_or(crossing, |b| b.min(crossing)));
        }
    }
    Ok(best.map_or(OddCutSize::Unbounded, OddCutSize::Size))
}

/// True iff the graph has no odd edge-cut of size less than `k` (`k` odd).
/// `k = 3` is exactly bridgelessness and is answered by bridge search, so it
/// stays cheap on large graphs.
pub fn is_k_odd_connected(g: &Multigraph, k: u64) -> Result<bool, CutError> {
    if k % 2 == 0 {
        return Err(CutError::InvalidParameter(k));
    }
    match k {
        1 => Ok(true),
        3 => Ok(is_bridgeless(g)),
        _ => Ok(min_odd_cut_size(g)?.at_least(k as usize)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::Multigraph;

    #[test]
    fn path_edges_are_bridges() {
        let g = Multigraph::from_edges(3, &[(0, 1), (1, 2)]);
        assert_eq!(find_bridges(&g).len(), 2);
    }

    #[test]
    fn k4_is_bridgeless() {
        let g = Multigraph::from_edges(
            4,
            &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)],
        );
        assert!(find_bridges(&g).is_empty());
    }

    #[test]
    fn two_triangles_joined_by_one_edge() {
        let g = Multigraph::from_edges(
            6,
            &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3)],
        );
        assert_eq!(find_bridges(&g), BTreeSet::from([EdgeId(6)]));
    }

    #[test]
    fn parallel_pair_is_not_a_bridge() {
        let g = Multigraph::from_edges(2, &[(0, 1), (0, 1)]);
        assert!(find_bridges(&g).is_empty());
    }

    #[test]
    fn circuit_has_no_odd_cut() {
        let g = Multigraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(min_odd_cut_size(&g).unwrap(), OddCutSize::Unbounded);
    }

    #[test]
    fn theta_graph_min_odd_cut_is_three() {
        let g = Multigraph::from_edges(2, &[(0, 1), (0, 1), (0, 1)]);
        assert_eq!(min_odd_cut_size(&g).unwrap(), OddCutSize::Size(3));
    }

    #[test]
    fn five_parallel_edges_min_odd_cut_is_five() {
        // Petersen contracted by a pentagon-pair 2-factor.
        let g = Multigraph::from_edges(2, &[(0, 1); 5]);
        assert_eq!(min_odd_cut_size(&g).unwrap(), OddCutSize::Size(5));
    }

    #[test]
    fn k4_is_not_5_odd_connected() {
        let g = Multigraph::from_edges(
            4,
            &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)],
        );
        assert!(is_k_odd_connected(&g, 3).unwrap());
        assert!(!is_k_odd_connected(&g, 5).unwrap());
        assert!(is_k_odd_connected(&g, 1).unwrap());
    }

    #[test]
    fn even_k_is_rejected() {
        let g = Multigraph::from_edges(2, &[(0, 1)]);
        assert_eq!(
            is_k_odd_connected(&g, 4).unwrap_err(),
            CutError::InvalidParameter(4)
        );
    }

    #[test]
    fn theta_fails_5_odd_connectivity() {
        let g = Multigraph::from_edges(2, &[(0, 1), (0, 1), (0, 1)]);
        assert!(!is_k_odd_connected(&g, 5).unwrap());
    }

    #[test]
    fn cut_sides_are_symmetric() {
        let g = Multigraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let a = BTreeSet::from([VertexId(0), VertexId(1)]);
        let cut = Cut::between(&g, &a);
        let flipped = Cut::between(&g, &cut.side_b);
        assert_eq!(cut.size, flipped.size);
        assert_eq!(cut.edge_ids, flipped.edge_ids);
    }

    #[test]
    fn suppression_preserves_odd_cut_sizes() {
        // Subdivided theta: same odd cut structure as theta itself.
        let g = Multigraph::from_edges(
            5,
            &[(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)],
        );
        assert_eq!(min_odd_cut_size(&g).unwrap(), OddCutSize::Size(3));
    }

    #[test]
    fn contraction_preserves_odd_cut_membership() {
        // Every odd cut size of g/F is an odd cut size of g, checked by
        // enumeration on a small instance.
        let g = Multigraph::from_edges(
            5,
            &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2), (0, 3), (1, 4)],
        );
        let f = BTreeSet::from([EdgeId(0)]);
        let (h, _) = g.contract_edges(&f).unwrap();
        let odd_sizes = |g: &Multigraph| -> BTreeSet<usize> {
            let verts: Vec<VertexId> = g.vertices().collect();
            let n = verts.len();
            let mut out = BTreeSet::new();
            for mask in 1..(1u32 << (n - 1)) {
                let side: BTreeSet<VertexId> = verts
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i > 0 && (mask >> (i - 1)) & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                let c = Cut::between(g, &side);
                if c.size % 2 == 1 {
                    out.insert(c.size);
                }
            }
            out
        };
        let of_contracted = odd_sizes(&h);
        let of_original = odd_sizes(&g);
        assert!(of_contracted.is_subset(&of_original));
    }
}
