//! Multigraph data model with first-class edge identities, plus the graph
//! surgeries used throughout the crate: deletion, contraction, suppression of
//! degree-two vertices, vertex splitting and vertex expansion. Every surgery
//! produces a [`ReductionTrace`] so cycles of the reduced graph can be lifted
//! back to the graph they came from.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a vertex. Stable across surgeries: a live id always refers
/// to the same vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

/// Identifier of an edge. Surgeries never reuse a live id for a different
/// edge, so ids double as provenance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown edge id {0}")]
    InvalidEdge(EdgeId),
    #[error("unknown vertex id {0}")]
    InvalidVertex(VertexId),
    #[error("invalid split at vertex {vertex}: {reason}")]
    InvalidSplit { vertex: VertexId, reason: String },
    #[error("invalid expansion at vertex {vertex}: {reason}")]
    InvalidExpansion { vertex: VertexId, reason: String },
    #[error("edge set is not a cycle: odd degree at vertex {0}")]
    NotACycle(VertexId),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Undirected multigraph. Loops (`u == v`) and parallel edges are permitted;
/// edge identity is primary and endpoints are attributes of the edge.
///
/// Weights are optional. An unweighted graph behaves as if every edge had
/// weight one, so "length" and "weight" agree on unweighted graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, (VertexId, VertexId)>,
    weights: Option<BTreeMap<EdgeId, u64>>,
    next_vertex: u32,
    next_edge: u32,
}

impl Default for Multigraph {
    fn default() -> Self {
        Self::new()
    }
}

impl Multigraph {
    pub fn new() -> Self {
        Multigraph {
            vertices: BTreeSet::new(),
            edges: BTreeMap::new(),
            weights: None,
            next_vertex: 0,
            next_edge: 0,
        }
    }

    /// Builds an unweighted graph on vertices `0..n` from endpoint pairs.
    /// Edge ids are assigned in order of the slice.
    pub fn from_edges(n: u32, pairs: &[(u32, u32)]) -> Self {
        let mut g = Multigraph::new();
        for v in 0..n {
            g.ensure_vertex(VertexId(v));
        }
        for &(u, v) in pairs {
            g.ensure_vertex(VertexId(u));
            g.ensure_vertex(VertexId(v));
            g.add_edge(VertexId(u), VertexId(v));
        }
        g
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let id = VertexId(self.next_vertex);
        self.next_vertex += 1;
        self.vertices.insert(id);
        id
    }

    /// Inserts a vertex with a specific id (used by parsing and trace replay).
    pub fn ensure_vertex(&mut self, id: VertexId) {
        self.vertices.insert(id);
        if id.0 >= self.next_vertex {
            self.next_vertex = id.0 + 1;
        }
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> EdgeId {
        let id = EdgeId(self.next_edge);
        self.next_edge += 1;
        self.insert_edge_with_id(id, u, v, None);
        id
    }

    pub fn add_weighted_edge(&mut self, u: VertexId, v: VertexId, w: u64) -> EdgeId {
        let id = EdgeId(self.next_edge);
        self.next_edge += 1;
        self.insert_edge_with_id(id, u, v, Some(w));
        id
    }

    /// Inserts an edge under a caller-chosen id. Panics if the id is live.
    pub fn insert_edge_with_id(&mut self, id: EdgeId, u: VertexId, v: VertexId, w: Option<u64>) {
        assert!(
            !self.edges.contains_key(&id),
            "edge id {id} already in use"
        );
        assert!(self.vertices.contains(&u) && self.vertices.contains(&v));
        self.edges.insert(id, (u, v));
        if id.0 >= self.next_edge {
            self.next_edge = id.0 + 1;
        }
        if let Some(w) = w {
            self.weights
                .get_or_insert_with(BTreeMap::new)
                .insert(id, w);
        } else if let Some(ws) = self.weights.as_mut() {
            ws.insert(id, 1);
        }
    }

    pub fn remove_edge(&mut self, id: EdgeId) -> Result<(), GraphError> {
        self.edges.remove(&id).ok_or(GraphError::InvalidEdge(id))?;
        if let Some(ws) = self.weights.as_mut() {
            ws.remove(&id);
        }
        Ok(())
    }

    pub fn remove_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        if !self.vertices.remove(&v) {
            return Err(GraphError::InvalidVertex(v));
        }
        let incident: Vec<EdgeId> = self
            .edges
            .iter()
            .filter(|(_, &(a, b))| a == v || b == v)
            .map(|(&e, _)| e)
            .collect();
        for e in incident {
            self.remove_edge(e)?;
        }
        Ok(())
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, VertexId, VertexId)> + '_ {
        self.edges.iter().map(|(&e, &(u, v))| (e, u, v))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    pub fn endpoints(&self, e: EdgeId) -> Result<(VertexId, VertexId), GraphError> {
        self.edges.get(&e).copied().ok_or(GraphError::InvalidEdge(e))
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        self.edges.get(&e).map(|&(u, v)| u == v).unwrap_or(false)
    }

    /// The other endpoint of `e` as seen from `v`. For a loop this is `v`.
    pub fn other_end(&self, e: EdgeId, v: VertexId) -> Result<VertexId, GraphError> {
        let (a, b) = self.endpoints(e)?;
        if a == v {
            Ok(b)
        } else if b == v {
            Ok(a)
        } else {
            Err(GraphError::InvalidEdge(e))
        }
    }

    /// Weight of an edge; 1 when the graph is unweighted.
    pub fn weight(&self, e: EdgeId) -> u64 {
        match &self.weights {
            Some(ws) => ws.get(&e).copied().unwrap_or(1),
            None => 1,
        }
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn set_weight(&mut self, e: EdgeId, w: u64) {
        assert!(self.edges.contains_key(&e));
        let ws = self.weights.get_or_insert_with(BTreeMap::new);
        for id in self.edges.keys() {
            ws.entry(*id).or_insert(1);
        }
        ws.insert(e, w);
    }

    /// Assigns weight one to every edge, turning the graph weighted.
    pub fn weight_all_one(&mut self) {
        let ws: BTreeMap<EdgeId, u64> = self.edges.keys().map(|&e| (e, 1)).collect();
        self.weights = Some(ws);
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.keys().map(|&e| self.weight(e)).sum()
    }

    pub fn weight_of(&self, edges: &BTreeSet<EdgeId>) -> u64 {
        edges.iter().map(|&e| self.weight(e)).sum()
    }

    /// Edges incident with `v`, in ascending id order. A loop appears once.
    pub fn edges_at(&self, v: VertexId) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|(_, &(a, b))| a == v || b == v)
            .map(|(&e, _)| e)
            .collect()
    }

    /// Degree of `v`; a loop contributes two.
    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .values()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    pub fn max_degree(&self) -> usize {
        self.vertices
            .iter()
            .map(|&v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.vertices
            .iter()
            .map(|&v| self.degree(v))
            .min()
            .unwrap_or(0)
    }

    pub fn is_cubic(&self) -> bool {
        self.vertices.iter().all(|&v| self.degree(v) == 3)
    }

    /// Degree of `v` restricted to an edge subset; loops still count twice.
    pub fn degree_in(&self, v: VertexId, edges: &BTreeSet<EdgeId>) -> usize {
        edges
            .iter()
            .filter_map(|e| self.edges.get(e))
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    /// True when every vertex has even degree in `edges` (the crate-wide
    /// notion of a cycle: an even-degree subgraph, not necessarily connected).
    pub fn is_cycle(&self, edges: &BTreeSet<EdgeId>) -> bool {
        self.vertices
            .iter()
            .all(|&v| self.degree_in(v, edges) % 2 == 0)
    }

    /// Connected components as vertex sets (isolated vertices included).
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for (&_, &(u, v)) in &self.edges {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
        let mut out = Vec::new();
        for &start in &self.vertices {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                if !comp.insert(v) {
                    continue;
                }
                if let Some(ns) = adj.get(&v) {
                    for &w in ns {
                        if !comp.contains(&w) {
                            stack.push(w);
                        }
                    }
                }
            }
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// The subgraph induced by a vertex set, endpoints and ids preserved.
    pub fn induced(&self, verts: &BTreeSet<VertexId>) -> Multigraph {
        let mut g = Multigraph::new();
        if self.weights.is_some() {
            g.weights = Some(BTreeMap::new());
        }
        for &v in verts {
            g.ensure_vertex(v);
        }
        for (&e, &(u, v)) in &self.edges {
            if verts.contains(&u) && verts.contains(&v) {
                g.insert_edge_with_id(e, u, v, Some(self.weight(e)));
            }
        }
        if self.weights.is_none() {
            g.weights = None;
        }
        g
    }
}

/// Result of [`Multigraph::subdivide_all`]: the subdivided graph and the
/// correspondence between original edges and their two halves. The half in
/// `halves(e).0` is incident with the first endpoint of `e`; a loop's halves
/// are ordered by id. Weights ride on the first half so totals match.
#[derive(Debug, Clone)]
pub struct Subdivision {
    pub graph: Multigraph,
    pub halves: BTreeMap<EdgeId, (EdgeId, EdgeId)>,
    pub parent: BTreeMap<EdgeId, EdgeId>,
    pub mid: BTreeMap<EdgeId, VertexId>,
    original_ends: BTreeMap<EdgeId, (VertexId, VertexId)>,
}

impl Subdivision {
    /// The half of `e` incident with vertex `at` (for a loop, `occurrence`
    /// 0 or 1 picks the end).
    pub fn half_at(&self, e: EdgeId, at: VertexId, occurrence: usize) -> EdgeId {
        let (u, v) = self.original_ends[&e];
        let (h1, h2) = self.halves[&e];
        if u == v {
            assert_eq!(at, u, "vertex is not an endpoint of the loop");
            if occurrence == 0 {
                h1
            } else {
                h2
            }
        } else if at == u {
            h1
        } else {
            assert_eq!(at, v, "vertex is not an endpoint of the edge");
            h2
        }
    }
}

/// One recorded surgery. Each record stores enough to replay the operation
/// forward and to lift a cycle of the post-record graph back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurgeryRecord {
    /// Edges (and, afterwards, isolated vertices) removed outright.
    Delete {
        edges: Vec<(EdgeId, VertexId, VertexId, u64)>,
        vertices: Vec<VertexId>,
    },
    /// A single edge contracted: `merged` is identified into `kept`.
    /// `moved` lists the edge-ends transferred from `merged` to `kept`,
    /// one entry per end (a loop at `merged` appears twice); the lift uses
    /// it to recover per-vertex parity.
    Contract {
        edge: EdgeId,
        kept: VertexId,
        merged: VertexId,
        weight: u64,
        moved: Vec<EdgeId>,
    },
    /// Degree-two vertex replaced by a single edge joining its neighbors.
    Suppress {
        vertex: VertexId,
        removed: [EdgeId; 2],
        neighbors: [VertexId; 2],
        new_edge: EdgeId,
    },
    /// Edges `removed` split away from `center` onto a fresh path through
    /// `new_vertex`; `new_edges[i]` replaces `removed[i]`.
    Split {
        center: VertexId,
        removed: [EdgeId; 2],
        far: [VertexId; 2],
        new_vertex: VertexId,
        new_edges: [EdgeId; 2],
    },
    /// Degree-four vertex replaced by an adjacent pair: edges in `to_first`
    /// move to `first`, the rest of the star moves to `second`.
    Expand {
        vertex: VertexId,
        first: VertexId,
        second: VertexId,
        new_edge: EdgeId,
        to_first: Vec<EdgeId>,
        to_second: Vec<EdgeId>,
    },
}

/// Ordered log of surgeries. Replaying it forward on the original graph
/// reproduces the final graph edge-id-exactly; [`ReductionTrace::lift_cycle`]
/// maps cycles of the final graph back through every record.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReductionTrace {
    pub records: Vec<SurgeryRecord>,
}

impl ReductionTrace {
    pub fn new() -> Self {
        ReductionTrace { records: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn extend(&mut self, other: ReductionTrace) {
        self.records.extend(other.records);
    }

    /// Replays the trace forward on `g`, reproducing the final graph.
    pub fn replay(&self, g: &Multigraph) -> Result<Multigraph, GraphError> {
        let mut g = g.clone();
        for rec in &self.records {
            match rec {
                SurgeryRecord::Delete { edges, vertices } => {
                    for &(e, _, _, _) in edges {
                        g.remove_edge(e)?;
                    }
                    for &v in vertices {
                        g.remove_vertex(v)?;
                    }
                }
                SurgeryRecord::Contract { edge, kept, merged, .. } => {
                    g.contract_single(*edge, *kept, *merged)?;
                }
                SurgeryRecord::Suppress { vertex, removed, neighbors, new_edge } => {
                    let w = g.weight(removed[0]) + g.weight(removed[1]);
                    g.remove_edge(removed[0])?;
                    g.remove_edge(removed[1])?;
                    g.remove_vertex(*vertex)?;
                    let w = if g.is_weighted() { Some(w) } else { None };
                    g.insert_edge_with_id(*new_edge, neighbors[0], neighbors[1], w);
                }
                SurgeryRecord::Split { center: _, removed, far, new_vertex, new_edges } => {
                    let w0 = g.weight(removed[0]);
                    let w1 = g.weight(removed[1]);
                    let weighted = g.is_weighted();
                    g.remove_edge(removed[0])?;
                    g.remove_edge(removed[1])?;
                    g.ensure_vertex(*new_vertex);
                    let (w0, w1) = if weighted { (Some(w0), Some(w1)) } else { (None, None) };
                    g.insert_edge_with_id(new_edges[0], far[0], *new_vertex, w0);
                    g.insert_edge_with_id(new_edges[1], *new_vertex, far[1], w1);
                }
                SurgeryRecord::Expand { vertex, first, second, new_edge, to_first, to_second } => {
                    g.ensure_vertex(*first);
                    g.ensure_vertex(*second);
                    for (&e, target) in to_first
                        .iter()
                        .zip(std::iter::repeat(*first))
                        .chain(to_second.iter().zip(std::iter::repeat(*second)))
                    {
                        let (u, v) = g.endpoints(e)?;
                        let w = g.weight(e);
                        let other = if u == *vertex { v } else { u };
                        let w = if g.is_weighted() { Some(w) } else { None };
                        g.remove_edge(e)?;
                        g.insert_edge_with_id(e, other, target, w);
                    }
                    g.remove_vertex(*vertex)?;
                    let w = if g.is_weighted() { Some(0) } else { None };
                    g.insert_edge_with_id(*new_edge, *first, *second, w);
                }
            }
        }
        Ok(g)
    }

    /// Lifts an even-degree edge set of the final graph back to one of the
    /// pre-trace graph. Suppressed paths are re-expanded, split paths map
    /// back to the two original edges, and contracted edges are re-inserted
    /// where needed to restore even degrees.
    pub fn lift_cycle(
        &self,
        final_graph: &Multigraph,
        cycle: &BTreeSet<EdgeId>,
    ) -> Result<BTreeSet<EdgeId>, GraphError> {
        if let Some(v) = final_graph
            .vertices()
            .find(|&v| final_graph.degree_in(v, cycle) % 2 != 0)
        {
            return Err(GraphError::NotACycle(v));
        }
        let mut cur = cycle.clone();
        for rec in self.records.iter().rev() {
            match rec {
                SurgeryRecord::Delete { .. } => {}
                SurgeryRecord::Contract { edge, moved, .. } => {
                    // Parity at the merged vertex equals the number of
                    // cycle edge-ends this contraction transferred; odd
                    // parity is repaired by re-inserting the contracted
                    // edge (a loop contraction transfers nothing).
                    let transferred = moved.iter().filter(|e| cur.contains(e)).count();
                    if transferred % 2 == 1 {
                        cur.insert(*edge);
                    }
                }
                SurgeryRecord::Suppress { removed, new_edge, .. } => {
                    if cur.remove(new_edge) {
                        cur.insert(removed[0]);
                        cur.insert(removed[1]);
                    }
                }
                SurgeryRecord::Split { removed, new_vertex, new_edges, .. } => {
                    let a = cur.remove(&new_edges[0]);
                    let b = cur.remove(&new_edges[1]);
                    if a != b {
                        return Err(GraphError::NotACycle(*new_vertex));
                    }
                    if a {
                        cur.insert(removed[0]);
                        cur.insert(removed[1]);
                    }
                }
                SurgeryRecord::Expand { new_edge, .. } => {
                    // Edge ids were preserved by the expansion; dropping the
                    // connecting edge and merging the endpoint pair back
                    // restores parity by itself.
                    cur.remove(new_edge);
                }
            }
        }
        Ok(cur)
    }

    fn contract_provenance(&self) -> BTreeMap<VertexId, VertexId> {
        let mut map = BTreeMap::new();
        for rec in &self.records {
            if let SurgeryRecord::Contract { kept, merged, .. } = rec {
                if kept != merged {
                    map.insert(*merged, *kept);
                }
            }
        }
        map
    }

    /// Resolves a vertex of the original graph to the vertex it was merged
    /// into in the final graph (identity when never merged).
    pub fn resolve_vertex(&self, v: VertexId) -> VertexId {
        let map = self.contract_provenance();
        let mut cur = v;
        while let Some(&next) = map.get(&cur) {
            cur = next;
        }
        cur
    }
}

impl Multigraph {
    /// Contracts a single edge, returning the edge-ends transferred from
    /// `merged` to `kept` (one entry per end).
    fn contract_single(
        &mut self,
        e: EdgeId,
        kept: VertexId,
        merged: VertexId,
    ) -> Result<Vec<EdgeId>, GraphError> {
        let (u, v) = self.endpoints(e)?;
        assert!(
            (u == kept && v == merged) || (u == merged && v == kept),
            "contract record does not match edge endpoints"
        );
        self.remove_edge(e)?;
        if kept == merged {
            return Ok(Vec::new()); // loop: contraction equals deletion
        }
        let mut moved: Vec<EdgeId> = Vec::new();
        let touched: Vec<EdgeId> = self
            .edges
            .iter()
            .filter(|(_, &(a, b))| a == merged || b == merged)
            .map(|(&e, _)| e)
            .collect();
        for e in touched {
            let (a, b) = self.edges[&e];
            if a == merged {
                moved.push(e);
            }
            if b == merged {
                moved.push(e);
            }
            let na = if a == merged { kept } else { a };
            let nb = if b == merged { kept } else { b };
            self.edges.insert(e, (na, nb));
        }
        self.vertices.remove(&merged);
        Ok(moved)
    }

    /// Contracts every edge in `es`: endpoints identified, contracted edges
    /// removed, all other edges (including new loops and parallels) kept with
    /// their ids. Contracting a loop equals deleting it.
    pub fn contract_edges(
        &self,
        es: &BTreeSet<EdgeId>,
    ) -> Result<(Multigraph, ReductionTrace), GraphError> {
        let mut g = self.clone();
        let mut trace = ReductionTrace::new();
        for &e in es {
            if !self.edges.contains_key(&e) {
                return Err(GraphError::InvalidEdge(e));
            }
        }
        for &e in es {
            let (u, v) = g.endpoints(e)?;
            let (kept, merged) = if u <= v { (u, v) } else { (v, u) };
            let w = g.weight(e);
            let moved = g.contract_single(e, kept, merged)?;
            trace
                .records
                .push(SurgeryRecord::Contract { edge: e, kept, merged, weight: w, moved });
        }
        Ok((g, trace))
    }

    /// Suppresses every suppressible degree-two vertex: the two-edge path
    /// through the vertex becomes a single edge whose weight is the sum of
    /// the replaced weights. A degree-two vertex carrying a loop, or one
    /// whose suppression would leave a vertexless component (the digon
    /// stopping shape), is left untouched.
    pub fn suppress_degree_two(&self) -> (Multigraph, ReductionTrace) {
        let mut g = self.clone();
        let mut trace = ReductionTrace::new();
        loop {
            let candidate = g.vertices().find(|&v| {
                if g.degree(v) != 2 {
                    return false;
                }
                let es = g.edges_at(v);
                if es.len() != 2 {
                    return false; // single loop
                }
                let a = g.other_end(es[0], v).unwrap();
                let b = g.other_end(es[1], v).unwrap();
                // A digon would collapse to a loop at a degree-0 vertex; stop
                // there so the graph stays well-formed.
                !(a == b && g.degree(a) == 2)
            });
            let Some(v) = candidate else { break };
            let es = g.edges_at(v);
            let a = g.other_end(es[0], v).unwrap();
            let b = g.other_end(es[1], v).unwrap();
            let w = g.weight(es[0]) + g.weight(es[1]);
            let new_edge = EdgeId(g.next_edge);
            g.next_edge += 1;
            let weighted = g.is_weighted();
            g.remove_edge(es[0]).unwrap();
            g.remove_edge(es[1]).unwrap();
            g.remove_vertex(v).unwrap();
            g.insert_edge_with_id(new_edge, a, b, weighted.then_some(w));
            trace.records.push(SurgeryRecord::Suppress {
                vertex: v,
                removed: [es[0], es[1]],
                neighbors: [a, b],
                new_edge,
            });
        }
        (g, trace)
    }

    /// Splits the two edges `e1`, `e2` (both incident with `v`) away from
    /// `v`: the edges are removed and a two-edge path through a fresh vertex
    /// joins their far endpoints. Edge count is preserved. The three loop
    /// cases (one of the edges a loop, both loops) reduce to the same
    /// record shape because far endpoints of a loop are `v` itself.
    pub fn split_off_edges(
        &self,
        v: VertexId,
        e1: EdgeId,
        e2: EdgeId,
    ) -> Result<(Multigraph, ReductionTrace), GraphError> {
        if e1 == e2 {
            return Err(GraphError::InvalidSplit {
                vertex: v,
                reason: "the two split edges must be distinct".into(),
            });
        }
        for &e in [&e1, &e2] {
            let (a, b) = self.endpoints(e)?;
            if a != v && b != v {
                return Err(GraphError::InvalidSplit {
                    vertex: v,
                    reason: format!("edge {e} is not incident with {v}"),
                });
            }
        }
        let mut g = self.clone();
        let far1 = g.other_end(e1, v)?;
        let far2 = g.other_end(e2, v)?;
        let w1 = g.weight(e1);
        let w2 = g.weight(e2);
        let weighted = g.is_weighted();
        let x = g.add_vertex();
        let f1 = EdgeId(g.next_edge);
        g.next_edge += 1;
        let f2 = EdgeId(g.next_edge);
        g.next_edge += 1;
        g.remove_edge(e1)?;
        g.remove_edge(e2)?;
        g.insert_edge_with_id(f1, far1, x, weighted.then_some(w1));
        g.insert_edge_with_id(f2, x, far2, weighted.then_some(w2));
        let mut trace = ReductionTrace::new();
        trace.records.push(SurgeryRecord::Split {
            center: v,
            removed: [e1, e2],
            far: [far1, far2],
            new_vertex: x,
            new_edges: [f1, f2],
        });
        Ok((g, trace))
    }

    /// Vertex-name form of the split: picks the lowest-id edge toward each
    /// named neighbor (`v1 == v` or `v2 == v` select loops).
    pub fn split_off(
        &self,
        v1: VertexId,
        v: VertexId,
        v2: VertexId,
    ) -> Result<(Multigraph, ReductionTrace), GraphError> {
        let find = |target: VertexId, skip: Option<EdgeId>| -> Option<EdgeId> {
            self.edges_at(v).into_iter().find(|&e| {
                Some(e) != skip && self.other_end(e, v).unwrap() == target
            })
        };
        let e1 = find(v1, None).ok_or_else(|| GraphError::InvalidSplit {
            vertex: v,
            reason: format!("no edge between {v} and {v1}"),
        })?;
        let e2 = find(v2, Some(e1)).ok_or_else(|| GraphError::InvalidSplit {
            vertex: v,
            reason: format!("no second edge between {v} and {v2}"),
        })?;
        self.split_off_edges(v, e1, e2)
    }

    /// Expands a degree-four vertex `v` with respect to `half` (two of the
    /// incident edges): `v` is replaced by adjacent vertices `v1` (taking
    /// `half`) and `v2` (taking the rest), joined by a fresh edge of weight
    /// zero whenever weights are in play.
    pub fn expand_edges(
        &self,
        v: VertexId,
        half: &[EdgeId; 2],
    ) -> Result<(Multigraph, ReductionTrace), GraphError> {
        if self.degree(v) != 4 {
            return Err(GraphError::InvalidExpansion {
                vertex: v,
                reason: format!("degree is {}, expected 4", self.degree(v)),
            });
        }
        let star = self.edges_at(v);
        if star.len() != 4 {
            return Err(GraphError::InvalidExpansion {
                vertex: v,
                reason: "vertex carries a loop".into(),
            });
        }
        let mut neighbor_set = BTreeSet::new();
        for &e in &star {
            if !neighbor_set.insert(self.other_end(e, v)?) {
                return Err(GraphError::InvalidExpansion {
                    vertex: v,
                    reason: "vertex is incident with parallel edges".into(),
                });
            }
        }
        if !half.iter().all(|e| star.contains(e)) || half[0] == half[1] {
            return Err(GraphError::InvalidExpansion {
                vertex: v,
                reason: "half must name two distinct incident edges".into(),
            });
        }
        let mut g = self.clone();
        let v1 = g.add_vertex();
        let v2 = g.add_vertex();
        let new_edge = EdgeId(g.next_edge);
        g.next_edge += 1;
        let weighted = g.is_weighted();
        let mut to_first = Vec::new();
        let mut to_second = Vec::new();
        for &e in &star {
            let target = if half.contains(&e) { v1 } else { v2 };
            if target == v1 {
                to_first.push(e);
            } else {
                to_second.push(e);
            }
            let other = g.other_end(e, v)?;
            let w = g.weight(e);
            g.remove_edge(e)?;
            g.insert_edge_with_id(e, other, target, weighted.then_some(w));
        }
        g.remove_vertex(v)?;
        g.insert_edge_with_id(new_edge, v1, v2, weighted.then_some(0));
        let mut trace = ReductionTrace::new();
        trace.records.push(SurgeryRecord::Expand {
            vertex: v,
            first: v1,
            second: v2,
            new_edge,
            to_first,
            to_second,
        });
        Ok((g, trace))
    }

    /// Expansion with `half` given as a pair of neighbor names.
    pub fn expand(
        &self,
        v: VertexId,
        half: &[VertexId; 2],
    ) -> Result<(Multigraph, ReductionTrace), GraphError> {
        if half[0] == half[1] {
            return Err(GraphError::InvalidExpansion {
                vertex: v,
                reason: "half must contain two distinct neighbors".into(),
            });
        }
        let star = self.edges_at(v);
        let mut picked = Vec::new();
        for &t in half {
            let e = star
                .iter()
                .find(|&&e| self.other_end(e, v).unwrap() == t && !picked.contains(&e))
                .ok_or_else(|| GraphError::InvalidExpansion {
                    vertex: v,
                    reason: format!("{t} is not a neighbor of {v}"),
                })?;
            picked.push(*e);
        }
        self.expand_edges(v, &[picked[0], picked[1]])
    }

    /// Subdivides every edge once. Loops become digons and parallel edges
    /// become disjoint paths, so the result has neither loops nor any two
    /// edges sharing both endpoints at an original vertex. Cut sizes and
    /// their parities are preserved.
    pub fn subdivide_all(&self) -> Subdivision {
        let mut g = self.clone();
        let mut halves = BTreeMap::new();
        let mut parent = BTreeMap::new();
        let mut mid = BTreeMap::new();
        let mut original_ends = BTreeMap::new();
        let originals: Vec<(EdgeId, VertexId, VertexId)> = self.edges().collect();
        for (e, u, v) in originals {
            original_ends.insert(e, (u, v));
            let w = g.weight(e);
            let weighted = g.is_weighted();
            let x = g.add_vertex();
            let h1 = EdgeId(g.next_edge);
            g.next_edge += 1;
            let h2 = EdgeId(g.next_edge);
            g.next_edge += 1;
            g.remove_edge(e).unwrap();
            g.insert_edge_with_id(h1, u, x, weighted.then_some(w));
            g.insert_edge_with_id(h2, x, v, weighted.then_some(0));
            halves.insert(e, (h1, h2));
            parent.insert(h1, e);
            parent.insert(h2, e);
            mid.insert(e, x);
        }
        Subdivision { graph: g, halves, parent, mid, original_ends }
    }

    /// Removes every loop, returning them with their weights; used by the
    /// cover constructions, which handle loops separately.
    pub fn strip_loops(&self) -> (Multigraph, Vec<EdgeId>) {
        let loops: Vec<EdgeId> = self
            .edges
            .iter()
            .filter(|(_, &(u, v))| u == v)
            .map(|(&e, _)| e)
            .collect();
        let mut g = self.clone();
        for &e in &loops {
            g.remove_edge(e).unwrap();
        }
        (g, loops)
    }
}

// ---------------------------------------------------------------------------
// Text format: `mg <n> <m>` header, optional `v <id>` lines, `e <id> <u> <v>
// [<w>]` lines, `#` comments. Loops via u = v, parallels via distinct ids.
// ---------------------------------------------------------------------------

impl Multigraph {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "mg {} {}\n",
            self.vertices.len(),
            self.edges.len()
        ));
        for &v in &self.vertices {
            out.push_str(&format!("v {}\n", v.0));
        }
        for (&e, &(u, v)) in &self.edges {
            if self.is_weighted() {
                out.push_str(&format!("e {} {} {} {}\n", e.0, u.0, v.0, self.weight(e)));
            } else {
                out.push_str(&format!("e {} {} {}\n", e.0, u.0, v.0));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Multigraph, GraphError> {
        let mut g = Multigraph::new();
        let mut saw_header = false;
        let mut expect = (0usize, 0usize);
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = idx + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let tag = parts.next().unwrap();
            let parse_u32 = |s: Option<&str>, what: &str| -> Result<u32, GraphError> {
                s.ok_or_else(|| GraphError::Parse {
                    line: lineno,
                    message: format!("missing {what}"),
                })?
                .parse()
                .map_err(|_| GraphError::Parse {
                    line: lineno,
                    message: format!("bad {what}"),
                })
            };
            match tag {
                "mg" => {
                    let n = parse_u32(parts.next(), "vertex count")?;
                    let m = parse_u32(parts.next(), "edge count")?;
                    expect = (n as usize, m as usize);
                    saw_header = true;
                }
                "v" => {
                    let id = parse_u32(parts.next(), "vertex id")?;
                    g.ensure_vertex(VertexId(id));
                }
                "e" => {
                    let id = parse_u32(parts.next(), "edge id")?;
                    let u = parse_u32(parts.next(), "endpoint")?;
                    let v = parse_u32(parts.next(), "endpoint")?;
                    let w = parts.next();
                    g.ensure_vertex(VertexId(u));
                    g.ensure_vertex(VertexId(v));
                    if g.has_edge(EdgeId(id)) {
                        return Err(GraphError::Parse {
                            line: lineno,
                            message: format!("duplicate edge id {id}"),
                        });
                    }
                    let w = match w {
                        Some(s) => Some(s.parse::<u64>().map_err(|_| GraphError::Parse {
                            line: lineno,
                            message: "bad weight".into(),
                        })?),
                        None => None,
                    };
                    g.insert_edge_with_id(EdgeId(id), VertexId(u), VertexId(v), w);
                }
                _ => {
                    return Err(GraphError::Parse {
                        line: lineno,
                        message: format!("unknown line tag {tag:?}"),
                    })
                }
            }
        }
        if !saw_header {
            return Err(GraphError::Parse { line: 0, message: "missing mg header".into() });
        }
        if g.vertex_count() != expect.0 || g.edge_count() != expect.1 {
            return Err(GraphError::Parse {
                line: 0,
                message: format!(
                    "header promised {} vertices / {} edges, found {} / {}",
                    expect.0,
                    expect.1,
                    g.vertex_count(),
                    g.edge_count()
                ),
            });
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Multigraph {
        Multigraph::from_edges(3, &[(0, 1), (1, 2), (2, 0)])
    }

    #[test]
    fn contract_triangle_edge_leaves_parallel_pair() {
        let g = triangle();
        let (h, _) = g.contract_edges(&BTreeSet::from([EdgeId(0)])).unwrap();
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.edge_count(), 2);
        let (u1, v1) = h.endpoints(EdgeId(1)).unwrap();
        let (u2, v2) = h.endpoints(EdgeId(2)).unwrap();
        assert_eq!(
            BTreeSet::from([u1, v1]),
            BTreeSet::from([u2, v2]),
            "the two surviving edges are parallel"
        );
    }

    #[test]
    fn contract_loop_equals_deletion() {
        let mut g = Multigraph::new();
        let v = g.add_vertex();
        let w = g.add_vertex();
        let l = g.add_edge(v, v);
        g.add_edge(v, w);
        let (h, _) = g.contract_edges(&BTreeSet::from([l])).unwrap();
        let mut expect = g.clone();
        expect.remove_edge(l).unwrap();
        assert_eq!(h, expect);
    }

    #[test]
    fn contract_hamilton_circuit_of_k4_leaves_two_loops() {
        // K4 on vertices 0..4; Hamilton circuit 0-1-2-3-0, chords 02 and 13.
        let g = Multigraph::from_edges(
            4,
            &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)],
        );
        let ham = BTreeSet::from([EdgeId(0), EdgeId(1), EdgeId(2), EdgeId(3)]);
        let (h, _) = g.contract_edges(&ham).unwrap();
        assert_eq!(h.vertex_count(), 1);
        assert_eq!(h.edge_count(), 2);
        assert!(h.is_loop(EdgeId(4)) && h.is_loop(EdgeId(5)));
    }

    #[test]
    fn contract_unknown_edge_is_rejected() {
        let g = triangle();
        assert_eq!(
            g.contract_edges(&BTreeSet::from([EdgeId(99)])).unwrap_err(),
            GraphError::InvalidEdge(EdgeId(99))
        );
    }

    #[test]
    fn suppress_path_sums_weights() {
        let mut g = Multigraph::new();
        let u = g.add_vertex();
        let x = g.add_vertex();
        let v = g.add_vertex();
        g.add_weighted_edge(u, x, 2);
        g.add_weighted_edge(x, v, 5);
        let (h, trace) = g.suppress_degree_two();
        // u and v are now degree 1; they are not suppressible, x was.
        assert!(!h.has_vertex(x));
        let survivors: Vec<_> = h.edge_ids().collect();
        assert_eq!(survivors.len(), 1);
        assert_eq!(h.weight(survivors[0]), 7);
        assert_eq!(trace.records.len(), 1);
    }

    #[test]
    fn suppress_circuit_stops_at_digon() {
        let g = triangle();
        let (h, _) = g.suppress_degree_two();
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.edge_count(), 2);
        assert!(h.vertices().all(|v| h.degree(v) == 2));
    }

    #[test]
    fn suppress_cubic_graph_is_identity() {
        let g = Multigraph::from_edges(
            4,
            &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)],
        );
        let (h, trace) = g.suppress_degree_two();
        assert_eq!(h, g);
        assert!(trace.is_empty());
    }

    #[test]
    fn split_generic_preserves_edge_count_and_parity() {
        let g = Multigraph::from_edges(
            4,
            &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)],
        );
        let before: Vec<usize> = (0..4).map(|v| g.degree(VertexId(v))).collect();
        let (h, _) = g.split_off(VertexId(1), VertexId(0), VertexId(3)).unwrap();
        assert_eq!(h.edge_count(), g.edge_count());
        for v in 0..4 {
            if v != 0 {
                assert_eq!(h.degree(VertexId(v)), before[v as usize]);
            }
        }
        assert_eq!(h.degree(VertexId(0)) % 2, before[0] % 2);
    }

    #[test]
    fn split_two_loops_yields_parallel_pair() {
        let mut g = Multigraph::new();
        let v = g.add_vertex();
        let l1 = g.add_edge(v, v);
        let l2 = g.add_edge(v, v);
        let (h, _) = g.split_off_edges(v, l1, l2).unwrap();
        assert_eq!(h.edge_count(), 2);
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.degree(v), 2);
        let x = h.vertices().find(|&u| u != v).unwrap();
        assert_eq!(h.degree(x), 2);
        assert!(h.edge_ids().all(|e| !h.is_loop(e)));
    }

    #[test]
    fn split_missing_incident_edge_is_rejected() {
        let g = triangle();
        let err = g.split_off(VertexId(0), VertexId(1), VertexId(1)).unwrap_err();
        assert!(matches!(err, GraphError::InvalidSplit { .. }));
    }

    #[test]
    fn expand_redistributes_star() {
        let mut g = Multigraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        g.weight_all_one();
        let (h, _) = g.expand(VertexId(0), &[VertexId(1), VertexId(2)]).unwrap();
        assert_eq!(h.vertex_count(), 6);
        assert_eq!(h.edge_count(), 5);
        let v1 = VertexId(5);
        let v2 = VertexId(6);
        assert_eq!(h.degree(v1), 3);
        assert_eq!(h.degree(v2), 3);
        let new_edge = h
            .edge_ids()
            .find(|&e| {
                let (a, b) = h.endpoints(e).unwrap();
                (a, b) == (v1, v2) || (a, b) == (v2, v1)
            })
            .unwrap();
        assert_eq!(h.weight(new_edge), 0);
    }

    #[test]
    fn expand_then_contract_recovers_graph_shape() {
        let g = Multigraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (3, 4)]);
        let (h, trace) = g.expand(VertexId(0), &[VertexId(1), VertexId(2)]).unwrap();
        let SurgeryRecord::Expand { new_edge, .. } = trace.records[0] else {
            panic!()
        };
        let (back, _) = h.contract_edges(&BTreeSet::from([new_edge])).unwrap();
        assert_eq!(back.edge_count(), g.edge_count());
        let mut degs: Vec<usize> = back.vertices().map(|v| back.degree(v)).collect();
        degs.sort();
        let mut expect: Vec<usize> = g.vertices().map(|v| g.degree(v)).collect();
        expect.sort();
        assert_eq!(degs, expect);
    }

    #[test]
    fn expand_rejects_bad_inputs() {
        let g = Multigraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        assert!(matches!(
            g.expand(VertexId(0), &[VertexId(1), VertexId(2)]),
            Err(GraphError::InvalidExpansion { .. })
        ));
        let mut p = Multigraph::from_edges(3, &[(0, 1), (0, 1), (0, 2), (0, 2)]);
        p.weight_all_one();
        assert!(matches!(
            p.expand(VertexId(0), &[VertexId(1), VertexId(2)]),
            Err(GraphError::InvalidExpansion { .. })
        ));
    }

    #[test]
    fn lift_cycle_empty_trace_is_identity() {
        let g = triangle();
        let cycle: BTreeSet<EdgeId> = g.edge_ids().collect();
        let trace = ReductionTrace::new();
        assert_eq!(trace.lift_cycle(&g, &cycle).unwrap(), cycle);
    }

    #[test]
    fn lift_cycle_through_suppression_restores_path() {
        let mut g = Multigraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (1, 3)]);
        g.weight_all_one();
        // vertex 0 has degree 2: suppressed into an edge 1-3 of weight 2.
        let (h, trace) = g.suppress_degree_two();
        // the cycle: the digon formed by chord 4 and the new edge
        let new_edge = match trace.records[0] {
            SurgeryRecord::Suppress { new_edge, .. } => new_edge,
            _ => panic!(),
        };
        let cyc = BTreeSet::from([EdgeId(4), new_edge]);
        assert!(h.is_cycle(&cyc));
        let lifted = trace.lift_cycle(&h, &cyc).unwrap();
        assert!(g.is_cycle(&lifted));
        assert_eq!(
            lifted,
            BTreeSet::from([EdgeId(0), EdgeId(3), EdgeId(4)]),
            "suppressed path substituted"
        );
        let lifted_weight: u64 = lifted.iter().map(|&e| g.weight(e)).sum();
        let orig_weight: u64 = cyc.iter().map(|&e| h.weight(e)).sum();
        assert_eq!(lifted_weight, orig_weight);
    }

    #[test]
    fn lift_cycle_through_split_restores_original_edges() {
        let g = Multigraph::from_edges(
            4,
            &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)],
        );
        let (h, trace) = g.split_off(VertexId(1), VertexId(0), VertexId(3)).unwrap();
        let SurgeryRecord::Split { new_edges, .. } = trace.records[0] else {
            panic!()
        };
        // 4-cycle through the split vertex: 1-x-3 plus edges 12, 23.
        let cyc = BTreeSet::from([new_edges[0], new_edges[1], EdgeId(1), EdgeId(2)]);
        assert!(h.is_cycle(&cyc));
        let lifted = trace.lift_cycle(&h, &cyc).unwrap();
        assert!(g.is_cycle(&lifted));
        assert!(lifted.contains(&EdgeId(0)) && lifted.contains(&EdgeId(3)));
    }

    #[test]
    fn lift_cycle_rejects_odd_degree_input() {
        let g = triangle();
        let bad = BTreeSet::from([EdgeId(0)]);
        let trace = ReductionTrace::new();
        assert!(matches!(
            trace.lift_cycle(&g, &bad),
            Err(GraphError::NotACycle(_))
        ));
    }

    #[test]
    fn replay_reproduces_final_graph() {
        let g = Multigraph::from_edges(
            6,
            &[(0, 1), (1, 2), (2, 0), (0, 3), (1, 4), (2, 5), (3, 4), (4, 5), (5, 3)],
        );
        let (h1, t1) = g.split_off(VertexId(1), VertexId(0), VertexId(3)).unwrap();
        let (h2, mut trace) = h1.suppress_degree_two();
        let mut t = t1;
        t.extend(trace.records.drain(..).collect::<Vec<_>>().into());
        assert_eq!(t.replay(&g).unwrap(), h2);
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let mut g = Multigraph::from_edges(3, &[(0, 1), (0, 1), (2, 2)]);
        g.set_weight(EdgeId(2), 7);
        let text = g.to_text();
        let parsed = Multigraph::from_text(&text).unwrap();
        assert_eq!(parsed.to_text(), text);
        assert_eq!(parsed, g);
    }

    #[test]
    fn text_parse_errors_are_reported() {
        assert!(Multigraph::from_text("e 0 0 1\n").is_err());
        assert!(Multigraph::from_text("mg 1 1\nv 0\ne 0 0 0\ne 0 0 0\n").is_err());
        assert!(Multigraph::from_text("mg 2 1\nv 0\nv 1\n").is_err());
    }
}

impl From<Vec<SurgeryRecord>> for ReductionTrace {
    fn from(records: Vec<SurgeryRecord>) -> Self {
        ReductionTrace { records }
    }
}
