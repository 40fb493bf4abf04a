//! Nowhere-zero Z2xZ2 flows and the constrained-flow repair algorithm.
//!
//! A flow assigns each edge one of the three nonzero elements of Z2xZ2 so
//! that the group sum at every vertex is zero (loops cancel themselves).
//! The three values are referred to as colors: 01 red, 10 green, 11 blue.
//!
//! [`repair_flow`] upgrades a flow so that prescribed degree-five and
//! degree-six vertices become "good" (see [`VertexConstraint`]): while a bad
//! vertex exists, a closed red/blue trail through it is built using the
//! per-vertex routing rules, and the two colors are swapped along the trail.
//! Each swap strictly decreases the number of bad vertices and never turns
//! a good constrained vertex bad; both facts are asserted at runtime.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use thiserror::Error;

use crate::multigraph::{EdgeId, Multigraph, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FlowError {
    #[error("graph admits no nowhere-zero Z2xZ2 flow")]
    NoFlow,
    #[error("invalid constraint at {vertex}: {reason}")]
    InvalidConstraint { vertex: VertexId, reason: String },
    #[error("trail routing dead-ended at vertex {0} (routing table transcription error)")]
    RoutingDeadEnd(VertexId),
    #[error("flow invariant violated: {0}")]
    InvariantViolated(String),
}

/// One of the three nonzero elements of Z2xZ2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FlowValue {
    Red = 1,   // 01
    Green = 2, // 10
    Blue = 3,  // 11
}

impl FlowValue {
    pub fn bits(self) -> u8 {
        self as u8
    }

    pub fn from_bits(bits: u8) -> Option<FlowValue> {
        match bits {
            1 => Some(FlowValue::Red),
            2 => Some(FlowValue::Green),
            3 => Some(FlowValue::Blue),
            _ => None,
        }
    }

    pub const ALL: [FlowValue; 3] = [FlowValue::Red, FlowValue::Green, FlowValue::Blue];
}

/// Map from every edge to a nonzero flow value, conserving at each vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowAssignment {
    values: BTreeMap<EdgeId, FlowValue>,
}

impl FlowAssignment {
    pub fn new(values: BTreeMap<EdgeId, FlowValue>) -> Self {
        FlowAssignment { values }
    }

    pub fn value(&self, e: EdgeId) -> FlowValue {
        self.values[&e]
    }

    pub fn get(&self, e: EdgeId) -> Option<FlowValue> {
        self.values.get(&e).copied()
    }

    pub fn set(&mut self, e: EdgeId, v: FlowValue) {
        self.values.insert(e, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, FlowValue)> + '_ {
        self.values.iter().map(|(&e, &v)| (e, v))
    }

    /// Distinct values over an edge multiset (an edge listed twice counts
    /// its value once, like any set image).
    pub fn values_over(&self, edges: &[EdgeId]) -> BTreeSet<FlowValue> {
        edges.iter().map(|&e| self.value(e)).collect()
    }

    /// Z2xZ2 sum at `v`; loops contribute twice and therefore cancel.
    pub fn vertex_sum(&self, g: &Multigraph, v: VertexId) -> u8 {
        let mut acc = 0u8;
        for (e, a, b) in g.edges() {
            let ends = (a == v) as u8 + (b == v) as u8;
            if ends == 1 {
                acc ^= self.value(e).bits();
            }
        }
        acc
    }

    /// Checks nowhere-zero conservation everywhere.
    pub fn check(&self, g: &Multigraph) -> Result<(), FlowError> {
        for e in g.edge_ids() {
            if !self.values.contains_key(&e) {
                return Err(FlowError::InvariantViolated(format!(
                    "edge {e} carries no flow value"
                )));
            }
        }
        for v in g.vertices() {
            if self.vertex_sum(g, v) != 0 {
                return Err(FlowError::InvariantViolated(format!(
                    "conservation fails at vertex {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Deterministic backtracking search for a nowhere-zero Z2xZ2 flow. Exact:
/// returns `NoFlow` exactly when none exists (a bridge always forces this).
/// Loops are unconstrained and receive red.
pub fn find_nowhere_zero_flow(g: &Multigraph) -> Result<FlowAssignment, FlowError> {
    let mut values: BTreeMap<EdgeId, FlowValue> = BTreeMap::new();
    let mut free_edges: Vec<EdgeId> = Vec::new();
    for e in g.edge_ids() {
        if g.is_loop(e) {
            values.insert(e, FlowValue::Red);
        } else {
            free_edges.push(e);
        }
    }
    // Per-vertex running xor and unassigned-incidence counts.
    let mut acc: BTreeMap<VertexId, u8> = g.vertices().map(|v| (v, 0)).collect();
    let mut remaining: BTreeMap<VertexId, usize> = g.vertices().map(|v| (v, 0)).collect();
    for &e in &free_edges {
        let (u, v) = g.endpoints(e).unwrap();
        *remaining.get_mut(&u).unwrap() += 1;
        *remaining.get_mut(&v).unwrap() += 1;
    }
    for (&v, &r) in &remaining {
        if r == 0 && acc[&v] != 0 {
            unreachable!();
        }
        let _ = v;
    }

    fn feasible(acc: u8, remaining: usize) -> bool {
        match remaining {
            0 => acc == 0,
            1 => acc != 0,
            _ => true,
        }
    }

    fn search(
        g: &Multigraph,
        free_edges: &[EdgeId],
        idx: usize,
        values: &mut BTreeMap<EdgeId, FlowValue>,
        acc: &mut BTreeMap<VertexId, u8>,
        remaining: &mut BTreeMap<VertexId, usize>,
    ) -> bool {
        if idx == free_edges.len() {
            return true;
        }
        let e = free_edges[idx];
        let (u, v) = g.endpoints(e).unwrap();
        for val in FlowValue::ALL {
            let bits = val.bits();
            *acc.get_mut(&u).unwrap() ^= bits;
            *acc.get_mut(&v).unwrap() ^= bits;
            *remaining.get_mut(&u).unwrap() -= 1;
            *remaining.get_mut(&v).unwrap() -= 1;
            let ok = feasible(acc[&u], remaining[&u]) && feasible(acc[&v], remaining[&v]);
            if ok {
                values.insert(e, val);
                if search(g, free_edges, idx + 1, values, acc, remaining) {
                    return true;
                }
                values.remove(&e);
            }
            *acc.get_mut(&u).unwrap() ^= bits;
            *acc.get_mut(&v).unwrap() ^= bits;
            *remaining.get_mut(&u).unwrap() += 1;
            *remaining.get_mut(&v).unwrap() += 1;
        }
        false
    }

    if search(g, &free_edges, 0, &mut values, &mut acc, &mut remaining) {
        let flow = FlowAssignment::new(values);
        flow.check(g)?;
        Ok(flow)
    } else {
        Err(FlowError::NoFlow)
    }
}

/// Constraint attached to a vertex of degree five or six. Multisets may list
/// a loop twice (loops occupy two edge-ends).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintKind {
    /// `|flow(a)| >= 2 and |flow(b)| >= 2` is the good state; `a` and `b`
    /// are 3-edge multisets sharing exactly two elements.
    Degree5 { a: Vec<EdgeId>, b: Vec<EdgeId> },
    /// Good state: all three values present at the vertex, or `|flow(a)| =
    /// 1`, or `|flow(b)| = 1`, or `|flow(c)| = 2`; `a`, `b`, `c` partition
    /// the six edge-ends into pairs.
    Degree6 { a: Vec<EdgeId>, b: Vec<EdgeId>, c: Vec<EdgeId> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexConstraint {
    pub vertex: VertexId,
    pub kind: ConstraintKind,
}

fn end_count(g: &Multigraph, e: EdgeId, v: VertexId) -> usize {
    match g.endpoints(e) {
        Ok((a, b)) => (a == v) as usize + (b == v) as usize,
        Err(_) => 0,
    }
}

fn multiset_counts(edges: &[EdgeId]) -> BTreeMap<EdgeId, usize> {
    let mut m = BTreeMap::new();
    for &e in edges {
        *m.entry(e).or_insert(0) += 1;
    }
    m
}

fn multiset_intersection_size(a: &[EdgeId], b: &[EdgeId]) -> usize {
    let ca = multiset_counts(a);
    let cb = multiset_counts(b);
    ca.iter()
        .map(|(e, &n)| n.min(cb.get(e).copied().unwrap_or(0)))
        .sum()
}

pub fn validate_constraint(g: &Multigraph, c: &VertexConstraint) -> Result<(), FlowError> {
    let v = c.vertex;
    let fail = |reason: &str| -> FlowError {
        FlowError::InvalidConstraint { vertex: v, reason: reason.to_string() }
    };
    let check_multiset = |edges: &[EdgeId]| -> Result<(), FlowError> {
        for (e, &n) in &multiset_counts(edges) {
            let ends = end_count(g, *e, v);
            if ends == 0 {
                return Err(fail(&format!("edge {e} is not incident with the vertex")));
            }
            if n > ends {
                return Err(fail(&format!("edge {e} listed more times than its end count")));
            }
        }
        Ok(())
    };
    match &c.kind {
        ConstraintKind::Degree5 { a, b } => {
            if g.degree(v) != 5 {
                return Err(fail("degree-5 constraint on a vertex of other degree"));
            }
            if a.len() != 3 || b.len() != 3 {
                return Err(fail("multisets must have three edges each"));
            }
            check_multiset(a)?;
            check_multiset(b)?;
            if multiset_intersection_size(a, b) != 2 {
                return Err(fail("the two multisets must share exactly two edges"));
            }
        }
        ConstraintKind::Degree6 { a, b, c: cc } => {
            if g.degree(v) != 6 {
                return Err(fail("degree-6 constraint on a vertex of other degree"));
            }
            if a.len() != 2 || b.len() != 2 || cc.len() != 2 {
                return Err(fail("the three parts must have two edge-ends each"));
            }
            let mut union: Vec<EdgeId> = a.iter().chain(b).chain(cc).copied().collect();
            union.sort_unstable();
            let mut star: Vec<EdgeId> = Vec::new();
            for e in g.edges_at(v) {
                for _ in 0..end_count(g, e, v) {
                    star.push(e);
                }
            }
            star.sort_unstable();
            if union != star {
                return Err(fail("parts must partition the incident edge-end multiset"));
            }
        }
    }
    Ok(())
}

/// Whether a constrained vertex is good under `flow` (the repair target
/// state). Degree-five: both multisets see at least two values; degree-six:
/// all three values present at the vertex, or one part monochrome, or the
/// third part two-valued.
pub fn constraint_is_good(g: &Multigraph, flow: &FlowAssignment, c: &VertexConstraint) -> bool {
    is_good(flow, c, g)
}

fn is_good(flow: &FlowAssignment, c: &VertexConstraint, g: &Multigraph) -> bool {
    match &c.kind {
        ConstraintKind::Degree5 { a, b } => {
            flow.values_over(a).len() >= 2 && flow.values_over(b).len() >= 2
        }
        ConstraintKind::Degree6 { a, b, c: cc } => {
            let mut all: Vec<EdgeId> = Vec::new();
            for e in g.edges_at(c.vertex) {
                for _ in 0..end_count(g, e, c.vertex) {
                    all.push(e);
                }
            }
            flow.values_over(&all).len() == 3
                || flow.values_over(a).len() == 1
                || flow.values_over(b).len() == 1
                || flow.values_over(cc).len() == 2
        }
    }
}

// ---------------------------------------------------------------------------
// Routing table for good degree-five vertices.
//
// Roles: f1 = the A-only edge, {f2, f3} = the shared pair (lower id first),
// f4 = the B-only edge, f5 = the remaining edge. At a good degree-five
// vertex carrying three edges of one trail color and one of the other, the
// four trail-colored edges are paired into two transitions; the trail
// enters on one edge of a pair and leaves on its partner. The base rows are
// closed under the constraint structure's symmetries (swapping the shared
// pair, swapping the roles of A and B) and under swapping which trail color
// is the triple.
// ---------------------------------------------------------------------------

type Deg5Config = ([bool; 5], usize); // (triple membership by role, single's role)
type Deg5Table = BTreeMap<Deg5Config, [(usize, usize); 2]>;

fn deg5_table() -> &'static Deg5Table {
    static TABLE: OnceLock<Deg5Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        // (triple roles, single role, transition pairs), 0-based roles.
        let base: [([usize; 3], usize, [(usize, usize); 2]); 6] = [
            ([0, 1, 3], 2, [(0, 3), (1, 2)]),
            ([0, 1, 3], 4, [(0, 1), (3, 4)]),
            ([0, 1, 4], 2, [(0, 4), (1, 2)]),
            ([0, 1, 4], 3, [(0, 1), (3, 4)]),
            ([0, 3, 4], 1, [(0, 1), (3, 4)]),
            ([1, 2, 4], 0, [(0, 1), (2, 4)]),
        ];
        // Automorphisms of the role structure: identity, swap the shared
        // pair, swap A with B (f1<->f4 composed with f2<->f3), and both.
        let perms: [[usize; 5]; 4] = [
            [0, 1, 2, 3, 4],
            [0, 2, 1, 3, 4],
            [3, 2, 1, 0, 4],
            [3, 1, 2, 0, 4],
        ];
        let mut table = Deg5Table::new();
        for perm in perms {
            for (triple, single, pairs) in base {
                let mut mask = [false; 5];
                for r in triple {
                    mask[perm[r]] = true;
                }
                let key = (mask, perm[single]);
                let mapped = [
                    order_pair((perm[pairs[0].0], perm[pairs[0].1])),
                    order_pair((perm[pairs[1].0], perm[pairs[1].1])),
                ];
                table.entry(key).or_insert(mapped);
            }
        }
        assert_eq!(table.len(), 16, "routing table covers all reachable configs");
        table
    })
}

fn order_pair(p: (usize, usize)) -> (usize, usize) {
    if p.0 <= p.1 {
        p
    } else {
        (p.1, p.0)
    }
}

/// Exit role for a trail arriving at a good degree-five vertex on role
/// `arrival`, when roles in `triple` carry one trail color and `single` the
/// other. Returns `None` when the configuration is not in the table (never
/// happens for configurations reachable at a good vertex).
fn deg5_exit(triple: [bool; 5], single: usize, arrival: usize) -> Option<usize> {
    let pairs = deg5_table().get(&(triple, single))?;
    for &(a, b) in pairs {
        if a == arrival {
            return Some(b);
        }
        if b == arrival {
            return Some(a);
        }
    }
    None
}

/// Self-test used by the test-suite: every (color multiset, arrival)
/// combination reachable at a good degree-five vertex has a defined exit,
/// exits pair up as involutions, and swapping the trail colors along any
/// subset of the transition pairs keeps the vertex good.
pub fn deg5_routing_selftest() -> Result<(), String> {
    let table = deg5_table();
    if table.len() != 16 {
        return Err(format!("expected 16 configurations, found {}", table.len()));
    }
    for ((triple, single), pairs) in table.iter() {
        let members: Vec<usize> = (0..5).filter(|&r| triple[r]).collect();
        if members.len() != 3 || triple[*single] {
            return Err(format!("malformed config {triple:?}/{single}"));
        }
        // A = {0,1,2}, B = {1,2,3} in roles; good means both see >= 2 values.
        let colors_of = |swap: [bool; 2]| -> [u8; 5] {
            // 0 = green-ish (never on trail), 1 = triple color, 2 = single.
            let mut c = [0u8; 5];
            for &m in &members {
                c[m] = 1;
            }
            c[*single] = 2;
            for (i, &(a, b)) in pairs.iter().enumerate() {
                if swap[i] {
                    for r in [a, b] {
                        c[r] = if c[r] == 1 { 2 } else { 1 };
                    }
                }
            }
            c
        };
        let good = |c: &[u8; 5]| -> bool {
            let distinct = |roles: [usize; 3]| {
                roles.iter().map(|&r| c[r]).collect::<BTreeSet<u8>>().len()
            };
            distinct([0, 1, 2]) >= 2 && distinct([1, 2, 3]) >= 2
        };
        if !good(&colors_of([false, false])) {
            return Err(format!("config {triple:?}/{single} is not good to begin with"));
        }
        for swap in [[true, false], [false, true], [true, true]] {
            if !good(&colors_of(swap)) {
                return Err(format!(
                    "swap {swap:?} breaks goodness of config {triple:?}/{single}"
                ));
            }
        }
        // Involution and membership: pairs cover exactly triple + single.
        let mut covered: BTreeSet<usize> = BTreeSet::new();
        for &(a, b) in pairs.iter() {
            covered.insert(a);
            covered.insert(b);
        }
        let mut expect: BTreeSet<usize> = members.iter().copied().collect();
        expect.insert(*single);
        if covered != expect {
            return Err(format!(
                "pairs {pairs:?} do not cover the trail-colored roles of {triple:?}/{single}"
            ));
        }
        for arrival in expect {
            if deg5_exit(*triple, *single, arrival).is_none() {
                return Err(format!(
                    "no exit for arrival {arrival} in config {triple:?}/{single}"
                ));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Trail construction and repair.
// ---------------------------------------------------------------------------

struct RepairCtx<'a> {
    g: &'a Multigraph,
    constraints: BTreeMap<VertexId, &'a VertexConstraint>,
}

impl RepairCtx<'_> {
    fn constraint(&self, v: VertexId) -> Option<&VertexConstraint> {
        self.constraints.get(&v).copied()
    }

    /// Trail-colored (pair) unused edges at `w`, ascending.
    fn pair_colored_unused(
        &self,
        flow: &FlowAssignment,
        w: VertexId,
        pair: (FlowValue, FlowValue),
        used: &BTreeSet<EdgeId>,
    ) -> Vec<EdgeId> {
        self.g
            .edges_at(w)
            .into_iter()
            .filter(|&e| !used.contains(&e))
            .filter(|&e| flow.value(e) == pair.0 || flow.value(e) == pair.1)
            .collect()
    }

    /// Candidate exits at `w` for a trail that arrived on `arrived`.
    /// Forced rules yield a single candidate; free rules yield the full
    /// ordered list so the caller can backtrack.
    fn exits(
        &self,
        flow: &FlowAssignment,
        w: VertexId,
        arrived: EdgeId,
        pair: (FlowValue, FlowValue),
        used: &BTreeSet<EdgeId>,
    ) -> Vec<EdgeId> {
        let free = |exclude: &[EdgeId]| -> Vec<EdgeId> {
            self.pair_colored_unused(flow, w, pair, used)
                .into_iter()
                .filter(|e| !exclude.contains(e))
                .collect()
        };
        let Some(con) = self.constraint(w) else {
            return free(&[]);
        };
        if !is_good(flow, con, self.g) {
            return free(&[]);
        }
        match &con.kind {
            ConstraintKind::Degree5 { a, b } => {
                let star = self.g.edges_at(w);
                let on_pair: Vec<EdgeId> = star
                    .iter()
                    .copied()
                    .filter(|&e| flow.value(e) == pair.0 || flow.value(e) == pair.1)
                    .collect();
                match on_pair.len() {
                    2 => {
                        // Single edge of each trail color: leave via the
                        // other one.
                        let other = on_pair.into_iter().find(|&e| e != arrived);
                        other.into_iter().filter(|e| !used.contains(e)).collect()
                    }
                    4 => {
                        // Three of one color, one of the other: table row.
                        let roles = deg5_roles(self.g, w, a, b);
                        let mut counts: BTreeMap<FlowValue, usize> = BTreeMap::new();
                        for &e in &on_pair {
                            *counts.entry(flow.value(e)).or_insert(0) += 1;
                        }
                        let triple_color = counts
                            .iter()
                            .find(|&(_, &n)| n == 3)
                            .map(|(&v, _)| v)
                            .expect("counts are 3 + 1 at a degree-five vertex");
                        let mut triple = [false; 5];
                        let mut single = None;
                        for (role, &e) in roles.iter().enumerate() {
                            let val = flow.value(e);
                            if val == triple_color {
                                triple[role] = true;
                            } else if val == pair.0 || val == pair.1 {
                                single = Some(role);
                            }
                        }
                        let arrival_role =
                            roles.iter().position(|&e| e == arrived).expect("arrival role");
                        let exit = single
                            .and_then(|s| deg5_exit(triple, s, arrival_role))
                            .map(|r| roles[r]);
                        exit.into_iter().filter(|e| !used.contains(e)).collect()
                    }
                    _ => Vec::new(),
                }
            }
            ConstraintKind::Degree6 { a, b, c } => {
                let in_set = |set: &[EdgeId], e: EdgeId| set.contains(&e);
                let other_of = |set: &[EdgeId], e: EdgeId| -> EdgeId {
                    if set[0] == e {
                        set[1]
                    } else {
                        set[0]
                    }
                };
                let is_pair_colored =
                    |e: EdgeId| flow.value(e) == pair.0 || flow.value(e) == pair.1;
                if flow.values_over(a).len() == 1 {
                    if in_set(a, arrived) {
                        let other = other_of(a, arrived);
                        return [other].into_iter().filter(|e| !used.contains(e)).collect();
                    }
                    return free(a);
                }
                if flow.values_over(b).len() == 1 {
                    if in_set(b, arrived) {
                        let other = other_of(b, arrived);
                        return [other].into_iter().filter(|e| !used.contains(e)).collect();
                    }
                    return free(b);
                }
                if flow.values_over(c).len() == 2 {
                    if in_set(c, arrived) {
                        let other = other_of(c, arrived);
                        if is_pair_colored(other) {
                            return [other].into_iter().filter(|e| !used.contains(e)).collect();
                        }
                        return free(&[]);
                    }
                    let outside = free(c);
                    if !outside.is_empty() {
                        return outside;
                    }
                    // Fall back to the pair-colored edge inside c.
                    return c
                        .iter()
                        .copied()
                        .filter(|&e| is_pair_colored(e) && !used.contains(&e))
                        .collect();
                }
                // All three values present with |flow(a)| = |flow(b)| = 2 and
                // |flow(c)| = 1: leave on the opposite trail color.
                let want = if flow.value(arrived) == pair.0 { pair.1 } else { pair.0 };
                self.pair_colored_unused(flow, w, pair, used)
                    .into_iter()
                    .filter(|&e| flow.value(e) == want)
                    .collect()
            }
        }
    }
}

/// Role assignment f1..f5 (0-based) for a degree-five constraint; panics on
/// loops, which the repair entry point removes by subdividing first.
fn deg5_roles(g: &Multigraph, v: VertexId, a: &[EdgeId], b: &[EdgeId]) -> [EdgeId; 5] {
    let ca = multiset_counts(a);
    let cb = multiset_counts(b);
    let shared: Vec<EdgeId> = ca
        .keys()
        .filter(|e| cb.contains_key(*e))
        .copied()
        .collect();
    let a_only: Vec<EdgeId> = ca.keys().filter(|e| !cb.contains_key(*e)).copied().collect();
    let b_only: Vec<EdgeId> = cb.keys().filter(|e| !ca.contains_key(*e)).copied().collect();
    assert_eq!(shared.len(), 2);
    assert_eq!(a_only.len(), 1);
    assert_eq!(b_only.len(), 1);
    let star = g.edges_at(v);
    let rest: Vec<EdgeId> = star
        .into_iter()
        .filter(|e| !ca.contains_key(e) && !cb.contains_key(e))
        .collect();
    assert_eq!(rest.len(), 1);
    [a_only[0], shared[0], shared[1], b_only[0], rest[0]]
}

/// Builds the closed trail for a bad vertex: (edge sequence, colors to
/// swap). Free choices are resolved lowest-id-first with backtracking.
fn build_trail_internal(
    ctx: &RepairCtx<'_>,
    flow: &FlowAssignment,
    v: VertexId,
) -> Result<(Vec<EdgeId>, (FlowValue, FlowValue)), FlowError> {
    let con = ctx
        .constraint(v)
        .ok_or_else(|| FlowError::InvalidConstraint { vertex: v, reason: "not constrained".into() })?;
    if is_good(flow, con, ctx.g) {
        return Err(FlowError::InvalidConstraint { vertex: v, reason: "vertex is not bad".into() });
    }
    let (start, pair) = match &con.kind {
        ConstraintKind::Degree5 { a, b } => {
            let roles = deg5_roles(ctx.g, v, a, b);
            let fifth = roles[4];
            if flow.values_over(a).len() == 1 {
                ((roles[0]), (flow.value(a[0]), flow.value(fifth)))
            } else {
                ((roles[3]), (flow.value(b[0]), flow.value(fifth)))
            }
        }
        ConstraintKind::Degree6 { c, .. } => {
            // The duplicated color sits on c; the missing color is the one
            // not present at the vertex.
            let dup = flow.value(c[0]);
            let present: BTreeSet<FlowValue> =
                ctx.g.edges_at(v).iter().map(|&e| flow.value(e)).collect();
            let missing = FlowValue::ALL
                .into_iter()
                .find(|val| !present.contains(val))
                .ok_or_else(|| {
                    FlowError::InvariantViolated("bad degree-6 vertex with all colors".into())
                })?;
            let start = ctx
                .g
                .edges_at(v)
                .into_iter()
                .find(|&e| flow.value(e) == dup)
                .expect("duplicated color has an edge");
            (start, (dup, missing))
        }
    };

    // Iterative DFS with explicit choice stack: frames of (vertex arrived
    // at, ordered candidates, next candidate index).
    let mut seq: Vec<EdgeId> = vec![start];
    let mut used: BTreeSet<EdgeId> = BTreeSet::from([start]);
    let mut cursor = walk_end(ctx.g, v, start);
    let mut frames: Vec<(VertexId, Vec<EdgeId>, usize)> = Vec::new();
    loop {
        if cursor == v {
            return Ok((seq, pair));
        }
        let arrived = *seq.last().unwrap();
        let cands = ctx.exits(flow, cursor, arrived, pair, &used);
        frames.push((cursor, cands, 0));
        // Advance or backtrack.
        loop {
            let Some((w, cands, next)) = frames.last_mut() else {
                return Err(FlowError::RoutingDeadEnd(v));
            };
            if *next < cands.len() {
                let e = cands[*next];
                *next += 1;
                used.insert(e);
                seq.push(e);
                cursor = walk_end(ctx.g, *w, e);
                break;
            } else {
                frames.pop();
                let Some(e) = seq.pop() else {
                    return Err(FlowError::RoutingDeadEnd(v));
                };
                used.remove(&e);
                if seq.is_empty() {
                    return Err(FlowError::RoutingDeadEnd(v));
                }
            }
        }
    }
}

fn walk_end(g: &Multigraph, from: VertexId, e: EdgeId) -> VertexId {
    g.other_end(e, from).expect("trail edge incident with cursor")
}

/// Public trail construction: the closed red/blue trail whose color swap
/// makes `v` good, expressed in the caller's edge ids.
pub fn build_swap_trail(
    g: &Multigraph,
    flow: &FlowAssignment,
    v: VertexId,
    constraints: &[VertexConstraint],
) -> Result<Vec<EdgeId>, FlowError> {
    let prepared = PreparedRepair::new(g, flow, constraints)?;
    let (trail, _) = build_trail_internal(&prepared.ctx(), &prepared.flow, v)?;
    Ok(prepared.project_trail(&trail))
}

/// Subdivided repair state: every edge of the caller's graph is split into
/// two halves, which removes loops and lets multiset constraints become
/// plain sets of distinct edges.
struct PreparedRepair<'a> {
    sub: crate::multigraph::Subdivision,
    flow: FlowAssignment,
    constraints: Vec<VertexConstraint>,
    original: &'a Multigraph,
}

impl<'a> PreparedRepair<'a> {
    fn new(
        g: &'a Multigraph,
        flow: &FlowAssignment,
        constraints: &[VertexConstraint],
    ) -> Result<Self, FlowError> {
        flow.check(g)?;
        for c in constraints {
            validate_constraint(g, c)?;
        }
        let mut seen = BTreeSet::new();
        for c in constraints {
            if !seen.insert(c.vertex) {
                return Err(FlowError::InvalidConstraint {
                    vertex: c.vertex,
                    reason: "vertex constrained twice".into(),
                });
            }
        }
        let sub = g.subdivide_all();
        let mut values = BTreeMap::new();
        for (e, val) in flow.iter() {
            let (h1, h2) = sub.halves[&e];
            values.insert(h1, val);
            values.insert(h2, val);
        }
        let sub_flow = FlowAssignment::new(values);
        sub_flow.check(&sub.graph)?;
        let mapped: Vec<VertexConstraint> = constraints
            .iter()
            .map(|c| map_constraint(&sub, c))
            .collect();
        for c in &mapped {
            validate_constraint(&sub.graph, c)?;
        }
        Ok(PreparedRepair { sub, flow: sub_flow, constraints: mapped, original: g })
    }

    fn ctx(&self) -> RepairCtx<'_> {
        RepairCtx {
            g: &self.sub.graph,
            constraints: self.constraints.iter().map(|c| (c.vertex, c)).collect(),
        }
    }

    fn project_trail(&self, trail: &[EdgeId]) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = Vec::new();
        for &h in trail {
            let parent = self.sub.parent[&h];
            if out.last() != Some(&parent) {
                out.push(parent);
            }
        }
        if out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        out
    }

    fn project_flow(&self) -> Result<FlowAssignment, FlowError> {
        let mut values = BTreeMap::new();
        for (&e, &(h1, h2)) in &self.sub.halves {
            let v1 = self.flow.value(h1);
            let v2 = self.flow.value(h2);
            if v1 != v2 {
                return Err(FlowError::InvariantViolated(format!(
                    "halves of edge {e} diverged during repair"
                )));
            }
            values.insert(e, v1);
        }
        let flow = FlowAssignment::new(values);
        flow.check(self.original)?;
        Ok(flow)
    }
}

fn map_constraint(
    sub: &crate::multigraph::Subdivision,
    c: &VertexConstraint,
) -> VertexConstraint {
    let v = c.vertex;
    // Occurrence counters decide which half of a loop an entry means. The
    // two degree-five multisets intentionally share edges (their shared
    // pair must map to the same halves), so each multiset counts on its
    // own; the degree-six parts partition the end multiset, so the counter
    // spans all three parts.
    let map_multiset =
        |edges: &[EdgeId], seen: &mut BTreeMap<EdgeId, usize>| -> Vec<EdgeId> {
            edges
                .iter()
                .map(|&e| {
                    let occurrence = seen.entry(e).or_insert(0);
                    let half = sub.half_at(e, v, *occurrence);
                    *occurrence += 1;
                    half
                })
                .collect()
        };
    let kind = match &c.kind {
        ConstraintKind::Degree5 { a, b } => ConstraintKind::Degree5 {
            a: map_multiset(a, &mut BTreeMap::new()),
            b: map_multiset(b, &mut BTreeMap::new()),
        },
        ConstraintKind::Degree6 { a, b, c } => {
            let mut seen = BTreeMap::new();
            ConstraintKind::Degree6 {
                a: map_multiset(a, &mut seen),
                b: map_multiset(b, &mut seen),
                c: map_multiset(c, &mut seen),
            }
        }
    };
    VertexConstraint { vertex: v, kind }
}

/// Statistics of one repair run, used by tests and the acceptance suite.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepairStats {
    pub swaps: usize,
    pub initial_bad: usize,
}

/// Repairs `flow` so every constrained vertex is good. Monotone: each trail
/// swap strictly decreases the bad count and never turns a good constrained
/// vertex bad (asserted; a violation is reported as `InvariantViolated`).
pub fn repair_flow(
    g: &Multigraph,
    flow: &FlowAssignment,
    constraints: &[VertexConstraint],
) -> Result<FlowAssignment, FlowError> {
    repair_flow_stats(g, flow, constraints).map(|(f, _)| f)
}

pub fn repair_flow_stats(
    g: &Multigraph,
    flow: &FlowAssignment,
    constraints: &[VertexConstraint],
) -> Result<(FlowAssignment, RepairStats), FlowError> {
    let mut prepared = PreparedRepair::new(g, flow, constraints)?;
    let bad_set = |flow: &FlowAssignment, prepared: &PreparedRepair<'_>| -> Vec<VertexId> {
        prepared
            .constraints
            .iter()
            .filter(|c| !is_good(flow, c, &prepared.sub.graph))
            .map(|c| c.vertex)
            .collect()
    };
    let initial_bad = bad_set(&prepared.flow, &prepared).len();
    let mut stats = RepairStats { swaps: 0, initial_bad };
    loop {
        let bad = bad_set(&prepared.flow, &prepared);
        if bad.is_empty() {
            let out = prepared.project_flow()?;
            return Ok((out, stats));
        }
        if stats.swaps > initial_bad {
            return Err(FlowError::InvariantViolated(
                "swap count exceeded the initial bad-vertex count".into(),
            ));
        }
        let v = bad[0];
        let good_before: BTreeSet<VertexId> = prepared
            .constraints
            .iter()
            .filter(|c| is_good(&prepared.flow, c, &prepared.sub.graph))
            .map(|c| c.vertex)
            .collect();
        let (trail, pair) = build_trail_internal(&prepared.ctx(), &prepared.flow, v)?;
        for &e in &trail {
            let val = prepared.flow.value(e);
            let new = if val == pair.0 {
                pair.1
            } else if val == pair.1 {
                pair.0
            } else {
                return Err(FlowError::InvariantViolated(
                    "trail contains an edge outside the swap colors".into(),
                ));
            };
            prepared.flow.set(e, new);
        }
        stats.swaps += 1;
        prepared.flow.check(&prepared.sub.graph)?;
        let bad_after = bad_set(&prepared.flow, &prepared);
        if bad_after.len() >= bad.len() {
            return Err(FlowError::InvariantViolated(format!(
                "swap at {v} did not decrease the bad count ({} -> {})",
                bad.len(),
                bad_after.len()
            )));
        }
        for w in &good_before {
            if bad_after.contains(w) {
                return Err(FlowError::InvariantViolated(format!(
                    "good vertex {w} became bad during the swap at {v}"
                )));
            }
        }
    }
}
