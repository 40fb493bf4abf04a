//! Rainbow 2-factors: 2-factors of cubic bridgeless graphs whose contraction
//! is 5-odd-connected, the red/green/blue coloring of the complementary
//! matching obtained from a nowhere-zero Z2xZ2 flow, and the two
//! strengthened variants with pattern guarantees on short circuits.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cuts::{find_bridges, is_k_odd_connected, CutError};
use crate::flows::{
    find_nowhere_zero_flow, repair_flow, ConstraintKind, FlowAssignment, FlowError, FlowValue,
    VertexConstraint,
};
use crate::multigraph::{EdgeId, GraphError, Multigraph, SurgeryRecord, VertexId};
use crate::splitting::{split_degree4, split_degree6, SplitError};

#[derive(Debug, Error)]
pub enum RainbowError {
    #[error("graph is not cubic")]
    NotCubic,
    #[error("graph has a bridge")]
    NotBridgeless,
    #[error("graph is not connected")]
    NotConnected,
    #[error("no 2-factor with 5-odd-connected contraction exists")]
    Infeasible,
    #[error("circuit vertex {0} has {1} colored edge-ends, expected one")]
    AmbiguousPattern(VertexId, usize),
    #[error("pattern lengths differ: {0} vs {1}")]
    InvalidComparison(usize, usize),
    #[error("zero-weight edges must form a matching; {0} and {1} share a vertex")]
    ZeroEdgesNotMatching(EdgeId, EdgeId),
    #[error("rainbow invariant violated: {0}")]
    InvariantViolated(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One circuit of a 2-factor in traversal order: `edges[i]` joins
/// `vertices[i]` and `vertices[(i + 1) % k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl Circuit {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn weight(&self, g: &Multigraph) -> u64 {
        self.edges.iter().map(|&e| g.weight(e)).sum()
    }
}

/// Spanning subgraph with all degrees two, as an edge set plus its circuit
/// decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoFactor {
    pub edge_ids: BTreeSet<EdgeId>,
    pub circuits: Vec<Circuit>,
}

impl TwoFactor {
    /// Decomposes an all-degrees-two spanning edge set into circuits.
    /// Traversal starts at the lowest vertex id and proceeds toward the
    /// lower-id edge.
    pub fn from_edges(g: &Multigraph, edge_ids: BTreeSet<EdgeId>) -> Result<TwoFactor, RainbowError> {
        for v in g.vertices() {
            let d = g.degree_in(v, &edge_ids);
            if d != 2 {
                return Err(RainbowError::InvariantViolated(format!(
                    "vertex {v} has degree {d} in the candidate 2-factor"
                )));
            }
        }
        let mut remaining = edge_ids.clone();
        let mut circuits = Vec::new();
        let mut covered: BTreeSet<VertexId> = BTreeSet::new();
        for start in g.vertices() {
            if covered.contains(&start) {
                continue;
            }
            let mut vertices = vec![start];
            let mut edges = Vec::new();
            let mut cur = start;
            loop {
                let next_edge = g
                    .edges_at(cur)
                    .into_iter()
                    .find(|e| remaining.contains(e))
                    .ok_or_else(|| {
                        RainbowError::InvariantViolated("circuit traversal ran out of edges".into())
                    })?;
                remaining.remove(&next_edge);
                edges.push(next_edge);
                let nxt = g.other_end(next_edge, cur)?;
                if nxt == start {
                    break;
                }
                vertices.push(nxt);
                cur = nxt;
            }
            covered.extend(vertices.iter().copied());
            circuits.push(Circuit { vertices, edges });
        }
        Ok(TwoFactor { edge_ids, circuits })
    }

    pub fn weight(&self, g: &Multigraph) -> u64 {
        self.edge_ids.iter().map(|&e| g.weight(e)).sum()
    }
}

/// A rainbow coloring: the 2-factor together with a red/green/blue
/// assignment on the non-factor edges.
#[derive(Debug, Clone)]
pub struct RainbowColoring {
    pub factor: TwoFactor,
    pub color: BTreeMap<EdgeId, FlowValue>,
}

impl RainbowColoring {
    pub fn color_of(&self, e: EdgeId) -> Option<FlowValue> {
        self.color.get(&e).copied()
    }

    /// Rainbow parity: every even circuit touches each color at an even
    /// number of its vertices, every odd circuit at an odd number (a vertex
    /// counts once per color regardless of how many ends it carries of it).
    pub fn check_parity(&self, g: &Multigraph) -> Result<(), RainbowError> {
        for circuit in &self.factor.circuits {
            for color in FlowValue::ALL {
                let count = circuit
                    .vertices
                    .iter()
                    .filter(|&&v| {
                        g.edges_at(v)
                            .into_iter()
                            .any(|e| self.color_of(e) == Some(color))
                    })
                    .count();
                if count % 2 != circuit.len() % 2 {
                    return Err(RainbowError::InvariantViolated(format!(
                        "circuit through {} touches color {color:?} at {count} vertices",
                        circuit.vertices[0]
                    )));
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Patterns
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Letter {
    R,
    G,
    B,
    X,
}

impl Letter {
    fn from_value(v: FlowValue) -> Letter {
        match v {
            FlowValue::Red => Letter::R,
            FlowValue::Green => Letter::G,
            FlowValue::Blue => Letter::B,
        }
    }
}

/// A circuit's color word: concrete (R/G/B) or a template with x wildcards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern(pub Vec<Letter>);

impl Pattern {
    pub fn parse(s: &str) -> Pattern {
        Pattern(
            s.chars()
                .map(|c| match c {
                    'R' => Letter::R,
                    'G' => Letter::G,
                    'B' => Letter::B,
                    'x' | 'X' => Letter::X,
                    other => panic!("bad pattern letter {other:?}"),
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_concrete(&self) -> bool {
        self.0.iter().all(|&l| l != Letter::X)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            let c = match l {
                Letter::R => 'R',
                Letter::G => 'G',
                Letter::B => 'B',
                Letter::X => 'x',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// The pattern of a circuit: at each vertex, the color of its single
/// non-factor edge-end, in traversal order.
pub fn pattern_of(
    g: &Multigraph,
    circuit: &Circuit,
    coloring: &RainbowColoring,
) -> Result<Pattern, RainbowError> {
    let mut letters = Vec::with_capacity(circuit.vertices.len());
    for &v in &circuit.vertices {
        let mut colored_ends: Vec<FlowValue> = Vec::new();
        for e in g.edges_at(v) {
            if let Some(c) = coloring.color_of(e) {
                let (a, b) = g.endpoints(e)?;
                let ends = (a == v) as usize + (b == v) as usize;
                for _ in 0..ends {
                    colored_ends.push(c);
                }
            }
        }
        if colored_ends.len() != 1 {
            return Err(RainbowError::AmbiguousPattern(v, colored_ends.len()));
        }
        letters.push(Letter::from_value(colored_ends[0]));
    }
    Ok(Pattern(letters))
}

const COLOR_PERMS: [[Letter; 3]; 6] = [
    [Letter::R, Letter::G, Letter::B],
    [Letter::R, Letter::B, Letter::G],
    [Letter::G, Letter::R, Letter::B],
    [Letter::G, Letter::B, Letter::R],
    [Letter::B, Letter::R, Letter::G],
    [Letter::B, Letter::G, Letter::R],
];

fn apply_perm(p: &Pattern, perm: &[Letter; 3]) -> Pattern {
    Pattern(
        p.0.iter()
            .map(|&l| match l {
                Letter::R => perm[0],
                Letter::G => perm[1],
                Letter::B => perm[2],
                Letter::X => Letter::X,
            })
            .collect(),
    )
}

/// True iff `q` lies in the orbit of `p` under rotations, reflections and
/// permutations of the three colors.
pub fn patterns_symmetric(p: &Pattern, q: &Pattern) -> Result<bool, RainbowError> {
    if p.len() != q.len() {
        return Err(RainbowError::InvalidComparison(p.len(), q.len()));
    }
    let k = p.len();
    for perm in &COLOR_PERMS {
        let base = apply_perm(p, perm);
        for rot in 0..k.max(1) {
            let rotated: Vec<Letter> = (0..k).map(|i| base.0[(i + rot) % k]).collect();
            if rotated == q.0 {
                return Ok(true);
            }
            let reflected: Vec<Letter> = (0..k).map(|i| base.0[(k + rot - i) % k]).collect();
            if reflected == q.0 {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn pattern_compatible_literal(p: &Pattern, template: &Pattern) -> Result<bool, RainbowError> {
    if p.len() != template.len() {
        return Err(RainbowError::InvalidComparison(p.len(), template.len()));
    }
    if !p.is_concrete() {
        return Err(RainbowError::InvalidComparison(p.len(), template.len()));
    }
    Ok(p.0
        .iter()
        .zip(&template.0)
        .all(|(&a, &t)| t == Letter::X || a == t))
}

/// Position-wise match of a concrete pattern against a template with x
/// wildcards, up to a permutation of the three colors. No rotation or
/// reflection is permitted: the template pins positions, while its letters
/// name color classes rather than literal colors (RGRGBBGG is compatible
/// with RBRxxxBx via the swap of green and blue).
pub fn pattern_compatible(p: &Pattern, template: &Pattern) -> Result<bool, RainbowError> {
    for perm in &COLOR_PERMS {
        if pattern_compatible_literal(p, &apply_perm(template, perm))? {
            return Ok(true);
        }
    }
    Ok(false)
}

// ---------------------------------------------------------------------------
// 2-factor search
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Minimize,
    Maximize,
}

/// Contraction of the factor, with the map from factor circuits to the
/// contracted vertices that represent them.
pub struct ContractedFactor {
    pub graph: Multigraph,
    pub circuit_vertex: Vec<VertexId>,
}

pub fn contract_factor(g: &Multigraph, f: &TwoFactor) -> Result<ContractedFactor, RainbowError> {
    let (h, trace) = g.contract_edges(&f.edge_ids)?;
    let circuit_vertex = f
        .circuits
        .iter()
        .map(|c| trace.resolve_vertex(c.vertices[0]))
        .collect();
    Ok(ContractedFactor { graph: h, circuit_vertex })
}

/// Finds a 2-factor `F` of a cubic bridgeless connected graph with `g/F`
/// 5-odd-connected, optimizing total factor weight. Perfect matchings are
/// enumerated exhaustively and filtered by the odd-connectivity test; the
/// weighted 2-factor lemma guarantees the filtered set is nonempty and that
/// the optimum meets the exact bound 3*w(F) <= 2*w0 (minimize) resp.
/// 3*w(F) >= 2*w0 (maximize), which is asserted.
pub fn find_2factor_5oc(g: &Multigraph, objective: Objective) -> Result<TwoFactor, RainbowError> {
    if !g.is_cubic() {
        return Err(RainbowError::NotCubic);
    }
    if !g.is_connected() {
        return Err(RainbowError::NotConnected);
    }
    if !find_bridges(g).is_empty() {
        return Err(RainbowError::NotBridgeless);
    }
    let mut best: Option<(u64, Vec<EdgeId>)> = None;
    let mut found_any = false;
    for matching in enumerate_perfect_matchings(g) {
        let factor: BTreeSet<EdgeId> = g.edge_ids().filter(|e| !matching.contains(e)).collect();
        let (h, _) = g.contract_edges(&factor)?;
        if !is_k_odd_connected(&h, 5)? {
            continue;
        }
        found_any = true;
        let w: u64 = factor.iter().map(|&e| g.weight(e)).sum();
        let key = match objective {
            Objective::Minimize => w,
            Objective::Maximize => u64::MAX - w,
        };
        let enc: Vec<EdgeId> = factor.iter().copied().collect();
        if best
            .as_ref()
            .map_or(true, |(bk, benc)| (key, &enc) < (*bk, benc))
        {
            best = Some((key, enc));
        }
    }
    if !found_any {
        return Err(RainbowError::Infeasible);
    }
    let (_, enc) = best.unwrap();
    let factor_edges: BTreeSet<EdgeId> = enc.into_iter().collect();
    let f = TwoFactor::from_edges(g, factor_edges)?;
    let w0 = g.total_weight();
    let wf = f.weight(g);
    match objective {
        Objective::Minimize => {
            if 3 * wf > 2 * w0 {
                return Err(RainbowError::InvariantViolated(format!(
                    "minimum factor weight {wf} violates 3w <= 2*{w0}"
                )));
            }
        }
        Objective::Maximize => {
            if 3 * wf < 2 * w0 {
                return Err(RainbowError::InvariantViolated(format!(
                    "maximum factor weight {wf} violates 3w >= 2*{w0}"
                )));
            }
        }
    }
    Ok(f)
}

/// All perfect matchings, as edge sets, in deterministic order.
pub fn enumerate_perfect_matchings(g: &Multigraph) -> Vec<BTreeSet<EdgeId>> {
    let mut out = Vec::new();
    let mut covered: BTreeSet<VertexId> = BTreeSet::new();
    let mut current: Vec<EdgeId> = Vec::new();
    fn go(
        g: &Multigraph,
        covered: &mut BTreeSet<VertexId>,
        current: &mut Vec<EdgeId>,
        out: &mut Vec<BTreeSet<EdgeId>>,
    ) {
        let Some(v) = g.vertices().find(|v| !covered.contains(v)) else {
            out.push(current.iter().copied().collect());
            return;
        };
        for e in g.edges_at(v) {
            let Ok(u) = g.other_end(e, v) else { continue };
            if u == v || covered.contains(&u) {
                continue;
            }
            covered.insert(v);
            covered.insert(u);
            current.push(e);
            go(g, covered, current, out);
            current.pop();
            covered.remove(&v);
            covered.remove(&u);
        }
    }
    go(g, &mut covered, &mut current, &mut out);
    out
}

/// Colors the non-factor edges of a cubic graph by a nowhere-zero flow on
/// the contraction; the rainbow parity invariant is asserted.
pub fn rainbow_color(g: &Multigraph, f: &TwoFactor) -> Result<RainbowColoring, RainbowError> {
    let contracted = contract_factor(g, f)?;
    let flow = find_nowhere_zero_flow(&contracted.graph)?;
    let color: BTreeMap<EdgeId, FlowValue> = contracted
        .graph
        .edge_ids()
        .map(|e| (e, flow.value(e)))
        .collect();
    let coloring = RainbowColoring { factor: f.clone(), color };
    coloring.check_parity(g)?;
    Ok(coloring)
}

// ---------------------------------------------------------------------------
// Chord-end bookkeeping shared by the two strengthened pipelines.
// ---------------------------------------------------------------------------

struct ChordEnds {
    /// The subdivided contraction.
    sub: crate::multigraph::Subdivision,
    /// For each circuit, the contracted vertex.
    reps: Vec<VertexId>,
    /// For each circuit, the subdivided chord-half at each traversal
    /// position.
    position_halves: Vec<Vec<EdgeId>>,
    /// For each circuit, the chord (an edge of g and of g/F) at each
    /// position.
    position_chords: Vec<Vec<EdgeId>>,
}

fn chord_ends(g: &Multigraph, f: &TwoFactor) -> Result<ChordEnds, RainbowError> {
    let contracted = contract_factor(g, f)?;
    let sub = contracted.graph.subdivide_all();
    let mut position_halves = Vec::new();
    let mut position_chords = Vec::new();
    for circuit in &f.circuits {
        let mut occurrences: BTreeMap<EdgeId, usize> = BTreeMap::new();
        let mut halves = Vec::new();
        let mut chords = Vec::new();
        let rep = contracted.circuit_vertex[position_halves.len()];
        for &v in &circuit.vertices {
            let chord = g
                .edges_at(v)
                .into_iter()
                .filter(|e| !f.edge_ids.contains(e))
                .collect::<Vec<_>>();
            if chord.len() != 1 {
                return Err(RainbowError::AmbiguousPattern(v, chord.len()));
            }
            let chord = chord[0];
            let occ = occurrences.entry(chord).or_insert(0);
            let half = sub.half_at(chord, rep, *occ);
            *occ += 1;
            halves.push(half);
            chords.push(chord);
        }
        position_halves.push(halves);
        position_chords.push(chords);
    }
    Ok(ChordEnds {
        sub,
        reps: contracted.circuit_vertex,
        position_halves,
        position_chords,
    })
}

/// Pulls a flow on the final split graph back through the split records to
/// the subdivided contraction, then projects half values onto the chords.
fn pull_back_flow(
    records: &[SurgeryRecord],
    final_flow: &FlowAssignment,
    sub: &crate::multigraph::Subdivision,
) -> Result<BTreeMap<EdgeId, FlowValue>, RainbowError> {
    let mut values: BTreeMap<EdgeId, FlowValue> = final_flow.iter().collect();
    for rec in records.iter().rev() {
        let SurgeryRecord::Split { removed, new_edges, .. } = rec else {
            return Err(RainbowError::InvariantViolated(
                "unexpected record kind in split pull-back".into(),
            ));
        };
        let v1 = values.remove(&new_edges[0]).ok_or_else(|| {
            RainbowError::InvariantViolated("missing flow value on split edge".into())
        })?;
        let v2 = values.remove(&new_edges[1]).ok_or_else(|| {
            RainbowError::InvariantViolated("missing flow value on split edge".into())
        })?;
        if v1 != v2 {
            return Err(RainbowError::InvariantViolated(
                "split pair carries unequal flow values".into(),
            ));
        }
        values.insert(removed[0], v1);
        values.insert(removed[1], v1);
    }
    // Project halves to chords.
    let mut out = BTreeMap::new();
    for (&chord, &(h1, h2)) in &sub.halves {
        let a = values.get(&h1).copied().ok_or_else(|| {
            RainbowError::InvariantViolated("missing flow value on half edge".into())
        })?;
        let b = values.get(&h2).copied().ok_or_else(|| {
            RainbowError::InvariantViolated("missing flow value on half edge".into())
        })?;
        if a != b {
            return Err(RainbowError::InvariantViolated(
                "chord halves carry unequal flow values".into(),
            ));
        }
        out.insert(chord, a);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Rainbow lemma, cubic variant.
// ---------------------------------------------------------------------------

/// The sixteen admissible length-eight patterns (up to symmetry).
pub const EIGHT_CIRCUIT_PATTERNS: [&str; 16] = [
    "RRRRRRRR", "RRRRRRGG", "RRRRGGGG", "RRRRGGBB",
    "RRGGRRGG", "RRGGRRBB", "RRRRGRRG", "RRRRGBBG",
    "RRGGRGGR", "RRGGRBBR", "RRGGBRRB", "RRRRGRGR",
    "RRRGBGBR", "RRGRGRGG", "RRGRBRBG", "RRGGBGBG",
];

/// Rainbow 2-factor of a cubic bridgeless graph with no 3-circuits, every
/// 4-circuit's pattern symmetric to RRRR or RRGG, and every 8-circuit's
/// pattern symmetric to one of the sixteen admissible patterns.
///
/// Pipeline: find a 2-factor with 5-odd-connected contraction, subdivide
/// the contraction, resolve every degree-four vertex by one split and every
/// degree-eight vertex by the split chain, take a nowhere-zero flow of the
/// result and pull it back onto the chords.
pub fn rainbow_cubic(g: &Multigraph) -> Result<RainbowColoring, RainbowError> {
    let f = find_2factor_5oc(g, Objective::Minimize)?;
    if f.circuits.iter().any(|c| c.len() == 3) {
        return Err(RainbowError::InvariantViolated(
            "2-factor with 5-odd-connected contraction contains a 3-circuit".into(),
        ));
    }
    let ends = chord_ends(g, &f)?;
    let mut h = ends.sub.graph.clone();
    let mut records: Vec<SurgeryRecord> = Vec::new();
    for (ci, circuit) in f.circuits.iter().enumerate() {
        let w = ends.reps[ci];
        let order = &ends.position_halves[ci];
        match circuit.len() {
            4 => {
                let order: [EdgeId; 4] = order.clone().try_into().unwrap();
                let (h2, trace, _) = split_degree4(&h, w, &order)?;
                h = h2;
                records.extend(trace.records);
            }
            8 => {
                let order: [EdgeId; 8] = order.clone().try_into().unwrap();
                let (h2, trace, outcome) = crate::splitting::split_degree8_chain(&h, w, &order)?;
                h = h2;
                records.extend(trace.records);
                let _ = outcome;
            }
            _ => {}
        }
    }
    for v in h.vertices() {
        let d = h.degree(v);
        if d == 4 || d == 8 {
            return Err(RainbowError::InvariantViolated(format!(
                "residual degree-{d} vertex {v} after the split phase"
            )));
        }
    }
    let flow = find_nowhere_zero_flow(&h)?;
    let color = pull_back_flow(&records, &flow, &ends.sub)?;
    let coloring = RainbowColoring { factor: f, color };
    coloring.check_parity(g)?;
    check_cubic_patterns(g, &coloring)?;
    Ok(coloring)
}

/// Asserts the cubic variant's pattern postconditions.
pub fn check_cubic_patterns(g: &Multigraph, coloring: &RainbowColoring) -> Result<(), RainbowError> {
    let rrrr = Pattern::parse("RRRR");
    let rrgg = Pattern::parse("RRGG");
    for circuit in &coloring.factor.circuits {
        match circuit.len() {
            3 => {
                return Err(RainbowError::InvariantViolated(
                    "3-circuit present in rainbow 2-factor".into(),
                ))
            }
            4 => {
                let p = pattern_of(g, circuit, coloring)?;
                if !(patterns_symmetric(&p, &rrrr)? || patterns_symmetric(&p, &rrgg)?) {
                    return Err(RainbowError::InvariantViolated(format!(
                        "4-circuit pattern {p} not symmetric to RRRR or RRGG"
                    )));
                }
            }
            8 => {
                let p = pattern_of(g, circuit, coloring)?;
                let mut ok = false;
                for s in EIGHT_CIRCUIT_PATTERNS {
                    if patterns_symmetric(&p, &Pattern::parse(s))? {
                        ok = true;
                        break;
                    }
                }
                if !ok {
                    return Err(RainbowError::InvariantViolated(format!(
                        "8-circuit pattern {p} not among the sixteen admissible patterns"
                    )));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Rainbow lemma, minimum-degree variant.
// ---------------------------------------------------------------------------

/// Positional case of a weight-four circuit, recorded in its canonical
/// labeling (zero-weight edges at the case's fixed positions).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZeroCase {
    K4,
    K5,
    K6Adjacent,
    K6Opposite,
    K7,
    K8,
}

#[derive(Debug, Clone)]
pub struct Weight4Circuit {
    pub circuit_index: usize,
    pub case: ZeroCase,
    /// Canonical traversal: vertices relabeled so zero-weight edges sit at
    /// the case's positions.
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    /// Chords in canonical position order.
    pub chords: Vec<EdgeId>,
}

/// Zero-edge positions (0-based edge indices) per case; edge `i` joins
/// canonical vertices `i` and `i+1 mod k`.
fn zero_positions(case: &ZeroCase) -> &'static [usize] {
    match case {
        ZeroCase::K4 => &[],
        ZeroCase::K5 => &[3],
        ZeroCase::K6Adjacent => &[2, 4],
        ZeroCase::K6Opposite => &[1, 4],
        ZeroCase::K7 => &[1, 3, 5],
        ZeroCase::K8 => &[0, 2, 4, 6],
    }
}

fn cases_for_length(k: usize) -> Vec<ZeroCase> {
    match k {
        4 => vec![ZeroCase::K4],
        5 => vec![ZeroCase::K5],
        6 => vec![ZeroCase::K6Adjacent, ZeroCase::K6Opposite],
        7 => vec![ZeroCase::K7],
        8 => vec![ZeroCase::K8],
        _ => vec![],
    }
}

/// Rotates/reflects a circuit so its zero-weight edges land on a case's
/// canonical positions; the lowest qualifying rotation wins, trying the
/// forward orientation before the reversed one.
fn canonicalize_weight4(
    g: &Multigraph,
    circuit: &Circuit,
    index: usize,
) -> Option<Weight4Circuit> {
    let k = circuit.len();
    if !(4..=8).contains(&k) {
        return None;
    }
    let weights: Vec<u64> = circuit.edges.iter().map(|&e| g.weight(e)).collect();
    if weights.iter().any(|&w| w > 1) {
        return None;
    }
    if weights.iter().filter(|&&w| w == 1).count() != 4 {
        return None;
    }
    for case in cases_for_length(k) {
        let targets = zero_positions(&case);
        for dir in [1isize, -1isize] {
            for start in 0..k {
                let edge_at = |i: usize| -> usize {
                    if dir == 1 {
                        (start + i) % k
                    } else {
                        (start + k - 1 - (i % k)) % k
                    }
                };
                let ok = (0..k).all(|i| {
                    let z = weights[edge_at(i)] == 0;
                    z == targets.contains(&i)
                });
                if !ok {
                    continue;
                }
                let vertex_at = |i: usize| -> VertexId {
                    if dir == 1 {
                        circuit.vertices[(start + i) % k]
                    } else {
                        circuit.vertices[(start + k - (i % k)) % k]
                    }
                };
                let vertices: Vec<VertexId> = (0..k).map(vertex_at).collect();
                let edges: Vec<EdgeId> = (0..k).map(|i| circuit.edges[edge_at(i)]).collect();
                return Some(Weight4Circuit {
                    circuit_index: index,
                    case,
                    vertices,
                    edges,
                    chords: Vec::new(),
                });
            }
        }
    }
    None
}

/// Result of the minimum-degree rainbow pipeline: the coloring plus the
/// canonical labeling of every weight-four circuit, for clause checking.
#[derive(Debug, Clone)]
pub struct MindegreeRainbow {
    pub coloring: RainbowColoring,
    pub weight4: Vec<Weight4Circuit>,
}

/// Rainbow 2-factor of a weighted cubic bridgeless graph whose zero-weight
/// edges form a matching: factor weight at most two thirds of the total,
/// and every circuit with exactly four weight-one edges satisfies its
/// positional pattern clause. Splits and vertex constraints follow the
/// per-case prescriptions; the flow is repaired against the constraints
/// before colors are read back.
pub fn rainbow_mindegree(g: &Multigraph) -> Result<MindegreeRainbow, RainbowError> {
    // Disconnected hosts are handled per component and merged; every piece
    // of a cubic graph is itself cubic.
    if !g.is_connected() {
        let mut color = BTreeMap::new();
        let mut edge_ids = BTreeSet::new();
        let mut circuits = Vec::new();
        let mut weight4 = Vec::new();
        for comp in g.components() {
            let sub = g.induced(&comp);
            if sub.edge_count() == 0 {
                continue;
            }
            let part = rainbow_mindegree(&sub)?;
            color.extend(part.coloring.color);
            edge_ids.extend(part.coloring.factor.edge_ids.iter().copied());
            let base = circuits.len();
            for mut w4 in part.weight4 {
                w4.circuit_index += base;
                weight4.push(w4);
            }
            circuits.extend(part.coloring.factor.circuits);
        }
        let factor = TwoFactor { edge_ids, circuits };
        return Ok(MindegreeRainbow {
            coloring: RainbowColoring { factor, color },
            weight4,
        });
    }
    // Zero-weight edges must be pairwise non-adjacent.
    let zero_edges: Vec<EdgeId> = g.edge_ids().filter(|&e| g.weight(e) == 0).collect();
    for (i, &e1) in zero_edges.iter().enumerate() {
        for &e2 in &zero_edges[i + 1..] {
            let (a1, b1) = g.endpoints(e1)?;
            let (a2, b2) = g.endpoints(e2)?;
            if a1 == a2 || a1 == b2 || b1 == a2 || b1 == b2 {
                return Err(RainbowError::ZeroEdgesNotMatching(e1, e2));
            }
        }
    }
    let f = find_2factor_5oc(g, Objective::Minimize)?;
    let ends = chord_ends(g, &f)?;
    let mut weight4: Vec<Weight4Circuit> = Vec::new();
    let mut h = ends.sub.graph.clone();
    let mut records: Vec<SurgeryRecord> = Vec::new();
    let mut constraints: Vec<VertexConstraint> = Vec::new();

    for (ci, circuit) in f.circuits.iter().enumerate() {
        let Some(mut w4) = canonicalize_weight4(g, circuit, ci) else {
            continue;
        };
        let rep = ends.reps[ci];
        // Chord halves in canonical position order: recompute occurrences
        // against the canonical traversal.
        let mut occurrences: BTreeMap<EdgeId, usize> = BTreeMap::new();
        let mut halves: Vec<EdgeId> = Vec::new();
        let mut chords: Vec<EdgeId> = Vec::new();
        for &v in &w4.vertices {
            let pos = circuit.vertices.iter().position(|&u| u == v).unwrap();
            let chord = ends.position_chords[ci][pos];
            let occ = occurrences.entry(chord).or_insert(0);
            let half = ends.sub.half_at(chord, rep, *occ);
            *occ += 1;
            halves.push(half);
            chords.push(chord);
        }
        w4.chords = chords;
        let e = |i: usize| halves[i];
        match w4.case {
            ZeroCase::K4 => {
                let order = [e(0), e(1), e(2), e(3)];
                let (h2, trace, _) = split_degree4(&h, rep, &order)?;
                h = h2;
                records.extend(trace.records);
            }
            ZeroCase::K5 => {
                constraints.push(VertexConstraint {
                    vertex: rep,
                    kind: ConstraintKind::Degree5 {
                        a: vec![e(0), e(2), e(4)],
                        b: vec![e(0), e(2), e(3)],
                    },
                });
            }
            ZeroCase::K6Adjacent => {
                let order = [e(2), e(3), e(4), e(5), e(0), e(1)];
                let (h2, trace, plan) = split_degree6(&h, rep, &order)?;
                h = h2;
                records.extend(trace.records);
                if plan.chosen == 1 {
                    // The middle pair (e3, e4) was split: split further
                    // (e1, e5) or (e5, e2).
                    let order4 = [e(1), e(5), e(2), e(0)];
                    let (h3, trace3, _) = split_degree4(&h, rep, &order4)?;
                    h = h3;
                    records.extend(trace3.records);
                }
            }
            ZeroCase::K6Opposite => {
                constraints.push(VertexConstraint {
                    vertex: rep,
                    kind: ConstraintKind::Degree6 {
                        a: vec![e(1), e(2)],
                        b: vec![e(4), e(5)],
                        c: vec![e(0), e(3)],
                    },
                });
            }
            ZeroCase::K7 => {
                let candidates: Vec<(EdgeId, EdgeId)> =
                    (1..=5).map(|i| (e(i), e(i + 1))).collect();
                let (h2, trace, chosen) = try_split_candidates(&h, rep, candidates)?;
                h = h2;
                records.extend(trace);
                match chosen {
                    1 => constraints.push(VertexConstraint {
                        vertex: rep,
                        kind: ConstraintKind::Degree5 {
                            a: vec![e(0), e(1), e(5)],
                            b: vec![e(0), e(1), e(6)],
                        },
                    }),
                    3 => constraints.push(VertexConstraint {
                        vertex: rep,
                        kind: ConstraintKind::Degree5 {
                            a: vec![e(0), e(1), e(6)],
                            b: vec![e(0), e(2), e(6)],
                        },
                    }),
                    _ => {}
                }
            }
            ZeroCase::K8 => {
                let candidates: Vec<(EdgeId, EdgeId)> =
                    (0..8).map(|i| (e(i), e((i + 1) % 8))).collect();
                let (h2, trace, i0) = try_split_candidates(&h, rep, candidates)?;
                h = h2;
                records.extend(trace);
                if i0 % 2 == 1 {
                    // 1-based even position: resolve the opposite arc.
                    let idx = |d: usize| (i0 + d) % 8;
                    let order6 = [
                        e(idx(3)),
                        e(idx(4)),
                        e(idx(5)),
                        e(idx(6)),
                        e(idx(7)),
                        e(idx(2)),
                    ];
                    let (h3, trace3, plan) = split_degree6(&h, rep, &order6)?;
                    h = h3;
                    records.extend(trace3.records);
                    if plan.chosen == 1 {
                        let order4 = [e(idx(2)), e(idx(3)), e(idx(6)), e(idx(7))];
                        let (h4, trace4, _) = split_degree4(&h, rep, &order4)?;
                        h = h4;
                        records.extend(trace4.records);
                    }
                }
            }
        }
        weight4.push(w4);
    }

    let flow = find_nowhere_zero_flow(&h)?;
    let flow = repair_flow(&h, &flow, &constraints)?;
    let color = pull_back_flow(&records, &flow, &ends.sub)?;
    let coloring = RainbowColoring { factor: f, color };
    coloring.check_parity(g)?;
    let out = MindegreeRainbow { coloring, weight4 };
    check_mindegree_clauses(&out)?;
    Ok(out)
}

fn try_split_candidates(
    h: &Multigraph,
    v: VertexId,
    candidates: Vec<(EdgeId, EdgeId)>,
) -> Result<(Multigraph, Vec<SurgeryRecord>, usize), RainbowError> {
    for (i, &(e1, e2)) in candidates.iter().enumerate() {
        let (h2, trace) = h.split_off_edges(v, e1, e2)?;
        if is_k_odd_connected(&h2, 5)? {
            return Ok((h2, trace.records, i));
        }
    }
    Err(RainbowError::Split(SplitError::LemmaViolation { vertex: v, target: 5 }))
}

/// The positional clause for each case, as (templates, expected) where
/// `expected = true` means "compatible with at least one template" and
/// `false` means "compatible with none" (always up to color permutation).
pub fn case_clause(case: &ZeroCase) -> (&'static [&'static str], bool) {
    match case {
        ZeroCase::K4 => (&["RRxx", "xRRx"], true),
        ZeroCase::K5 => (&["RxGxx", "RRRGB"], true),
        ZeroCase::K6Adjacent => (&["xxRRxx", "xxxxRR", "xxRGGR", "xRxGGR"], true),
        ZeroCase::K6Opposite => (&["RRGRRG", "RRGRGR", "RGRRRG", "RGRRGR"], false),
        ZeroCase::K7 => (
            &["xRRxxxx", "xxxRRxx", "xxxxxRR", "xRGxxRB", "xRGxxBR", "xRGxxGB", "xRGxxBG", "xxxRGRG", "xxxRGGR"],
            true,
        ),
        ZeroCase::K8 => (
            &["RRxxxxxx", "xxRRxxxx", "xxxxRRxx", "xxxxxxRR", "RGGRxxxx", "xxRGGRxx", "xxxxRGGR", "GRxxxxRG"],
            true,
        ),
    }
}

/// Asserts the positional clause of every weight-four circuit against the
/// produced coloring.
pub fn check_mindegree_clauses(result: &MindegreeRainbow) -> Result<(), RainbowError> {
    for w4 in &result.weight4 {
        let letters: Vec<Letter> = w4
            .chords
            .iter()
            .map(|&c| {
                result
                    .coloring
                    .color_of(c)
                    .map(Letter::from_value)
                    .ok_or_else(|| {
                        RainbowError::InvariantViolated("uncolored chord on weight-4 circuit".into())
                    })
            })
            .collect::<Result<_, _>>()?;
        let p = Pattern(letters);
        let (templates, want_some) = case_clause(&w4.case);
        let mut any = false;
        for t in templates {
            if pattern_compatible(&p, &Pattern::parse(t))? {
                any = true;
                break;
            }
        }
        if any != want_some {
            return Err(RainbowError::InvariantViolated(format!(
                "weight-4 circuit pattern {p} fails its {:?} clause",
                w4.case
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::named;

    #[test]
    fn pattern_examples_from_text() {
        // Symmetric pair and non-symmetric pair.
        let a = Pattern::parse("RRGBGB");
        let b = Pattern::parse("RBRBGG");
        assert!(patterns_symmetric(&a, &b).unwrap());
        let c = Pattern::parse("RRGBBG");
        let d = Pattern::parse("RRGBGB");
        assert!(!patterns_symmetric(&c, &d).unwrap());
        // Identity.
        assert!(patterns_symmetric(&a, &a).unwrap());
    }

    #[test]
    fn compatibility_examples() {
        let p = Pattern::parse("RGRGBBGG");
        let t = Pattern::parse("RBRxxxBx");
        assert!(pattern_compatible(&p, &t).unwrap());
        assert!(pattern_compatible(&Pattern::parse("RRRR"), &Pattern::parse("xxxx")).unwrap());
        assert!(!pattern_compatible(&Pattern::parse("RRRR"), &Pattern::parse("GRRR")).unwrap());
        // No rotation: a shifted template does not match.
        assert!(!pattern_compatible(&Pattern::parse("RRGG"), &Pattern::parse("xRRx")).unwrap());
        assert!(pattern_compatible(&Pattern::parse("GRRG"), &Pattern::parse("xRRx")).unwrap());
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let a = Pattern::parse("RRG");
        let b = Pattern::parse("RRGG");
        assert!(patterns_symmetric(&a, &b).is_err());
        assert!(pattern_compatible(&a, &b).is_err());
    }

    #[test]
    fn k4_two_factor_is_hamilton() {
        let g = named::k4();
        let f = find_2factor_5oc(&g, Objective::Minimize).unwrap();
        assert_eq!(f.edge_ids.len(), 4);
        assert_eq!(f.circuits.len(), 1);
        assert_eq!(3 * f.weight(&g), 2 * g.total_weight());
    }

    #[test]
    fn petersen_two_factor_is_pentagon_pair() {
        let g = named::petersen();
        let f = find_2factor_5oc(&g, Objective::Minimize).unwrap();
        assert_eq!(f.edge_ids.len(), 10);
        assert_eq!(f.circuits.len(), 2);
        assert!(f.circuits.iter().all(|c| c.len() == 5));
        // Contraction: two vertices, five parallel edges.
        let contracted = contract_factor(&g, &f).unwrap();
        assert_eq!(contracted.graph.vertex_count(), 2);
        assert_eq!(contracted.graph.edge_count(), 5);
    }

    #[test]
    fn prism_maximize_yields_hamilton() {
        let g = named::prism();
        let f = find_2factor_5oc(&g, Objective::Maximize).unwrap();
        assert_eq!(f.circuits.len(), 1, "triangle pair is rejected by 5-odd-connectivity");
        assert_eq!(f.weight(&g), 6);
        assert!(3 * f.weight(&g) >= 2 * g.total_weight());
    }

    #[test]
    fn petersen_matching_count() {
        assert_eq!(enumerate_perfect_matchings(&named::petersen()).len(), 6);
    }

    #[test]
    fn rainbow_color_parity_holds() {
        for g in [named::k4(), named::petersen(), named::prism(), named::k33(), named::cube()] {
            let f = find_2factor_5oc(&g, Objective::Minimize).unwrap();
            let coloring = rainbow_color(&g, &f).unwrap();
            coloring.check_parity(&g).unwrap();
        }
    }

    #[test]
    fn rainbow_cubic_k4_pattern_is_symmetric_to_rrrr() {
        let g = named::k4();
        let coloring = rainbow_cubic(&g).unwrap();
        let circuit = &coloring.factor.circuits[0];
        let p = pattern_of(&g, circuit, &coloring).unwrap();
        assert!(patterns_symmetric(&p, &Pattern::parse("RRRR")).unwrap());
    }

    #[test]
    fn rainbow_cubic_petersen_has_no_short_circuits() {
        let g = named::petersen();
        let coloring = rainbow_cubic(&g).unwrap();
        assert!(coloring
            .factor
            .circuits
            .iter()
            .all(|c| c.len() == 5));
        check_cubic_patterns(&g, &coloring).unwrap();
    }

    #[test]
    fn rainbow_cubic_random_corpus() {
        for seed in 0..15 {
            let g = crate::harness::gen_cubic_bridgeless(10, seed).unwrap();
            let coloring = rainbow_cubic(&g).unwrap();
            coloring.check_parity(&g).unwrap();
            check_cubic_patterns(&g, &coloring).unwrap();
        }
    }

    #[test]
    fn mindegree_without_zero_edges() {
        let mut g = named::cube();
        g.weight_all_one();
        let out = rainbow_mindegree(&g).unwrap();
        out.coloring.check_parity(&g).unwrap();
        // Cube: every 2-factor circuit has length 4, 6 or 8; weight-4
        // circuits are the 4-circuits and their clause is the K4 one.
        check_mindegree_clauses(&out).unwrap();
    }

    #[test]
    fn zero_edges_sharing_a_vertex_are_rejected() {
        let mut g = named::cube();
        g.weight_all_one();
        g.set_weight(EdgeId(0), 0);
        g.set_weight(EdgeId(1), 0); // edges 0 and 1 share vertex 1
        assert!(matches!(
            rainbow_mindegree(&g),
            Err(RainbowError::ZeroEdgesNotMatching(_, _))
        ));
    }

    #[test]
    fn mindegree_with_zero_matching() {
        // Cube with a perfect matching of zero-weight edges: the four
        // vertical edges.
        let mut g = named::cube();
        g.weight_all_one();
        for e in [8, 9, 10, 11] {
            g.set_weight(EdgeId(e), 0);
        }
        let out = rainbow_mindegree(&g).unwrap();
        assert!(3 * out.coloring.factor.weight(&g) <= 2 * g.total_weight());
        check_mindegree_clauses(&out).unwrap();
    }
}
