//! Named graphs, seeded generators and the corpus runner backing the CLI.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cover::{self, CoverError, Method};
use crate::cuts::find_bridges;
use crate::multigraph::{Multigraph, VertexId};
use crate::oracle;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// The small graphs used as fixed references throughout the tests.
pub mod named {
    use crate::multigraph::Multigraph;

    /// Complete graph on four vertices.
    pub fn k4() -> Multigraph {
        Multigraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)])
    }

    /// Complete bipartite graph K3,3.
    pub fn k33() -> Multigraph {
        Multigraph::from_edges(
            6,
            &[
                (0, 3), (0, 4), (0, 5),
                (1, 3), (1, 4), (1, 5),
                (2, 3), (2, 4), (2, 5),
            ],
        )
    }

    /// Petersen graph: outer pentagon, inner pentagram, five spokes.
    pub fn petersen() -> Multigraph {
        Multigraph::from_edges(
            10,
            &[
                (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
                (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
                (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
            ],
        )
    }

    /// Triangular prism.
    pub fn prism() -> Multigraph {
        Multigraph::from_edges(
            6,
            &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)],
        )
    }

    /// 3-cube graph.
    pub fn cube() -> Multigraph {
        Multigraph::from_edges(
            8,
            &[
                (0, 1), (1, 2), (2, 3), (3, 0),
                (4, 5), (5, 6), (6, 7), (7, 4),
                (0, 4), (1, 5), (2, 6), (3, 7),
            ],
        )
    }

    /// Two vertices joined by three parallel edges.
    pub fn theta() -> Multigraph {
        Multigraph::from_edges(2, &[(0, 1), (0, 1), (0, 1)])
    }
}

/// Connected cubic bridgeless multigraph on `n` vertices (n even, n >= 4),
/// built as a random Hamilton cycle overlaid with a random perfect matching.
/// The Hamilton cycle keeps every output bridgeless; simple outputs are
/// preferred by rejection for a bounded number of attempts. Deterministic
/// per (n, seed).
pub fn gen_cubic_bridgeless(n: u32, seed: u64) -> Result<Multigraph, HarnessError> {
    if n < 4 || n % 2 != 0 {
        return Err(HarnessError::InvalidParameter(format!(
            "cubic generator needs even n >= 4, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6375_6269_63FF_0000 ^ u64::from(n));
    for attempt in 0..200 {
        let g = cubic_attempt(n, &mut rng);
        let simple_enough = attempt >= 100 || is_simple(&g);
        if simple_enough && find_bridges(&g).is_empty() && g.is_connected() && g.is_cubic() {
            return Ok(g);
        }
    }
    // A Hamilton cycle plus any perfect matching is always bridgeless and
    // connected, so the loop above only filters for simplicity.
    let g = cubic_attempt(n, &mut rng);
    Ok(g)
}

fn cubic_attempt(n: u32, rng: &mut ChaCha8Rng) -> Multigraph {
    let mut order: Vec<u32> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for i in 0..n as usize {
        pairs.push((order[i], order[(i + 1) % n as usize]));
    }
    let mut mate: Vec<u32> = (0..n).collect();
    mate.shuffle(rng);
    for chunk in mate.chunks(2) {
        pairs.push((chunk[0], chunk[1]));
    }
    Multigraph::from_edges(n, &pairs)
}

fn is_simple(g: &Multigraph) -> bool {
    let mut seen = BTreeSet::new();
    for (_, u, v) in g.edges() {
        if u == v {
            return false;
        }
        let key = if u < v { (u, v) } else { (v, u) };
        if !seen.insert(key) {
            return false;
        }
    }
    true
}

/// Random connected bridgeless multigraph with minimum degree three:
/// a random cubic base plus extra random edges (parallels permitted, no
/// loops) up to `m` edges. Deterministic per (n, m, seed).
pub fn gen_random_mindeg3(n: u32, m: u32, seed: u64) -> Result<Multigraph, HarnessError> {
    if n < 4 || n % 2 != 0 {
        return Err(HarnessError::InvalidParameter(format!(
            "mindeg3 generator needs even n >= 4, got {n}"
        )));
    }
    let base_m = 3 * n / 2;
    if m < base_m {
        return Err(HarnessError::InvalidParameter(format!(
            "m = {m} is below the cubic minimum {base_m} for n = {n}"
        )));
    }
    let mut g = gen_cubic_bridgeless(n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6D64_3367_0000_0000 ^ (u64::from(n) << 32) ^ u64::from(m));
    for _ in base_m..m {
        let u = rng.random_range(0..n);
        let mut v = rng.random_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        g.add_edge(VertexId(u), VertexId(v));
    }
    Ok(g)
}

/// Which parallel-edge reduction a planted configuration should trigger.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlantKind {
    Leaf,
    LeafSpecial,
    Inner,
    Suppress,
}

/// Random min-degree-3 host with one configuration planted that triggers the
/// requested parallel-edge reduction.
pub fn gen_with_parallel_config(
    n: u32,
    kind: PlantKind,
    seed: u64,
) -> Result<Multigraph, HarnessError> {
    let mut g = gen_cubic_bridgeless(n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x706C_616E_7400_0000);
    let host_a = VertexId(rng.random_range(0..n));
    let host_b = {
        let mut b = rng.random_range(0..n - 1);
        if b >= host_a.0 {
            b += 1;
        }
        VertexId(b)
    };
    match kind {
        PlantKind::Leaf => {
            // v1 of degree k joined to v2 of degree k+3 (k parallels plus
            // three host edges).
            let k = 3 + rng.random_range(0..2); // 3 or 4
            let v2 = g.add_vertex();
            let v1 = g.add_vertex();
            for _ in 0..k {
                g.add_edge(v1, v2);
            }
            g.add_edge(v2, host_a);
            g.add_edge(v2, host_b);
            g.add_edge(v2, host_a);
        }
        PlantKind::LeafSpecial => {
            // v1 of degree k >= 4 joined to v2 of degree k+2.
            let k = 4 + rng.random_range(0..2); // 4 or 5
            let v2 = g.add_vertex();
            let v1 = g.add_vertex();
            for _ in 0..k {
                g.add_edge(v1, v2);
            }
            g.add_edge(v2, host_a);
            g.add_edge(v2, host_b);
        }
        PlantKind::Inner => {
            // Parallel class between two existing vertices: degrees become
            // 3+k and 3+k, meeting the k+1 / k+2 thresholds for k >= 2.
            let k = 2 + rng.random_range(0..3); // 2..=4
            for _ in 0..k {
                g.add_edge(host_a, host_b);
            }
        }
        PlantKind::Suppress => {
            // Both endpoints of the class have degree exactly k+1.
            let k = 3 + rng.random_range(0..2); // 3 or 4
            let v1 = g.add_vertex();
            let v2 = g.add_vertex();
            for _ in 0..k {
                g.add_edge(v1, v2);
            }
            g.add_edge(v1, host_a);
            g.add_edge(v2, host_b);
        }
    }
    Ok(g)
}

/// Random connected 5-odd-connected multigraph whose vertices all have
/// degree five or six, drawn from the configuration model with rejection;
/// the natural host shape for flow-repair constraint instances.
pub fn gen_5oc_host(n: u32, seed: u64) -> Result<Multigraph, HarnessError> {
    if n < 2 {
        return Err(HarnessError::InvalidParameter("host needs at least two vertices".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x686f_7374_0000_0000 ^ u64::from(n));
    for _ in 0..2000 {
        let mut degrees: Vec<u32> = (0..n).map(|_| 5 + rng.random_range(0..2)).collect();
        if degrees.iter().sum::<u32>() % 2 == 1 {
            degrees[0] = if degrees[0] == 5 { 6 } else { 5 };
        }
        let mut stubs: Vec<u32> = degrees
            .iter()
            .enumerate()
            .flat_map(|(i, &d)| std::iter::repeat(i as u32).take(d as usize))
            .collect();
        stubs.shuffle(&mut rng);
        let mut g = Multigraph::new();
        for _ in 0..n {
            g.add_vertex();
        }
        for pair in stubs.chunks(2) {
            g.add_edge(VertexId(pair[0]), VertexId(pair[1]));
        }
        if g.is_connected() && crate::cuts::is_k_odd_connected(&g, 5).unwrap_or(false) {
            return Ok(g);
        }
    }
    Err(HarnessError::InvalidParameter(format!(
        "no 5-odd-connected host found for n = {n}"
    )))
}

/// Random connected bridgeless graph with degrees up to `max_degree`,
/// built from a cubic base by adding random edges; used by the general
/// construction's corpus.
pub fn gen_arbitrary_bridgeless(
    n: u32,
    extra: u32,
    max_degree: usize,
    seed: u64,
) -> Result<Multigraph, HarnessError> {
    let mut g = gen_cubic_bridgeless(n, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6172_6269_7400_0000);
    let mut added = 0;
    let mut guard = 0;
    while added < extra && guard < 10 * extra + 100 {
        guard += 1;
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        if g.degree(VertexId(u)) < max_degree && g.degree(VertexId(v)) < max_degree {
            g.add_edge(VertexId(u), VertexId(v));
            added += 1;
        }
    }
    Ok(g)
}

/// Exhaustive connected cubic simple graphs on `n` labeled vertices, one per
/// isomorphism class (canonical-form deduplication; n <= 8).
pub fn exhaustive_cubic(n: u32) -> Result<Vec<Multigraph>, HarnessError> {
    if n % 2 != 0 || n < 4 || n > 8 {
        return Err(HarnessError::InvalidParameter(
            "exhaustive cubic generation supports even n in 4..=8".into(),
        ));
    }
    let n = n as usize;
    let all_pairs: Vec<(u32, u32)> = (0..n as u32)
        .flat_map(|u| ((u + 1)..n as u32).map(move |v| (u, v)))
        .collect();
    let m = 3 * n / 2;
    let mut out: Vec<Multigraph> = Vec::new();
    let mut canon_seen: BTreeSet<Vec<(u32, u32)>> = BTreeSet::new();
    let mut chosen: Vec<(u32, u32)> = Vec::new();
    fn search(
        idx: usize,
        chosen: &mut Vec<(u32, u32)>,
        degrees: &mut Vec<u32>,
        all_pairs: &[(u32, u32)],
        m: usize,
        out: &mut Vec<Multigraph>,
        canon_seen: &mut BTreeSet<Vec<(u32, u32)>>,
    ) {
        if chosen.len() == m {
            if degrees.iter().all(|&d| d == 3) {
                let n = degrees.len() as u32;
                let g = Multigraph::from_edges(n, chosen);
                if g.is_connected() {
                    let canon = canonical_form(n, chosen);
                    if canon_seen.insert(canon) {
                        out.push(g);
                    }
                }
            }
            return;
        }
        if idx >= all_pairs.len() || all_pairs.len() - idx < m - chosen.len() {
            return;
        }
        let (u, v) = all_pairs[idx];
        if degrees[u as usize] < 3 && degrees[v as usize] < 3 {
            degrees[u as usize] += 1;
            degrees[v as usize] += 1;
            chosen.push((u, v));
            search(idx + 1, chosen, degrees, all_pairs, m, out, canon_seen);
            chosen.pop();
            degrees[u as usize] -= 1;
            degrees[v as usize] -= 1;
        }
        search(idx + 1, chosen, degrees, all_pairs, m, out, canon_seen);
    }
    let mut degrees = vec![0u32; n];
    search(0, &mut chosen, &mut degrees, &all_pairs, m, &mut out, &mut canon_seen);
    Ok(out)
}

fn canonical_form(n: u32, edges: &[(u32, u32)]) -> Vec<(u32, u32)> {
    // Smallest edge list over all vertex permutations; n <= 8 keeps this
    // a 40320-permutation sweep.
    let mut perm: Vec<u32> = (0..n).collect();
    let mut best: Option<Vec<(u32, u32)>> = None;
    permute(&mut perm, 0, &mut |p| {
        let mut mapped: Vec<(u32, u32)> = edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (p[u as usize], p[v as usize]);
                if a < b { (a, b) } else { (b, a) }
            })
            .collect();
        mapped.sort_unstable();
        if best.as_ref().map_or(true, |b| mapped < *b) {
            best = Some(mapped);
        }
    });
    best.unwrap()
}

fn permute(perm: &mut Vec<u32>, k: usize, f: &mut impl FnMut(&[u32])) {
    if k == perm.len() {
        f(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, f);
        perm.swap(k, i);
    }
}

/// One corpus row: identifiers, sizes, certified construction result and,
/// when the cycle space is small enough, the oracle optimum.
#[derive(Debug, Clone)]
pub struct CorpusRow {
    pub graph_id: String,
    pub n: usize,
    pub m: usize,
    pub construction: Method,
    pub length: u64,
    pub bound_num: u64,
    pub bound_den: u64,
    pub oracle_length: Option<u64>,
}

/// Corpus generator specification, as parsed from the CLI.
#[derive(Debug, Clone)]
pub enum CorpusSpec {
    ExhaustiveCubic { n: u32 },
    RandomCubic { n: u32, count: u32, seed: u64 },
    RandomMindeg3 { n: u32, m: u32, count: u32, seed: u64 },
    /// Every parseable graph file in a directory, sorted by file name;
    /// graphs with bridges are filtered out.
    FileDir { path: std::path::PathBuf },
}

impl CorpusSpec {
    pub fn instances(&self) -> Result<Vec<(String, Multigraph)>, HarnessError> {
        match self {
            CorpusSpec::ExhaustiveCubic { n } => Ok(exhaustive_cubic(*n)?
                .into_iter()
                .enumerate()
                .map(|(i, g)| (format!("cubic-exh-{n}-{i}"), g))
                .collect()),
            CorpusSpec::RandomCubic { n, count, seed } => (0..*count)
                .map(|i| {
                    let s = seed.wrapping_add(u64::from(i));
                    gen_cubic_bridgeless(*n, s).map(|g| (format!("cubic-{n}-s{s}"), g))
                })
                .collect(),
            CorpusSpec::RandomMindeg3 { n, m, count, seed } => (0..*count)
                .map(|i| {
                    let s = seed.wrapping_add(u64::from(i));
                    gen_random_mindeg3(*n, *m, s).map(|g| (format!("mindeg3-{n}-{m}-s{s}"), g))
                })
                .collect(),
            CorpusSpec::FileDir { path } => {
                let mut entries: Vec<std::path::PathBuf> = std::fs::read_dir(path)
                    .map_err(|e| HarnessError::InvalidParameter(format!("{}: {e}", path.display())))?
                    .filter_map(|e| e.ok())
                    .map(|e| e.path())
                    .filter(|p| p.is_file())
                    .collect();
                entries.sort();
                let mut out = Vec::new();
                for p in entries {
                    let Ok(text) = std::fs::read_to_string(&p) else { continue };
                    let Ok(g) = Multigraph::from_text(&text) else { continue };
                    if !find_bridges(&g).is_empty() {
                        continue;
                    }
                    let id = p
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| "graph".into());
                    out.push((id, g));
                }
                Ok(out)
            }
        }
    }
}

/// Runs a method over every instance and renders the fixed-order summary
/// table. Instances are processed in parallel; output order is by graph id,
/// never by completion time.
pub fn run_corpus(
    instances: &[(String, Multigraph)],
    method: Option<Method>,
) -> Result<String, HarnessError> {
    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(instances.len().max(1));
    let rows: Vec<Result<CorpusRow, HarnessError>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for chunk_index in 0..threads {
            handles.push(scope.spawn(move || {
                let mut local = Vec::new();
                let mut idx = chunk_index;
                while idx < instances.len() {
                    let (id, g) = &instances[idx];
                    local.push((idx, corpus_row(id, g, method)));
                    idx += threads;
                }
                local
            }));
        }
        let mut collected: Vec<(usize, Result<CorpusRow, HarnessError>)> = handles
            .into_iter()
            .flat_map(|h| h.join().expect("corpus worker panicked"))
            .collect();
        collected.sort_by_key(|(i, _)| *i);
        collected.into_iter().map(|(_, r)| r).collect()
    });
    let mut table = String::new();
    let _ = writeln!(
        table,
        "{:<24} {:>4} {:>4} {:<8} {:>7} {:>9} {:>7} {:>12} {:>9}",
        "graph", "n", "m", "method", "length", "bound", "oracle", "ratio", "(dec)"
    );
    for row in rows {
        let row = row?;
        let (rn, rd) = reduce_fraction(row.length, row.m as u64);
        let _ = writeln!(
            table,
            "{:<24} {:>4} {:>4} {:<8} {:>7} {:>7}/{:<1} {:>7} {:>9}/{:<2} {:>9.4}",
            row.graph_id,
            row.n,
            row.m,
            format!("{:?}", row.construction).to_lowercase(),
            row.length,
            row.bound_num,
            row.bound_den,
            row.oracle_length.map_or("-".to_string(), |o| o.to_string()),
            rn,
            rd,
            row.length as f64 / row.m as f64,
        );
    }
    Ok(table)
}

fn corpus_row(id: &str, g: &Multigraph, method: Option<Method>) -> Result<CorpusRow, HarnessError> {
    let method = method.unwrap_or_else(|| cover::auto_method(g));
    let report = cover::cover_with_method(g, method)?;
    let oracle_length = match oracle::shortest_cover_bruteforce(g, 3) {
        Ok(c) => Some(c.total_length),
        Err(_) => None,
    };
    Ok(CorpusRow {
        graph_id: id.to_string(),
        n: g.vertex_count(),
        m: g.edge_count(),
        construction: method,
        length: report.cover.total_length,
        bound_num: report.bound_num,
        bound_den: report.bound_den,
        oracle_length,
    })
}

pub fn reduce_fraction(mut a: u64, mut b: u64) -> (u64, u64) {
    fn gcd(mut x: u64, mut y: u64) -> u64 {
        while y != 0 {
            let t = x % y;
            x = y;
            y = t;
        }
        x
    }
    if a == 0 {
        return (0, 1);
    }
    let g = gcd(a, b).max(1);
    a /= g;
    b /= g;
    (a, b)
}

/// A convenience bundle: every named graph with its id.
pub fn named_graphs() -> Vec<(String, Multigraph)> {
    vec![
        ("k4".into(), named::k4()),
        ("k33".into(), named::k33()),
        ("petersen".into(), named::petersen()),
        ("prism".into(), named::prism()),
        ("cube".into(), named::cube()),
    ]
}
