//! Acceptance suite: every certified bound and invariant, run over seeded
//! corpora at full size with exact integer arithmetic. One test per
//! criterion; the test name is the pass/fail line, and each test prints its
//! statistics (visible with `--nocapture`).

use std::collections::BTreeSet;

use cyclecover::cover::{
    self, cover_cubic, cover_general, cover_mindeg3, reduce_parallel, reduction_budget,
    verify_bound, ReductionCounts,
};
use cyclecover::cuts::{is_k_odd_connected, find_bridges};
use cyclecover::flows::{
    self, constraint_is_good, find_nowhere_zero_flow, repair_flow_stats, ConstraintKind,
    VertexConstraint,
};
use cyclecover::harness::{
    gen_5oc_host, gen_arbitrary_bridgeless, gen_cubic_bridgeless, gen_random_mindeg3,
    gen_with_parallel_config, named, named_graphs, PlantKind,
};
use cyclecover::multigraph::{EdgeId, Multigraph};
use cyclecover::oracle::{self, shortest_cover_bruteforce};
use cyclecover::rainbow::{
    check_cubic_patterns, check_mindegree_clauses, rainbow_cubic, rainbow_mindegree,
};

const BASE_SEED: u64 = 20260808;

fn cubic_corpus() -> Vec<(String, Multigraph)> {
    let mut out = named_graphs();
    for (i, n) in [4u32, 6, 8, 10, 12, 14].iter().enumerate() {
        for s in 0..50u64 {
            let seed = BASE_SEED + 1000 * i as u64 + s;
            let g = gen_cubic_bridgeless(*n, seed).unwrap();
            out.push((format!("cubic-{n}-{seed}"), g));
        }
    }
    out
}

fn mindeg3_corpus() -> Vec<(String, Multigraph)> {
    let mut out = Vec::new();
    for (i, n) in [6u32, 8, 10, 12].iter().enumerate() {
        for s in 0..60u64 {
            let seed = BASE_SEED + 3000 * i as u64 + s;
            let base = 3 * n / 2;
            let m = base + (seed % u64::from(24 - base + 1)) as u32;
            let g = gen_random_mindeg3(*n, m.min(24), seed).unwrap();
            out.push((format!("mindeg3-{n}-{m}-{seed}"), g));
        }
    }
    // Planted parallel configurations: each reduction kind at least ten
    // times, verified in criterion 2.
    for (k, kind) in [
        PlantKind::Leaf,
        PlantKind::LeafSpecial,
        PlantKind::Inner,
        PlantKind::Suppress,
    ]
    .into_iter()
    .enumerate()
    {
        for s in 0..15u64 {
            let seed = BASE_SEED + 7000 + 100 * k as u64 + s;
            let g = gen_with_parallel_config(8, kind, seed).unwrap();
            out.push((format!("planted-{kind:?}-{seed}"), g));
        }
    }
    out
}

fn general_extra_corpus() -> Vec<(String, Multigraph)> {
    let mut out = Vec::new();
    for (i, (n, extra)) in [(8u32, 6u32), (10, 8), (12, 10), (10, 12)].iter().enumerate() {
        for s in 0..40u64 {
            let seed = BASE_SEED + 11000 * (i as u64 + 1) + s;
            let g = gen_arbitrary_bridgeless(*n, *extra, 8, seed).unwrap();
            out.push((format!("general-{n}+{extra}-{seed}"), g));
        }
    }
    out
}

#[test]
fn criterion_1_bound_certification_cubic() {
    let corpus = cubic_corpus();
    assert!(corpus.len() >= 305);
    let mut max_ratio = (0u64, 1u64);
    for (id, g) in &corpus {
        let report = cover_cubic(g).unwrap_or_else(|e| panic!("{id}: {e}"));
        let m = g.edge_count() as u64;
        let len = report.cover.total_length;
        assert!(
            21 * len <= 34 * m,
            "{id}: 21*{len} > 34*{m}"
        );
        let check = verify_bound(g, &report);
        assert!(check.passed(), "{id}: {:?}", check.failures);
        if len * max_ratio.1 > max_ratio.0 * m {
            max_ratio = (len, m);
        }
    }
    println!(
        "criterion 1 PASS: {} cubic instances, 21*length <= 34*m exact, worst length/m = {}/{}",
        corpus.len(),
        max_ratio.0,
        max_ratio.1
    );
}

#[test]
fn criterion_2_bound_certification_mindeg3() {
    let corpus = mindeg3_corpus();
    assert!(corpus.len() >= 300);
    let mut totals = ReductionCounts::default();
    for (id, g) in &corpus {
        assert!(g.vertex_count() <= 14 && g.edge_count() <= 24, "{id} out of size");
        let report = cover_mindeg3(g).unwrap_or_else(|e| panic!("{id}: {e}"));
        let m = g.edge_count() as u64;
        let len = report.cover.total_length;
        assert!(27 * len <= 44 * m, "{id}: 27*{len} > 44*{m}");
        let check = verify_bound(g, &report);
        assert!(check.passed(), "{id}: {:?}", check.failures);
        totals.leaf += report.diagnostics.reductions.leaf;
        totals.leaf_special += report.diagnostics.reductions.leaf_special;
        totals.inner += report.diagnostics.reductions.inner;
        totals.suppress += report.diagnostics.reductions.suppress;
    }
    assert!(totals.leaf >= 10, "leaf reductions fired only {} times", totals.leaf);
    assert!(
        totals.leaf_special >= 10,
        "leaf-special reductions fired only {} times",
        totals.leaf_special
    );
    assert!(totals.inner >= 10, "inner reductions fired only {} times", totals.inner);
    assert!(
        totals.suppress >= 10,
        "suppress reductions fired only {} times",
        totals.suppress
    );
    println!(
        "criterion 2 PASS: {} min-degree-3 instances, 27*length <= 44*m exact; reductions fired {totals:?}",
        corpus.len()
    );
}

#[test]
fn criterion_3_bound_certification_general() {
    let mut corpus = mindeg3_corpus();
    corpus.extend(general_extra_corpus());
    assert!(corpus.len() >= 460);
    for (id, g) in &corpus {
        let report = cover_general(g).unwrap_or_else(|e| panic!("{id}: {e}"));
        let m = g.edge_count() as u64;
        let len = report.cover.total_length;
        assert!(3 * len <= 5 * m, "{id}: 3*{len} > 5*{m}");
        let check = verify_bound(g, &report);
        assert!(check.passed(), "{id}: {:?}", check.failures);
    }
    println!(
        "criterion 3 PASS: {} instances (min-degree-3 corpus + degrees up to 8), 3*length <= 5*m exact",
        corpus.len()
    );
}

#[test]
fn criterion_4_oracle_sandwich() {
    // Spot goldens, derived by the brute-force oracle itself. The spec
    // quoted 21 for Petersen, which is its optimum over unboundedly many
    // cycles; with at most three cycles the derived optimum is 22 (both
    // facts re-checked by exhaustive enumeration in the oracle tests).
    assert_eq!(shortest_cover_bruteforce(&named::k4(), 3).unwrap().total_length, 8);
    assert_eq!(shortest_cover_bruteforce(&named::theta(), 3).unwrap().total_length, 4);
    assert_eq!(
        shortest_cover_bruteforce(&named::petersen(), 3).unwrap().total_length,
        22
    );

    let mut checked = 0usize;
    for (id, g) in cubic_corpus() {
        let dim = g.edge_count() + g.components().len() - g.vertex_count();
        if dim > 12 {
            continue;
        }
        let report = cover_cubic(&g).unwrap();
        let optimum = shortest_cover_bruteforce(&g, 3).unwrap().total_length;
        assert!(
            optimum <= report.cover.total_length,
            "{id}: oracle {optimum} > construction {}",
            report.cover.total_length
        );
        assert!(21 * report.cover.total_length <= 34 * g.edge_count() as u64);
        checked += 1;
    }
    for (id, g) in mindeg3_corpus() {
        let dim = g.edge_count() + g.components().len() - g.vertex_count();
        if dim > 12 {
            continue;
        }
        let report = cover_mindeg3(&g).unwrap();
        let optimum = shortest_cover_bruteforce(&g, 3).unwrap().total_length;
        assert!(
            optimum <= report.cover.total_length,
            "{id}: oracle {optimum} > construction {}",
            report.cover.total_length
        );
        checked += 1;
    }
    println!(
        "criterion 4 PASS: oracle <= construction <= bound on {checked} instances; \
         goldens k4=8, theta=4, petersen=22 (<=3 cycles; 21 needs a fourth cycle)"
    );
}

#[test]
fn criterion_5_rainbow_invariants() {
    let mut four_circuits = 0usize;
    let mut eight_circuits = 0usize;
    for (id, g) in cubic_corpus() {
        let coloring = rainbow_cubic(&g).unwrap_or_else(|e| panic!("{id}: {e}"));
        coloring.check_parity(&g).unwrap_or_else(|e| panic!("{id}: {e}"));
        check_cubic_patterns(&g, &coloring).unwrap_or_else(|e| panic!("{id}: {e}"));
        for c in &coloring.factor.circuits {
            match c.len() {
                4 => four_circuits += 1,
                8 => eight_circuits += 1,
                _ => {}
            }
        }
    }
    // Weighted variant: plant a zero-weight matching on cubic hosts and
    // check every positional clause.
    let mut weight4 = 0usize;
    for seed in 0..120u64 {
        let n = [8u32, 10, 12][(seed % 3) as usize];
        let mut g = gen_cubic_bridgeless(n, BASE_SEED + 17000 + seed).unwrap();
        g.weight_all_one();
        // Greedy seeded matching of zero-weight edges.
        let mut used: BTreeSet<_> = BTreeSet::new();
        for e in g.edge_ids().collect::<Vec<_>>() {
            if seed.wrapping_mul(0x9e37_79b9).wrapping_add(e.0 as u64) % 3 == 0 {
                let (u, v) = g.endpoints(e).unwrap();
                if u != v && !used.contains(&u) && !used.contains(&v) {
                    used.insert(u);
                    used.insert(v);
                    g.set_weight(e, 0);
                }
            }
        }
        let out = rainbow_mindegree(&g).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        out.coloring.check_parity(&g).unwrap();
        check_mindegree_clauses(&out).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        weight4 += out.weight4.len();
    }
    println!(
        "criterion 5 PASS: parity + pattern checks clean; {four_circuits} four-circuits and \
         {eight_circuits} eight-circuits checked against the symmetric lists, \
         {weight4} weight-4 circuits against their positional clauses"
    );
}

#[test]
fn criterion_6_flow_repair() {
    flows::deg5_routing_selftest().unwrap();
    let mut instances = 0usize;
    let mut swaps = 0usize;
    let mut repaired_from_bad = 0usize;
    let mut seed = 0u64;
    while instances < 200 {
        seed += 1;
        assert!(seed < 2000, "corpus loop failed to accumulate instances");
        let h = gen_5oc_host(2 + (seed % 4) as u32, BASE_SEED + 23000 + seed).unwrap();
        assert!(is_k_odd_connected(&h, 5).unwrap());
        let Ok(flow) = find_nowhere_zero_flow(&h) else {
            panic!("5-odd-connected host without a flow (seed {seed})")
        };
        let mut constraints: Vec<VertexConstraint> = Vec::new();
        let mut mix = seed;
        for v in h.vertices() {
            // Incident edge-end multiset, loops twice.
            let mut ends: Vec<EdgeId> = Vec::new();
            for e in h.edges_at(v) {
                let (a, b) = h.endpoints(e).unwrap();
                ends.push(e);
                if a == b {
                    ends.push(e);
                }
            }
            mix = mix.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            match ends.len() {
                5 => {
                    // Shared pair + two privates chosen by the seed.
                    let r = (mix >> 33) as usize;
                    let s1 = r % 5;
                    let s2 = (r / 5) % 4;
                    let mut idx: Vec<usize> = (0..5).collect();
                    let shared_a = idx.remove(s1);
                    let shared_b = idx.remove(s2 % idx.len());
                    let a_only = idx[0];
                    let b_only = idx[1];
                    constraints.push(VertexConstraint {
                        vertex: v,
                        kind: ConstraintKind::Degree5 {
                            a: vec![ends[shared_a], ends[shared_b], ends[a_only]],
                            b: vec![ends[shared_a], ends[shared_b], ends[b_only]],
                        },
                    });
                }
                6 => {
                    let r = (mix >> 33) as usize;
                    let mut idx: Vec<usize> = (0..6).collect();
                    let mut parts: Vec<Vec<EdgeId>> = Vec::new();
                    let mut r = r;
                    for _ in 0..3 {
                        let x = idx.remove(r % idx.len());
                        r /= 6;
                        let y = idx.remove(r % idx.len().max(1));
                        r /= 6;
                        parts.push(vec![ends[x], ends[y]]);
                    }
                    constraints.push(VertexConstraint {
                        vertex: v,
                        kind: ConstraintKind::Degree6 {
                            a: parts[0].clone(),
                            b: parts[1].clone(),
                            c: parts[2].clone(),
                        },
                    });
                }
                _ => {}
            }
        }
        // Every other host: overwrite with adversarial constraints built
        // from the flow's own colors so the vertex starts bad.
        if seed % 2 == 0 {
            constraints.clear();
            for v in h.vertices() {
                let mut ends: Vec<EdgeId> = Vec::new();
                for e in h.edges_at(v) {
                    let (a, b) = h.endpoints(e).unwrap();
                    ends.push(e);
                    if a == b {
                        ends.push(e);
                    }
                }
                let color_of = |e: EdgeId| flow.value(e);
                if ends.len() == 5 {
                    // Odd degree splits colors (3,1,1): put the tripled
                    // color into the first multiset.
                    let mut by_color: Vec<Vec<EdgeId>> = vec![Vec::new(); 4];
                    for &e in &ends {
                        by_color[color_of(e) as usize].push(e);
                    }
                    let triple = by_color.iter().find(|v| v.len() == 3).unwrap().clone();
                    let other = ends.iter().copied().find(|e| !triple.contains(e)).unwrap();
                    constraints.push(VertexConstraint {
                        vertex: v,
                        kind: ConstraintKind::Degree5 {
                            a: triple.clone(),
                            b: vec![triple[1], triple[2], other],
                        },
                    });
                } else if ends.len() == 6 {
                    // Bad shape needs exactly two colors, split (4, 2).
                    let mut by_color: Vec<Vec<EdgeId>> = vec![Vec::new(); 4];
                    for &e in &ends {
                        by_color[color_of(e) as usize].push(e);
                    }
                    let four = by_color.iter().position(|v| v.len() == 4);
                    let two = by_color.iter().position(|v| v.len() == 2);
                    if let (Some(x), Some(y)) = (four, two) {
                        let xs = by_color[x].clone();
                        let ys = by_color[y].clone();
                        constraints.push(VertexConstraint {
                            vertex: v,
                            kind: ConstraintKind::Degree6 {
                                a: vec![xs[0], ys[0]],
                                b: vec![xs[1], ys[1]],
                                c: vec![xs[2], xs[3]],
                            },
                        });
                    }
                }
            }
        }
        if constraints.is_empty() {
            continue;
        }
        let (repaired, stats) = repair_flow_stats(&h, &flow, &constraints)
            .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        for c in &constraints {
            assert!(
                constraint_is_good(&h, &repaired, c),
                "seed {seed}: vertex {} still bad",
                c.vertex
            );
        }
        assert!(stats.swaps <= stats.initial_bad);
        instances += constraints.len();
        swaps += stats.swaps;
        repaired_from_bad += stats.initial_bad;
    }
    assert!(repaired_from_bad > 0, "corpus never produced a bad vertex");
    println!(
        "criterion 6 PASS: {instances} constraint instances over 5-odd-connected hosts, \
         {repaired_from_bad} initially bad, {swaps} swaps (strict decrease asserted per swap); \
         routing-table self-test exhaustive"
    );
}

#[test]
fn criterion_7_splitting_lemmas_empirical() {
    use cyclecover::splitting::{split_degree4, split_degree6, split_degree8_chain, split_preserving};
    let mut splits = 0usize;
    for seed in 0..80u64 {
        let n = [10u32, 12, 14][(seed % 3) as usize];
        let host = gen_cubic_bridgeless(n, BASE_SEED + 29000 + seed).unwrap();
        let Ok(factor) = cyclecover::rainbow::find_2factor_5oc(
            &host,
            cyclecover::rainbow::Objective::Minimize,
        ) else {
            continue;
        };
        let contracted = cyclecover::rainbow::contract_factor(&host, &factor).unwrap();
        let sub = contracted.graph.subdivide_all();
        let h = sub.graph;
        for v in h.vertices().collect::<Vec<_>>() {
            let d = h.degree(v);
            let order = h.edges_at(v);
            let out = match d {
                4 => split_degree4(&h, v, &order.clone().try_into().unwrap())
                    .map(|(g, _, _)| g),
                6 => split_degree6(&h, v, &order.clone().try_into().unwrap())
                    .map(|(g, _, _)| g),
                8 => split_degree8_chain(&h, v, &order.clone().try_into().unwrap())
                    .map(|(g, _, _)| g),
                d if d >= 5 => split_preserving(&h, v, 5).map(|(g, _, _)| g),
                _ => continue,
            };
            let result = out.unwrap_or_else(|e| panic!("seed {seed} vertex {v}: {e}"));
            assert!(
                is_k_odd_connected(&result, 5).unwrap(),
                "seed {seed}: independent recheck failed"
            );
            splits += 1;
        }
        // Bridgeless-preserving splits on the raw hosts with degree >= 4
        // never fire on cubic inputs; exercise them on arbitrary-degree
        // graphs instead.
        let g = gen_arbitrary_bridgeless(8, 6, 8, BASE_SEED + 31000 + seed).unwrap();
        for v in g.vertices().collect::<Vec<_>>() {
            if g.degree(v) >= 4 {
                let (res, _, _) = split_preserving(&g, v, 3)
                    .unwrap_or_else(|e| panic!("seed {seed} vertex {v}: {e}"));
                assert!(find_bridges(&res).is_empty());
                splits += 1;
            }
        }
    }
    assert!(splits >= 200);
    println!(
        "criterion 7 PASS: {splits} splits executed, zero lemma violations, \
         every output re-verified for odd-connectivity"
    );
}

#[test]
fn criterion_8_reduction_accounting() {
    let mut fired = [0usize; 4];
    for (k, kind) in [
        PlantKind::Leaf,
        PlantKind::LeafSpecial,
        PlantKind::Inner,
        PlantKind::Suppress,
    ]
    .into_iter()
    .enumerate()
    {
        for s in 0..12u64 {
            let g = gen_with_parallel_config(8, kind, BASE_SEED + 37000 + 100 * k as u64 + s).unwrap();
            let Some(red) = reduce_parallel(&g).unwrap() else {
                panic!("planted {kind:?} did not produce a reduction");
            };
            // Cover the reduced graph independently, lift, and compare
            // against the lemma budget.
            let inner_report = cover_mindeg3(&red.reduced).unwrap();
            let mut cycles: [BTreeSet<EdgeId>; 3] = Default::default();
            for (i, c) in inner_report.cover.cycles.iter().enumerate() {
                cycles[i] = c.clone();
            }
            let before: u64 = cycles.iter().map(|c| red.reduced.weight_of(c)).sum();
            red.lift(&g, &mut cycles).unwrap();
            let after: u64 = cycles.iter().map(|c| g.weight_of(c)).sum();
            let budget = reduction_budget(red.kind, red.k);
            assert!(
                after <= before + budget,
                "{kind:?}: lift added {} > budget {budget}",
                after - before
            );
            // The lifted cycles must cover the original graph.
            let cover = oracle::CycleCover {
                cycles: cycles.to_vec(),
                total_length: after,
            };
            assert!(oracle::verify_cover(&g, &cover).passed());
            fired[match red.kind {
                cover::ReductionKind::Leaf => 0,
                cover::ReductionKind::LeafSpecial => 1,
                cover::ReductionKind::Inner => 2,
                cover::ReductionKind::Suppress => 3,
            }] += 1;
        }
    }
    assert!(fired.iter().all(|&f| f >= 10), "reductions fired {fired:?}");
    println!(
        "criterion 8 PASS: lift budgets respected on {} direct reductions \
         (leaf/leaf-special/inner/suppress = {fired:?}); per-application budgets \
         also asserted inside every cover_mindeg3 run",
        fired.iter().sum::<usize>()
    );
}
