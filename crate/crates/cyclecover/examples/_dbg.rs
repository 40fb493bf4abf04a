// search small 5-odd-connected graphs for split witnesses where the first
// candidates fail
use cyclecover::cuts::is_k_odd_connected;
use cyclecover::multigraph::{Multigraph, VertexId};
use cyclecover::splitting::{split_degree4, split_degree6};

fn main() {
    // Family: v joined to p,q,r with multiplicities (2,2,2); blob edges
    // with multiplicities (a: p-q, b: q-r, c: p-r) plus optional extra
    // vertex w attached to p,q,r with multiplicities.
    let mut found4 = false;
    let mut found6: Vec<String> = Vec::new();
    for a in 0..5u32 {
        for b in 0..5u32 {
            for c in 0..5u32 {
                for wp in 0..4u32 {
                    for wq in 0..4u32 {
                        for wr in 0..4u32 {
                            let mut pairs = vec![(3, 0), (3, 0), (3, 1), (3, 1), (3, 2), (3, 2)];
                            for _ in 0..a { pairs.push((0, 1)); }
                            for _ in 0..b { pairs.push((1, 2)); }
                            for _ in 0..c { pairs.push((0, 2)); }
                            for _ in 0..wp { pairs.push((4, 0)); }
                            for _ in 0..wq { pairs.push((4, 1)); }
                            for _ in 0..wr { pairs.push((4, 2)); }
                            let n = if wp + wq + wr > 0 { 5 } else { 4 };
                            let g = Multigraph::from_edges(n, &pairs);
                            if !is_k_odd_connected(&g, 5).unwrap_or(false) {
                                continue;
                            }
                            let v = VertexId(3);
                            let order = g.edges_at(v);
                            if order.len() != 6 {
                                continue;
                            }
                            if let Ok((_, _, plan)) = split_degree6(&g, v, &order.clone().try_into().unwrap()) {
                                if plan.chosen == 2 && found6.len() < 3 {
                                    found6.push(format!("a={a} b={b} c={c} w=({wp},{wq},{wr})"));
                                }
                            }
                            // degree-4 witness in the same family: drop the r edges
                            if !found4 && wr == 0 && b == 0 && c == 0 && wp == 0 && wq == 0 {
                                let mut p4 = vec![(2, 0), (2, 0), (2, 1), (2, 1)];
                                for _ in 0..a { p4.push((0, 1)); }
                                let g4 = Multigraph::from_edges(3, &p4);
                                if is_k_odd_connected(&g4, 5).unwrap_or(false) {
                                    let order = g4.edges_at(VertexId(2));
                                    if let Ok((_, _, plan)) = split_degree4(&g4, VertexId(2), &order.clone().try_into().unwrap()) {
                                        if plan.chosen == 1 {
                                            eprintln!("split4 witness: a={a} (p-q multiplicity)");
                                            found4 = true;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    eprintln!("split6 chosen==2 witnesses: {found6:?}");
}
