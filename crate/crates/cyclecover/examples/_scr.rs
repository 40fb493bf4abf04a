use cyclecover::harness::named;
use cyclecover::multigraph::EdgeId;
use cyclecover::rainbow::*;

fn main() {
    let mut g = named::cube();
    g.weight_all_one();
    for e in [8, 9, 10, 11] {
        g.set_weight(EdgeId(e), 0);
    }
    eprintln!("finding 2-factor...");
    let f = find_2factor_5oc(&g, Objective::Minimize).unwrap();
    eprintln!("factor: {:?} circuits {}", f.edge_ids, f.circuits.len());
    eprintln!("running rainbow_mindegree...");
    let out = rainbow_mindegree(&g).unwrap();
    eprintln!("done: weight4 cases {}", out.weight4.len());
}
