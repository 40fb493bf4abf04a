//! Runs the three cover constructions on the named graphs and prints the
//! certified bounds next to the achieved lengths.

use cyclecover::cover::{cover_cubic, cover_general, cover_mindeg3, verify_bound, Method};
use cyclecover::harness::named_graphs;

fn main() {
    println!(
        "{:<10} {:>3} {:<8} {:>7} {:>9} {:>8}",
        "graph", "m", "method", "length", "bound", "check"
    );
    for (name, g) in named_graphs() {
        for method in [Method::Cubic, Method::Mindeg3, Method::General] {
            let report = match method {
                Method::Cubic => cover_cubic(&g),
                Method::Mindeg3 => cover_mindeg3(&g),
                Method::General => cover_general(&g),
            }
            .expect("named graphs satisfy every precondition");
            let check = verify_bound(&g, &report);
            println!(
                "{:<10} {:>3} {:<8} {:>7} {:>6}m/{} {:>8}",
                name,
                g.edge_count(),
                format!("{method:?}").to_lowercase(),
                report.cover.total_length,
                report.bound_num,
                report.bound_den,
                if check.passed() { "ok" } else { "FAILED" },
            );
            assert!(check.passed());
        }
    }
}
