//! Exact shortest covers by at most three cycles on small graphs, and the
//! sandwich oracle-optimum <= construction-length <= bound.

use cyclecover::cover::cover_cubic;
use cyclecover::harness::named;
use cyclecover::oracle::{cycle_space_basis, shortest_cover_bruteforce, verify_cover};

fn main() {
    for (name, g) in [
        ("k4", named::k4()),
        ("theta", named::theta()),
        ("petersen", named::petersen()),
    ] {
        let basis = cycle_space_basis(&g);
        let cover = shortest_cover_bruteforce(&g, 3).unwrap();
        assert!(verify_cover(&g, &cover).passed());
        println!(
            "{name}: m = {}, cycle space dimension {}, optimum over <=3 cycles = {}",
            g.edge_count(),
            basis.dimension,
            cover.total_length
        );
        for (i, c) in cover.cycles.iter().enumerate() {
            let ids: Vec<String> = c.iter().map(|e| e.to_string()).collect();
            println!("  cycle {i}: [{}]", ids.join(" "));
        }
    }

    // The sandwich on Petersen: the brute-force optimum never exceeds the
    // constructed length, which never exceeds the 34m/21 bound.
    let g = named::petersen();
    let optimum = shortest_cover_bruteforce(&g, 3).unwrap().total_length;
    let constructed = cover_cubic(&g).unwrap().cover.total_length;
    println!("\npetersen sandwich: {optimum} <= {constructed} <= 34*15/21 = {}", 34 * 15 / 21);
    assert!(optimum <= constructed);
    assert!(21 * constructed <= 34 * 15);
}
