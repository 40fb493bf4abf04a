//! Seeded corpus run: generates graphs, covers each with the strongest
//! applicable construction and prints the summary table with the oracle
//! column where the cycle space is small enough.

use cyclecover::harness::{run_corpus, CorpusSpec};

fn main() {
    let spec = CorpusSpec::RandomCubic { n: 12, count: 10, seed: 42 };
    let instances = spec.instances().unwrap();
    print!("{}", run_corpus(&instances, None).unwrap());

    let spec = CorpusSpec::RandomMindeg3 { n: 10, m: 20, count: 10, seed: 42 };
    let instances = spec.instances().unwrap();
    print!("{}", run_corpus(&instances, None).unwrap());

    let spec = CorpusSpec::ExhaustiveCubic { n: 6 };
    let instances = spec.instances().unwrap();
    print!("{}", run_corpus(&instances, None).unwrap());
}
