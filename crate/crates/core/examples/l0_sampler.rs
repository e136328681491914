//! L0 sampling over a turnstile vector: insertions and deletions cancel, and
//! the sampler returns a uniformly random surviving coordinate.

use std::collections::BTreeMap;

use dynmatch::recovery::{L0Outcome, L0Params, L0Sampler};

fn main() {
    let domain = 1 << 12;
    let params = L0Params::new(domain, 0.01, 1e-9).unwrap();
    println!(
        "{} repetitions × {} levels, {} fingerprints, {} sketch bits",
        params.repetitions,
        params.levels,
        params.fingerprints,
        params.sketch_bits()
    );

    // Most of what goes in is later taken out again.
    let mut s = L0Sampler::new(domain, 0.01, 1e-9, 7).unwrap();
    for i in 0..500 {
        s.update_index(i, 2);
    }
    for i in 0..497 {
        s.update_index(i, -2);
    }
    match s.query() {
        L0Outcome::Sample { index, value } => println!("sampled x[{index}] = {value}"),
        other => println!("{other:?}"),
    }

    // Empirical distribution over fresh seeds.
    let mut seen = BTreeMap::new();
    for seed in 0..3000 {
        let mut s = L0Sampler::new(domain, 0.01, 1e-9, seed).unwrap();
        for i in [11, 600, 4000] {
            s.update_index(i, 1);
        }
        if let L0Outcome::Sample { index, .. } = s.query() {
            *seen.entry(index).or_insert(0) += 1;
        }
    }
    println!("over 3000 seeds: {seen:?}");

    // Two halves of a stream merge into the sketch of the whole.
    let (mut a, mut b) = (L0Sampler::new(domain, 0.01, 1e-9, 1).unwrap(), L0Sampler::new(domain, 0.01, 1e-9, 1).unwrap());
    a.update_index(9, 1);
    b.update_index(9, -1);
    b.update_index(77, 5);
    a.merge_from(&b).unwrap();
    assert_eq!(a.query(), L0Outcome::Sample { index: 77, value: 5 });
}
