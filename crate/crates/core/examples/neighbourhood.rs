//! Sketches of the neighbourhood N(S) of a fixed vertex set S: counting
//! whether |N(S) ∩ T| = 1, sampling a random neighbour, and testing whether
//! few neighbours fall outside a set T given only at query time.

use std::sync::Arc;

use dynmatch::neighborhood::{tester_cutoff, NECounter, NESampler, NETester, VertexSet};
use dynmatch::{LinearSketch, StreamUpdate};

fn main() {
    let n = 256;
    let s = Arc::new(VertexSet::new(n, [0, 1, 2]));

    let t = Arc::new(VertexSet::new(n, 100..110));
    let mut counter = NECounter::new(s.clone(), t, 2f64.powi(-20), 3).unwrap();
    counter.update(StreamUpdate::insert(0, 105));
    counter.update(StreamUpdate::insert(1, 105));
    counter.update(StreamUpdate::insert(2, 50));
    println!("one neighbour in T: {:?}", counter.query());
    counter.update(StreamUpdate::insert(2, 101));
    println!("two neighbours in T: {:?}", counter.query());

    let mut sampler = NESampler::new(s.clone(), 9).unwrap();
    for w in 10..20 {
        sampler.update(StreamUpdate::insert(w % 3, w));
    }
    sampler.update(StreamUpdate::delete(10 % 3, 10));
    println!("sampled {:?}, {} bits", sampler.query(), sampler.meter().total());

    // Tester with a = 16, b̃ = 1 and a reduced sampler count.
    let mut tester = NETester::with_samplers(s, 16, 1, 2000, 5).unwrap();
    let inside: Vec<u32> = (30..46).collect();
    for &w in &inside {
        tester.update(StreamUpdate::insert(0, w));
    }
    println!("all neighbours in T: {:?}", tester.test(&inside));
    for w in 200..204 {
        tester.update(StreamUpdate::insert(1, w));
    }
    println!(
        "4 outside T: {} of {} samples land outside (cutoff {} at the full sampler count)",
        tester.outside_count(&inside),
        tester.sampler_count(),
        tester_cutoff(n)
    );
}
