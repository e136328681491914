//! Sparsify-case recovery with explicit desk-scale parameters: vertices are
//! hashed into groups joined by a regular graph, and each group keeps an
//! NE-Tester plus an SNR sketch.

use dynmatch::matching::Matching;
use dynmatch::sparsify::{SparsifyParams, SparsifySketch};
use dynmatch::{Error, LinearSketch, StreamUpdate};

fn main() {
    // The formula parameters need far larger n than a desk machine holds.
    match SparsifySketch::build(4096, 2048, 16.0, 0.5, 0) {
        Err(Error::PromiseRegimeUnreachable(why)) => println!("formulas at n = 4096: {why}"),
        other => println!("{:?}", other.map(|s| *s.params())),
    }

    let params = SparsifyParams {
        n: 64,
        opt: 8,
        alpha: 2.0,
        delta: 0.5,
        groups: 8,
        degree: 2,
        a: 16,
        b_tilde: 1,
        c: 3,
        tester_samplers: 200,
        hash_independence: 4,
    };
    let mut sk = SparsifySketch::with_params(params, 3).unwrap();
    println!("{} groups of sizes {:?}", params.groups, (0..8).map(|i| sk.group(i).len()).collect::<Vec<_>>());

    // a sparse matching between vertices of adjacent groups
    let rg = *sk.regular_graph();
    let mut edges = Vec::new();
    let mut used = [false; 64];
    for u in 0..64u32 {
        for v in u + 1..64 {
            let linked = sk.groups_of(u).iter().any(|&i| sk.groups_of(v).iter().any(|&j| rg.adjacent(i as u64, j as u64)));
            if linked && !used[u as usize] && !used[v as usize] && edges.len() < 6 {
                used[u as usize] = true;
                used[v as usize] = true;
                edges.push((u, v));
            }
        }
    }
    for &(u, v) in &edges {
        sk.update(StreamUpdate::insert(u, v));
    }
    let out = sk.recover(&Matching::default());
    println!("planted {edges:?}");
    println!(
        "recovered {} edges, matching of {}, {} groups removed as expanding, {} failed",
        out.recovered_edges.len(),
        out.matching.len(),
        out.removed_expanding,
        out.recovery_failed
    );
}
