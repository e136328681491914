//! Sparse-neighbourhood recovery: N(S) − T for a T named only at recovery
//! time, in far less space than one L0 sampler per possible neighbour.

use std::sync::Arc;

use dynmatch::neighborhood::VertexSet;
use dynmatch::recovery::L0Params;
use dynmatch::snr::{ExhaustiveSnr, SnrMatrix, SnrSketch};
use dynmatch::{LinearSketch, StreamUpdate};

fn main() {
    let (n, a, b, c) = (2048u32, 400usize, 4usize, 3u64);
    let matrix = SnrMatrix::new(n, a, b, c, 11).unwrap();
    let sched = matrix.schedule();
    println!("depth {} (max {}), final decoder sized {}", sched.depth(), sched.max_depth(), sched.final_sparsity());

    let s = Arc::new(VertexSet::new(n, 0..8));
    let mut sk = SnrSketch::new(matrix.clone(), s.clone()).unwrap();
    // T: 400 vertices, most of them neighbours of S
    let t: Vec<u32> = (100..500).collect();
    for &w in &t {
        if w % 5 != 0 {
            sk.update(StreamUpdate::insert(w % 8, w));
        }
    }
    // four neighbours outside T, each with fewer than c edges into S
    for w in [900, 1200, 1500, 2000] {
        sk.update(StreamUpdate::insert(0, w));
        sk.update(StreamUpdate::insert(1, w));
    }
    let (out, trace) = sk.recover_traced(&t);
    println!("N(S) − T = {:?}", out.unwrap());
    for (j, level) in trace.iter().enumerate() {
        println!("  level {}: |T_j| = {}, {} corrections so far", j + 1, level.t.len(), level.y.len());
    }

    // A second set shares the matrix, so its randomness is not paid again.
    let other = SnrSketch::new(matrix, Arc::new(VertexSet::new(n, [8]))).unwrap();
    let both = sk.meter() + other.meter();
    println!("one sketch {} bits, two sharing a matrix {} bits", sk.meter().total(), both.total());
    let l0 = L0Params::new(n as u64, 0.01, (n as f64).powi(-10)).unwrap();
    println!("vs {} bits for {} L0 samplers", (a + b) as u64 * l0.sketch_bits(), a + b);

    // At toy size the exhaustive decoder gives the same answer.
    let small = Arc::new(VertexSet::new(24, [0, 1]));
    let mut fast = SnrSketch::standalone(small.clone(), 12, 2, 3, 4).unwrap();
    let mut slow = ExhaustiveSnr::new(small, 12, 2, 3, 4).unwrap();
    let ups = [StreamUpdate::insert(0, 5), StreamUpdate::insert(1, 6), StreamUpdate::insert(0, 20)];
    fast.feed(ups);
    slow.feed(ups);
    let t = [5, 6, 7];
    println!("toy: fast {:?}, exhaustive {:?}", fast.recover(&t), slow.recover(&t, 1 << 24));
}
