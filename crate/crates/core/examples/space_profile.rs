//! Nominal space of the per-guess sketches: bits grow like opt²/α³, and the
//! doubling ladder of guesses costs a constant factor over the top guess.

use dynmatch::pipeline::sketch_bits_profile;

fn main() {
    let n = 32768;
    for alpha in [2.0, 4.0, 8.0] {
        let p = sketch_bits_profile(n, alpha, 0.5).unwrap();
        let top = p.last().unwrap().1 as f64;
        let sum: f64 = p.iter().map(|g| g.1 as f64).sum();
        println!("α = {alpha}: top guess {:.3e} bits, ladder / top = {:.3}", top, sum / top);
        for w in p.windows(2).rev().take(3) {
            println!("  opt {:>6} -> {:>6}: × {:.2}", w[0].0, w[1].0, w[1].1 as f64 / w[0].1 as f64);
        }
    }
}
