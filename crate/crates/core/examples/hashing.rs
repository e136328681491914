//! k-wise independent hashing and the finite fields underneath it.
//!
//! Run with `cargo run --example hashing`.

use dynmatch::algebra::{smallest_prime_gt, ExtField, KWiseHash, PrimeField};

fn main() {
    // A 4-wise independent hash [1000] -> [16]; same seed, same function.
    let h = KWiseHash::new(4, 1000, 16, 42).unwrap();
    let again = KWiseHash::new(4, 1000, 16, 42).unwrap();
    let xs: Vec<u64> = (0..10).map(|x| h.eval(x).unwrap()).collect();
    assert!((0..10).all(|x| again.eval(x).unwrap() == xs[x as usize]));
    println!("h(0..10) = {xs:?}");
    println!("stored as {} bits (coefficients + seed)", h.bits());
    assert!(h.eval(1000).is_err());

    // Counters of the sparse decoders live in F_q for a small prime q.
    let q = PrimeField::new(smallest_prime_gt(4)).unwrap();
    let x = q.from_i64(-3);
    println!("-3 in F_{} is {x}, inverse of 2 is {}", q.modulus(), q.inv(2).unwrap());

    // Evaluation points for syndrome decoding come from an extension field
    // with more elements than the domain.
    let f = ExtField::covering(5, 4096).unwrap();
    println!("F_{}^{} has {} elements", f.characteristic(), f.degree(), f.order());
    let g = f.gen_pow(1);
    let g_inv = f.inv(g).unwrap();
    assert_eq!(f.mul(g, g_inv), f.one());
    assert_eq!(f.pow(g, f.order() - 1), f.one());
}
