//! Exact k-sparse recovery over F_q from 2k syndromes.

use dynmatch::recovery::FqSparseRecovery;

fn main() {
    let (k, m, q) = (4, 4096, 7);
    let mut s = FqSparseRecovery::new(k, m, q).unwrap();
    println!("{k}-sparse over F_{q}^{m}: {} bits", s.bit_meter().sketch_bits);

    for (j, v) in [(3, 1), (1000, 6), (4095, 2)] {
        s.update_index(j, v);
    }
    // a coordinate that comes and goes
    s.update_signed(17, 3);
    s.update_signed(17, -3);
    println!("decoded: {:?}", s.decode().unwrap());

    // Subtracting a known part leaves the rest.
    let mut known = FqSparseRecovery::new(k, m, q).unwrap();
    known.update_index(1000, 6);
    s.subtract(&known).unwrap();
    assert_eq!(s.decode().unwrap(), vec![(3, 1), (4095, 2)]);

    // Beyond the promised sparsity the decoder says so instead of guessing.
    let mut over = FqSparseRecovery::new(2, 64, 3).unwrap();
    for j in 0..5 {
        over.update_index(j, 1);
    }
    println!("5 nonzeros into a 2-sparse decoder: {:?}", over.decode());
}
