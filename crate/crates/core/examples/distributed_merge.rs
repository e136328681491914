//! Linearity in practice: three sites sketch their own slices of one stream
//! with shared seeds, and the merged sketch equals the sketch of the whole.

use dynmatch::bench::{Family, InstanceSpec};
use dynmatch::mos::MosSketch;
use dynmatch::LinearSketch;

fn main() {
    let n = 512;
    let inst = InstanceSpec { family: Family::ErdosRenyi { p: 0.02 }, n, deletion_fraction: 0.4, seed: 8 }
        .generate()
        .unwrap();
    let ups = &inst.stream.updates;
    let build = || MosSketch::build(n, 64, 2.0, 99).unwrap();

    let mut whole = build();
    whole.feed(ups.iter().copied());

    let mut sites = [build(), build(), build()];
    for (i, &u) in ups.iter().enumerate() {
        sites[(u.u as usize + i) % 3].update(u);
    }
    let [mut merged, b, c] = sites;
    merged.merge(&b).unwrap();
    merged.merge(&c).unwrap();

    assert_eq!(merged, whole);
    println!("{} updates over 3 sites; merged sketch matches the whole stream", ups.len());
    println!("greedy matching from the merged sketch: {} edges", merged.recover().matching.len());

    // Sketches with different seeds refuse to merge.
    let stranger = MosSketch::build(n, 64, 2.0, 100).unwrap();
    assert!(merged.merge(&stranger).is_err());
}
