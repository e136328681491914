//! The match-or-sparsify step on a planted matching: either the greedy
//! matching from the samplers is large, or what it leaves behind is sparse
//! and still matchable.

use dynmatch::bench::{net_graph, Family, InstanceSpec};
use dynmatch::mos::{check_disjunction, MosKnobs, MosSketch};
use dynmatch::LinearSketch;

fn main() {
    let (n, mu, alpha) = (4096u32, 2048u32, 4.0);
    let inst = InstanceSpec { family: Family::PlantedMatching { mu }, n, deletion_fraction: 0.3, seed: 1 }
        .generate()
        .unwrap();
    let mut sk = MosSketch::build(n, mu as u64, alpha, 1).unwrap();
    let p = *sk.params();
    println!("{} groups, {} steps, {} samplers, {} bits", p.groups, p.steps, p.sampler_count(), sk.meter().total());

    sk.feed(inst.stream.updates.iter().copied());
    let out = sk.recover();
    println!("M_easy has {} edges ({} failed steps)", out.matching.len(), out.failed_steps);
    for e in out.provenance.iter().take(3) {
        println!("  step {} gave {:?}", e.step, e.edge);
    }

    let g = net_graph(n, &inst.stream.updates);
    let d = check_disjunction(&g, &out.matching, mu as u64, alpha, &MosKnobs::default());
    println!(
        "match case {}, residual {} edges with a matching of {}, sparsify case {}",
        d.match_case, d.residual_edges, d.residual_matching, d.sparsify_case
    );
}
