//! Benchmark instances, the text stream format, and report checking.

use dynmatch::bench::{run, verify, Family, InstanceSpec, DEFAULT_NOISE};
use dynmatch::pipeline::PipelineConfig;
use dynmatch::stream::Stream;

fn main() {
    let spec = InstanceSpec {
        family: Family::HardSparseInduced { alpha: 4.0, noise: DEFAULT_NOISE },
        n: 512,
        deletion_fraction: 0.3,
        seed: 2,
    };
    let inst = spec.generate().unwrap();
    let text = inst.stream.to_text();
    println!("{} updates; first lines:", inst.stream.updates.len());
    for line in text.lines().take(4) {
        println!("  {line}");
    }
    let stream = Stream::parse(&text).unwrap();
    assert_eq!(stream, inst.stream);
    println!("planted matching of {} on a side of {}", inst.planted.len(), inst.planted_side.len());

    let rep = run(&stream, PipelineConfig::new(stream.n, 4.0), true).unwrap();
    println!(
        "|M| = {}, μ = {:?}, ratio {:.3}, meets μ/α: {:?}, {:.1} ms",
        rep.report.matching.len(),
        rep.ground_truth,
        rep.ratio.unwrap(),
        rep.meets_alpha,
        rep.wall_time_ms.unwrap()
    );

    let ok = verify(&stream, &rep);
    println!("verify: pass = {}", ok.pass);
    let mut forged = rep.clone();
    forged.report.matching.push([510, 511]);
    println!("forged report: {:?}", verify(&stream, &forged).messages);
}
