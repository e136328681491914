//! The full single-pass pipeline: one sketch per guess of the matching size,
//! a fallback for guesses outside the sketches' regime, and a JSON report.

use dynmatch::bench::{Family, InstanceSpec};
use dynmatch::pipeline::{Fallback, PipelineConfig, PipelineSketch};
use dynmatch::LinearSketch;

fn main() {
    let n = 1024;
    let inst = InstanceSpec { family: Family::PlantedMatching { mu: 200 }, n, deletion_fraction: 0.25, seed: 3 }
        .generate()
        .unwrap();

    for (fallback, threshold) in [(Fallback::ParityStore, 100.0), (Fallback::BestEffortMos, 2.0)] {
        let cfg = PipelineConfig { fallback, small_alpha_threshold: threshold, seed: 5, ..PipelineConfig::new(n, 8.0) };
        let mut p = PipelineSketch::build(cfg).unwrap();
        p.feed(inst.stream.updates.iter().copied());
        let rep = p.recover();
        println!(
            "{fallback:?}: |M| = {} from {:?}, {} bits, {}/{} guesses in regime",
            rep.matching.len(),
            rep.winner,
            rep.bits.total,
            rep.regime_flags.guesses_in_regime,
            rep.regime_flags.guesses_total
        );
    }

    let cfg = PipelineConfig { per_guess_report: false, ..PipelineConfig::new(n, 8.0) };
    let mut p = PipelineSketch::build(cfg).unwrap();
    p.feed(inst.stream.updates.iter().copied());
    println!("{}", serde_json::to_string_pretty(&p.recover()).unwrap());
}
