//! Instance generators, the run / verify harness and its reports.

use std::collections::BTreeSet;
use std::io::BufRead;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::matching::{matching_oracle, validate_matching, Graph, MatchingBound};
use crate::pipeline::{MatchingReport, PipelineConfig, PipelineSketch};
use crate::stream::{net_edges, LinearSketch, Stream, StreamReader, StreamUpdate};

/// Distractor density of `hard_sparse_induced` when none is given.
pub const DEFAULT_NOISE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Every pair independently with probability p.
    ErdosRenyi { p: f64 },
    /// A random matching of size mu and nothing else.
    PlantedMatching { mu: u32 },
    /// A sparse near-perfect matching on about n − n/α vertices, plus dense
    /// distractor edges touching the remaining n/α.
    HardSparseInduced { alpha: f64, noise: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub family: Family,
    pub n: u32,
    /// Fraction of inserted edges that are later deleted.
    pub deletion_fraction: f64,
    pub seed: u64,
}

/// A generated stream with what the generator knows about it.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub stream: Stream,
    /// Matching planted by the generator (empty for Erdős–Rényi).
    pub planted: Vec<(u32, u32)>,
    /// Vertices carrying the planted sparse part (hard family only).
    pub planted_side: Vec<u32>,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2 (got {})", self.n));
        }
        if !(0.0..1.0).contains(&self.deletion_fraction) {
            return bad(format!("deletion fraction must lie in [0, 1) (got {})", self.deletion_fraction));
        }
        match self.family {
            Family::ErdosRenyi { p } if !(0.0..=1.0).contains(&p) => bad(format!("p must lie in [0, 1] (got {p})")),
            Family::PlantedMatching { mu } if 2 * mu as u64 > self.n as u64 => {
                bad(format!("a matching of size {mu} needs {} vertices, have {}", 2 * mu, self.n))
            }
            Family::HardSparseInduced { alpha, noise } if !(alpha > 1.0) || !(0.0..=1.0).contains(&noise) => {
                bad(format!("hard family needs α > 1 and noise in [0, 1] (got α={alpha}, noise={noise})"))
            }
            _ => Ok(()),
        }
    }

    pub fn generate(&self) -> Result<Instance, Error> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let n = self.n;
        let mut perm: Vec<u32> = (0..n).collect();
        perm.shuffle(&mut rng);
        let pair = |u: u32, v: u32| (u.min(v), u.max(v));

        let mut kept: BTreeSet<(u32, u32)> = BTreeSet::new();
        let mut churn: BTreeSet<(u32, u32)> = BTreeSet::new();
        let mut planted = Vec::new();
        let mut planted_side = Vec::new();
        match self.family {
            Family::ErdosRenyi { p } => {
                for u in 0..n {
                    for v in u + 1..n {
                        if rng.gen_bool(p) {
                            kept.insert((u, v));
                        }
                    }
                }
            }
            Family::PlantedMatching { mu } => {
                for i in 0..mu as usize {
                    let e = pair(perm[2 * i], perm[2 * i + 1]);
                    kept.insert(e);
                    planted.push(e);
                }
            }
            Family::HardSparseInduced { alpha, noise } => {
                let side = ((n as f64 - (n as f64 / alpha).floor()) as usize) & !1;
                planted_side = perm[..side].to_vec();
                planted_side.sort_unstable();
                for i in 0..side / 2 {
                    let e = pair(perm[2 * i], perm[2 * i + 1]);
                    kept.insert(e);
                    planted.push(e);
                }
                for _ in 0..side / 4 {
                    let (a, b) = (perm[rng.gen_range(0..side)], perm[rng.gen_range(0..side)]);
                    if a != b {
                        kept.insert(pair(a, b));
                    }
                }
                let mut on_side = vec![false; n as usize];
                for &v in &planted_side {
                    on_side[v as usize] = true;
                }
                for u in 0..n {
                    for v in u + 1..n {
                        if (!on_side[u as usize] || !on_side[v as usize]) && rng.gen_bool(noise) {
                            // distractors: a deletion_fraction of them is churn
                            if rng.gen_bool(self.deletion_fraction) {
                                churn.insert((u, v));
                            } else {
                                kept.insert((u, v));
                            }
                        }
                    }
                }
            }
        }
        if !matches!(self.family, Family::HardSparseInduced { .. }) && self.deletion_fraction > 0.0 {
            let f = self.deletion_fraction;
            let want = ((f / (1.0 - f)) * kept.len() as f64).ceil() as usize;
            let room = (n as u64 * (n as u64 - 1) / 2) as usize - kept.len();
            while churn.len() < want.min(room) {
                let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
                if a != b && !kept.contains(&pair(a, b)) {
                    churn.insert(pair(a, b));
                }
            }
        }

        // each insertion at a random time, each deletion later than its insertion
        let mut timed: Vec<(f64, StreamUpdate)> = Vec::with_capacity(kept.len() + 2 * churn.len());
        for &(u, v) in &kept {
            timed.push((rng.gen(), StreamUpdate::insert(u, v)));
        }
        for &(u, v) in &churn {
            let t: f64 = rng.gen();
            timed.push((t, StreamUpdate::insert(u, v)));
            timed.push((t + (1.0 - t) * rng.gen::<f64>(), StreamUpdate::delete(u, v)));
        }
        timed.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.delta.cmp(&a.1.delta)));
        let updates = timed.into_iter().map(|(_, up)| up).collect();
        Ok(Instance { stream: Stream { n, updates }, planted, planted_side })
    }
}

/// Net graph of a stream (edges with nonzero net multiplicity).
pub fn net_graph(n: u32, updates: &[StreamUpdate]) -> Graph {
    Graph::from_edges(n as usize, net_edges(updates).into_iter().filter(|&(_, m)| m != 0).map(|(e, _)| e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    pub vertex_disjoint: bool,
    pub repeated_vertex: Option<u32>,
    pub fabricated_edges: Vec<(u32, u32)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    #[serde(flatten)]
    pub report: MatchingReport,
    pub ground_truth: MatchingBound,
    /// |M| / μ, using the upper end of a bracket.
    pub ratio: Option<f64>,
    /// |M| ≥ μ/α, judged against the upper end of a bracket.
    pub meets_alpha: Option<bool>,
    pub validation: Validation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

fn ratio_of(size: usize, truth: &MatchingBound) -> f64 {
    match truth.upper() {
        0 => 1.0,
        mu => size as f64 / mu as f64,
    }
}

fn assemble(report: MatchingReport, g: &Graph, wall_time_ms: Option<f64>) -> RunReport {
    let verdict = validate_matching(&report.edges(), g);
    let truth = matching_oracle(g);
    let size = report.matching.len();
    RunReport {
        ratio: Some(ratio_of(size, &truth)),
        meets_alpha: Some(size as f64 >= truth.upper() as f64 / report.alpha),
        ground_truth: truth,
        validation: Validation {
            vertex_disjoint: verdict.repeated_vertex.is_none(),
            repeated_vertex: verdict.repeated_vertex,
            fabricated_edges: verdict.missing_edges,
        },
        report,
        wall_time_ms,
    }
}

/// Feeds a stream through the pipeline once, then recovers and validates.
pub fn run(stream: &Stream, mut cfg: PipelineConfig, timing: bool) -> Result<RunReport, Error> {
    let start = Instant::now();
    cfg.n = stream.n;
    let mut p = PipelineSketch::build(cfg)?;
    p.feed(stream.updates.iter().copied());
    let report = p.recover();
    let wall = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    Ok(assemble(report, &net_graph(stream.n, &stream.updates), wall))
}

/// Single pass over a text stream; the dense graph is kept only for validation.
pub fn run_reader<R: BufRead>(reader: R, mut cfg: PipelineConfig, timing: bool) -> Result<RunReport, Error> {
    let start = Instant::now();
    let mut reader = StreamReader::new(reader)?;
    cfg.n = reader.n();
    let n = cfg.n;
    let mut p = PipelineSketch::build(cfg)?;
    let mut seen = Vec::new();
    for up in reader.by_ref() {
        let up = up?;
        p.update(up);
        seen.push(up);
    }
    let report = p.recover();
    let wall = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    Ok(assemble(report, &net_graph(n, &seen), wall))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub pass: bool,
    pub repeated_vertex: Option<u32>,
    pub fabricated_edges: Vec<(u32, u32)>,
    pub ratio_reported: Option<f64>,
    pub ratio_recomputed: f64,
    pub messages: Vec<String>,
}

/// Rebuilds the net graph and checks a report against it.
pub fn verify(stream: &Stream, report: &RunReport) -> VerifyOutcome {
    let g = net_graph(stream.n, &stream.updates);
    let mut messages = Vec::new();
    if report.report.n != stream.n {
        messages.push(format!("report is for n = {} but the stream has n = {}", report.report.n, stream.n));
    }
    let verdict = validate_matching(&report.report.edges(), &g);
    if let Some(v) = verdict.repeated_vertex {
        messages.push(format!("vertex {v} is matched twice"));
    }
    for &(u, v) in &verdict.missing_edges {
        messages.push(format!("edge ({u}, {v}) is not in the graph"));
    }
    let ratio = ratio_of(report.report.matching.len(), &matching_oracle(&g));
    if let Some(r) = report.ratio {
        if (r - ratio).abs() > 1e-9 {
            messages.push(format!("reported ratio {r} but recomputed {ratio}"));
        }
    }
    VerifyOutcome {
        pass: messages.is_empty(),
        repeated_vertex: verdict.repeated_vertex,
        fabricated_edges: verdict.missing_edges,
        ratio_reported: report.ratio,
        ratio_recomputed: ratio,
        messages,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::max_matching;

    fn spec(family: Family, n: u32, f: f64, seed: u64) -> InstanceSpec {
        InstanceSpec { family, n, deletion_fraction: f, seed }
    }

    #[test]
    fn planted_without_deletions() {
        let inst = spec(Family::PlantedMatching { mu: 8 }, 16, 0.0, 1).generate().unwrap();
        assert_eq!(inst.stream.updates.len(), 8);
        assert!(inst.stream.updates.iter().all(|u| u.delta == 1));
        let text = inst.stream.to_text();
        assert_eq!(text.lines().filter(|l| l.starts_with('+')).count(), 8);
    }

    #[test]
    fn deletions_cancel_and_follow_insertions() {
        let inst = spec(Family::PlantedMatching { mu: 100 }, 400, 0.5, 2).generate().unwrap();
        let ups = &inst.stream.updates;
        let dels = ups.iter().filter(|u| u.delta < 0).count();
        assert!(dels >= 100, "{dels}");
        let mut live = BTreeSet::new();
        for u in ups {
            if u.delta > 0 {
                assert!(live.insert(u.edge()));
            } else {
                assert!(live.remove(&u.edge()));
            }
        }
        let g = net_graph(400, ups);
        assert_eq!(g.edge_count(), 100);
        assert_eq!(max_matching(&g).len(), 100);
    }

    #[test]
    fn hard_family_self_check() {
        let n = 1024;
        let inst = spec(Family::HardSparseInduced { alpha: 4.0, noise: DEFAULT_NOISE }, n, 0.3, 5).generate().unwrap();
        let g = net_graph(n, &inst.stream.updates);
        let mut keep = vec![false; n as usize];
        for &v in &inst.planted_side {
            keep[v as usize] = true;
        }
        let side = g.induced(&keep);
        assert!(side.edge_count() <= 2 * n as usize);
        let side_len = inst.planted_side.len() as f64;
        assert!(max_matching(&side).len() as f64 >= 0.9 * side_len / 2.0);
        assert!(inst.stream.updates.iter().any(|u| u.delta < 0));
    }

    #[test]
    fn erdos_renyi_density() {
        let inst = spec(Family::ErdosRenyi { p: 0.1 }, 200, 0.0, 3).generate().unwrap();
        let m = inst.stream.updates.len() as f64;
        assert!((m / 19900.0 - 0.1).abs() < 0.01);
    }

    #[test]
    fn run_is_deterministic_and_verifies() {
        let inst = spec(Family::PlantedMatching { mu: 30 }, 64, 0.3, 4).generate().unwrap();
        let mut cfg = PipelineConfig::new(64, 4.0);
        cfg.small_alpha_threshold = 2.0;
        cfg.seed = 11;
        let a = run(&inst.stream, cfg.clone(), false).unwrap();
        let b = run(&inst.stream, cfg, false).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.report.matching.len(), 30);
        assert!(verify(&inst.stream, &a).pass);
        let back: RunReport = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
        let streamed = run_reader(inst.stream.to_text().as_bytes(), PipelineConfig { seed: 11, small_alpha_threshold: 2.0, ..PipelineConfig::new(64, 4.0) }, false).unwrap();
        assert_eq!(streamed, a);
    }

    #[test]
    fn fabricated_edge_fails_verification() {
        let inst = spec(Family::PlantedMatching { mu: 4 }, 16, 0.0, 4).generate().unwrap();
        let mut r = run(&inst.stream, PipelineConfig::new(16, 2.0), false).unwrap();
        let used: BTreeSet<u32> = r.report.matching.iter().flatten().copied().collect();
        let free: Vec<u32> = (0..16).filter(|v| !used.contains(v)).collect();
        r.report.matching.push([free[0], free[1]]);
        r.ratio = None;
        let v = verify(&inst.stream, &r);
        assert!(!v.pass);
        assert_eq!(v.fabricated_edges, vec![(free[0], free[1])]);
    }

    #[test]
    fn empty_stream() {
        let s = Stream { n: 10, updates: vec![] };
        let r = run(&s, PipelineConfig::new(10, 2.0), false).unwrap();
        assert!(r.report.matching.is_empty());
        assert_eq!(r.report.bits.total, 45);
        assert_eq!(r.ratio, Some(1.0));
    }
}
