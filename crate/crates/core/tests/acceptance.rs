//! Acceptance run: prints one PASS/FAIL line per criterion.
//!
//! `ACCEPTANCE_ONLY=3,6` restricts the run to the listed criteria. The
//! process exits nonzero when a criterion fails, except for the ones listed
//! in `KNOWN_UNATTAINABLE`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use dynmatch::bench::{net_graph, run, Family, InstanceSpec, DEFAULT_NOISE};
use dynmatch::mos::{check_disjunction, MosKnobs, MosSketch};
use dynmatch::neighborhood::{
    tester_cutoff, CounterAnswer, NECounter, NESampler, NETester, NeSample, SplitCounter, TesterAnswer, VertexSet,
};
use dynmatch::pipeline::{sketch_bits_profile, Fallback, ParityStore, PipelineConfig, PipelineSketch};
use dynmatch::recovery::{FqSparseRecovery, L0Outcome, L0Params, L0Sampler};
use dynmatch::snr::{ExhaustiveSnr, IndexRecoverySketch, PartialRecoverySketch, Schedule, SnrMatrix, SnrSketch, FIRST_GAMMA};
use dynmatch::sparsify::{AmplifiedSparsify, SparsifyParams, SparsifySketch};
use dynmatch::stream::pair_count;
use dynmatch::{edge_index, LinearSketch, StreamUpdate};

/// Criteria allowed to print FAIL without failing the run.
const KNOWN_UNATTAINABLE: &[usize] = &[];

/// Sketch bits per SNR copy over a·log₂c + b·log₂n·log₂c, frozen from the
/// first calibration run.
const SNR_CONSTANT: f64 = 166.22;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn info(line: impl AsRef<str>) {
    println!("      info: {}", line.as_ref());
}

fn rng(tag: u64, i: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(tag << 32 ^ i)
}

fn set(n: u32, vs: impl IntoIterator<Item = u32>) -> Arc<VertexSet> {
    Arc::new(VertexSet::new(n, vs))
}

// ---------------------------------------------------------------- linearity

const LIN_N: u32 = 16;
const LIN_STREAMS: usize = 1000;

/// 40 insertions, then 18 deletions of live edges (31% deletions).
fn churn_stream(r: &mut ChaCha8Rng) -> Vec<StreamUpdate> {
    let mut ups = Vec::new();
    let mut live = Vec::new();
    for _ in 0..40 {
        let u = r.gen_range(0..LIN_N);
        let mut v = r.gen_range(0..LIN_N - 1);
        if v >= u {
            v += 1;
        }
        ups.push(StreamUpdate::insert(u, v));
        live.push((u, v));
    }
    for _ in 0..18 {
        let (u, v) = live.swap_remove(r.gen_range(0..live.len()));
        ups.push(StreamUpdate::delete(u, v));
    }
    ups
}

/// Failures over the streams: original order, shuffled order and a random
/// two-way split merged back must give identical state.
fn linearity_failures<S: PartialEq>(
    streams: &[Vec<StreamUpdate>],
    make: impl Fn(u64) -> S,
    feed: impl Fn(&mut S, StreamUpdate),
    merge: impl Fn(&mut S, &S),
) -> usize {
    let mut failures = 0;
    for (i, ups) in streams.iter().enumerate() {
        let seed = i as u64;
        let mut r = rng(0x11, seed);
        let mut whole = make(seed);
        ups.iter().for_each(|&u| feed(&mut whole, u));
        let mut perm = ups.clone();
        perm.shuffle(&mut r);
        let mut shuffled = make(seed);
        perm.iter().for_each(|&u| feed(&mut shuffled, u));
        let (mut left, mut right) = (make(seed), make(seed));
        for &u in &perm {
            feed(if r.gen_bool(0.5) { &mut left } else { &mut right }, u);
        }
        merge(&mut left, &right);
        if !(whole == shuffled && whole == left) {
            failures += 1;
        }
    }
    failures
}

fn graph_linearity<S: LinearSketch + PartialEq>(streams: &[Vec<StreamUpdate>], make: impl Fn(u64) -> S) -> usize {
    let orders = linearity_failures(streams, &make, |s, u| s.update(u), |a, b| a.merge(b).expect("same randomness"));
    // batched feeding must agree with one update at a time
    let batched = streams
        .iter()
        .enumerate()
        .filter(|(i, ups)| {
            let (mut one, mut all) = (make(*i as u64), make(*i as u64));
            ups.iter().for_each(|&u| one.update(u));
            all.feed(ups.iter().copied());
            one != all
        })
        .count();
    orders + batched
}

fn edge_of(up: StreamUpdate) -> u64 {
    edge_index(up.u, up.v, LIN_N).unwrap()
}

/// A vertex-indexed image of an edge update, for the vertex-vector sketches.
fn vertex_of(up: StreamUpdate) -> u32 {
    (up.u + up.v) % LIN_N
}

fn linearity() -> Verdict {
    let streams: Vec<_> = (0..LIN_STREAMS as u64).map(|i| churn_stream(&mut rng(0x10, i))).collect();
    let deletions: usize = streams.iter().map(|s| s.iter().filter(|u| u.delta < 0).count()).sum();
    let total: usize = streams.iter().map(Vec::len).sum();
    let n = LIN_N;
    let s_small = set(n, [0, 1, 2]);
    let t_small = set(n, 3..10);
    let small_sparsify = SparsifyParams {
        n,
        opt: 4,
        alpha: 2.0,
        delta: 0.5,
        groups: 6,
        degree: 2,
        a: 16,
        b_tilde: 1,
        c: 3,
        tester_samplers: 24,
        hash_independence: 4,
    };
    let mut pipeline_cfg = PipelineConfig::new(n, 2.0);
    pipeline_cfg.small_alpha_threshold = 1.5;
    pipeline_cfg.fallback = Fallback::BestEffortMos;

    let mut rows: Vec<(&str, usize)> = Vec::new();
    rows.push((
        "L0Sampler",
        linearity_failures(
            &streams,
            |s| L0Sampler::new(pair_count(n), 0.01, 1e-6, s).unwrap(),
            |sk, u| sk.update_index(edge_of(u), u.delta as i64),
            |a, b| a.merge_from(b).unwrap(),
        ),
    ));
    rows.push(("L0Sampler (graph)", graph_linearity(&streams, |s| L0Sampler::new(pair_count(n), 0.01, 1e-6, s).unwrap())));
    rows.push((
        "FqSparseRecovery",
        linearity_failures(
            &streams,
            |_| FqSparseRecovery::new(8, pair_count(n), 5).unwrap(),
            |sk, u| sk.update_signed(edge_of(u), u.delta as i64),
            |a, b| a.merge_from(b).unwrap(),
        ),
    ));
    rows.push((
        "SplitCounter",
        linearity_failures(
            &streams,
            |s| SplitCounter::new(n, 2f64.powi(-10), s).unwrap(),
            |sk, u| sk.update_vertex(vertex_of(u), u.delta as i64),
            |a, b| a.merge_from(b).unwrap(),
        ),
    ));
    rows.push(("NECounter", graph_linearity(&streams, |s| NECounter::new(s_small.clone(), t_small.clone(), 2f64.powi(-10), s).unwrap())));
    rows.push(("NESampler", graph_linearity(&streams, |s| NESampler::new(s_small.clone(), s).unwrap())));
    rows.push(("NETester", graph_linearity(&streams, |s| NETester::with_samplers(s_small.clone(), 16, 1, 24, s).unwrap())));
    rows.push((
        "PartialRecoverySketch",
        linearity_failures(
            &streams,
            |s| PartialRecoverySketch::new(n, 4, FIRST_GAMMA, 5, s).unwrap(),
            |sk, u| sk.update_index(vertex_of(u) as u64, u.delta as i64),
            |a, b| a.merge_from(b).unwrap(),
        ),
    ));
    rows.push((
        "IndexRecoverySketch",
        linearity_failures(
            &streams,
            |s| IndexRecoverySketch::new(n, 4, FIRST_GAMMA, 5, s).unwrap(),
            |sk, u| sk.update_index(vertex_of(u) as u64, u.delta as i64),
            |a, b| a.merge_from(b).unwrap(),
        ),
    ));
    // one matrix per stream, shared by the three copies
    let matrices: Vec<_> = (0..streams.len() as u64).map(|s| SnrMatrix::new(n, 100, 1, 3, s).unwrap()).collect();
    assert_eq!(matrices[0].schedule().depth(), 1);
    rows.push(("SnrSketch", graph_linearity(&streams, |s| SnrSketch::new(matrices[s as usize].clone(), s_small.clone()).unwrap())));
    rows.push(("ExhaustiveSnr", graph_linearity(&streams, |s| ExhaustiveSnr::new(s_small.clone(), 2, 1, 3, s).unwrap())));
    rows.push(("MosSketch", graph_linearity(&streams, |s| MosSketch::build(n, 8, 2.0, s).unwrap())));
    rows.push(("SparsifySketch", graph_linearity(&streams, |s| SparsifySketch::with_params(small_sparsify, s).unwrap())));
    rows.push(("AmplifiedSparsify", graph_linearity(&streams, |s| AmplifiedSparsify::new(small_sparsify, 2, s).unwrap())));
    rows.push(("ParityStore", graph_linearity(&streams, |_| ParityStore::new(n))));
    rows.push((
        "PipelineSketch",
        graph_linearity(&streams, |s| PipelineSketch::build(PipelineConfig { seed: s, ..pipeline_cfg.clone() }).unwrap()),
    ));

    for (name, f) in &rows {
        info(format!("{name:<22} {f} failures / {}", streams.len()));
    }
    let failures: usize = rows.iter().map(|r| r.1).sum();
    verdict(
        failures == 0,
        format!(
            "{} sketch types × {} streams, {:.0}% deletions, {failures} failures",
            rows.len(),
            streams.len(),
            100.0 * deletions as f64 / total as f64
        ),
    )
}

// ---------------------------------------------------------- sparse recovery

fn decodes_exactly(k: usize, m: u64, q: u64, x: &BTreeMap<u64, u64>, r: &mut ChaCha8Rng) -> bool {
    let mut s = FqSparseRecovery::new(k, m, q).unwrap();
    for (&j, &v) in x {
        s.update_index(j, v);
    }
    // churn that cancels
    for _ in 0..4 {
        let j = r.gen_range(0..m);
        let v = r.gen_range(1..q);
        s.update_index(j, v);
        s.update_index(j, q - v);
    }
    s.decode().map_or(false, |d| d.into_iter().collect::<BTreeMap<_, _>>() == *x)
}

fn sparse_recovery() -> Verdict {
    let mut r = rng(0x20, 0);
    let (q, m) = (3u64, 16u64);
    let mut vectors: Vec<BTreeMap<u64, u64>> = vec![BTreeMap::new()];
    for i in 0..m {
        for v in 1..q {
            vectors.push([(i, v)].into());
            for j in i + 1..m {
                for w in 1..q {
                    vectors.push([(i, v), (j, w)].into());
                }
            }
        }
    }
    let exhaustive = vectors.len();
    let exhaustive_ok = vectors.iter().filter(|x| decodes_exactly(2, m, q, x, &mut r)).count();

    const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 101, 65537];
    let trials = 10_000;
    let mut random_ok = 0;
    for _ in 0..trials {
        let q = *PRIMES.choose(&mut r).unwrap();
        let k = r.gen_range(1..=8usize);
        let m = r.gen_range(k as u64..=4096);
        let support = r.gen_range(0..=k);
        let mut x = BTreeMap::new();
        while x.len() < support {
            x.insert(r.gen_range(0..m), r.gen_range(1..q));
        }
        random_ok += decodes_exactly(k, m, q, &x, &mut r) as usize;
    }
    verdict(
        exhaustive_ok == exhaustive && random_ok == trials,
        format!("exhaustive q=3 m=16 {exhaustive_ok}/{exhaustive}, random k≤8 m≤4096 {random_ok}/{trials}"),
    )
}

// --------------------------------------------------------------- uniformity

const UNIFORM_SAMPLES: u64 = 30_000;

/// p-value of a chi-square goodness-of-fit test against the uniform law.
fn chi_square_p(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

fn uniformity() -> Verdict {
    // L0 over a support of 64 with mixed values
    let domain = 1000u64;
    let support: Vec<u64> = (0..64).map(|i| i * 15 + 7).collect();
    let mut counts = vec![0u64; support.len()];
    let mut l0_fail = 0;
    for seed in 0..UNIFORM_SAMPLES {
        let mut s = L0Sampler::new(domain, 0.01, 1e-9, seed).unwrap();
        for (i, &j) in support.iter().enumerate() {
            s.update_index(j, 1 + (i as i64 % 5));
        }
        s.update_index(3, 4);
        s.update_index(3, -4);
        match s.query() {
            L0Outcome::Sample { index, .. } => counts[support.iter().position(|&j| j == index).expect("sample in support")] += 1,
            _ => l0_fail += 1,
        }
    }
    let l0_p = chi_square_p(&counts);

    // NE-Sampler: S = {0..3}, each of 64 outside neighbours joined to one vertex of S
    let n = 256;
    let s_set = set(n, 0..4);
    let nbrs: Vec<u32> = (0..64).map(|i| 4 + 3 * i).collect();
    let mut counts = vec![0u64; nbrs.len()];
    let mut ne_fail = 0;
    for seed in 0..UNIFORM_SAMPLES {
        let mut s = NESampler::new(s_set.clone(), seed).unwrap();
        let star = nbrs.iter().enumerate().map(|(i, &w)| StreamUpdate::insert(i as u32 % 4, w));
        s.feed(star.chain([StreamUpdate::insert(0, 1), StreamUpdate::insert(200, 201), StreamUpdate::delete(200, 201)]));
        match s.query() {
            NeSample::Edge { outside, .. } => counts[nbrs.iter().position(|&w| w == outside).expect("sample in N(S)")] += 1,
            NeSample::Fail => ne_fail += 1,
        }
    }
    let ne_p = chi_square_p(&counts);
    let fail_rate = ne_fail as f64 / UNIFORM_SAMPLES as f64;
    verdict(
        l0_p > 0.001 && ne_p > 0.001 && fail_rate <= 0.03,
        format!(
            "L0 p={l0_p:.3} (fail {l0_fail}), NE-Sampler p={ne_p:.3}, NE FAIL rate {fail_rate:.4} over {UNIFORM_SAMPLES} seeds"
        ),
    )
}

// ---------------------------------------------------------------- NE-Counter

fn counter() -> Verdict {
    let n = 64;
    let delta = 2f64.powi(-10);
    let s_set = set(n, [0, 1, 2]);
    let t_set = set(n, 10..40);
    let seeds = 100_000u64;
    let mut wrong = 0;
    let mut false_one = 0;
    for seed in 0..seeds {
        let mut r = rng(0x40, seed);
        let build = |inside_t: &[u32], r: &mut ChaCha8Rng| {
            let mut c = NECounter::new(s_set.clone(), t_set.clone(), delta, seed).unwrap();
            // neighbours of S outside T, edges inside S and edges away from S
            for _ in 0..6 {
                c.update(StreamUpdate::insert(r.gen_range(0..3), r.gen_range(40..64)));
            }
            c.update(StreamUpdate::insert(0, 1));
            c.update(StreamUpdate::insert(20, 30));
            for &w in inside_t {
                for s in 0..r.gen_range(1..=3) {
                    c.update(StreamUpdate::insert(s, w));
                }
            }
            let ghost = r.gen_range(10..40);
            c.update(StreamUpdate::insert(2, ghost));
            c.update(StreamUpdate::delete(2, ghost));
            c.query()
        };
        let mut picks: Vec<u32> = (10..40).collect();
        picks.shuffle(&mut r);
        wrong += (build(&[], &mut r) != CounterAnswer::NotOne) as usize;
        wrong += (build(&picks[..1], &mut r) != CounterAnswer::One) as usize;
        false_one += (build(&picks[..2], &mut r) == CounterAnswer::One) as usize;
    }
    let rate = false_one as f64 / seeds as f64;
    verdict(
        wrong == 0 && rate <= 2.0 * delta,
        format!("{wrong} wrong on |N∩T| ∈ {{0,1}} over {seeds} seeds; false-One rate {rate:.5} (bound {:.5})", 2.0 * delta),
    )
}

// ---------------------------------------------------------------- NE-Tester

fn tester() -> Verdict {
    let (n, a, b_tilde) = (4096u32, 32usize, 2usize);
    let s_set = set(n, [0, 1]);
    let t: Vec<u32> = (2..2 + a as u32).collect();
    let seeds = 200u64;
    let log2_cutoff = (200.0 * (n as f64).log2()).ceil() as usize;
    let mut correct = [0usize; 2];
    let mut correct_log2 = [0usize; 2];
    let mut samplers = 0;
    for (side, outside) in [b_tilde, 2 * b_tilde].into_iter().enumerate() {
        for seed in 0..seeds {
            let mut tst = NETester::new(s_set.clone(), a, b_tilde, seed).unwrap();
            samplers = tst.sampler_count();
            let inside = t.iter().enumerate().map(|(i, &w)| StreamUpdate::insert(i as u32 % 2, w));
            let beyond = (0..outside as u32).map(|k| StreamUpdate::insert(k % 2, 1000 + 7 * k));
            tst.feed(inside.chain(beyond));
            let want = if side == 0 { TesterAnswer::Yes } else { TesterAnswer::No };
            let count = tst.outside_count(&t);
            let got = if count <= tester_cutoff(n) { TesterAnswer::Yes } else { TesterAnswer::No };
            if seed == 0 {
                assert_eq!(got, tst.test(&t));
            }
            correct[side] += (got == want) as usize;
            let got_log2 = if count <= log2_cutoff { TesterAnswer::Yes } else { TesterAnswer::No };
            correct_log2[side] += (got_log2 == want) as usize;
        }
    }
    info(format!(
        "cutoff 200·log₂n = {log2_cutoff}: Yes {}/{seeds}, No {}/{seeds}",
        correct_log2[0], correct_log2[1]
    ));
    let need = (0.99 * seeds as f64).ceil() as usize;
    verdict(
        correct.iter().all(|&c| c >= need),
        format!(
            "n={n} a={a} b̃={b_tilde}, {samplers} samplers, cutoff {}: Yes {}/{seeds}, No {}/{seeds}",
            tester_cutoff(n),
            correct[0],
            correct[1]
        ),
    )
}

// ---------------------------------------------------------------------- SNR

struct SnrInstance {
    set: Arc<VertexSet>,
    t: Vec<u32>,
    updates: Vec<StreamUpdate>,
    outside: Vec<u32>,
    /// x(G, S) reduced mod q.
    x: BTreeMap<u64, u64>,
}

/// |S| = 8, |T| = a, |N(S) − T| = b, outside neighbours with 1..c−1 edges into S.
fn snr_instance(n: u32, a: usize, b: usize, c: u64, seed: u64) -> SnrInstance {
    let mut r = rng(0x60, seed);
    let s_size = 8u32;
    let set = set(n, 0..s_size);
    let mut others: Vec<u32> = (s_size..n).collect();
    others.shuffle(&mut r);
    let t: Vec<u32> = others[..a].to_vec();
    let mut outside: Vec<u32> = others[a..a + b].to_vec();
    outside.sort_unstable();
    let q = dynmatch::algebra::smallest_prime_gt(c);
    let mut updates = Vec::new();
    let mut x = BTreeMap::new();
    for (i, &w) in t.iter().chain(&outside).enumerate() {
        let deg = if i < a { r.gen_range(0..=3) } else { r.gen_range(1..c) };
        let mut nbrs: Vec<u32> = (0..s_size).collect();
        nbrs.shuffle(&mut r);
        for &u in &nbrs[..deg as usize] {
            updates.push(StreamUpdate::insert(u, w));
        }
        if deg % q != 0 {
            x.insert(w as u64, deg % q);
        }
    }
    for _ in 0..30 {
        let (u, w) = (r.gen_range(0..s_size), others[r.gen_range(a + b..others.len())]);
        updates.push(StreamUpdate::insert(u, w));
        updates.push(StreamUpdate::delete(u, w));
    }
    updates.shuffle(&mut r);
    SnrInstance { set, t, updates, outside, x }
}

fn schedule_invariants() -> Result<usize, String> {
    let mut checked = 0;
    for n in [64u32, 1024, 4096, 1 << 16, 1 << 20] {
        for a in [16usize, 100, 400, 1024, 2048, 10_000, 65_536] {
            for b in [1usize, 2, 4, 20, 64] {
                let s = Schedule::new(n, a, b).map_err(|e| e.to_string())?;
                let first = match s.levels().first() {
                    Some(l) => *l,
                    None => continue,
                };
                if first.b != b as f64 {
                    return Err(format!("b_1 ≠ b at ({n}, {a}, {b})"));
                }
                for (j, l) in s.levels().iter().enumerate() {
                    if l.a != a as f64 / 4f64.powi(j as i32) {
                        return Err(format!("a_{} wrong at ({n}, {a}, {b})", j + 1));
                    }
                    if l.gamma != FIRST_GAMMA / 2f64.powi(j as i32) {
                        return Err(format!("γ_{} wrong at ({n}, {a}, {b})", j + 1));
                    }
                    if l.b > std::f64::consts::E.powi(2) * b as f64 {
                        return Err(format!("b_{} > e²·b at ({n}, {a}, {b})", j + 1));
                    }
                    if l.a < 100.0 * l.b {
                        return Err(format!("level {} outside a ≥ 100b at ({n}, {a}, {b})", j + 1));
                    }
                }
                if s.depth() > s.max_depth() {
                    return Err(format!("depth {} > {} at ({n}, {a}, {b})", s.depth(), s.max_depth()));
                }
                let last = s.levels().last().unwrap();
                if s.final_sparsity() != (last.a + last.b).ceil() as usize {
                    return Err(format!("final sparsity wrong at ({n}, {a}, {b})"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

fn snr() -> Verdict {
    let configs = [(1024u32, 400usize, 4usize, 3u64, 500u64), (2048, 1024, 1, 2, 400), (4096, 2048, 20, 4, 100)];
    let mut runs = 0;
    let mut exact = 0;
    let mut traced_ok = 0;
    for &(n, a, b, c, count) in &configs {
        let (mut e, mut tr) = (0, 0);
        for seed in 0..count {
            let inst = snr_instance(n, a, b, c, seed);
            let mut s = SnrSketch::standalone(inst.set.clone(), a, b, c, seed).unwrap();
            assert!(s.matrix().schedule().depth() >= 1);
            s.feed(inst.updates.iter().copied());
            let (out, trace) = s.recover_traced(&inst.t);
            e += (out.as_ref().ok() == Some(&inst.outside)) as usize;
            let levels = s.matrix().schedule().levels();
            let holds = trace.iter().zip(levels).all(|(lt, l)| {
                let outside_t = inst
                    .x
                    .keys()
                    .chain(lt.y.keys())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .filter(|&&i| {
                        let xv = inst.x.get(&i).copied().unwrap_or(0);
                        let yv = lt.y.get(&i).copied().unwrap_or(0);
                        xv != yv && !lt.t.contains(&i)
                    })
                    .count();
                lt.t.len() as f64 <= l.a && outside_t as f64 <= l.b
            });
            tr += holds as usize;
        }
        info(format!("(n={n}, a={a}, b={b}, c={c}): exact {e}/{count}, level invariants {tr}/{count}"));
        runs += count as usize;
        exact += e;
        traced_ok += tr;
    }

    // tiny scale against the exhaustive decoder
    let (n, a, b, c) = (24u32, 12usize, 2usize, 3u64);
    let (mut both, mut agree, mut only_fast, mut only_slow) = (0, 0, 0, 0);
    for seed in 0..300u64 {
        let mut r = rng(0x61, seed);
        let s_set = set(n, [0, 1]);
        let mut others: Vec<u32> = (2..n).collect();
        others.shuffle(&mut r);
        let t_len = r.gen_range(0..=a);
        let out_len = r.gen_range(0..=b);
        let t = others[..t_len].to_vec();
        let mut ups = Vec::new();
        for (i, &w) in others[..t_len + out_len].iter().enumerate() {
            let deg = if i < t_len { r.gen_range(0..=2) } else { r.gen_range(1..c as u32) };
            for u in 0..deg {
                ups.push(StreamUpdate::insert(u, w));
            }
        }
        let mut fast = SnrSketch::standalone(s_set.clone(), a, b, c, seed).unwrap();
        let mut slow = ExhaustiveSnr::new(s_set, a, b, c, seed).unwrap();
        fast.feed(ups.iter().copied());
        slow.feed(ups.iter().copied());
        match (fast.recover(&t), slow.recover(&t, 1 << 24)) {
            (Ok(x), Ok(y)) => {
                both += 1;
                agree += (x == y) as usize;
            }
            (Ok(_), Err(_)) => only_fast += 1,
            (Err(_), Ok(_)) => only_slow += 1,
            _ => {}
        }
    }
    info(format!("n={n}: {agree}/{both} agree, fast-only {only_fast}, exhaustive-only {only_slow}"));

    let schedule = schedule_invariants();
    if let Err(e) = &schedule {
        info(format!("schedule: {e}"));
    }
    // The per-level bounds hold with probability 1 − 2e^(−γ_j·b_j), which is
    // vacuous at small b, so they are reported rather than required.
    info(format!("per-level |T_j| ≤ a_j and residual ≤ b_j in {traced_ok}/{runs} runs"));
    let exact_rate = exact as f64 / runs as f64;
    verdict(
        exact_rate >= 0.99 && both > 0 && agree == both && schedule.is_ok(),
        format!(
            "exact {exact}/{runs} ({:.1}%), tiny agreement {agree}/{both}, schedules checked {}",
            100.0 * exact_rate,
            schedule.unwrap_or(0)
        ),
    )
}

// ----------------------------------------------------------- SNR efficiency

fn snr_efficiency() -> Verdict {
    let (n, a, b, c) = (4096u32, 2048usize, 20usize, 4u64);
    let s = SnrSketch::standalone(set(n, [0]), a, b, c, 1).unwrap();
    let measured = s.meter();
    let (nominal_sketch, _) = SnrMatrix::nominal_bits(n, a, b, c).unwrap();
    assert_eq!(measured.sketch_bits, nominal_sketch);
    let shape = a as f64 * (c as f64).log2() + b as f64 * (n as f64).log2() * (c as f64).log2();
    let constant = measured.sketch_bits as f64 / shape;
    let l0 = L0Params::new(n as u64, 0.01, (n as f64).powi(-10)).unwrap();
    let battery = (a + b) as u64 * l0.sketch_bits();
    let ratio = measured.sketch_bits as f64 / battery as f64;
    info(format!(
        "per copy: {} sketch bits (+{} shared randomness); battery of {} L0 samplers: {battery} bits",
        measured.sketch_bits,
        measured.total_randomness(),
        a + b
    ));
    let bound = SNR_CONSTANT * 1.05;
    verdict(
        constant <= bound && ratio <= 0.2,
        format!("bits/(a·log₂c + b·log₂n·log₂c) = {constant:.2} (frozen {SNR_CONSTANT:.2}, +5% {bound:.2}); ratio to battery {ratio:.4}"),
    )
}

// ------------------------------------------------------------------------ MOS

fn mos_disjunction() -> Verdict {
    let (n, mu, alpha) = (4096u32, 2048u32, 4.0);
    let seeds = 50u64;
    let knobs = MosKnobs::default();
    let (mut holds, mut match_case, mut sparse_case) = (0, 0, 0);
    let mut sizes = Vec::new();
    for seed in 0..seeds {
        let inst = InstanceSpec { family: Family::PlantedMatching { mu }, n, deletion_fraction: 0.3, seed }.generate().unwrap();
        let g = net_graph(n, &inst.stream.updates);
        let mut s = MosSketch::build(n, mu as u64, alpha, seed).unwrap();
        s.feed(inst.stream.updates.iter().copied());
        let m = s.recover().matching;
        let d = check_disjunction(&g, &m, mu as u64, alpha, &knobs);
        holds += d.holds() as usize;
        match_case += d.match_case as usize;
        sparse_case += d.sparsify_case as usize;
        sizes.push(m.len());
    }
    info(format!(
        "|M_easy| in [{}, {}], match threshold {:.0}",
        sizes.iter().min().unwrap(),
        sizes.iter().max().unwrap(),
        knobs.match_threshold(mu as u64, alpha)
    ));
    verdict(
        holds as f64 >= 0.9 * seeds as f64,
        format!("holds {holds}/{seeds} (match case {match_case}, sparsify case {sparse_case})"),
    )
}

// ---------------------------------------------------------------- end to end

fn families(n: u32, alpha: f64) -> [(&'static str, Family); 2] {
    [
        ("planted_matching", Family::PlantedMatching { mu: n / 4 }),
        ("hard_sparse_induced", Family::HardSparseInduced { alpha, noise: DEFAULT_NOISE }),
    ]
}

struct CellStats {
    runs: usize,
    invalid: usize,
    fabricated: usize,
    meets: usize,
}

fn run_cell(family: Family, n: u32, alpha: f64, seeds: u64, fallback: Fallback) -> CellStats {
    let mut st = CellStats { runs: 0, invalid: 0, fabricated: 0, meets: 0 };
    for seed in 0..seeds {
        let inst = InstanceSpec { family, n, deletion_fraction: 0.2, seed }.generate().unwrap();
        let cfg = PipelineConfig { seed, small_alpha_threshold: 2.0, fallback, ..PipelineConfig::new(n, alpha) };
        let rep = run(&inst.stream, cfg, false).unwrap();
        st.runs += 1;
        st.invalid += !rep.validation.vertex_disjoint as usize;
        st.fabricated += rep.validation.fabricated_edges.len();
        st.meets += (rep.meets_alpha == Some(true)) as usize;
    }
    st
}

fn end_to_end() -> Verdict {
    let seeds = 50;
    let (mut invalid, mut fabricated, mut cells, mut good_cells) = (0, 0, 0, 0);
    let mut worst = 1.0f64;
    for n in [1024u32, 2048, 4096] {
        for alpha in [2.0, 4.0, 8.0] {
            for (name, family) in families(n, alpha) {
                let st = run_cell(family, n, alpha, seeds, Fallback::ParityStore);
                let rate = st.meets as f64 / st.runs as f64;
                info(format!("{name:<20} n={n:<5} α={alpha}: meets μ/α {}/{}", st.meets, st.runs));
                invalid += st.invalid;
                fabricated += st.fabricated;
                cells += 1;
                good_cells += (rate >= 0.9) as usize;
                worst = worst.min(rate);
            }
        }
    }
    // sketch-only path, for information
    for alpha in [4.0, 8.0] {
        for (name, family) in families(1024, alpha) {
            let st = run_cell(family, 1024, alpha, 10, Fallback::BestEffortMos);
            info(format!(
                "best_effort_mos {name} n=1024 α={alpha}: meets {}/{}, invalid {}, fabricated {}",
                st.meets, st.runs, st.invalid, st.fabricated
            ));
            invalid += st.invalid;
            fabricated += st.fabricated;
        }
    }
    verdict(
        invalid == 0 && fabricated == 0 && good_cells == cells,
        format!("{good_cells}/{cells} cells ≥ 90% (worst {:.0}%), {invalid} invalid, {fabricated} fabricated edges", 100.0 * worst),
    )
}

// ------------------------------------------------------------- space scaling

struct Scaling {
    top_doubling: Vec<f64>,
    alpha_halving: Vec<f64>,
    overhead: Vec<f64>,
}

fn scaling_at(n: u32, delta: f64) -> Scaling {
    let alphas = [2.0, 4.0, 8.0];
    let profiles: Vec<Vec<(u64, u64)>> = alphas.iter().map(|&a| sketch_bits_profile(n, a, delta).unwrap()).collect();
    let top = |p: &Vec<(u64, u64)>| p.last().unwrap().1 as f64;
    Scaling {
        top_doubling: profiles.iter().map(|p| top(p) / p[p.len() - 2].1 as f64).collect(),
        alpha_halving: profiles.windows(2).map(|w| top(&w[0]) / top(&w[1])).collect(),
        overhead: profiles.iter().map(|p| p.iter().map(|g| g.1 as f64).sum::<f64>() / top(p)).collect(),
    }
}

fn fmt(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join("/")
}

fn space_scaling() -> Verdict {
    let small = scaling_at(4096, 0.5);
    info(format!(
        "n=4096: opt doubling {}, α doubling {}, overhead {}",
        fmt(&small.top_doubling),
        fmt(&small.alpha_halving),
        fmt(&small.overhead)
    ));
    let s = scaling_at(32768, 0.5);
    let pass = s.top_doubling.iter().all(|&r| (3.0..=5.0).contains(&r))
        && s.alpha_halving.iter().all(|&r| (5.6..=10.4).contains(&r))
        && s.overhead.iter().all(|&r| r <= 4.0 / 3.0 + 0.1 * 4.0 / 3.0);
    verdict(
        pass,
        format!(
            "n=32768, α ∈ 2/4/8: opt doubling {}, α doubling {}, overhead {}",
            fmt(&s.top_doubling),
            fmt(&s.alpha_halving),
            fmt(&s.overhead)
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("linearity", linearity),
        ("sparse recovery exactness", sparse_recovery),
        ("sampler uniformity", uniformity),
        ("NE-Counter one-sidedness", counter),
        ("NE-Tester promise", tester),
        ("SNR oracle equivalence", snr),
        ("SNR efficiency", snr_efficiency),
        ("match-or-sparsify disjunction", mos_disjunction),
        ("end-to-end matching", end_to_end),
        ("space scaling", space_scaling),
    ];
    let only: Option<Vec<usize>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut unexpected = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let v = f();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{id:>2}] {name}: {} ({:.1}s)", v.detail, start.elapsed().as_secs_f64());
        if !v.pass && !KNOWN_UNATTAINABLE.contains(&id) {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}
