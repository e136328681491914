//! The full single-pass matching algorithm: one MOS + sparsify pair per
//! guess of the matching size, fallbacks for guesses whose parameters are
//! out of regime, and selection of the largest matching found.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::matching::{max_matching, Graph, Matching};
use crate::mos::{MosKnobs, MosParams, MosSketch};
use crate::sparsify::{SparsifyParams, SparsifySketch};
use crate::stream::{edge_from_index, edge_index, pair_count, BitMeter, LinearSketch, StreamUpdate};
use crate::{ceil_log2, derive_seed};

const TAG_MOS: u64 = 0xA0;
const TAG_SPARSIFY: u64 = 0xA1;

/// Success fraction of the per-guess algorithms; guesses run with β = α/(2η).
pub const ETA: f64 = 1.0 / 8.0;

/// Version of the JSON report layout.
pub const REPORT_SCHEMA: u32 = 1;

/// What to do with a guess whose parameters are outside the analysed regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    /// Keep the whole graph mod 2 and match it exactly, if it fits the budget.
    ParityStore,
    /// Run the MOS sketch alone and keep its greedy matching.
    BestEffortMos,
    /// Reject the configuration.
    Error,
}

impl FromStr for Fallback {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "parity_store" => Ok(Fallback::ParityStore),
            "best_effort_mos" => Ok(Fallback::BestEffortMos),
            "error" => Ok(Fallback::Error),
            other => Err(Error::Config(format!("unknown fallback policy {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub n: u32,
    pub alpha: f64,
    pub delta: f64,
    pub seed: u64,
    pub knobs: MosKnobs,
    pub fallback: Fallback,
    /// At or below this α a parity store replaces every sketch.
    pub small_alpha_threshold: f64,
    /// Space allowed for a parity store; `None` means unlimited.
    pub budget_bits: Option<u64>,
    pub per_guess_report: bool,
}

impl PipelineConfig {
    pub fn new(n: u32, alpha: f64) -> Self {
        PipelineConfig {
            n,
            alpha,
            delta: 0.5,
            seed: 0,
            knobs: MosKnobs::default(),
            fallback: Fallback::ParityStore,
            small_alpha_threshold: 100.0,
            budget_bits: None,
            per_guess_report: true,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n < 2 {
            return Err(Error::Config(format!("n must be at least 2 (got {})", self.n)));
        }
        if !(self.alpha > 1.0) {
            return Err(Error::Config(format!("α must exceed 1 (got {})", self.alpha)));
        }
        if !(self.delta > 0.0 && self.delta <= 0.5) {
            return Err(Error::Config(format!("δ must lie in (0, 1/2] (got {})", self.delta)));
        }
        Ok(())
    }

    /// Approximation factor handed to each guess.
    pub fn beta(&self) -> f64 {
        self.alpha / (2.0 * ETA)
    }
}

/// Guesses 1, 2, 4, …, 2^⌈log₂ n⌉.
pub fn guesses(n: u32) -> Vec<u64> {
    (0..=ceil_log2(n as u64)).map(|i| 1u64 << i).collect()
}

/// Whether a guess satisfies every parameter assumption of the sketches.
pub fn guess_in_regime(n: u32, opt: u64, beta: f64, delta: f64) -> bool {
    let mos_ok = MosParams::new(n, opt, beta).map(|p| p.in_regime(delta)).unwrap_or(false);
    let sparsify_ok = SparsifyParams::formulas(n, opt, beta, delta).and_then(|p| p.check_promises()).is_ok();
    mos_ok && sparsify_ok && beta > 100.0
}

/// Nominal MOS + sparsify bits of each guess, whether or not it would be built.
pub fn sketch_bits_profile(n: u32, alpha: f64, delta: f64) -> Result<Vec<(u64, u64)>, Error> {
    let beta = alpha / (2.0 * ETA);
    guesses(n)
        .into_iter()
        .map(|o| {
            let mos = MosParams::new(n, o, beta)?.nominal_meter()?;
            let sp = SparsifyParams::formulas(n, o, beta, delta)?.nominal_meter()?;
            Ok((o, (mos + sp).total()))
        })
        .collect()
}

/// Every vertex pair's multiplicity mod 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityStore {
    n: u32,
    words: Vec<u64>,
}

impl ParityStore {
    pub fn new(n: u32) -> Self {
        ParityStore { n, words: vec![0; pair_count(n).div_ceil(64) as usize] }
    }

    pub fn bits(n: u32) -> u64 {
        pair_count(n)
    }

    pub fn graph(&self) -> Graph {
        let mut edges = Vec::new();
        for (w, &word) in self.words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let j = w as u64 * 64 + bits.trailing_zeros() as u64;
                bits &= bits - 1;
                edges.push(edge_from_index(j, self.n).expect("stored index"));
            }
        }
        Graph::from_edges(self.n as usize, edges)
    }

    pub fn recover(&self) -> Matching {
        max_matching(&self.graph())
    }
}

impl LinearSketch for ParityStore {
    fn update(&mut self, up: StreamUpdate) {
        if up.delta % 2 != 0 {
            let j = edge_index(up.u, up.v, self.n).expect("valid edge");
            self.words[(j / 64) as usize] ^= 1 << (j % 64);
        }
    }

    fn merge(&mut self, other: &Self) -> Result<(), Error> {
        if self.n != other.n {
            return Err(Error::MergeMismatch);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    fn meter(&self) -> BitMeter {
        BitMeter::new(Self::bits(self.n), 0)
    }
}

/// How a guess is served.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// MOS + sparsify, parameters in regime.
    Sketch,
    /// MOS alone.
    MosOnly,
    /// Delegated to the shared parity store.
    ParityStore,
}

#[derive(Clone, Debug, PartialEq)]
struct Guess {
    opt: u64,
    in_regime: bool,
    route: Route,
    mos: Option<MosSketch>,
    sparsify: Option<SparsifySketch>,
}

impl Guess {
    fn meter(&self) -> BitMeter {
        let mut m = BitMeter::default();
        if let Some(s) = &self.mos {
            m += &s.meter();
        }
        if let Some(s) = &self.sparsify {
            m += &s.meter();
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeFlags {
    /// α ≤ n^{1/2 − δ}.
    pub alpha_in_range: bool,
    /// α is below the constant 100 the analysis assumes.
    pub alpha_below_constant: bool,
    /// The small-α branch replaced all sketches by a parity store.
    pub small_alpha_branch: bool,
    pub small_alpha_threshold: f64,
    pub guesses_in_regime: usize,
    pub guesses_total: usize,
    pub fallback: Fallback,
    /// The parity store was wanted but exceeded the budget.
    pub parity_over_budget: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuessReport {
    pub opt: u64,
    pub route: Route,
    pub in_regime: bool,
    pub bits: u64,
    pub matching_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BitsReport {
    pub total: u64,
    pub sketch: u64,
    pub randomness: u64,
    pub parity_store: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_guess: Vec<GuessReport>,
}

/// Which part of the pipeline produced the output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Guess,
    ParityStore,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingReport {
    pub schema: u32,
    pub n: u32,
    pub alpha: f64,
    pub delta: f64,
    pub seed: u64,
    pub matching: Vec<[u32; 2]>,
    pub bits: BitsReport,
    pub winning_opt: Option<u64>,
    pub winner: Winner,
    pub regime_flags: RegimeFlags,
}

impl MatchingReport {
    pub fn edges(&self) -> Vec<(u32, u32)> {
        self.matching.iter().map(|e| (e[0], e[1])).collect()
    }
}

/// Every per-guess sketch plus the optional parity store.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineSketch {
    cfg: PipelineConfig,
    guesses: Vec<Guess>,
    parity: Option<ParityStore>,
    flags: RegimeFlags,
}

impl PipelineSketch {
    pub fn build(cfg: PipelineConfig) -> Result<Self, Error> {
        cfg.validate()?;
        let n = cfg.n;
        let parity_fits = cfg.budget_bits.map_or(true, |b| ParityStore::bits(n) <= b);
        let mut flags = RegimeFlags {
            alpha_in_range: cfg.alpha <= (n as f64).powf(0.5 - cfg.delta),
            alpha_below_constant: cfg.alpha <= 100.0,
            small_alpha_branch: cfg.alpha <= cfg.small_alpha_threshold,
            small_alpha_threshold: cfg.small_alpha_threshold,
            guesses_in_regime: 0,
            guesses_total: 0,
            fallback: cfg.fallback,
            parity_over_budget: false,
        };
        if flags.small_alpha_branch {
            return Ok(PipelineSketch { cfg, guesses: Vec::new(), parity: Some(ParityStore::new(n)), flags });
        }
        let beta = cfg.beta();
        let mut out = Vec::new();
        let mut need_parity = false;
        for (g, opt) in guesses(n).into_iter().enumerate() {
            let in_regime = guess_in_regime(n, opt, beta, cfg.delta);
            let route = if in_regime {
                Route::Sketch
            } else {
                match cfg.fallback {
                    Fallback::Error => {
                        return Err(Error::PromiseRegimeUnreachable(format!(
                            "guess opt = {opt} with β = {beta} at n = {n} is outside the sketches' regime"
                        )))
                    }
                    Fallback::BestEffortMos => Route::MosOnly,
                    Fallback::ParityStore if parity_fits => Route::ParityStore,
                    Fallback::ParityStore => {
                        flags.parity_over_budget = true;
                        Route::MosOnly
                    }
                }
            };
            flags.guesses_in_regime += in_regime as usize;
            need_parity |= route == Route::ParityStore;
            let seed = cfg.seed;
            let mos = match route {
                Route::ParityStore => None,
                _ => Some(MosSketch::build(n, opt, beta, derive_seed(seed, TAG_MOS, g as u64))?),
            };
            let sparsify = match route {
                Route::Sketch => Some(SparsifySketch::build(n, opt, beta, cfg.delta, derive_seed(seed, TAG_SPARSIFY, g as u64))?),
                _ => None,
            };
            out.push(Guess { opt, in_regime, route, mos, sparsify });
        }
        flags.guesses_total = out.len();
        let parity = need_parity.then(|| ParityStore::new(n));
        Ok(PipelineSketch { cfg, guesses: out, parity, flags })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn flags(&self) -> &RegimeFlags {
        &self.flags
    }

    pub fn recover(&self) -> MatchingReport {
        let beta = self.cfg.beta();
        let mut best: Option<(Matching, Winner, Option<u64>)> = None;
        let mut consider = |m: Matching, w: Winner, o: Option<u64>| {
            if best.as_ref().map_or(true, |(b, _, _)| m.len() > b.len()) {
                best = Some((m, w, o));
            }
        };
        let mut per_guess = Vec::new();
        for g in &self.guesses {
            let mut size = 0;
            if let Some(mos) = &g.mos {
                let m_easy = mos.recover().matching;
                let mut m = m_easy.clone();
                if (m_easy.len() as f64) < self.cfg.knobs.match_threshold(g.opt, beta) {
                    if let Some(sp) = &g.sparsify {
                        let hard = sp.recover(&m_easy).matching;
                        if hard.len() > m.len() {
                            m = hard;
                        }
                    }
                }
                size = m.len();
                consider(m, Winner::Guess, Some(g.opt));
            }
            per_guess.push(GuessReport { opt: g.opt, route: g.route, in_regime: g.in_regime, bits: g.meter().total(), matching_size: size });
        }
        if let Some(p) = &self.parity {
            consider(p.recover(), Winner::ParityStore, None);
        }
        let (matching, winner, winning_opt) = best.unwrap_or((Matching::default(), Winner::None, None));
        let (winner, winning_opt) = if matching.is_empty() { (Winner::None, None) } else { (winner, winning_opt) };

        let meter = self.meter();
        let bits = BitsReport {
            total: meter.total(),
            sketch: meter.sketch_bits,
            randomness: meter.total_randomness(),
            parity_store: self.parity.as_ref().map_or(0, |p| p.meter().total()),
            per_guess: if self.cfg.per_guess_report { per_guess } else { Vec::new() },
        };
        MatchingReport {
            schema: REPORT_SCHEMA,
            n: self.cfg.n,
            alpha: self.cfg.alpha,
            delta: self.cfg.delta,
            seed: self.cfg.seed,
            matching: matching.edges().iter().map(|&(u, v)| [u, v]).collect(),
            bits,
            winning_opt,
            winner,
            regime_flags: self.flags.clone(),
        }
    }
}

impl LinearSketch for PipelineSketch {
    fn update(&mut self, up: StreamUpdate) {
        for g in &mut self.guesses {
            if let Some(s) = &mut g.mos {
                s.update(up);
            }
            if let Some(s) = &mut g.sparsify {
                s.update(up);
            }
        }
        if let Some(p) = &mut self.parity {
            p.update(up);
        }
    }

    fn merge(&mut self, other: &Self) -> Result<(), Error> {
        if self.cfg != other.cfg {
            return Err(Error::MergeMismatch);
        }
        for (a, b) in self.guesses.iter_mut().zip(&other.guesses) {
            if let (Some(x), Some(y)) = (&mut a.mos, &b.mos) {
                x.merge(y)?;
            }
            if let (Some(x), Some(y)) = (&mut a.sparsify, &b.sparsify) {
                x.merge(y)?;
            }
        }
        if let (Some(x), Some(y)) = (&mut self.parity, &other.parity) {
            x.merge(y)?;
        }
        Ok(())
    }

    fn meter(&self) -> BitMeter {
        let mut m: BitMeter = self.guesses.iter().map(Guess::meter).sum();
        if let Some(p) = &self.parity {
            m += &p.meter();
        }
        m
    }
}
