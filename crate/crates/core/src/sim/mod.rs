//! Monte-Carlo experiments: sampling, decoding, outcome classes and statistics.
//!
//! Every block draws its error and its feedback randomness from its own
//! stream keyed by the master seed, the channel parameter and the block
//! index, so results do not depend on the number of worker threads. All
//! strategies see the same error sequence for a given seed and `p`.

pub mod codes;
mod output;

pub use output::{write_block_log, write_csv, write_trajectory, CSV_HEADER};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bp::{BpDecoder, DecodeOutcome};
use crate::channel::{rng_stream, DepolarizingChannel, Dist4};
use crate::feedback::{default_n_a, feedback_decode, FeedbackConfig, FeedbackSession, Strategy};
use crate::gf4::Gf4;
use crate::stabilizer::{PauliString, StabilizerCode, StabilizerError, SymplecticBasis, Syndrome};

const DOMAIN_ERROR: u64 = 1;
const DOMAIN_FEEDBACK: u64 = 2;

/// Degeneracy is checked only for codes with fewer columns than this.
pub const DEGENERACY_LIMIT: usize = 10_000;

/// z for a two-sided 95% interval.
const Z95: f64 = 1.959963984540054;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeClass {
    Exact,
    Degenerate,
    Nonequivalent,
    Detected,
    /// Converged with `e_out ≠ E` on a code too wide for the membership test.
    Unchecked,
}

impl OutcomeClass {
    pub fn name(self) -> &'static str {
        match self {
            OutcomeClass::Exact => "exact",
            OutcomeClass::Degenerate => "degenerate",
            OutcomeClass::Nonequivalent => "nonequivalent",
            OutcomeClass::Detected => "detected",
            OutcomeClass::Unchecked => "unchecked",
        }
    }
}

/// Classifies a decoder output against the true error. `group` is the
/// stabilizer group basis, `None` to skip the membership test.
pub fn classify_outcome(
    group: Option<&SymplecticBasis>,
    error: &PauliString,
    e_out: &PauliString,
    converged: bool,
) -> Result<OutcomeClass, StabilizerError> {
    if !converged {
        return Ok(OutcomeClass::Detected);
    }
    if e_out == error {
        return Ok(OutcomeClass::Exact);
    }
    let residual = e_out.product(error)?;
    Ok(match group {
        Some(g) if g.contains(&residual) => OutcomeClass::Degenerate,
        Some(_) => OutcomeClass::Nonequivalent,
        None => OutcomeClass::Unchecked,
    })
}

/// [`classify_outcome`] against a code, with the width limit applied.
pub fn classify_for_code(
    code: &StabilizerCode,
    error: &PauliString,
    outcome: &DecodeOutcome,
) -> Result<OutcomeClass, StabilizerError> {
    let group = (code.n_total() < DEGENERACY_LIMIT).then(|| code.group_basis());
    classify_outcome(
        group.as_ref(),
        &code.full_width(error)?,
        &outcome.e_out,
        outcome.converged,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub ps: Vec<f64>,
    pub strategies: Vec<Strategy>,
    pub max_iter: usize,
    pub t_pert: usize,
    /// `None` picks [`default_n_a`] from the code length.
    pub n_a: Option<usize>,
    pub delta: f64,
    pub blocks: usize,
    pub seed: u64,
    /// Worker threads, `None` for rayon's default.
    pub threads: Option<usize>,
    /// Decode this error in every block instead of sampling.
    pub injected_error: Option<PauliString>,
    /// Keep per-block errors and outputs in the result.
    pub keep_blocks: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            ps: vec![0.01],
            strategies: vec![Strategy::Standard],
            max_iter: FeedbackConfig::DEFAULT_MAX_ITER,
            t_pert: FeedbackConfig::DEFAULT_T_PERT,
            n_a: None,
            delta: FeedbackConfig::DEFAULT_DELTA,
            blocks: 1000,
            seed: 1,
            threads: None,
            injected_error: None,
            keep_blocks: false,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self, code: &StabilizerCode) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidSpec(m));
        if self.blocks == 0 {
            return bad("block count must be at least 1".into());
        }
        if self.ps.is_empty() {
            return bad("no channel parameters".into());
        }
        if let Some(p) = self.ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return bad(format!("p = {p} outside [0, 1]"));
        }
        if self.strategies.is_empty() {
            return bad("no strategies".into());
        }
        if self.threads == Some(0) {
            return bad("thread count must be at least 1".into());
        }
        if let Some(e) = &self.injected_error {
            code.full_width(e)?;
        }
        for &s in &self.strategies {
            self.feedback_config(s, code.n_sent())
                .validate()
                .map_err(|e| SimError::InvalidSpec(e.to_string()))?;
        }
        Ok(())
    }

    pub fn feedback_config(&self, strategy: Strategy, n: usize) -> FeedbackConfig {
        FeedbackConfig {
            strategy,
            max_iter: self.max_iter,
            t_pert: self.t_pert,
            n_a: self.n_a.unwrap_or_else(|| default_n_a(n)),
            delta: self.delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockResult {
    pub p: f64,
    pub strategy: Strategy,
    pub block: usize,
    /// Sampled error and decoder output, kept only on request.
    pub error: Option<PauliString>,
    pub e_out: Option<PauliString>,
    pub converged: bool,
    pub initial_converged: bool,
    pub iterations: usize,
    pub adjustments: usize,
    pub class: OutcomeClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub p: f64,
    pub strategy: Strategy,
    pub seed: u64,
    pub n_blocks: usize,
    pub exact: usize,
    pub degenerate: usize,
    pub nonequivalent: usize,
    pub detected: usize,
    pub unchecked: usize,
    pub total_iterations: u64,
}

impl Stats {
    pub fn new(p: f64, strategy: Strategy, seed: u64) -> Self {
        Stats {
            p,
            strategy,
            seed,
            n_blocks: 0,
            exact: 0,
            degenerate: 0,
            nonequivalent: 0,
            detected: 0,
            unchecked: 0,
            total_iterations: 0,
        }
    }

    pub fn record(&mut self, class: OutcomeClass, iterations: usize) {
        self.n_blocks += 1;
        self.total_iterations += iterations as u64;
        match class {
            OutcomeClass::Exact => self.exact += 1,
            OutcomeClass::Degenerate => self.degenerate += 1,
            OutcomeClass::Nonequivalent => self.nonequivalent += 1,
            OutcomeClass::Detected => self.detected += 1,
            OutcomeClass::Unchecked => self.unchecked += 1,
        }
    }

    /// Blocks with `e_out ≠ E`.
    pub fn errors_strict(&self) -> usize {
        self.n_blocks - self.exact
    }

    pub fn ber(&self) -> f64 {
        if self.n_blocks == 0 {
            return 0.0;
        }
        self.errors_strict() as f64 / self.n_blocks as f64
    }

    /// 95% Wilson interval for the block error rate.
    pub fn ber_interval(&self) -> (f64, f64) {
        wilson_interval(self.errors_strict(), self.n_blocks, Z95)
    }

    pub fn anoi(&self) -> f64 {
        if self.n_blocks == 0 {
            return 0.0;
        }
        self.total_iterations as f64 / self.n_blocks as f64
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let phat = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if k as f64 == n {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    /// One entry per `(p, strategy)`, `p` outermost.
    pub stats: Vec<Stats>,
    /// Blocks in the same order; empty unless `keep_blocks`.
    pub blocks: Vec<BlockResult>,
}

struct Context<'a> {
    code: &'a StabilizerCode,
    decoder: BpDecoder,
    group: Option<SymplecticBasis>,
    spec: &'a ExperimentSpec,
}

impl Context<'_> {
    fn run_block(
        &self,
        p: f64,
        strategy: Strategy,
        block: usize,
    ) -> Result<BlockResult, StabilizerError> {
        let channel = DepolarizingChannel::new(p).expect("validated");
        let key = p.to_bits();
        let error = match &self.spec.injected_error {
            Some(e) => self.code.full_width(e)?,
            None => {
                let mut rng = rng_stream(self.spec.seed, DOMAIN_ERROR, key, block as u64);
                channel.sample_error(self.code.n_sent(), self.code.n_ebits(), &mut rng)
            }
        };
        let syndrome = self.code.syndrome(&error)?;
        let priors = channel.priors(self.code.n_sent());
        let config = self.spec.feedback_config(strategy, self.code.n_sent());
        let mut rng = rng_stream(
            self.spec.seed,
            DOMAIN_FEEDBACK + strategy as u64,
            key,
            block as u64,
        );
        let out = feedback_decode(
            &self.decoder,
            &syndrome,
            &priors,
            channel.p_identity(),
            config,
            &mut rng,
        );
        let class = classify_outcome(
            self.group.as_ref(),
            &error,
            &out.outcome.e_out,
            out.outcome.converged,
        )?;
        let keep = self.spec.keep_blocks;
        Ok(BlockResult {
            p,
            strategy,
            block,
            converged: out.outcome.converged,
            initial_converged: out.initial_converged,
            iterations: out.outcome.iterations,
            adjustments: out.adjustments.len(),
            class,
            error: keep.then_some(error),
            e_out: keep.then_some(out.outcome.e_out),
        })
    }
}

pub fn run_experiment(
    code: &StabilizerCode,
    spec: &ExperimentSpec,
) -> Result<ExperimentResult, SimError> {
    spec.validate(code)?;
    let ctx = Context {
        code,
        decoder: BpDecoder::new(code),
        group: (code.n_total() < DEGENERACY_LIMIT).then(|| code.group_basis()),
        spec,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = spec.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build()?;
    let mut stats = Vec::new();
    let mut blocks = Vec::new();
    for &p in &spec.ps {
        for &strategy in &spec.strategies {
            let results: Vec<BlockResult> = pool.install(|| {
                (0..spec.blocks)
                    .into_par_iter()
                    .map(|b| ctx.run_block(p, strategy, b))
                    .collect::<Result<_, _>>()
            })?;
            let mut s = Stats::new(p, strategy, spec.seed);
            for r in &results {
                s.record(r.class, r.iterations);
            }
            stats.push(s);
            if spec.keep_blocks {
                blocks.extend(results);
            }
        }
    }
    Ok(ExperimentResult { stats, blocks })
}

/// Explicit adjustments for a single traced instance.
#[derive(Debug, Clone, PartialEq)]
pub enum TracePlan {
    /// The randomized feedback loop of the strategy.
    Loop,
    /// One enhanced reset of `qubit` through `check`.
    Enhanced { check: usize, qubit: usize },
    /// Up to `rounds` perturbations of the qubits of `check`, stopping at convergence.
    Pc08 { check: usize, rounds: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    pub round: usize,
    pub iteration: usize,
    pub beliefs: Vec<Dist4>,
    pub hard: Vec<Gf4>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    pub points: Vec<TracePoint>,
    pub outcome: DecodeOutcome,
    pub initial_output: PauliString,
    pub adjustments: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSpec {
    pub p: f64,
    pub syndrome: Syndrome,
    pub config: FeedbackConfig,
    pub seed: u64,
    /// Output to read the frustration pattern from instead of the initial run's.
    pub reference: Option<PauliString>,
    pub plan: TracePlan,
}

/// Decodes one syndrome and records the beliefs after every iteration of every round.
pub fn trace_instance(code: &StabilizerCode, spec: &TraceSpec) -> Result<TraceResult, SimError> {
    let channel =
        DepolarizingChannel::new(spec.p).map_err(|e| SimError::InvalidSpec(e.to_string()))?;
    if spec.syndrome.len() != code.num_checks() {
        return Err(SimError::InvalidSpec(format!(
            "syndrome has {} entries, code has {} checks",
            spec.syndrome.len(),
            code.num_checks()
        )));
    }
    spec.config
        .validate()
        .map_err(|e| SimError::InvalidSpec(e.to_string()))?;
    let decoder = BpDecoder::new(code);
    let priors = channel.priors(code.n_sent());
    let mut points = Vec::new();
    let mut record = |round: usize, iteration: usize, beliefs: &[Dist4], hard: &[Gf4]| {
        points.push(TracePoint {
            round,
            iteration,
            beliefs: beliefs.to_vec(),
            hard: hard.to_vec(),
        })
    };
    let (outcome, initial_output, adjustments) = {
        let mut session = FeedbackSession::start_observed(
            &decoder,
            &spec.syndrome,
            &priors,
            channel.p_identity(),
            spec.config,
            Some(&mut record),
        );
        let initial_output = session.last_output().clone();
        if let Some(r) = &spec.reference {
            session.set_reference(code.full_width(r)?.symbols());
        }
        let check_range = |c: usize| {
            if c < code.num_checks() {
                Ok(())
            } else {
                Err(SimError::InvalidSpec(format!("check {c} out of range")))
            }
        };
        let mut rng = rng_stream(spec.seed, DOMAIN_FEEDBACK, spec.p.to_bits(), 0);
        match spec.plan {
            TracePlan::Loop => session.run(&mut rng),
            TracePlan::Enhanced { check, qubit } => {
                check_range(check)?;
                if !session.converged() {
                    session
                        .try_enhanced(check, qubit)
                        .map_err(|e| SimError::InvalidSpec(e.to_string()))?;
                }
            }
            TracePlan::Pc08 { check, rounds } => {
                check_range(check)?;
                for _ in 0..rounds {
                    if session.converged() {
                        break;
                    }
                    session.try_pc08(check, &mut rng);
                }
            }
        }
        let out = session.finish();
        (out.outcome, initial_output, out.adjustments.len())
    };
    Ok(TraceResult {
        points,
        outcome,
        initial_output,
        adjustments,
    })
}
