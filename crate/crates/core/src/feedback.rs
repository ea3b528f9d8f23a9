//! Feedback loops around the standard decoder.
//!
//! When BP stops with an output whose syndrome disagrees with the measured
//! one, a frustrated check is picked and the priors of (some of) its qubits
//! are modified before BP is rerun for `t_pert` iterations:
//!
//! * `pc08` scales the non-identity entries of every qubit of the check by
//!   random factors `1 + δu`;
//! * `enhanced` resets the prior of one qubit of the check from the value of
//!   the check's entry on that qubit, the measured syndrome bit and the
//!   channel's `p_I`.
//!
//! A trial that leaves its check frustrated is undone before the next one.
//! Each rerun starts from fresh messages initialized with the modified priors.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bp::{BpDecoder, DecodeOutcome, TannerGraph};
use crate::channel::Dist4;
use crate::gf4::Gf4;
use crate::stabilizer::{PauliString, Syndrome};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeedbackError {
    #[error("unknown strategy {0:?} (expected standard, pc08 or enhanced)")]
    UnknownStrategy(String),
    #[error("check entry must be X, Z or Y")]
    IdentityEntry,
    #[error("syndrome bit {s_c} with S_c·E_out = {dot} is not a frustrated pattern")]
    NotFrustrated { s_c: i8, dot: i8 },
    #[error("qubit {qubit} is not in the support of check {check}")]
    NotAdjacent { check: usize, qubit: usize },
    #[error("invalid feedback configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Standard,
    Pc08,
    Enhanced,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Standard, Strategy::Pc08, Strategy::Enhanced];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Standard => "standard",
            Strategy::Pc08 => "pc08",
            Strategy::Enhanced => "enhanced",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = FeedbackError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" | "bp" => Ok(Strategy::Standard),
            "pc08" | "perturbation" => Ok(Strategy::Pc08),
            "enhanced" => Ok(Strategy::Enhanced),
            other => Err(FeedbackError::UnknownStrategy(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedbackConfig {
    pub strategy: Strategy,
    /// Iteration cap of the initial standard BP run.
    pub max_iter: usize,
    /// Iterations of each BP rerun after an adjustment.
    pub t_pert: usize,
    /// Maximum number of adjustments (qubit entries traversed for `enhanced`,
    /// perturbation rounds for `pc08`).
    pub n_a: usize,
    /// Perturbation strength, `pc08` only.
    pub delta: f64,
}

impl FeedbackConfig {
    pub const DEFAULT_MAX_ITER: usize = 90;
    pub const DEFAULT_T_PERT: usize = 40;
    pub const DEFAULT_DELTA: f64 = 0.1;

    /// Defaults for a code with `n` transmitted qubits.
    pub fn new(strategy: Strategy, n: usize) -> Self {
        FeedbackConfig {
            strategy,
            max_iter: Self::DEFAULT_MAX_ITER,
            t_pert: Self::DEFAULT_T_PERT,
            n_a: default_n_a(n),
            delta: Self::DEFAULT_DELTA,
        }
    }

    pub fn validate(&self) -> Result<(), FeedbackError> {
        if self.t_pert == 0 {
            return Err(FeedbackError::InvalidConfig(
                "t_pert must be at least 1".into(),
            ));
        }
        if self.delta.is_nan() || self.delta < 0.0 || self.delta.is_infinite() {
            return Err(FeedbackError::InvalidConfig(format!(
                "delta {} must be finite and >= 0",
                self.delta
            )));
        }
        Ok(())
    }
}

/// Adjustment budget by code length: n/5 below 300, n/10 below 1000, n/40 beyond.
pub fn default_n_a(n: usize) -> usize {
    if n < 300 {
        n / 5
    } else if n < 1000 {
        n / 10
    } else {
        n / 40
    }
}

/// Checks whose measured bit disagrees with the syndrome of `e_out`
/// (`e_out` over the transmitted qubits).
pub fn frustrated_checks(graph: &TannerGraph, syndrome: &Syndrome, e_out: &[Gf4]) -> Vec<usize> {
    syndrome
        .flags()
        .iter()
        .enumerate()
        .filter(|&(c, &flag)| graph.anticommutes(c, e_out) != flag)
        .map(|(c, _)| c)
        .collect()
}

/// Reset prior for a qubit whose check entry is `s_cq = Σ1`.
///
/// With `s_c = -1` and `S_c·E_out = +1`, `I` and `Σ1` share `1 - p_I` and the two
/// anticommuting symbols share `p_I`. With `s_c = +1` and `S_c·E_out = -1`
/// the roles swap.
pub fn enhanced_reset(
    s_cq: Gf4,
    s_c: i8,
    sc_dot_eout: i8,
    p_identity: f64,
) -> Result<Dist4, FeedbackError> {
    if s_cq.is_zero() {
        return Err(FeedbackError::IdentityEntry);
    }
    let (commuting, anticommuting) = match (s_c, sc_dot_eout) {
        (-1, 1) => ((1.0 - p_identity) / 2.0, p_identity / 2.0),
        (1, -1) => (p_identity / 2.0, (1.0 - p_identity) / 2.0),
        (s_c, dot) => return Err(FeedbackError::NotFrustrated { s_c, dot }),
    };
    let mut d = [anticommuting; 4];
    d[0] = commuting;
    d[s_cq.index()] = commuting;
    Ok(d)
}

/// Multiplies the X, Z, Y entries by `1 + δ·u_k` and renormalizes.
pub fn pc08_perturb_with(prior: &Dist4, delta: f64, u: [f64; 3]) -> Dist4 {
    let mut d = *prior;
    for k in 1..4 {
        d[k] *= 1.0 + delta * u[k - 1];
    }
    let s: f64 = d.iter().sum();
    d.map(|x| x / s)
}

/// [`pc08_perturb_with`] with `u_k ~ Uniform[0, 1)` drawn from `rng`.
pub fn pc08_perturb<R: Rng + ?Sized>(prior: &Dist4, delta: f64, rng: &mut R) -> Dist4 {
    let u = [rng.random(), rng.random(), rng.random()];
    pc08_perturb_with(prior, delta, u)
}

/// One feedback adjustment and the BP rerun that followed it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustmentRecord {
    pub check: usize,
    /// `(qubit, prior used in the rerun)` for every modified qubit.
    pub entries: Vec<(usize, Dist4)>,
    pub iterations: usize,
    pub converged: bool,
    /// Whether the chosen check was satisfied by the rerun's output.
    pub check_satisfied: bool,
    /// Whether the modification was undone afterwards.
    pub restored: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackOutcome {
    /// Final output; `iterations` is the total over all BP runs.
    pub outcome: DecodeOutcome,
    pub initial_converged: bool,
    pub initial_iterations: usize,
    pub adjustments: Vec<AdjustmentRecord>,
}

/// Called with `(round, iteration, beliefs, hard decision)`; round 0 is the initial run.
pub type RoundObserver<'a> = dyn FnMut(usize, usize, &[Dist4], &[Gf4]) + 'a;

/// State of one feedback decoding of one syndrome.
pub struct FeedbackSession<'a> {
    decoder: &'a BpDecoder,
    syndrome: &'a Syndrome,
    config: FeedbackConfig,
    p_identity: f64,
    priors: Vec<Dist4>,
    /// Output the frustration pattern is read from.
    base: Vec<Gf4>,
    last: DecodeOutcome,
    total_iterations: usize,
    initial_converged: bool,
    initial_iterations: usize,
    records: Vec<AdjustmentRecord>,
    observer: Option<&'a mut RoundObserver<'a>>,
}

impl<'a> FeedbackSession<'a> {
    /// Runs the initial standard decode.
    pub fn start(
        decoder: &'a BpDecoder,
        syndrome: &'a Syndrome,
        priors: &[Dist4],
        p_identity: f64,
        config: FeedbackConfig,
    ) -> Self {
        Self::start_observed(decoder, syndrome, priors, p_identity, config, None)
    }

    pub fn start_observed(
        decoder: &'a BpDecoder,
        syndrome: &'a Syndrome,
        priors: &[Dist4],
        p_identity: f64,
        config: FeedbackConfig,
        mut observer: Option<&'a mut RoundObserver<'a>>,
    ) -> Self {
        let first = match observer.as_deref_mut() {
            Some(obs) => {
                decoder.decode_observed(syndrome, priors, config.max_iter, &mut |i, b, h| {
                    obs(0, i, b, h)
                })
            }
            None => decoder.decode(syndrome, priors, config.max_iter),
        };
        let n = decoder.graph().num_qubits();
        FeedbackSession {
            decoder,
            syndrome,
            config,
            p_identity,
            priors: priors.to_vec(),
            base: first.e_out.symbols()[..n].to_vec(),
            total_iterations: first.iterations,
            initial_converged: first.converged,
            initial_iterations: first.iterations,
            last: first,
            records: Vec::new(),
            observer,
        }
    }

    pub fn converged(&self) -> bool {
        self.last.converged
    }

    pub fn adjustments_used(&self) -> usize {
        self.records.len()
    }

    pub fn priors(&self) -> &[Dist4] {
        &self.priors
    }

    pub fn last_output(&self) -> &PauliString {
        &self.last.e_out
    }

    pub fn records(&self) -> &[AdjustmentRecord] {
        &self.records
    }

    /// Replaces the output the frustration pattern is read from.
    pub fn set_reference(&mut self, e_out: &[Gf4]) {
        let n = self.decoder.graph().num_qubits();
        assert!(
            e_out.len() >= n,
            "reference must cover the transmitted qubits"
        );
        self.base = e_out[..n].to_vec();
    }

    /// Frustrated checks with respect to the current reference output.
    pub fn frustrated(&self) -> Vec<usize> {
        frustrated_checks(self.decoder.graph(), self.syndrome, &self.base)
    }

    fn rerun(&mut self, check: usize, saved: Vec<(usize, Dist4)>) -> &AdjustmentRecord {
        let round = self.records.len() + 1;
        let out = match self.observer.as_deref_mut() {
            Some(obs) => self.decoder.decode_observed(
                self.syndrome,
                &self.priors,
                self.config.t_pert,
                &mut |i, b, h| obs(round, i, b, h),
            ),
            None => self
                .decoder
                .decode(self.syndrome, &self.priors, self.config.t_pert),
        };
        let graph = self.decoder.graph();
        let n = graph.num_qubits();
        let hard = &out.e_out.symbols()[..n];
        let check_satisfied = graph.anticommutes(check, hard) == self.syndrome.flags()[check];
        let entries = saved.iter().map(|&(q, _)| (q, self.priors[q])).collect();
        let restored = !out.converged && !check_satisfied;
        if restored {
            for (q, prior) in saved {
                self.priors[q] = prior;
            }
        } else {
            self.base = hard.to_vec();
        }
        self.total_iterations += out.iterations;
        self.records.push(AdjustmentRecord {
            check,
            entries,
            iterations: out.iterations,
            converged: out.converged,
            check_satisfied,
            restored,
        });
        self.last = out;
        self.records.last().expect("just pushed")
    }

    /// Resets the prior of `qubit` through frustrated check `check` and reruns BP.
    pub fn try_enhanced(
        &mut self,
        check: usize,
        qubit: usize,
    ) -> Result<&AdjustmentRecord, FeedbackError> {
        let graph = self.decoder.graph();
        let s_cq = graph
            .check_entries(check)
            .find(|&(q, _)| q == qubit)
            .map(|(_, s)| s)
            .ok_or(FeedbackError::NotAdjacent { check, qubit })?;
        let s_c = self.syndrome.sign(check);
        let dot = if graph.anticommutes(check, &self.base) {
            -1
        } else {
            1
        };
        let reset = enhanced_reset(s_cq, s_c, dot, self.p_identity)?;
        let saved = vec![(qubit, self.priors[qubit])];
        self.priors[qubit] = reset;
        Ok(self.rerun(check, saved))
    }

    /// Perturbs the priors of every qubit of `check` and reruns BP.
    pub fn try_pc08<R: Rng + ?Sized>(&mut self, check: usize, rng: &mut R) -> &AdjustmentRecord {
        let qubits = self.decoder.graph().check_qubits(check).to_vec();
        let saved: Vec<(usize, Dist4)> = qubits.iter().map(|&q| (q, self.priors[q])).collect();
        for &q in &qubits {
            self.priors[q] = pc08_perturb(&self.priors[q], self.config.delta, rng);
        }
        self.rerun(check, saved)
    }

    /// Adjusts until BP converges, the budget `n_a` is spent, or no untried
    /// entry of a frustrated check remains.
    pub fn run<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let graph = self.decoder.graph();
        let mut tried: Vec<Vec<usize>> = vec![Vec::new(); graph.num_checks()];
        let mut exhausted = vec![false; graph.num_checks()];
        let mut current: Option<usize> = None;
        while !self.converged() && self.adjustments_used() < self.config.n_a {
            match self.config.strategy {
                Strategy::Standard => break,
                Strategy::Pc08 => {
                    let candidates = self.frustrated();
                    if candidates.is_empty() {
                        break;
                    }
                    let c = candidates[rng.random_range(0..candidates.len())];
                    self.try_pc08(c, rng);
                }
                Strategy::Enhanced => {
                    let c = match current {
                        Some(c) => c,
                        None => {
                            let candidates: Vec<usize> = self
                                .frustrated()
                                .into_iter()
                                .filter(|&c| !exhausted[c])
                                .collect();
                            if candidates.is_empty() {
                                break;
                            }
                            candidates[rng.random_range(0..candidates.len())]
                        }
                    };
                    let untried: Vec<usize> = graph
                        .check_qubits(c)
                        .iter()
                        .copied()
                        .filter(|q| !tried[c].contains(q))
                        .collect();
                    if untried.is_empty() {
                        exhausted[c] = true;
                        current = None;
                        continue;
                    }
                    let q = untried[rng.random_range(0..untried.len())];
                    tried[c].push(q);
                    let rec = self
                        .try_enhanced(c, q)
                        .expect("qubit drawn from the check's support");
                    current = rec.restored.then_some(c);
                }
            }
        }
    }

    pub fn finish(self) -> FeedbackOutcome {
        let mut outcome = self.last;
        outcome.iterations = self.total_iterations;
        FeedbackOutcome {
            outcome,
            initial_converged: self.initial_converged,
            initial_iterations: self.initial_iterations,
            adjustments: self.records,
        }
    }
}

/// Standard decode followed by the configured feedback loop.
pub fn feedback_decode<R: Rng + ?Sized>(
    decoder: &BpDecoder,
    syndrome: &Syndrome,
    priors: &[Dist4],
    p_identity: f64,
    config: FeedbackConfig,
    rng: &mut R,
) -> FeedbackOutcome {
    let mut session = FeedbackSession::start(decoder, syndrome, priors, p_identity, config);
    session.run(rng);
    session.finish()
}

#[cfg(test)]
mod tests {
    use super::Strategy;
    use super::*;
    use crate::channel::{rng_stream, DepolarizingChannel};
    use crate::stabilizer::build_code_4_1_1;
    use proptest::prelude::*;

    const X: Gf4 = Gf4::ONE;
    const Z: Gf4 = Gf4::OMEGA;
    const Y: Gf4 = Gf4::OMEGA_BAR;

    fn close(a: &Dist4, b: &Dist4) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    fn worked_example() -> (BpDecoder, Syndrome, Vec<Dist4>) {
        let code = build_code_4_1_1();
        (
            BpDecoder::new(&code),
            Syndrome::from_signs(&[-1, 1, 1, 1]).unwrap(),
            DepolarizingChannel::new(0.1).unwrap().priors(4),
        )
    }

    #[test]
    fn frustrated_examples() {
        let (dec, s, _) = worked_example();
        let g = dec.graph();
        let e: PauliString = "IYII".parse().unwrap();
        assert_eq!(frustrated_checks(g, &s, e.symbols()), vec![1, 2, 3]);
        let id = PauliString::identity(4);
        assert_eq!(frustrated_checks(g, &s, id.symbols()), vec![0]);
        let good: PauliString = "IIZX".parse().unwrap();
        assert!(frustrated_checks(g, &s, good.symbols()).is_empty());
    }

    #[test]
    fn reset_examples() {
        let d = enhanced_reset(X, -1, 1, 0.9).unwrap();
        assert!(close(&d, &[0.05, 0.05, 0.45, 0.45]), "{d:?}");
        let d = enhanced_reset(X, 1, -1, 0.9).unwrap();
        assert!(close(&d, &[0.45, 0.45, 0.05, 0.05]), "{d:?}");
        let d = enhanced_reset(Y, 1, -1, 0.9).unwrap();
        assert!(close(&d, &[0.45, 0.05, 0.05, 0.45]), "{d:?}");
        assert_eq!(
            enhanced_reset(Gf4::ZERO, 1, -1, 0.9),
            Err(FeedbackError::IdentityEntry)
        );
        assert!(matches!(
            enhanced_reset(Z, 1, 1, 0.9),
            Err(FeedbackError::NotFrustrated { .. })
        ));
        assert!(matches!(
            enhanced_reset(Z, -1, -1, 0.9),
            Err(FeedbackError::NotFrustrated { .. })
        ));
    }

    #[test]
    fn perturbation_examples() {
        let prior = [0.9, 1.0 / 30.0, 1.0 / 30.0, 1.0 / 30.0];
        let mut rng = rng_stream(3, 0, 0, 0);
        assert!(close(&pc08_perturb(&prior, 0.0, &mut rng), &prior));
        let fixed = pc08_perturb_with(&prior, 1.0, [1.0, 1.0, 1.0]);
        let expected = [
            0.9 / 1.1,
            1.0 / 15.0 / 1.1,
            1.0 / 15.0 / 1.1,
            1.0 / 15.0 / 1.1,
        ];
        assert!(close(&fixed, &expected), "{fixed:?}");
        for _ in 0..100 {
            let d = pc08_perturb(&prior, 0.5, &mut rng);
            assert!(d[0] < prior[0]);
        }
        let clean = pc08_perturb(&[1.0, 0.0, 0.0, 0.0], 1.0, &mut rng);
        assert_eq!(clean, [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn default_budget() {
        assert_eq!(default_n_a(126), 25);
        assert_eq!(default_n_a(128), 25);
        assert_eq!(default_n_a(816), 81);
        assert_eq!(default_n_a(1920), 48);
        assert_eq!(default_n_a(4), 0);
    }

    #[test]
    fn enhanced_case_study() {
        let (dec, s, priors) = worked_example();
        let cfg = FeedbackConfig::new(Strategy::Enhanced, 4);
        let mut session = FeedbackSession::start(&dec, &s, &priors, 0.9, cfg);
        assert!(!session.converged());
        assert_eq!(session.frustrated(), vec![0]);
        let iyii: PauliString = "IYII".parse().unwrap();
        session.set_reference(iyii.symbols());
        assert_eq!(session.frustrated(), vec![1, 2, 3]);
        let rec = session.try_enhanced(1, 3).unwrap().clone();
        assert!(close(&rec.entries[0].1, &[0.45, 0.45, 0.05, 0.05]));
        assert!(rec.converged);
        assert_eq!(rec.iterations, 3);
        assert_eq!(session.last_output().to_string(), "IIZXI");
        let out = session.finish();
        assert_eq!(out.outcome.iterations, 93);
        assert!(session_not_adjacent());
    }

    fn session_not_adjacent() -> bool {
        let (dec, s, priors) = worked_example();
        let mut session = FeedbackSession::start(
            &dec,
            &s,
            &priors,
            0.9,
            FeedbackConfig::new(Strategy::Enhanced, 4),
        );
        // check 1 (XXIX) has no support on qubit 2
        matches!(
            session.try_enhanced(1, 2),
            Err(FeedbackError::NotAdjacent { .. })
        )
    }

    #[test]
    fn failed_trial_restores_prior_exactly() {
        let (dec, s, priors) = worked_example();
        let mut cfg = FeedbackConfig::new(Strategy::Enhanced, 4);
        cfg.t_pert = 1;
        let mut session = FeedbackSession::start(&dec, &s, &priors, 0.9, cfg);
        let before = session.priors().to_vec();
        let rec = session.try_enhanced(0, 0).unwrap().clone();
        if rec.restored {
            assert_eq!(session.priors(), before.as_slice());
        } else {
            assert_ne!(session.priors(), before.as_slice());
        }
    }

    #[test]
    fn zero_budget_is_standard_decoding() {
        let (dec, s, priors) = worked_example();
        for strategy in Strategy::ALL {
            let mut cfg = FeedbackConfig::new(strategy, 4);
            cfg.n_a = 0;
            let out = feedback_decode(&dec, &s, &priors, 0.9, cfg, &mut rng_stream(1, 2, 3, 4));
            let std = dec.decode(&s, &priors, 90);
            assert_eq!(out.outcome, std);
            assert!(out.adjustments.is_empty());
        }
    }

    #[test]
    fn loop_is_deterministic_and_within_budget() {
        let (dec, s, priors) = worked_example();
        for strategy in [Strategy::Pc08, Strategy::Enhanced] {
            let mut cfg = FeedbackConfig::new(strategy, 4);
            cfg.n_a = 6;
            let a = feedback_decode(&dec, &s, &priors, 0.9, cfg, &mut rng_stream(9, 0, 0, 1));
            let b = feedback_decode(&dec, &s, &priors, 0.9, cfg, &mut rng_stream(9, 0, 0, 1));
            assert_eq!(a, b);
            assert!(a.adjustments.len() <= 6);
            let total: usize =
                a.initial_iterations + a.adjustments.iter().map(|r| r.iterations).sum::<usize>();
            assert_eq!(total, a.outcome.iterations);
        }
    }

    #[test]
    fn strategy_names() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("magic".parse::<Strategy>().is_err());
    }

    proptest! {
        #[test]
        fn reset_shape(sym in 1u8..4, branch in any::<bool>(), p_i in 0.0f64..=1.0) {
            let s = Gf4::from_bits(sym);
            let (s_c, dot) = if branch { (-1, 1) } else { (1, -1) };
            let d = enhanced_reset(s, s_c, dot, p_i).unwrap();
            prop_assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            prop_assert_eq!(d[0], d[s.index()]);
            let others: Vec<f64> = (1..4).filter(|&k| k != s.index()).map(|k| d[k]).collect();
            prop_assert_eq!(others[0], others[1]);
            if branch && p_i > 0.5 {
                prop_assert!(others[0] + others[1] > 0.5);
            }
        }
    }
}
