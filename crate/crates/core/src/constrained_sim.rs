//! Biased constant-time estimator: replace ρ by the stabilizer part σ of a
//! pair with `ρ ≤ λσ`, estimate `λ Tr[E 𝒪(σ)]` by sampling, and report the
//! interval that must contain the true value.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{stab1_state, Dyad, DyadBlock, DyadicDecomposition, SimulableChannel};
use crate::dyadic_sim::{run_samples, sample_count, Observable};
use crate::error::{Error, Result};
use crate::monotones::{robustness_pair_1q, BlochState};

/// `λ ≥ 1` and a stabilizer mixture σ with `ρ ≤ λσ`.
#[derive(Clone, Debug)]
pub struct RobustnessPair {
    pub lambda: f64,
    pub sigma: DyadicDecomposition,
}

impl RobustnessPair {
    /// σ must carry real non-negative weights only.
    pub fn new(lambda: f64, sigma: DyadicDecomposition) -> Result<Self> {
        if !(lambda >= 1.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda = {lambda} must be at least 1")));
        }
        for b in sigma.blocks() {
            if b.terms().iter().any(|(a, _)| a.re < 0.0 || a.im.abs() > 1e-12) {
                return Err(Error::InvalidDecomposition("σ needs real non-negative weights".into()));
            }
        }
        Ok(RobustnessPair { lambda, sigma })
    }

    /// Optimal pair of a product of single-qubit states: λ = Π_j Λ⁺(ρ_j), σ = ⊗_j σ_j.
    pub fn from_bloch_product(states: &[BlochState<f64>]) -> Result<Self> {
        let mut lambda = 1.0;
        let mut blocks = Vec::with_capacity(states.len());
        for s in states {
            let pair = robustness_pair_1q(s)?;
            lambda *= pair.lambda;
            let terms = pair
                .sigma_weights
                .iter()
                .map(|&(w, st)| {
                    let k = stab1_state(st);
                    Ok((Complex64::new(w, 0.0), Dyad::new(k.clone(), k)?))
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(DyadBlock::new(1, terms)?);
        }
        Self::new(lambda, DyadicDecomposition::from_blocks(blocks)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstrainedCase {
    /// Both prior bounds reached: the interval is the whole prior range.
    Failure,
    /// Neither bound reached: `Δ = λ(1+c) − 1`.
    ConstantError,
    /// Exactly one bound reached.
    ShrunkError,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedReport {
    #[serde(rename = "E_hat")]
    pub e_hat: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    pub case: ConstrainedCase,
    #[serde(rename = "E_sigma")]
    pub e_sigma: f64,
    #[serde(rename = "E_max")]
    pub e_max: f64,
    #[serde(rename = "E_min")]
    pub e_min: f64,
    pub lambda: f64,
    pub c: f64,
    pub epsilon: f64,
    pub p_fail: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Interval for the true value given the estimate `e_sigma` of `λ Tr[E 𝒪(σ)]`.
/// Projectors use the prior range [0, 1], Pauli observables [−1, 1].
/// Returns `(E_max, E_min, case)`.
pub fn constrained_bounds(e_sigma: f64, lambda: f64, c: f64, projector: bool) -> (f64, f64, ConstrainedCase) {
    let eps = c * lambda;
    let (lo, hi) = if projector { (0.0, 1.0) } else { (-1.0, 1.0) };
    let up = e_sigma + eps + lambda - 1.0;
    let down = e_sigma - eps - lambda + 1.0;
    let case = match (up >= hi, down <= lo) {
        (true, true) => ConstrainedCase::Failure,
        (false, false) => ConstrainedCase::ConstantError,
        _ => ConstrainedCase::ShrunkError,
    };
    (up.min(hi), down.max(lo), case)
}

/// Number of σ samples, `⌈2c⁻² ln(2/p_fail)⌉`; independent of λ.
pub fn constrained_sample_count(c: f64, p_fail: f64) -> Result<u64> {
    sample_count(1.0, c, p_fail)
}

/// Runs the constrained estimator; with probability `1 − p_fail` the true
/// value lies in `[E_min, E_max]`.
pub fn constrained_estimate(
    pair: &RobustnessPair,
    circuit: &[SimulableChannel],
    obs: &Observable,
    c: f64,
    p_fail: f64,
    seed: u64,
    workers: Option<usize>,
) -> Result<ConstrainedReport> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter(format!("c = {c} outside (0, 1)")));
    }
    if pair.lambda < 1.0 {
        return Err(Error::InvalidParameter(format!("lambda = {} below 1", pair.lambda)));
    }
    let m = constrained_sample_count(c, p_fail)?;
    let stats = run_samples(&pair.sigma, circuit, obs, m, seed, workers)?;
    let e_sigma = pair.lambda * stats.mean();
    let (e_max, e_min, case) = constrained_bounds(e_sigma, pair.lambda, c, obs.is_projector());
    Ok(ConstrainedReport {
        e_hat: (e_max + e_min) / 2.0,
        delta: (e_max - e_min) / 2.0,
        case,
        e_sigma,
        e_max,
        e_min,
        lambda: pair.lambda,
        c,
        epsilon: c * pair.lambda,
        p_fail,
        samples: m,
        seed,
    })
}
