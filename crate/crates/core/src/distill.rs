//! Lower bounds on the number of input copies any stabilizer protocol needs
//! to distill Clifford-symmetric targets, and upper bounds on asymptotic rates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monotones::{product_monotone, BlochState};
use crate::scalar::Real;

/// Distillation target with known inverse stabilizer fidelity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    H,
    T,
    F,
}

impl Target {
    /// `F(ψ)⁻¹`, equal to the extent for these states.
    pub fn inverse_fidelity<T: Real>(self) -> T {
        match self {
            Target::H | Target::T => T::lit(4.0) - T::lit(2.0) * T::SQRT_2(),
            Target::F => T::lit(3.0) - T::lit(3.0).sqrt(),
        }
    }
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" | "h" => Ok(Target::H),
            "T" | "t" => Ok(Target::T),
            "F" | "f" => Ok(Target::F),
            _ => Err(Error::Parse(format!("unknown distillation target {s:?} (expected H, T or F)"))),
        }
    }
}

/// `k` copies of `rho` (a product of single-qubit states) to `m` copies of
/// the target at infidelity `epsilon` with success probability `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistillQuery<T> {
    pub rho: Vec<BlochState<T>>,
    pub target: Target,
    pub m: u32,
    pub epsilon: T,
    pub p: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CopyBounds<T> {
    pub lambda_plus: T,
    /// `[log p + log(1−ε) + m log F⁻¹]/log Λ⁺`.
    pub k1: T,
    /// `p [log(1−ε) + m log F⁻¹]/log Λ⁺`.
    pub k2: T,
    pub k: T,
}

fn log_lambda<T: Real>(rho: &[BlochState<T>]) -> Result<(T, T)> {
    if rho.is_empty() {
        return Err(Error::InvalidParameter("empty input state".into()));
    }
    let lp = product_monotone(rho);
    if lp.ln() <= T::loose_eps() {
        return Err(Error::StabilizerInput("the distillation bound"));
    }
    Ok((lp, lp.ln()))
}

pub fn copies_lower_bound<T: Real>(q: &DistillQuery<T>) -> Result<CopyBounds<T>> {
    if !(q.epsilon >= T::zero() && q.epsilon < T::one()) {
        return Err(Error::InvalidParameter(format!("epsilon = {} outside [0, 1)", q.epsilon)));
    }
    if !(q.p > T::zero() && q.p <= T::one()) {
        return Err(Error::InvalidParameter(format!("p = {} outside (0, 1]", q.p)));
    }
    if q.m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let (lambda_plus, ll) = log_lambda(&q.rho)?;
    let target = T::from_u32(q.m).expect("u32 fits") * q.target.inverse_fidelity::<T>().ln();
    let log_fid = (T::one() - q.epsilon).ln();
    let k1 = (q.p.ln() + log_fid + target) / ll;
    let k2 = q.p * (log_fid + target) / ll;
    Ok(CopyBounds { lambda_plus, k1, k2, k: k1.max(k2) })
}

/// `log Λ⁺(ρ) / log F(ψ)⁻¹`.
pub fn asymptotic_rate_bound<T: Real>(rho: &[BlochState<T>], target: Target) -> Result<T> {
    let (_, ll) = log_lambda(rho)?;
    Ok(ll / target.inverse_fidelity::<T>().ln())
}

/// One point of a sweep over `ρ = α|H⟩⟨H| + (1−α)I/2` (one qubit per copy).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow<T> {
    pub alpha: T,
    pub m: u32,
    pub epsilon: T,
    pub p: T,
    pub lambda_plus: T,
    pub k1: T,
    pub k2: T,
    pub k: T,
}

pub fn noisy_h<T: Real>(alpha: T) -> BlochState<T> {
    BlochState::h_state().depolarized(alpha)
}

/// Bounds for noisy-H inputs over the Cartesian product of the three grids.
pub fn sweep<T: Real>(target: Target, alphas: &[T], ms: &[u32], epsilons: &[T], p: T) -> Result<Vec<SweepRow<T>>> {
    let mut out = Vec::with_capacity(alphas.len() * ms.len() * epsilons.len());
    for &alpha in alphas {
        for &m in ms {
            for &epsilon in epsilons {
                let q = DistillQuery { rho: vec![noisy_h(alpha)], target, m, epsilon, p };
                let b = copies_lower_bound(&q)?;
                out.push(SweepRow { alpha, m, epsilon, p, lambda_plus: b.lambda_plus, k1: b.k1, k2: b.k2, k: b.k });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn self_distillation_needs_one_copy() {
        let q = DistillQuery { rho: vec![BlochState::<f64>::h_state()], target: Target::H, m: 1, epsilon: 0.0, p: 1.0 };
        let b = copies_lower_bound(&q).unwrap();
        assert_abs_diff_eq!(b.k, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(asymptotic_rate_bound(&q.rho, Target::H).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn h_to_f_rate() {
        let r = asymptotic_rate_bound(&[BlochState::<f64>::h_state()], Target::F).unwrap();
        let expect = (4.0 - 2.0 * 2f64.sqrt()).ln() / (3.0 - 3f64.sqrt()).ln();
        assert_abs_diff_eq!(r, expect, epsilon = 1e-12);
        assert_abs_diff_eq!(r, 0.6670, epsilon = 1e-4);
    }

    #[test]
    fn stabilizer_input_rejected() {
        let q = DistillQuery {
            rho: vec![BlochState::<f64>::maximally_mixed()],
            target: Target::H,
            m: 1,
            epsilon: 0.0,
            p: 1.0,
        };
        assert!(matches!(copies_lower_bound(&q), Err(Error::StabilizerInput(_))));
    }

    #[test]
    fn noisy_h_lambda_and_f32() {
        let b = copies_lower_bound(&DistillQuery { rho: vec![noisy_h(0.75)], target: Target::H, m: 4, epsilon: 1e-10, p: 0.9 })
            .unwrap();
        assert_abs_diff_eq!(b.lambda_plus, 1.02513, epsilon = 5e-6);
        let b32 = copies_lower_bound(&DistillQuery { rho: vec![noisy_h(0.75f32)], target: Target::H, m: 4, epsilon: 1e-10, p: 0.9 })
            .unwrap();
        assert!((b32.k1 as f64 - b.k1).abs() / b.k1 < 1e-3);
    }
}
