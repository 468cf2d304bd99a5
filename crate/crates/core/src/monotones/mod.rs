//! Magic monotones: single-qubit closed forms, equimagical decompositions,
//! product rules and an LP for the robustness of magic on up to three qubits.

pub mod bloch;
pub mod enumerate;
pub mod equimagical;
pub mod extent;
pub mod lp;
pub mod robustness;
pub mod witness;

pub use bloch::{canonicalize_py, BlochState, Canonical, Stab1};
pub use enumerate::{stabilizer_state_count, stabilizer_states};
pub use equimagical::{equimagical_decompose, optimal_mixture_1q, special_extent, special_states, EquimagicalDecomp};
pub use extent::{extent_pure_1q, Extent1Q};
pub use robustness::{robustness_lp, RobustnessLp};
pub use witness::{lambda_plus_1q, Witness1Q};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Stab-norm `D = (1 + |bx| + |by| + |bz|)/2`.
pub fn stab_norm_1q<T: Real>(rho: &BlochState<T>) -> T {
    (T::one() + rho.l1()) / T::lit(2.0)
}

/// Single-qubit robustness of magic: `‖b‖₁` outside the octahedron, 1 inside.
pub fn robustness_1q<T: Real>(rho: &BlochState<T>) -> T {
    rho.l1().max(T::one())
}

/// `Π_j Λ⁺(σ_j)`, which is Λ⁺ = Λ = Ξ of the product state.
pub fn product_monotone<T: Real>(states: &[BlochState<T>]) -> T {
    states.iter().map(|s| lambda_plus_1q(s).0).fold(T::one(), |a, b| a * b)
}

/// `Π_j D(σ_j)`.
pub fn product_stab_norm<T: Real>(states: &[BlochState<T>]) -> T {
    states.iter().map(stab_norm_1q).fold(T::one(), |a, b| a * b)
}

/// Feasible pair for the generalized robustness of one qubit: `ρ ≤ λσ` with σ a
/// stabilizer mixture given as weights on the six stabilizer states.
#[derive(Clone, Debug, PartialEq)]
pub struct RobustnessPair1Q<T> {
    pub lambda: T,
    pub sigma: BlochState<T>,
    pub sigma_weights: Vec<(T, Stab1)>,
}

/// Splits an octahedron point into non-negative weights on the six stabilizer states.
pub fn octahedron_weights<T: Real>(s: &BlochState<T>) -> Vec<(T, Stab1)> {
    let mut out = Vec::new();
    let axes = [(s.bx, Stab1::Plus, Stab1::Minus), (s.by, Stab1::PlusI, Stab1::MinusI), (s.bz, Stab1::Zero, Stab1::One)];
    for (v, pos, neg) in axes {
        if v > T::zero() {
            out.push((v, pos));
        } else if v < T::zero() {
            out.push((-v, neg));
        }
    }
    let rest = (T::one() - s.l1()).max(T::zero()) / T::lit(2.0);
    if rest > T::zero() {
        out.push((rest, Stab1::Zero));
        out.push((rest, Stab1::One));
    }
    out
}

/// Smallest λ with `λσ − ρ ⪰ 0`, i.e. `|λ s − r| ≤ λ − 1` for Bloch vectors s, r:
/// the larger root of `(1−|s|²)λ² − 2(1 − s·r)λ + (1 − |r|²) = 0`.
fn feasible_lambda<T: Real>(rho: &BlochState<T>, sigma: &BlochState<T>) -> T {
    let (r, s) = (rho.to_array(), sigma.to_array());
    let sr = s[0] * r[0] + s[1] * r[1] + s[2] * r[2];
    let a = T::one() - sigma.norm_sqr();
    let b = T::one() - sr;
    let c = T::one() - rho.norm_sqr();
    let root = if a <= T::epsilon() {
        c / (T::lit(2.0) * b)
    } else {
        (b + (b * b - a * c).max(T::zero()).sqrt()) / a
    };
    // One ulp-scale nudge so rounding cannot leave a negative eigenvalue.
    root * (T::one() + T::epsilon() * T::lit(8.0))
}

/// Optimal `(λ, σ)` with `σ = (ρ + (λ−1)ρ′)/λ`, where ρ′ is the pure state
/// orthogonal to the optimal witness.
pub fn robustness_pair_1q<T: Real>(rho: &BlochState<T>) -> Result<RobustnessPair1Q<T>> {
    let (lambda, witness) = lambda_plus_1q(rho);
    let sigma = if rho.is_stabilizer_mixture() {
        *rho
    } else {
        let w = witness.direction();
        let k = lambda - T::one();
        let mut s = BlochState {
            bx: (rho.bx - k * w.bx) / lambda,
            by: (rho.by - k * w.by) / lambda,
            bz: (rho.bz - k * w.bz) / lambda,
        };
        let l1 = s.l1();
        if l1 > T::one() + T::lit(1e-6).max(T::loose_eps()) {
            return Err(Error::InvalidDecomposition(format!(
                "robustness partner leaves the octahedron (‖σ‖₁ = {})",
                l1.to_f64_lossy()
            )));
        }
        if l1 > T::one() {
            s = s.depolarized(T::one() / l1);
        }
        s
    };
    let lambda = lambda.max(feasible_lambda(rho, &sigma));
    Ok(RobustnessPair1Q { lambda, sigma, sigma_weights: octahedron_weights(&sigma) })
}

/// Computed monotones and the slack of each ladder inequality (non-negative when it holds).
#[derive(Clone, Debug, PartialEq)]
pub struct LadderReport {
    pub lambda_plus: f64,
    pub robustness: f64,
    pub stab_norm: f64,
    /// `R − (2Λ⁺ − 1)`.
    pub slack_generic: f64,
    /// `R − ((1+√2)Λ⁺ − √2)`; single-qubit inputs only.
    pub slack_single: Option<f64>,
    /// `R − D`.
    pub slack_stab_norm: f64,
}

impl LadderReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.slack_generic >= -tol && self.slack_stab_norm >= -tol && self.slack_single.map_or(true, |s| s >= -tol)
    }
}

/// Evaluates the monotone ladder for a product of single-qubit states. Λ⁺, Λ
/// and Ξ coincide for these inputs, so the chain `Λ⁺ ≤ Λ ≤ Ξ` is an equality;
/// R comes from the closed form for one qubit and from the LP for two or three.
pub fn monotone_ladder_check(states: &[BlochState<f64>]) -> Result<LadderReport> {
    if states.is_empty() {
        return Err(Error::InvalidParameter("ladder check needs at least one qubit".into()));
    }
    let lambda_plus = product_monotone(states);
    let stab_norm = product_stab_norm(states);
    let robustness = if states.len() == 1 {
        robustness_1q(&states[0])
    } else {
        let arrs: Vec<[f64; 3]> = states.iter().map(|s| s.to_array()).collect();
        robustness_lp(&crate::dense_oracle::product_density(&arrs)?)?.value
    };
    let s2 = std::f64::consts::SQRT_2;
    Ok(LadderReport {
        lambda_plus,
        robustness,
        stab_norm,
        slack_generic: robustness - (2.0 * lambda_plus - 1.0),
        slack_single: (states.len() == 1).then(|| robustness - ((1.0 + s2) * lambda_plus - s2)),
        slack_stab_norm: robustness - stab_norm,
    })
}
