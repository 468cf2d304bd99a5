use num_complex::Complex;

use crate::scalar::Real;
use crate::stab_core::{inverse_circuit, Gate};

use super::bloch::{canonicalize_py, BlochState, Stab1};

/// Optimal single-qubit ω-witness for the generalized robustness.
///
/// In the canonical frame `|ω⟩⟨ω| = (I + q·(X+Z)/√2 + √(1−q²)·Y)/(1 + q/√2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness1Q<T> {
    pub q: T,
    /// `⟨ω|ρ|ω⟩` (equal to Λ⁺ for non-stabilizer ρ).
    pub value: T,
    /// Gates mapping the input into the canonical region.
    pub canonical: Vec<Gate>,
}

impl<T: Real> Witness1Q<T> {
    /// Unit Bloch direction of ω in the canonical frame.
    pub fn canonical_direction(&self) -> BlochState<T> {
        let h = self.q / T::SQRT_2();
        BlochState { bx: h, by: (T::one() - self.q * self.q).max(T::zero()).sqrt(), bz: h }
    }

    /// Unit Bloch direction of ω in the caller's frame.
    pub fn direction(&self) -> BlochState<T> {
        self.canonical_direction().conjugate_circuit(&inverse_circuit(&self.canonical))
    }

    /// `⟨ω|ω⟩ = 2/(1 + q/√2)`.
    pub fn norm_sqr(&self) -> T {
        T::lit(2.0) / (T::one() + self.q / T::SQRT_2())
    }

    /// The witness vector in the caller's frame (global phase arbitrary).
    pub fn ket(&self) -> [Complex<T>; 2] {
        let s = self.norm_sqr().sqrt();
        self.direction().ket().map(|a| a * s)
    }

    /// `|⟨ω|φ⟩|²` for a pure state with Bloch vector `b`.
    pub fn overlap_sqr(&self, b: &BlochState<T>) -> T {
        let d = self.direction();
        let dot = d.bx * b.bx + d.by * b.by + d.bz * b.bz;
        (T::one() + dot) / (T::one() + self.q / T::SQRT_2())
    }

    /// Largest `|⟨ω|φ⟩|` over the six stabilizer states (≤ 1 for a valid witness).
    pub fn max_stabilizer_overlap(&self) -> T {
        Stab1::ALL
            .iter()
            .map(|s| self.overlap_sqr(&BlochState::stabilizer(*s)).max(T::zero()).sqrt())
            .fold(T::zero(), T::max)
    }
}

/// Lower end of the witness parameter range, √(2/3).
pub fn q_min<T: Real>() -> T {
    (T::lit(2.0) / T::lit(3.0)).sqrt()
}

/// `⟨ω(q)|ρ̃|ω(q)⟩` for a canonical-frame Bloch vector.
pub fn witness_objective<T: Real>(rho: &BlochState<T>, q: T) -> T {
    let s2 = T::SQRT_2();
    let y = (T::one() - q * q).max(T::zero()).sqrt();
    (T::one() + q * (rho.bx + rho.bz) / s2 + y * rho.by) / (T::one() + q / s2)
}

/// Sign-carrying part of `d/dq` of the witness objective (the positive
/// denominator is dropped).
fn witness_slope<T: Real>(rho: &BlochState<T>, q: T) -> T {
    let s2 = T::SQRT_2();
    let y = (T::one() - q * q).max(T::zero()).sqrt();
    if y <= T::zero() {
        return -T::one();
    }
    let a = (rho.bx + rho.bz) / s2;
    let num = T::one() + q * a + y * rho.by;
    let dnum = a - q * rho.by / y;
    dnum * (T::one() + q / s2) - num / s2
}

/// Maximises the witness objective over `q ∈ [√(2/3), 1]`: a 1000-point grid
/// locates the best cell, then golden-section search refines it.
pub fn maximize_q<T: Real>(rho: &BlochState<T>) -> (T, T) {
    let lo = q_min::<T>();
    let hi = T::one();
    let steps = 1000usize;
    let at = |i: usize| lo + (hi - lo) * T::from_usize(i).unwrap() / T::from_usize(steps).unwrap();
    let mut best = 0;
    let mut best_val = witness_objective(rho, lo);
    for i in 1..=steps {
        let v = witness_objective(rho, at(i));
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    let mut a = at(best.saturating_sub(1));
    let mut b = at((best + 1).min(steps));
    let tol = T::lit(1e-10).max(T::epsilon().sqrt());
    let g = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = witness_objective(rho, c);
    let mut fd = witness_objective(rho, d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = witness_objective(rho, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = witness_objective(rho, d);
        }
    }
    let mut q = (a + b) / T::lit(2.0);
    // Function values cannot resolve q beyond ~√ε near a smooth maximum;
    // bisect on the derivative inside the grid cell to pin it down.
    let (mut l, mut r) = (at(best.saturating_sub(1)), at((best + 1).min(steps)));
    if witness_slope(rho, l) > T::zero() && witness_slope(rho, r) < T::zero() {
        for _ in 0..200 {
            let m = (l + r) / T::lit(2.0);
            if m <= l || m >= r {
                break;
            }
            if witness_slope(rho, m) > T::zero() {
                l = m;
            } else {
                r = m;
            }
        }
        q = (l + r) / T::lit(2.0);
    }
    let mut val = witness_objective(rho, q);
    // The optimum frequently sits exactly on an endpoint.
    for end in [lo, hi] {
        let v = witness_objective(rho, end);
        if v >= val {
            q = end;
            val = v;
        }
    }
    (q, val)
}

/// Λ⁺(ρ) = Λ(ρ) = Ξ(ρ) for a single qubit, with the optimal witness.
///
/// Stabilizer mixtures (‖b‖₁ ≤ 1) return exactly 1.
pub fn lambda_plus_1q<T: Real>(rho: &BlochState<T>) -> (T, Witness1Q<T>) {
    let can = canonicalize_py(rho);
    let (q, val) = maximize_q(&can.state);
    let witness = Witness1Q { q, value: val, canonical: can.gates };
    if rho.is_stabilizer_mixture() {
        (T::one(), witness)
    } else {
        (val.max(T::one()), witness)
    }
}
