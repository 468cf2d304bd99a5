use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::stab_core::inverse_circuit;

use super::bloch::{canonicalize_py, BlochState};
use super::witness::lambda_plus_1q;

/// Convex decomposition of a single-qubit state into pure states of equal extent.
#[derive(Clone, Debug, PartialEq)]
pub struct EquimagicalDecomp<T> {
    /// (weight, pure state) pairs.
    pub parts: Vec<(T, BlochState<T>)>,
    /// Extent shared by every part; equals Λ⁺ of the mixture.
    pub common_extent: T,
}

impl<T: Real> EquimagicalDecomp<T> {
    /// Weighted sum of the parts' Bloch vectors.
    pub fn reconstruct(&self) -> BlochState<T> {
        let mut b = BlochState::maximally_mixed();
        for (p, s) in &self.parts {
            b.bx = b.bx + *p * s.bx;
            b.by = b.by + *p * s.by;
            b.bz = b.bz + *p * s.bz;
        }
        b
    }
}

fn unit_a<T: Real>() -> [T; 3] {
    let s6 = T::lit(6.0).sqrt();
    [T::one() / s6, -T::lit(2.0) / s6, T::one() / s6]
}

fn unit_b<T: Real>() -> [T; 3] {
    let s2 = T::SQRT_2();
    [T::one() / s2, T::zero(), -T::one() / s2]
}

fn unit_f<T: Real>() -> [T; 3] {
    let s3 = T::lit(3.0).sqrt();
    [T::one() / s3; 3]
}

/// Pure states `Ψ_f^X, Ψ_f^Y, Ψ_f^Z` on the slice `⟨σ_F⟩ = f`: Bloch vectors
/// `(s,a,a)`, `(a,s,a)`, `(a,a,s)` with `s = √(1−2a²)` and `√3 f = 2a + s`.
pub fn special_states<T: Real>(f: T) -> Result<[BlochState<T>; 3]> {
    let inv_s3 = T::one() / T::lit(3.0).sqrt();
    if f < inv_s3 - T::loose_eps() || f > T::one() + T::loose_eps() {
        return Err(Error::InvalidParameter(format!("special states need f in [1/√3, 1], got {f}")));
    }
    let f = f.min(T::one()).max(inv_s3);
    let a = (T::lit(2.0) * T::lit(3.0).sqrt() * f - T::lit(6.0).sqrt() * (T::one() - f * f).sqrt()) / T::lit(6.0);
    let a = a.max(T::zero());
    let s = (T::one() - T::lit(2.0) * a * a).max(T::zero()).sqrt();
    Ok([
        BlochState { bx: s, by: a, bz: a },
        BlochState { bx: a, by: s, bz: a },
        BlochState { bx: a, by: a, bz: s },
    ])
}

/// Shared extent `(1+f)/(1+1/√3)` of the special states.
pub fn special_extent<T: Real>(f: T) -> T {
    (T::one() + f) / (T::one() + T::one() / T::lit(3.0).sqrt())
}

/// Equimagical decomposition of a non-stabilizer state in P_Y.
///
/// States inside the triangle spanned by the special states at their own
/// `f` become a mixture of those (at most three parts); everything else is
/// split into the pair `Φ± = (I + r_A σ_A ± √(1−r_A²−f²) σ_B + f σ_F)/2`.
pub fn equimagical_decompose<T: Real>(rho: &BlochState<T>) -> Result<EquimagicalDecomp<T>> {
    let tol = T::loose_eps().max(T::lit(1e-9));
    if rho.is_stabilizer_mixture() {
        return Err(Error::StabilizerInput("an equimagical decomposition"));
    }
    if !rho.in_py(tol) {
        return Err(Error::InvalidParameter("state must lie in P_Y; canonicalize first".into()));
    }
    let (value, _) = lambda_plus_1q(rho);
    if rho.is_pure(tol) {
        return Ok(EquimagicalDecomp { parts: vec![(T::one(), *rho)], common_extent: value });
    }
    let f = rho.f();
    let psi = special_states(f)?;
    let s = psi[0].bx;
    let a = psi[0].by;
    // The special states form a circulant matrix (s−a)I + aJ; invert it directly.
    let b = rho.to_array();
    let sum = b[0] + b[1] + b[2];
    let denom = s - a;
    if denom.abs() > tol {
        let lam: Vec<T> = b.iter().map(|&bi| (bi - a * sum / (s + T::lit(2.0) * a)) / denom).collect();
        if lam.iter().all(|&l| l >= -tol) {
            let parts: Vec<(T, BlochState<T>)> = lam
                .iter()
                .zip(psi.iter())
                .filter(|(l, _)| **l > tol)
                .map(|(l, p)| (*l, *p))
                .collect();
            let total: T = parts.iter().map(|(l, _)| *l).sum();
            let parts = parts.into_iter().map(|(l, p)| (l / total, p)).collect();
            return Ok(EquimagicalDecomp { parts, common_extent: special_extent(f) });
        }
    }
    let ra = rho.r_a();
    let rb = rho.r_b();
    let big_r = (T::one() - ra * ra - f * f).max(T::zero()).sqrt();
    let (ua, ub, uf) = (unit_a::<T>(), unit_b::<T>(), unit_f::<T>());
    let phi = |sign: T| {
        let c = |i: usize| ra * ua[i] + sign * big_r * ub[i] + f * uf[i];
        BlochState { bx: c(0), by: c(1), bz: c(2) }
    };
    let p_plus = ((T::one() + rb / big_r) / T::lit(2.0)).max(T::zero()).min(T::one());
    let mut parts = Vec::new();
    if p_plus > T::zero() {
        parts.push((p_plus, phi(T::one())));
    }
    if p_plus < T::one() {
        parts.push((T::one() - p_plus, phi(-T::one())));
    }
    Ok(EquimagicalDecomp { parts, common_extent: value })
}

/// Equimagical decomposition of any single-qubit state in its own frame:
/// canonicalise, decompose, map the parts back. Stabilizer mixtures are
/// returned as a single part (themselves) with extent 1; the part need not
/// be pure in that case.
pub fn optimal_mixture_1q<T: Real>(rho: &BlochState<T>) -> Result<EquimagicalDecomp<T>> {
    if rho.is_stabilizer_mixture() {
        return Ok(EquimagicalDecomp { parts: vec![(T::one(), *rho)], common_extent: T::one() });
    }
    let can = canonicalize_py(rho);
    let dec = equimagical_decompose(&can.state)?;
    let back = inverse_circuit(&can.gates);
    Ok(EquimagicalDecomp {
        parts: dec.parts.into_iter().map(|(p, s)| (p, s.conjugate_circuit(&back))).collect(),
        common_extent: dec.common_extent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotones::extent::extent_pure_1q;
    use approx::assert_abs_diff_eq;

    #[test]
    fn triangle_centre_splits_three_ways() {
        let f = 0.8;
        let m = f / 3f64.sqrt();
        let rho = BlochState::new(m, m, m).unwrap();
        let d = equimagical_decompose(&rho).unwrap();
        assert_eq!(d.parts.len(), 3);
        for (p, _) in &d.parts {
            assert_abs_diff_eq!(*p, 1.0 / 3.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(d.common_extent, 1.8 / (1.0 + 1.0 / 3f64.sqrt()), epsilon = 1e-12);
        for (_, s) in &d.parts {
            assert_abs_diff_eq!(extent_pure_1q(s).unwrap().xi, d.common_extent, epsilon = 1e-9);
        }
    }

    #[test]
    fn noisy_h_uses_phi_pair() {
        let rho = BlochState::<f64>::h_state().depolarized(0.9);
        let d = equimagical_decompose(&rho).unwrap();
        assert_eq!(d.parts.len(), 2);
        let r = d.reconstruct();
        assert_abs_diff_eq!(r.bx, rho.bx, epsilon = 1e-12);
        assert_abs_diff_eq!(r.by, rho.by, epsilon = 1e-12);
        assert_abs_diff_eq!(r.bz, rho.bz, epsilon = 1e-12);
        for (_, s) in &d.parts {
            assert!(s.in_py(1e-12));
            assert_abs_diff_eq!(extent_pure_1q(s).unwrap().xi, d.common_extent, epsilon = 1e-9);
        }
    }

    #[test]
    fn pure_input_is_its_own_decomposition() {
        let rho = BlochState::<f64>::h_state();
        let d = equimagical_decompose(&rho).unwrap();
        assert_eq!(d.parts, vec![(1.0, rho)]);
    }

    #[test]
    fn special_state_extent_at_point_nine() {
        let psi = special_states(0.9f64).unwrap();
        for s in psi {
            assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(s.f(), 0.9, epsilon = 1e-12);
            assert_abs_diff_eq!(extent_pure_1q(&s).unwrap().xi, 1.9 / (1.0 + 1.0 / 3f64.sqrt()), epsilon = 1e-9);
        }
        assert_abs_diff_eq!(special_extent(0.9f64), 1.204, epsilon = 1e-3);
    }

    #[test]
    fn stabilizer_input_rejected() {
        assert!(equimagical_decompose(&BlochState::<f64>::maximally_mixed()).is_err());
    }
}
