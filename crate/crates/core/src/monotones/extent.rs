use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::bloch::{BlochState, Stab1};
use super::witness::{lambda_plus_1q, Witness1Q};

/// Extent-optimal expansion `|ψ⟩ = Σ_j c_j |φ_j⟩` of a single-qubit pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct Extent1Q<T> {
    /// ξ(ψ) = ‖c‖₁².
    pub xi: T,
    pub terms: Vec<(Complex<T>, Stab1)>,
    pub witness: Witness1Q<T>,
    /// ‖ψ − Σ c_j φ_j‖ of the returned expansion.
    pub residual: T,
}

impl<T: Real> Extent1Q<T> {
    pub fn l1(&self) -> T {
        self.terms.iter().map(|(c, _)| c.norm()).sum()
    }
}

fn dot<T: Real>(a: &[Complex<T>; 2], b: &[Complex<T>; 2]) -> Complex<T> {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// Stabilizer extent ξ of a pure single-qubit state and an expansion attaining it.
///
/// The optimal expansion only uses stabilizer states touched by the optimal
/// witness (`|⟨ω|φ⟩| = 1`), with every `c_j⟨ω|φ_j⟩` sharing the phase of
/// `⟨ω|ψ⟩`. Two states are touched in general and three on the P_Y face
/// boundaries (|F⟩ for instance); the non-negative weights are found by least
/// squares over subsets of the touched states.
pub fn extent_pure_1q<T: Real>(psi: &BlochState<T>) -> Result<Extent1Q<T>> {
    let tol = T::lit(1e-9).max(T::epsilon().sqrt() * T::lit(4.0));
    if !psi.is_pure(tol) {
        return Err(Error::InvalidParameter(format!(
            "extent needs a pure state (Bloch norm {})",
            psi.norm().to_f64_lossy()
        )));
    }
    let ket = psi.ket();
    let (value, witness) = lambda_plus_1q(psi);
    for s in Stab1::ALL {
        let ov = dot(&s.ket::<T>(), &ket);
        if ov.norm() >= T::one() - tol {
            let mut terms = vec![(ov, s)];
            polish(&mut terms, &ket);
            let residual = expansion_error(&terms, &ket);
            return Ok(Extent1Q { xi: T::one(), terms, witness, residual });
        }
    }
    let w = witness.ket();
    let theta = dot(&w, &ket).arg();
    let touched: Vec<(Stab1, [Complex<T>; 2])> = Stab1::ALL
        .iter()
        .filter_map(|&s| {
            let phi = s.ket::<T>();
            let ov = dot(&w, &phi);
            (ov.norm() >= T::one() - T::lit(1e-6)).then(|| {
                let rot = Complex::from_polar(T::one(), theta - ov.arg());
                (s, [phi[0] * rot, phi[1] * rot])
            })
        })
        .collect();
    let mut best: Option<(T, Vec<(Complex<T>, Stab1)>)> = None;
    for mask in 1u32..(1 << touched.len()) {
        let cols: Vec<&(Stab1, [Complex<T>; 2])> =
            touched.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, c)| c).collect();
        let Some(r) = nonneg_least_squares(&cols, &ket) else { continue };
        let mut approx = [Complex::new(T::zero(), T::zero()); 2];
        let mut terms = Vec::new();
        for (rj, (s, u)) in r.iter().zip(&cols) {
            approx[0] = approx[0] + u[0] * *rj;
            approx[1] = approx[1] + u[1] * *rj;
            let rot = Complex::from_polar(*rj, theta - dot(&w, &s.ket::<T>()).arg());
            terms.push((rot, *s));
        }
        let res = ((approx[0] - ket[0]).norm_sqr() + (approx[1] - ket[1]).norm_sqr()).sqrt();
        let better = match &best {
            None => true,
            Some((b, bt)) => res + tol < *b || (res <= *b + tol && terms.len() < bt.len()),
        };
        if better {
            best = Some((res, terms));
        }
    }
    let (_, mut terms) = best.ok_or_else(|| Error::InvalidDecomposition("no witness-aligned expansion".into()))?;
    // The witness phases carry the optimizer's tolerance; absorb what is left
    // of ψ exactly with two of the kets so the expansion reproduces ψ to rounding.
    polish(&mut terms, &ket);
    let residual = expansion_error(&terms, &ket);
    let l1: T = terms.iter().map(|(c, _)| c.norm()).sum();
    let xi = l1 * l1;
    let gap_tol = T::lit(1e-8).max(T::epsilon().sqrt() * T::lit(10.0));
    if residual > gap_tol || (xi - value).abs() > gap_tol {
        return Err(Error::InvalidDecomposition(format!(
            "extent certificate failed: residual {}, primal {} vs dual {}",
            residual.to_f64_lossy(),
            xi.to_f64_lossy(),
            value.to_f64_lossy()
        )));
    }
    Ok(Extent1Q { xi: value, terms, witness, residual })
}

fn expansion_error<T: Real>(terms: &[(Complex<T>, Stab1)], ket: &[Complex<T>; 2]) -> T {
    let mut r = *ket;
    for (c, s) in terms {
        let u = s.ket::<T>();
        r[0] = r[0] - u[0] * *c;
        r[1] = r[1] - u[1] * *c;
    }
    (r[0].norm_sqr() + r[1].norm_sqr()).sqrt()
}

fn polish<T: Real>(terms: &mut Vec<(Complex<T>, Stab1)>, ket: &[Complex<T>; 2]) {
    let mut r = *ket;
    for (c, s) in terms.iter() {
        let u = s.ket::<T>();
        r[0] = r[0] - u[0] * *c;
        r[1] = r[1] - u[1] * *c;
    }
    let a = terms[0].1;
    let b = match terms.get(1) {
        Some(t) => t.1,
        None => match a {
            Stab1::Zero => Stab1::One,
            Stab1::One => Stab1::Zero,
            Stab1::Plus => Stab1::Minus,
            Stab1::Minus => Stab1::Plus,
            Stab1::PlusI => Stab1::MinusI,
            Stab1::MinusI => Stab1::PlusI,
        },
    };
    let (u, v) = (a.ket::<T>(), b.ket::<T>());
    let det = u[0] * v[1] - v[0] * u[1];
    let x = (r[0] * v[1] - v[0] * r[1]) / det;
    let y = (u[0] * r[1] - r[0] * u[1]) / det;
    terms[0].0 = terms[0].0 + x;
    match terms.get_mut(1) {
        Some(t) => t.0 = t.0 + y,
        None => {
            if y.norm() > T::zero() {
                terms.push((y, b));
            }
        }
    }
}

/// Solves `min ‖Σ r_j u_j − target‖` over reals and returns `r` if every entry is non-negative.
fn nonneg_least_squares<T: Real>(cols: &[&(Stab1, [Complex<T>; 2])], target: &[Complex<T>; 2]) -> Option<Vec<T>> {
    let k = cols.len();
    let real = |v: &[Complex<T>; 2]| [v[0].re, v[0].im, v[1].re, v[1].im];
    let us: Vec<[T; 4]> = cols.iter().map(|c| real(&c.1)).collect();
    let b = real(target);
    let mut a = vec![vec![T::zero(); k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = (0..4).map(|t| us[i][t] * us[j][t]).sum();
        }
        a[i][k] = (0..4).map(|t| us[i][t] * b[t]).sum();
    }
    // Gaussian elimination with partial pivoting on the k×k normal equations.
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())?;
        if a[piv][col].abs() < T::epsilon() * T::lit(100.0) {
            return None;
        }
        a.swap(col, piv);
        for row in 0..k {
            if row != col {
                let f = a[row][col] / a[col][col];
                for c in col..=k {
                    let v = a[col][c];
                    a[row][c] = a[row][c] - f * v;
                }
            }
        }
    }
    let r: Vec<T> = (0..k).map(|i| a[i][k] / a[i][i]).collect();
    if r.iter().any(|&x| x < -T::lit(1e-12)) {
        return None;
    }
    Some(r.into_iter().map(|x| x.max(T::zero())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn stabilizer_state_has_one_term() {
        let e = extent_pure_1q(&BlochState::<f64>::stabilizer(Stab1::Zero)).unwrap();
        assert_eq!(e.xi, 1.0);
        assert_eq!(e.terms.len(), 1);
    }

    #[test]
    fn h_state_two_terms() {
        let e = extent_pure_1q(&BlochState::<f64>::h_state()).unwrap();
        assert_eq!(e.terms.len(), 2);
        assert_abs_diff_eq!(e.xi, 4.0 - 2.0 * 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(e.l1() * e.l1(), e.xi, epsilon = 1e-10);
    }

    #[test]
    fn face_state_needs_three_terms() {
        let e = extent_pure_1q(&BlochState::<f64>::f_state()).unwrap();
        assert_eq!(e.terms.len(), 3);
        assert_abs_diff_eq!(e.xi, 3.0 - 3f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn mixed_input_rejected() {
        assert!(extent_pure_1q(&BlochState::<f64>::h_state().depolarized(0.5)).is_err());
    }
}
