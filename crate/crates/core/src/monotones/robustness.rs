use num_complex::Complex64;

use crate::dense_oracle::DenseOp;
use crate::error::{Error, Result};

use super::enumerate::{pauli_action, pauli_masks, pauli_vector, stabilizer_states, MAX_ENUM_QUBITS};
use super::lp::{solve, StandardLp};

/// Robustness of magic from the LP over all pure stabilizer projectors.
#[derive(Clone, Debug)]
pub struct RobustnessLp {
    /// Primal optimum `‖q‖₁`.
    pub value: f64,
    /// Signed weight per enumerated stabilizer state (same order as `stabilizer_states(n)`).
    pub weights: Vec<f64>,
    /// R-witness `W = Σ_P w_P P` in the Pauli basis (index convention of the enumeration module).
    pub witness: Vec<f64>,
    /// `Tr[Wρ]`.
    pub dual_value: f64,
    /// `max_φ |Tr[W φ]|`; at most 1 for a feasible witness.
    pub witness_max: f64,
    pub gap: f64,
    pub iterations: usize,
}

const CERT_TOL: f64 = 1e-7;

/// `Tr[Pρ]` for every Pauli index.
fn pauli_coords(rho: &DenseOp) -> Vec<f64> {
    let n = rho.n;
    (0..1usize << (2 * n))
        .map(|p| {
            let (x, z) = pauli_masks(n, p);
            (0..rho.dim())
                .map(|c| {
                    let (r, v) = pauli_action(x, z, c);
                    v * rho.get(c, r)
                })
                .sum::<Complex64>()
                .re
        })
        .collect()
}

/// Minimises `‖q‖₁` subject to `Σ_j q_j |φ_j⟩⟨φ_j| = ρ` for n ≤ 3 and certifies
/// the optimum with a dual R-witness (duality gap ≤ 1e-7).
pub fn robustness_lp(rho: &DenseOp) -> Result<RobustnessLp> {
    let n = rho.n;
    if n == 0 || n > MAX_ENUM_QUBITS {
        return Err(Error::InvalidParameter(format!("robustness LP supports 1..={MAX_ENUM_QUBITS} qubits, got {n}")));
    }
    if !rho.is_hermitian(1e-9) {
        return Err(Error::InvalidParameter("density operator is not Hermitian".into()));
    }
    if (rho.trace() - Complex64::new(1.0, 0.0)).norm() > 1e-9 {
        return Err(Error::InvalidParameter("density operator must have unit trace".into()));
    }
    let states = stabilizer_states(n)?;
    let cols: Vec<Vec<f64>> = states.iter().map(|phi| pauli_vector(n, phi)).collect();
    let m = 1usize << (2 * n);
    let ns = cols.len();
    // Columns: q⁺ for every state, then q⁻.
    let a: Vec<Vec<f64>> = (0..m)
        .map(|p| {
            let mut row = Vec::with_capacity(2 * ns);
            row.extend(cols.iter().map(|c| c[p]));
            row.extend(cols.iter().map(|c| -c[p]));
            row
        })
        .collect();
    let b = pauli_coords(rho);
    let lp = StandardLp { a, b: b.clone(), c: vec![1.0; 2 * ns] };
    let sol = solve(&lp)?;
    let weights: Vec<f64> = (0..ns).map(|j| sol.x[j] - sol.x[ns + j]).collect();
    let dual_value: f64 = sol.dual.iter().zip(&b).map(|(y, b)| y * b).sum();
    let witness_max = cols
        .iter()
        .map(|c| c.iter().zip(&sol.dual).map(|(a, y)| a * y).sum::<f64>().abs())
        .fold(0.0, f64::max);
    let gap = (sol.objective - dual_value).abs();
    let residual = (0..m)
        .map(|p| ((0..ns).map(|j| weights[j] * cols[j][p]).sum::<f64>() - b[p]).abs())
        .fold(0.0, f64::max);
    if gap > CERT_TOL || witness_max > 1.0 + CERT_TOL || residual > CERT_TOL {
        return Err(Error::LpFailure(format!(
            "certificate check failed: gap {gap:.3e}, witness max {witness_max:.9}, residual {residual:.3e}"
        )));
    }
    Ok(RobustnessLp {
        value: sol.objective,
        weights,
        witness: sol.dual,
        dual_value,
        witness_max,
        gap,
        iterations: sol.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense_oracle::{bloch_density, product_density};
    use approx::assert_abs_diff_eq;

    #[test]
    fn h_state_single_qubit() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = robustness_lp(&bloch_density([s, 0.0, s])).unwrap();
        assert_abs_diff_eq!(r.value, 2f64.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn stabilizer_mixture_is_one() {
        let r = robustness_lp(&product_density(&[[0.3, -0.2, 0.1], [0.0, 0.0, 1.0]]).unwrap()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn rejects_non_unit_trace() {
        let rho = bloch_density([0.0, 0.0, 0.0]).scale(Complex64::new(2.0, 0.0));
        assert!(robustness_lp(&rho).is_err());
    }
}
