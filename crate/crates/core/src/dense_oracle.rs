//! Brute-force state-vector and density-matrix reference for small registers.
//!
//! Everything here works on explicit `2^n` amplitudes (n ≤ 6) and is used to
//! cross-check the stabilizer engine, the channel library and the simulators.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::channels::SimulableChannel;
use crate::error::{Error, Result};
use crate::stab_core::{EquatorialMatrix, Gate, PauliOp, StabProjector, StabState};

/// Largest register the dense routines accept.
pub const MAX_DENSE_QUBITS: usize = 6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_n(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        Err(Error::TooManyQubits { n, limit: MAX_DENSE_QUBITS })
    } else {
        Ok(())
    }
}

/// State vector; basis index bit j is qubit j.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseVec {
    pub n: usize,
    pub amps: Vec<Complex64>,
}

impl DenseVec {
    pub fn zeros(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(DenseVec { n, amps: vec![ZERO; 1 << n] })
    }

    pub fn basis(n: usize, x: usize) -> Result<Self> {
        let mut v = Self::zeros(n)?;
        v.amps[x] = ONE;
        Ok(v)
    }

    pub fn from_amps(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n {
            return Err(Error::InvalidParameter("length must be a power of two".into()));
        }
        check_n(n)?;
        Ok(DenseVec { n, amps })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn dot(&self, other: &DenseVec) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, c: Complex64) -> DenseVec {
        DenseVec { n: self.n, amps: self.amps.iter().map(|a| a * c).collect() }
    }

    pub fn add(&self, other: &DenseVec) -> DenseVec {
        DenseVec { n: self.n, amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect() }
    }

    pub fn max_abs_diff(&self, other: &DenseVec) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn kron(&self, other: &DenseVec) -> Result<DenseVec> {
        let n = self.n + other.n;
        check_n(n)?;
        let lo = self.amps.len();
        let mut amps = vec![ZERO; 1 << n];
        for (y, b) in other.amps.iter().enumerate() {
            for (x, a) in self.amps.iter().enumerate() {
                amps[x + lo * y] = a * b;
            }
        }
        Ok(DenseVec { n, amps })
    }

    pub fn outer(&self, other: &DenseVec) -> DenseOp {
        let d = self.amps.len();
        let mut data = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                data[r * d + c] = self.amps[r] * other.amps[c].conj();
            }
        }
        DenseOp { n: self.n, data }
    }

    /// Applies a gate by direct amplitude manipulation.
    pub fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        gate.check(self.n)?;
        let d = self.amps.len();
        let a = &mut self.amps;
        match gate {
            Gate::H(q) => {
                let b = 1 << q;
                for x in 0..d {
                    if x & b == 0 {
                        let (u, w) = (a[x], a[x | b]);
                        a[x] = (u + w) * FRAC_1_SQRT_2;
                        a[x | b] = (u - w) * FRAC_1_SQRT_2;
                    }
                }
            }
            Gate::S(q) | Gate::Sdg(q) | Gate::Z(q) => {
                let ph = match gate {
                    Gate::S(_) => I,
                    Gate::Sdg(_) => -I,
                    _ => -ONE,
                };
                for (x, amp) in a.iter_mut().enumerate() {
                    if (x >> q) & 1 == 1 {
                        *amp *= ph;
                    }
                }
            }
            Gate::X(q) | Gate::Y(q) => {
                let b = 1 << q;
                for x in 0..d {
                    if x & b == 0 {
                        let (u, w) = (a[x], a[x | b]);
                        if matches!(gate, Gate::X(_)) {
                            a[x] = w;
                            a[x | b] = u;
                        } else {
                            a[x] = -I * w;
                            a[x | b] = I * u;
                        }
                    }
                }
            }
            Gate::CX(c, t) => {
                for x in 0..d {
                    if (x >> c) & 1 == 1 && (x >> t) & 1 == 0 {
                        a.swap(x, x | (1 << t));
                    }
                }
            }
            Gate::CZ(p, q) => {
                for (x, amp) in a.iter_mut().enumerate() {
                    if (x >> p) & 1 == 1 && (x >> q) & 1 == 1 {
                        *amp = -*amp;
                    }
                }
            }
            Gate::Swap(p, q) => {
                for x in 0..d {
                    if (x >> p) & 1 == 1 && (x >> q) & 1 == 0 {
                        a.swap(x, x ^ (1 << p) ^ (1 << q));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, gates: &[Gate]) -> Result<()> {
        for &g in gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// `p|v⟩`, built qubit by qubit from the Pauli letters.
    pub fn apply_pauli(&self, p: &PauliOp) -> Result<DenseVec> {
        if p.n != self.n {
            return Err(Error::DimensionMismatch(self.n, p.n));
        }
        let mut out = self.clone();
        for q in 0..p.n {
            match p.letter(q) {
                'X' => out.apply_gate(Gate::X(q))?,
                'Y' => out.apply_gate(Gate::Y(q))?,
                'Z' => out.apply_gate(Gate::Z(q))?,
                _ => {}
            }
        }
        let ph = [ONE, I, -ONE, -I][p.phase_pow() as usize];
        Ok(out.scale(ph))
    }

    /// `(I + sign·p)/2 |v⟩`.
    pub fn project_pauli(&self, p: &PauliOp, sign: i8) -> Result<DenseVec> {
        let pv = self.apply_pauli(p)?;
        Ok(self.add(&pv.scale(Complex64::new(sign as f64, 0.0))).scale(Complex64::new(0.5, 0.0)))
    }
}

/// Dense operator stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOp {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl DenseOp {
    pub fn zeros(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(DenseOp { n, data: vec![ZERO; 1 << (2 * n)] })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n)?;
        let d = m.dim();
        for i in 0..d {
            m.data[i * d + i] = ONE;
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim() + c]
    }

    pub fn mul(&self, other: &DenseOp) -> DenseOp {
        let d = self.dim();
        let mut data = vec![ZERO; d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    data[r * d + c] += a * other.data[k * d + c];
                }
            }
        }
        DenseOp { n: self.n, data }
    }

    pub fn adjoint(&self) -> DenseOp {
        let d = self.dim();
        let mut data = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                data[c * d + r] = self.data[r * d + c].conj();
            }
        }
        DenseOp { n: self.n, data }
    }

    pub fn add(&self, other: &DenseOp) -> DenseOp {
        DenseOp { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, c: Complex64) -> DenseOp {
        DenseOp { n: self.n, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn apply(&self, v: &DenseVec) -> DenseVec {
        let d = self.dim();
        let amps = (0..d).map(|r| (0..d).map(|c| self.data[r * d + c] * v.amps[c]).sum()).collect();
        DenseVec { n: self.n, amps }
    }

    pub fn kron(&self, other: &DenseOp) -> Result<DenseOp> {
        let n = self.n + other.n;
        check_n(n)?;
        let (da, db) = (self.dim(), other.dim());
        let d = da * db;
        let mut data = vec![ZERO; d * d];
        for rb in 0..db {
            for cb in 0..db {
                let b = other.data[rb * db + cb];
                for ra in 0..da {
                    for ca in 0..da {
                        data[(ra + da * rb) * d + (ca + da * cb)] = self.data[ra * da + ca] * b;
                    }
                }
            }
        }
        Ok(DenseOp { n, data })
    }

    pub fn max_abs_diff(&self, other: &DenseOp) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// True when `self + tol·I` admits a Cholesky factorisation (Hermitian input assumed).
    pub fn is_psd(&self, tol: f64) -> bool {
        let d = self.dim();
        let mut a = self.data.clone();
        for i in 0..d {
            a[i * d + i] += tol;
        }
        let mut l = vec![ZERO; d * d];
        for j in 0..d {
            let mut diag = a[j * d + j].re;
            for k in 0..j {
                diag -= l[j * d + k].norm_sqr();
            }
            if diag <= 0.0 {
                return false;
            }
            let ljj = diag.sqrt();
            l[j * d + j] = Complex64::new(ljj, 0.0);
            for i in (j + 1)..d {
                let mut s = a[i * d + j];
                for k in 0..j {
                    s -= l[i * d + k] * l[j * d + k].conj();
                }
                l[i * d + j] = s / ljj;
            }
        }
        true
    }

    /// `U ρ U†` for a gate sequence.
    pub fn conjugate_by_circuit(&self, gates: &[Gate]) -> Result<DenseOp> {
        let u = circuit_matrix(self.n, gates)?;
        Ok(u.mul(self).mul(&u.adjoint()))
    }

    /// Reduced state on the listed qubits (in the listed order).
    pub fn partial_trace_keep(&self, keep: &[usize]) -> Result<DenseOp> {
        let n = self.n;
        for &q in keep {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
        }
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let k = keep.len();
        let mut out = DenseOp::zeros(k)?;
        let dk = 1 << k;
        let compose = |a: usize, e: usize| {
            let mut x = 0usize;
            for (i, &q) in keep.iter().enumerate() {
                x |= ((a >> i) & 1) << q;
            }
            for (i, &q) in traced.iter().enumerate() {
                x |= ((e >> i) & 1) << q;
            }
            x
        };
        for r in 0..dk {
            for c in 0..dk {
                let mut s = ZERO;
                for e in 0..(1 << traced.len()) {
                    s += self.get(compose(r, e), compose(c, e));
                }
                out.data[r * dk + c] = s;
            }
        }
        Ok(out)
    }
}

/// Dense expansion `Σ_x ⟨x|ψ⟩ |x⟩` of a stabilizer state.
pub fn expand(state: &StabState) -> Result<DenseVec> {
    check_n(state.n())?;
    let amps = (0..1u64 << state.n()).map(|x| state.basis_amplitude(x)).collect();
    Ok(DenseVec { n: state.n(), amps })
}

/// Unitary of a gate sequence, built column by column.
pub fn circuit_matrix(n: usize, gates: &[Gate]) -> Result<DenseOp> {
    check_n(n)?;
    let d = 1 << n;
    let mut m = DenseOp::zeros(n)?;
    for c in 0..d {
        let mut v = DenseVec::basis(n, c)?;
        v.apply_circuit(gates)?;
        for r in 0..d {
            m.data[r * d + c] = v.amps[r];
        }
    }
    Ok(m)
}

pub fn pauli_matrix(p: &PauliOp) -> Result<DenseOp> {
    check_n(p.n)?;
    let d = 1 << p.n;
    let mut m = DenseOp::zeros(p.n)?;
    for c in 0..d {
        let v = DenseVec::basis(p.n, c)?.apply_pauli(p)?;
        for r in 0..d {
            m.data[r * d + c] = v.amps[r];
        }
    }
    Ok(m)
}

/// `Π_i (I + s_i P_i)/2`.
pub fn projector_matrix(proj: &StabProjector) -> Result<DenseOp> {
    let n = proj.n();
    let mut m = DenseOp::identity(n)?;
    let id = DenseOp::identity(n)?;
    for (p, s) in proj.generators() {
        let term = id.add(&pauli_matrix(p)?.scale(Complex64::new(*s as f64, 0.0))).scale(Complex64::new(0.5, 0.0));
        m = m.mul(&term);
    }
    Ok(m)
}

/// Equatorial state `2^{-n/2} Σ_x i^{xᵀAx}|x⟩` written out explicitly.
pub fn equatorial_vector(a: &EquatorialMatrix) -> Result<DenseVec> {
    let n = a.n;
    check_n(n)?;
    let norm = 2f64.powf(-(n as f64) / 2.0);
    let amps = (0..1usize << n)
        .map(|x| {
            let mut e = 0u32;
            for j in 0..n {
                if (x >> j) & 1 == 1 {
                    e += a.diag[j] as u32;
                    for k in (j + 1)..n {
                        if (x >> k) & 1 == 1 && (a.off[j] >> k) & 1 == 1 {
                            e += 2;
                        }
                    }
                }
            }
            [ONE, I, -ONE, -I][(e & 3) as usize] * norm
        })
        .collect();
    Ok(DenseVec { n, amps })
}

/// Single-qubit density matrix `(I + bx X + by Y + bz Z)/2`.
pub fn bloch_density(b: [f64; 3]) -> DenseOp {
    let [x, y, z] = b;
    DenseOp {
        n: 1,
        data: vec![
            Complex64::new((1.0 + z) / 2.0, 0.0),
            Complex64::new(x / 2.0, -y / 2.0),
            Complex64::new(x / 2.0, y / 2.0),
            Complex64::new((1.0 - z) / 2.0, 0.0),
        ],
    }
}

/// Tensor product of single-qubit Bloch states; qubit j is the j-th entry.
pub fn product_density(states: &[[f64; 3]]) -> Result<DenseOp> {
    check_n(states.len())?;
    let mut rho = DenseOp::identity(0)?;
    for b in states {
        rho = rho.kron(&bloch_density(*b))?;
    }
    Ok(rho)
}

/// `Σ_r p_r U_r ρ U_r† + Σ_s q_s K_s ρ K_s†`, after checking Kraus completeness.
pub fn apply_channel_dense(rho: &DenseOp, ch: &SimulableChannel) -> Result<DenseOp> {
    if ch.n() != rho.n {
        return Err(Error::DimensionMismatch(rho.n, ch.n()));
    }
    let violation = completeness_violation(ch)?;
    if violation > 1e-8 {
        return Err(Error::InvalidChannel(format!("Kraus completeness violated by {violation:.3e}")));
    }
    let mut out = DenseOp::zeros(rho.n)?;
    for (p, circ) in ch.unitary_part() {
        let u = circuit_matrix(rho.n, circ)?;
        out = out.add(&u.mul(rho).mul(&u.adjoint()).scale(Complex64::new(*p, 0.0)));
    }
    for (q, k) in ch.kraus_part() {
        let km = kraus_matrix(k)?;
        out = out.add(&km.mul(rho).mul(&km.adjoint()).scale(Complex64::new(*q, 0.0)));
    }
    Ok(out)
}

/// Dense `2^{h/2} U Π` for a stabilizer Kraus operator.
pub fn kraus_matrix(k: &crate::channels::StabKraus) -> Result<DenseOp> {
    let n = k.proj().n();
    let u = circuit_matrix(n, k.circuit())?;
    let pi = projector_matrix(k.proj())?;
    Ok(u.mul(&pi).scale(Complex64::new(k.scale(), 0.0)))
}

/// Largest entry of `Σ p_r I + Σ q_s K_s†K_s − I`.
pub fn completeness_violation(ch: &SimulableChannel) -> Result<f64> {
    let n = ch.n();
    let mut sum = DenseOp::identity(n)?.scale(Complex64::new(ch.p_unitary(), 0.0));
    for (q, k) in ch.kraus_part() {
        let km = kraus_matrix(k)?;
        sum = sum.add(&km.adjoint().mul(&km).scale(Complex64::new(*q, 0.0)));
    }
    Ok(sum.max_abs_diff(&DenseOp::identity(n)?))
}

/// `Tr[Π ρ]`.
pub fn born_probability_dense(rho: &DenseOp, proj: &StabProjector) -> Result<f64> {
    if proj.n() != rho.n {
        return Err(Error::DimensionMismatch(rho.n, proj.n()));
    }
    Ok(projector_matrix(proj)?.mul(rho).trace().re)
}

/// `Tr[P ρ]` for a Hermitian Pauli.
pub fn pauli_expectation_dense(rho: &DenseOp, p: &PauliOp) -> Result<f64> {
    Ok(pauli_matrix(p)?.mul(rho).trace().re)
}

/// Random gate on `n` qubits (two-qubit gates need `n ≥ 2`).
pub fn random_gate<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Gate {
    let q = rng.gen_range(0..n);
    let r = if n > 1 { (q + rng.gen_range(1..n)) % n } else { q };
    match if n == 1 { rng.gen_range(0..6) } else { rng.gen_range(0..9) } {
        0 => Gate::S(q),
        1 => Gate::Sdg(q),
        2 => Gate::H(q),
        3 => Gate::X(q),
        4 => Gate::Y(q),
        5 => Gate::Z(q),
        6 => Gate::CX(q, r),
        7 => Gate::CZ(q, r),
        _ => Gate::Swap(q, r),
    }
}

/// Random Hermitian non-identity Pauli with a random sign.
pub fn random_pauli<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> PauliOp {
    let mask = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    loop {
        let (x, z) = (rng.gen::<u64>() & mask, rng.gen::<u64>() & mask);
        if x | z != 0 {
            return PauliOp::new(n, x, z, if rng.gen() { 0 } else { 2 }).expect("in range");
        }
    }
}

/// Outcome of [`random_program_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProgramCheck {
    pub n: usize,
    pub gates: usize,
    pub projections: usize,
    /// Largest deviation seen over amplitudes, norms and inner products.
    pub max_error: f64,
}

/// Runs a random program (1–5 qubits, ≤ 60 gates, ≤ 10 Pauli projections)
/// on both engines, comparing amplitudes, norm and the inner product with a
/// random reference state after every step.
pub fn random_program_check<R: rand::Rng + ?Sized>(rng: &mut R) -> Result<ProgramCheck> {
    let n = rng.gen_range(1..=5);
    let gates = rng.gen_range(0..=60);
    let projections = rng.gen_range(0..=10);
    let mut ops: Vec<Option<Gate>> = (0..gates).map(|_| Some(random_gate(n, rng))).collect();
    for _ in 0..projections {
        let at = rng.gen_range(0..=ops.len());
        ops.insert(at, None);
    }
    let prep: Vec<Gate> = (0..rng.gen_range(0..30)).map(|_| random_gate(n, rng)).collect();
    let reference = StabState::from_circuit(n, &prep)?;
    let ref_dense = expand(&reference)?;
    let mut st = StabState::zero(n)?;
    let mut dv = DenseVec::basis(n, 0)?;
    let mut max_error = 0f64;
    for op in ops {
        match op {
            Some(g) => {
                st.apply_gate_in_place(g)?;
                dv.apply_gate(g)?;
            }
            None => {
                let p = random_pauli(n, rng);
                let sign = if rng.gen() { 1 } else { -1 };
                let (next, _) = st.project_pauli(&p, sign)?;
                let projected = dv.project_pauli(&p, sign)?;
                // Keep both engines on a non-null branch so later steps stay informative.
                if projected.norm_sqr() > 1e-12 {
                    st = next;
                    dv = projected;
                } else if !next.is_null() {
                    max_error = max_error.max(next.norm());
                }
            }
        }
        max_error = max_error
            .max(expand(&st)?.max_abs_diff(&dv))
            .max((st.norm() - dv.norm_sqr().sqrt()).abs())
            .max((reference.inner_product(&st)? - ref_dense.dot(&dv)).norm());
    }
    Ok(ProgramCheck { n, gates, projections, max_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn expand_plus_and_plus_i() {
        let plus = StabState::from_circuit(1, &[Gate::H(0)]).unwrap();
        let v = expand(&plus).unwrap();
        assert_abs_diff_eq!(v.amps[0].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(v.amps[1].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        let v = expand(&plus.apply_gate(Gate::S(0)).unwrap()).unwrap();
        assert_abs_diff_eq!(v.amps[1].im, FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn too_many_qubits_rejected() {
        let st = StabState::zero(7).unwrap();
        assert!(matches!(expand(&st), Err(Error::TooManyQubits { .. })));
    }

    #[test]
    fn born_probabilities() {
        let rho = bloch_density([0.0, 0.0, 1.0]);
        let one = StabProjector::basis(1, &[0], &[true]).unwrap();
        assert_abs_diff_eq!(born_probability_dense(&rho, &one).unwrap(), 0.0);
        let all = StabProjector::identity(1);
        assert_abs_diff_eq!(born_probability_dense(&rho, &all).unwrap(), 1.0);
        let h = bloch_density([FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2]);
        let zero = StabProjector::basis(1, &[0], &[false]).unwrap();
        let expected = (PI / 8.0).cos().powi(2);
        assert_abs_diff_eq!(born_probability_dense(&h, &zero).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.853553, epsilon = 1e-6);
    }

    #[test]
    fn circuit_matrices_are_unitary() {
        let gates = [Gate::H(0), Gate::S(1), Gate::CX(0, 2), Gate::Y(1), Gate::Swap(1, 2), Gate::Sdg(0)];
        let u = circuit_matrix(3, &gates).unwrap();
        assert!(u.mul(&u.adjoint()).max_abs_diff(&DenseOp::identity(3).unwrap()) < 1e-12);
    }

    #[test]
    fn partial_trace_of_product() {
        let rho = product_density(&[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]).unwrap();
        let r1 = rho.partial_trace_keep(&[1]).unwrap();
        assert!(r1.max_abs_diff(&bloch_density([1.0, 0.0, 0.0])) < 1e-14);
    }

    #[test]
    fn psd_check() {
        assert!(bloch_density([0.6, 0.0, 0.8]).is_psd(1e-12));
        assert!(!bloch_density([0.0, 0.0, 1.5]).is_psd(1e-12));
    }

    #[test]
    fn random_programs_agree() {
        let mut rng = crate::parallel::sample_rng(5, 0);
        for _ in 0..100 {
            let c = random_program_check(&mut rng).unwrap();
            assert!(c.max_error < 1e-10, "{c:?}");
        }
    }
}
