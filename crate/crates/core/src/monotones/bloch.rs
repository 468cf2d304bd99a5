use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::stab_core::Gate;

/// Single-qubit density operator `(I + bx X + by Y + bz Z)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct BlochState<T> {
    pub bx: T,
    pub by: T,
    pub bz: T,
}

/// Six single-qubit stabilizer states with their standard phase conventions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stab1 {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl Stab1 {
    pub const ALL: [Stab1; 6] = [Stab1::Zero, Stab1::One, Stab1::Plus, Stab1::Minus, Stab1::PlusI, Stab1::MinusI];

    pub fn bloch<T: Real>(self) -> [T; 3] {
        let (o, z) = (T::one(), T::zero());
        match self {
            Stab1::Zero => [z, z, o],
            Stab1::One => [z, z, -o],
            Stab1::Plus => [o, z, z],
            Stab1::Minus => [-o, z, z],
            Stab1::PlusI => [z, o, z],
            Stab1::MinusI => [z, -o, z],
        }
    }

    /// Amplitudes (⟨0|φ⟩, ⟨1|φ⟩).
    pub fn ket<T: Real>(self) -> [Complex<T>; 2] {
        let h = T::FRAC_1_SQRT_2();
        let (o, z) = (T::one(), T::zero());
        let c = Complex::new;
        match self {
            Stab1::Zero => [c(o, z), c(z, z)],
            Stab1::One => [c(z, z), c(o, z)],
            Stab1::Plus => [c(h, z), c(h, z)],
            Stab1::Minus => [c(h, z), c(-h, z)],
            Stab1::PlusI => [c(h, z), c(z, h)],
            Stab1::MinusI => [c(h, z), c(z, -h)],
        }
    }

    /// Gate sequence preparing exactly [`Stab1::ket`] from |0⟩ on qubit `q`.
    pub fn preparation(self, q: usize) -> Vec<Gate> {
        match self {
            Stab1::Zero => vec![],
            Stab1::One => vec![Gate::X(q)],
            Stab1::Plus => vec![Gate::H(q)],
            Stab1::Minus => vec![Gate::X(q), Gate::H(q)],
            Stab1::PlusI => vec![Gate::H(q), Gate::S(q)],
            Stab1::MinusI => vec![Gate::X(q), Gate::H(q), Gate::S(q)],
        }
    }
}

impl<T: Real> BlochState<T> {
    pub fn new(bx: T, by: T, bz: T) -> Result<Self> {
        let st = BlochState { bx, by, bz };
        let r2 = st.norm_sqr();
        if !(r2 <= T::one() + T::lit(1e-12).max(T::epsilon() * T::lit(8.0))) {
            return Err(Error::InvalidBloch(r2.to_f64_lossy().sqrt()));
        }
        Ok(st)
    }

    pub fn from_array(b: [T; 3]) -> Result<Self> {
        Self::new(b[0], b[1], b[2])
    }

    pub fn to_array(&self) -> [T; 3] {
        [self.bx, self.by, self.bz]
    }

    pub fn maximally_mixed() -> Self {
        BlochState { bx: T::zero(), by: T::zero(), bz: T::zero() }
    }

    /// |H⟩, the +1 eigenstate of the Hadamard gate.
    pub fn h_state() -> Self {
        let h = T::FRAC_1_SQRT_2();
        BlochState { bx: h, by: T::zero(), bz: h }
    }

    /// |T⟩ = (|0⟩ + e^{iπ/4}|1⟩)/√2.
    pub fn t_state() -> Self {
        let h = T::FRAC_1_SQRT_2();
        BlochState { bx: h, by: h, bz: T::zero() }
    }

    /// |F⟩, the face state with Bloch vector (1,1,1)/√3.
    pub fn f_state() -> Self {
        let a = T::one() / T::lit(3.0).sqrt();
        BlochState { bx: a, by: a, bz: a }
    }

    pub fn stabilizer(s: Stab1) -> Self {
        let b = s.bloch::<T>();
        BlochState { bx: b[0], by: b[1], bz: b[2] }
    }

    /// `α·self + (1−α)·I/2`.
    pub fn depolarized(&self, alpha: T) -> Self {
        BlochState { bx: self.bx * alpha, by: self.by * alpha, bz: self.bz * alpha }
    }

    pub fn norm_sqr(&self) -> T {
        self.bx * self.bx + self.by * self.by + self.bz * self.bz
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn l1(&self) -> T {
        self.bx.abs() + self.by.abs() + self.bz.abs()
    }

    pub fn is_pure(&self, tol: T) -> bool {
        (self.norm() - T::one()).abs() <= tol
    }

    /// Inside the stabilizer octahedron ‖b‖₁ ≤ 1.
    pub fn is_stabilizer_mixture(&self) -> bool {
        self.l1() <= T::one() + T::loose_eps()
    }

    /// Component along σ_F = (X+Y+Z)/√3.
    pub fn f(&self) -> T {
        (self.bx + self.by + self.bz) / T::lit(3.0).sqrt()
    }

    /// Component along σ_A = (X+Z−2Y)/√6.
    pub fn r_a(&self) -> T {
        (self.bx + self.bz - T::lit(2.0) * self.by) / T::lit(6.0).sqrt()
    }

    /// Component along σ_B = (X−Z)/√2.
    pub fn r_b(&self) -> T {
        (self.bx - self.bz) / T::SQRT_2()
    }

    pub fn r_f(&self) -> T {
        self.f()
    }

    /// ⟨X⟩,⟨Y⟩,⟨Z⟩ ≥ 0 and ⟨Y⟩ ≤ min(⟨X⟩,⟨Z⟩).
    pub fn in_py(&self, tol: T) -> bool {
        self.bx >= -tol
            && self.by >= -tol
            && self.bz >= -tol
            && self.by <= self.bx + tol
            && self.by <= self.bz + tol
    }

    /// Bloch vector of `U ρ U†`.
    pub fn conjugate(&self, g: Gate) -> Self {
        let (x, y, z) = (self.bx, self.by, self.bz);
        let (x, y, z) = match g {
            Gate::X(_) => (x, -y, -z),
            Gate::Y(_) => (-x, y, -z),
            Gate::Z(_) => (-x, -y, z),
            Gate::H(_) => (z, -y, x),
            Gate::S(_) => (-y, x, z),
            Gate::Sdg(_) => (y, -x, z),
            _ => panic!("{g} is not a single-qubit gate"),
        };
        BlochState { bx: x, by: y, bz: z }
    }

    pub fn conjugate_circuit(&self, gates: &[Gate]) -> Self {
        gates.iter().fold(*self, |st, &g| st.conjugate(g))
    }

    /// State vector (⟨0|ψ⟩, ⟨1|ψ⟩) of a pure state, phase fixed so ⟨0|ψ⟩ ≥ 0.
    pub fn ket(&self) -> [Complex<T>; 2] {
        let r = self.norm();
        let (x, y, z) = (self.bx / r, self.by / r, self.bz / r);
        let two = T::lit(2.0);
        let a = ((T::one() + z) / two).max(T::zero()).sqrt();
        if a <= T::epsilon() {
            return [Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero())];
        }
        [Complex::new(a, T::zero()), Complex::new(x / (two * a), y / (two * a))]
    }

    /// Bloch vector of a (possibly unnormalised) single-qubit ket.
    pub fn from_ket(k: [Complex<T>; 2]) -> Self {
        let n = k[0].norm_sqr() + k[1].norm_sqr();
        let off = k[0] * k[1].conj();
        let two = T::lit(2.0);
        BlochState {
            bx: two * off.re / n,
            by: -two * off.im / n,
            bz: (k[0].norm_sqr() - k[1].norm_sqr()) / n,
        }
    }

    pub fn to_f64(&self) -> BlochState<f64> {
        BlochState { bx: self.bx.to_f64_lossy(), by: self.by.to_f64_lossy(), bz: self.bz.to_f64_lossy() }
    }
}

/// Clifford frame change into the canonical region.
#[derive(Clone, Debug, PartialEq)]
pub struct Canonical<T> {
    /// Gates on qubit 0 realising `ρ̃ = C ρ C†`, applied first to last.
    pub gates: Vec<Gate>,
    pub state: BlochState<T>,
}

/// Maps `ρ` by a single-qubit Clifford into P_Y: all Bloch components
/// non-negative and ⟨Y⟩ the smallest. Sign flips use Pauli conjugation (plus
/// one Hadamard when an odd number of signs must change); the axis cycle uses
/// `F = H·S†` with `FXF† = Y, FYF† = Z, FZF† = X`.
pub fn canonicalize_py<T: Real>(rho: &BlochState<T>) -> Canonical<T> {
    let mut gates = Vec::new();
    let mut st = *rho;
    let neg = |s: &BlochState<T>| [s.bx < T::zero(), s.by < T::zero(), s.bz < T::zero()];
    if neg(&st).iter().filter(|&&b| b).count() % 2 == 1 {
        gates.push(Gate::H(0));
        st = st.conjugate(Gate::H(0));
    }
    let flip = match neg(&st) {
        [true, true, false] => Some(Gate::Z(0)),
        [true, false, true] => Some(Gate::Y(0)),
        [false, true, true] => Some(Gate::X(0)),
        _ => None,
    };
    if let Some(g) = flip {
        gates.push(g);
        st = st.conjugate(g);
    }
    // F maps (x, y, z) -> (z, x, y).
    let f_gate = [Gate::Sdg(0), Gate::H(0)];
    let cycles = if st.by <= st.bx && st.by <= st.bz {
        0
    } else if st.bx <= st.bz {
        1
    } else {
        2
    };
    for _ in 0..cycles {
        gates.extend_from_slice(&f_gate);
        st = st.conjugate_circuit(&f_gate);
    }
    Canonical { gates, state: st }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ket_roundtrip() {
        for b in [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [0.6, 0.0, 0.8], [0.0, -0.6, 0.8], [0.48, 0.6, 0.64]] {
            let st = BlochState::<f64>::from_array(b).unwrap();
            let back = BlochState::from_ket(st.ket());
            assert_abs_diff_eq!(back.bx, b[0], epsilon = 1e-12);
            assert_abs_diff_eq!(back.by, b[1], epsilon = 1e-12);
            assert_abs_diff_eq!(back.bz, b[2], epsilon = 1e-12);
        }
    }

    #[test]
    fn stabilizer_kets_match_bloch() {
        for s in Stab1::ALL {
            let b = BlochState::<f64>::from_ket(s.ket());
            let e = s.bloch::<f64>();
            assert_abs_diff_eq!(b.bx, e[0], epsilon = 1e-15);
            assert_abs_diff_eq!(b.by, e[1], epsilon = 1e-15);
            assert_abs_diff_eq!(b.bz, e[2], epsilon = 1e-15);
        }
    }

    #[test]
    fn canonical_z_state_is_unchanged() {
        let c = canonicalize_py(&BlochState::new(0.0, 0.0, 1.0).unwrap());
        assert!(c.gates.is_empty());
        assert_eq!(c.state.to_array(), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn canonical_flips_signs() {
        let h = -std::f64::consts::FRAC_1_SQRT_2;
        let c = canonicalize_py(&BlochState::new(h, 0.0, h).unwrap());
        assert!(c.state.in_py(0.0));
        assert_abs_diff_eq!(c.state.bx, -h);
        assert_abs_diff_eq!(c.state.bz, -h);
    }

    #[test]
    fn rejects_outside_ball() {
        assert!(BlochState::new(1.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn f32_canonicalisation() {
        let c = canonicalize_py(&BlochState::<f32>::new(-0.2, 0.5, -0.7).unwrap());
        assert!(c.state.in_py(0.0));
    }
}
