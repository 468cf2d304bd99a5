use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::gate::Gate;
use super::pauli::{full_mask, PauliOp, StabProjector};
use super::MAX_QUBITS;

/// Global factor `2^(sqrt2_pow/2) · e^{iπ·eighth/4} · residual`.
///
/// Clifford gates and Pauli projections only ever touch the first two parts,
/// so those stay exact; `residual` absorbs user-supplied complex scalings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChScalar {
    pub sqrt2_pow: i32,
    pub eighth: u8,
    pub residual: Complex64,
}

impl ChScalar {
    pub const ONE: ChScalar = ChScalar { sqrt2_pow: 0, eighth: 0, residual: Complex64::new(1.0, 0.0) };

    pub fn value(&self) -> Complex64 {
        let mag = 2f64.powf(self.sqrt2_pow as f64 / 2.0);
        Complex64::from_polar(mag, PI * self.eighth as f64 / 4.0) * self.residual
    }

    pub fn magnitude(&self) -> f64 {
        2f64.powf(self.sqrt2_pow as f64 / 2.0) * self.residual.norm()
    }

    fn mul_eighth(&mut self, k: u32) {
        self.eighth = ((self.eighth as u32 + k) & 7) as u8;
    }
}

/// Pure stabilizer state in CH form: `ω · U_C · U_H · |s⟩`.
///
/// `U_C` is a Clifford built from S, CZ and CX (so `U_C|0⟩ = |0⟩`), stored
/// through its inverse action on Paulis:
/// `U_C† Z_p U_C = Π_j Z_j^{G[p][j]}` and
/// `U_C† X_p U_C = i^{γ_p} Π_j X_j^{F[p][j]} Π_j Z_j^{M[p][j]}`.
/// `U_H` applies a Hadamard on each qubit whose bit in `v` is set.
/// Row p of each matrix is a bit mask over columns.
#[derive(Clone, Debug)]
pub struct StabState {
    n: usize,
    f: Rows,
    g: Rows,
    m: Rows,
    gamma: Packed<u8, 16>,
    v: u64,
    s: u64,
    omega: ChScalar,
    null: bool,
}

/// Short rows live inline so that cloning a small state is a plain copy.
#[derive(Clone, Debug)]
enum Packed<T: Copy + Default, const N: usize> {
    Inline { len: usize, data: [T; N] },
    Heap(Vec<T>),
}

impl<T: Copy + Default, const N: usize> From<Vec<T>> for Packed<T, N> {
    fn from(v: Vec<T>) -> Self {
        if v.len() <= N {
            let mut data = [T::default(); N];
            data[..v.len()].copy_from_slice(&v);
            Packed::Inline { len: v.len(), data }
        } else {
            Packed::Heap(v)
        }
    }
}

impl<T: Copy + Default, const N: usize> FromIterator<T> for Packed<T, N> {
    fn from_iter<I: IntoIterator<Item = T>>(it: I) -> Self {
        let mut data = [T::default(); N];
        let mut len = 0;
        let mut it = it.into_iter();
        for x in it.by_ref() {
            if len == N {
                let mut v = data.to_vec();
                v.push(x);
                v.extend(it);
                return Packed::Heap(v);
            }
            data[len] = x;
            len += 1;
        }
        Packed::Inline { len, data }
    }
}

impl<T: Copy + Default, const N: usize> std::ops::Deref for Packed<T, N> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        match self {
            Packed::Inline { len, data } => &data[..*len],
            Packed::Heap(v) => v,
        }
    }
}

impl<T: Copy + Default, const N: usize> std::ops::DerefMut for Packed<T, N> {
    fn deref_mut(&mut self) -> &mut [T] {
        match self {
            Packed::Inline { len, data } => &mut data[..*len],
            Packed::Heap(v) => v,
        }
    }
}

type Rows = Packed<u64, 8>;

fn bits(mut x: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            None
        } else {
            let j = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(j)
        }
    })
}

fn parity(x: u64) -> u32 {
    x.count_ones() & 1
}

fn i_pow(k: u32) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl StabState {
    /// |0…0⟩ on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, limit: MAX_QUBITS });
        }
        let id: Rows = (0..n).map(|j| 1u64 << j).collect();
        Ok(StabState {
            n,
            f: id.clone(),
            g: id,
            m: vec![0; n].into(),
            gamma: vec![0; n].into(),
            v: 0,
            s: 0,
            omega: ChScalar::ONE,
            null: false,
        })
    }

    /// Computational basis state |x⟩ with bit j of `x` on qubit j.
    pub fn basis(n: usize, x: u64) -> Result<Self> {
        let mut st = Self::zero(n)?;
        if x & !full_mask(n) != 0 {
            return Err(Error::QubitOutOfRange { index: (x & !full_mask(n)).trailing_zeros() as usize, n });
        }
        st.s = x;
        Ok(st)
    }

    /// `circuit` applied to |0…0⟩.
    pub fn from_circuit(n: usize, circuit: &[Gate]) -> Result<Self> {
        Self::zero(n)?.apply_circuit(circuit)
    }

    /// The equatorial state `2^{-n/2} Σ_x i^{xᵀAx} |x⟩`.
    pub fn equatorial(a: &EquatorialMatrix) -> Result<Self> {
        let mut st = Self::zero(a.n)?;
        for j in 0..a.n {
            let above = if j >= 63 { 0 } else { u64::MAX << (j + 1) };
            for k in bits(a.off[j] & above) {
                st.left_cz(j, k);
            }
            for _ in 0..a.diag[j] {
                st.left_s(j);
            }
        }
        st.v = full_mask(a.n);
        Ok(st)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_null(&self) -> bool {
        self.null
    }

    pub fn scalar(&self) -> ChScalar {
        self.omega
    }

    /// Euclidean norm of the represented vector.
    pub fn norm(&self) -> f64 {
        if self.null {
            0.0
        } else {
            self.omega.magnitude()
        }
    }

    /// Unit-modulus global phase of the represented vector (1 for null states).
    pub fn phase(&self) -> Complex64 {
        let w = self.omega.value();
        if self.null || w.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            w / w.norm()
        }
    }

    /// Same state multiplied by a complex scalar.
    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        if c == Complex64::new(0.0, 0.0) {
            out.null = true;
        }
        out.omega.residual *= c;
        out
    }

    /// Same ray rescaled to unit norm, keeping the phase. Null states stay null.
    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        if !self.null {
            out.omega.sqrt2_pow = 0;
            let r = out.omega.residual;
            out.omega.residual = r / r.norm();
        }
        out
    }

    pub fn apply_gate(&self, gate: Gate) -> Result<Self> {
        let mut out = self.clone();
        out.apply_gate_in_place(gate)?;
        Ok(out)
    }

    pub fn apply_circuit(&self, circuit: &[Gate]) -> Result<Self> {
        let mut out = self.clone();
        for &g in circuit {
            out.apply_gate_in_place(g)?;
        }
        Ok(out)
    }

    pub fn apply_gate_in_place(&mut self, gate: Gate) -> Result<()> {
        gate.check(self.n)?;
        if self.null {
            return Ok(());
        }
        match gate {
            Gate::S(q) => self.left_s(q),
            Gate::Sdg(q) => self.left_sdg(q),
            Gate::H(q) => self.left_h(q),
            Gate::X(q) => self.left_pauli(1 << q, 0, 0),
            Gate::Y(q) => self.left_pauli(1 << q, 1 << q, 1),
            Gate::Z(q) => self.left_pauli(0, 1 << q, 0),
            Gate::CX(c, t) => self.left_cx(c, t),
            Gate::CZ(a, b) => self.left_cz(a, b),
            Gate::Swap(a, b) => self.left_swap(a, b),
        }
        Ok(())
    }

    /// `p|ψ⟩` for any Pauli (phase included).
    pub fn apply_pauli(&self, p: &PauliOp) -> Result<Self> {
        if p.n != self.n {
            return Err(Error::DimensionMismatch(self.n, p.n));
        }
        let mut out = self.clone();
        if !out.null {
            out.left_pauli(p.x_bits, p.z_bits, p.xz_phase() as u32);
        }
        Ok(out)
    }

    /// `(I + sign·p)/2 |ψ⟩` together with the norm ratio ‖output‖/‖input‖.
    pub fn project_pauli(&self, p: &PauliOp, sign: i8) -> Result<(Self, f64)> {
        if p.n != self.n {
            return Err(Error::DimensionMismatch(self.n, p.n));
        }
        if !p.is_hermitian() {
            return Err(Error::NonHermitianPauli);
        }
        let mut out = self.clone();
        if out.null {
            return Ok((out, 0.0));
        }
        let (k, t) = out.pauli_through(p.x_bits, p.z_bits, p.xz_phase() as u32);
        let k = if sign < 0 { k + 2 } else { k } & 3;
        if t == out.s {
            // Eigenstate: k is even because p is Hermitian.
            if k == 0 {
                return Ok((out, 1.0));
            }
            out.null = true;
            return Ok((out, 0.0));
        }
        let s = out.s;
        match out.superpose(s, t, k) {
            Some((e, eighth)) => {
                out.omega.sqrt2_pow += e - 2;
                out.omega.mul_eighth(eighth);
                Ok((out, FRAC_1_SQRT_2))
            }
            None => {
                out.null = true;
                Ok((out, 0.0))
            }
        }
    }

    /// Applies every generator of the projector in turn; returns the product of norm ratios.
    pub fn project(&self, proj: &StabProjector) -> Result<(Self, f64)> {
        if proj.n() != self.n {
            return Err(Error::DimensionMismatch(self.n, proj.n()));
        }
        let mut out = self.clone();
        let mut norm = 1.0;
        for (p, s) in proj.generators() {
            let (next, r) = out.project_pauli(p, *s)?;
            out = next;
            norm *= r;
            if out.null {
                return Ok((out, 0.0));
            }
        }
        Ok((out, norm))
    }

    /// Amplitude ⟨x|ψ⟩.
    pub fn basis_amplitude(&self, x: u64) -> Complex64 {
        if self.null {
            return Complex64::new(0.0, 0.0);
        }
        // U_C† |x⟩ = U_C† X^x U_C |0⟩ = i^ph |a⟩.
        let (mut ph, mut a, mut b) = (0u32, 0u64, 0u64);
        for j in bits(x) {
            ph += self.gamma[j] as u32 + 2 * (b & self.f[j]).count_ones();
            a ^= self.f[j];
            b ^= self.m[j];
        }
        if (a ^ self.s) & !self.v != 0 {
            return Complex64::new(0.0, 0.0);
        }
        let sign = if parity(a & self.s & self.v) == 1 { -1.0 } else { 1.0 };
        let h = self.v.count_ones() as f64;
        self.omega.value() * i_pow(4 - (ph & 3)) * sign * 2f64.powf(-h / 2.0)
    }

    /// Exact ⟨self|other⟩.
    pub fn inner_product(&self, other: &StabState) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        if self.null || other.null {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let mut chi = other.clone();
        for g in self.uc_inverse_gates().iter().rev() {
            chi.apply_gate_in_place(*g)?;
        }
        for q in bits(self.v) {
            chi.left_h(q);
        }
        Ok(self.omega.value().conj() * chi.basis_amplitude(self.s))
    }

    /// ⟨φ_A|ψ⟩ for the equatorial state indexed by `a`.
    pub fn equatorial_overlap(&self, a: &EquatorialMatrix) -> Result<Complex64> {
        if a.n != self.n {
            return Err(Error::DimensionMismatch(self.n, a.n));
        }
        StabState::equatorial(a)?.inner_product(self)
    }

    /// Tensor product `self ⊗ other`; `other`'s qubits follow `self`'s.
    pub fn tensor(&self, other: &StabState) -> Result<StabState> {
        let n = self.n + other.n;
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, limit: MAX_QUBITS });
        }
        let sh = self.n;
        let join = |a: &[u64], b: &[u64]| -> Rows { a.iter().copied().chain(b.iter().map(|r| r << sh)).collect() };
        let f = join(&self.f, &other.f);
        let g = join(&self.g, &other.g);
        let m = join(&self.m, &other.m);
        let gamma = self.gamma.iter().chain(other.gamma.iter()).copied().collect();
        let omega = ChScalar {
            sqrt2_pow: self.omega.sqrt2_pow + other.omega.sqrt2_pow,
            eighth: (self.omega.eighth + other.omega.eighth) & 7,
            residual: self.omega.residual * other.omega.residual,
        };
        Ok(StabState {
            n,
            f,
            g,
            m,
            gamma,
            v: self.v | (other.v << sh),
            s: self.s | (other.s << sh),
            omega,
            null: self.null || other.null,
        })
    }

    // ---- left multiplication by C-type gates (row updates) ----

    fn left_s(&mut self, q: usize) {
        self.gamma[q] = (self.gamma[q] + 3) & 3;
        self.m[q] ^= self.g[q];
    }

    fn left_sdg(&mut self, q: usize) {
        self.gamma[q] = (self.gamma[q] + 1) & 3;
        self.m[q] ^= self.g[q];
    }

    fn left_cz(&mut self, a: usize, b: usize) {
        self.m[a] ^= self.g[b];
        self.m[b] ^= self.g[a];
    }

    fn left_cx(&mut self, c: usize, t: usize) {
        let extra = 2 * (self.m[c] & self.f[t]).count_ones();
        self.gamma[c] = ((self.gamma[c] as u32 + self.gamma[t] as u32 + extra) & 3) as u8;
        self.g[t] ^= self.g[c];
        self.f[c] ^= self.f[t];
        self.m[c] ^= self.m[t];
    }

    fn left_swap(&mut self, a: usize, b: usize) {
        self.f.swap(a, b);
        self.g.swap(a, b);
        self.m.swap(a, b);
        self.gamma.swap(a, b);
    }

    fn left_pauli(&mut self, x: u64, z: u64, k: u32) {
        let (ph, t) = self.pauli_through(x, z, k);
        self.s = t;
        self.omega.mul_eighth(2 * ph as u32);
    }

    fn left_h(&mut self, q: usize) {
        let (k1, t) = self.pauli_through(1 << q, 0, 0);
        let (k2, u) = self.pauli_through(0, 1 << q, 0);
        let delta = (k2 + 4 - k1) & 3;
        match self.superpose(t, u, delta) {
            Some((e, eighth)) => {
                self.omega.sqrt2_pow += e - 1;
                self.omega.mul_eighth(2 * k1 as u32 + eighth);
            }
            None => self.null = true,
        }
    }

    // ---- right multiplication of U_C by C-type gates (column updates) ----

    fn right_s(&mut self, q: usize) {
        for p in 0..self.n {
            if (self.f[p] >> q) & 1 == 1 {
                self.m[p] ^= 1 << q;
                self.gamma[p] = (self.gamma[p] + 3) & 3;
            }
        }
    }

    fn right_cz(&mut self, a: usize, b: usize) {
        for p in 0..self.n {
            let fa = (self.f[p] >> a) & 1;
            let fb = (self.f[p] >> b) & 1;
            self.m[p] ^= (fa << b) | (fb << a);
            if fa & fb == 1 {
                self.gamma[p] = (self.gamma[p] + 2) & 3;
            }
        }
    }

    fn right_cx(&mut self, c: usize, t: usize) {
        for p in 0..self.n {
            self.f[p] ^= ((self.f[p] >> c) & 1) << t;
            self.m[p] ^= ((self.m[p] >> t) & 1) << c;
            self.g[p] ^= ((self.g[p] >> t) & 1) << c;
        }
    }

    fn right_swap(&mut self, a: usize, b: usize) {
        let sw = |r: u64| {
            let d = ((r >> a) ^ (r >> b)) & 1;
            r ^ (d << a) ^ (d << b)
        };
        for p in 0..self.n {
            self.f[p] = sw(self.f[p]);
            self.g[p] = sw(self.g[p]);
            self.m[p] = sw(self.m[p]);
        }
    }

    /// For `P = i^k X^x Z^z`, returns `(ph, t)` with `P U_C U_H |s⟩ = i^ph U_C U_H |t⟩`.
    fn pauli_through(&self, x: u64, z: u64, k: u32) -> (u32, u64) {
        let (mut ph, mut a, mut b) = (k, 0u64, 0u64);
        for j in bits(x) {
            ph += self.gamma[j] as u32 + 2 * (b & self.f[j]).count_ones();
            a ^= self.f[j];
            b ^= self.m[j];
        }
        for j in bits(z) {
            b ^= self.g[j];
        }
        let v = self.v;
        ph += 2 * (a & b & v).count_ones();
        let a2 = (a & !v) | (b & v);
        let b2 = (b & !v) | (a & v);
        ph += 2 * (b2 & self.s).count_ones();
        (ph & 3, self.s ^ a2)
    }

    /// Rewrites `U_H (|t⟩ + i^δ |u⟩)` as `c · W · U_H' |s'⟩`, folding the C-type `W`
    /// into `U_C` and updating `v`, `s`. Returns `c` as (power of √2, eighth-root
    /// exponent), or `None` when the two terms cancel.
    fn superpose(&mut self, t: u64, u: u64, delta: u32) -> Option<(i32, u32)> {
        let delta = delta & 3;
        if t == u {
            self.s = t;
            return match delta {
                0 => Some((2, 0)),
                1 => Some((1, 1)),
                2 => None,
                _ => Some((1, 7)),
            };
        }
        let diff = t ^ u;
        let (mut t, mut u) = (t, u);
        let no_h = diff & !self.v;
        let q;
        if no_h != 0 {
            q = no_h.trailing_zeros() as usize;
            for j in bits(diff & !(1 << q)) {
                if (self.v >> j) & 1 == 0 {
                    self.right_cx(q, j);
                } else {
                    self.right_cz(q, j);
                }
                t ^= ((t >> q) & 1) << j;
                u ^= ((u >> q) & 1) << j;
            }
        } else {
            q = diff.trailing_zeros() as usize;
            for j in bits(diff & !(1 << q)) {
                self.right_cx(j, q);
                t ^= ((t >> q) & 1) << j;
                u ^= ((u >> q) & 1) << j;
            }
        }
        // Now t and u differ only on qubit q; write the pair as i^ph (|0⟩ + i^a |1⟩) there.
        let (ph, a) = if (t >> q) & 1 == 0 { (0, delta) } else { (delta, (4 - delta) & 3) };
        let rest = t & !(1 << q);
        let mut eighth = 2 * ph;
        if no_h != 0 {
            if a & 1 == 1 {
                self.right_s(q);
            }
            self.v |= 1 << q;
            self.s = rest | (((a >> 1) as u64) << q);
        } else {
            match a {
                0 | 2 => {
                    self.v &= !(1 << q);
                    self.s = rest | (((a >> 1) as u64) << q);
                }
                1 => {
                    self.right_s(q);
                    self.s = rest | (1 << q);
                    eighth += 1;
                }
                _ => {
                    self.right_s(q);
                    self.s = rest;
                    eighth += 7;
                }
            }
        }
        Some((1, eighth))
    }

    /// Gates `g_1 … g_k` with `U_C^{-1} = g_1 ⋯ g_k` (as an operator product).
    fn uc_inverse_gates(&self) -> Vec<Gate> {
        let mut w = StabState {
            n: self.n,
            f: self.f.clone(),
            g: self.g.clone(),
            m: self.m.clone(),
            gamma: self.gamma.clone(),
            v: 0,
            s: 0,
            omega: ChScalar::ONE,
            null: false,
        };
        let n = self.n;
        let mut gates = Vec::new();
        // Column-reduce G to the identity; F follows since F Gᵀ = I.
        for i in 0..n {
            let piv = (i..n)
                .find(|&j| (w.g[i] >> j) & 1 == 1)
                .expect("CH tableau G must be invertible");
            if piv != i {
                w.right_swap(i, piv);
                gates.push(Gate::Swap(i, piv));
            }
            for c in bits(w.g[i] & !(1 << i)) {
                w.right_cx(c, i);
                gates.push(Gate::CX(c, i));
            }
        }
        debug_assert!((0..n).all(|p| w.f[p] == 1 << p && w.g[p] == 1 << p));
        for a in 0..n {
            let above = if a >= 63 { 0 } else { u64::MAX << (a + 1) };
            for b in bits(w.m[a] & above) {
                w.right_cz(a, b);
                gates.push(Gate::CZ(a, b));
            }
        }
        for q in 0..n {
            if (w.m[q] >> q) & 1 == 1 {
                w.right_s(q);
                gates.push(Gate::S(q));
            }
            if w.gamma[q] == 2 {
                w.right_s(q);
                w.right_s(q);
                gates.push(Gate::S(q));
                gates.push(Gate::S(q));
            }
        }
        debug_assert!((0..n).all(|p| w.m[p] == 0 && w.gamma[p] == 0));
        gates
    }
}

/// Symmetric matrix indexing an equatorial state: diagonal entries mod 4,
/// off-diagonal entries binary.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EquatorialMatrix {
    pub n: usize,
    pub diag: Vec<u8>,
    /// Row masks of the off-diagonal part (symmetric, zero diagonal).
    pub off: Vec<u64>,
}

impl EquatorialMatrix {
    pub fn zero(n: usize) -> Self {
        EquatorialMatrix { n, diag: vec![0; n], off: vec![0; n] }
    }

    pub fn new(n: usize, diag: Vec<u8>, off: Vec<u64>) -> Result<Self> {
        if diag.len() != n || off.len() != n {
            return Err(Error::InvalidParameter("equatorial matrix shape".into()));
        }
        for j in 0..n {
            if (off[j] >> j) & 1 == 1 || off[j] & !full_mask(n) != 0 {
                return Err(Error::InvalidParameter("equatorial matrix off-diagonal".into()));
            }
            for k in bits(off[j]) {
                if (off[k] >> j) & 1 == 0 {
                    return Err(Error::InvalidParameter("equatorial matrix not symmetric".into()));
                }
            }
        }
        Ok(EquatorialMatrix { n, diag: diag.into_iter().map(|d| d & 3).collect(), off })
    }

    /// Uniformly random matrix.
    pub fn random<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut off = vec![0u64; n];
        for j in 0..n {
            for k in (j + 1)..n {
                if rng.gen::<bool>() {
                    off[j] |= 1 << k;
                    off[k] |= 1 << j;
                }
            }
        }
        let diag = (0..n).map(|_| rng.gen_range(0..4u8)).collect();
        EquatorialMatrix { n, diag, off }
    }

    /// Number of distinct matrices, if it fits in a u64.
    pub fn count(n: usize) -> Option<u64> {
        let bits = 2 * n + n * n.saturating_sub(1) / 2;
        (bits < 64).then(|| 1u64 << bits)
    }

    /// Matrix with the given index in `0..count(n)`.
    pub fn from_index(n: usize, mut idx: u64) -> Self {
        let mut diag = vec![0u8; n];
        for d in diag.iter_mut() {
            *d = (idx & 3) as u8;
            idx >>= 2;
        }
        let mut off = vec![0u64; n];
        for j in 0..n {
            for k in (j + 1)..n {
                if idx & 1 == 1 {
                    off[j] |= 1 << k;
                    off[k] |= 1 << j;
                }
                idx >>= 1;
            }
        }
        EquatorialMatrix { n, diag, off }
    }

    /// Exponent of i in the amplitude of |x⟩ (times 2^{n/2}).
    pub fn quadratic_form(&self, x: u64) -> u32 {
        let mut e = 0u32;
        for j in bits(x) {
            let above = if j >= 63 { 0 } else { u64::MAX << (j + 1) };
            e += self.diag[j] as u32 + 2 * parity(self.off[j] & x & above);
        }
        e & 3
    }
}
