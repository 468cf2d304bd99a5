use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::MAX_QUBITS;

/// An n-qubit Pauli operator `phase · σ_0 ⊗ σ_1 ⊗ …` with each σ_j in {I, X, Y, Z}.
///
/// Bit j of `x_bits` / `z_bits` refers to qubit j; a qubit with both bits set
/// carries the Hermitian Y (not XZ). `phase` is stored mod 4 as a power of i.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliOp {
    pub n: usize,
    pub x_bits: u64,
    pub z_bits: u64,
    phase: u8,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        PauliOp { n, x_bits: 0, z_bits: 0, phase: 0 }
    }

    /// Builds a Pauli from bit masks and a phase exponent (power of i).
    pub fn new(n: usize, x_bits: u64, z_bits: u64, phase_pow: u8) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, limit: MAX_QUBITS });
        }
        let mask = full_mask(n);
        if x_bits & !mask != 0 || z_bits & !mask != 0 {
            let bad = ((x_bits | z_bits) & !mask).trailing_zeros() as usize;
            return Err(Error::QubitOutOfRange { index: bad, n });
        }
        Ok(PauliOp { n, x_bits, z_bits, phase: phase_pow & 3 })
    }

    pub fn x(n: usize, q: usize) -> Result<Self> {
        Self::single(n, q, true, false)
    }

    pub fn y(n: usize, q: usize) -> Result<Self> {
        Self::single(n, q, true, true)
    }

    pub fn z(n: usize, q: usize) -> Result<Self> {
        Self::single(n, q, false, true)
    }

    fn single(n: usize, q: usize, x: bool, z: bool) -> Result<Self> {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n });
        }
        Self::new(n, (x as u64) << q, (z as u64) << q, 0)
    }

    /// Phase as a power of i (0..4).
    pub fn phase_pow(&self) -> u8 {
        self.phase
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase & 1 == 0
    }

    pub fn with_phase(mut self, phase_pow: u8) -> Self {
        self.phase = phase_pow & 3;
        self
    }

    pub fn negate(mut self) -> Self {
        self.phase = (self.phase + 2) & 3;
        self
    }

    pub fn weight(&self) -> u32 {
        (self.x_bits | self.z_bits).count_ones()
    }

    /// The operator written as `i^k X^x Z^z`; returns k.
    pub fn xz_phase(&self) -> u8 {
        ((self.phase as u32 + (self.x_bits & self.z_bits).count_ones()) & 3) as u8
    }

    fn from_xz(n: usize, x: u64, z: u64, k: u32) -> Self {
        let phase = ((k + 4 * 64 - (x & z).count_ones()) & 3) as u8;
        PauliOp { n, x_bits: x, z_bits: z, phase }
    }

    pub fn commutes_with(&self, other: &PauliOp) -> bool {
        ((self.x_bits & other.z_bits).count_ones() + (self.z_bits & other.x_bits).count_ones())
            % 2
            == 0
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &PauliOp) -> Result<PauliOp> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let k = self.xz_phase() as u32
            + other.xz_phase() as u32
            + 2 * (self.z_bits & other.x_bits).count_ones();
        Ok(Self::from_xz(self.n, self.x_bits ^ other.x_bits, self.z_bits ^ other.z_bits, k))
    }

    /// Places a Pauli defined on a small register onto `n` qubits at positions `support`.
    pub fn embed(&self, n: usize, support: &[usize]) -> Result<PauliOp> {
        if support.len() != self.n {
            return Err(Error::DimensionMismatch(self.n, support.len()));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (local, &global) in support.iter().enumerate() {
            if global >= n {
                return Err(Error::QubitOutOfRange { index: global, n });
            }
            x |= ((self.x_bits >> local) & 1) << global;
            z |= ((self.z_bits >> local) & 1) << global;
        }
        PauliOp::new(n, x, z, self.phase)
    }

    pub fn letter(&self, q: usize) -> char {
        match ((self.x_bits >> q) & 1, (self.z_bits >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}")?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

/// Parses strings such as `"+XZI"`, `"-Y"`, `"iZZ"` or `"ZX"`; character j acts on qubit j.
impl FromStr for PauliOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (mut phase, mut rest) = (0u8, t);
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else if let Some(r) = rest.strip_prefix('-') {
            phase = 2;
            rest = r;
        }
        if let Some(r) = rest.strip_prefix('i') {
            phase = (phase + 1) & 3;
            rest = r;
        }
        let n = rest.chars().count();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Parse(format!("bad Pauli string '{s}'")));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, c) in rest.chars().enumerate() {
            match c.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q
                }
                'Z' => z |= 1 << q,
                _ => return Err(Error::Parse(format!("bad Pauli letter '{c}' in '{s}'"))),
            }
        }
        PauliOp::new(n, x, z, phase)
    }
}

impl Serialize for PauliOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliOp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Commuting Pauli generators with eigenvalue signs; represents `Π_i (I + s_i P_i)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct StabProjector {
    n: usize,
    generators: Vec<(PauliOp, i8)>,
}

impl StabProjector {
    pub fn new(n: usize, generators: Vec<(PauliOp, i8)>) -> Result<Self> {
        for (p, s) in &generators {
            if p.n != n {
                return Err(Error::DimensionMismatch(n, p.n));
            }
            if !p.is_hermitian() {
                return Err(Error::NonHermitianPauli);
            }
            if *s != 1 && *s != -1 {
                return Err(Error::InvalidParameter(format!("projector sign {s}")));
            }
        }
        for i in 0..generators.len() {
            for j in 0..i {
                if !generators[i].0.commutes_with(&generators[j].0) {
                    return Err(Error::NonCommutingGenerators);
                }
            }
        }
        Ok(StabProjector { n, generators })
    }

    pub fn identity(n: usize) -> Self {
        StabProjector { n, generators: Vec::new() }
    }

    /// Projector onto computational-basis outcomes `bits` of the listed qubits.
    pub fn basis(n: usize, qubits: &[usize], bits: &[bool]) -> Result<Self> {
        let gens = qubits
            .iter()
            .zip(bits)
            .map(|(&q, &b)| Ok((PauliOp::z(n, q)?, if b { -1 } else { 1 })))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, gens)
    }

    /// Parses generators written as signed Pauli strings, e.g. `["+ZI", "-XX"]`.
    pub fn parse(n: usize, gens: &[String]) -> Result<Self> {
        let mut out = Vec::with_capacity(gens.len());
        for g in gens {
            let p: PauliOp = g.parse()?;
            if !p.is_hermitian() {
                return Err(Error::NonHermitianPauli);
            }
            let sign = if p.phase_pow() == 2 { -1 } else { 1 };
            out.push((p.with_phase(0), sign));
        }
        Self::new(n, out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[(PauliOp, i8)] {
        &self.generators
    }

    /// Number of independent generators (GF(2) rank of the symplectic vectors).
    pub fn independent_count(&self) -> usize {
        let mut rows: Vec<u128> = self
            .generators
            .iter()
            .map(|(p, _)| (p.x_bits as u128) | ((p.z_bits as u128) << 64))
            .collect();
        let mut rank = 0;
        for bit in 0..128 {
            let Some(piv) = (rank..rows.len()).find(|&r| (rows[r] >> bit) & 1 == 1) else {
                continue;
            };
            rows.swap(rank, piv);
            for r in 0..rows.len() {
                if r != rank && (rows[r] >> bit) & 1 == 1 {
                    rows[r] ^= rows[rank];
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn embed(&self, n: usize, support: &[usize]) -> Result<StabProjector> {
        let gens = self
            .generators
            .iter()
            .map(|(p, s)| Ok((p.embed(n, support)?, *s)))
            .collect::<Result<Vec<_>>>()?;
        StabProjector::new(n, gens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_roundtrip() {
        for s in ["+XZI", "-Y", "+iZZ", "-iXYZ"] {
            let p: PauliOp = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        let p: PauliOp = "ZX".parse().unwrap();
        assert_eq!(p.to_string(), "+ZX");
    }

    #[test]
    fn xy_product_is_iz() {
        let x = PauliOp::x(1, 0).unwrap();
        let y = PauliOp::y(1, 0).unwrap();
        let z = PauliOp::z(1, 0).unwrap();
        assert_eq!(x.mul(&y).unwrap(), z.with_phase(1));
        assert_eq!(y.mul(&x).unwrap(), z.with_phase(3));
        assert_eq!(y.mul(&y).unwrap(), PauliOp::identity(1));
    }

    #[test]
    fn anticommuting_generators_rejected() {
        let g = vec![(PauliOp::x(1, 0).unwrap(), 1), (PauliOp::z(1, 0).unwrap(), 1)];
        assert_eq!(StabProjector::new(1, g), Err(Error::NonCommutingGenerators));
    }

    #[test]
    fn rank_counts_independent_generators() {
        let gens = ["+ZZI", "+IZZ", "+ZIZ"].map(String::from);
        let p = StabProjector::parse(3, &gens).unwrap();
        assert_eq!(p.independent_count(), 2);
    }
}
