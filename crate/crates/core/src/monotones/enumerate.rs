//! Exhaustive list of pure stabilizer states for up to three qubits.

use std::collections::{HashSet, VecDeque};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::stab_core::Gate;

/// Largest qubit count for which [`stabilizer_states`] enumerates.
pub const MAX_ENUM_QUBITS: usize = 3;

/// `2ⁿ Π_{k=1..n} (2ᵏ + 1)`.
pub fn stabilizer_state_count(n: usize) -> u64 {
    (1..=n as u32).fold(1u64 << n, |acc, k| acc * ((1u64 << k) + 1))
}

fn apply(amps: &[Complex64], g: Gate) -> Vec<Complex64> {
    let mut out = amps.to_vec();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match g {
        Gate::H(q) => {
            let b = 1 << q;
            for x in 0..amps.len() {
                if x & b == 0 {
                    let (a0, a1) = (amps[x], amps[x | b]);
                    out[x] = (a0 + a1) * h;
                    out[x | b] = (a0 - a1) * h;
                }
            }
        }
        Gate::S(q) => {
            for (x, v) in out.iter_mut().enumerate() {
                if x >> q & 1 == 1 {
                    *v *= Complex64::i();
                }
            }
        }
        Gate::CX(c, t) => {
            for x in 0..amps.len() {
                if x >> c & 1 == 1 {
                    out[x] = amps[x ^ (1 << t)];
                }
            }
        }
        _ => unreachable!("enumeration only uses H, S and CX"),
    }
    out
}

/// Rounded amplitudes after fixing the global phase (first non-zero entry real positive).
fn key(amps: &[Complex64]) -> Vec<(i64, i64)> {
    let first = amps.iter().find(|a| a.norm() > 1e-6).copied().unwrap_or(Complex64::new(1.0, 0.0));
    let rot = first.conj() / first.norm();
    amps.iter()
        .map(|a| {
            let v = a * rot;
            ((v.re * 1e6).round() as i64, (v.im * 1e6).round() as i64)
        })
        .collect()
}

fn enumerate(n: usize) -> Vec<Vec<Complex64>> {
    let mut gates = Vec::new();
    for q in 0..n {
        gates.push(Gate::H(q));
        gates.push(Gate::S(q));
        for t in 0..n {
            if t != q {
                gates.push(Gate::CX(q, t));
            }
        }
    }
    let mut start = vec![Complex64::new(0.0, 0.0); 1 << n];
    start[0] = Complex64::new(1.0, 0.0);
    let mut seen = HashSet::new();
    seen.insert(key(&start));
    let mut out = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &g in &gates {
            let w = apply(&v, g);
            if seen.insert(key(&w)) {
                out.push(w.clone());
                queue.push_back(w);
            }
        }
    }
    out
}

/// Every pure n-qubit stabilizer state (up to global phase) as a dense vector,
/// generated by closing `|0…0⟩` under H, S and CX. Cached per n.
pub fn stabilizer_states(n: usize) -> Result<&'static [Vec<Complex64>]> {
    static CACHE: [OnceLock<Vec<Vec<Complex64>>>; MAX_ENUM_QUBITS + 1] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if n == 0 || n > MAX_ENUM_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "stabilizer enumeration supports 1..={MAX_ENUM_QUBITS} qubits, got {n}"
        )));
    }
    Ok(CACHE[n].get_or_init(|| enumerate(n)).as_slice())
}

/// `P|c⟩ = i^{|x∧z|} (−1)^{|z∧c|} |c ⊕ x⟩` for the Hermitian Pauli with masks (x, z).
pub(crate) fn pauli_action(x: usize, z: usize, c: usize) -> (usize, Complex64) {
    let ys = (x & z).count_ones();
    let sign = if (z & c).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
    let ph = [Complex64::new(1.0, 0.0), Complex64::i(), Complex64::new(-1.0, 0.0), -Complex64::i()][(ys % 4) as usize];
    (c ^ x, ph * sign)
}

/// Masks of the Pauli with index `p`; qubit j takes letter `(p >> 2j) & 3` in I, X, Y, Z order.
pub(crate) fn pauli_masks(n: usize, p: usize) -> (usize, usize) {
    let (mut x, mut z) = (0, 0);
    for j in 0..n {
        match (p >> (2 * j)) & 3 {
            1 => x |= 1 << j,
            2 => {
                x |= 1 << j;
                z |= 1 << j;
            }
            3 => z |= 1 << j,
            _ => {}
        }
    }
    (x, z)
}

/// `⟨φ|P|φ⟩` for every Pauli index.
pub(crate) fn pauli_vector(n: usize, phi: &[Complex64]) -> Vec<f64> {
    (0..1usize << (2 * n))
        .map(|p| {
            let (x, z) = pauli_masks(n, p);
            (0..phi.len())
                .map(|c| {
                    let (r, v) = pauli_action(x, z, c);
                    phi[r].conj() * v * phi[c]
                })
                .sum::<Complex64>()
                .re
        })
        .collect()
}
