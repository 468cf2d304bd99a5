//! Mixed-state stabilizer-rank simulation: random sparsification of stabilizer
//! expansions, norm estimation over random equatorial states, and bit-string
//! sampling by a chain of conditional probabilities.

use std::time::Instant;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::stab1_state;
use crate::error::{Error, Result};
use crate::monotones::{extent_pure_1q, octahedron_weights, optimal_mixture_1q, BlochState};
use crate::parallel::{map_samples, sample_rng};
use crate::stab_core::{EquatorialMatrix, Gate, PauliOp, StabState};

/// Largest register on which dense amplitudes are computed.
pub const MAX_DENSE_QUBITS: usize = 20;

/// Expansion `Σ_j c_j |φ_j⟩` of a unit vector on a group of consecutive qubits.
#[derive(Clone, Debug)]
pub struct SparseBlock {
    n: usize,
    coeffs: Vec<Complex64>,
    terms: Vec<StabState>,
    picker: WeightedIndex<f64>,
    l1: f64,
    c_const: f64,
}

impl SparseBlock {
    /// Terms are renormalized (their norms move into the coefficients) and
    /// zero terms are dropped. The expansion must describe a unit vector.
    pub fn new(coeffs: Vec<Complex64>, terms: Vec<StabState>) -> Result<Self> {
        if terms.is_empty() || coeffs.len() != terms.len() {
            return Err(Error::InvalidDecomposition("empty or mismatched stabilizer expansion".into()));
        }
        let n = terms[0].n();
        let (mut cs, mut ts) = (Vec::new(), Vec::new());
        for (c, t) in coeffs.into_iter().zip(terms) {
            if t.n() != n {
                return Err(Error::DimensionMismatch(n, t.n()));
            }
            let c = c * t.norm();
            if c.norm() > 0.0 {
                cs.push(c);
                ts.push(t.normalized());
            }
        }
        if cs.is_empty() {
            return Err(Error::InvalidDecomposition("expansion has no non-zero term".into()));
        }
        // ov[j] = ⟨ψ|φ_j⟩
        let mut ov = vec![Complex64::new(0.0, 0.0); ts.len()];
        for (j, tj) in ts.iter().enumerate() {
            for (ci, ti) in cs.iter().zip(&ts) {
                ov[j] += ci.conj() * ti.inner_product(tj)?;
            }
        }
        let norm_sqr: f64 = cs.iter().zip(&ov).map(|(c, o)| (c * o).re).sum();
        if (norm_sqr - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidDecomposition(format!("expansion has squared norm {norm_sqr}, expected 1")));
        }
        let l1: f64 = cs.iter().map(|c| c.norm()).sum();
        let c_const = l1 * cs.iter().zip(&ov).map(|(c, o)| c.norm() * o.norm_sqr()).sum::<f64>() / norm_sqr;
        let picker = WeightedIndex::new(cs.iter().map(|c| c.norm()))
            .map_err(|e| Error::InvalidDecomposition(e.to_string()))?;
        Ok(SparseBlock { n, coeffs: cs, terms: ts, picker, l1, c_const })
    }

    /// Extent-optimal expansion of a pure single-qubit state.
    pub fn pure_1q(psi: &BlochState<f64>) -> Result<Self> {
        let ext = extent_pure_1q(&psi.depolarized(1.0 / psi.norm()))?;
        let (cs, ts) = ext.terms.iter().map(|(c, s)| (*c, stab1_state(*s))).unzip();
        Self::new(cs, ts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn terms(&self) -> &[StabState] {
        &self.terms
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    /// `‖c‖₁ Σ_j |c_j| |⟨ψ|φ_j⟩|²`.
    pub fn c_const(&self) -> f64 {
        self.c_const
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (Complex64, &StabState) {
        let j = self.picker.sample(rng);
        let c = self.coeffs[j];
        (c / c.norm(), &self.terms[j])
    }
}

/// Stabilizer expansion of a pure state, stored as a tensor product of blocks.
#[derive(Clone, Debug)]
pub struct SparseDecomposition {
    n: usize,
    blocks: Vec<SparseBlock>,
}

impl SparseDecomposition {
    pub fn new(coeffs: Vec<Complex64>, terms: Vec<StabState>) -> Result<Self> {
        Self::from_blocks(vec![SparseBlock::new(coeffs, terms)?])
    }

    pub fn from_blocks(blocks: Vec<SparseBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidDecomposition("no blocks".into()));
        }
        let n: usize = blocks.iter().map(|b| b.n).sum();
        if n > crate::stab_core::MAX_QUBITS {
            return Err(Error::TooManyQubits { n, limit: crate::stab_core::MAX_QUBITS });
        }
        Ok(SparseDecomposition { n, blocks })
    }

    /// Product of extent-optimal single-qubit expansions; every state must be pure.
    pub fn pure_product(states: &[BlochState<f64>]) -> Result<Self> {
        Self::from_blocks(states.iter().map(SparseBlock::pure_1q).collect::<Result<_>>()?)
    }

    pub fn tensor(&self, other: &SparseDecomposition) -> Result<Self> {
        Self::from_blocks(self.blocks.iter().chain(&other.blocks).cloned().collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[SparseBlock] {
        &self.blocks
    }

    /// `‖c‖₁` of the full expansion.
    pub fn l1(&self) -> f64 {
        self.blocks.iter().map(|b| b.l1).product()
    }

    /// `‖c‖₁²`.
    pub fn xi(&self) -> f64 {
        self.l1().powi(2)
    }

    /// Number of terms of the full expansion (saturating).
    pub fn len(&self) -> usize {
        self.blocks.iter().fold(1usize, |a, b| a.saturating_mul(b.terms.len()))
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The constant C of the full expansion (multiplicative over blocks).
    pub fn c_const(&self) -> f64 {
        self.blocks.iter().map(|b| b.c_const).product()
    }

    /// Critical sparsification precision `8(C − 1)/‖c‖₁²`.
    pub fn delta_c(&self) -> f64 {
        8.0 * (self.c_const() - 1.0) / self.xi()
    }

    /// Full list of `(c, |φ⟩)`; fails when it would exceed `limit` terms.
    pub fn expand(&self, limit: usize) -> Result<Vec<(Complex64, StabState)>> {
        if self.len() > limit {
            return Err(Error::InvalidParameter(format!("expansion has more than {limit} terms")));
        }
        let mut out: Vec<(Complex64, Option<StabState>)> = vec![(Complex64::new(1.0, 0.0), None)];
        for b in &self.blocks {
            let mut next = Vec::with_capacity(out.len() * b.terms.len());
            for (c, s) in &out {
                for (cb, sb) in b.coeffs.iter().zip(&b.terms) {
                    let st = match s {
                        Some(s) => s.tensor(sb)?,
                        None => sb.clone(),
                    };
                    next.push((c * cb, Some(st)));
                }
            }
            out = next;
        }
        Ok(out.into_iter().map(|(c, s)| (c, s.expect("at least one block"))).collect())
    }

    fn parts(&self) -> Vec<&SparseBlock> {
        self.blocks.iter().collect()
    }

    /// Random k-term approximation `(‖c‖₁/k) Σ_α |ω_α⟩`.
    pub fn sparsify<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<SparseVector> {
        sparsify_blocks(&self.parts(), k, rng)
    }
}

fn draw_term<R: Rng + ?Sized>(blocks: &[&SparseBlock], rng: &mut R) -> Result<StabState> {
    let (mut phase, first) = blocks[0].draw(rng);
    let mut st = first.clone();
    for b in &blocks[1..] {
        let (p, s) = b.draw(rng);
        phase *= p;
        st = st.tensor(s)?;
    }
    Ok(st.scaled(phase))
}

fn sparsify_blocks<R: Rng + ?Sized>(blocks: &[&SparseBlock], k: usize, rng: &mut R) -> Result<SparseVector> {
    if k == 0 {
        return Err(Error::InvalidParameter("sparsification needs k ≥ 1".into()));
    }
    let l1: f64 = blocks.iter().map(|b| b.l1).product();
    let n = blocks.iter().map(|b| b.n).sum();
    let terms = (0..k).map(|_| draw_term(blocks, rng)).collect::<Result<Vec<_>>>()?;
    Ok(SparseVector { n, k, prefactor: l1 / k as f64, terms })
}

/// Each of the `k` terms is `(c_j/|c_j|)|φ_j⟩` with `j` drawn with probability `|c_j|/‖c‖₁`.
pub fn sparsify<R: Rng + ?Sized>(d: &SparseDecomposition, k: usize, rng: &mut R) -> Result<SparseVector> {
    d.sparsify(k, rng)
}

/// `(C, δ_c)` of a decomposition.
pub fn compute_c(d: &SparseDecomposition) -> (f64, f64) {
    (d.c_const(), d.delta_c())
}

/// `E⟨Ω|Ω⟩ = 1 + (‖c‖₁² − 1)/k`.
pub fn expected_norm(l1: f64, k: usize) -> f64 {
    1.0 + (l1 * l1 - 1.0) / k as f64
}

/// Upper bound on `Var⟨Ω|Ω⟩` for a k-term sparsification with constant C.
pub fn variance_bound(l1: f64, k: usize, c: f64) -> f64 {
    let k = k as f64;
    let k4 = k.powi(4);
    4.0 * (k.powi(3) - 3.0 * k * k + 2.0 * k) / k4 * c + 2.0 * l1.powi(4) / (k * k) * (1.0 - 1.0 / k)
        - (4.0 * k.powi(3) - 10.0 * k * k + 6.0 * k) / k4
}

/// Bound on the trace distance between the normalized-Ω ensemble and `|ψ⟩⟨ψ|`.
pub fn trace_distance_bound(l1: f64, k: usize, c: f64) -> f64 {
    2.0 * l1 * l1 / k as f64 + variance_bound(l1, k, c).max(0.0).sqrt()
}

/// `prefactor · Σ_α |ω_α⟩`; `k` counts the original terms, some of which may
/// have been annihilated by projections.
#[derive(Clone, Debug)]
pub struct SparseVector {
    n: usize,
    k: usize,
    prefactor: f64,
    terms: Vec<StabState>,
}

impl SparseVector {
    pub fn new(prefactor: f64, terms: Vec<StabState>) -> Result<Self> {
        let n = terms.first().map(StabState::n).ok_or_else(|| Error::InvalidParameter("no terms".into()))?;
        if let Some(t) = terms.iter().find(|t| t.n() != n) {
            return Err(Error::DimensionMismatch(n, t.n()));
        }
        Ok(SparseVector { n, k: terms.len(), prefactor, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn terms(&self) -> &[StabState] {
        &self.terms
    }

    pub fn scaled(&self, f: f64) -> Self {
        SparseVector { prefactor: self.prefactor * f, ..self.clone() }
    }

    pub fn apply_circuit(&self, circuit: &[Gate]) -> Result<Self> {
        let terms = self.terms.iter().map(|t| t.apply_circuit(circuit)).collect::<Result<_>>()?;
        Ok(SparseVector { terms, ..self.clone() })
    }

    /// `(I + sign·p)/2` applied to every term; annihilated terms are dropped.
    pub fn project_pauli(&self, p: &PauliOp, sign: i8) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let (s, _) = t.project_pauli(p, sign)?;
            if !s.is_null() {
                terms.push(s);
            }
        }
        Ok(SparseVector { terms, ..self.clone() })
    }

    /// Dense amplitudes, qubit j being bit j of the index.
    pub fn amplitudes(&self) -> Result<Vec<Complex64>> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits { n: self.n, limit: MAX_DENSE_QUBITS });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); 1 << self.n];
        for t in &self.terms {
            for (x, a) in out.iter_mut().enumerate() {
                *a += t.basis_amplitude(x as u64);
            }
        }
        for a in out.iter_mut() {
            *a *= self.prefactor;
        }
        Ok(out)
    }

    /// `⟨v|v⟩` from dense amplitudes.
    pub fn norm_sqr_exact(&self) -> Result<f64> {
        Ok(self.amplitudes()?.iter().map(|a| a.norm_sqr()).sum())
    }

    fn equatorial_estimate(&self, a: &EquatorialMatrix) -> Result<f64> {
        let phi = StabState::equatorial(a)?;
        let mut s = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            s += phi.inner_product(t)?;
        }
        Ok(2f64.powi(self.n as i32) * self.prefactor * self.prefactor * s.norm_sqr())
    }
}

/// Batch size and batch count of the median-of-means estimator.
pub fn fast_norm_shape(eps: f64, p: f64) -> (usize, usize) {
    ((4.0 / (eps * eps)).ceil() as usize, (8.0 * (2.0 / p).ln()).ceil().max(1.0) as usize)
}

fn median_of_means<R: Rng + ?Sized>(v: &SparseVector, per: usize, batches: usize, rng: &mut R) -> Result<f64> {
    if v.terms.is_empty() {
        return Ok(0.0);
    }
    let total = (per * batches) as u64;
    // When there are fewer equatorial states than samples, tabulate all of them once.
    let table = match EquatorialMatrix::count(v.n) {
        Some(c) if c < total => Some(
            (0..c).map(|i| v.equatorial_estimate(&EquatorialMatrix::from_index(v.n, i))).collect::<Result<Vec<_>>>()?,
        ),
        _ => None,
    };
    let mut means = Vec::with_capacity(batches);
    for _ in 0..batches {
        let mut s = 0.0;
        for _ in 0..per {
            s += match &table {
                Some(t) => t[rng.gen_range(0..t.len())],
                None => v.equatorial_estimate(&EquatorialMatrix::random(v.n, rng))?,
            };
        }
        means.push(s / per as f64);
    }
    means.sort_by(f64::total_cmp);
    let m = means.len();
    Ok(if m % 2 == 1 { means[m / 2] } else { 0.5 * (means[m / 2 - 1] + means[m / 2]) })
}

/// Estimate η of `‖v‖²` with `(1−ε)‖v‖² ≤ η ≤ (1+ε)‖v‖²` except with probability `p`.
pub fn fast_norm<R: Rng + ?Sized>(v: &SparseVector, eps: f64, p: f64, rng: &mut R) -> Result<f64> {
    if !(eps > 0.0 && eps <= 0.2) {
        return Err(Error::InvalidParameter(format!("norm tolerance {eps} outside (0, 0.2]")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("failure probability {p} outside (0, 1)")));
    }
    let (per, batches) = fast_norm_shape(eps, p);
    median_of_means(v, per, batches, rng)
}

#[derive(Clone, Debug)]
struct Factor {
    n: usize,
    parts: Vec<(f64, SparseDecomposition)>,
    picker: WeightedIndex<f64>,
}

/// Convex mixture `Σ_j p_j |ψ_j⟩⟨ψ_j|` of pure states with stabilizer
/// expansions, held as a tensor product of independent mixtures.
#[derive(Clone, Debug)]
pub struct MixedInput {
    n: usize,
    factors: Vec<Factor>,
}

impl MixedInput {
    /// Each inner list is one tensor factor's ensemble.
    pub fn new(factors: Vec<Vec<(f64, SparseDecomposition)>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidDecomposition("empty mixed input".into()));
        }
        let mut out = Vec::with_capacity(factors.len());
        for parts in factors {
            let Some(first) = parts.first() else {
                return Err(Error::InvalidDecomposition("empty ensemble".into()));
            };
            let n = first.1.n();
            let total: f64 = parts.iter().map(|p| p.0).sum();
            if parts.iter().any(|p| !(p.0 >= 0.0)) || (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidDecomposition(format!("ensemble weights must be non-negative and sum to 1 (sum {total})")));
            }
            if let Some(p) = parts.iter().find(|p| p.1.n() != n) {
                return Err(Error::DimensionMismatch(n, p.1.n()));
            }
            let picker = WeightedIndex::new(parts.iter().map(|p| p.0))
                .map_err(|e| Error::InvalidDecomposition(e.to_string()))?;
            out.push(Factor { n, parts, picker });
        }
        let n = out.iter().map(|f| f.n).sum();
        if n > crate::stab_core::MAX_QUBITS {
            return Err(Error::TooManyQubits { n, limit: crate::stab_core::MAX_QUBITS });
        }
        Ok(MixedInput { n, factors: out })
    }

    pub fn pure(d: SparseDecomposition) -> Result<Self> {
        Self::new(vec![vec![(1.0, d)]])
    }

    /// Product of single-qubit states, each split into an equimagical mixture
    /// of pure states (stabilizer mixtures into stabilizer states).
    pub fn from_bloch_product(states: &[BlochState<f64>]) -> Result<Self> {
        let mut factors = Vec::with_capacity(states.len());
        for s in states {
            if s.norm() > 1.0 + 1e-12 {
                return Err(Error::InvalidBloch(s.norm()));
            }
            let parts: Vec<(f64, SparseDecomposition)> = if s.is_stabilizer_mixture() {
                octahedron_weights(s)
                    .into_iter()
                    .map(|(w, st)| Ok((w, SparseDecomposition::new(vec![Complex64::new(1.0, 0.0)], vec![stab1_state(st)])?)))
                    .collect::<Result<_>>()?
            } else if s.is_pure(1e-9) {
                vec![(1.0, SparseDecomposition::pure_product(&[*s])?)]
            } else {
                optimal_mixture_1q(s)?
                    .parts
                    .into_iter()
                    .map(|(p, part)| Ok((p, SparseDecomposition::pure_product(&[part])?)))
                    .collect::<Result<_>>()?
            };
            let total: f64 = parts.iter().map(|p| p.0).sum();
            factors.push(parts.into_iter().map(|(p, d)| (p / total, d)).collect());
        }
        Self::new(factors)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `Ξ̃ = Σ_j p_j ‖c^{(j)}‖₁²`.
    pub fn xi_tilde(&self) -> f64 {
        self.factors.iter().map(|f| f.parts.iter().map(|(p, d)| p * d.xi()).sum::<f64>()).product()
    }

    /// Whether every pure state of the ensemble has the same `‖c‖₁²` (to 1e-8).
    pub fn equimagical(&self) -> bool {
        self.factors.iter().all(|f| {
            let x0 = f.parts[0].1.xi();
            f.parts.iter().all(|(_, d)| (d.xi() - x0).abs() <= 1e-8 * x0.max(1.0))
        })
    }

    /// Upper bound on `max_j (C_j − 1)/‖c^{(j)}‖₁²`, exact for a single factor
    /// or when the extents within each factor are equal.
    pub fn d_max(&self) -> f64 {
        if self.factors.len() == 1 {
            return self.factors[0].parts.iter().map(|(_, d)| (d.c_const() - 1.0) / d.xi()).fold(0.0, f64::max);
        }
        let c: f64 = self.factors.iter().map(|f| f.parts.iter().map(|p| p.1.c_const()).fold(1.0, f64::max)).product();
        let xi: f64 = self.factors.iter().map(|f| f.parts.iter().map(|p| p.1.xi()).fold(f64::INFINITY, f64::min)).product();
        ((c - 1.0) / xi).max(0.0)
    }

    /// Flattened ensemble; fails beyond `limit` pure states.
    pub fn ensemble(&self, limit: usize) -> Result<Vec<(f64, SparseDecomposition)>> {
        let count = self.factors.iter().fold(1usize, |a, f| a.saturating_mul(f.parts.len()));
        if count > limit {
            return Err(Error::InvalidParameter(format!("ensemble has more than {limit} members")));
        }
        let mut out: Vec<(f64, Vec<SparseBlock>)> = vec![(1.0, Vec::new())];
        for f in &self.factors {
            let mut next = Vec::with_capacity(out.len() * f.parts.len());
            for (p, blocks) in &out {
                for (q, d) in &f.parts {
                    let mut b = blocks.clone();
                    b.extend(d.blocks.iter().cloned());
                    next.push((p * q, b));
                }
            }
            out = next;
        }
        out.into_iter().map(|(p, b)| Ok((p, SparseDecomposition::from_blocks(b)?))).collect()
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<&SparseBlock> {
        let mut blocks = Vec::new();
        for f in &self.factors {
            let d = &f.parts[f.picker.sample(rng)].1;
            blocks.extend(d.blocks.iter());
        }
        blocks
    }
}

/// How conditional probabilities are evaluated. `Exact` uses dense norms of
/// the projected sparse vectors and exists to check the sampler separately
/// from the norm estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormOracle {
    FastNorm,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `k = ⌈12‖c‖₁²/δ⌉`.
    Standard,
    /// `k = ⌈4‖c‖₁²(D/δ_S² + 1/δ_S)⌉` below the critical precision.
    Sharpened,
}

/// Sampler settings: measure qubits `0..w` in the Z basis after `clifford`.
#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub w: usize,
    pub delta: f64,
    pub p_fail: f64,
    pub oracle: NormOracle,
    pub clifford: Vec<Gate>,
    pub workers: Option<usize>,
}

impl SamplerConfig {
    pub fn new(w: usize, delta: f64, p_fail: f64) -> Self {
        SamplerConfig { w, delta, p_fail, oracle: NormOracle::FastNorm, clifford: Vec::new(), workers: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RuntimeReport {
    pub regime: Regime,
    pub delta_s: f64,
    pub epsilon_fn: f64,
    pub p_fn: f64,
    pub d_max: f64,
    pub xi_tilde: f64,
    pub k_min: usize,
    pub k_max: usize,
    pub k_mean: f64,
    pub fastnorm_calls: u64,
    pub max_calls_per_string: u32,
    /// Sparsifications redrawn because the estimated norm was zero.
    pub null_redraws: u64,
    #[serde(skip)]
    pub wall_seconds: f64,
}

#[derive(Clone, Debug)]
pub struct BitstringSample {
    /// Bit b of each entry is the outcome on qubit b.
    pub strings: Vec<u64>,
    pub k: Vec<usize>,
    pub w: usize,
    pub seed: u64,
    pub report: RuntimeReport,
}

/// Bit string written qubit 0 first.
pub fn format_bits(x: u64, w: usize) -> String {
    (0..w).map(|b| if (x >> b) & 1 == 1 { '1' } else { '0' }).collect()
}

fn ceil_count(x: f64) -> usize {
    // Guards against 100.00000000001 turning into 101.
    (x * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Sparsification size for a pure state of extent `xi` at total precision `delta`.
pub fn sparsification_k(xi: f64, delta: f64, d_max: f64) -> (usize, Regime) {
    let ds = delta / 3.0;
    if delta >= 24.0 * d_max {
        (ceil_count(12.0 * xi / delta), Regime::Standard)
    } else {
        (ceil_count(4.0 * xi * (d_max / (ds * ds) + 1.0 / ds)), Regime::Sharpened)
    }
}

struct ChainParams {
    w: usize,
    oracle: NormOracle,
    per: usize,
    batches: usize,
}

impl ChainParams {
    fn norm<R: Rng + ?Sized>(&self, v: &SparseVector, rng: &mut R) -> Result<f64> {
        match self.oracle {
            NormOracle::FastNorm => median_of_means(v, self.per, self.batches, rng),
            NormOracle::Exact => v.norm_sqr_exact(),
        }
    }

    /// Draws qubits `0..w` of a normalized Ω one at a time; returns the string and the norm calls used.
    fn chain<R: Rng + ?Sized>(&self, omega: SparseVector, rng: &mut R) -> Result<(u64, u32)> {
        let mut omega = omega;
        let (mut p_x, mut x, mut calls) = (1.0f64, 0u64, 0u32);
        for b in 0..self.w {
            let z = PauliOp::z(omega.n, b)?;
            let o0 = omega.project_pauli(&z, 1)?;
            calls += 1;
            let mut p0 = self.norm(&o0, rng)? / p_x;
            let mut o1 = None;
            if p0 >= 0.5 {
                let v = omega.project_pauli(&z, -1)?;
                calls += 1;
                p0 = 1.0 - self.norm(&v, rng)? / p_x;
                o1 = Some(v);
            }
            let p0 = if p0.is_finite() { p0.clamp(0.0, 1.0) } else { 0.5 };
            if rng.gen::<f64>() < p0 {
                omega = o0;
                p_x *= p0;
            } else {
                x |= 1 << b;
                omega = match o1 {
                    Some(v) => v,
                    None => omega.project_pauli(&z, -1)?,
                };
                p_x *= 1.0 - p0;
            }
        }
        Ok((x, calls))
    }
}

/// Samples `w`-bit strings from a normalized Ω by the conditional-probability chain.
pub fn sample_from_vector<R: Rng + ?Sized>(
    omega: &SparseVector,
    w: usize,
    oracle: NormOracle,
    eps_fn: f64,
    p_fn: f64,
    rng: &mut R,
) -> Result<(u64, u32)> {
    if w == 0 || w > omega.n {
        return Err(Error::InvalidParameter(format!("w = {w} must lie in 1..={}", omega.n)));
    }
    let (per, batches) = fast_norm_shape(eps_fn, p_fn);
    let cp = ChainParams { w, oracle, per, batches };
    let norm = cp.norm(omega, rng)?;
    if norm <= 0.0 {
        return Err(Error::InvalidParameter("vector has zero norm".into()));
    }
    let (x, calls) = cp.chain(omega.scaled(1.0 / norm.sqrt()), rng)?;
    Ok((x, calls + 1))
}

/// Samples `count` bit strings of the first `w` qubits of the input (after
/// the configured Clifford circuit). String `i` depends only on `(seed, i)`.
pub fn sample_bitstrings(input: &MixedInput, cfg: &SamplerConfig, count: u64, seed: u64) -> Result<BitstringSample> {
    let n = input.n();
    if cfg.w == 0 || cfg.w > n {
        return Err(Error::InvalidParameter(format!("w = {} must lie in 1..={n}", cfg.w)));
    }
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta = {} outside (0, 1)", cfg.delta)));
    }
    if !(cfg.p_fail > 0.0 && cfg.p_fail < 1.0) {
        return Err(Error::InvalidParameter(format!("p_fail = {} outside (0, 1)", cfg.p_fail)));
    }
    for g in &cfg.clifford {
        g.check(n)?;
    }
    if cfg.oracle == NormOracle::Exact && n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits { n, limit: MAX_DENSE_QUBITS });
    }
    let start = Instant::now();
    let w = cfg.w as f64;
    let eps = 2.0 * cfg.delta / 3.0;
    let eps_fn = (eps / (3.0 * w)).min(0.2);
    let p_fn = cfg.p_fail / (2.0 * w);
    let (per, batches) = fast_norm_shape(eps_fn, p_fn);
    let d_max = input.d_max();
    let equimagical = input.equimagical();
    let xi_tilde = input.xi_tilde();
    let (_, regime) = sparsification_k(1.0, cfg.delta, d_max);
    let cp = ChainParams { w: cfg.w, oracle: cfg.oracle, per, batches };

    let results = map_samples(count, cfg.workers, |i| {
        let mut rng = sample_rng(seed, i);
        let blocks = input.draw(&mut rng);
        let xi = if equimagical { xi_tilde } else { blocks.iter().map(|b| b.l1).product::<f64>().powi(2) };
        let (k, _) = sparsification_k(xi, cfg.delta, d_max);
        let mut redraws = 0u32;
        let mut calls = 0u32;
        let (omega, norm) = loop {
            let v = sparsify_blocks(&blocks, k, &mut rng)?.apply_circuit(&cfg.clifford)?;
            calls += 1;
            let norm = cp.norm(&v, &mut rng)?;
            if norm > 0.0 {
                break (v, norm);
            }
            redraws += 1;
            if redraws > 1000 {
                return Err(Error::InvalidDecomposition("sparsified vectors keep vanishing".into()));
            }
        };
        let (x, c) = cp.chain(omega.scaled(1.0 / norm.sqrt()), &mut rng)?;
        Ok((x, k, calls + c, redraws))
    })?;

    let mut strings = Vec::with_capacity(results.len());
    let mut ks = Vec::with_capacity(results.len());
    let (mut calls, mut max_calls, mut redraws) = (0u64, 0u32, 0u64);
    for (x, k, c, r) in results {
        strings.push(x);
        ks.push(k);
        calls += c as u64;
        max_calls = max_calls.max(c);
        redraws += r as u64;
    }
    let report = RuntimeReport {
        regime,
        delta_s: cfg.delta / 3.0,
        epsilon_fn: eps_fn,
        p_fn,
        d_max,
        xi_tilde,
        k_min: ks.iter().copied().min().unwrap_or(0),
        k_max: ks.iter().copied().max().unwrap_or(0),
        k_mean: if ks.is_empty() { 0.0 } else { ks.iter().sum::<usize>() as f64 / ks.len() as f64 },
        fastnorm_calls: calls,
        max_calls_per_string: max_calls,
        null_redraws: redraws,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(BitstringSample { strings, k: ks, w: cfg.w, seed, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parallel::sample_rng;
    use approx::assert_abs_diff_eq;

    fn h_dec(copies: usize) -> SparseDecomposition {
        SparseDecomposition::pure_product(&vec![BlochState::h_state(); copies]).unwrap()
    }

    #[test]
    fn single_term_sparsifies_exactly() {
        let d = SparseDecomposition::new(vec![Complex64::new(1.0, 0.0)], vec![StabState::zero(2).unwrap()]).unwrap();
        let v = d.sparsify(7, &mut sample_rng(1, 0)).unwrap();
        assert_abs_diff_eq!(v.norm_sqr_exact().unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(compute_c(&d), (1.0, 0.0));
    }

    #[test]
    fn h_state_is_clifford_magic() {
        let (c, dc) = compute_c(&h_dec(1));
        assert_abs_diff_eq!(c, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dc, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(h_dec(3).xi(), (4.0 - 2.0 * 2f64.sqrt()).powi(3), epsilon = 1e-9);
    }

    #[test]
    fn generic_state_has_c_above_one() {
        let th = 0.1187f64;
        let s = BlochState::new((2.0 * th).sin(), 0.0, (2.0 * th).cos()).unwrap();
        let d = SparseDecomposition::pure_product(&[s]).unwrap();
        assert!(d.c_const() > 1.0);
        let d60 = SparseDecomposition::from_blocks(vec![d.blocks()[0].clone(); 60]).unwrap();
        assert!(d60.delta_c() < d.delta_c());
        let (c, xi) = (d.c_const(), d.xi());
        assert_abs_diff_eq!(d60.c_const(), c.powi(60), epsilon = 1e-9);
        assert!((c.powi(100) - 1.0) / xi.powi(100) < 1e-3);
    }

    #[test]
    fn fast_norm_of_basis_and_projected_plus() {
        let mut rng = sample_rng(3, 0);
        let v = SparseVector::new(1.0, vec![StabState::zero(3).unwrap()]).unwrap();
        let eta = fast_norm(&v, 0.1, 0.01, &mut rng).unwrap();
        assert!((eta - 1.0).abs() <= 0.1);
        let plus = StabState::zero(1).unwrap().apply_gate(Gate::H(0)).unwrap();
        let v = SparseVector::new(1.0, vec![plus]).unwrap().project_pauli(&PauliOp::z(1, 0).unwrap(), 1).unwrap();
        let eta = fast_norm(&v, 0.1, 0.01, &mut rng).unwrap();
        assert!((eta - 0.5).abs() <= 0.05);
    }

    #[test]
    fn sparse_vector_amplitudes_match_expansion() {
        let d = h_dec(2);
        let v = SparseVector::new(1.0, d.expand(16).unwrap().into_iter().map(|(c, s)| s.scaled(c)).collect()).unwrap();
        assert_abs_diff_eq!(v.norm_sqr_exact().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn k_regimes() {
        assert_eq!(sparsification_k(1.0, 0.12, 0.0), (100, Regime::Standard));
        let (k, r) = sparsification_k(1.0, 0.12, 0.01);
        assert_eq!(r, Regime::Sharpened);
        assert_eq!(k, ceil_count(4.0 * (0.01 / 0.0016 + 1.0 / 0.04)));
    }

    #[test]
    fn basis_input_always_gives_zeros() {
        let z = BlochState::stabilizer(crate::monotones::Stab1::Zero);
        let input = MixedInput::from_bloch_product(&[z; 3]).unwrap();
        let out = sample_bitstrings(&input, &SamplerConfig::new(3, 0.5, 0.1), 5, 9).unwrap();
        assert!(out.strings.iter().all(|&x| x == 0));
        assert_eq!(format_bits(0b01, 3), "100");
    }
}
