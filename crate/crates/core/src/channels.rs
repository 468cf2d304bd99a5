//! Dyads, dyadic decompositions of input states, stabilizer Kraus operators and
//! simulable channels, with a small library of built-in channels.

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monotones::{extent_pure_1q, octahedron_weights, optimal_mixture_1q, BlochState, Stab1};
use crate::stab_core::{Gate, PauliOp, StabProjector, StabState};

/// Default cap on the number of terms `N_U + N_K` of a channel.
pub const DEFAULT_MAX_TERMS: usize = 64;

/// Rank-one operator `|L⟩⟨R|` between stabilizer states.
#[derive(Clone, Debug)]
pub struct Dyad {
    pub left: StabState,
    pub right: StabState,
}

impl Dyad {
    pub fn new(left: StabState, right: StabState) -> Result<Self> {
        if left.n() != right.n() {
            return Err(Error::DimensionMismatch(left.n(), right.n()));
        }
        if left.is_null() || right.is_null() {
            return Err(Error::InvalidDecomposition("dyad with a null state".into()));
        }
        Ok(Dyad { left, right })
    }

    pub fn n(&self) -> usize {
        self.left.n()
    }

    /// `Tr|L⟩⟨R| = ⟨R|L⟩`.
    pub fn trace(&self) -> Complex64 {
        self.right.inner_product(&self.left).expect("dyad halves share n")
    }

    pub fn tensor(&self, other: &Dyad) -> Result<Dyad> {
        Ok(Dyad { left: self.left.tensor(&other.left)?, right: self.right.tensor(&other.right)? })
    }
}

/// Dyads on a group of consecutive qubits.
#[derive(Clone, Debug)]
pub struct DyadBlock {
    n: usize,
    terms: Vec<(Complex64, Dyad)>,
    picker: WeightedIndex<f64>,
    l1: f64,
}

impl DyadBlock {
    pub fn new(n: usize, terms: Vec<(Complex64, Dyad)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidDecomposition("empty dyad list".into()));
        }
        for (_, d) in &terms {
            if d.n() != n {
                return Err(Error::DimensionMismatch(n, d.n()));
            }
        }
        let trace: Complex64 = terms.iter().map(|(a, d)| a * d.trace()).sum();
        if (trace - 1.0).norm() > 1e-8 {
            return Err(Error::InvalidDecomposition(format!("trace {trace} differs from 1")));
        }
        let weights: Vec<f64> = terms.iter().map(|(a, _)| a.norm()).collect();
        let l1 = weights.iter().sum();
        let picker = WeightedIndex::new(&weights)
            .map_err(|e| Error::InvalidDecomposition(format!("dyad weights: {e}")))?;
        Ok(DyadBlock { n, terms, picker, l1 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Complex64, Dyad)] {
        &self.terms
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }
}

/// `ρ = Σ_j α_j |L_j⟩⟨R_j|`, stored as a tensor product of independent blocks
/// (block 0 on the lowest qubits). A single block holds an arbitrary list.
#[derive(Clone, Debug)]
pub struct DyadicDecomposition {
    n: usize,
    blocks: Vec<DyadBlock>,
}

/// One dyad drawn with probability `|α_j|/‖α‖₁`.
#[derive(Clone, Debug)]
pub struct SampledDyad {
    /// Index chosen in each block.
    pub indices: Vec<usize>,
    /// `α_j/|α_j|`.
    pub phase: Complex64,
    pub dyad: Dyad,
}

impl DyadicDecomposition {
    pub fn from_terms(n: usize, terms: Vec<(Complex64, Dyad)>) -> Result<Self> {
        Ok(DyadicDecomposition { n, blocks: vec![DyadBlock::new(n, terms)?] })
    }

    pub fn from_blocks(blocks: Vec<DyadBlock>) -> Result<Self> {
        let n = blocks.iter().map(|b| b.n).sum();
        if blocks.is_empty() {
            return Err(Error::InvalidDecomposition("no blocks".into()));
        }
        if n > crate::stab_core::MAX_QUBITS {
            return Err(Error::TooManyQubits { n, limit: crate::stab_core::MAX_QUBITS });
        }
        Ok(DyadicDecomposition { n, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[DyadBlock] {
        &self.blocks
    }

    /// ‖α‖₁ (the product of block norms).
    pub fn l1(&self) -> f64 {
        self.blocks.iter().map(|b| b.l1).product()
    }

    /// Number of dyads in the expanded list (saturating).
    pub fn len(&self) -> usize {
        self.blocks.iter().fold(1usize, |acc, b| acc.saturating_mul(b.terms.len()))
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn tensor(&self, other: &DyadicDecomposition) -> Result<Self> {
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().cloned());
        Self::from_blocks(blocks)
    }

    /// Expanded list of `(α_j, dyad)`; refuses more than `limit` terms.
    pub fn expand_terms(&self, limit: usize) -> Result<Vec<(Complex64, Dyad)>> {
        if self.len() > limit {
            return Err(Error::InvalidParameter(format!("{} dyads exceed the expansion limit {limit}", self.len())));
        }
        let mut out: Vec<(Complex64, Option<Dyad>)> = vec![(Complex64::new(1.0, 0.0), None)];
        for b in &self.blocks {
            let mut next = Vec::with_capacity(out.len() * b.terms.len());
            for (a, d) in &out {
                for (bt, bd) in &b.terms {
                    let nd = match d {
                        None => bd.clone(),
                        Some(d) => d.tensor(bd)?,
                    };
                    next.push((a * bt, Some(nd)));
                }
            }
            out = next;
        }
        Ok(out.into_iter().map(|(a, d)| (a, d.expect("at least one block"))).collect())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SampledDyad> {
        let mut indices = Vec::with_capacity(self.blocks.len());
        let mut phase = Complex64::new(1.0, 0.0);
        let mut dyad: Option<Dyad> = None;
        for b in &self.blocks {
            let j = b.picker.sample(rng);
            indices.push(j);
            let (a, d) = &b.terms[j];
            phase *= a / a.norm();
            dyad = Some(match dyad {
                None => d.clone(),
                Some(prev) => prev.tensor(d)?,
            });
        }
        Ok(SampledDyad { indices, phase, dyad: dyad.expect("at least one block") })
    }
}

pub(crate) fn stab1_state(s: Stab1) -> StabState {
    StabState::from_circuit(1, &s.preparation(0)).expect("single-qubit preparation")
}

/// Dyads of one qubit from its optimal decomposition: stabilizer mixtures use
/// octahedron weights, pure states the extent-optimal expansion `Σ c_j c̄_k |φ_j⟩⟨φ_k|`,
/// and other mixed states the same for every part of an equimagical mixture.
pub fn dyadic_decompose_1q(rho: &BlochState<f64>) -> Result<DyadBlock> {
    if rho.norm() > 1.0 + 1e-12 {
        return Err(Error::InvalidBloch(rho.norm()));
    }
    let mut terms = Vec::new();
    if rho.is_stabilizer_mixture() {
        for (w, s) in octahedron_weights(rho) {
            let st = stab1_state(s);
            terms.push((Complex64::new(w, 0.0), Dyad::new(st.clone(), st)?));
        }
        return DyadBlock::new(1, terms);
    }
    let parts = if rho.is_pure(1e-9) { vec![(1.0, *rho)] } else { optimal_mixture_1q(rho)?.parts };
    for (p, part) in parts {
        let ext = extent_pure_1q(&part.depolarized(1.0 / part.norm()))?;
        for (cj, sj) in &ext.terms {
            for (ck, sk) in &ext.terms {
                terms.push((cj * ck.conj() * p, Dyad::new(stab1_state(*sj), stab1_state(*sk))?));
            }
        }
    }
    DyadBlock::new(1, terms)
}

/// Tensor-product decomposition with ‖α‖₁ = Π_j Λ⁺(σ_j).
pub fn dyadic_decompose_product(states: &[BlochState<f64>]) -> Result<DyadicDecomposition> {
    let blocks = states.iter().map(dyadic_decompose_1q).collect::<Result<Vec<_>>>()?;
    DyadicDecomposition::from_blocks(blocks)
}

/// Kraus operator `2^{h/2} U Π` with Π a rank-`2^{n−h}` stabilizer projector.
#[derive(Clone, Debug, PartialEq)]
pub struct StabKraus {
    h: usize,
    proj: StabProjector,
    circuit: Vec<Gate>,
}

impl StabKraus {
    pub fn new(proj: StabProjector, circuit: Vec<Gate>) -> Result<Self> {
        for g in &circuit {
            g.check(proj.n())?;
        }
        Ok(StabKraus { h: proj.independent_count(), proj, circuit })
    }

    pub fn n(&self) -> usize {
        self.proj.n()
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn proj(&self) -> &StabProjector {
        &self.proj
    }

    pub fn circuit(&self) -> &[Gate] {
        &self.circuit
    }

    /// `2^{h/2}`.
    pub fn scale(&self) -> f64 {
        2f64.powf(self.h as f64 / 2.0)
    }

    pub fn embed(&self, n: usize, support: &[usize]) -> Result<StabKraus> {
        let circuit = self.circuit.iter().map(|g| g.remap(support)).collect::<Result<Vec<_>>>()?;
        StabKraus::new(self.proj.embed(n, support)?, circuit)
    }
}

/// `ℰ(ρ) = Σ_r p_r U_r ρ U_r† + Σ_s q_s K_s ρ K_s†`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulableChannel {
    n: usize,
    unitary: Vec<(f64, Vec<Gate>)>,
    kraus: Vec<(f64, StabKraus)>,
}

impl SimulableChannel {
    pub fn new(n: usize, unitary: Vec<(f64, Vec<Gate>)>, kraus: Vec<(f64, StabKraus)>) -> Result<Self> {
        Self::with_limit(n, unitary, kraus, DEFAULT_MAX_TERMS)
    }

    /// As [`SimulableChannel::new`] with a custom bound on `N_U + N_K`.
    pub fn with_limit(
        n: usize,
        unitary: Vec<(f64, Vec<Gate>)>,
        kraus: Vec<(f64, StabKraus)>,
        max_terms: usize,
    ) -> Result<Self> {
        if unitary.is_empty() && kraus.is_empty() {
            return Err(Error::InvalidChannel("channel has no terms".into()));
        }
        if unitary.len() + kraus.len() > max_terms {
            return Err(Error::InvalidChannel(format!(
                "{} terms exceed the configured limit {max_terms}",
                unitary.len() + kraus.len()
            )));
        }
        for (p, gates) in &unitary {
            if !(p.is_finite() && *p >= 0.0) {
                return Err(Error::InvalidChannel(format!("unitary weight {p} is not a probability")));
            }
            for g in gates {
                g.check(n)?;
            }
        }
        for (q, k) in &kraus {
            if !(q.is_finite() && *q >= 0.0) {
                return Err(Error::InvalidChannel(format!("Kraus weight {q} is negative")));
            }
            if k.n() != n {
                return Err(Error::DimensionMismatch(n, k.n()));
            }
        }
        let pu: f64 = unitary.iter().map(|(p, _)| p).sum();
        if pu > 1.0 + 1e-12 {
            return Err(Error::InvalidChannel(format!("unitary weights sum to {pu} > 1")));
        }
        if kraus.is_empty() && (pu - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidChannel(format!("unitary weights sum to {pu}, expected 1")));
        }
        Ok(SimulableChannel { n, unitary, kraus })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn unitary_part(&self) -> &[(f64, Vec<Gate>)] {
        &self.unitary
    }

    pub fn kraus_part(&self) -> &[(f64, StabKraus)] {
        &self.kraus
    }

    /// `P_U = Σ_r p_r`.
    pub fn p_unitary(&self) -> f64 {
        self.unitary.iter().map(|(p, _)| p).sum::<f64>().min(1.0)
    }

    pub fn identity(n: usize) -> Self {
        SimulableChannel { n, unitary: vec![(1.0, Vec::new())], kraus: Vec::new() }
    }

    /// Single Clifford unitary.
    pub fn clifford(n: usize, gates: Vec<Gate>) -> Result<Self> {
        Self::new(n, vec![(1.0, gates)], Vec::new())
    }

    /// Places a channel defined on `support.len()` qubits onto qubits `support` of an n-qubit register.
    pub fn embed(&self, n: usize, support: &[usize]) -> Result<SimulableChannel> {
        if support.len() != self.n {
            return Err(Error::DimensionMismatch(self.n, support.len()));
        }
        let mut seen = vec![false; n];
        for &q in support {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
            if std::mem::replace(&mut seen[q], true) {
                return Err(Error::InvalidChannel(format!("qubit {q} repeated in support")));
            }
        }
        let unitary = self
            .unitary
            .iter()
            .map(|(p, gs)| Ok((*p, gs.iter().map(|g| g.remap(support)).collect::<Result<Vec<_>>>()?)))
            .collect::<Result<Vec<_>>>()?;
        let kraus = self.kraus.iter().map(|(q, k)| Ok((*q, k.embed(n, support)?))).collect::<Result<Vec<_>>>()?;
        Ok(SimulableChannel { n, unitary, kraus })
    }
}

/// Random mixture of Clifford circuits on `n` qubits.
pub fn clifford_mix(n: usize, terms: Vec<(f64, Vec<Gate>)>) -> Result<SimulableChannel> {
    SimulableChannel::new(n, terms, Vec::new())
}

/// `ρ ↦ (1−λ)ρ + λ I/2` on one qubit, as a Pauli mixture; zero-weight terms are dropped.
pub fn depolarizing(lambda: f64) -> Result<SimulableChannel> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("depolarizing strength {lambda} outside [0, 1]")));
    }
    let mut terms = vec![(1.0 - 0.75 * lambda, Vec::new())];
    if lambda > 0.0 {
        for g in [Gate::X(0), Gate::Y(0), Gate::Z(0)] {
            terms.push((lambda / 4.0, vec![g]));
        }
    }
    SimulableChannel::new(1, terms, Vec::new())
}

/// T-gate injection on qubit 0 consuming an |H⟩ ancilla on qubit 1.
///
/// The ancilla is rotated to `(|0⟩ + e^{iπ/4}|1⟩)/√2` by `H·S†`, entangled with
/// `CX(0, 1)`, measured in Z and, on outcome 1, corrected with S on the data.
/// Moving the measurement to the front turns it into the projector
/// `(I ± Z₀Y₁)/2`, giving two Kraus operators `√2 U_m Π_m` with weight 1/2.
pub fn t_gadget() -> Result<SimulableChannel> {
    let mut kraus = Vec::new();
    for m in 0..2i8 {
        let sign = if m == 0 { 1 } else { -1 };
        let zy = PauliOp::new(2, 0b10, 0b11, 0)?;
        let proj = StabProjector::new(2, vec![(zy, sign)])?;
        let mut gates = vec![Gate::Sdg(1), Gate::H(1), Gate::CX(0, 1)];
        if m == 1 {
            gates.push(Gate::S(0));
        }
        kraus.push((0.5, StabKraus::new(proj, gates)?));
    }
    SimulableChannel::new(2, Vec::new(), kraus)
}

/// Measures the Hermitian Pauli `p` and applies `correction` after outcome −1.
pub fn pauli_measure_and_forward(p: &PauliOp, correction: Vec<Gate>) -> Result<SimulableChannel> {
    let n = p.n;
    let mut kraus = Vec::new();
    for (sign, gates) in [(1i8, Vec::new()), (-1, correction)] {
        kraus.push((0.5, StabKraus::new(StabProjector::new(n, vec![(*p, sign)])?, gates)?));
    }
    SimulableChannel::new(n, Vec::new(), kraus)
}

/// Parameters of a built-in channel.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelParams {
    /// Depolarizing strength.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Measured Pauli on the channel's qubits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pauli: Option<PauliOp>,
    /// Gates applied after outcome −1 (local qubit indices).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correction: Option<Vec<Gate>>,
    /// `(weight, gates)` pairs of a Clifford mixture (local qubit indices).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<(f64, Vec<Gate>)>>,
}

/// `{"type": ..., "qubits": [...], "params": {...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuiltinChannelSpec {
    #[serde(rename = "type")]
    pub kind: String,
    pub qubits: Vec<usize>,
    #[serde(default)]
    pub params: ChannelParams,
}

/// Explicit weights, Kraus projectors (generator strings) and Clifford circuits.
/// Gates and generators use local indices mapped through `qubits`, which
/// defaults to every qubit of the register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitChannelSpec {
    #[serde(default)]
    pub qubits: Option<Vec<usize>>,
    #[serde(default)]
    pub unitary: Vec<(f64, Vec<Gate>)>,
    /// `(q, h, projector generators, gates)`.
    #[serde(default)]
    pub kraus: Vec<(f64, usize, Vec<String>, Vec<Gate>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Builtin(BuiltinChannelSpec),
    Explicit(ExplicitChannelSpec),
}

impl ChannelSpec {
    /// Builds the channel on an n-qubit register.
    pub fn build(&self, n: usize) -> Result<SimulableChannel> {
        match self {
            ChannelSpec::Builtin(b) => builtin_channel(&b.kind, &b.params, b.qubits.len())?.embed(n, &b.qubits),
            ChannelSpec::Explicit(e) => {
                let support: Vec<usize> = e.qubits.clone().unwrap_or_else(|| (0..n).collect());
                let k = support.len();
                let mut kraus = Vec::new();
                for (q, h, gens, gates) in &e.kraus {
                    let proj = StabProjector::parse(k, gens)?;
                    let sk = StabKraus::new(proj, gates.clone())?;
                    if sk.h() != *h {
                        return Err(Error::InvalidChannel(format!(
                            "declared h = {h} but the projector has {} independent generators",
                            sk.h()
                        )));
                    }
                    kraus.push((*q, sk));
                }
                SimulableChannel::new(k, e.unitary.clone(), kraus)?.embed(n, &support)
            }
        }
    }
}

/// Built-in channel by name on `arity` local qubits.
pub fn builtin_channel(name: &str, params: &ChannelParams, arity: usize) -> Result<SimulableChannel> {
    let need = |want: usize| {
        if arity == want {
            Ok(())
        } else {
            Err(Error::InvalidChannel(format!("{name} acts on {want} qubit(s), got {arity}")))
        }
    };
    match name {
        "depolarizing" => {
            need(1)?;
            depolarizing(params.lambda.ok_or_else(|| Error::InvalidChannel("depolarizing needs params.lambda".into()))?)
        }
        "t_gadget" => {
            need(2)?;
            t_gadget()
        }
        "pauli_measure_and_forward" => {
            let p = params.pauli.ok_or_else(|| Error::InvalidChannel("pauli_measure_and_forward needs params.pauli".into()))?;
            need(p.n)?;
            if !p.is_hermitian() {
                return Err(Error::NonHermitianPauli);
            }
            pauli_measure_and_forward(&p, params.correction.clone().unwrap_or_default())
        }
        "clifford_mix" => {
            let terms = params.terms.clone().ok_or_else(|| Error::InvalidChannel("clifford_mix needs params.terms".into()))?;
            clifford_mix(arity, terms)
        }
        "identity" => Ok(SimulableChannel::identity(arity)),
        other => Err(Error::InvalidChannel(format!("unknown channel type {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn builtin_term_counts() {
        assert_eq!(depolarizing(0.0).unwrap().unitary_part().len(), 1);
        assert_eq!(depolarizing(0.3).unwrap().unitary_part().len(), 4);
        assert_eq!(t_gadget().unwrap().kraus_part().len(), 2);
        assert!(depolarizing(1.5).is_err());
    }

    #[test]
    fn h_state_has_four_dyads() {
        let d = dyadic_decompose_product(&[BlochState::h_state()]).unwrap();
        assert_eq!(d.len(), 4);
        assert_abs_diff_eq!(d.l1(), 4.0 - 2.0 * 2f64.sqrt(), epsilon = 1e-10);
        let d2 = dyadic_decompose_product(&[BlochState::h_state(); 2]).unwrap();
        assert_eq!(d2.expand_terms(100).unwrap().len(), 16);
    }

    #[test]
    fn zero_state_single_dyad() {
        let d = dyadic_decompose_product(&[BlochState::stabilizer(Stab1::Zero)]).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.l1(), 1.0);
    }

    #[test]
    fn spec_json_roundtrip() {
        let js = r#"[{"type":"depolarizing","qubits":[1],"params":{"lambda":0.2}},
                     {"unitary":[[1.0,["H 0","CX 0 1"]]]},
                     {"kraus":[[0.5,1,["+Z"],[]],[0.5,1,["-Z"],["X 0"]]],"qubits":[2]}]"#;
        let specs: Vec<ChannelSpec> = serde_json::from_str(js).unwrap();
        assert_eq!(specs.len(), 3);
        let ch = specs[2].build(3).unwrap();
        assert_eq!(ch.kraus_part()[0].1.proj().generators()[0].0.to_string(), "+IIZ");
        assert!(specs[0].build(1).is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        let bad = r#"{"type":"t_gadget","qubits":[0,1],"extra":1}"#;
        assert!(serde_json::from_str::<ChannelSpec>(bad).is_err());
    }
}
