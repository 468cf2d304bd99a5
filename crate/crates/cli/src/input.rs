//! Input document: state, circuit, measurement and default parameters.

use std::path::Path;

use magicsim::channels::{ChannelSpec, Dyad, DyadicDecomposition, SimulableChannel};
use magicsim::dyadic_sim::Observable;
use magicsim::monotones::{BlochState, Stab1};
use magicsim::rank_sim::{MixedInput, SparseDecomposition};
use magicsim::stab_core::{Gate, PauliOp, StabProjector, StabState};
use magicsim::{Error, Result};
use num_complex::Complex64;
use serde::Deserialize;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunInput {
    pub state: StateSpec,
    #[serde(default)]
    pub circuit: Vec<ChannelSpec>,
    #[serde(default)]
    pub measurement: Option<MeasurementSpec>,
    #[serde(default)]
    pub params: Params,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    /// One entry per qubit.
    Product(Vec<QubitSpec>),
    Dyads(DyadsSpec),
    Ensemble(EnsembleSpec),
}

/// `"H"`, `[x, y, z]` or `{"state": "H", "alpha": 0.9}` (depolarized by α).
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum QubitSpec {
    Named(String),
    Bloch([f64; 3]),
    Noisy(NoisySpec),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoisySpec {
    pub state: String,
    pub alpha: f64,
}

/// States are prepared from |0…0⟩ by the listed gates.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DyadsSpec {
    pub qubits: usize,
    pub terms: Vec<DyadTerm>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DyadTerm {
    pub coeff: [f64; 2],
    pub left: Vec<Gate>,
    pub right: Vec<Gate>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub qubits: usize,
    pub members: Vec<Member>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Member {
    pub p: f64,
    pub terms: Vec<KetTerm>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KetTerm {
    pub coeff: [f64; 2],
    pub gates: Vec<Gate>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasurementSpec {
    /// Signed generator strings, e.g. `["+ZI"]`.
    Projector(Vec<String>),
    Pauli(String),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub epsilon: Option<f64>,
    pub p_fail: Option<f64>,
    pub delta: Option<f64>,
    pub c: Option<f64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub w: Option<usize>,
}

pub fn read(path: &Path) -> std::result::Result<RunInput, crate::CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| crate::CliError::io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| crate::CliError::validation(format!("{}: {e}", path.display())))
}

pub fn named_qubit(name: &str) -> Result<BlochState<f64>> {
    Ok(match name {
        "H" => BlochState::h_state(),
        "T" => BlochState::t_state(),
        "F" => BlochState::f_state(),
        "I" | "mixed" => BlochState::maximally_mixed(),
        "0" => BlochState::stabilizer(Stab1::Zero),
        "1" => BlochState::stabilizer(Stab1::One),
        "+" => BlochState::stabilizer(Stab1::Plus),
        "-" => BlochState::stabilizer(Stab1::Minus),
        "+i" => BlochState::stabilizer(Stab1::PlusI),
        "-i" => BlochState::stabilizer(Stab1::MinusI),
        other => return Err(Error::Parse(format!("unknown single-qubit state {other:?}"))),
    })
}

pub fn qubit_state(q: &QubitSpec) -> Result<BlochState<f64>> {
    match q {
        QubitSpec::Named(s) => named_qubit(s),
        QubitSpec::Bloch(b) => BlochState::from_array(*b),
        QubitSpec::Noisy(n) => {
            if !(0.0..=1.0).contains(&n.alpha) {
                return Err(Error::InvalidParameter(format!("alpha = {} outside [0, 1]", n.alpha)));
            }
            Ok(named_qubit(&n.state)?.depolarized(n.alpha))
        }
    }
}

impl StateSpec {
    pub fn n(&self) -> usize {
        match self {
            StateSpec::Product(q) => q.len(),
            StateSpec::Dyads(d) => d.qubits,
            StateSpec::Ensemble(e) => e.qubits,
        }
    }

    pub fn product(&self) -> Result<Vec<BlochState<f64>>> {
        match self {
            StateSpec::Product(q) => q.iter().map(qubit_state).collect(),
            _ => Err(Error::InvalidParameter("this subcommand needs a product state".into())),
        }
    }

    pub fn dyadic(&self) -> Result<DyadicDecomposition> {
        match self {
            StateSpec::Product(_) => magicsim::channels::dyadic_decompose_product(&self.product()?),
            StateSpec::Dyads(d) => {
                let terms = d
                    .terms
                    .iter()
                    .map(|t| {
                        let dy = Dyad::new(StabState::from_circuit(d.qubits, &t.left)?, StabState::from_circuit(d.qubits, &t.right)?)?;
                        Ok((Complex64::new(t.coeff[0], t.coeff[1]), dy))
                    })
                    .collect::<Result<Vec<_>>>()?;
                DyadicDecomposition::from_terms(d.qubits, terms)
            }
            StateSpec::Ensemble(e) => {
                let mut terms = Vec::new();
                for m in &e.members {
                    let kets = m.kets(e.qubits)?;
                    for (ci, si) in &kets {
                        for (cj, sj) in &kets {
                            terms.push((ci * cj.conj() * m.p, Dyad::new(si.clone(), sj.clone())?));
                        }
                    }
                }
                DyadicDecomposition::from_terms(e.qubits, terms)
            }
        }
    }

    pub fn mixed(&self) -> Result<MixedInput> {
        match self {
            StateSpec::Product(_) => MixedInput::from_bloch_product(&self.product()?),
            StateSpec::Ensemble(e) => {
                let parts = e
                    .members
                    .iter()
                    .map(|m| {
                        let (cs, ss) = m.kets(e.qubits)?.into_iter().unzip();
                        Ok((m.p, SparseDecomposition::new(cs, ss)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                MixedInput::new(vec![parts])
            }
            StateSpec::Dyads(_) => Err(Error::InvalidParameter("the bit-string sampler needs a product or ensemble state".into())),
        }
    }
}

impl Member {
    fn kets(&self, n: usize) -> Result<Vec<(Complex64, StabState)>> {
        self.terms
            .iter()
            .map(|t| Ok((Complex64::new(t.coeff[0], t.coeff[1]), StabState::from_circuit(n, &t.gates)?)))
            .collect()
    }
}

impl RunInput {
    pub fn channels(&self) -> Result<Vec<SimulableChannel>> {
        let n = self.state.n();
        self.circuit.iter().map(|c| c.build(n)).collect()
    }

    pub fn observable(&self) -> Result<Observable> {
        let n = self.state.n();
        match &self.measurement {
            None => Err(Error::InvalidParameter("input needs a measurement".into())),
            Some(MeasurementSpec::Projector(g)) => Ok(Observable::Projector(StabProjector::parse(n, g)?)),
            Some(MeasurementSpec::Pauli(s)) => {
                let p: PauliOp = s.parse()?;
                if p.n != n {
                    return Err(Error::DimensionMismatch(n, p.n));
                }
                if !p.is_hermitian() {
                    return Err(Error::NonHermitianPauli);
                }
                Ok(Observable::Pauli(p))
            }
        }
    }

    /// Gates of a circuit made only of deterministic Clifford channels.
    pub fn clifford_prefix(&self) -> Result<Vec<Gate>> {
        let mut gates = Vec::new();
        for ch in self.channels()? {
            match (ch.unitary_part(), ch.kraus_part()) {
                ([(p, g)], []) if (*p - 1.0).abs() < 1e-12 => gates.extend_from_slice(g),
                _ => {
                    return Err(Error::InvalidParameter(
                        "the bit-string sampler only accepts deterministic Clifford channels".into(),
                    ))
                }
            }
        }
        Ok(gates)
    }
}
