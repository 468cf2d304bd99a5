use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Clifford generators understood by the stabilizer engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    S(usize),
    Sdg(usize),
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    /// Control, target.
    CX(usize, usize),
    CZ(usize, usize),
    Swap(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::S(q) | Gate::Sdg(q) | Gate::H(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => {
                vec![q]
            }
            Gate::CX(a, b) | Gate::CZ(a, b) | Gate::Swap(a, b) => vec![a, b],
        }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::InvalidParameter(format!("two-qubit gate on repeated qubit {}", qs[0])));
        }
        Ok(())
    }

    /// Relabels qubits through `map` (local index -> global index).
    pub fn remap(&self, map: &[usize]) -> Result<Gate> {
        let m = |q: usize| {
            map.get(q).copied().ok_or(Error::QubitOutOfRange { index: q, n: map.len() })
        };
        Ok(match *self {
            Gate::S(q) => Gate::S(m(q)?),
            Gate::Sdg(q) => Gate::Sdg(m(q)?),
            Gate::H(q) => Gate::H(m(q)?),
            Gate::X(q) => Gate::X(m(q)?),
            Gate::Y(q) => Gate::Y(m(q)?),
            Gate::Z(q) => Gate::Z(m(q)?),
            Gate::CX(a, b) => Gate::CX(m(a)?, m(b)?),
            Gate::CZ(a, b) => Gate::CZ(m(a)?, m(b)?),
            Gate::Swap(a, b) => Gate::Swap(m(a)?, m(b)?),
        })
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            g => g,
        }
    }
}

/// Inverse of a gate sequence (reversed order, each gate inverted).
pub fn inverse_circuit(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().map(Gate::inverse).collect()
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::S(q) => write!(f, "S {q}"),
            Gate::Sdg(q) => write!(f, "SDG {q}"),
            Gate::H(q) => write!(f, "H {q}"),
            Gate::X(q) => write!(f, "X {q}"),
            Gate::Y(q) => write!(f, "Y {q}"),
            Gate::Z(q) => write!(f, "Z {q}"),
            Gate::CX(a, b) => write!(f, "CX {a} {b}"),
            Gate::CZ(a, b) => write!(f, "CZ {a} {b}"),
            Gate::Swap(a, b) => write!(f, "SWAP {a} {b}"),
        }
    }
}

/// Parses `"H 0"`, `"CX 0 1"`, `"sdg 2"` and similar.
impl FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let name = parts.next().ok_or_else(|| Error::Parse("empty gate".into()))?;
        let args = parts
            .map(|a| a.parse::<usize>().map_err(|_| Error::Parse(format!("bad qubit '{a}' in '{s}'"))))
            .collect::<Result<Vec<_>>>()?;
        let one = |g: fn(usize) -> Gate| match args.as_slice() {
            [q] => Ok(g(*q)),
            _ => Err(Error::Parse(format!("'{s}' takes one qubit"))),
        };
        let two = |g: fn(usize, usize) -> Gate| match args.as_slice() {
            [a, b] => Ok(g(*a, *b)),
            _ => Err(Error::Parse(format!("'{s}' takes two qubits"))),
        };
        match name.to_ascii_uppercase().as_str() {
            "S" => one(Gate::S),
            "SDG" | "S†" | "SDAG" => one(Gate::Sdg),
            "H" => one(Gate::H),
            "X" => one(Gate::X),
            "Y" => one(Gate::Y),
            "Z" => one(Gate::Z),
            "CX" | "CNOT" => two(Gate::CX),
            "CZ" => two(Gate::CZ),
            "SWAP" => two(Gate::Swap),
            _ => Err(Error::Parse(format!("unknown gate '{name}'"))),
        }
    }
}

impl Serialize for Gate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Gate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
