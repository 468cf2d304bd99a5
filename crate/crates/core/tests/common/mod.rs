#![allow(dead_code)]

use magicsim::channels::{
    clifford_mix, depolarizing, dyadic_decompose_product, pauli_measure_and_forward, t_gadget, DyadicDecomposition,
    SimulableChannel,
};
use magicsim::dense_oracle::{
    apply_channel_dense, born_probability_dense, expand, pauli_expectation_dense, product_density, DenseVec,
};
use magicsim::dyadic_sim::Observable;
use magicsim::monotones::BlochState;
use magicsim::stab_core::{Gate, PauliOp, StabProjector, StabState};
use rand::Rng;

pub fn random_gate<R: Rng>(n: usize, rng: &mut R) -> Gate {
    let q = rng.gen_range(0..n);
    let mut r = rng.gen_range(0..n);
    if n > 1 {
        while r == q {
            r = rng.gen_range(0..n);
        }
    }
    let kind = if n == 1 { rng.gen_range(0..6) } else { rng.gen_range(0..9) };
    match kind {
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

pub fn random_circuit<R: Rng>(n: usize, len: usize, rng: &mut R) -> Vec<Gate> {
    (0..len).map(|_| random_gate(n, rng)).collect()
}

/// Random Hermitian non-identity Pauli.
pub fn random_pauli<R: Rng>(n: usize, rng: &mut R) -> PauliOp {
    loop {
        let x = rng.gen::<u64>() & ((1 << n) - 1);
        let z = rng.gen::<u64>() & ((1 << n) - 1);
        if x | z != 0 {
            return PauliOp::new(n, x, z, if rng.gen() { 0 } else { 2 }).unwrap();
        }
    }
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> StabState {
    let len = rng.gen_range(0..40);
    StabState::from_circuit(n, &random_circuit(n, len, rng)).unwrap()
}

pub fn dense(st: &StabState) -> DenseVec {
    expand(st).unwrap()
}

/// Uniform in the Bloch ball, or on the sphere when `pure`.
pub fn random_bloch<R: Rng>(pure: bool, rng: &mut R) -> BlochState<f64> {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let r2: f64 = v.iter().map(|x| x * x).sum();
        if r2 <= 1.0 && r2 > 1e-6 {
            let s = if pure { 1.0 / r2.sqrt() } else { 1.0 };
            return BlochState::new(v[0] * s, v[1] * s, v[2] * s).unwrap();
        }
    }
}

/// Random state outside the stabilizer octahedron.
pub fn random_magic_bloch<R: Rng>(rng: &mut R) -> BlochState<f64> {
    loop {
        let s = random_bloch(rng.gen_bool(0.3), rng);
        if s.l1() > 1.0 + 1e-6 {
            return s;
        }
    }
}

/// A channel from the built-in library placed on random qubits of an n-qubit register.
pub fn random_channel<R: Rng>(n: usize, rng: &mut R) -> SimulableChannel {
    let q = rng.gen_range(0..n);
    let kind = if n == 1 { rng.gen_range(0..3) } else { rng.gen_range(0..5) };
    match kind {
        0 => depolarizing(rng.gen_range(0.0..1.0)).unwrap().embed(n, &[q]).unwrap(),
        1 => SimulableChannel::clifford(n, random_circuit(n, rng.gen_range(1..6), rng)).unwrap(),
        2 => {
            let p = random_pauli(n, rng);
            pauli_measure_and_forward(&p, random_circuit(n, rng.gen_range(0..3), rng)).unwrap()
        }
        3 => {
            let mut r = rng.gen_range(0..n);
            while r == q {
                r = rng.gen_range(0..n);
            }
            t_gadget().unwrap().embed(n, &[q, r]).unwrap()
        }
        _ => {
            let a = rng.gen_range(0.1..0.9);
            clifford_mix(n, vec![(a, random_circuit(n, 3, rng)), (1.0 - a, random_circuit(n, 3, rng))]).unwrap()
        }
    }
}

pub struct Fixture {
    pub states: Vec<BlochState<f64>>,
    pub decomp: DyadicDecomposition,
    pub circuit: Vec<SimulableChannel>,
    pub obs: Observable,
    /// Dense value of `Tr[E ℰ(ρ)]`.
    pub exact: f64,
}

/// Product inputs on 1 to 3 qubits (at least one magic factor), 1 to 4 library
/// channels and a random basis projector or Pauli observable.
pub fn random_fixture<R: Rng>(rng: &mut R) -> Fixture {
    let n = rng.gen_range(1..=3);
    let mut states: Vec<BlochState<f64>> = (0..n).map(|_| random_bloch(rng.gen_bool(0.3), rng)).collect();
    states[0] = random_magic_bloch(rng);
    let circuit: Vec<SimulableChannel> = (0..rng.gen_range(1..=4)).map(|_| random_channel(n, rng)).collect();
    let obs = if rng.gen_bool(0.5) {
        let q = rng.gen_range(0..n);
        Observable::Projector(StabProjector::basis(n, &[q], &[rng.gen()]).unwrap())
    } else {
        Observable::Pauli(random_pauli(n, rng))
    };
    let arrs: Vec<[f64; 3]> = states.iter().map(|s| s.to_array()).collect();
    let mut rho = product_density(&arrs).unwrap();
    for ch in &circuit {
        rho = apply_channel_dense(&rho, ch).unwrap();
    }
    let exact = match &obs {
        Observable::Projector(p) => born_probability_dense(&rho, p).unwrap(),
        Observable::Pauli(p) => pauli_expectation_dense(&rho, p).unwrap(),
    };
    let decomp = dyadic_decompose_product(&states).unwrap();
    Fixture { states, decomp, circuit, obs, exact }
}
