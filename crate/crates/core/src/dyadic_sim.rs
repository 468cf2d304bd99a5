//! Dyadic frame simulator: Monte-Carlo estimation of Born probabilities and
//! Pauli expectations by sampling Kraus trajectories of stabilizer dyads.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{Dyad, DyadicDecomposition, SimulableChannel, StabKraus};
use crate::error::{Error, Result};
use crate::parallel::{reduce_samples, sample_rng};
use crate::stab_core::{Gate, PauliOp, StabProjector, StabState};

/// Tolerance separating rounding noise from a genuinely negative abort probability.
pub const ABORT_TOL: f64 = 1e-12;

/// Measured quantity: a stabilizer projector (Born probability) or a Pauli observable.
#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    Projector(StabProjector),
    Pauli(PauliOp),
}

impl Observable {
    pub fn n(&self) -> usize {
        match self {
            Observable::Projector(p) => p.n(),
            Observable::Pauli(p) => p.n,
        }
    }

    /// `⟨R|E|L⟩`.
    pub fn dyad_value(&self, d: &Dyad) -> Result<Complex64> {
        let el = match self {
            Observable::Projector(p) => d.left.project(p)?.0,
            Observable::Pauli(p) => {
                if !p.is_hermitian() {
                    return Err(Error::NonHermitianPauli);
                }
                d.left.apply_pauli(p)?
            }
        };
        d.right.inner_product(&el)
    }

    pub fn is_projector(&self) -> bool {
        matches!(self, Observable::Projector(_))
    }
}

/// One of the two term lists of a channel.
#[derive(Clone, Copy, Debug)]
pub enum TermList<'a> {
    Unitary(&'a [(f64, Vec<Gate>)]),
    Kraus(&'a [(f64, StabKraus)]),
}

/// Outcome of one update: the term index (1-based) and the new dyad, or an abort.
#[derive(Clone, Debug)]
pub enum Update {
    Selected(usize, Dyad),
    Abort,
}

/// `(P_1, …, P_N)` and `P_0` for updating `d` with a term list whose total weight is `p_x`.
///
/// Unitary lists give `P_r = p_r/P_X`; Kraus lists give
/// `P_r = (q_r/P_X)·2^h·‖Π_r|L⟩‖·‖Π_r|R⟩‖` for normalized L, R.
pub fn transition_probabilities(d: &Dyad, list: TermList<'_>, p_x: f64) -> Result<(Vec<f64>, f64)> {
    Ok(transitions(d, list, p_x)?.0)
}

type Projected = Vec<Option<(StabState, StabState)>>;

fn transitions(d: &Dyad, list: TermList<'_>, p_x: f64) -> Result<((Vec<f64>, f64), Projected)> {
    if !(p_x > 0.0 && p_x <= 1.0 + ABORT_TOL) {
        return Err(Error::InvalidParameter(format!("list weight {p_x} outside (0, 1]")));
    }
    let (probs, projected) = match list {
        TermList::Unitary(us) => (us.iter().map(|(p, _)| p / p_x).collect::<Vec<_>>(), Vec::new()),
        TermList::Kraus(ks) => {
            let mut probs = Vec::with_capacity(ks.len());
            let mut projected = Vec::with_capacity(ks.len());
            for (q, k) in ks {
                let (pl, rl) = d.left.project(k.proj())?;
                let (pr, rr) = d.right.project(k.proj())?;
                let p = q / p_x * 2f64.powi(k.h() as i32) * rl * rr;
                probs.push(p);
                projected.push((p > 0.0).then_some((pl, pr)));
            }
            (probs, projected)
        }
    };
    let total: f64 = probs.iter().sum();
    let p0 = 1.0 - total;
    if p0 < -ABORT_TOL {
        return Err(Error::InvalidChannel(format!("transition probabilities sum to {total} > 1")));
    }
    Ok(((probs, p0.max(0.0)), projected))
}

fn pick<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> Option<usize> {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return Some(i);
        }
    }
    None
}

/// One stabilizer Kraus update of a dyad with the given term list.
pub fn stabilizer_update<R: Rng + ?Sized>(d: &Dyad, list: TermList<'_>, p_x: f64, rng: &mut R) -> Result<Update> {
    let ((probs, _), projected) = transitions(d, list, p_x)?;
    let Some(r) = pick(&probs, rng) else { return Ok(Update::Abort) };
    let new = match list {
        TermList::Unitary(us) => {
            let gates = &us[r].1;
            Dyad { left: d.left.apply_circuit(gates)?, right: d.right.apply_circuit(gates)? }
        }
        TermList::Kraus(ks) => {
            let (pl, pr) = projected[r].as_ref().expect("selected term has positive probability");
            let gates = ks[r].1.circuit();
            Dyad {
                left: pl.normalized().scaled(Complex64::new(d.left.norm(), 0.0)).apply_circuit(gates)?,
                right: pr.normalized().scaled(Complex64::new(d.right.norm(), 0.0)).apply_circuit(gates)?,
            }
        }
    };
    Ok(Update::Selected(r + 1, new))
}

/// Picks the unitary list with probability `P_U`, otherwise the Kraus list, and updates.
pub fn apply_channel<R: Rng + ?Sized>(d: &Dyad, ch: &SimulableChannel, rng: &mut R) -> Result<Update> {
    if ch.n() != d.n() {
        return Err(Error::DimensionMismatch(d.n(), ch.n()));
    }
    let pu = ch.p_unitary();
    let use_unitary = ch.kraus_part().is_empty() || (pu > 0.0 && rng.gen::<f64>() < pu);
    if use_unitary {
        stabilizer_update(d, TermList::Unitary(ch.unitary_part()), pu, rng)
    } else {
        let pk = (1.0 - pu).max(f64::MIN_POSITIVE);
        match stabilizer_update(d, TermList::Kraus(ch.kraus_part()), pk, rng)? {
            Update::Selected(r, nd) => Ok(Update::Selected(ch.unitary_part().len() + r, nd)),
            Update::Abort => Ok(Update::Abort),
        }
    }
}

/// A sampled path of a dyad through the circuit.
#[derive(Clone, Debug)]
pub struct Trajectory {
    /// Initial dyad index per decomposition block.
    pub r0: Vec<usize>,
    /// Term chosen at each channel (0 = abort); stops at the first abort.
    pub steps: Vec<usize>,
    /// `α_j/|α_j|` of the initial dyad.
    pub phase: Complex64,
    pub current: Option<Dyad>,
}

impl Trajectory {
    pub fn is_aborted(&self) -> bool {
        self.current.is_none()
    }
}

pub fn run_trajectory<R: Rng + ?Sized>(
    decomp: &DyadicDecomposition,
    circuit: &[SimulableChannel],
    rng: &mut R,
) -> Result<Trajectory> {
    let s = decomp.sample(rng)?;
    let mut t = Trajectory { r0: s.indices, steps: Vec::with_capacity(circuit.len()), phase: s.phase, current: Some(s.dyad) };
    for ch in circuit {
        let d = t.current.as_ref().expect("live trajectory");
        match apply_channel(d, ch, rng)? {
            Update::Selected(r, nd) => {
                t.steps.push(r);
                t.current = Some(nd);
            }
            Update::Abort => {
                t.steps.push(0);
                t.current = None;
                break;
            }
        }
    }
    Ok(t)
}

/// Result of [`estimate_born`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub mu_hat: f64,
    pub epsilon: f64,
    pub p_fail: f64,
    #[serde(rename = "M")]
    pub samples: u64,
    pub seed: u64,
    /// ‖α‖₁, the bound on every single sample.
    pub per_sample_bound: f64,
    pub max_abs_sample: f64,
    /// Samples that were exactly zero (aborted trajectories included).
    pub zero_samples: u64,
}

/// `M = ⌈2‖α‖₁² ε⁻² ln(2/p_fail)⌉`.
pub fn sample_count(l1: f64, epsilon: f64, p_fail: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(p_fail > 0.0 && p_fail < 1.0) {
        return Err(Error::InvalidParameter(format!("p_fail must lie in (0, 1), got {p_fail}")));
    }
    let m = (2.0 * l1 * l1 / (epsilon * epsilon) * (2.0 / p_fail).ln()).ceil();
    if m > u64::MAX as f64 / 2.0 {
        return Err(Error::InvalidParameter("sample count overflows".into()));
    }
    Ok(m as u64)
}

fn check_shapes(decomp: &DyadicDecomposition, circuit: &[SimulableChannel], obs: &Observable) -> Result<()> {
    let n = decomp.n();
    for ch in circuit {
        if ch.n() != n {
            return Err(Error::DimensionMismatch(n, ch.n()));
        }
    }
    if obs.n() != n {
        return Err(Error::DimensionMismatch(n, obs.n()));
    }
    Ok(())
}

/// One sample `Re{‖α‖₁ e^{iθ} ⟨R′|E|L′⟩}` (0 when the trajectory aborts).
pub fn single_sample<R: Rng + ?Sized>(
    decomp: &DyadicDecomposition,
    circuit: &[SimulableChannel],
    obs: &Observable,
    rng: &mut R,
) -> Result<f64> {
    let t = run_trajectory(decomp, circuit, rng)?;
    match &t.current {
        None => Ok(0.0),
        Some(d) => Ok(decomp.l1() * (t.phase * obs.dyad_value(d)?).re),
    }
}

/// Mean of `count` samples with per-sample streams derived from `seed`.
pub fn run_samples(
    decomp: &DyadicDecomposition,
    circuit: &[SimulableChannel],
    obs: &Observable,
    count: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<crate::parallel::SampleStats> {
    check_shapes(decomp, circuit, obs)?;
    reduce_samples(count, workers, |i| single_sample(decomp, circuit, obs, &mut sample_rng(seed, i)))
}

/// Estimates `Tr[E ℰ(ρ)]` to within ε with probability at least `1 − p_fail`.
pub fn estimate_born(
    decomp: &DyadicDecomposition,
    circuit: &[SimulableChannel],
    obs: &Observable,
    epsilon: f64,
    p_fail: f64,
    seed: u64,
    workers: Option<usize>,
) -> Result<EstimateReport> {
    let l1 = decomp.l1();
    let m = sample_count(l1, epsilon, p_fail)?;
    let stats = run_samples(decomp, circuit, obs, m, seed, workers)?;
    Ok(EstimateReport {
        mu_hat: stats.mean(),
        epsilon,
        p_fail,
        samples: m,
        seed,
        per_sample_bound: l1,
        max_abs_sample: stats.max_abs,
        zero_samples: stats.zeros,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{dyadic_decompose_product, pauli_measure_and_forward};
    use crate::monotones::{BlochState, Stab1};
    use approx::assert_abs_diff_eq;

    fn stab(n: usize, gates: &[Gate]) -> StabState {
        StabState::from_circuit(n, gates).unwrap()
    }

    #[test]
    fn measure_and_keep_on_plus() {
        let plus = stab(1, &[Gate::H(0)]);
        let d = Dyad::new(plus.clone(), plus).unwrap();
        let ch = pauli_measure_and_forward(&PauliOp::z(1, 0).unwrap(), vec![]).unwrap();
        let (p, p0) = transition_probabilities(&d, TermList::Kraus(ch.kraus_part()), 1.0).unwrap();
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p0, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn controlled_kraus_on_mixed_dyad() {
        // |+0⟩⟨−0| with {I⊗|0⟩⟨0|, X⊗|1⟩⟨1|}: the first term is selected with certainty.
        let l = stab(2, &[Gate::H(0)]);
        let r = stab(2, &[Gate::X(0), Gate::H(0)]);
        let d = Dyad::new(l, r).unwrap();
        let z1 = PauliOp::z(2, 1).unwrap();
        let k0 = StabKraus::new(StabProjector::new(2, vec![(z1, 1)]).unwrap(), vec![]).unwrap();
        let k1 = StabKraus::new(StabProjector::new(2, vec![(z1, -1)]).unwrap(), vec![Gate::X(0)]).unwrap();
        let ch = SimulableChannel::new(2, vec![], vec![(0.5, k0), (0.5, k1)]).unwrap();
        let (p, _) = transition_probabilities(&d, TermList::Kraus(ch.kraus_part()), 1.0).unwrap();
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-12);
        let mut rng = sample_rng(1, 0);
        match apply_channel(&d, &ch, &mut rng).unwrap() {
            Update::Selected(1, nd) => {
                assert_abs_diff_eq!((nd.left.inner_product(&d.left).unwrap() - 1.0).norm(), 0.0, epsilon = 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn plus_state_born_probability() {
        let decomp = dyadic_decompose_product(&[BlochState::stabilizer(Stab1::Plus)]).unwrap();
        let obs = Observable::Projector(StabProjector::basis(1, &[0], &[false]).unwrap());
        let rep = estimate_born(&decomp, &[], &obs, 0.02, 0.01, 3, Some(1)).unwrap();
        assert!((rep.mu_hat - 0.5).abs() < 0.02);
        assert_eq!(rep.samples, sample_count(1.0, 0.02, 0.01).unwrap());
    }

    #[test]
    fn h_state_born_probability() {
        let decomp = dyadic_decompose_product(&[BlochState::h_state()]).unwrap();
        let obs = Observable::Projector(StabProjector::basis(1, &[0], &[false]).unwrap());
        let rep = estimate_born(&decomp, &[], &obs, 0.02, 0.01, 11, None).unwrap();
        let want = (std::f64::consts::PI / 8.0).cos().powi(2);
        assert!((rep.mu_hat - want).abs() < 0.02, "{} vs {want}", rep.mu_hat);
        assert!(rep.max_abs_sample <= rep.per_sample_bound + 1e-12);
    }
}
