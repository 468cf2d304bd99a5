use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::Args;
use rand::Rng;
use serde::Serialize;

use magicsim::channels::{depolarizing, dyadic_decompose_product, pauli_measure_and_forward, t_gadget, SimulableChannel};
use magicsim::constrained_sim::{constrained_estimate, RobustnessPair};
use magicsim::dense_oracle::{completeness_violation, expand, product_density, random_program_check, DenseOp};
use magicsim::distill::{asymptotic_rate_bound, noisy_h, sweep, SweepRow, Target};
use magicsim::dyadic_sim::{estimate_born, run_samples, Observable};
use magicsim::monotones::{product_monotone, product_stab_norm, robustness_1q, robustness_lp, BlochState};
use magicsim::parallel::sample_rng;
use magicsim::rank_sim::{fast_norm, format_bits, sample_bitstrings, MixedInput, NormOracle, SamplerConfig};
use magicsim::stab_core::{Gate, PauliOp, StabProjector};

use crate::input::{self, named_qubit};
use crate::output::emit;
use crate::{CliError, Common, Format};

type CliResult = Result<(), CliError>;

fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| CliError::validation(format!("cannot parse {what} value {x:?}"))))
        .collect()
}

fn check_open_unit(v: f64, what: &str) -> CliResult {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(CliError::validation(format!("{what} = {v} outside (0, 1)")))
    }
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Additive precision ε.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    pfail: Option<f64>,
    #[command(flatten)]
    common: Common,
}

pub fn estimate(a: EstimateArgs) -> CliResult {
    let inp = input::read(&a.input)?;
    let eps = a.epsilon.or(inp.params.epsilon).unwrap_or(0.05);
    let pfail = a.pfail.or(inp.params.p_fail).unwrap_or(0.05);
    let seed = a.seed.or(inp.params.seed).unwrap_or(0);
    check_open_unit(pfail, "pfail")?;
    let decomp = inp.state.dyadic()?;
    let report = estimate_born(&decomp, &inp.channels()?, &inp.observable()?, eps, pfail, seed, a.common.workers)?;
    emit(&a.common, Format::Json, &report, &[&report])
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// ℓ1 precision δ of the sampled distribution.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    pfail: Option<f64>,
    /// Number of bit strings.
    #[arg(long)]
    samples: Option<u64>,
    /// Number of measured qubits (qubits 0..w).
    #[arg(long)]
    w: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Serialize)]
struct SampleDoc<'a> {
    seed: u64,
    w: usize,
    count: u64,
    strings: Vec<String>,
    report: &'a magicsim::rank_sim::RuntimeReport,
}

#[derive(Serialize)]
struct SampleRow {
    index: usize,
    bits: String,
    k: usize,
}

pub fn sample(a: SampleArgs) -> CliResult {
    let inp = input::read(&a.input)?;
    let mixed = inp.state.mixed()?;
    let mut cfg = SamplerConfig::new(
        a.w.or(inp.params.w).unwrap_or(mixed.n()),
        a.delta.or(inp.params.delta).unwrap_or(0.1),
        a.pfail.or(inp.params.p_fail).unwrap_or(0.05),
    );
    cfg.clifford = inp.clifford_prefix()?;
    cfg.workers = a.common.workers;
    let count = a.samples.or(inp.params.samples).unwrap_or(100);
    let seed = a.seed.or(inp.params.seed).unwrap_or(0);
    let out = sample_bitstrings(&mixed, &cfg, count, seed)?;
    eprintln!("sampled {count} strings in {:.3} s", out.report.wall_seconds);
    let strings: Vec<String> = out.strings.iter().map(|&x| format_bits(x, out.w)).collect();
    let rows: Vec<SampleRow> =
        strings.iter().zip(&out.k).enumerate().map(|(index, (b, &k))| SampleRow { index, bits: b.clone(), k }).collect();
    let doc = SampleDoc { seed, w: out.w, count, strings, report: &out.report };
    emit(&a.common, Format::Json, &doc, &rows)
}

#[derive(Args, Debug)]
pub struct ConstrainedArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Relative precision c of the σ estimate (ε = cλ).
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    pfail: Option<f64>,
    #[command(flatten)]
    common: Common,
}

pub fn constrained(a: ConstrainedArgs) -> CliResult {
    let inp = input::read(&a.input)?;
    let c = a.c.or(inp.params.c).unwrap_or(0.05);
    let pfail = a.pfail.or(inp.params.p_fail).unwrap_or(0.05);
    let seed = a.seed.or(inp.params.seed).unwrap_or(0);
    let pair = RobustnessPair::from_bloch_product(&inp.state.product()?)?;
    let report = constrained_estimate(&pair, &inp.channels()?, &inp.observable()?, c, pfail, seed, a.common.workers)?;
    emit(&a.common, Format::Json, &report, &[&report])
}

#[derive(Args, Debug)]
pub struct MonotoneArgs {
    /// Named single-qubit state (H, T, F, 0, 1, +, -, +i, -i, I).
    #[arg(long, default_value = "H")]
    state: String,
    /// Bloch vector "x,y,z"; overrides --state.
    #[arg(long)]
    bloch: Option<String>,
    /// Depolarizing factor applied to the Bloch vector.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    copies: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Serialize)]
struct MonotoneRow {
    state: String,
    alpha: f64,
    bx: f64,
    by: f64,
    bz: f64,
    copies: usize,
    /// Λ⁺ = Λ = Ξ of the product.
    lambda: f64,
    log2_lambda: f64,
    stab_norm: f64,
    log2_stab_norm: f64,
    robustness_single: f64,
    /// LP value for at most three qubits.
    robustness: Option<f64>,
}

pub fn monotone(a: MonotoneArgs) -> CliResult {
    if a.copies == 0 {
        return Err(CliError::validation("copies must be at least 1"));
    }
    if !(0.0..=1.0).contains(&a.alpha) {
        return Err(CliError::validation(format!("alpha = {} outside [0, 1]", a.alpha)));
    }
    let (label, base) = match &a.bloch {
        Some(b) => {
            let v: Vec<f64> = parse_list(b, "bloch")?;
            if v.len() != 3 {
                return Err(CliError::validation("bloch needs three components"));
            }
            (format!("bloch({b})"), BlochState::new(v[0], v[1], v[2])?)
        }
        None => (a.state.clone(), named_qubit(&a.state)?),
    };
    let s = base.depolarized(a.alpha);
    let states = vec![s; a.copies];
    let lambda = product_monotone(&states);
    let stab_norm = product_stab_norm(&states);
    let robustness = if a.copies <= 3 {
        Some(robustness_lp(&product_density(&vec![s.to_array(); a.copies])?)?.value)
    } else {
        None
    };
    let row = MonotoneRow {
        state: label,
        alpha: a.alpha,
        bx: s.bx,
        by: s.by,
        bz: s.bz,
        copies: a.copies,
        lambda,
        log2_lambda: lambda.log2(),
        stab_norm,
        log2_stab_norm: stab_norm.log2(),
        robustness_single: robustness_1q(&s),
        robustness,
    };
    emit(&a.common, Format::Csv, &row, &[&row])
}

#[derive(Args, Debug)]
pub struct DistillArgs {
    #[arg(long, default_value = "H")]
    target: String,
    /// Comma-separated α values of the input α|H⟩⟨H| + (1−α)I/2.
    #[arg(long, default_value = "0.75")]
    alpha: String,
    /// Comma-separated target copy counts.
    #[arg(long, default_value = "4")]
    m: String,
    /// Comma-separated output infidelities.
    #[arg(long, default_value = "1e-10")]
    epsilon: String,
    /// Log-spaced infidelity grid "lo:hi:points" in powers of ten; overrides --epsilon.
    #[arg(long)]
    eps_log: Option<String>,
    /// Success probability of the protocol.
    #[arg(long, default_value_t = 0.9)]
    p: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Serialize)]
struct DistillRow {
    target: Target,
    #[serde(flatten)]
    row: SweepRow<f64>,
    rate_bound: f64,
}

#[derive(Serialize)]
struct DistillDoc<'a> {
    target: Target,
    p: f64,
    rows: &'a [DistillRow],
}

pub fn distill(a: DistillArgs) -> CliResult {
    let target: Target = a.target.parse()?;
    let alphas: Vec<f64> = parse_list(&a.alpha, "alpha")?;
    let ms: Vec<u32> = parse_list(&a.m, "m")?;
    let epsilons: Vec<f64> = match &a.eps_log {
        Some(spec) => {
            let parts: Vec<f64> = spec
                .split(':')
                .map(|x| x.parse().map_err(|_| CliError::validation(format!("bad eps-log {spec:?}"))))
                .collect::<Result<_, _>>()?;
            if parts.len() != 3 || parts[2] < 2.0 {
                return Err(CliError::validation("eps-log needs lo:hi:points with points ≥ 2"));
            }
            let pts = parts[2] as usize;
            (0..pts).map(|i| 10f64.powf(parts[0] + (parts[1] - parts[0]) * i as f64 / (pts - 1) as f64)).collect()
        }
        None => parse_list(&a.epsilon, "epsilon")?,
    };
    let rows = sweep(target, &alphas, &ms, &epsilons, a.p)?
        .into_iter()
        .map(|row| Ok(DistillRow { target, rate_bound: asymptotic_rate_bound(&[noisy_h(row.alpha)], target)?, row }))
        .collect::<magicsim::Result<Vec<_>>>()?;
    let doc = DistillDoc { target, p: a.p, rows: &rows };
    emit(&a.common, Format::Csv, &doc, &rows)
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 2)]
    qubits: usize,
    /// Dyadic samples; the rank sampler uses a twentieth of this.
    #[arg(long, default_value_t = 20000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Serialize)]
struct BenchRow {
    kernel: &'static str,
    qubits: usize,
    count: u64,
    seconds: f64,
    per_item_us: f64,
}

fn timed(kernel: &'static str, qubits: usize, count: u64, f: impl FnOnce() -> magicsim::Result<()>) -> Result<BenchRow, CliError> {
    let t = Instant::now();
    f()?;
    let seconds = t.elapsed().as_secs_f64();
    Ok(BenchRow { kernel, qubits, count, seconds, per_item_us: seconds * 1e6 / count.max(1) as f64 })
}

pub fn bench(a: BenchArgs) -> CliResult {
    let n = a.qubits;
    if n == 0 || n > 3 {
        return Err(CliError::validation("bench supports 1 to 3 qubits"));
    }
    let mut rows = Vec::new();
    let h = vec![BlochState::h_state(); n];
    let decomp = dyadic_decompose_product(&h)?;
    let circuit: Vec<SimulableChannel> = (0..n).map(|q| depolarizing(0.1)?.embed(n, &[q])).collect::<magicsim::Result<_>>()?;
    let obs = Observable::Projector(StabProjector::basis(n, &[0], &[false])?);
    rows.push(timed("dyadic_sample", n, a.samples, || {
        run_samples(&decomp, &circuit, &obs, a.samples, a.seed, a.common.workers).map(|_| ())
    })?);

    let mixed = MixedInput::from_bloch_product(&vec![BlochState::h_state().depolarized(0.9); n])?;
    let strings = (a.samples / 20).max(1);
    let mut cfg = SamplerConfig::new(n, 0.15, 0.05);
    cfg.oracle = NormOracle::Exact;
    cfg.workers = a.common.workers;
    rows.push(timed("rank_sample_exact_norms", n, strings, || sample_bitstrings(&mixed, &cfg, strings, a.seed).map(|_| ()))?);

    let pure = magicsim::rank_sim::SparseDecomposition::pure_product(&h)?;
    let v = pure.sparsify(100, &mut sample_rng(a.seed, 0))?;
    rows.push(timed("fast_norm_k100_eps0.1", n, 1, || fast_norm(&v, 0.1, 0.05, &mut sample_rng(a.seed, 1)).map(|_| ()))?);

    let rho = product_density(&vec![BlochState::<f64>::h_state().to_array(); n])?;
    rows.push(timed("robustness_lp", n, 1, || robustness_lp(&rho).map(|_| ()))?);
    emit(&a.common, Format::Json, &rows, &rows)
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// Random cases per check.
    #[arg(long, default_value_t = 200)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    cases: u64,
    max_error: f64,
    tolerance: f64,
    passed: bool,
}

#[derive(Serialize)]
struct SelftestDoc<'a> {
    passed: bool,
    seed: u64,
    checks: &'a [Check],
}

fn check(name: &'static str, cases: u64, tolerance: f64, mut case: impl FnMut(u64) -> magicsim::Result<f64>) -> Result<Check, CliError> {
    let mut max_error = 0f64;
    for i in 0..cases {
        max_error = max_error.max(case(i)?);
    }
    Ok(Check { name, cases, max_error, tolerance, passed: max_error <= tolerance })
}

fn random_bloch<R: Rng>(rng: &mut R) -> BlochState<f64> {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let r2 = v.iter().map(|x| x * x).sum::<f64>();
        if r2 <= 1.0 {
            // Push some draws onto the sphere so pure states are covered too.
            let s = if rng.gen::<bool>() { 1.0 / r2.sqrt() } else { 1.0 };
            return BlochState::new(v[0] * s, v[1] * s, v[2] * s).expect("inside the ball");
        }
    }
}

pub fn selftest(a: SelftestArgs) -> CliResult {
    let seed = a.seed;
    let mut checks = Vec::new();
    checks.push(check("stabilizer_programs_vs_dense", a.samples, 1e-10, |i| {
        Ok(random_program_check(&mut sample_rng(seed, i))?.max_error)
    })?);

    let library: Vec<SimulableChannel> = vec![
        depolarizing(0.3)?,
        t_gadget()?,
        pauli_measure_and_forward(&PauliOp::z(1, 0)?, vec![Gate::X(0)])?,
        pauli_measure_and_forward(&"+XZ".parse()?, vec![Gate::H(0), Gate::CZ(0, 1)])?,
    ];
    checks.push(check("channel_completeness", library.len() as u64, 1e-10, |i| completeness_violation(&library[i as usize]))?);

    checks.push(check("dyadic_decomposition_vs_dense", a.samples, 1e-9, |i| {
        let mut rng = sample_rng(seed ^ 0xd1ad, i);
        let n = rng.gen_range(1..=3);
        let states: Vec<BlochState<f64>> = (0..n).map(|_| random_bloch(&mut rng)).collect();
        let d = dyadic_decompose_product(&states)?;
        let mut sum = DenseOp::zeros(n)?;
        for (alpha, dy) in d.expand_terms(1 << 16)? {
            sum = sum.add(&expand(&dy.left)?.outer(&expand(&dy.right)?).scale(alpha));
        }
        let arrs: Vec<[f64; 3]> = states.iter().map(|s| s.to_array()).collect();
        Ok(sum.max_abs_diff(&product_density(&arrs)?))
    })?);

    checks.push(check("single_qubit_robustness_lp", a.samples.min(50), 1e-7, |i| {
        let s = random_bloch(&mut sample_rng(seed ^ 0x1b, i));
        let lp = robustness_lp(&product_density(&[s.to_array()])?)?;
        Ok((lp.value - robustness_1q(&s)).abs().max(lp.gap.abs()))
    })?);

    let passed = checks.iter().all(|c| c.passed);
    emit(&a.common, Format::Json, &SelftestDoc { passed, seed, checks: &checks }, &checks)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::failed("selftest found mismatches"))
    }
}
