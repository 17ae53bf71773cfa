use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use finqm::cyclic::EigenRange;
use finqm::dynamics::{
    evolve_free, evolve_oscillator, free_semigroup_residual, oscillator_generator, EvolutionStep,
    OscillatorGenerator,
};
use finqm::io::{fourier_wigner_rows, load_state, wigner_rows, Preset, StateFile};
use finqm::oracle::{run_oracle, OracleReport};
use finqm::sl2::Sl2;
use finqm::subspaces::{bform, dm_drift, dm_invariant, rho};
use finqm::verify::{run_verify, VerifyConfig};
use finqm::wigner::{fourier_wigner, momentum_marginal_residual, moments, wigner, StateVector};
use finqm::{Backend, Cyclotomic, Fe, PrimeField, Scalar};

#[derive(Parser)]
#[command(name = "finqm", version, about = "Quantum mechanics over the prime field F_N")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the representation, phase-space, subspace and dynamics suites.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Random samples per randomized check.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Wigner and Fourier-Wigner tables of a state.
    Wigner {
        #[command(flatten)]
        common: Common,
        /// State file (JSON) or preset: delta:k0, uniform, char:m, chirp:b.
        #[arg(long)]
        state: String,
        #[arg(long)]
        require_normalized: bool,
    },
    /// Free-particle or oscillator evolution of a state.
    Evolve {
        #[command(flatten)]
        common: Common,
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value = "delta:1")]
        state: String,
        #[arg(long)]
        require_normalized: bool,
        /// Nonsquare defining F_{N^2} (oscillator); defaults to the smallest one.
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<i64>,
        /// Mass of the free particle.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        mass: i64,
        /// Defaults to N + 1 (oscillator) or N - 1 (free).
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Group-algebra oracle at small N.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Random Jacobi elements for the span-closure check.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// rho_h / B_h checks and invariant trajectories.
    Invariants {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "delta:1")]
        state: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<i64>,
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long, default_value_t = 6)]
        max_order: u32,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    omega: i64,
    #[arg(long, default_value = "float")]
    backend: Backend,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for reports; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Family {
    Free,
    Oscillator,
}

/// Configuration problems exit with 2, failed checks with 1.
enum Failure {
    Config(anyhow::Error),
    Checks,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Config(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Verify { common, samples } => cmd_verify(&common, samples),
        Command::Wigner {
            common,
            state,
            require_normalized,
        } => cmd_wigner(&common, &state, require_normalized),
        Command::Evolve {
            common,
            family,
            state,
            require_normalized,
            delta,
            mass,
            steps,
        } => cmd_evolve(&common, family, &state, require_normalized, delta, mass, steps),
        Command::Oracle { common, samples } => cmd_oracle(&common, samples),
        Command::Invariants {
            common,
            state,
            delta,
            steps,
            max_order,
            samples,
        } => cmd_invariants(&common, &state, delta, steps, max_order, samples),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

impl Common {
    fn field(&self, fallback: Option<u64>) -> anyhow::Result<PrimeField> {
        let n = self.n.or(fallback).context("--n is required")?;
        Ok(PrimeField::new(n)?)
    }

    fn omega(&self, field: PrimeField) -> anyhow::Result<Fe> {
        let w = field.elem(self.omega);
        anyhow::ensure!(!w.is_zero(), finqm::Error::ZeroOmega);
        Ok(w)
    }

    fn check_tolerance(&self) -> anyhow::Result<()> {
        anyhow::ensure!(self.tolerance > 0.0, "tolerance must be positive, got {}", self.tolerance);
        Ok(())
    }

    fn emit<T: Serialize>(&self, name: &str, value: &T) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(value)?;
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
                let path = dir.join(name);
                fs::write(&path, text + "\n").with_context(|| format!("cannot write {}", path.display()))?;
            }
            None => {
                let mut out = std::io::stdout().lock();
                if let Err(e) = writeln!(out, "{text}") {
                    // a closed pipe is not an error
                    if e.kind() != std::io::ErrorKind::BrokenPipe {
                        return Err(e.into());
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    residual: f64,
    passed: bool,
}

impl Check {
    fn new(name: &'static str, residual: f64, tol: f64) -> Self {
        Check {
            name,
            residual,
            passed: residual <= tol,
        }
    }

    fn flag(name: &'static str, ok: bool) -> Self {
        Check {
            name,
            residual: if ok { 0.0 } else { 1.0 },
            passed: ok,
        }
    }
}

fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

fn pairs<S: Scalar>(v: &[S]) -> Vec<[f64; 2]> {
    v.iter()
        .map(|x| {
            let z = x.to_complex();
            [z.re, z.im]
        })
        .collect()
}

enum StateSource {
    Preset(Preset),
    File(PathBuf),
}

impl StateSource {
    fn parse(state_arg: &str) -> Self {
        match state_arg.parse::<Preset>() {
            Ok(p) => StateSource::Preset(p),
            Err(_) => StateSource::File(PathBuf::from(state_arg)),
        }
    }

    /// The modulus a state file pins, if any.
    fn file_modulus(&self) -> anyhow::Result<Option<(u64, i64)>> {
        match self {
            StateSource::Preset(_) => Ok(None),
            StateSource::File(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("cannot read state file {}", p.display()))?;
                let file: StateFile = serde_json::from_str(&text)
                    .with_context(|| format!("malformed state file {}", p.display()))?;
                Ok(Some((file.n as u64, file.omega as i64)))
            }
        }
    }
}

/// Resolves `(field, omega)` from the flags and, when a state file is given, from the file.
fn resolve_field(common: &Common, src: &StateSource) -> anyhow::Result<(PrimeField, Fe)> {
    let pinned = src.file_modulus()?;
    if let Some((n, w)) = pinned {
        if let Some(flag_n) = common.n {
            anyhow::ensure!(flag_n == n, "--n {flag_n} disagrees with state file modulus {n}");
        }
        let field = PrimeField::new(n)?;
        let omega = field.elem(w);
        anyhow::ensure!(!omega.is_zero(), finqm::Error::ZeroOmega);
        return Ok((field, omega));
    }
    let field = common.field(None)?;
    Ok((field, common.omega(field)?))
}

/// Float states are normalized; exact states come from presets only and keep unit-modulus amplitudes.
fn float_state(src: &StateSource, omega: Fe, require_normalized: bool) -> anyhow::Result<StateVector<Complex64>> {
    Ok(match src {
        StateSource::Preset(p) => p.build_normalized(omega)?,
        StateSource::File(path) => load_state(path, require_normalized)?,
    })
}

fn exact_state(src: &StateSource, omega: Fe) -> anyhow::Result<StateVector<Cyclotomic>> {
    match src {
        StateSource::Preset(p) => Ok(p.build(omega)?),
        StateSource::File(_) => anyhow::bail!("the exact backend takes preset states only"),
    }
}

// verify

fn cmd_verify(common: &Common, samples: Option<usize>) -> Outcome {
    let n = common.n.context("--n is required")?;
    PrimeField::new(n)?;
    let mut config = VerifyConfig::new(n as u32, common.omega.rem_euclid(n as i64) as u32);
    config.backend = common.backend;
    config.tolerance = common.tolerance;
    config.seed = common.seed;
    config.samples = samples;
    config.validate()?;
    let report = run_verify(&config)?;
    common.emit("verify.json", &report)?;
    for c in report.failures() {
        eprintln!("FAIL {} [{}] residual {:e}", c.name, c.tag, c.residual);
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

// wigner

#[derive(Serialize)]
struct WignerReport {
    n: u32,
    omega: u32,
    backend: Backend,
    amplitudes: Vec<[f64; 2]>,
    /// `table[r][s]`.
    table: Vec<Vec<f64>>,
    position_marginal: Vec<f64>,
    momentum_marginal: Vec<f64>,
    /// `fourier_wigner[q][p] = [re, im]`.
    fourier_wigner: Vec<Vec<[f64; 2]>>,
    checks: Vec<Check>,
    passed: bool,
}

fn cmd_wigner(common: &Common, state_arg: &str, require_normalized: bool) -> Outcome {
    common.check_tolerance()?;
    let src = StateSource::parse(state_arg);
    let (_, omega) = resolve_field(common, &src)?;
    let passed = match common.backend {
        Backend::Float => wigner_run(common, &float_state(&src, omega, require_normalized)?)?,
        Backend::Exact => wigner_run(common, &exact_state(&src, omega)?)?,
    };
    if passed {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn wigner_run<S: Scalar>(common: &Common, f: &StateVector<S>) -> anyhow::Result<bool> {
    let n = f.field().modulus() as usize;
    let t = wigner(f);
    let a = fourier_wigner(f);
    let tol = common.tolerance;
    let nn = S::from_int(n as i64);
    let pos = t.position_marginal();
    let pos_res = pos
        .iter()
        .zip(f.amplitudes())
        .map(|(m, x)| m.residual(&(nn.clone() * x.abs_sqr())))
        .fold(0.0, f64::max);
    let checks = vec![
        Check::new("wigner_reality", t.imag_residual(), tol),
        Check::new("position_marginal", pos_res, tol),
        Check::new("total_mass", t.total().residual(&(nn * f.norm_sqr())), tol),
        Check::new("momentum_marginal", momentum_marginal_residual(f), tol),
    ];
    let real = t.real_values();
    let rows = fourier_wigner_rows(&a);
    let report = WignerReport {
        n: n as u32,
        omega: f.omega().value(),
        backend: S::BACKEND,
        amplitudes: pairs(f.amplitudes()),
        table: real.chunks(n).map(<[f64]>::to_vec).collect(),
        position_marginal: pos.iter().map(|x| x.to_complex().re).collect(),
        momentum_marginal: t.momentum_marginal().iter().map(|x| x.to_complex().re).collect(),
        fourier_wigner: rows.chunks(n).map(|r| r.iter().map(|&(_, _, re, im)| [re, im]).collect()).collect(),
        passed: all_passed(&checks),
        checks,
    };
    common.emit("wigner.json", &report)?;
    if let Some(dir) = &common.out {
        let mut w = csv::Writer::from_path(dir.join("wigner.csv"))?;
        w.write_record(["r", "s", "value"])?;
        for (r, s, v) in wigner_rows(&t) {
            w.serialize((r, s, v))?;
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(dir.join("fourier_wigner.csv"))?;
        w.write_record(["q", "p", "re", "im"])?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    Ok(report.passed)
}

// evolve

#[derive(Serialize)]
struct EvolveReport {
    family: Family,
    n: u32,
    omega: u32,
    backend: Backend,
    steps: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mass: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generator: Option<OscillatorGenerator>,
    trajectory: Vec<EvolutionStep>,
    checks: Vec<Check>,
    passed: bool,
}

#[allow(clippy::too_many_arguments)]
fn cmd_evolve(
    common: &Common,
    family: Family,
    state_arg: &str,
    require_normalized: bool,
    delta: Option<i64>,
    mass: i64,
    steps: Option<u64>,
) -> Outcome {
    common.check_tolerance()?;
    let src = StateSource::parse(state_arg);
    let (field, omega) = resolve_field(common, &src)?;
    let n = field.modulus() as u64;
    let steps = steps.unwrap_or(match family {
        Family::Oscillator => n + 1,
        Family::Free => n - 1,
    });
    let params = EvolveParams {
        family,
        delta: delta.map(|d| field.elem(d)),
        mass: field.elem(mass),
        steps,
    };
    if matches!(family, Family::Free) && params.mass.is_zero() {
        return Err(Failure::Config(finqm::Error::ZeroMass.into()));
    }
    let passed = match common.backend {
        Backend::Float => evolve_run(common, &float_state(&src, omega, require_normalized)?, &params)?,
        Backend::Exact => evolve_run(common, &exact_state(&src, omega)?, &params)?,
    };
    if passed {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

struct EvolveParams {
    family: Family,
    delta: Option<Fe>,
    mass: Fe,
    steps: u64,
}

fn evolve_run<S: Scalar>(common: &Common, f: &StateVector<S>, p: &EvolveParams) -> anyhow::Result<bool> {
    let field = f.field();
    let range = EigenRange::Canonical;
    let tol = common.tolerance;
    let mut checks = Vec::new();
    let (generator, trajectory, mass) = match p.family {
        Family::Oscillator => {
            let gen = oscillator_generator(field, p.delta)?;
            let (_, traj) = evolve_oscillator(f, &gen, p.steps, range)?;
            checks.push(Check::flag("generator_order", gen.matrix().order() == gen.order));
            // return to the initial state at every multiple of the period
            let period = gen.order as usize;
            let back = traj
                .iter()
                .step_by(period)
                .map(|s| {
                    s.amplitudes
                        .iter()
                        .zip(f.amplitudes())
                        .map(|(a, b)| (Complex64::new(a[0], a[1]) - b.to_complex()).norm())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            checks.push(Check::new("period_return", back, tol));
            (Some(gen), traj, None)
        }
        Family::Free => {
            let (_, traj) = evolve_free(f, p.mass, p.steps, range)?;
            checks.push(Check::new(
                "free_semigroup",
                free_semigroup_residual::<S>(p.mass, f.omega())?,
                tol,
            ));
            (None, traj, Some(p.mass.value()))
        }
    };
    let report = EvolveReport {
        family: p.family,
        n: field.modulus(),
        omega: f.omega().value(),
        backend: S::BACKEND,
        steps: p.steps,
        mass,
        generator,
        passed: all_passed(&checks),
        checks,
        trajectory,
    };
    common.emit("evolve.json", &report)?;
    if let Some(dir) = &common.out {
        write_trajectory_csv(&dir.join("trajectory.csv"), &report.trajectory)?;
    }
    Ok(report.passed)
}

fn write_trajectory_csv(path: &Path, traj: &[EvolutionStep]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "n", "k_re", "k_im", "d_re", "d_im", "k2_re", "k2_im", "kd_re", "kd_im", "d2_re", "d2_im", "dm_re",
        "dm_im", "rho1_residual",
    ])?;
    for s in traj {
        let mut rec = vec![s.n.to_string()];
        for v in s.first_moments.iter().chain(&s.second_moments).chain(std::iter::once(&s.dm_invariant)) {
            rec.push(v[0].to_string());
            rec.push(v[1].to_string());
        }
        rec.push(s.rho1_residuals.iter().copied().fold(0.0, f64::max).to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

// oracle

fn cmd_oracle(common: &Common, samples: Option<usize>) -> Outcome {
    common.check_tolerance()?;
    let field = common.field(Some(3))?;
    let omega = common.omega(field)?;
    let samples = samples.unwrap_or(match common.backend {
        Backend::Float => 50,
        Backend::Exact => 10,
    });
    let report: OracleReport = match common.backend {
        Backend::Float => run_oracle::<Complex64>(omega, common.seed, samples)?,
        Backend::Exact => run_oracle::<Cyclotomic>(omega, common.seed, samples)?,
    };
    #[derive(Serialize)]
    struct Out<'a> {
        worst_residual: f64,
        passed: bool,
        #[serde(flatten)]
        report: &'a OracleReport,
    }
    let worst = report.worst();
    let passed = worst <= common.tolerance && report.rank_ok();
    common.emit(
        "oracle.json",
        &Out {
            worst_residual: worst,
            passed,
            report: &report,
        },
    )?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

// invariants

#[derive(Serialize)]
struct OrderCheck {
    order: u32,
    homomorphism_failures: usize,
    bform_failures: usize,
    pairs: usize,
}

#[derive(Serialize)]
struct InvariantStep {
    n: u64,
    dm2: [f64; 2],
    dm4: [f64; 2],
}

#[derive(Serialize)]
struct InvariantsReport {
    n: u32,
    omega: u32,
    backend: Backend,
    seed: u64,
    orders: Vec<OrderCheck>,
    generator: OscillatorGenerator,
    /// `b_h(r_h, r_h)` along the oscillator orbit of the state.
    oscillator_trajectory: Vec<InvariantStep>,
    /// `b_2(r_2, r_2)` of `W(t_u^b) f` for `b = 0..N-1`.
    chirp_drift: Vec<[f64; 2]>,
    /// Largest change of `<k^j>`, `j = 1..4`, under `W(t_u^b)`.
    position_moment_drift: f64,
    checks: Vec<Check>,
    passed: bool,
}

fn cmd_invariants(
    common: &Common,
    state_arg: &str,
    delta: Option<i64>,
    steps: Option<u64>,
    max_order: u32,
    samples: usize,
) -> Outcome {
    common.check_tolerance()?;
    if max_order > finqm::wigner::MAX_WEYL_ORDER {
        return Err(Failure::Config(
            finqm::Error::OrderTooLarge(max_order as usize, finqm::wigner::MAX_WEYL_ORDER as usize).into(),
        ));
    }
    let src = StateSource::parse(state_arg);
    let (field, omega) = resolve_field(common, &src)?;
    let delta = delta.map(|d| field.elem(d));
    let steps = steps.unwrap_or(field.modulus() as u64 + 1);
    let passed = match common.backend {
        Backend::Float => invariants_run(common, &float_state(&src, omega, false)?, delta, steps, max_order, samples)?,
        Backend::Exact => invariants_run(common, &exact_state(&src, omega)?, delta, steps, max_order, samples)?,
    };
    if passed {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn invariants_run<S: Scalar>(
    common: &Common,
    f: &StateVector<S>,
    delta: Option<Fe>,
    steps: u64,
    max_order: u32,
    samples: usize,
) -> anyhow::Result<bool> {
    let field = f.field();
    let range = EigenRange::Canonical;
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let mut orders = Vec::new();
    for h in 0..=max_order {
        let form = if h == 0 { None } else { Some(bform(h)?) };
        let (mut hom, mut inv) = (0, 0);
        for _ in 0..samples {
            let (g1, g2) = (Sl2::random(field, &mut rng), Sl2::random(field, &mut rng));
            if rho(h, &g1).mul(&rho(h, &g2)) != rho(h, &g1.mul(&g2)) {
                hom += 1;
            }
            if let Some(b) = &form {
                if !b.is_invariant(&rho(h, &g1)) {
                    inv += 1;
                }
            }
        }
        orders.push(OrderCheck {
            order: h,
            homomorphism_failures: hom,
            bform_failures: inv,
            pairs: samples,
        });
    }
    let gen = oscillator_generator(field, delta)?;
    let w = finqm::metaplectic::weil::<S>(&gen.matrix(), f.omega())?.matrix;
    let mut cur = f.clone();
    let mut traj = Vec::new();
    for n in 0..=steps {
        if n > 0 {
            cur = cur.apply(&w);
        }
        let c = |h| -> anyhow::Result<[f64; 2]> {
            let z = dm_invariant(&moments(&cur, h, range)?)?.to_complex();
            Ok([z.re, z.im])
        };
        traj.push(InvariantStep { n, dm2: c(2)?, dm4: c(4)? });
    }
    let mut drift: f64 = 0.0;
    for b in field.elements() {
        let g = f.apply(&finqm::metaplectic::weil::<S>(&Sl2::tu(b), f.omega())?.matrix);
        for j in 1..=4 {
            // <k^j> is the first component of r_j
            let (m0, m1) = (moments(f, j, range)?, moments(&g, j, range)?);
            drift = drift.max(m0.values[0].residual(&m1.values[0]));
        }
    }
    let checks = vec![
        Check::flag("rho_homomorphism", orders.iter().all(|o| o.homomorphism_failures == 0)),
        Check::flag("bform_invariance", orders.iter().all(|o| o.bform_failures == 0)),
        Check::flag("generator_order", gen.matrix().order() == gen.order),
        Check::new("position_moments_under_tu", drift, common.tolerance),
    ];
    let report = InvariantsReport {
        n: field.modulus(),
        omega: f.omega().value(),
        backend: S::BACKEND,
        seed: common.seed,
        orders,
        generator: gen,
        oscillator_trajectory: traj,
        chirp_drift: pairs(&dm_drift(f, 2, range)?),
        position_moment_drift: drift,
        passed: all_passed(&checks),
        checks,
    };
    common.emit("invariants.json", &report)?;
    Ok(report.passed)
}
