//! Property suites behind the `verify` command.
//!
//! Every check carries a short descriptive tag, its worst residual and whether
//! it is asserted. Reported-only checks document known finite-`N` deviations.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cyclic::EigenRange;
use crate::dynamics::{discrete_trig, free_semigroup_residual, oscillator_generator};
use crate::error::{Error, Result};
use crate::field::{Fe, PrimeField};
use crate::heisenberg::HeisenbergElement;
use crate::matrix::Matrix;
use crate::metaplectic::{intertwine_check, parity_operator, weil, weil_generator, weil_td_composed, weil_td_direct};
use crate::scalar::{gauss_closed_form, gauss_sum, Backend, Cyclotomic, Scalar};
use crate::sl2::{Generator, Sl2};
use crate::subspaces::{bform, predict_moments, rho, MomentPrediction};
use crate::wigner::{
    covariance_check, expectation_char, heisenberg_covariance_check, momentum_marginal_residual,
    multiset_eq, weyl_residual_report, wigner, StateVector, WeylResidual,
};

#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub n: u32,
    pub omega: u32,
    pub backend: Backend,
    pub tolerance: f64,
    pub seed: u64,
    /// Random samples per randomized check; `None` picks 200 (float) or 12 (exact).
    pub samples: Option<usize>,
}

impl VerifyConfig {
    pub fn new(n: u32, omega: u32) -> Self {
        Self {
            n,
            omega,
            backend: Backend::Float,
            tolerance: 1e-9,
            seed: 0,
            samples: None,
        }
    }

    pub fn field(&self) -> Result<PrimeField> {
        PrimeField::new(self.n as u64)
    }

    pub fn omega_fe(&self) -> Result<Fe> {
        let f = self.field()?;
        let w = f.elem(self.omega as i64);
        if w.is_zero() {
            return Err(Error::ZeroOmega);
        }
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        self.omega_fe()?;
        if !(self.tolerance > 0.0) {
            return Err(Error::Invalid(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }

    fn samples(&self) -> usize {
        self.samples.unwrap_or(match self.backend {
            Backend::Float => 200,
            Backend::Exact => 12,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub tag: String,
    pub asserted: bool,
    pub residual: f64,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentPredictionRow {
    pub generator: String,
    #[serde(flatten)]
    pub prediction: MomentPrediction,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub checks: Vec<CheckResult>,
    pub weyl_report: Vec<WeylResidual>,
    pub moment_predictions: Vec<MomentPredictionRow>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Suite {
    tol: f64,
    checks: Vec<CheckResult>,
}

impl Suite {
    fn push(&mut self, name: &str, tag: &str, asserted: bool, residual: f64, samples: usize) {
        let passed = !asserted || residual <= self.tol;
        self.checks.push(CheckResult {
            name: name.into(),
            tag: tag.into(),
            asserted,
            residual,
            samples,
            passed,
        });
    }

    fn flag(&mut self, name: &str, tag: &str, ok: bool, samples: usize) {
        self.push(name, tag, true, if ok { 0.0 } else { 1.0 }, samples);
    }
}

/// Gaussian-integer amplitudes on the exact backend, dyadic rationals in `[-1, 1]` on floats.
fn random_state<S: Scalar, R: Rng>(omega: Fe, rng: &mut R) -> Result<StateVector<S>> {
    match S::BACKEND {
        Backend::Exact => StateVector::random_integer(omega, rng, 3),
        Backend::Float => {
            const D: i64 = 1 << 20;
            StateVector::from_fn(omega, |_| {
                S::from_ratio(rng.random_range(-D..=D), D) + S::i() * S::from_ratio(rng.random_range(-D..=D), D)
            })
        }
    }
}

fn generators(field: PrimeField, rng: &mut ChaCha8Rng) -> Vec<Generator> {
    let a = loop {
        let a = field.elem(rng.random_range(1..field.modulus() as i64));
        if !a.is_zero() {
            break a;
        }
    };
    let b = field.elem(rng.random_range(1..field.modulus() as i64));
    vec![Generator::J, Generator::Ts(a), Generator::Tu(b), Generator::Td(b)]
}

pub fn run_suite<S: Scalar>(config: &VerifyConfig) -> Result<VerifyReport> {
    config.validate()?;
    let field = config.field()?;
    let omega = config.omega_fe()?;
    let n = field.modulus() as usize;
    let samples = config.samples();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut suite = Suite {
        tol: config.tolerance,
        checks: Vec::new(),
    };
    let range = EigenRange::Canonical;

    // representation
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let (g1, g2) = (Sl2::random(field, &mut rng), Sl2::random(field, &mut rng));
        let lhs = weil::<S>(&g1, omega)?.matrix.matmul(&weil::<S>(&g2, omega)?.matrix);
        worst = worst.max(lhs.max_residual(&weil::<S>(&g1.mul(&g2), omega)?.matrix));
    }
    suite.push("weil_homomorphism", "W(g1) W(g2) = W(g1 g2)", true, worst, samples);

    let mut worst = 0.0f64;
    let mut toks = vec![Generator::J, Generator::JInv];
    for x in field.elements() {
        toks.extend([Generator::Tu(x), Generator::Td(x)]);
        if !x.is_zero() {
            toks.push(Generator::Ts(x));
        }
    }
    for t in &toks {
        worst = worst.max(weil_generator::<S>(*t, omega)?.unitarity_residual());
    }
    suite.push("weil_unitarity", "W^dagger W = 1 on generators", true, worst, toks.len());

    let mut worst = 0.0f64;
    for c in field.elements() {
        worst = worst.max(weil_td_direct::<S>(c, omega)?.max_residual(&weil_td_composed::<S>(c, omega)?));
    }
    suite.push("td_direct_vs_composed", "t_d^c = J t_u^-c t_s^-1 J", true, worst, n);

    let mut worst = 0.0f64;
    let mut count = 0;
    for g in generators(field, &mut rng) {
        let g = g.matrix(field)?;
        for _ in 0..samples.min(50) {
            let h = HeisenbergElement::random(field, &mut rng);
            worst = worst.max(intertwine_check::<S>(&g, &h, omega)?);
            count += 1;
        }
    }
    suite.push("intertwining", "W(g) U(h) W(g)^-1 = U(phi_g(h))", true, worst, count);

    let g1 = gauss_sum::<S>(field.one())?;
    // G(1)^2 = leg(-1) N decides the closed form up to sign; the sign is a float check
    let mut worst = (g1.clone() * g1.clone()).residual(&S::from_int(field.legendre(-1) as i64 * n as i64));
    if (g1.to_complex() - gauss_closed_form(field)).norm() > 1e-6 {
        worst = worst.max(1.0);
    }
    for c in field.nonzero() {
        let want = g1.clone() * S::from_int(c.legendre() as i64);
        worst = worst.max(gauss_sum::<S>(c)?.residual(&want));
    }
    suite.push("gauss_sums", "G(c) = leg(c) G(1)", true, worst, n - 1);

    let p = parity_operator::<S>(omega)?;
    let j2 = weil::<S>(&Sl2::j(field).pow(2), omega)?.matrix;
    let worst = p
        .max_residual(&j2.scale(&S::from_int(field.legendre(-1) as i64)))
        .max(p.matmul(&p).max_residual(&Matrix::identity(n)));
    suite.push("parity", "P = leg(-1) W(J^2), P^2 = 1", true, worst, 1);

    // phase space
    let wsamples = samples.min(100);
    let (mut imag, mut pos, mut mass, mut mom, mut heis, mut cov) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut perm_ok = true;
    for _ in 0..wsamples {
        let st = random_state::<S, _>(omega, &mut rng)?;
        let t = wigner(&st);
        imag = imag.max(t.imag_residual());
        let nn = S::from_int(n as i64);
        for (r, v) in t.position_marginal().iter().enumerate() {
            pos = pos.max(v.residual(&(nn.clone() * st.amplitudes()[r].abs_sqr())));
        }
        mass = mass.max(t.total().residual(&(nn * st.norm_sqr())));
        mom = mom.max(momentum_marginal_residual(&st));
        heis = heis.max(heisenberg_covariance_check(&HeisenbergElement::random(field, &mut rng), &st)?);
        let g = Sl2::random(field, &mut rng);
        cov = cov.max(covariance_check(&g, &st)?);
        if S::BACKEND == Backend::Exact {
            let moved = wigner(&st.apply(&weil::<S>(&g, omega)?.matrix));
            perm_ok &= multiset_eq(t.values(), moved.values());
        }
    }
    suite.push("wigner_reality", "Im W = 0", true, imag, wsamples);
    suite.push("position_marginal", "sum_s W(r,s) = N |f(r)|^2", true, pos, wsamples);
    suite.push("total_mass", "sum W = N ||f||^2", true, mass, wsamples);
    suite.push("momentum_marginal", "sum_r W(r,s) = N^2 |f~(2 w s)|^2", true, mom, wsamples);
    suite.push("heisenberg_covariance", "W_{U(h)f}(r+r0, s+s0) = W_f(r,s)", true, heis, wsamples);
    suite.push("sl2_covariance", "W_{W(g)f}(M_g (r,s)) = W_f(r,s), M_g = (g^-1)^T", true, cov, wsamples);
    if S::BACKEND == Backend::Exact {
        suite.flag("sl2_covariance_multiset", "W_{W(g)f} is a permutation of W_f", perm_ok, wsamples);
    }

    let csamples = samples.min(20);
    let mut worst = 0.0f64;
    for _ in 0..csamples {
        let st = random_state::<S, _>(omega, &mut rng)?;
        for q in field.elements() {
            for p in field.elements() {
                worst = worst.max(expectation_char(&st, q, p).residual);
            }
        }
    }
    suite.push("character_weyl_map", "<E_{q,p}> = (1/N) sum e(rq+sp) W", true, worst, csamples);

    let st = random_state::<S, _>(omega, &mut rng)?;
    let mut weyl_report = Vec::new();
    for total in 0..=4u32 {
        for m in (0..=total).rev() {
            weyl_report.push(weyl_residual_report(&st, m, total - m, range)?);
        }
    }
    let exact_rows = weyl_report
        .iter()
        .filter(|r| (r.m, r.n) == (0, 0) || (r.m, r.n) == (1, 0))
        .map(|r| r.residual)
        .fold(0.0, f64::max);
    suite.push("weyl_exact_rows", "Weyl map for 1 and k", true, exact_rows, 1);
    let other = weyl_report
        .iter()
        .filter(|r| r.n > 0)
        .map(|r| r.residual)
        .fold(0.0, f64::max);
    suite.push("weyl_mixed_rows", "Weyl map for r^m s^n, n >= 1 (finite-N deviation)", false, other, 1);

    // invariant subspaces
    let mut hom = true;
    let mut inv = true;
    for _ in 0..samples {
        let (g1, g2) = (Sl2::random(field, &mut rng), Sl2::random(field, &mut rng));
        for h in 0..=6 {
            hom &= rho(h, &g1).mul(&rho(h, &g2)).entries == rho(h, &g1.mul(&g2)).entries;
            if h >= 1 {
                inv &= bform(h)?.is_invariant(&rho(h, &g1));
            }
        }
    }
    suite.flag("rho_homomorphism", "rho_h(g1) rho_h(g2) = rho_h(g1 g2) over F_N, h <= 6", hom, samples);
    suite.flag("bform_invariance", "rho_h^T B_h rho_h = B_h over F_N, h <= 6", inv, samples);

    let mut moment_predictions = Vec::new();
    let b = field.elem(rng.random_range(1..n as i64));
    let probes = [
        ("identity".to_string(), Sl2::identity(field)),
        (format!("t_u^{b}"), Sl2::tu(b)),
        ("J".to_string(), Sl2::j(field)),
        ("random".to_string(), Sl2::random(field, &mut rng)),
    ];
    for h in 0..=4 {
        for (label, g) in &probes {
            moment_predictions.push(MomentPredictionRow {
                generator: label.clone(),
                prediction: predict_moments(h, g, &st, range)?,
            });
        }
    }
    let exact_pred = moment_predictions
        .iter()
        .filter(|r| r.prediction.order == 0 || r.generator == "identity")
        .map(|r| r.prediction.residual)
        .fold(0.0, f64::max);
    suite.push("moment_prediction_exact", "r_0 and identity predictions", true, exact_pred, 1);
    let pure_position = moment_predictions
        .iter()
        .filter(|r| r.generator.starts_with("t_u"))
        .map(|r| r.prediction.residuals[0])
        .fold(0.0, f64::max);
    suite.push("moment_prediction_tu_position", "<k^h> fixed by W(t_u^b)", true, pure_position, 5);
    let rest = moment_predictions
        .iter()
        .map(|r| r.prediction.residual)
        .fold(0.0, f64::max);
    suite.push("moment_prediction_all", "rho_h(g) r_h(f) vs r_h(W(g)f) (lift deviation)", false, rest, moment_predictions.len());

    // dynamics
    let gen = oscillator_generator(field, None)?;
    let wr = weil::<S>(&gen.matrix(), omega)?.matrix;
    let period = wr.pow(n as u64 + 1).max_residual(&Matrix::identity(n));
    suite.push("oscillator_period", "W(t_r)^(N+1) = 1", true, period, 1);
    suite.flag("oscillator_order", "ord t_r = N + 1", gen.matrix().order() == n as u64 + 1, 1);
    let trig_ok = (0..=(n as i64 + 1)).all(|k| {
        let (c, s) = discrete_trig(&gen, k);
        c * c - gen.delta * s * s == field.one()
    });
    suite.flag("discrete_trig", "c(n)^2 - delta s(n)^2 = 1", trig_ok, n + 2);
    let m = field.elem(rng.random_range(1..n as i64));
    suite.push("free_semigroup", "U(t1) U(t2) = U(t1 + t2)", true, free_semigroup_residual::<S>(m, omega)?, n * n);

    let passed = suite.checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        config: config.clone(),
        checks: suite.checks,
        weyl_report,
        moment_predictions,
        passed,
    })
}

/// Runs [`run_suite`] on the configured backend.
pub fn run_verify(config: &VerifyConfig) -> Result<VerifyReport> {
    match config.backend {
        Backend::Float => run_suite::<Complex64>(config),
        Backend::Exact => run_suite::<Cyclotomic>(config),
    }
}
