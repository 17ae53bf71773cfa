//! One-parameter evolutions: the free particle `t_d^{-t/m}` and the finite
//! harmonic oscillator generated by a norm-one element of `F_{N^2}`.

use serde::Serialize;

use crate::cyclic::EigenRange;
use crate::error::{Error, Result};
use crate::field::{Fe, PrimeField, QuadExt};
use crate::metaplectic::{weil, WeilOperator};
use crate::scalar::Scalar;
use crate::sl2::Sl2;
use crate::subspaces::{dm_invariant, predict_moments};
use crate::wigner::{moments, StateVector};

/// `U(t) = W(t_d^{-t/m})`.
pub fn free_particle<S: Scalar>(t: Fe, m: Fe, omega: Fe) -> Result<WeilOperator<S>> {
    if m.is_zero() {
        return Err(Error::ZeroMass);
    }
    let c = -(t * m.inv()?);
    weil(&Sl2::td(c), omega)
}

/// `t_r = [[a, b delta], [b, a]]` with `a^2 - delta b^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OscillatorGenerator {
    pub a: Fe,
    pub b: Fe,
    pub delta: Fe,
    pub order: u64,
}

impl OscillatorGenerator {
    pub fn field(&self) -> PrimeField {
        self.a.field()
    }

    pub fn matrix(&self) -> Sl2 {
        Sl2::new(self.a, self.b * self.delta, self.b, self.a).expect("norm one")
    }

    /// `a + b sqrt(delta)`.
    pub fn element(&self) -> QuadExt {
        QuadExt::new(self.a, self.b, self.delta).expect("delta checked")
    }

    /// `lambda_+ = a - b sqrt(delta)`, eigenvalue of `rho_1(t_r)` on `(1, sqrt(delta))`.
    pub fn lambda_plus(&self) -> QuadExt {
        self.element().conj()
    }
}

/// Lexicographically smallest `(a, b)`, `b != 0`, of norm one and order `N + 1`.
///
/// `delta` defaults to the smallest nonsquare.
pub fn oscillator_generator(field: PrimeField, delta: Option<Fe>) -> Result<OscillatorGenerator> {
    let delta = delta.unwrap_or_else(|| field.find_nonsquare());
    if delta.legendre() != -1 {
        return Err(Error::NotNonsquare(delta.value(), field.modulus()));
    }
    let want = field.modulus() as u64 + 1;
    let mut elems = QuadExt::norm_one_elements(delta)?;
    elems.sort_by_key(|x| (x.a.value(), x.b.value()));
    elems
        .into_iter()
        .find(|x| !x.b.is_zero() && x.order() == Some(want))
        .map(|x| OscillatorGenerator {
            a: x.a,
            b: x.b,
            delta,
            order: want,
        })
        .ok_or_else(|| Error::Invalid("norm-one group has no generator".into()))
}

/// `(c(n), s(n))` with `lambda_+^n = c(n) + s(n) sqrt(delta)`.
pub fn discrete_trig(gen: &OscillatorGenerator, n: i64) -> (Fe, Fe) {
    let p = gen.lambda_plus().pow(n);
    (p.a, p.b)
}

/// `rho_1(t_r^n) = [[c, s], [s delta, c]]`.
pub fn rho1_closed_form(gen: &OscillatorGenerator, n: i64) -> [[Fe; 2]; 2] {
    let (c, s) = discrete_trig(gen, n);
    [[c, s], [s * gen.delta, c]]
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionStep {
    pub n: u64,
    pub amplitudes: Vec<[f64; 2]>,
    /// `<k>, <D'>`.
    pub first_moments: Vec<[f64; 2]>,
    /// `<k^2>, <kD'>, <D'^2>`.
    pub second_moments: Vec<[f64; 2]>,
    pub dm_invariant: [f64; 2],
    /// `|rho_1(t_r^n) r_1(f) - r_1(W(t_r)^n f)|`, per component.
    pub rho1_residuals: Vec<f64>,
}

fn pair(z: num_complex::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Records the moment data of `f_n` against the initial state `f0`.
pub fn snapshot<S: Scalar>(
    n: u64,
    f0: &StateVector<S>,
    fn_: &StateVector<S>,
    g: &Sl2,
    range: EigenRange,
) -> Result<EvolutionStep> {
    let m2 = moments(fn_, 2, range)?;
    Ok(EvolutionStep {
        n,
        amplitudes: fn_.amplitudes().iter().map(|x| pair(x.to_complex())).collect(),
        first_moments: moments(fn_, 1, range)?.to_pairs(),
        second_moments: m2.to_pairs(),
        dm_invariant: pair(dm_invariant(&m2)?.to_complex()),
        rho1_residuals: {
            let p = predict_moments(1, g, f0, range)?;
            p.residuals
        },
    })
}

/// Applies `W(t_r)` `steps` times; returns the final state and one snapshot per step (including step 0).
pub fn evolve_oscillator<S: Scalar>(
    f: &StateVector<S>,
    gen: &OscillatorGenerator,
    steps: u64,
    range: EigenRange,
) -> Result<(StateVector<S>, Vec<EvolutionStep>)> {
    let w = weil::<S>(&gen.matrix(), f.omega())?.matrix;
    let mut cur = f.clone();
    let mut traj = vec![snapshot(0, f, &cur, &Sl2::identity(f.field()), range)?];
    for n in 1..=steps {
        cur = cur.apply(&w);
        traj.push(snapshot(n, f, &cur, &gen.matrix().pow(n as i64), range)?);
    }
    Ok((cur, traj))
}

/// Free-particle trajectory for `t = 0..steps` at mass `m`.
pub fn evolve_free<S: Scalar>(
    f: &StateVector<S>,
    m: Fe,
    steps: u64,
    range: EigenRange,
) -> Result<(StateVector<S>, Vec<EvolutionStep>)> {
    let field = f.field();
    let mut traj = Vec::new();
    let mut last = f.clone();
    for t in 0..=steps {
        let tt = field.elem(t as i64);
        let u = free_particle::<S>(tt, m, f.omega())?;
        last = f.apply(&u.matrix);
        traj.push(snapshot(t, f, &last, &u.source, range)?);
    }
    Ok((last, traj))
}

/// `max |U(t1) U(t2) - U(t1 + t2)|` over all `t1, t2`.
pub fn free_semigroup_residual<S: Scalar>(m: Fe, omega: Fe) -> Result<f64> {
    let field = omega.field();
    let us = field
        .elements()
        .map(|t| free_particle::<S>(t, m, omega).map(|u| u.matrix))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for t1 in field.elements() {
        for t2 in field.elements() {
            let lhs = us[t1.value() as usize].matmul(&us[t2.value() as usize]);
            worst = worst.max(lhs.max_residual(&us[(t1 + t2).value() as usize]));
        }
    }
    Ok(worst)
}
