//! Wigner and Fourier-Wigner distributions on the phase space `F_N x F_N`.
//!
//! ```text
//! W(r, s) = sum_p f(r + p/4w)* f(r - p/4w) e(-p s)
//! A(q, p) = sum_k f(k)* e(q (k - p/4w)) f(k - p/2w) = (1/N) sum_{r,s} e(rq + sp) W(r, s)
//! ```
//!
//! All divisions by `2w` and `4w` are field inverses.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cyclic::{dft, scaled_derivative_matrix, CyclicFunction, EigenRange};
use crate::error::{Error, Result};
use crate::field::{Fe, PrimeField};
use crate::heisenberg::{schrodinger_matrix, HeisenbergElement};
use crate::matrix::Matrix;
use crate::metaplectic::weil;
use crate::scalar::{char_fe, Scalar};
use crate::sl2::Sl2;

/// Largest `m + n` accepted by [`weyl_ordered`].
pub const MAX_WEYL_ORDER: u32 = 8;

/// Amplitudes `f(k)` of `f = sum_k f(k) t_x^k I`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<S> {
    omega: Fe,
    amplitudes: Vec<S>,
}

impl<S: Scalar> StateVector<S> {
    pub fn new(omega: Fe, amplitudes: Vec<S>) -> Result<Self> {
        if omega.is_zero() {
            return Err(Error::ZeroOmega);
        }
        let n = omega.modulus() as usize;
        if amplitudes.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: amplitudes.len(),
            });
        }
        Ok(Self { omega, amplitudes })
    }

    /// Like [`StateVector::new`] but rejects states with `|sum |f|^2 - 1| > 1e-12`.
    pub fn new_normalized(omega: Fe, amplitudes: Vec<S>) -> Result<Self> {
        let s = Self::new(omega, amplitudes)?;
        let err = (s.norm_sqr().to_complex() - 1.0).norm();
        if err > 1e-12 {
            return Err(Error::Invalid(format!("state is not normalized (|norm^2 - 1| = {err:e})")));
        }
        Ok(s)
    }

    pub fn from_fn(omega: Fe, f: impl FnMut(Fe) -> S) -> Result<Self> {
        Self::new(omega, omega.field().elements().map(f).collect())
    }

    /// `delta_{k0}`.
    pub fn delta(omega: Fe, k0: Fe) -> Result<Self> {
        Self::from_fn(omega, |k| if k == k0 { S::one() } else { S::zero() })
    }

    /// All amplitudes one (not normalized).
    pub fn uniform(omega: Fe) -> Result<Self> {
        Self::from_fn(omega, |_| S::one())
    }

    /// The character `e(-mk)` (not normalized).
    pub fn character(omega: Fe, m: Fe) -> Result<Self> {
        Self::from_fn(omega, |k| char_fe(-(m * k)))
    }

    /// `e(b w k^2)` (not normalized).
    pub fn chirp(omega: Fe, b: Fe) -> Result<Self> {
        Self::from_fn(omega, |k| char_fe(b * omega * k * k))
    }

    /// Small Gaussian-integer amplitudes; works on every backend.
    pub fn random_integer<R: Rng + ?Sized>(omega: Fe, rng: &mut R, bound: i64) -> Result<Self> {
        loop {
            let s = Self::from_fn(omega, |_| {
                S::from_gaussian(rng.random_range(-bound..=bound), rng.random_range(-bound..=bound))
            })?;
            if !s.norm_sqr().is_negligible() {
                return Ok(s);
            }
        }
    }

    pub fn omega(&self) -> Fe {
        self.omega
    }

    pub fn field(&self) -> PrimeField {
        self.omega.field()
    }

    pub fn amplitudes(&self) -> &[S] {
        &self.amplitudes
    }

    pub fn at(&self, k: Fe) -> &S {
        &self.amplitudes[k.value() as usize]
    }

    pub fn norm_sqr(&self) -> S {
        self.amplitudes
            .iter()
            .fold(S::zero(), |acc, x| acc + x.abs_sqr())
    }

    pub fn apply(&self, m: &Matrix<S>) -> Self {
        Self {
            omega: self.omega,
            amplitudes: m.apply(&self.amplitudes),
        }
    }

    pub fn to_cyclic(&self) -> CyclicFunction<S> {
        CyclicFunction::new(self.field(), self.amplitudes.clone()).expect("length checked")
    }

    /// `<f, A f> = sum_k f(k)* (A f)(k)`.
    pub fn expectation(&self, a: &Matrix<S>) -> S {
        let af = a.apply(&self.amplitudes);
        self.amplitudes
            .iter()
            .zip(&af)
            .fold(S::zero(), |acc, (x, y)| acc + x.conj().mul_ref(y))
    }

    pub fn max_residual(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.residual(b))
            .fold(0.0, f64::max)
    }

    pub fn to_complex(&self) -> StateVector<Complex64> {
        StateVector {
            omega: self.omega,
            amplitudes: self.amplitudes.iter().map(Scalar::to_complex).collect(),
        }
    }
}

impl StateVector<Complex64> {
    pub fn random<R: Rng + ?Sized>(omega: Fe, rng: &mut R) -> Result<Self> {
        let s = Self::from_fn(omega, |_| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })?;
        s.normalized()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().re.sqrt();
        if n == 0.0 {
            return Err(Error::Invalid("zero state cannot be normalized".into()));
        }
        Ok(Self {
            omega: self.omega,
            amplitudes: self.amplitudes.iter().map(|x| x / n).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// As defined above; sums to `N ||f||^2`.
    #[default]
    Raw,
    /// Scaled to sum to one.
    UnitSum,
}

/// `N x N` table indexed by `(r, s)`, row-major in `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerTable<S> {
    pub n: u32,
    pub normalization: Normalization,
    values: Vec<S>,
}

impl<S: Scalar> WignerTable<S> {
    pub fn get(&self, r: Fe, s: Fe) -> &S {
        &self.values[(r.value() * self.n + s.value()) as usize]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn total(&self) -> S {
        self.values.iter().fold(S::zero(), |acc, x| acc + x.clone())
    }

    /// `sum_s W(r, s)`.
    pub fn position_marginal(&self) -> Vec<S> {
        self.values
            .chunks(self.n as usize)
            .map(|row| row.iter().fold(S::zero(), |acc, x| acc + x.clone()))
            .collect()
    }

    /// `sum_r W(r, s)`.
    pub fn momentum_marginal(&self) -> Vec<S> {
        let n = self.n as usize;
        (0..n)
            .map(|s| (0..n).fold(S::zero(), |acc, r| acc + self.values[r * n + s].clone()))
            .collect()
    }

    /// Largest imaginary part.
    pub fn imag_residual(&self) -> f64 {
        self.values.iter().map(Scalar::imag_residual).fold(0.0, f64::max)
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|x| x.to_complex().re).collect()
    }

    pub fn to_unit_sum(&self) -> Result<Self> {
        let inv = self.total().inv().ok_or(Error::ZeroMass)?;
        Ok(Self {
            n: self.n,
            normalization: Normalization::UnitSum,
            values: self.values.iter().map(|x| x.mul_ref(&inv)).collect(),
        })
    }

    pub fn max_residual(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.residual(b))
            .fold(0.0, f64::max)
    }

    /// `(1/N) sum_{r,s} sigma(r, s) W(r, s)`: the test function evaluated over `W`.
    pub fn pair(&self, sigma: impl Fn(Fe, Fe) -> S) -> S {
        let f = PrimeField::new(self.n as u64).expect("table modulus is prime");
        let mut acc = S::zero();
        for r in f.elements() {
            for s in f.elements() {
                acc.add_assign_ref(&sigma(r, s).mul_ref(self.get(r, s)));
            }
        }
        acc * S::from_ratio(1, self.n as i64)
    }
}

pub fn wigner<S: Scalar>(f: &StateVector<S>) -> WignerTable<S> {
    let field = f.field();
    let q = (f.omega * 4i64).inv().expect("omega nonzero");
    let mut values = Vec::with_capacity(field.modulus().pow(2) as usize);
    for r in field.elements() {
        for s in field.elements() {
            let mut acc = S::zero();
            for p in field.elements() {
                let u = f.at(r + p * q).conj();
                acc.add_assign_ref(&(u * f.at(r - p * q).clone() * char_fe(-(p * s))));
            }
            values.push(acc);
        }
    }
    WignerTable {
        n: field.modulus(),
        normalization: Normalization::Raw,
        values,
    }
}

/// `N x N` table of `A(q, p)`, row-major in `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierWignerTable<S> {
    pub n: u32,
    values: Vec<S>,
}

impl<S: Scalar> FourierWignerTable<S> {
    pub fn get(&self, q: Fe, p: Fe) -> &S {
        &self.values[(q.value() * self.n + p.value()) as usize]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }
}

pub fn fourier_wigner<S: Scalar>(f: &StateVector<S>) -> FourierWignerTable<S> {
    let field = f.field();
    let values = field
        .elements()
        .flat_map(|q| field.elements().map(move |p| (q, p)))
        .map(|(q, p)| displacement_expectation(f, q, p))
        .collect();
    FourierWignerTable {
        n: field.modulus(),
        values,
    }
}

fn displacement_expectation<S: Scalar>(f: &StateVector<S>, q: Fe, p: Fe) -> S {
    f.expectation(&displacement_matrix(f.omega, q, p))
}

/// `E_{q,p} = exp(2 pi i (q K + p D') / N)`, realized as `f(k) -> e(q (k - p/4w)) f(k - p/2w)`.
pub fn displacement_matrix<S: Scalar>(omega: Fe, q: Fe, p: Fe) -> Matrix<S> {
    let field = omega.field();
    let n = field.modulus() as usize;
    let two_w = (omega * 2i64).inv().expect("omega nonzero");
    let four_w = (omega * 4i64).inv().expect("omega nonzero");
    let mut m = Matrix::zeros(n, n);
    for k in field.elements() {
        let src = k - p * two_w;
        m[(k.value() as usize, src.value() as usize)] = char_fe(q * (k - p * four_w));
    }
    m
}

/// Both sides of the character Weyl correspondence.
#[derive(Debug, Clone, Serialize)]
pub struct CharExpectation {
    pub q: u32,
    pub p: u32,
    pub operator_side: [f64; 2],
    pub wigner_side: [f64; 2],
    pub residual: f64,
}

pub fn expectation_char<S: Scalar>(f: &StateVector<S>, q: Fe, p: Fe) -> CharExpectation {
    let op = displacement_expectation(f, q, p);
    let ws = wigner(f).pair(|r, s| char_fe(r * q + s * p));
    let c = |z: Complex64| [z.re, z.im];
    CharExpectation {
        q: q.value(),
        p: p.value(),
        operator_side: c(op.to_complex()),
        wigner_side: c(ws.to_complex()),
        residual: op.residual(&ws),
    }
}

/// `(m! n! / (m+n)!) sum_{interleavings} ...` of `m` factors `K` and `n` factors `D'`.
pub fn weyl_ordered<S: Scalar>(m: u32, n: u32, omega: Fe, range: EigenRange) -> Result<Matrix<S>> {
    if m + n > MAX_WEYL_ORDER {
        return Err(Error::OrderTooLarge((m + n) as usize, MAX_WEYL_ORDER as usize));
    }
    if omega.is_zero() {
        return Err(Error::ZeroOmega);
    }
    let field = omega.field();
    let dim = field.modulus() as usize;
    let k = Matrix::diagonal(field.elements().map(|k| S::from_int(range.lift(k))).collect());
    let d = scaled_derivative_matrix::<S>(field, omega, range);
    let len = m + n;
    let mut total = Matrix::zeros(dim, dim);
    let mut count = 0i64;
    for mask in 0u32..(1 << len) {
        if mask.count_ones() != m {
            continue;
        }
        let word = (0..len).fold(Matrix::identity(dim), |acc, i| {
            acc.matmul(if mask >> i & 1 == 1 { &k } else { &d })
        });
        total = total.add(&word);
        count += 1;
    }
    Ok(total.scale(&S::from_ratio(1, count)))
}

#[derive(Debug, Clone, Serialize)]
pub struct WeylResidual {
    pub m: u32,
    pub n: u32,
    pub operator_side: [f64; 2],
    pub wigner_side: [f64; 2],
    pub residual: f64,
}

/// `<f, weyl_ordered(m, n) f>` against `(1/N) sum r^m s^n W(r, s)`.
pub fn weyl_residual_report<S: Scalar>(f: &StateVector<S>, m: u32, n: u32, range: EigenRange) -> Result<WeylResidual> {
    let op = f.expectation(&weyl_ordered(m, n, f.omega, range)?);
    let pw = |x: Fe, e: u32| S::from_int(range.lift(x).pow(e));
    let ws = wigner(f).pair(|r, s| pw(r, m) * pw(s, n));
    let c = |z: Complex64| [z.re, z.im];
    Ok(WeylResidual {
        m,
        n,
        operator_side: c(op.to_complex()),
        wigner_side: c(ws.to_complex()),
        residual: op.residual(&ws),
    })
}

/// Moments `<k^j D'^{h-j}>` for `j = h, h-1, ..., 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector<S> {
    pub order: u32,
    pub values: Vec<S>,
}

impl<S: Scalar> MomentVector<S> {
    pub fn max_residual(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.residual(b))
            .fold(0.0, f64::max)
    }

    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.values
            .iter()
            .map(|x| {
                let z = x.to_complex();
                [z.re, z.im]
            })
            .collect()
    }
}

pub fn moments<S: Scalar>(f: &StateVector<S>, h: u32, range: EigenRange) -> Result<MomentVector<S>> {
    let values = (0..=h)
        .rev()
        .map(|j| Ok(f.expectation(&weyl_ordered(j, h - j, f.omega, range)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentVector { order: h, values })
}

/// The 2x2 matrix `M_{g (x) g} = (g^-1)^T` moving phase-space points.
pub fn phase_space_matrix(g: &Sl2) -> Sl2 {
    g.inverse().transpose()
}

/// `max |W_{W(g) f}(M (r, s)) - W_f(r, s)|` with `M` from [`phase_space_matrix`].
pub fn covariance_check<S: Scalar>(g: &Sl2, f: &StateVector<S>) -> Result<f64> {
    let gf = f.apply(&weil::<S>(g, f.omega)?.matrix);
    let (w0, w1) = (wigner(f), wigner(&gf));
    let m = phase_space_matrix(g);
    let field = f.field();
    let mut worst = 0.0f64;
    for r in field.elements() {
        for s in field.elements() {
            let (r2, s2) = (m.a() * r + m.b() * s, m.c() * r + m.d() * s);
            worst = worst.max(w1.get(r2, s2).residual(w0.get(r, s)));
        }
    }
    Ok(worst)
}

/// `max |W_{U(h) f}(r + r0, s + s0) - W_f(r, s)|` for `h = t_x^r0 t_y^s0 t_z^t0`.
pub fn heisenberg_covariance_check<S: Scalar>(h: &HeisenbergElement, f: &StateVector<S>) -> Result<f64> {
    let hf = f.apply(&schrodinger_matrix::<S>(h, f.omega)?);
    let (w0, w1) = (wigner(f), wigner(&hf));
    let (r0, s0, _) = h.rst();
    let field = f.field();
    let mut worst = 0.0f64;
    for r in field.elements() {
        for s in field.elements() {
            worst = worst.max(w1.get(r + r0, s + s0).residual(w0.get(r, s)));
        }
    }
    Ok(worst)
}

/// `max_s |sum_r W(r, s) - N^2 |f~(2 w s)|^2|`.
pub fn momentum_marginal_residual<S: Scalar>(f: &StateVector<S>) -> f64 {
    let field = f.field();
    let ft = dft(&f.to_cyclic());
    let nn = S::from_int((field.modulus() as i64).pow(2));
    let marg = wigner(f).momentum_marginal();
    field
        .elements()
        .map(|s| {
            let want = nn.mul_ref(&ft.at(f.omega * 2i64 * s).abs_sqr());
            marg[s.value() as usize].residual(&want)
        })
        .fold(0.0, f64::max)
}

/// True when `a` is a rearrangement of `b` under exact equality.
pub fn multiset_eq<S: PartialEq>(a: &[S], b: &[S]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.iter().all(|x| {
        match b.iter().enumerate().position(|(i, y)| !used[i] && y == x) {
            Some(i) => {
                used[i] = true;
                true
            }
            None => false,
        }
    })
}

/// Sorted-value distance, for float tables.
pub fn sorted_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
