//! Fourier calculus on the cyclic group F_N.
//!
//! Conventions: `f~(m) = (1/N) sum_k f(k) e(mk)` and `f(k) = sum_m f~(m) e(-mk)`
//! with `e(x) = exp(2 pi i x / N)`. The characters `g^_m(k) = e(-mk)` are the
//! eigenvectors of translation and of the spectral derivative `D`, which acts
//! on `g^_m` by `-2 pi i m / N`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, PrimeField};
use crate::matrix::Matrix;
use crate::scalar::{char_fe, Scalar};

/// A function `F_N -> C`, indexed by canonical residues.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicFunction<S> {
    field: PrimeField,
    values: Vec<S>,
}

/// Integer representative used for the frequency `m` in spectral operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenRange {
    /// `m` in `[0, N)`.
    #[default]
    Canonical,
    /// `m` in `[-(N-1)/2, (N-1)/2]`.
    Symmetric,
}

impl EigenRange {
    pub fn lift(self, m: Fe) -> i64 {
        match self {
            EigenRange::Canonical => m.to_i64(),
            EigenRange::Symmetric => m.symmetric_lift(),
        }
    }
}

impl<S: Scalar> CyclicFunction<S> {
    pub fn new(field: PrimeField, values: Vec<S>) -> Result<Self> {
        let n = field.modulus() as usize;
        if values.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: values.len(),
            });
        }
        Ok(Self { field, values })
    }

    pub fn from_fn(field: PrimeField, f: impl FnMut(Fe) -> S) -> Self {
        Self {
            field,
            values: field.elements().map(f).collect(),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn at(&self, k: Fe) -> &S {
        &self.values[k.value() as usize]
    }

    /// Direct index shift `k -> f(k + l)`.
    pub fn shift(&self, l: Fe) -> Self {
        Self::from_fn(self.field, |k| self.at(k + l).clone())
    }

    pub fn max_residual(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.residual(b))
            .fold(0.0, f64::max)
    }

    pub fn norm_sqr(&self) -> S {
        self.values
            .iter()
            .fold(S::zero(), |acc, x| acc + x.abs_sqr())
    }
}

/// Forward transform `f~(m) = (1/N) sum_k f(k) e(mk)`.
pub fn dft<S: Scalar>(f: &CyclicFunction<S>) -> CyclicFunction<S> {
    let field = f.field;
    let inv_n = S::from_ratio(1, field.modulus() as i64);
    CyclicFunction::from_fn(field, |m| {
        let s = field.elements().fold(S::zero(), |acc, k| {
            acc + char_fe::<S>(m * k).mul_ref(f.at(k))
        });
        s * inv_n.clone()
    })
}

/// Inverse transform `f(k) = sum_m f~(m) e(-mk)`.
pub fn idft<S: Scalar>(ft: &CyclicFunction<S>) -> CyclicFunction<S> {
    let field = ft.field;
    CyclicFunction::from_fn(field, |k| {
        field.elements().fold(S::zero(), |acc, m| {
            acc + char_fe::<S>(-(m * k)).mul_ref(ft.at(m))
        })
    })
}

/// Character `g^_m(k) = e(-mk)`.
pub fn ghat<S: Scalar>(m: Fe) -> CyclicFunction<S> {
    CyclicFunction::from_fn(m.field(), |k| char_fe(-(m * k)))
}

/// Group-ring product `(f * g)(k) = sum_j f(j) g(k - j)`.
pub fn convolve<S: Scalar>(f: &CyclicFunction<S>, g: &CyclicFunction<S>) -> CyclicFunction<S> {
    let field = f.field;
    CyclicFunction::from_fn(field, |k| {
        field
            .elements()
            .fold(S::zero(), |acc, j| acc + f.at(j).mul_ref(g.at(k - j)))
    })
}

/// Applies a Fourier multiplier: `sum_m mult(m) f~(m) e(-mk)`.
pub fn spectral<S: Scalar>(f: &CyclicFunction<S>, mult: impl Fn(Fe) -> S) -> CyclicFunction<S> {
    let ft = dft(f);
    let scaled = CyclicFunction::from_fn(f.field, |m| mult(m).mul_ref(ft.at(m)));
    idft(&scaled)
}

/// `D^n f` with `D g^_m = (-2 pi i m / N) g^_m`. `n = 0` is the identity.
pub fn derivative(
    f: &CyclicFunction<Complex64>,
    n: u32,
    range: EigenRange,
) -> CyclicFunction<Complex64> {
    if n == 0 {
        return f.clone();
    }
    let nn = f.field.modulus() as f64;
    spectral(f, |m| {
        let lam = Complex64::new(0.0, -2.0 * PI * range.lift(m) as f64 / nn);
        lam.powu(n)
    })
}

/// Matrix of `D` (float only: the eigenvalues carry a factor of pi).
pub fn derivative_matrix(field: PrimeField, range: EigenRange) -> Matrix<Complex64> {
    operator_matrix(field, |f| derivative(f, 1, range))
}

/// Scaled derivative `D' = (-1/(2 omega)) (N / (2 pi i)) D`, eigenvalue `m / (2 omega)` on `g^_m`.
///
/// `m` and `omega` enter through integer representatives, so the operator is
/// rational in the character basis and exists on every backend.
pub fn scaled_derivative<S: Scalar>(
    f: &CyclicFunction<S>,
    omega: Fe,
    range: EigenRange,
) -> CyclicFunction<S> {
    let w = range.lift(omega);
    spectral(f, |m| S::from_ratio(range.lift(m), 2 * w))
}

pub fn scaled_derivative_matrix<S: Scalar>(
    field: PrimeField,
    omega: Fe,
    range: EigenRange,
) -> Matrix<S> {
    operator_matrix(field, |f| scaled_derivative(f, omega, range))
}

/// Position operator `K = diag(0, 1, ..., N-1)`.
pub fn position_matrix<S: Scalar>(field: PrimeField) -> Matrix<S> {
    Matrix::diagonal(field.elements().map(|k| S::from_int(k.to_i64())).collect())
}

/// Spectral translation `exp(l D) f`; each character picks up `e(-ml)`.
pub fn translate<S: Scalar>(f: &CyclicFunction<S>, l: Fe) -> CyclicFunction<S> {
    spectral(f, |m| char_fe(-(m * l)))
}

/// Columns are the images of the delta functions.
pub fn operator_matrix<S: Scalar>(
    field: PrimeField,
    op: impl Fn(&CyclicFunction<S>) -> CyclicFunction<S>,
) -> Matrix<S> {
    let n = field.modulus() as usize;
    let mut m = Matrix::zeros(n, n);
    for j in field.elements() {
        let delta = CyclicFunction::from_fn(field, |k| if k == j { S::one() } else { S::zero() });
        let col = op(&delta);
        for (i, v) in col.values.into_iter().enumerate() {
            m[(i, j.value() as usize)] = v;
        }
    }
    m
}

/// How far the continuum rules for `d/dk` are from holding for the spectral `D`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormalClaimsReport {
    pub n: u32,
    pub range: EigenRange,
    /// `(power, max_k |D k^power - power k^(power-1)|)`.
    pub monomial_rule: Vec<(u32, f64)>,
    /// `max_k |D(xy) - (Dx)y - x(Dy)|` on the supplied pair.
    pub leibniz: f64,
    /// `max |[D, K] - 1|` entrywise.
    pub commutator: f64,
    /// `tr [D, K]`; always zero in finite dimension.
    pub commutator_trace: f64,
    /// `(order, |sum (D^n x) y - (-1)^n sum x (D^n y)|)` on the supplied pair.
    pub integration_by_parts: Vec<(u32, f64)>,
}

/// `|sum_k (D^n x)(k) y(k) - (-1)^n sum_k x(k) (D^n y)(k)|`.
///
/// Zero for the symmetric eigenvalue range. The canonical range breaks the
/// `m -> -m` antisymmetry of the eigenvalues, so only `n = 0` survives there.
pub fn integration_by_parts_residual(
    x: &CyclicFunction<Complex64>,
    y: &CyclicFunction<Complex64>,
    n: u32,
    range: EigenRange,
) -> f64 {
    let pair = |a: &CyclicFunction<Complex64>, b: &CyclicFunction<Complex64>| -> Complex64 {
        a.values().iter().zip(b.values()).map(|(u, v)| u * v).sum()
    };
    let lhs = pair(&derivative(x, n, range), y);
    let rhs = pair(x, &derivative(y, n, range));
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    (lhs - rhs * sign).norm()
}

pub fn formal_claims_report(
    field: PrimeField,
    range: EigenRange,
    x: &CyclicFunction<Complex64>,
    y: &CyclicFunction<Complex64>,
    max_power: u32,
) -> FormalClaimsReport {
    let ints = |p: u32| {
        CyclicFunction::from_fn(field, |k| {
            Complex64::new((k.to_i64() as f64).powi(p as i32), 0.0)
        })
    };
    let monomial_rule = (1..=max_power)
        .map(|p| {
            let lhs = derivative(&ints(p), 1, range);
            let rhs = CyclicFunction::from_fn(field, |k| {
                Complex64::new(p as f64 * (k.to_i64() as f64).powi(p as i32 - 1), 0.0)
            });
            (p, lhs.max_residual(&rhs))
        })
        .collect();

    let xy = CyclicFunction::from_fn(field, |k| x.at(k) * y.at(k));
    let (dx, dy) = (derivative(x, 1, range), derivative(y, 1, range));
    let rule = CyclicFunction::from_fn(field, |k| dx.at(k) * y.at(k) + x.at(k) * dy.at(k));
    let leibniz = derivative(&xy, 1, range).max_residual(&rule);

    let d = derivative_matrix(field, range);
    let k = position_matrix::<Complex64>(field);
    let comm = d.matmul(&k).sub(&k.matmul(&d));
    let n = field.modulus() as usize;
    let trace: Complex64 = (0..n).map(|i| comm[(i, i)]).sum();
    FormalClaimsReport {
        n: field.modulus(),
        range,
        monomial_rule,
        leibniz,
        commutator: comm.max_residual(&Matrix::identity(n)),
        commutator_trace: trace.norm(),
        integration_by_parts: (1..=max_power)
            .map(|p| (p, integration_by_parts_residual(x, y, p, range)))
            .collect(),
    }
}
