//! Complex scalars behind one abstraction with two backends.
//!
//! [`Complex64`] is the default floating-point backend. [`Cyclotomic`] holds
//! exact elements of a cyclotomic field with arbitrary-precision rational
//! coefficients; every constant the representations need (roots of unity,
//! `i`, Gauss sums, `1/N`) lives there, so identities can be checked with
//! zero residual.

mod cyclotomic;

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use cyclotomic::Cyclotomic;

use crate::error::{Error, Result};
use crate::field::{Fe, PrimeField};

/// Which scalar backend a computation runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Float,
    Exact,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Float => f.write_str("float"),
            Backend::Exact => f.write_str("exact"),
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" => Ok(Backend::Float),
            "exact" => Ok(Backend::Exact),
            other => Err(Error::Invalid(format!("unknown backend `{other}`"))),
        }
    }
}

pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const BACKEND: Backend;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// `exp(2 pi i j / m)`.
    fn root_of_unity(j: i64, m: u64) -> Self;
    fn conj(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn to_complex(&self) -> Complex64;
    /// Exactly zero for the exact backend; below `1e-13` in modulus for floats.
    fn is_negligible(&self) -> bool;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    fn i() -> Self {
        Self::root_of_unity(1, 4)
    }

    fn from_gaussian(re: i64, im: i64) -> Self {
        Self::from_int(re) + Self::i() * Self::from_int(im)
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self = self.clone() + rhs.clone();
    }

    fn abs_sqr(&self) -> Self {
        self.conj().mul_ref(self)
    }

    /// `|self - other|`, reported as exactly `0.0` when the backend can decide equality.
    fn residual(&self, other: &Self) -> f64 {
        let d = self.clone() - other.clone();
        if d.is_negligible() && Self::BACKEND == Backend::Exact {
            0.0
        } else {
            d.to_complex().norm()
        }
    }

    /// Modulus of the imaginary part; exact backends test `self == conj(self)`.
    fn imag_residual(&self) -> f64 {
        match Self::BACKEND {
            Backend::Exact if self.conj() == *self => 0.0,
            _ => self.to_complex().im.abs(),
        }
    }
}

impl Scalar for Complex64 {
    const BACKEND: Backend = Backend::Float;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn root_of_unity(j: i64, m: u64) -> Self {
        assert!(m >= 1, "root of unity of order 0");
        let m_i = m as i64;
        let j = j.rem_euclid(m_i);
        // quarter turns are returned exactly
        if (4 * j) % m_i == 0 {
            return match 4 * j / m_i {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
        }
        let theta = 2.0 * PI * j as f64 / m as f64;
        Complex64::new(theta.cos(), theta.sin())
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn inv(&self) -> Option<Self> {
        if *self == Complex64::new(0.0, 0.0) {
            None
        } else {
            Some(Complex64::new(1.0, 0.0) / self)
        }
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn is_negligible(&self) -> bool {
        self.norm() < 1e-13
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
}

/// `exp(2 pi i j / m)` on the chosen backend.
pub fn zeta<S: Scalar>(j: i64, m: u64) -> S {
    S::root_of_unity(j, m)
}

/// `e(x) = exp(2 pi i x / N)` for a field element `x`.
pub fn char_fe<S: Scalar>(x: Fe) -> S {
    S::root_of_unity(x.to_i64(), x.modulus() as u64)
}

/// Quadratic Gauss sum `sum_h exp(2 pi i c h^2 / N)`.
pub fn gauss_sum<S: Scalar>(c: Fe) -> Result<S> {
    if c.is_zero() {
        return Err(Error::DegenerateGaussSum);
    }
    let f = c.field();
    Ok(f.elements()
        .fold(S::zero(), |acc, h| acc + char_fe(c * h * h)))
}

/// `G(1, N)`: `sqrt(N)` for `N = 1 mod 4`, `i sqrt(N)` for `N = 3 mod 4`.
pub fn gauss_closed_form(field: PrimeField) -> Complex64 {
    let n = field.modulus();
    let r = (n as f64).sqrt();
    if n % 4 == 1 {
        Complex64::new(r, 0.0)
    } else {
        Complex64::new(0.0, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fl(n: u64) -> PrimeField {
        PrimeField::new(n).unwrap()
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta::<Complex64>(0, 7), Complex64::new(1.0, 0.0));
        assert_eq!(zeta::<Complex64>(2, 4), Complex64::new(-1.0, 0.0));
        assert_eq!(zeta::<Cyclotomic>(2, 4), Cyclotomic::from_int(-1));
        assert_eq!(zeta::<Cyclotomic>(9, 7), zeta::<Cyclotomic>(2, 7));
        for n in [3u64, 5, 7, 11] {
            let s: Complex64 = (0..n as i64).map(|j| zeta::<Complex64>(j, n)).sum();
            assert!(s.norm() < 1e-12);
            let e = (0..n as i64).fold(Cyclotomic::zero(), |a, j| a + zeta(j, n));
            assert!(e.is_negligible());
        }
    }

    #[test]
    fn zeta_has_unit_modulus() {
        for m in 1..40u64 {
            for j in -3..(m as i64 + 3) {
                assert!((zeta::<Complex64>(j, m).norm() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gauss_sum_examples() {
        let g5: Complex64 = gauss_sum(fl(5).one()).unwrap();
        assert!((g5 - Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-12);
        let g3: Complex64 = gauss_sum(fl(3).one()).unwrap();
        assert!((g3 - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-12);
        let g52: Complex64 = gauss_sum(fl(5).elem(2)).unwrap();
        assert!((g52 + Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-12);
        assert_eq!(
            gauss_sum::<Complex64>(fl(5).zero()),
            Err(Error::DegenerateGaussSum)
        );
    }

    #[test]
    fn gauss_sum_character_relation_float() {
        for n in (3..=97u64).filter(|&n| PrimeField::new(n).is_ok()) {
            let f = fl(n);
            let g1 = gauss_closed_form(f);
            for c in f.nonzero() {
                let g: Complex64 = gauss_sum(c).unwrap();
                let want = g1 * c.legendre() as f64;
                assert!((g - want).norm() < 1e-10, "N = {n}, c = {c}");
            }
            assert!((g1.norm_sqr() - n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn gauss_sum_character_relation_exact() {
        for n in [3u64, 5, 7, 11, 13] {
            let f = fl(n);
            let g1: Cyclotomic = gauss_sum(f.one()).unwrap();
            // |G|^2 = N and G^2 = legendre(-1) N, exactly
            assert_eq!(g1.abs_sqr(), Cyclotomic::from_int(n as i64));
            assert_eq!(
                g1.clone() * g1.clone(),
                Cyclotomic::from_int(f.legendre(-1) as i64 * n as i64)
            );
            for c in f.nonzero() {
                let g: Cyclotomic = gauss_sum(c).unwrap();
                assert_eq!(g, g1.clone() * Cyclotomic::from_int(c.legendre() as i64));
            }
            assert!((g1.to_complex() - gauss_closed_form(f)).norm() < 1e-12);
        }
    }

    #[derive(Clone, Debug)]
    enum Expr {
        Leaf(i64, i64, i64),
        Add(Box<Expr>, Box<Expr>),
        Mul(Box<Expr>, Box<Expr>),
        Conj(Box<Expr>),
    }

    fn random_expr(rng: &mut ChaCha8Rng, depth: u32, m: u64) -> Expr {
        if depth == 0 || rng.random_bool(0.3) {
            return Expr::Leaf(
                rng.random_range(-5..=5),
                rng.random_range(1..=4),
                rng.random_range(0..m as i64),
            );
        }
        let a = Box::new(random_expr(rng, depth - 1, m));
        match rng.random_range(0..3) {
            0 => Expr::Add(a, Box::new(random_expr(rng, depth - 1, m))),
            1 => Expr::Mul(a, Box::new(random_expr(rng, depth - 1, m))),
            _ => Expr::Conj(a),
        }
    }

    fn eval<S: Scalar>(e: &Expr, m: u64) -> S {
        match e {
            Expr::Leaf(p, q, j) => S::from_ratio(*p, *q) * S::root_of_unity(*j, m),
            Expr::Add(a, b) => eval::<S>(a, m) + eval::<S>(b, m),
            Expr::Mul(a, b) => eval::<S>(a, m) * eval::<S>(b, m),
            Expr::Conj(a) => eval::<S>(a, m).conj(),
        }
    }

    #[test]
    fn exact_backend_embeds_into_float_backend() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for round in 0..1000 {
            let n = [3u64, 5, 7, 11, 13][round % 5];
            let m = if round % 2 == 0 { n } else { 4 * n };
            let e = random_expr(&mut rng, 4, m);
            let x: Cyclotomic = eval(&e, m);
            let y: Complex64 = eval(&e, m);
            let scale = 1.0 + y.norm();
            assert!((x.to_complex() - y).norm() < 1e-10 * scale, "{e:?}");
        }
    }

    #[test]
    fn conjugation_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let e = random_expr(&mut rng, 3, 20);
            let x: Cyclotomic = eval(&e, 20);
            assert_eq!(x.conj().conj(), x);
            let y: Complex64 = eval(&e, 20);
            assert_eq!(Scalar::conj(&Scalar::conj(&y)), y);
        }
    }

    #[test]
    fn exact_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let e = random_expr(&mut rng, 2, 12);
            let x: Cyclotomic = eval(&e, 12);
            match x.inv() {
                Some(y) => assert_eq!(x * y, Cyclotomic::one()),
                None => assert!(x.is_negligible()),
            }
        }
        let g: Cyclotomic = gauss_sum(fl(5).one()).unwrap();
        assert_eq!(g.clone() * g.inv().unwrap(), Cyclotomic::one());
    }
}
