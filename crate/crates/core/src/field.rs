//! Arithmetic in the prime field F_N and its quadratic extension F_{N^2}.
//!
//! Every [`Fe`] carries its modulus. Mixing elements of different fields
//! through the operator traits is a programming error and panics; the
//! fallible entry points that take user input return [`Error::ModulusMismatch`].

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Validated odd prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    n: u32,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    /// Rejects composites, 2, and anything that does not fit in `u32`.
    pub fn new(n: u64) -> Result<Self> {
        if n > u32::MAX as u64 || n == 2 || !is_prime(n) {
            return Err(Error::InvalidModulus(n));
        }
        Ok(Self { n: n as u32 })
    }

    pub fn modulus(&self) -> u32 {
        self.n
    }

    /// Reduces an arbitrary integer to its canonical residue.
    pub fn elem(&self, v: i64) -> Fe {
        let n = self.n as i64;
        Fe {
            value: v.rem_euclid(n) as u32,
            modulus: self.n,
        }
    }

    pub fn zero(&self) -> Fe {
        self.elem(0)
    }

    pub fn one(&self) -> Fe {
        self.elem(1)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> + '_ {
        (0..self.n as i64).map(move |v| self.elem(v))
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fe> + '_ {
        (1..self.n as i64).map(move |v| self.elem(v))
    }

    pub fn legendre(&self, m: i64) -> i8 {
        legendre(m, self.n)
    }

    /// Smallest positive nonsquare.
    pub fn find_nonsquare(&self) -> Fe {
        (1..self.n as i64)
            .find(|&d| legendre(d, self.n) == -1)
            .map(|d| self.elem(d))
            .expect("an odd prime field always has a nonsquare")
    }

    /// Exhaustive square root: the smaller of the two roots, or `None`.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        self.elements().find(|x| *x * *x == a)
    }
}

impl TryFrom<u64> for PrimeField {
    type Error = Error;
    fn try_from(n: u64) -> Result<Self> {
        PrimeField::new(n)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.n as u64
    }
}

fn pow_mod(base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    let mut b = base % n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % n;
        }
        b = b * b % n;
        exp >>= 1;
    }
    acc
}

/// Legendre symbol by Euler's criterion: `m^((N-1)/2) mod N`.
pub fn legendre(m: i64, n: u32) -> i8 {
    let n64 = n as i64;
    let r = m.rem_euclid(n64) as u64;
    if r == 0 {
        return 0;
    }
    match pow_mod(r, (n as u64 - 1) / 2, n as u64) {
        1 => 1,
        _ => -1,
    }
}

/// Element of F_N, stored as its canonical residue in `[0, N)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe {
    value: u32,
    modulus: u32,
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Serialized as the bare residue.
impl Serialize for Fe {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.value)
    }
}

impl Fe {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { n: self.modulus }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Fe> {
        if self.value == 0 {
            return Err(Error::DivisionByZero(self.modulus));
        }
        Ok(self.pow(self.modulus as i64 - 2))
    }

    /// Integer power; negative exponents go through the inverse and panic on zero.
    pub fn pow(&self, e: i64) -> Fe {
        let n = self.modulus as u64;
        let base = if e < 0 {
            self.inv().expect("negative power of zero").value as u64
        } else {
            self.value as u64
        };
        Fe {
            value: pow_mod(base, e.unsigned_abs(), n) as u32,
            modulus: self.modulus,
        }
    }

    pub fn legendre(&self) -> i8 {
        legendre(self.value as i64, self.modulus)
    }

    /// Representative in the symmetric range `[-(N-1)/2, (N-1)/2]`.
    pub fn symmetric_lift(&self) -> i64 {
        let v = self.value as i64;
        let n = self.modulus as i64;
        if v > n / 2 {
            v - n
        } else {
            v
        }
    }

    pub fn to_i64(&self) -> i64 {
        self.value as i64
    }

    /// Checked addition for inputs of unknown provenance.
    pub fn checked_add(self, rhs: Fe) -> Result<Fe> {
        self.same_field(&rhs)?;
        Ok(self + rhs)
    }

    pub fn same_field(&self, other: &Fe) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    fn check(&self, other: &Fe) {
        assert_eq!(
            self.modulus, other.modulus,
            "mixing elements of F_{} and F_{}",
            self.modulus, other.modulus
        );
    }
}

impl Add for Fe {
    type Output = Fe;
    fn add(self, rhs: Fe) -> Fe {
        self.check(&rhs);
        let s = (self.value as u64 + rhs.value as u64) % self.modulus as u64;
        Fe {
            value: s as u32,
            modulus: self.modulus,
        }
    }
}

impl Sub for Fe {
    type Output = Fe;
    fn sub(self, rhs: Fe) -> Fe {
        self + (-rhs)
    }
}

impl Neg for Fe {
    type Output = Fe;
    fn neg(self) -> Fe {
        Fe {
            value: if self.value == 0 {
                0
            } else {
                self.modulus - self.value
            },
            modulus: self.modulus,
        }
    }
}

impl Mul for Fe {
    type Output = Fe;
    fn mul(self, rhs: Fe) -> Fe {
        self.check(&rhs);
        let p = self.value as u64 * rhs.value as u64 % self.modulus as u64;
        Fe {
            value: p as u32,
            modulus: self.modulus,
        }
    }
}

impl Mul<i64> for Fe {
    type Output = Fe;
    fn mul(self, rhs: i64) -> Fe {
        self * self.field().elem(rhs)
    }
}

impl Add<i64> for Fe {
    type Output = Fe;
    fn add(self, rhs: i64) -> Fe {
        self + self.field().elem(rhs)
    }
}

/// Panics on division by zero; use [`Fe::inv`] for the fallible form.
impl Div for Fe {
    type Output = Fe;
    fn div(self, rhs: Fe) -> Fe {
        self * rhs.inv().expect("division by zero in F_N")
    }
}

impl AddAssign for Fe {
    fn add_assign(&mut self, rhs: Fe) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fe {
    fn sub_assign(&mut self, rhs: Fe) {
        *self = *self - rhs;
    }
}

impl MulAssign for Fe {
    fn mul_assign(&mut self, rhs: Fe) {
        *self = *self * rhs;
    }
}

/// Element `a + b sqrt(delta)` of F_{N^2} for a fixed nonsquare `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadExt {
    pub a: Fe,
    pub b: Fe,
    delta: Fe,
}

impl QuadExt {
    pub fn new(a: Fe, b: Fe, delta: Fe) -> Result<Self> {
        a.same_field(&b)?;
        a.same_field(&delta)?;
        if delta.legendre() != -1 {
            return Err(Error::NotNonsquare(delta.value, delta.modulus));
        }
        Ok(Self { a, b, delta })
    }

    pub fn one(delta: Fe) -> Result<Self> {
        let f = delta.field();
        Self::new(f.one(), f.zero(), delta)
    }

    pub fn delta(&self) -> Fe {
        self.delta
    }

    /// `a^2 - delta b^2`.
    pub fn norm(&self) -> Fe {
        self.a * self.a - self.delta * self.b * self.b
    }

    /// Frobenius conjugate `a - b sqrt(delta)`.
    pub fn conj(&self) -> Self {
        Self {
            a: self.a,
            b: -self.b,
            delta: self.delta,
        }
    }

    pub fn is_one(&self) -> bool {
        self.a.value == 1 && self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm().inv()?;
        let c = self.conj();
        Ok(Self {
            a: c.a * n,
            b: c.b * n,
            delta: self.delta,
        })
    }

    /// Square-and-multiply; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Self {
        let mut base = if e < 0 {
            self.inv().expect("negative power of zero in F_{N^2}")
        } else {
            *self
        };
        let mut acc = Self {
            a: self.a.field().one(),
            b: self.a.field().zero(),
            delta: self.delta,
        };
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    /// Multiplicative order by repeated multiplication; `None` for zero.
    pub fn order(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let mut x = *self;
        let mut k = 1u64;
        while !x.is_one() {
            x = x * *self;
            k += 1;
        }
        Some(k)
    }

    /// All elements of norm one, in lexicographic `(a, b)` order.
    pub fn norm_one_elements(delta: Fe) -> Result<Vec<QuadExt>> {
        let f = delta.field();
        let mut out = Vec::new();
        for a in f.elements() {
            for b in f.elements() {
                let x = QuadExt::new(a, b, delta)?;
                if x.norm() == f.one() {
                    out.push(x);
                }
            }
        }
        Ok(out)
    }
}

impl Mul for QuadExt {
    type Output = QuadExt;
    fn mul(self, rhs: QuadExt) -> QuadExt {
        assert_eq!(self.delta, rhs.delta, "mixing quadratic extensions");
        QuadExt {
            a: self.a * rhs.a + self.delta * self.b * rhs.b,
            b: self.a * rhs.b + self.b * rhs.a,
            delta: self.delta,
        }
    }
}

impl Add for QuadExt {
    type Output = QuadExt;
    fn add(self, rhs: QuadExt) -> QuadExt {
        assert_eq!(self.delta, rhs.delta, "mixing quadratic extensions");
        QuadExt {
            a: self.a + rhs.a,
            b: self.b + rhs.b,
            delta: self.delta,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(n: u64) -> PrimeField {
        PrimeField::new(n).unwrap()
    }

    #[test]
    fn rejects_bad_moduli() {
        for n in [0, 1, 2, 4, 9, 15, 21] {
            assert_eq!(PrimeField::new(n), Err(Error::InvalidModulus(n)));
        }
        assert!(PrimeField::new(97).is_ok());
    }

    #[test]
    fn inverse_examples() {
        for n in [3, 5, 7, 11] {
            assert_eq!(f(n).one().inv().unwrap(), f(n).one());
        }
        assert_eq!(f(5).elem(2).inv().unwrap().value(), 3);
        assert_eq!(f(7).elem(4).inv().unwrap().value(), 2);
        assert_eq!(f(7).zero().inv(), Err(Error::DivisionByZero(7)));
    }

    #[test]
    fn legendre_examples() {
        for n in [3, 5, 7, 11, 13] {
            assert_eq!(legendre(1, n), 1);
            assert_eq!(legendre(0, n), 0);
            assert_eq!(legendre(n as i64, n), 0);
        }
        assert_eq!(legendre(2, 3), -1);
        assert_eq!(legendre(-1, 5), 1);
        assert_eq!(legendre(-1, 7), -1);
    }

    #[test]
    fn half_the_units_are_squares() {
        for n in [3u64, 5, 7, 11, 13, 17, 97] {
            let fl = f(n);
            let squares = fl.nonzero().filter(|x| x.legendre() == 1).count();
            assert_eq!(squares as u64, (n - 1) / 2);
            // Euler criterion agrees with brute-force squaring
            for x in fl.nonzero() {
                assert_eq!(x.legendre() == 1, fl.sqrt(x).is_some());
            }
        }
    }

    #[test]
    fn nonsquare_examples() {
        assert_eq!(f(3).find_nonsquare().value(), 2);
        assert_eq!(f(5).find_nonsquare().value(), 2);
        assert_eq!(f(7).find_nonsquare().value(), 3);
    }

    #[test]
    fn symmetric_lift_range() {
        let fl = f(7);
        let lifts: Vec<i64> = fl.elements().map(|x| x.symmetric_lift()).collect();
        assert_eq!(lifts, vec![0, 1, 2, 3, -3, -2, -1]);
    }

    #[test]
    fn quadext_examples() {
        let fl = f(3);
        let delta = fl.elem(2);
        let one = QuadExt::one(delta).unwrap();
        for k in 0..6 {
            assert!(one.pow(k).is_one());
        }
        let root = QuadExt::new(fl.zero(), fl.one(), delta).unwrap();
        let sq = root.pow(2);
        assert_eq!((sq.a.value(), sq.b.value()), (2, 0));
        assert_eq!(root.order(), Some(4));
        assert!(QuadExt::new(fl.one(), fl.one(), fl.one()).is_err());
    }

    #[test]
    fn norm_one_subgroup_has_n_plus_one_elements() {
        for n in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            let fl = f(n);
            let delta = fl.find_nonsquare();
            let els = QuadExt::norm_one_elements(delta).unwrap();
            assert_eq!(els.len() as u64, n + 1, "N = {n}");
        }
    }

    #[test]
    fn frobenius_power_is_norm() {
        // (a + b sqrt(delta))^(N+1) = a^2 - delta b^2
        let fl = f(11);
        let delta = fl.find_nonsquare();
        for a in fl.elements() {
            for b in fl.elements() {
                let x = QuadExt::new(a, b, delta).unwrap();
                let p = x.pow(12);
                assert_eq!(p.a, x.norm());
                assert!(p.b.is_zero());
            }
        }
    }

    proptest! {
        #[test]
        fn inverse_is_multiplicative(a in 1i64..97, b in 1i64..97) {
            let fl = f(97);
            let (x, y) = (fl.elem(a), fl.elem(b));
            prop_assert_eq!((x * y).inv().unwrap(), x.inv().unwrap() * y.inv().unwrap());
            prop_assert_eq!(x * x.inv().unwrap(), fl.one());
        }

        #[test]
        fn legendre_is_multiplicative(m in 1i64..200, k in 1i64..200) {
            for n in [3u32, 5, 7, 11, 13] {
                if m % n as i64 != 0 && k % n as i64 != 0 {
                    prop_assert_eq!(legendre(m * k, n), legendre(m, n) * legendre(k, n));
                }
            }
        }

        #[test]
        fn norm_is_multiplicative(a in 0i64..13, b in 0i64..13, c in 0i64..13, d in 0i64..13, e in 0i64..40) {
            let fl = f(13);
            let delta = fl.find_nonsquare();
            let x = QuadExt::new(fl.elem(a), fl.elem(b), delta).unwrap();
            let y = QuadExt::new(fl.elem(c), fl.elem(d), delta).unwrap();
            prop_assert_eq!((x * y).norm(), x.norm() * y.norm());
            prop_assert_eq!(x.pow(e).norm(), x.norm().pow(e));
        }
    }
}
