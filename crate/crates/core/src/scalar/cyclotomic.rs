//! Exact arithmetic in cyclotomic fields Q(zeta_n).
//!
//! An element of conductor `n` is `(sum_j num[j] zeta_n^j) / den` with the
//! numerator reduced modulo the n-th cyclotomic polynomial, so it has at most
//! `phi(n)` coefficients. Operands of different conductors are lifted to the
//! lcm before combining. Reduced form plus a normalized denominator makes
//! equality structural.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Backend, Scalar};

type Poly = Vec<BigInt>;

fn phi_cache() -> &'static Mutex<HashMap<u64, Arc<Poly>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Poly>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of the n-th cyclotomic polynomial, constant term first.
fn cyclotomic_poly(n: u64) -> Arc<Poly> {
    if let Some(p) = phi_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Phi_d for every proper divisor d
    let mut p: Poly = vec![BigInt::zero(); n as usize + 1];
    p[0] = BigInt::from(-1);
    p[n as usize] = BigInt::one();
    for d in (1..n).filter(|d| n % d == 0) {
        p = div_monic(&p, &cyclotomic_poly(d));
    }
    let p = Arc::new(p);
    phi_cache().lock().unwrap().insert(n, p.clone());
    p
}

fn div_monic(num: &Poly, den: &Poly) -> Poly {
    let dn = den.len() - 1;
    let mut rem = num.clone();
    let mut q = vec![BigInt::zero(); num.len() - dn];
    for i in (0..q.len()).rev() {
        let c = rem[i + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    q
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    a / gcd_u64(a, b) * b
}

/// Exact element of Q(zeta_order).
#[derive(Clone)]
pub struct Cyclotomic {
    order: u64,
    num: Poly,
    den: BigInt,
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        let mut first = true;
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*z{}^{j}", self.order)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")/{}", self.den)
    }
}

impl Cyclotomic {
    /// Builds from an unreduced numerator of any length, indices taken mod `order`.
    fn from_raw(order: u64, raw: Poly, den: BigInt) -> Self {
        let mut wrapped = vec![BigInt::zero(); order as usize];
        for (j, c) in raw.into_iter().enumerate() {
            wrapped[j % order as usize] += c;
        }
        let phi = cyclotomic_poly(order);
        let deg = phi.len() - 1;
        for i in (deg..wrapped.len()).rev() {
            let c = std::mem::take(&mut wrapped[i]);
            if c.is_zero() {
                continue;
            }
            for j in 0..deg {
                wrapped[i - deg + j] -= &c * &phi[j];
            }
        }
        wrapped.truncate(deg);
        let mut out = Cyclotomic {
            order,
            num: wrapped,
            den,
        };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
            return;
        }
        let mut g = self.den.abs();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if self.den.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for c in &mut self.num {
                *c /= &g;
            }
            self.den /= &g;
        }
    }

    /// Conductor of the field the element is currently stored in.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coefficients(&self) -> (&[BigInt], &BigInt) {
        (&self.num, &self.den)
    }

    fn lift(&self, to: u64) -> Cyclotomic {
        if to == self.order {
            return self.clone();
        }
        debug_assert_eq!(to % self.order, 0);
        let step = (to / self.order) as usize;
        let mut raw = vec![BigInt::zero(); to as usize];
        for (j, c) in self.num.iter().enumerate() {
            raw[j * step] = c.clone();
        }
        Cyclotomic::from_raw(to, raw, self.den.clone())
    }

    fn common(a: &Cyclotomic, b: &Cyclotomic) -> (Cyclotomic, Cyclotomic) {
        let m = lcm_u64(a.order, b.order);
        (a.lift(m), b.lift(m))
    }

    /// Galois automorphism `zeta -> zeta^k`, `gcd(k, order) = 1`.
    pub fn galois(&self, k: u64) -> Cyclotomic {
        let n = self.order as usize;
        let mut raw = vec![BigInt::zero(); n];
        for (j, c) in self.num.iter().enumerate() {
            raw[(j * k as usize) % n] += c;
        }
        Cyclotomic::from_raw(self.order, raw, self.den.clone())
    }

    /// Rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<(BigInt, BigInt)> {
        if self.num.iter().skip(1).all(Zero::is_zero) {
            let c = self.num.first().cloned().unwrap_or_default();
            Some((c, self.den.clone()))
        } else {
            None
        }
    }

    fn sum(a: &Cyclotomic, b: &Cyclotomic) -> Cyclotomic {
        let (a, b) = Cyclotomic::common(a, b);
        let raw = a
            .num
            .iter()
            .zip(&b.num)
            .map(|(x, y)| x * &b.den + y * &a.den)
            .collect();
        Cyclotomic::from_raw(a.order, raw, &a.den * &b.den)
    }

    fn product(a: &Cyclotomic, b: &Cyclotomic) -> Cyclotomic {
        let (a, b) = Cyclotomic::common(a, b);
        let n = a.order as usize;
        let mut raw = vec![BigInt::zero(); n];
        for (i, x) in a.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.num.iter().enumerate() {
                if !y.is_zero() {
                    raw[(i + j) % n] += x * y;
                }
            }
        }
        Cyclotomic::from_raw(a.order, raw, &a.den * &b.den)
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.num == other.num && self.den == other.den;
        }
        let (a, b) = Cyclotomic::common(self, other);
        a.num == b.num && a.den == b.den
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: Cyclotomic) -> Cyclotomic {
        Cyclotomic::sum(&self, &rhs)
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: Cyclotomic) -> Cyclotomic {
        Cyclotomic::sum(&self, &-rhs)
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: Cyclotomic) -> Cyclotomic {
        Cyclotomic::product(&self, &rhs)
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(mut self) -> Cyclotomic {
        for c in &mut self.num {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Scalar for Cyclotomic {
    const BACKEND: Backend = Backend::Exact;

    fn zero() -> Self {
        Cyclotomic::from_ratio(0, 1)
    }

    fn one() -> Self {
        Cyclotomic::from_ratio(1, 1)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let mut out = Cyclotomic {
            order: 1,
            num: vec![BigInt::from(num)],
            den: BigInt::from(den),
        };
        out.normalize();
        out
    }

    fn root_of_unity(j: i64, m: u64) -> Self {
        assert!(m >= 1, "root of unity of order 0");
        let j = j.rem_euclid(m as i64) as u64;
        // store in the smallest field containing it
        let g = gcd_u64(j, m);
        let (j, m) = (j / g, m / g);
        let mut raw = vec![BigInt::zero(); m as usize];
        raw[j as usize] = BigInt::one();
        Cyclotomic::from_raw(m, raw, BigInt::one())
    }

    fn conj(&self) -> Self {
        self.galois(self.order - 1)
    }

    fn inv(&self) -> Option<Self> {
        if self.is_negligible() {
            return None;
        }
        // product of the nontrivial conjugates over the field norm
        let n = self.order;
        let mut others = Cyclotomic::one();
        for k in 2..n.max(2) {
            if gcd_u64(k, n) == 1 {
                others = others * self.galois(k);
            }
        }
        let norm = self.clone() * others.clone();
        let (p, q) = norm
            .as_rational()
            .expect("field norm of a cyclotomic element is rational");
        let scale = Cyclotomic {
            order: 1,
            num: vec![q],
            den: p,
        };
        let mut scale = scale;
        scale.normalize();
        Some(others * scale)
    }

    fn to_complex(&self) -> Complex64 {
        let den = self.den.to_f64().unwrap_or(f64::INFINITY);
        let n = self.order;
        self.num
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                <Complex64 as Scalar>::root_of_unity(j as i64, n) * (c.to_f64().unwrap() / den)
            })
            .sum()
    }

    fn is_negligible(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        Cyclotomic::product(self, rhs)
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self = Cyclotomic::sum(self, rhs);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        let as_i64 = |n| -> Vec<i64> {
            cyclotomic_poly(n)
                .iter()
                .map(|c| c.to_i64().unwrap())
                .collect()
        };
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(2), vec![1, 1]);
        assert_eq!(as_i64(4), vec![1, 0, 1]);
        assert_eq!(as_i64(3), vec![1, 1, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_poly(52).len() - 1, 24);
    }

    #[test]
    fn equality_across_conductors() {
        // zeta_4^2 = -1 = zeta_2
        let a = Cyclotomic::root_of_unity(2, 4);
        assert_eq!(a.order(), 2);
        assert_eq!(a, Cyclotomic::from_int(-1));
        let b = Cyclotomic::root_of_unity(3, 12) * Cyclotomic::root_of_unity(1, 3);
        assert_eq!(b, Cyclotomic::root_of_unity(7, 12));
        let s = (0..12).fold(Cyclotomic::zero(), |acc, j| {
            acc + Cyclotomic::root_of_unity(j, 12)
        });
        assert!(s.is_negligible());
    }

    #[test]
    fn rational_normalization() {
        let x = Cyclotomic::from_ratio(6, -4);
        assert_eq!(x.as_rational(), Some((BigInt::from(-3), BigInt::from(2))));
        assert_eq!(x.clone() * Cyclotomic::from_ratio(-2, 3), Cyclotomic::one());
        assert_eq!(x.inv().unwrap(), Cyclotomic::from_ratio(-2, 3));
        assert!(Cyclotomic::zero().inv().is_none());
    }

    #[test]
    fn imaginary_unit() {
        let i = Cyclotomic::i();
        assert_eq!(i.clone() * i.clone(), Cyclotomic::from_int(-1));
        assert_eq!(i.conj(), -i.clone());
        assert!((i.to_complex() - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }
}
