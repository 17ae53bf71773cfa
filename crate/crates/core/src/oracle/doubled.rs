//! Heisenberg x Heisenberg part of the doubled group algebra.
//!
//! Coefficients live in `C (x)_R C`, which splits as `C x C` through
//! `a (x) b -> (conj(a) b, a b)`. The first slot is the `P_+` (Hermitian)
//! sector, the second the `P_-` sector; `E = i (x) i` maps to `(1, -1)` and a
//! plain scalar `z` (identified with `1 (x) z`) maps to `(z, z)`.

use std::collections::{HashMap, HashSet};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, PrimeField};
use crate::heisenberg::HeisenbergElement;
use crate::scalar::{char_fe, Scalar};

/// A coefficient in `C (x)_R C`, stored by sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Pair<S> {
    pub plus: S,
    pub minus: S,
}

impl<S: Scalar> Pair<S> {
    pub fn scalar(z: S) -> Self {
        Self {
            plus: z.clone(),
            minus: z,
        }
    }

    pub fn tensor(a: &S, b: &S) -> Self {
        Self {
            plus: a.conj().mul_ref(b),
            minus: a.mul_ref(b),
        }
    }

    /// `E = i (x) i`.
    pub fn e() -> Self {
        Self {
            plus: S::one(),
            minus: S::from_int(-1),
        }
    }

    pub fn zero() -> Self {
        Self::scalar(S::zero())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            plus: self.plus.mul_ref(&o.plus),
            minus: self.minus.mul_ref(&o.minus),
        }
    }

    fn add_assign(&mut self, o: &Self) {
        self.plus.add_assign_ref(&o.plus);
        self.minus.add_assign_ref(&o.minus);
    }

    fn is_negligible(&self) -> bool {
        self.plus.is_negligible() && self.minus.is_negligible()
    }

    fn residual(&self, o: &Self) -> f64 {
        self.plus.residual(&o.plus).max(self.minus.residual(&o.minus))
    }
}

type Key = (HeisenbergElement, HeisenbergElement);

#[derive(Debug, Clone)]
pub struct DoubledElement<S> {
    field: PrimeField,
    terms: HashMap<Key, Pair<S>>,
}

impl<S: Scalar> DoubledElement<S> {
    pub fn zero(field: PrimeField) -> Self {
        Self {
            field,
            terms: HashMap::new(),
        }
    }

    pub fn from_terms(field: PrimeField, terms: impl IntoIterator<Item = (Key, Pair<S>)>) -> Self {
        let mut out = Self::zero(field);
        for (k, v) in terms {
            out.add_term(k, &v);
        }
        out.prune();
        out
    }

    /// `x (x) y` with unit coefficient.
    pub fn basis(x: HeisenbergElement, y: HeisenbergElement) -> Self {
        Self::from_terms(x.field(), [((x, y), Pair::scalar(S::one()))])
    }

    /// `A (x) B` for two Heisenberg group-algebra elements given by their terms.
    pub fn tensor(
        field: PrimeField,
        a: &[(HeisenbergElement, S)],
        b: &[(HeisenbergElement, S)],
    ) -> Self {
        let mut terms = Vec::with_capacity(a.len() * b.len());
        for (x, u) in a {
            for (y, v) in b {
                terms.push(((*x, *y), Pair::tensor(u, v)));
            }
        }
        Self::from_terms(field, terms)
    }

    fn add_term(&mut self, k: Key, v: &Pair<S>) {
        match self.terms.get_mut(&k) {
            Some(c) => c.add_assign(v),
            None => {
                self.terms.insert(k, v.clone());
            }
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, v| !v.is_negligible());
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, k: &Key) -> Pair<S> {
        self.terms.get(k).cloned().unwrap_or_else(Pair::zero)
    }

    /// Component-wise group product on pairs.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.field != o.field {
            return Err(Error::ModulusMismatch(self.field.modulus(), o.field.modulus()));
        }
        let mut out = Self::zero(self.field);
        for ((x1, y1), u) in &self.terms {
            for ((x2, y2), v) in &o.terms {
                out.add_term((x1.mul(x2), y1.mul(y2)), &u.mul(v));
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &o.terms {
            out.add_term(*k, v);
        }
        out.prune();
        out
    }

    pub fn scale(&self, c: &Pair<S>) -> Self {
        Self::from_terms(self.field, self.terms.iter().map(|(k, v)| (*k, c.mul(v))))
    }

    pub fn project_plus(&self) -> Self {
        self.scale(&Pair {
            plus: S::one(),
            minus: S::zero(),
        })
    }

    pub fn project_minus(&self) -> Self {
        self.scale(&Pair {
            plus: S::zero(),
            minus: S::one(),
        })
    }

    pub fn max_residual(&self, o: &Self) -> f64 {
        let keys: HashSet<_> = self.terms.keys().chain(o.terms.keys()).collect();
        keys.into_iter()
            .map(|k| self.coeff(k).residual(&o.coeff(k)))
            .fold(0.0, f64::max)
    }
}

fn hsum<S: Scalar>(field: PrimeField, elem: impl Fn(Fe) -> HeisenbergElement, coeff: impl Fn(Fe) -> S) -> Vec<(HeisenbergElement, S)> {
    field.elements().map(|h| (elem(h), coeff(h))).collect()
}

/// `T_x^k = t_x^k (x) t_x^k`.
pub fn big_tx<S: Scalar>(k: Fe) -> DoubledElement<S> {
    DoubledElement::basis(HeisenbergElement::tx(k), HeisenbergElement::tx(k))
}

/// `Tbar_x^k = t_x^-k (x) t_x^k`.
pub fn big_tx_bar<S: Scalar>(k: Fe) -> DoubledElement<S> {
    DoubledElement::basis(HeisenbergElement::tx(-k), HeisenbergElement::tx(k))
}

pub fn big_ty<S: Scalar>(k: Fe) -> DoubledElement<S> {
    DoubledElement::basis(HeisenbergElement::ty(k), HeisenbergElement::ty(k))
}

pub fn big_ty_bar<S: Scalar>(k: Fe) -> DoubledElement<S> {
    DoubledElement::basis(HeisenbergElement::ty(-k), HeisenbergElement::ty(k))
}

fn eigen_sum<S: Scalar>(p: Fe, t: impl Fn(Fe) -> DoubledElement<S>) -> DoubledElement<S> {
    let f = p.field();
    f.elements()
        .map(|h| t(h).scale(&Pair::scalar(char_fe(-(p * h)))))
        .fold(DoubledElement::zero(f), |acc, x| acc.add(&x))
}

/// `X_p = sum_h e(-p h) T_x^h`.
pub fn big_x<S: Scalar>(p: Fe) -> DoubledElement<S> {
    eigen_sum(p, big_tx)
}

pub fn big_x_bar<S: Scalar>(q: Fe) -> DoubledElement<S> {
    eigen_sum(q, big_tx_bar)
}

pub fn big_y<S: Scalar>(p: Fe) -> DoubledElement<S> {
    eigen_sum(p, big_ty)
}

pub fn big_y_bar<S: Scalar>(q: Fe) -> DoubledElement<S> {
    eigen_sum(q, big_ty_bar)
}

/// `z^_omega (x) z^_omega`.
pub fn zz<S: Scalar>(omega: Fe) -> DoubledElement<S> {
    let f = omega.field();
    let z = hsum(f, HeisenbergElement::tz, |h| char_fe::<S>(-(omega * h)));
    DoubledElement::tensor(f, &z, &z)
}

/// `Y (x) Y` with `Y = y^_0 z^_omega`, the Heisenberg factor of the ideal element.
pub fn heisenberg_ideal_square<S: Scalar>(omega: Fe) -> DoubledElement<S> {
    let f = omega.field();
    let mut y = Vec::new();
    for s in f.elements() {
        for h in f.elements() {
            y.push((HeisenbergElement::ty(s).mul(&HeisenbergElement::tz(h)), char_fe::<S>(-(omega * h))));
        }
    }
    DoubledElement::tensor(f, &y, &y)
}

/// `exp(2 pi i/N * 2 r s omega (1 - E))` for `sign = -1`, `(1 + E)` for `sign = +1`.
pub fn commutator_phase<S: Scalar>(theta: Fe, sign: i8) -> Pair<S> {
    // (1 -+ E) is 0 in one sector and 2 in the other
    let doubled = char_fe::<S>(theta + theta);
    if sign < 0 {
        Pair {
            plus: S::one(),
            minus: doubled,
        }
    } else {
        Pair {
            plus: doubled,
            minus: S::one(),
        }
    }
}

/// Worst residuals of the two commutator identities over all `r, s`.
pub fn commutator_residuals<S: Scalar>(omega: Fe) -> Result<(f64, f64)> {
    let f = omega.field();
    let z = zz::<S>(omega);
    let (mut plain, mut barred) = (0.0f64, 0.0f64);
    for r in f.elements() {
        for s in f.elements() {
            let theta = f.elem(2) * r * s * omega;
            let lhs = big_tx::<S>(r)
                .mul(&big_ty(s))?
                .mul(&big_tx(-r))?
                .mul(&big_ty(-s))?
                .mul(&z)?;
            plain = plain.max(lhs.max_residual(&z.scale(&commutator_phase(theta, -1))));
            let lhs = big_tx::<S>(r)
                .mul(&big_ty_bar(s))?
                .mul(&big_tx(-r))?
                .mul(&big_ty_bar(-s))?
                .mul(&z)?;
            barred = barred.max(lhs.max_residual(&z.scale(&commutator_phase(theta, 1))));
        }
    }
    Ok((plain, barred))
}

/// `Tbar_x^r (Y (x) Y)` against `(P_+ Y_{-4wr} + P_- Ybar_{-4wr}) Xbar_0 (Y (x) Y) / N`.
///
/// Only the `y^_0 z^_omega` factor of the ideal element enters the rewriting,
/// and both sides are right-multiplied by the same remaining factor, so the
/// identity is checked on that factor.
pub fn reexpression_residual<S: Scalar>(omega: Fe) -> Result<f64> {
    let f = omega.field();
    let ii = heisenberg_ideal_square::<S>(omega);
    let x0 = big_x_bar::<S>(f.zero()).mul(&ii)?;
    let inv_n = Pair::scalar(S::from_ratio(1, f.modulus() as i64));
    let mut worst = 0.0f64;
    for r in f.elements() {
        let lhs = big_tx_bar::<S>(r).mul(&ii)?;
        let p = -(f.elem(4) * omega * r);
        let op = big_y::<S>(p).project_plus().add(&big_y_bar::<S>(p).project_minus());
        let rhs = op.mul(&x0)?.scale(&inv_n);
        worst = worst.max(lhs.max_residual(&rhs));
    }
    Ok(worst)
}

/// How the finite-N moment-sum identity is expected to behave for one `(m, h)` factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaCase {
    /// `m = h = 0`: both sides `N`.
    Identity,
    /// exactly one of `m, h` is zero: both sides vanish.
    Vanishing,
    /// `m, h >= 1`: no exact identity at finite `N`.
    Mixed,
}

impl DeltaCase {
    pub fn of(m: u32, h: u32) -> Self {
        match (m, h) {
            (0, 0) => DeltaCase::Identity,
            (0, _) | (_, 0) => DeltaCase::Vanishing,
            _ => DeltaCase::Mixed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentSumRow {
    pub m: u32,
    pub n: u32,
    pub h: u32,
    pub k: u32,
    /// left side with `(-r)^m` taken as a negative integer
    pub lhs_literal: [f64; 2],
    /// left side with `-r` reduced to its residue in `[0, N)`
    pub lhs_residue: [f64; 2],
    pub rhs: [f64; 2],
    pub residual_literal: f64,
    pub residual_residue: f64,
    /// true when both sides are exact and must agree
    pub exact: bool,
}

/// `sum_{r,s,q,p} (-r)^m (-s)^n q^h p^k e(rq + sp)` by direct summation.
///
/// `residue` picks the integer lift of `-r`.
pub fn moment_sum_lhs<S: Scalar>(field: PrimeField, m: u32, n: u32, h: u32, k: u32, residue: bool) -> S {
    let nn = field.modulus() as i64;
    let neg = |r: i64| if residue { (nn - r) % nn } else { -r };
    let mut acc = S::zero();
    for r in 0..nn {
        for s in 0..nn {
            for q in 0..nn {
                for p in 0..nn {
                    let w = neg(r).pow(m) * neg(s).pow(n) * q.pow(h) * p.pow(k);
                    if w != 0 {
                        let e = char_fe::<S>(field.elem(r * q + s * p));
                        acc.add_assign_ref(&e.mul_ref(&S::from_int(w)));
                    }
                }
            }
        }
    }
    acc
}

/// `(N / 2 pi i)^{m+n} N^2 m! n! delta(m-h) delta(n-k)`.
pub fn moment_sum_rhs(field: PrimeField, m: u32, n: u32, h: u32, k: u32) -> Complex64 {
    if m != h || n != k {
        return Complex64::new(0.0, 0.0);
    }
    let nn = field.modulus() as f64;
    let fact = |x: u32| (1..=x).map(f64::from).product::<f64>();
    let base = Complex64::new(0.0, -nn / (2.0 * std::f64::consts::PI));
    base.powu(m + n) * nn * nn * fact(m) * fact(n)
}

/// Moment-sum report for `0 <= m, n, h, k <= max`.
///
/// Exact rows (both factors `Identity`/`Vanishing`, or either factor
/// `Vanishing`) are compared in `S`; the others only in floating point.
pub fn moment_sum_report<S: Scalar>(field: PrimeField, max: u32) -> Vec<MomentSumRow> {
    let nn = field.modulus() as i64;
    let mut rows = Vec::new();
    for m in 0..=max {
        for n in 0..=max {
            for h in 0..=max {
                for k in 0..=max {
                    let (a, b) = (DeltaCase::of(m, h), DeltaCase::of(n, k));
                    let exact = (a != DeltaCase::Mixed && b != DeltaCase::Mixed)
                        || a == DeltaCase::Vanishing
                        || b == DeltaCase::Vanishing;
                    let lit = moment_sum_lhs::<S>(field, m, n, h, k, false);
                    let res = moment_sum_lhs::<S>(field, m, n, h, k, true);
                    let rhs = moment_sum_rhs(field, m, n, h, k);
                    let (rl, rr) = if exact {
                        let want = if a == DeltaCase::Identity && b == DeltaCase::Identity {
                            S::from_int(nn * nn)
                        } else {
                            S::zero()
                        };
                        (lit.residual(&want), res.residual(&want))
                    } else {
                        (
                            (lit.to_complex() - rhs).norm(),
                            (res.to_complex() - rhs).norm(),
                        )
                    };
                    let c = |z: Complex64| [z.re, z.im];
                    rows.push(MomentSumRow {
                        m,
                        n,
                        h,
                        k,
                        lhs_literal: c(lit.to_complex()),
                        lhs_residue: c(res.to_complex()),
                        rhs: c(rhs),
                        residual_literal: rl,
                        residual_residue: rr,
                        exact,
                    });
                }
            }
        }
    }
    rows
}

#[derive(Debug, Clone, Serialize)]
pub struct DoubledReport {
    pub commutator_plain: f64,
    pub commutator_barred: f64,
    pub reexpression: f64,
    pub moment_sums: Vec<MomentSumRow>,
}

impl DoubledReport {
    /// Worst residual over the identities that must hold exactly.
    pub fn worst_asserted(&self) -> f64 {
        self.moment_sums
            .iter()
            .filter(|r| r.exact)
            .map(|r| r.residual_literal.max(r.residual_residue))
            .fold(
                self.commutator_plain.max(self.commutator_barred).max(self.reexpression),
                f64::max,
            )
    }

    /// Worst residual over the rows with no exact identity; reported only.
    pub fn worst_mixed(&self) -> f64 {
        self.moment_sums
            .iter()
            .filter(|r| !r.exact)
            .map(|r| r.residual_literal.min(r.residual_residue))
            .fold(0.0, f64::max)
    }
}

pub fn doubled_checks<S: Scalar>(omega: Fe) -> Result<DoubledReport> {
    let f = omega.field();
    if f.modulus() > super::MAX_ORACLE_N {
        return Err(Error::OracleTooLarge(f.modulus(), super::MAX_ORACLE_N));
    }
    if omega.is_zero() {
        return Err(Error::ZeroOmega);
    }
    let (commutator_plain, commutator_barred) = commutator_residuals::<S>(omega)?;
    Ok(DoubledReport {
        commutator_plain,
        commutator_barred,
        reexpression: reexpression_residual::<S>(omega)?,
        moment_sums: moment_sum_report::<S>(f, 2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cyclotomic;

    fn fl(n: u64) -> PrimeField {
        PrimeField::new(n).unwrap()
    }

    #[test]
    fn sector_map() {
        let i = Complex64::i();
        assert_eq!(Pair::tensor(&i, &i), Pair::<Complex64>::e());
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(Pair::tensor(&one, &i), Pair::scalar(i));
    }

    #[test]
    fn identities_exact_at_three() {
        for w in [1, 2] {
            let r = doubled_checks::<Cyclotomic>(fl(3).elem(w)).unwrap();
            assert_eq!(r.commutator_plain, 0.0);
            assert_eq!(r.commutator_barred, 0.0);
            assert_eq!(r.reexpression, 0.0);
            assert_eq!(r.worst_asserted(), 0.0);
        }
    }

    #[test]
    fn identities_float_at_five() {
        let r = doubled_checks::<Complex64>(fl(5).elem(3)).unwrap();
        assert!(r.worst_asserted() < 1e-9, "{}", r.worst_asserted());
    }

    #[test]
    fn swapped_phase_is_detected() {
        let f = fl(3);
        let w = f.one();
        let z = zz::<Cyclotomic>(w);
        let (r, s) = (f.one(), f.one());
        let lhs = big_tx::<Cyclotomic>(r)
            .mul(&big_ty(s))
            .unwrap()
            .mul(&big_tx(-r))
            .unwrap()
            .mul(&big_ty(-s))
            .unwrap()
            .mul(&z)
            .unwrap();
        let wrong = z.scale(&commutator_phase(f.elem(2) * w, 1));
        assert!(lhs.max_residual(&wrong) > 0.5);
    }

    #[test]
    fn moment_sum_examples() {
        let f = fl(3);
        let all = moment_sum_lhs::<Cyclotomic>(f, 0, 0, 0, 0, false);
        assert_eq!(all, Cyclotomic::from_int(9));
        assert_eq!(moment_sum_lhs::<Cyclotomic>(f, 0, 0, 1, 0, false), Cyclotomic::zero());
        let rows = moment_sum_report::<Complex64>(f, 2);
        assert_eq!(rows.len(), 81);
        let diag = rows
            .iter()
            .find(|r| (r.m, r.n, r.h, r.k) == (1, 0, 1, 0))
            .unwrap();
        assert!(!diag.exact);
        assert!(diag.residual_literal > 1e-3 && diag.residual_residue > 1e-3);
    }
}
