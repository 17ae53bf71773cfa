//! The Heisenberg group H_1(F_N) and its Schrodinger representation.
//!
//! Elements are stored as `(lambda, mu, kappa)` with
//! `(l, m, k)(l', m', k') = (l + l', m + m', k + k' + l m' - m l')`.
//! The generator form `t_x^r t_y^s t_z^t` corresponds to `(r, s, t + rs)`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, PrimeField};
use crate::matrix::{rank, Matrix};
use crate::scalar::{char_fe, Scalar};
use crate::sl2::Sl2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HeisenbergElement {
    pub lambda: Fe,
    pub mu: Fe,
    pub kappa: Fe,
}

impl HeisenbergElement {
    pub fn new(lambda: Fe, mu: Fe, kappa: Fe) -> Result<Self> {
        lambda.same_field(&mu)?;
        lambda.same_field(&kappa)?;
        Ok(Self { lambda, mu, kappa })
    }

    pub fn identity(field: PrimeField) -> Self {
        Self {
            lambda: field.zero(),
            mu: field.zero(),
            kappa: field.zero(),
        }
    }

    /// `t_x^r t_y^s t_z^t`.
    pub fn from_rst(r: Fe, s: Fe, t: Fe) -> Self {
        Self {
            lambda: r,
            mu: s,
            kappa: t + r * s,
        }
    }

    pub fn rst(&self) -> (Fe, Fe, Fe) {
        (self.lambda, self.mu, self.kappa - self.lambda * self.mu)
    }

    pub fn tx(r: Fe) -> Self {
        let f = r.field();
        Self::from_rst(r, f.zero(), f.zero())
    }

    pub fn ty(s: Fe) -> Self {
        let f = s.field();
        Self::from_rst(f.zero(), s, f.zero())
    }

    pub fn tz(t: Fe) -> Self {
        let f = t.field();
        Self::from_rst(f.zero(), f.zero(), t)
    }

    pub fn field(&self) -> PrimeField {
        self.lambda.field()
    }

    pub fn mul(&self, y: &Self) -> Self {
        Self {
            lambda: self.lambda + y.lambda,
            mu: self.mu + y.mu,
            kappa: self.kappa + y.kappa + self.lambda * y.mu - self.mu * y.lambda,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            lambda: -self.lambda,
            mu: -self.mu,
            kappa: -self.kappa,
        }
    }

    pub fn commutator(&self, y: &Self) -> Self {
        self.mul(y).mul(&self.inverse()).mul(&y.inverse())
    }

    pub fn random<R: Rng + ?Sized>(field: PrimeField, rng: &mut R) -> Self {
        let n = field.modulus() as i64;
        let mut e = || field.elem(rng.random_range(0..n));
        Self {
            lambda: e(),
            mu: e(),
            kappa: e(),
        }
    }
}

/// Group law with a modulus check for inputs of mixed origin.
pub fn hmul(x: &HeisenbergElement, y: &HeisenbergElement) -> Result<HeisenbergElement> {
    x.lambda.same_field(&y.lambda)?;
    Ok(x.mul(y))
}

/// `[U f](k) = e(omega t + nu s - 2 omega k s + 2 omega r s) f(k - r)`.
pub fn schrodinger_matrix_nu<S: Scalar>(
    h: &HeisenbergElement,
    omega: Fe,
    nu: Fe,
) -> Result<Matrix<S>> {
    if omega.is_zero() {
        return Err(Error::ZeroOmega);
    }
    let field = h.field();
    let n = field.modulus() as usize;
    let (r, s, t) = h.rst();
    let two = field.elem(2);
    let mut m = Matrix::zeros(n, n);
    for k in field.elements() {
        let phase = omega * t + nu * s - two * omega * k * s + two * omega * r * s;
        m[(k.value() as usize, (k - r).value() as usize)] = char_fe(phase);
    }
    Ok(m)
}

/// Schrodinger representation with `nu = 0`.
pub fn schrodinger_matrix<S: Scalar>(h: &HeisenbergElement, omega: Fe) -> Result<Matrix<S>> {
    schrodinger_matrix_nu(h, omega, omega.field().zero())
}

/// Action of `g` on H_1: `g h g^-1 = (d l - c m, a m - b l, k)`.
pub fn sl2_automorphism(g: &Sl2, h: &HeisenbergElement) -> HeisenbergElement {
    HeisenbergElement {
        lambda: g.d() * h.lambda - g.c() * h.mu,
        mu: g.a() * h.mu - g.b() * h.lambda,
        kappa: h.kappa,
    }
}

/// Dimension of the commutant of the Schrodinger representation; 1 means irreducible.
pub fn commutant_dimension<S: Scalar>(field: PrimeField, omega: Fe) -> Result<usize> {
    if field.modulus() > 7 {
        return Err(Error::OrderTooLarge(field.modulus() as usize, 7));
    }
    let n = field.modulus() as usize;
    let gens = [
        schrodinger_matrix::<S>(&HeisenbergElement::tx(field.one()), omega)?,
        schrodinger_matrix::<S>(&HeisenbergElement::ty(field.one()), omega)?,
    ];
    // rows: entries of X U - U X for each generator; columns: entries of X
    let mut sys: Matrix<S> = Matrix::zeros(2 * n * n, n * n);
    for (gi, u) in gens.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let row = gi * n * n + i * n + j;
                for k in 0..n {
                    // (X U)_{ij} = sum_k X_{ik} U_{kj}
                    sys[(row, i * n + k)] = sys[(row, i * n + k)].clone() + u[(k, j)].clone();
                    // (U X)_{ij} = sum_k U_{ik} X_{kj}
                    sys[(row, k * n + j)] = sys[(row, k * n + j)].clone() - u[(i, k)].clone();
                }
            }
        }
    }
    Ok(n * n - rank(&sys))
}
