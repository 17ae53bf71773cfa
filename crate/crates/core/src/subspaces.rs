//! Order-`h` invariant subspaces: `rho_h`, the forms `b_h`, and moment prediction.
//!
//! `rho_1(g) = M_g = (g^-1)^T` acts on `(x, y) = (k, D')`. `rho_h(g)` is its
//! `h`-th symmetric power in the monomial basis `x^h, x^{h-1} y, ..., y^h`:
//! row `a` holds the coefficients of `x'^{h-a} y'^a`.

use serde::Serialize;

use crate::cyclic::EigenRange;
use crate::error::{Error, Result};
use crate::field::{Fe, PrimeField};
use crate::metaplectic::weil;
use crate::scalar::Scalar;
use crate::sl2::Sl2;
use crate::wigner::{moments, phase_space_matrix, MomentVector, StateVector};

/// Square matrix over `F_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoMatrix {
    pub order: u32,
    pub source: Sl2,
    pub entries: Vec<Vec<Fe>>,
}

impl RhoMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn field(&self) -> PrimeField {
        self.source.field()
    }

    /// Matrix product; the source becomes the product of sources.
    pub fn mul(&self, o: &Self) -> Self {
        Self {
            order: self.order,
            source: self.source.mul(&o.source),
            entries: fe_matmul(&self.entries, &o.entries),
        }
    }

    pub fn transpose(&self) -> Vec<Vec<Fe>> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.entries[j][i]).collect()).collect()
    }

    /// Entries lifted to `[-(N-1)/2, (N-1)/2]`.
    pub fn symmetric_lift(&self) -> Vec<Vec<i64>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(Fe::symmetric_lift).collect())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(j, x)| x.value() == u32::from(i == j))
        })
    }
}

fn fe_matmul(a: &[Vec<Fe>], b: &[Vec<Fe>]) -> Vec<Vec<Fe>> {
    let f = a[0][0].field();
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(f.zero(), |acc, l| acc + a[i][l] * b[l][j]))
                .collect()
        })
        .collect()
}

/// Product of two polynomials given by coefficient vectors in the powers of `y`.
fn poly_mul(a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let f = a[0].field();
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += *x * *y;
        }
    }
    out
}

/// `rho_h(g)`, the `h`-th symmetric power of `M_g = (g^-1)^T`.
pub fn rho(h: u32, g: &Sl2) -> RhoMatrix {
    let f = g.field();
    let m = phase_space_matrix(g);
    let x_new = [m.a(), m.b()];
    let y_new = [m.c(), m.d()];
    let entries = (0..=h)
        .map(|a| {
            let mut p = vec![f.one()];
            for _ in 0..h - a {
                p = poly_mul(&p, &x_new);
            }
            for _ in 0..a {
                p = poly_mul(&p, &y_new);
            }
            p
        })
        .collect();
    RhoMatrix {
        order: h,
        source: *g,
        entries,
    }
}

/// Antidiagonal form with `B_h[j][h-j] = (-1)^j C(h, j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BilinearForm {
    pub order: u32,
    pub entries: Vec<Vec<i64>>,
}

impl BilinearForm {
    pub fn over_field(&self, f: PrimeField) -> Vec<Vec<Fe>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|x| f.elem(*x)).collect())
            .collect()
    }

    /// `rho^T B rho == B` over `F_N`.
    pub fn is_invariant(&self, r: &RhoMatrix) -> bool {
        let b = self.over_field(r.field());
        fe_matmul(&fe_matmul(&r.transpose(), &b), &r.entries) == b
    }

    /// `u^T B v` over any scalar backend.
    pub fn evaluate<S: Scalar>(&self, u: &[S], v: &[S]) -> S {
        let mut acc = S::zero();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if *c != 0 {
                    acc.add_assign_ref(&(S::from_int(*c) * u[i].clone() * v[j].clone()));
                }
            }
        }
        acc
    }
}

pub fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

pub fn bform(h: u32) -> Result<BilinearForm> {
    if h == 0 {
        return Err(Error::UnsupportedOrder(0));
    }
    let n = h as usize + 1;
    let mut entries = vec![vec![0i64; n]; n];
    for j in 0..=h {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        entries[j as usize][(h - j) as usize] = sign * binomial(h, j);
    }
    Ok(BilinearForm { order: h, entries })
}

/// `b_h(r, r)` for `h` in `{2, 4}`; odd orders vanish identically.
///
/// At `h = 2` this is `2 (<k^2><D'^2> - <kD'>^2)`.
pub fn dm_invariant<S: Scalar>(r: &MomentVector<S>) -> Result<S> {
    if r.order != 2 && r.order != 4 {
        return Err(Error::UnsupportedOrder(r.order as usize));
    }
    Ok(bform(r.order)?.evaluate(&r.values, &r.values))
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentPrediction {
    pub order: u32,
    pub predicted: Vec<[f64; 2]>,
    pub measured: Vec<[f64; 2]>,
    /// Per-component `|predicted - measured|`.
    pub residuals: Vec<f64>,
    pub residual: f64,
}

/// Compares `rho_h(g) r_h(f)` (entries lifted to the symmetric range) with `r_h(W(g) f)`.
pub fn predict_moments<S: Scalar>(h: u32, g: &Sl2, f: &StateVector<S>, range: EigenRange) -> Result<MomentPrediction> {
    let r = moments(f, h, range)?;
    let measured = moments(&f.apply(&weil::<S>(g, f.omega())?.matrix), h, range)?;
    let lifted = rho(h, g).symmetric_lift();
    let predicted: Vec<S> = lifted
        .iter()
        .map(|row| {
            row.iter()
                .zip(&r.values)
                .fold(S::zero(), |acc, (c, x)| acc + S::from_int(*c) * x.clone())
        })
        .collect();
    let residuals: Vec<f64> = predicted
        .iter()
        .zip(&measured.values)
        .map(|(a, b)| a.residual(b))
        .collect();
    let pred = MomentVector {
        order: h,
        values: predicted,
    };
    Ok(MomentPrediction {
        order: h,
        predicted: pred.to_pairs(),
        measured: measured.to_pairs(),
        residual: residuals.iter().copied().fold(0.0, f64::max),
        residuals,
    })
}

/// `b_h(r, r)` of `W(t_u^b) f` for `b = 0..N-1`.
pub fn dm_drift<S: Scalar>(f: &StateVector<S>, h: u32, range: EigenRange) -> Result<Vec<S>> {
    let field = f.field();
    field
        .elements()
        .map(|b| {
            let g = f.apply(&weil::<S>(&Sl2::tu(b), f.omega())?.matrix);
            dm_invariant(&moments(&g, h, range)?)
        })
        .collect()
}
