//! Brute-force group-algebra model of the Jacobi group `SL(2, F_N) x| H_1(F_N)`.
//!
//! Group elements are pairs `H(h) E(g)`; the product is
//! `(h1, g1)(h2, g2) = (h1 phi_g1(h2), g1 g2)`, which is the product of the
//! 4x4 matrices
//!
//! ```text
//! H(l, m, k) = [[1, 0, 0, m], [l, 1, m, k], [0, 0, 1, -l], [0, 0, 0, 1]]
//! E(g)       = [[a, 0, b, 0], [0, 1, 0, 0], [c, 0, d, 0], [0, 0, 0, 1]]
//! ```
//!
//! Algebra elements are sparse maps from group elements to scalars. The ideal
//! element `I` is built literally as a product of group-algebra sums and its
//! left translates `t_x^k I` are used as a basis to read off the matrices of
//! the representation, which are then compared with [`crate::metaplectic`]
//! and [`crate::heisenberg`].

pub mod doubled;

use std::collections::{HashMap, HashSet};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, PrimeField};
use crate::heisenberg::{schrodinger_matrix, sl2_automorphism, HeisenbergElement};
use crate::matrix::{solve_columns, Matrix};
use crate::metaplectic::{weil, weil_generator};
use crate::scalar::{char_fe, gauss_sum, Backend, Scalar};
use crate::sl2::{Generator, Sl2};

/// Largest modulus the oracle accepts; `|G^J| = 15000` at `N = 5`.
pub const MAX_ORACLE_N: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JacobiElement {
    pub h: HeisenbergElement,
    pub g: Sl2,
}

impl JacobiElement {
    pub fn identity(field: PrimeField) -> Self {
        Self {
            h: HeisenbergElement::identity(field),
            g: Sl2::identity(field),
        }
    }

    pub fn from_sl2(g: Sl2) -> Self {
        Self {
            h: HeisenbergElement::identity(g.field()),
            g,
        }
    }

    pub fn from_heisenberg(h: HeisenbergElement) -> Self {
        Self {
            h,
            g: Sl2::identity(h.field()),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.g.field()
    }

    pub fn mul(&self, y: &Self) -> Self {
        Self {
            h: self.h.mul(&sl2_automorphism(&self.g, &y.h)),
            g: self.g.mul(&y.g),
        }
    }

    pub fn inverse(&self) -> Self {
        let gi = self.g.inverse();
        Self {
            h: sl2_automorphism(&gi, &self.h.inverse()),
            g: gi,
        }
    }

    /// The 4x4 matrix `H(h) E(g)`.
    pub fn to_matrix(&self) -> [[Fe; 4]; 4] {
        let f = self.field();
        let (z, o) = (f.zero(), f.one());
        let HeisenbergElement { lambda, mu, kappa } = self.h;
        let (a, b, c, d) = (self.g.a(), self.g.b(), self.g.c(), self.g.d());
        [
            [a, z, b, mu],
            [lambda * a + mu * c, o, lambda * b + mu * d, kappa],
            [c, z, d, -lambda],
            [z, z, z, o],
        ]
    }

    /// Inverse of [`JacobiElement::to_matrix`]; rejects matrices outside the model.
    pub fn from_matrix(m: &[[Fe; 4]; 4]) -> Result<Self> {
        let f = m[0][0].field();
        let g = Sl2::new(m[0][0], m[0][2], m[2][0], m[2][2])?;
        let h = HeisenbergElement::new(-m[2][3], m[0][3], m[1][3])?;
        let x = Self { h, g };
        if x.to_matrix() != *m {
            return Err(Error::Invalid(format!(
                "matrix is not in the Jacobi group model over F_{}",
                f.modulus()
            )));
        }
        Ok(x)
    }

    /// Dense index in `[0, N^7)`: Heisenberg part major, matrix entries minor.
    pub fn index(&self) -> usize {
        let n = self.field().modulus() as usize;
        let h = (self.h.lambda.value() as usize * n + self.h.mu.value() as usize) * n
            + self.h.kappa.value() as usize;
        let g = ((self.g.a().value() as usize * n + self.g.b().value() as usize) * n
            + self.g.c().value() as usize)
            * n
            + self.g.d().value() as usize;
        h * n.pow(4) + g
    }

    pub fn from_index(field: PrimeField, mut idx: usize) -> Option<Self> {
        let n = field.modulus() as usize;
        let mut digit = || {
            let d = idx % n;
            idx /= n;
            field.elem(d as i64)
        };
        let (d, c, b, a) = (digit(), digit(), digit(), digit());
        let (kappa, mu, lambda) = (digit(), digit(), digit());
        if idx != 0 {
            return None;
        }
        let g = Sl2::new(a, b, c, d).ok()?;
        Some(Self {
            h: HeisenbergElement { lambda, mu, kappa },
            g,
        })
    }

    pub fn random<R: Rng + ?Sized>(field: PrimeField, rng: &mut R) -> Self {
        Self {
            h: HeisenbergElement::random(field, rng),
            g: Sl2::random(field, rng),
        }
    }
}

/// `|G^J| = N^3 * N (N^2 - 1)`.
pub fn jacobi_order(n: u32) -> u64 {
    (n as u64).pow(3) * crate::sl2::group_order(n)
}

/// Sparse element of the complex group algebra of G^J.
#[derive(Debug, Clone)]
pub struct AlgebraElement<S> {
    field: PrimeField,
    terms: HashMap<JacobiElement, S>,
}

impl<S: Scalar> AlgebraElement<S> {
    pub fn zero(field: PrimeField) -> Self {
        Self {
            field,
            terms: HashMap::new(),
        }
    }

    pub fn delta(x: JacobiElement) -> Self {
        Self::from_terms(x.field(), [(x, S::one())])
    }

    /// Sums repeated keys and drops negligible coefficients.
    pub fn from_terms(field: PrimeField, terms: impl IntoIterator<Item = (JacobiElement, S)>) -> Self {
        let mut out = Self::zero(field);
        for (x, v) in terms {
            out.add_term(x, v);
        }
        out.prune();
        out
    }

    fn add_term(&mut self, x: JacobiElement, v: S) {
        match self.terms.get_mut(&x) {
            Some(c) => c.add_assign_ref(&v),
            None => {
                self.terms.insert(x, v);
            }
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, v| !v.is_negligible());
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn support(&self) -> impl Iterator<Item = &JacobiElement> {
        self.terms.keys()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&JacobiElement, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, x: &JacobiElement) -> S {
        self.terms.get(x).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_terms(self.field, self.terms.iter().map(|(x, v)| (*x, c.mul_ref(v))))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, v) in &other.terms {
            out.add_term(*x, v.clone());
        }
        out.prune();
        out
    }

    /// `g A`, a re-keying since `g` is a single group element.
    pub fn left_translate(&self, g: &JacobiElement) -> Self {
        Self {
            field: self.field,
            terms: self.terms.iter().map(|(x, v)| (g.mul(x), v.clone())).collect(),
        }
    }

    /// Largest coefficient difference over the union of supports.
    pub fn max_residual(&self, other: &Self) -> f64 {
        let keys: HashSet<_> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .map(|x| self.coeff(x).residual(&other.coeff(x)))
            .fold(0.0, f64::max)
    }
}

/// Convolution product `(AB)(z) = sum_{xy = z} A(x) B(y)`.
pub fn ga_mul<S: Scalar>(a: &AlgebraElement<S>, b: &AlgebraElement<S>) -> Result<AlgebraElement<S>> {
    if a.field != b.field {
        return Err(Error::ModulusMismatch(a.field.modulus(), b.field.modulus()));
    }
    let mut out = AlgebraElement::zero(a.field);
    for (x, u) in &a.terms {
        for (y, v) in &b.terms {
            out.add_term(x.mul(y), u.mul_ref(v));
        }
    }
    out.prune();
    Ok(out)
}

fn sum_over<S: Scalar>(
    field: PrimeField,
    range: impl Iterator<Item = Fe>,
    elem: impl Fn(Fe) -> JacobiElement,
    coeff: impl Fn(Fe) -> S,
) -> AlgebraElement<S> {
    AlgebraElement::from_terms(field, range.map(|m| (elem(m), coeff(m))))
}

/// `y^_nu = sum_n e(-nu n) t_y^n`.
pub fn yhat<S: Scalar>(nu: Fe) -> AlgebraElement<S> {
    let f = nu.field();
    sum_over(f, f.elements(), |n| JacobiElement::from_heisenberg(HeisenbergElement::ty(n)), |n| char_fe(-(nu * n)))
}

/// `z^_omega = sum_h e(-omega h) t_z^h`.
pub fn zhat<S: Scalar>(omega: Fe) -> AlgebraElement<S> {
    let f = omega.field();
    sum_over(f, f.elements(), |h| JacobiElement::from_heisenberg(HeisenbergElement::tz(h)), |h| char_fe(-(omega * h)))
}

/// `x^_q = sum_h e(-q h) t_x^h`.
pub fn xhat<S: Scalar>(q: Fe) -> AlgebraElement<S> {
    let f = q.field();
    sum_over(f, f.elements(), |h| JacobiElement::from_heisenberg(HeisenbergElement::tx(h)), |h| char_fe(-(q * h)))
}

/// `s^_- = sum_{m != 0} leg(m) t_s^m`.
pub fn s_minus<S: Scalar>(field: PrimeField) -> AlgebraElement<S> {
    sum_over(
        field,
        field.nonzero(),
        |m| JacobiElement::from_sl2(Sl2::ts(m).expect("nonzero")),
        |m| S::from_int(m.legendre() as i64),
    )
}

pub fn u_zero<S: Scalar>(field: PrimeField) -> AlgebraElement<S> {
    sum_over(field, field.elements(), |k| JacobiElement::from_sl2(Sl2::tu(k)), |_| S::one())
}

pub fn d_zero<S: Scalar>(field: PrimeField) -> AlgebraElement<S> {
    sum_over(field, field.elements(), |k| JacobiElement::from_sl2(Sl2::td(k)), |_| S::one())
}

/// `alpha = 1 / (leg(omega) G(1, N))`.
pub fn alpha<S: Scalar>(omega: Fe) -> Result<S> {
    let g = gauss_sum::<S>(omega.field().one())? * S::from_int(omega.legendre() as i64);
    g.inv().ok_or(Error::DegenerateGaussSum)
}

/// `1 + alpha J`.
pub fn one_plus_alpha_j<S: Scalar>(omega: Fe) -> Result<AlgebraElement<S>> {
    let f = omega.field();
    Ok(AlgebraElement::from_terms(
        f,
        [
            (JacobiElement::identity(f), S::one()),
            (JacobiElement::from_sl2(Sl2::j(f)), alpha(omega)?),
        ],
    ))
}

fn guard(field: PrimeField) -> Result<()> {
    if field.modulus() > MAX_ORACLE_N {
        return Err(Error::OracleTooLarge(field.modulus(), MAX_ORACLE_N));
    }
    Ok(())
}

/// `I = y^_0 z^_omega s^_- u^_0 x^_0 (1 + alpha J) d^_0`, multiplied out.
pub fn build_ideal<S: Scalar>(omega: Fe) -> Result<AlgebraElement<S>> {
    let f = omega.field();
    guard(f)?;
    if omega.is_zero() {
        return Err(Error::ZeroOmega);
    }
    let factors = [
        zhat(omega),
        s_minus(f),
        u_zero(f),
        xhat(f.zero()),
        one_plus_alpha_j(omega)?,
        d_zero(f),
    ];
    factors
        .iter()
        .try_fold(yhat(f.zero()), |acc, x| ga_mul(&acc, x))
}

/// The basis `{t_x^k I}` together with a dense view for coefficient solving.
#[derive(Debug, Clone)]
pub struct IdealBasis<S> {
    pub omega: Fe,
    pub ideal: AlgebraElement<S>,
    pub basis: Vec<AlgebraElement<S>>,
    keys: Vec<JacobiElement>,
    key_index: HashMap<JacobiElement, usize>,
    gram: Matrix<S>,
    dense: Matrix<S>,
}

impl<S: Scalar> IdealBasis<S> {
    pub fn new(omega: Fe) -> Result<Self> {
        let ideal = build_ideal::<S>(omega)?;
        Self::from_ideal(omega, ideal)
    }

    pub fn from_ideal(omega: Fe, ideal: AlgebraElement<S>) -> Result<Self> {
        let f = omega.field();
        let basis: Vec<_> = f
            .elements()
            .map(|k| ideal.left_translate(&JacobiElement::from_heisenberg(HeisenbergElement::tx(k))))
            .collect();
        let mut keys: Vec<JacobiElement> = basis
            .iter()
            .flat_map(|b| b.support().copied())
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        keys.sort();
        let key_index = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let dense = Matrix::from_fn(keys.len(), basis.len(), |i, j| basis[j].coeff(&keys[i]));
        let gram = dense.adjoint().matmul(&dense);
        Ok(Self {
            omega,
            ideal,
            basis,
            keys,
            key_index,
            gram,
            dense,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn rank(&self) -> usize {
        crate::matrix::rank(&self.dense)
    }

    /// Coefficients of `a` in the basis and the residual of the reconstruction.
    ///
    /// Solves the normal equations `B^dagger B c = B^dagger v`, then measures
    /// `|B c - v|` on the basis support plus any mass of `a` outside it.
    pub fn coefficients(&self, a: &AlgebraElement<S>) -> Result<(Vec<S>, f64)> {
        let mut v = vec![S::zero(); self.keys.len()];
        let mut outside = 0.0f64;
        for (x, c) in a.terms() {
            match self.key_index.get(x) {
                Some(&i) => v[i] = c.clone(),
                None => outside = outside.max(c.to_complex().norm()),
            }
        }
        let rhs = self.dense.adjoint().apply(&v);
        let c = solve_columns(&self.gram, &rhs)
            .ok_or_else(|| Error::BasisExpansion("basis vectors are dependent".into()))?;
        let recon = self.dense.apply(&c);
        let inside = recon
            .iter()
            .zip(&v)
            .map(|(x, y)| x.residual(y))
            .fold(0.0, f64::max);
        Ok((c, inside.max(outside)))
    }

    /// Matrix of `A -> act(A)` on the span, columns indexed by `k`.
    pub fn operator_matrix(
        &self,
        act: impl Fn(&AlgebraElement<S>) -> Result<AlgebraElement<S>>,
    ) -> Result<(Matrix<S>, f64)> {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        let mut worst = 0.0f64;
        for (k, b) in self.basis.iter().enumerate() {
            let (c, r) = self.coefficients(&act(b)?)?;
            worst = worst.max(r);
            for (l, v) in c.into_iter().enumerate() {
                m[(l, k)] = v;
            }
        }
        Ok((m, worst))
    }

    pub fn element_matrix(&self, g: &JacobiElement) -> Result<(Matrix<S>, f64)> {
        self.operator_matrix(|b| Ok(b.left_translate(g)))
    }
}

/// What the oracle acts with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleToken {
    Sl2(Generator),
    Heisenberg(HeisenbergElement),
}

impl OracleToken {
    pub fn element(&self, field: PrimeField) -> Result<JacobiElement> {
        match self {
            OracleToken::Sl2(g) => Ok(JacobiElement::from_sl2(g.matrix(field)?)),
            OracleToken::Heisenberg(h) => Ok(JacobiElement::from_heisenberg(*h)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            OracleToken::Sl2(g) => g.label(),
            OracleToken::Heisenberg(h) => {
                let (r, s, t) = h.rst();
                format!("t_x^{r} t_y^{s} t_z^{t}")
            }
        }
    }

    pub fn expected<S: Scalar>(&self, omega: Fe) -> Result<Matrix<S>> {
        match self {
            OracleToken::Sl2(g) => weil_generator(*g, omega),
            OracleToken::Heisenberg(h) => schrodinger_matrix(h, omega),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ActionCheck {
    pub token: String,
    /// Failure of `tok . t_x^k I` to lie in the span.
    pub solve_residual: f64,
    /// Distance between the oracle matrix and the closed-form matrix.
    pub matrix_residual: f64,
}

impl ActionCheck {
    pub fn residual(&self) -> f64 {
        self.solve_residual.max(self.matrix_residual)
    }
}

pub fn verify_generator_action<S: Scalar>(basis: &IdealBasis<S>, tok: OracleToken) -> Result<ActionCheck> {
    let x = tok.element(basis.omega.field())?;
    let (m, solve_residual) = basis.element_matrix(&x)?;
    let want = tok.expected::<S>(basis.omega)?;
    Ok(ActionCheck {
        token: tok.label(),
        solve_residual,
        matrix_residual: m.max_residual(&want),
    })
}

/// Oracle matrix of an arbitrary group element against `U(h) W(g)`.
pub fn verify_element_action<S: Scalar>(basis: &IdealBasis<S>, x: &JacobiElement) -> Result<ActionCheck> {
    let (m, solve_residual) = basis.element_matrix(x)?;
    let want = schrodinger_matrix::<S>(&x.h, basis.omega)?.matmul(&weil::<S>(&x.g, basis.omega)?.matrix);
    Ok(ActionCheck {
        token: format!("{:?} {:?}", x.h.rst(), x.g),
        solve_residual,
        matrix_residual: m.max_residual(&want),
    })
}

/// `(1/N) sum_{k,n} e(k omega n) t_y^n t_x^k` acting on the span, against `leg(-1) W(J^2)`.
pub fn parity_check<S: Scalar>(basis: &IdealBasis<S>) -> Result<ActionCheck> {
    let omega = basis.omega;
    let f = omega.field();
    let inv_n = S::from_ratio(1, f.modulus() as i64);
    let mut terms = Vec::new();
    for k in f.elements() {
        for n in f.elements() {
            let x = JacobiElement::from_heisenberg(HeisenbergElement::ty(n))
                .mul(&JacobiElement::from_heisenberg(HeisenbergElement::tx(k)));
            terms.push((x, inv_n.mul_ref(&char_fe(k * omega * n))));
        }
    }
    let p = AlgebraElement::from_terms(f, terms);
    let (m, solve_residual) = basis.operator_matrix(|b| ga_mul(&p, b))?;
    let j2 = weil::<S>(&Sl2::j(f).pow(2), omega)?.matrix;
    let want = j2.scale(&S::from_int(f.legendre(-1) as i64));
    Ok(ActionCheck {
        token: "parity".into(),
        solve_residual,
        matrix_residual: m.max_residual(&want),
    })
}

/// Simple eigenrelations of `I` under left multiplication.
#[derive(Debug, Clone, Serialize)]
pub struct IdealChecks {
    pub support: usize,
    pub rank: usize,
    /// `max |t_y^s I - I|`.
    pub ty_absorbed: f64,
    /// `max |t_z^t I - e(omega t) I|`.
    pub tz_eigen: f64,
    /// `max |t_s^a I - leg(a) I|`.
    pub ts_eigen: f64,
}

pub fn ideal_checks<S: Scalar>(basis: &IdealBasis<S>) -> IdealChecks {
    let omega = basis.omega;
    let f = omega.field();
    let i = &basis.ideal;
    let mut ty: f64 = 0.0;
    let mut tz: f64 = 0.0;
    let mut ts: f64 = 0.0;
    for s in f.elements() {
        let y = i.left_translate(&JacobiElement::from_heisenberg(HeisenbergElement::ty(s)));
        ty = ty.max(y.max_residual(i));
        let z = i.left_translate(&JacobiElement::from_heisenberg(HeisenbergElement::tz(s)));
        tz = tz.max(z.max_residual(&i.scale(&char_fe(omega * s))));
        if !s.is_zero() {
            let a = i.left_translate(&JacobiElement::from_sl2(Sl2::ts(s).expect("nonzero")));
            ts = ts.max(a.max_residual(&i.scale(&S::from_int(s.legendre() as i64))));
        }
    }
    IdealChecks {
        support: i.support_len(),
        rank: basis.rank(),
        ty_absorbed: ty,
        tz_eigen: tz,
        ts_eigen: ts,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub n: u32,
    pub omega: u32,
    pub backend: Backend,
    pub seed: u64,
    pub ideal: IdealChecks,
    pub actions: Vec<ActionCheck>,
    pub parity: ActionCheck,
    /// Worst residual over the random-element span closure test.
    pub span_closure: f64,
    pub doubled: doubled::DoubledReport,
}

impl OracleReport {
    /// Worst residual over every asserted check.
    pub fn worst(&self) -> f64 {
        let ideal = self
            .ideal
            .ty_absorbed
            .max(self.ideal.tz_eigen)
            .max(self.ideal.ts_eigen);
        self.actions
            .iter()
            .map(ActionCheck::residual)
            .fold(ideal, f64::max)
            .max(self.parity.residual())
            .max(self.span_closure)
            .max(self.doubled.worst_asserted())
    }

    pub fn rank_ok(&self) -> bool {
        self.ideal.rank == self.n as usize
    }
}

/// Every generator token the oracle checks by default.
pub fn default_tokens<R: Rng + ?Sized>(field: PrimeField, rng: &mut R, heisenberg_samples: usize) -> Vec<OracleToken> {
    let mut toks = vec![OracleToken::Sl2(Generator::J), OracleToken::Sl2(Generator::JInv)];
    for x in field.elements() {
        toks.push(OracleToken::Sl2(Generator::Tu(x)));
        toks.push(OracleToken::Sl2(Generator::Td(x)));
        if !x.is_zero() {
            toks.push(OracleToken::Sl2(Generator::Ts(x)));
        }
    }
    toks.push(OracleToken::Heisenberg(HeisenbergElement::tx(field.one())));
    toks.push(OracleToken::Heisenberg(HeisenbergElement::ty(field.one())));
    toks.push(OracleToken::Heisenberg(HeisenbergElement::tz(field.one())));
    for _ in 0..heisenberg_samples {
        toks.push(OracleToken::Heisenberg(HeisenbergElement::random(field, rng)));
    }
    toks
}

/// Full oracle run: ideal, generator actions, parity, span closure, doubled algebra.
pub fn run_oracle<S: Scalar>(omega: Fe, seed: u64, random_elements: usize) -> Result<OracleReport> {
    use rand::SeedableRng;
    let field = omega.field();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let basis = IdealBasis::<S>::new(omega)?;
    let ideal = ideal_checks(&basis);
    let actions = default_tokens(field, &mut rng, 5)
        .into_iter()
        .map(|t| verify_generator_action(&basis, t))
        .collect::<Result<Vec<_>>>()?;
    let parity = parity_check(&basis)?;
    let mut span_closure: f64 = 0.0;
    for _ in 0..random_elements {
        let x = JacobiElement::random(field, &mut rng);
        span_closure = span_closure.max(verify_element_action(&basis, &x)?.residual());
    }
    let doubled = doubled::doubled_checks::<S>(omega)?;
    Ok(OracleReport {
        n: field.modulus(),
        omega: omega.value(),
        backend: S::BACKEND,
        seed,
        ideal,
        actions,
        parity,
        span_closure,
        doubled,
    })
}
