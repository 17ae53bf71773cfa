//! SL(2, F_N), its generators `J, t_s^a, t_u^b, t_d^c`, and generator words.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Fe, PrimeField};

/// `[[a, b], [c, d]]` with `ad - bc = 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sl2 {
    a: Fe,
    b: Fe,
    c: Fe,
    d: Fe,
}

impl fmt::Debug for Sl2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]] mod {}",
            self.a,
            self.b,
            self.c,
            self.d,
            self.a.modulus()
        )
    }
}

impl Sl2 {
    pub fn new(a: Fe, b: Fe, c: Fe, d: Fe) -> Result<Self> {
        a.same_field(&b)?;
        a.same_field(&c)?;
        a.same_field(&d)?;
        let det = a * d - b * c;
        if det.value() != 1 {
            return Err(Error::NotSpecialLinear(det.value()));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn from_ints(field: PrimeField, a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(field.elem(a), field.elem(b), field.elem(c), field.elem(d))
    }

    pub fn identity(field: PrimeField) -> Self {
        Self {
            a: field.one(),
            b: field.zero(),
            c: field.zero(),
            d: field.one(),
        }
    }

    pub fn j(field: PrimeField) -> Self {
        Self {
            a: field.zero(),
            b: field.one(),
            c: -field.one(),
            d: field.zero(),
        }
    }

    /// `diag(a, 1/a)`.
    pub fn ts(a: Fe) -> Result<Self> {
        let ai = a.inv()?;
        let f = a.field();
        Ok(Self {
            a,
            b: f.zero(),
            c: f.zero(),
            d: ai,
        })
    }

    /// `[[1, b], [0, 1]]`.
    pub fn tu(b: Fe) -> Self {
        let f = b.field();
        Self {
            a: f.one(),
            b,
            c: f.zero(),
            d: f.one(),
        }
    }

    /// `[[1, 0], [c, 1]]`.
    pub fn td(c: Fe) -> Self {
        let f = c.field();
        Self {
            a: f.one(),
            b: f.zero(),
            c,
            d: f.one(),
        }
    }

    pub fn a(&self) -> Fe {
        self.a
    }
    pub fn b(&self) -> Fe {
        self.b
    }
    pub fn c(&self) -> Fe {
        self.c
    }
    pub fn d(&self) -> Fe {
        self.d
    }

    pub fn entries(&self) -> [[Fe; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn field(&self) -> PrimeField {
        self.a.field()
    }

    pub fn mul(&self, rhs: &Sl2) -> Sl2 {
        Sl2 {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn inverse(&self) -> Sl2 {
        Sl2 {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn transpose(&self) -> Sl2 {
        Sl2 {
            a: self.a,
            b: self.c,
            c: self.b,
            d: self.d,
        }
    }

    pub fn pow(&self, e: i64) -> Sl2 {
        let mut base = if e < 0 { self.inverse() } else { *self };
        let mut acc = Sl2::identity(self.field());
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        *self == Sl2::identity(self.field())
    }

    /// Multiplicative order by repeated multiplication.
    pub fn order(&self) -> u64 {
        let mut x = *self;
        let mut k = 1;
        while !x.is_identity() {
            x = x.mul(self);
            k += 1;
        }
        k
    }

    /// Uniform sample by rejection on the determinant.
    pub fn random<R: Rng + ?Sized>(field: PrimeField, rng: &mut R) -> Sl2 {
        let n = field.modulus() as i64;
        loop {
            let mut e = || field.elem(rng.random_range(0..n));
            if let Ok(g) = Sl2::new(e(), e(), e(), e()) {
                return g;
            }
        }
    }
}

impl std::ops::Mul for Sl2 {
    type Output = Sl2;
    fn mul(self, rhs: Sl2) -> Sl2 {
        Sl2::mul(&self, &rhs)
    }
}

/// One letter of a generator word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Generator {
    J,
    JInv,
    Ts(Fe),
    Tu(Fe),
    Td(Fe),
}

impl Generator {
    pub fn matrix(&self, field: PrimeField) -> Result<Sl2> {
        match *self {
            Generator::J => Ok(Sl2::j(field)),
            Generator::JInv => Ok(Sl2::j(field).inverse()),
            Generator::Ts(a) => Sl2::ts(a),
            Generator::Tu(b) => Ok(Sl2::tu(b)),
            Generator::Td(c) => Ok(Sl2::td(c)),
        }
    }

    /// Short label such as `t_s^2`.
    pub fn label(&self) -> String {
        match self {
            Generator::J => "J".into(),
            Generator::JInv => "J^-1".into(),
            Generator::Ts(a) => format!("t_s^{a}"),
            Generator::Tu(b) => format!("t_u^{b}"),
            Generator::Td(c) => format!("t_d^{c}"),
        }
    }
}

/// Ordered product of generators, leftmost first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorWord(pub Vec<Generator>);

impl GeneratorWord {
    pub fn evaluate(&self, field: PrimeField) -> Result<Sl2> {
        self.0
            .iter()
            .try_fold(Sl2::identity(field), |acc, g| Ok(acc.mul(&g.matrix(field)?)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Generator::label).collect();
        f.write_str(&parts.join(" "))
    }
}

/// `c = 0`: `t_s^a t_u^(b/a)`; otherwise `t_u^(a/c) J t_s^(-c) t_u^(d/c)`.
pub fn decompose(g: &Sl2) -> GeneratorWord {
    let (a, b, c, d) = (g.a, g.b, g.c, g.d);
    if c.is_zero() {
        GeneratorWord(vec![Generator::Ts(a), Generator::Tu(b / a)])
    } else {
        GeneratorWord(vec![
            Generator::Tu(a / c),
            Generator::J,
            Generator::Ts(-c),
            Generator::Tu(d / c),
        ])
    }
}

/// A second word for `g`, `J^-1 . decompose(J g)`, sharing no prefix with [`decompose`].
pub fn alternative_word(g: &Sl2) -> GeneratorWord {
    let jg = Sl2::j(g.field()).mul(g);
    let mut w = vec![Generator::JInv];
    w.extend(decompose(&jg).0);
    GeneratorWord(w)
}

/// `|SL(2, F_N)| = N (N^2 - 1)`.
pub fn group_order(n: u32) -> u64 {
    let n = n as u64;
    n * (n * n - 1)
}

/// Every element of SL(2, F_N); refuses `N > 13`.
pub fn enumerate(field: PrimeField) -> Result<Vec<Sl2>> {
    if field.modulus() > 13 {
        return Err(Error::OrderTooLarge(field.modulus() as usize, 13));
    }
    let mut out = Vec::with_capacity(group_order(field.modulus()) as usize);
    for a in field.elements() {
        for b in field.elements() {
            for c in field.elements() {
                for d in field.elements() {
                    if let Ok(g) = Sl2::new(a, b, c, d) {
                        out.push(g);
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn fl(n: u64) -> PrimeField {
        PrimeField::new(n).unwrap()
    }

    #[test]
    fn rejects_non_unimodular() {
        let f = fl(5);
        assert_eq!(
            Sl2::from_ints(f, 1, 1, 1, 1),
            Err(Error::NotSpecialLinear(0))
        );
        assert!(Sl2::ts(f.zero()).is_err());
    }

    #[test]
    fn generator_relations() {
        for n in [3u64, 5, 7, 11, 13] {
            let f = fl(n);
            let j = Sl2::j(f);
            assert!(j.pow(4).is_identity());
            assert_eq!(j.pow(2), Sl2::ts(f.elem(-1)).unwrap());
            for x in f.elements() {
                assert_eq!(Sl2::tu(x), j.mul(&Sl2::td(-x)).mul(&j.inverse()));
                for y in f.elements() {
                    assert_eq!(Sl2::td(x).mul(&Sl2::td(y)), Sl2::td(x + y));
                }
            }
            for a in f.nonzero() {
                let ta = Sl2::ts(a).unwrap();
                for a2 in f.nonzero() {
                    assert_eq!(ta.mul(&Sl2::ts(a2).unwrap()), Sl2::ts(a * a2).unwrap());
                }
                for c in f.elements() {
                    assert_eq!(ta.mul(&Sl2::td(c)), Sl2::td(c / (a * a)).mul(&ta));
                    assert_eq!(ta.mul(&Sl2::tu(c)), Sl2::tu(c * a * a).mul(&ta));
                }
                assert_eq!(j.mul(&ta), Sl2::ts(a.inv().unwrap()).unwrap().mul(&j));
            }
            let ji = j.inverse();
            for c in f.nonzero() {
                let ci = c.inv().unwrap();
                let rhs = Sl2::ts(c)
                    .unwrap()
                    .mul(&Sl2::td(-c))
                    .mul(&ji)
                    .mul(&Sl2::td(-ci))
                    .mul(&j);
                assert_eq!(j.mul(&Sl2::td(c)), rhs);
                let rhs = Sl2::ts(ci)
                    .unwrap()
                    .mul(&Sl2::tu(-c))
                    .mul(&ji)
                    .mul(&Sl2::tu(-ci))
                    .mul(&ji);
                assert_eq!(j.mul(&Sl2::tu(c)), rhs);
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let f = fl(7);
        let g = Sl2::tu(f.elem(3));
        let w = decompose(&g);
        assert_eq!(w.0, vec![Generator::Ts(f.one()), Generator::Tu(f.elem(3))]);
        assert_eq!(w.evaluate(f).unwrap(), g);
        let w = decompose(&Sl2::j(f));
        assert_eq!(
            w.0,
            vec![
                Generator::Tu(f.zero()),
                Generator::J,
                Generator::Ts(f.one()),
                Generator::Tu(f.zero())
            ]
        );
        assert_eq!(w.evaluate(f).unwrap(), Sl2::j(f));
    }

    #[test]
    fn decompose_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in [3u64, 5, 7, 11] {
            let f = fl(n);
            for _ in 0..500 {
                let g = Sl2::random(f, &mut rng);
                assert_eq!(decompose(&g).evaluate(f).unwrap(), g);
                assert_eq!(alternative_word(&g).evaluate(f).unwrap(), g);
            }
        }
        for g in enumerate(fl(5)).unwrap() {
            assert_eq!(decompose(&g).evaluate(fl(5)).unwrap(), g);
        }
    }

    #[test]
    fn group_orders() {
        assert_eq!(group_order(3), 24);
        assert_eq!(group_order(5), 120);
        for n in [3u64, 5, 7] {
            let all = enumerate(fl(n)).unwrap();
            let distinct: HashSet<_> = all.iter().collect();
            assert_eq!(distinct.len() as u64, group_order(n as u32));
        }
        assert!(enumerate(fl(17)).is_err());
    }
}
