//! The Weil representation of SL(2, F_N) on `C^N`.
//!
//! Generator actions on `f = sum_k f(k) t_x^k I`:
//!
//! * `t_s^a`: `f(k) -> leg(a) f(ak)`
//! * `t_u^b`: `f(k) -> e(b k^2 omega) f(k)`
//! * `J`: `f(l) -> (leg(omega) G(1,N) / N) sum_k e(2 omega k l) f(k)`
//! * `t_d^c`: multiplies `f~(q)` by `e(-c q^2 / (4 omega))`
//!
//! Arbitrary elements go through [`crate::sl2::decompose`].

use crate::error::{Error, Result};
use crate::field::{Fe, PrimeField};
use crate::heisenberg::{schrodinger_matrix, sl2_automorphism, HeisenbergElement};
use crate::matrix::Matrix;
use crate::scalar::{char_fe, gauss_sum, Scalar};
use crate::sl2::{decompose, Generator, GeneratorWord, Sl2};

/// Weil image of a group element.
#[derive(Debug, Clone, PartialEq)]
pub struct WeilOperator<S> {
    pub source: Sl2,
    pub omega: Fe,
    pub matrix: Matrix<S>,
}

fn check_omega(omega: Fe) -> Result<()> {
    if omega.is_zero() {
        Err(Error::ZeroOmega)
    } else {
        Ok(())
    }
}

/// `(leg(omega) G(1, N) / N) e(2 omega k l)` at row `l`, column `k`.
fn weil_j<S: Scalar>(omega: Fe) -> Result<Matrix<S>> {
    let field = omega.field();
    let n = field.modulus() as usize;
    let pref = gauss_sum::<S>(field.one())?
        * S::from_ratio(omega.legendre() as i64, field.modulus() as i64);
    let two = field.elem(2);
    Ok(Matrix::from_fn(n, n, |l, k| {
        pref.mul_ref(&char_fe(two * omega * field.elem(k as i64) * field.elem(l as i64)))
    }))
}

/// Fourier multiplier form of `t_d^c`.
pub fn weil_td_direct<S: Scalar>(c: Fe, omega: Fe) -> Result<Matrix<S>> {
    check_omega(omega)?;
    let field = omega.field();
    let n = field.modulus() as usize;
    let inv4w = (field.elem(4) * omega).inv()?;
    let inv_n = S::from_ratio(1, n as i64);
    let fwd = Matrix::from_fn(n, n, |q, k| {
        inv_n.mul_ref(&char_fe(field.elem((q * k) as i64)))
    });
    let back = Matrix::from_fn(n, n, |k, q| char_fe(-field.elem((q * k) as i64)));
    let phases = Matrix::diagonal(
        field
            .elements()
            .map(|q| char_fe(-(c * q * q * inv4w)))
            .collect(),
    );
    Ok(back.matmul(&phases).matmul(&fwd))
}

/// `W(J) W(t_u^-c) W(t_s^-1) W(J)`.
pub fn weil_td_composed<S: Scalar>(c: Fe, omega: Fe) -> Result<Matrix<S>> {
    let field = omega.field();
    let j = weil_generator::<S>(Generator::J, omega)?;
    let u = weil_generator::<S>(Generator::Tu(-c), omega)?;
    let s = weil_generator::<S>(Generator::Ts(-field.one()), omega)?;
    Ok(j.matmul(&u).matmul(&s).matmul(&j))
}

pub fn weil_generator<S: Scalar>(tok: Generator, omega: Fe) -> Result<Matrix<S>> {
    check_omega(omega)?;
    let field = omega.field();
    let n = field.modulus() as usize;
    match tok {
        Generator::Ts(a) => {
            a.inv()?;
            let sign = S::from_int(a.legendre() as i64);
            let mut m = Matrix::zeros(n, n);
            for k in field.elements() {
                m[(k.value() as usize, (a * k).value() as usize)] = sign.clone();
            }
            Ok(m)
        }
        Generator::Tu(b) => Ok(Matrix::diagonal(
            field.elements().map(|k| char_fe(b * k * k * omega)).collect(),
        )),
        Generator::J => weil_j(omega),
        Generator::JInv => Ok(weil_j::<S>(omega)?.adjoint()),
        Generator::Td(c) => weil_td_direct(c, omega),
    }
}

pub fn weil_word<S: Scalar>(word: &GeneratorWord, omega: Fe) -> Result<Matrix<S>> {
    let n = omega.modulus() as usize;
    word.0.iter().try_fold(Matrix::identity(n), |acc, tok| {
        Ok(acc.matmul(&weil_generator(*tok, omega)?))
    })
}

pub fn weil<S: Scalar>(g: &Sl2, omega: Fe) -> Result<WeilOperator<S>> {
    g.a().same_field(&omega)?;
    Ok(WeilOperator {
        source: *g,
        omega,
        matrix: weil_word(&decompose(g), omega)?,
    })
}

/// `||W(g) U(h) W(g)^-1 - U(phi_g(h))||_inf`.
pub fn intertwine_check<S: Scalar>(g: &Sl2, h: &HeisenbergElement, omega: Fe) -> Result<f64> {
    let w = weil::<S>(g, omega)?.matrix;
    let u = schrodinger_matrix::<S>(h, omega)?;
    let lhs = w.matmul(&u).matmul(&w.adjoint());
    let rhs = schrodinger_matrix::<S>(&sl2_automorphism(g, h), omega)?;
    Ok(lhs.max_residual(&rhs))
}

/// `P = (1/N) sum_k y^_{-k omega} t_x^k` in the Schrodinger representation.
///
/// Acts as `f(k) -> f(-k)`, which is `leg(-1) W(J^2)`.
pub fn parity_operator<S: Scalar>(omega: Fe) -> Result<Matrix<S>> {
    check_omega(omega)?;
    let field: PrimeField = omega.field();
    let n = field.modulus() as usize;
    let mut p = Matrix::zeros(n, n);
    for k in field.elements() {
        let shift = schrodinger_matrix::<S>(&HeisenbergElement::tx(k), omega)?;
        for m in field.elements() {
            let y = schrodinger_matrix::<S>(&HeisenbergElement::ty(m), omega)?;
            let term = y.matmul(&shift).scale(&char_fe(k * omega * m));
            p = p.add(&term);
        }
    }
    Ok(p.scale(&S::from_ratio(1, n as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gauss_closed_form, Cyclotomic};
    use crate::sl2::alternative_word;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fl(n: u64) -> PrimeField {
        PrimeField::new(n).unwrap()
    }

    #[test]
    fn generator_examples() {
        let f = fl(3);
        let w = f.one();
        let ts1 = weil_generator::<Cyclotomic>(Generator::Ts(f.one()), w).unwrap();
        assert_eq!(ts1, Matrix::identity(3));
        let j = weil_generator::<Complex64>(Generator::J, w).unwrap();
        let out = j.apply(&[Complex64::new(1.0, 0.0); 3]);
        let want = gauss_closed_form(f);
        assert!((out[0] - want).norm() < 1e-12);
        assert!(out[1].norm() < 1e-12 && out[2].norm() < 1e-12);
        let f5 = fl(5);
        for b in f5.elements() {
            let u = weil_generator::<Cyclotomic>(Generator::Tu(b), f5.elem(2)).unwrap();
            for k0 in f5.elements() {
                let mut d = vec![Cyclotomic::zero(); 5];
                d[k0.value() as usize] = Cyclotomic::one();
                let out = u.apply(&d);
                assert_eq!(out[k0.value() as usize], char_fe(b * k0 * k0 * f5.elem(2)));
            }
        }
        assert_eq!(
            weil_generator::<Complex64>(Generator::J, f.zero()),
            Err(Error::ZeroOmega)
        );
    }

    #[test]
    fn weil_of_j_and_parity() {
        for n in [3u64, 5, 7] {
            let f = fl(n);
            for w in f.nonzero() {
                let j = weil::<Cyclotomic>(&Sl2::j(f), w).unwrap().matrix;
                assert_eq!(j.pow(4), Matrix::identity(n as usize));
                assert_eq!(
                    weil::<Cyclotomic>(&Sl2::identity(f), w).unwrap().matrix,
                    Matrix::identity(n as usize)
                );
                let j2 = weil::<Cyclotomic>(&Sl2::j(f).pow(2), w).unwrap().matrix;
                let sign = Cyclotomic::from_int(f.legendre(-1) as i64);
                for k in f.elements() {
                    for l in f.elements() {
                        let want = if l == -k { sign.clone() } else { Cyclotomic::zero() };
                        assert_eq!(j2[(k.value() as usize, l.value() as usize)], want);
                    }
                }
                let p = parity_operator::<Cyclotomic>(w).unwrap();
                assert_eq!(p, j2.scale(&sign));
                assert_eq!(p.matmul(&p), Matrix::identity(n as usize));
                for r in f.elements() {
                    for s in f.elements() {
                        let u = schrodinger_matrix::<Cyclotomic>(
                            &HeisenbergElement::from_rst(r, s, f.zero()),
                            w,
                        )
                        .unwrap();
                        let um = schrodinger_matrix::<Cyclotomic>(
                            &HeisenbergElement::from_rst(-r, -s, f.zero()),
                            w,
                        )
                        .unwrap();
                        assert_eq!(p.matmul(&u), um.matmul(&p));
                    }
                }
            }
        }
    }

    #[test]
    fn homomorphism_float() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in [3u64, 5, 7, 11] {
            let f = fl(n);
            for _ in 0..60 {
                let w = f.elem(1 + (rand::Rng::random_range(&mut rng, 0..n as i64 - 1)));
                let g1 = Sl2::random(f, &mut rng);
                let g2 = Sl2::random(f, &mut rng);
                let a = weil::<Complex64>(&g1, w).unwrap().matrix;
                let b = weil::<Complex64>(&g2, w).unwrap().matrix;
                let ab = weil::<Complex64>(&g1.mul(&g2), w).unwrap().matrix;
                assert!(a.matmul(&b).max_residual(&ab) < 1e-9, "N = {n}");
                assert!(a.unitarity_residual() < 1e-10);
                let alt = weil_word::<Complex64>(&alternative_word(&g1), w).unwrap();
                assert!(alt.max_residual(&a) < 1e-10);
            }
        }
    }

    #[test]
    fn homomorphism_exact_on_all_of_sl2() {
        let f = fl(3);
        let all = crate::sl2::enumerate(f).unwrap();
        for w in f.nonzero() {
            let mats: Vec<_> = all
                .iter()
                .map(|g| weil::<Cyclotomic>(g, w).unwrap().matrix)
                .collect();
            for (i, g1) in all.iter().enumerate() {
                for (j, g2) in all.iter().enumerate().step_by(5) {
                    let k = all.iter().position(|g| *g == g1.mul(g2)).unwrap();
                    assert_eq!(mats[i].matmul(&mats[j]), mats[k]);
                }
            }
        }
    }

    #[test]
    fn td_direct_matches_composed() {
        for n in [3u64, 5, 7, 11] {
            let f = fl(n);
            for w in [f.one(), f.elem(2)] {
                for c in f.elements() {
                    let d = weil_td_direct::<Complex64>(c, w).unwrap();
                    let e = weil_td_composed::<Complex64>(c, w).unwrap();
                    let g = weil::<Complex64>(&Sl2::td(c), w).unwrap().matrix;
                    assert!(d.max_residual(&e) < 1e-10);
                    assert!(d.max_residual(&g) < 1e-10);
                }
            }
        }
        let f = fl(5);
        for c in f.elements() {
            assert_eq!(
                weil_td_direct::<Cyclotomic>(c, f.elem(3)).unwrap(),
                weil_td_composed::<Cyclotomic>(c, f.elem(3)).unwrap()
            );
        }
    }

    #[test]
    fn generators_are_unitary() {
        for n in [3u64, 5, 7, 11, 13] {
            let f = fl(n);
            let w = f.elem(2);
            let mut toks = vec![Generator::J, Generator::JInv];
            for x in f.elements() {
                toks.push(Generator::Tu(x));
                toks.push(Generator::Td(x));
                if !x.is_zero() {
                    toks.push(Generator::Ts(x));
                }
            }
            for t in toks {
                let m = weil_generator::<Complex64>(t, w).unwrap();
                assert!(m.unitarity_residual() < 1e-10, "{t:?}");
            }
        }
    }

    #[test]
    fn intertwining() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for n in [3u64, 5, 7] {
            let f = fl(n);
            let w = f.elem(2);
            assert_eq!(
                intertwine_check::<Complex64>(
                    &Sl2::identity(f),
                    &HeisenbergElement::tx(f.one()),
                    w
                )
                .unwrap(),
                0.0
            );
            for _ in 0..70 {
                let g = Sl2::random(f, &mut rng);
                let h = HeisenbergElement::random(f, &mut rng);
                assert!(intertwine_check::<Complex64>(&g, &h, w).unwrap() < 1e-9);
            }
            let g = Sl2::random(f, &mut rng);
            let h = HeisenbergElement::random(f, &mut rng);
            assert_eq!(intertwine_check::<Cyclotomic>(&g, &h, w).unwrap(), 0.0);
        }
    }
}
