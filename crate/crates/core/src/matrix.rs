//! Dense matrices over a [`Scalar`] backend.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(entries: Vec<S>) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in entries.into_iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn matmul(&self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out: Matrix<S> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_negligible() && S::BACKEND == crate::scalar::Backend::Exact {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs.data[k * rhs.cols + j];
                    let p = a.mul_ref(b);
                    out.data[i * rhs.cols + j].add_assign_ref(&p);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "apply shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (j, x) in v.iter().enumerate() {
                    acc.add_assign_ref(&self.data[i * self.cols + j].mul_ref(x));
                }
                acc
            })
            .collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix<S> {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Matrix<S> {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, c: &S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| c.mul_ref(x)).collect(),
        }
    }

    pub fn add(&self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix<S>) -> Matrix<S> {
        self.add(&rhs.scale(&-S::one()))
    }

    pub fn pow(&self, mut e: u64) -> Matrix<S> {
        assert!(self.is_square());
        let mut acc = Matrix::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.matmul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base);
            }
        }
        acc
    }

    /// Largest entrywise `|a - b|`; exactly `0.0` when the exact backend finds them equal.
    pub fn max_residual(&self, rhs: &Matrix<S>) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.residual(b))
            .fold(0.0, f64::max)
    }

    /// `||A^dagger A - I||_inf` (entrywise max).
    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .max_residual(&Matrix::identity(self.cols))
    }

    pub fn to_complex(&self) -> Matrix<Complex64> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Scalar::to_complex).collect(),
        }
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }
}

/// Gaussian elimination with largest-modulus pivoting.
///
/// Returns the reduced row echelon form together with the pivot columns.
/// Entries that are negligible for the backend count as zero.
pub fn row_reduce<S: Scalar>(m: &Matrix<S>) -> (Matrix<S>, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let best = (row..a.rows)
            .filter(|&i| !a[(i, col)].is_negligible())
            .max_by(|&i, &j| {
                let (x, y) = (a[(i, col)].to_complex().norm(), a[(j, col)].to_complex().norm());
                x.total_cmp(&y)
            });
        let Some(p) = best else { continue };
        for j in 0..a.cols {
            a.data.swap(row * a.cols + j, p * a.cols + j);
        }
        let inv = a[(row, col)].inv().expect("pivot is nonzero");
        for j in 0..a.cols {
            a[(row, j)] = a[(row, j)].mul_ref(&inv);
        }
        for i in 0..a.rows {
            if i == row || a[(i, col)].is_negligible() {
                continue;
            }
            let f = a[(i, col)].clone();
            for j in 0..a.cols {
                let t = f.mul_ref(&a[(row, j)]);
                a[(i, j)] = a[(i, j)].clone() - t;
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

pub fn rank<S: Scalar>(m: &Matrix<S>) -> usize {
    row_reduce(m).1.len()
}

/// Solves `B c = v` for the coefficient vector `c`.
///
/// Returns `None` when `v` is not in the column span of `B` (a nonzero entry
/// survives in a row without pivot) or when the columns are dependent.
pub fn solve_columns<S: Scalar>(b: &Matrix<S>, v: &[S]) -> Option<Vec<S>> {
    assert_eq!(b.rows, v.len());
    let aug = Matrix::from_fn(b.rows, b.cols + 1, |i, j| {
        if j < b.cols {
            b[(i, j)].clone()
        } else {
            v[i].clone()
        }
    });
    let (r, pivots) = row_reduce(&aug);
    if pivots.len() != b.cols || pivots.contains(&b.cols) {
        return None;
    }
    Some((0..b.cols).map(|i| r[(i, b.cols)].clone()).collect())
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cyclotomic;

    #[test]
    fn identity_and_power() {
        let m = Matrix::<Complex64>::from_fn(2, 2, |i, j| Complex64::new((i + 2 * j) as f64, 0.0));
        assert_eq!(Matrix::identity(2).matmul(&m), m);
        assert_eq!(m.pow(0), Matrix::identity(2));
        assert_eq!(m.pow(3), m.matmul(&m).matmul(&m));
    }

    #[test]
    fn elimination() {
        let m = Matrix::<Cyclotomic>::from_fn(3, 2, |i, j| Cyclotomic::from_int((i * 2 + j + i * j) as i64));
        assert_eq!(rank(&m), 2);
        let c = vec![Cyclotomic::from_ratio(1, 3), Cyclotomic::i()];
        let v = m.apply(&c);
        assert_eq!(solve_columns(&m, &v).unwrap(), c);
        let off = vec![Cyclotomic::one(), Cyclotomic::zero(), Cyclotomic::zero()];
        assert!(solve_columns(&m, &off).is_none());
        let sing = Matrix::<Complex64>::from_fn(3, 3, |i, j| Complex64::new((i + j) as f64, 0.0));
        assert_eq!(rank(&sing), 2);
    }

    #[test]
    fn exact_rotation_has_order_four() {
        let i = Cyclotomic::i();
        let r = Matrix::diagonal(vec![i.clone(), i.clone()]);
        assert_eq!(r.pow(4), Matrix::identity(2));
        assert_eq!(r.unitarity_residual(), 0.0);
    }
}
