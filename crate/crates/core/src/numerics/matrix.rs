//! Dense row-major matrices.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex;
use num_traits::{Num, One, Zero};

use super::scalar::{cabs, Real, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

pub type CMatrix = Matrix<C64>;
pub type RMatrix = Matrix<f64>;

impl<S: Copy> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Matrix::new(r, c, rows.concat())
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

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map<T: Copy>(&self, f: impl Fn(S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    /// Submatrix from explicit row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }
}

impl<S: Copy + Zero> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }
}

impl<S: Copy + Zero + One> Matrix<S> {
    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }
}

impl<S: Copy + Num> Matrix<S> {
    pub fn matmul(&self, b: &Matrix<S>) -> Result<Matrix<S>> {
        if self.cols != b.rows {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, b.rows, b.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, b.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..b.cols {
                    let v = out[(i, j)] + a * b[(k, j)];
                    out[(i, j)] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, b: &Matrix<S>) -> Result<Matrix<S>> {
        self.zip(b, |x, y| x + y)
    }

    pub fn sub(&self, b: &Matrix<S>) -> Result<Matrix<S>> {
        self.zip(b, |x, y| x - y)
    }

    pub fn scale(&self, a: S) -> Matrix<S> {
        self.map(|x| a * x)
    }

    fn zip(&self, b: &Matrix<S>, f: impl Fn(S, S) -> S) -> Result<Matrix<S>> {
        if self.rows != b.rows || self.cols != b.cols {
            return Err(Error::Dimension("shape mismatch".into()));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
        })
    }

    pub fn mul_vec(&self, x: &[S]) -> Result<Vec<S>> {
        if x.len() != self.cols {
            return Err(Error::Dimension("vector length".into()));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(S::zero(), |acc, (&a, &b)| acc + a * b))
            .collect())
    }
}

impl<T: Real> Matrix<Complex<T>> {
    pub fn conj_transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&z| cabs(z).to_f64()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| cabs(self[(i, j)]).to_f64()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|&z| cabs(z).to_f64().powi(2)).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|&z| cabs(z).to_f64()).fold(0.0, f64::max)
    }
}

impl CMatrix {
    pub fn from_real(a: &RMatrix) -> CMatrix {
        a.map(|x| C64::new(x, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Entrywise real part.
    pub fn re(&self) -> RMatrix {
        self.map(|z| z.re)
    }
}

impl RMatrix {
    pub fn norm_inf_real(&self) -> f64 {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<S: Copy + Num> Mul for &Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, b: &Matrix<S>) -> Matrix<S> {
        self.matmul(b).expect("matrix product shape")
    }
}
