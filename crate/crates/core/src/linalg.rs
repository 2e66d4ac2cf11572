//! Small dense matrices over exact rationals, floats, or symbolic expressions.

use std::fmt::Debug;
use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use crate::symexpr::{Expr, Rational};

/// Minimal field interface shared by [`Rational`], `f64` and [`Expr`].
pub trait Scalar: Clone + Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// `None` when dividing by zero.
    fn div(&self, o: &Self) -> Option<Self>;
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        (!Zero::is_zero(o)).then(|| self / o)
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn div(&self, o: &Self) -> Option<Self> {
        (*o != 0.0).then(|| self / o)
    }
}

impl Scalar for Expr {
    fn zero() -> Self {
        Expr::zero()
    }
    fn one() -> Self {
        Expr::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Expr::is_zero(self)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        self.checked_div(o).ok()
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
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

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn mul(&self, o: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        Mat::from_fn(self.rows, o.cols, |r, c| {
            (0..self.cols).fold(T::zero(), |acc, k| acc.add(&self[(r, k)].mul(&o[(k, c)])))
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|r| (0..self.cols).fold(T::zero(), |acc, k| acc.add(&self[(r, k)].mul(&v[k]))))
            .collect()
    }

    pub fn add(&self, o: &Mat<T>) -> Mat<T> {
        Mat::from_fn(self.rows, self.cols, |r, c| self[(r, c)].add(&o[(r, c)]))
    }

    pub fn sub(&self, o: &Mat<T>) -> Mat<T> {
        Mat::from_fn(self.rows, self.cols, |r, c| self[(r, c)].sub(&o[(r, c)]))
    }

    pub fn scale(&self, s: &T) -> Mat<T> {
        self.map(|v| v.mul(s))
    }

    pub fn neg(&self) -> Mat<T> {
        self.map(T::neg)
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc.add(&self[(i, i)]))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|r| (0..r).all(|c| self[(r, c)] == self[(c, r)]))
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat<T> {
        Mat::from_fn(rows, cols, |r, c| self[(r0 + r, c0 + c)].clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat<T>) {
        for r in 0..b.rows {
            for c in 0..b.cols {
                self[(r0 + r, c0 + c)] = b[(r, c)].clone();
            }
        }
    }

    /// Determinant by cofactor expansion; division free, so valid for symbolic entries.
    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        match n {
            0 => T::one(),
            1 => self.data[0].clone(),
            2 => self[(0, 0)].mul(&self[(1, 1)]).sub(&self[(0, 1)].mul(&self[(1, 0)])),
            _ => {
                let mut acc = T::zero();
                for c in 0..n {
                    if self[(0, c)].is_zero() {
                        continue;
                    }
                    let minor = self.minor(0, c);
                    let term = self[(0, c)].mul(&minor.det());
                    acc = if c % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                acc
            }
        }
    }

    pub fn minor(&self, skip_r: usize, skip_c: usize) -> Mat<T> {
        let idx_r: Vec<usize> = (0..self.rows).filter(|r| *r != skip_r).collect();
        let idx_c: Vec<usize> = (0..self.cols).filter(|c| *c != skip_c).collect();
        Mat::from_fn(idx_r.len(), idx_c.len(), |r, c| self[(idx_r[r], idx_c[c])].clone())
    }

    /// Classical adjugate, so that `A * adj(A) = det(A) I`.
    pub fn adjugate(&self) -> Mat<T> {
        let n = self.rows;
        if n == 1 {
            return Mat::identity(1);
        }
        Mat::from_fn(n, n, |r, c| {
            let m = self.minor(c, r).det();
            if (r + c) % 2 == 0 {
                m
            } else {
                m.neg()
            }
        })
    }

    /// Inverse via the adjugate; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Mat<T>> {
        let d = self.det();
        if d.is_zero() {
            return None;
        }
        let adj = self.adjugate();
        let inv_d = T::one().div(&d)?;
        Some(adj.scale(&inv_d))
    }

    /// Rank by fraction-free-ish Gaussian elimination with exact zero tests.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            let Some(p) = (rank..m.rows).find(|r| !m[(*r, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(rank, p);
            for r in (rank + 1)..m.rows {
                if m[(r, c)].is_zero() {
                    continue;
                }
                let f = m[(r, c)].div(&m[(rank, c)]).expect("pivot is nonzero");
                for cc in c..m.cols {
                    let v = m[(r, cc)].sub(&f.mul(&m[(rank, cc)]));
                    m[(r, cc)] = v;
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}
