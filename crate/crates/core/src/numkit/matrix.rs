use std::ops::{Index, IndexMut};

use crate::{Error, Result, Scalar};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix from row-major entries, checking shape and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(rows.len(), cols, rows.concat())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols, "mul_vec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `self += scale * u v'`.
    pub fn add_outer(&mut self, scale: T, u: &[T], v: &[T]) {
        debug_assert_eq!(u.len(), self.rows);
        debug_assert_eq!(v.len(), self.cols);
        for (i, &ui) in u.iter().enumerate() {
            let a = scale * ui;
            let row = &mut self.data[i * self.cols..(i + 1) * self.cols];
            for (r, &vj) in row.iter_mut().zip(v) {
                *r += a * vj;
            }
        }
    }

    pub fn scale_mut(&mut self, s: T) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    /// Principal submatrix on the given indices.
    pub fn principal(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(a, b)] = self[(i, j)];
            }
        }
        m
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (b, &j) in idx.iter().enumerate() {
                m[(i, b)] = self[(i, j)];
            }
        }
        m
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Lower Cholesky factor, or `None` when a pivot is not safely positive.
pub(crate) fn cholesky<T: Scalar>(a: &Matrix<T>) -> Option<Matrix<T>> {
    let n = a.rows();
    let max_diag = (0..n).fold(T::zero(), |m, i| m.max(a[(i, i)].abs()));
    let floor = T::epsilon() * T::lit(n as f64) * max_diag;
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !d.is_finite() || d <= floor {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

pub(crate) fn cholesky_solve<T: Scalar>(l: &Matrix<T>, b: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let v = l[(i, k)] * y[k];
            y[i] -= v;
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            let v = l[(k, i)] * y[k];
            y[i] -= v;
        }
        y[i] /= l[(i, i)];
    }
    y
}

fn check_square<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<()> {
    if a.rows() != a.cols() || a.rows() != b.len() || b.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "system {}x{} with right-hand side of length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    Ok(())
}

/// Solves `A x = b` for symmetric positive definite `A`.
///
/// Only the lower triangle of `A` is read. When the factorization breaks down
/// the solve is retried on `A + κI` with `κ = 1e-8·tr(A)/p`, growing tenfold up
/// to `1e-4·tr(A)/p`.
pub fn solve_spd<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    check_square(a, b)?;
    if let Some(l) = cholesky(a) {
        return Ok(cholesky_solve(&l, b));
    }
    let p = a.rows();
    let base = a.trace() / T::lit(p as f64);
    if !(base > T::zero()) || !base.is_finite() {
        return Err(Error::SingularMatrix);
    }
    let mut kappa = base * T::lit(1e-8);
    let top = base * T::lit(1e-4) * T::lit(1.0 + 1e-9);
    while kappa <= top {
        let mut jittered = a.clone();
        for i in 0..p {
            jittered[(i, i)] += kappa;
        }
        if let Some(l) = cholesky(&jittered) {
            return Ok(cholesky_solve(&l, b));
        }
        kappa *= T::lit(10.0);
    }
    Err(Error::SingularMatrix)
}

/// Solves a general square system by LU decomposition with partial pivoting.
pub fn solve_lu<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    check_square(a, b)?;
    let n = a.rows();
    let mut m = a.clone();
    let mut x = b.to_vec();
    let tiny = T::epsilon() * T::lit(n as f64) * m.max_abs();
    for col in 0..n {
        let (piv, pmax) = (col..n)
            .map(|r| (r, m[(r, col)].abs()))
            .fold((col, -T::one()), |best, c| if c.1 > best.1 { c } else { best });
        if !pmax.is_finite() || pmax <= tiny {
            return Err(Error::SingularMatrix);
        }
        if piv != col {
            for j in 0..n {
                let t = m[(col, j)];
                m[(col, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
            x.swap(col, piv);
        }
        let d = m[(col, col)];
        for r in col + 1..n {
            let f = m[(r, col)] / d;
            if f == T::zero() {
                continue;
            }
            for j in col..n {
                let v = f * m[(col, j)];
                m[(r, j)] -= v;
            }
            let v = f * x[col];
            x[r] -= v;
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in i + 1..n {
            s -= m[(i, j)] * x[j];
        }
        x[i] = s / m[(i, i)];
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularMatrix);
    }
    Ok(x)
}
