//! Small dense complex matrices: LU, Cholesky, cyclic Jacobi for Hermitian
//! matrices and metric Gram-Schmidt.
//!
//! Matrices in this crate are per-factor blocks of commutant operators, so
//! they are small (tens of rows at most) and a straightforward row-major
//! layout is used throughout. Zero-sized matrices are valid everywhere.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

/// Sweeps allowed before the Jacobi iteration reports non-convergence.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Relative off-diagonal Frobenius norm at which Jacobi stops.
pub const JACOBI_TOL: f64 = 1e-13;

#[derive(Clone, PartialEq)]
pub struct CMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> fmt::Debug for CMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6e}{:+.6e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = cr(d);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(cr(s))
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(C::zero(), |a, b| a + b)
    }

    pub fn frob_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// `(A + A*)/2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |r, c| (self[(r, c)] + self[(c, r)].conj()) * half)
    }

    /// `||A - A*||_F`, zero for non-square input is never returned: callers
    /// check squareness first.
    pub fn hermitian_defect(&self) -> T {
        let mut s = T::zero();
        for r in 0..self.rows {
            for c in 0..self.cols {
                s += (self[(r, c)] - self[(c, r)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn column(&self, c: usize) -> Vec<C<T>> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn from_columns(rows: usize, cols: &[Vec<C<T>>]) -> Self {
        Self::from_fn(rows, cols.len(), |r, c| cols[c][r])
    }

    /// Columns selected by index.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |r, c| self[(r, idx[c])])
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |r, c| self[(r0 + r, c0 + c)])
    }

    pub fn set_submatrix(&mut self, r0: usize, c0: usize, m: &Self) {
        for r in 0..m.rows {
            for c in 0..m.cols {
                self[(r0 + r, c0 + c)] = m[(r, c)];
            }
        }
    }

    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let mut m = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        m.set_submatrix(0, 0, a);
        m.set_submatrix(a.rows, a.cols, b);
        m
    }

    pub fn hstack(a: &Self, b: &Self) -> Self {
        assert_eq!(a.rows, b.rows, "hstack row mismatch");
        let mut m = Self::zeros(a.rows, a.cols + b.cols);
        m.set_submatrix(0, 0, a);
        m.set_submatrix(0, a.cols, b);
        m
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<Lu<T>> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!("LU of {}x{}", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let mut singular = false;
        for k in 0..n {
            let (piv, pmax) = (k..n)
                .map(|r| (r, a[(r, k)].norm()))
                .fold((k, -T::one()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == T::zero() {
                singular = true;
                continue;
            }
            if piv != k {
                for c in 0..n {
                    a.data.swap(k * n + c, piv * n + c);
                }
                perm.swap(k, piv);
                sign = -sign;
            }
            let inv = a[(k, k)].inv();
            for r in k + 1..n {
                let f = a[(r, k)] * inv;
                a[(r, k)] = f;
                if f != C::zero() {
                    for c in k + 1..n {
                        let t = a[(k, c)];
                        a[(r, c)] -= f * t;
                    }
                }
            }
        }
        Ok(Lu { lu: a, perm, sign, singular })
    }

    pub fn det(&self) -> Result<C<T>> {
        Ok(self.lu()?.det())
    }

    pub fn inverse(&self) -> Result<Self> {
        self.lu()?.solve(&Self::identity(self.rows))
    }

    /// Lower Cholesky factor `L` with `A = L L*`; fails unless Hermitian
    /// positive definite.
    pub fn cholesky(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!("Cholesky of {}x{}", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > T::zero()) {
                return Err(Error::NotPositive { eigenvalue: d.as_f64() });
            }
            let djj = d.sqrt();
            l[(j, j)] = cr(djj);
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(l)
    }

    /// Solves `L X = B` for lower-triangular `self`.
    pub fn solve_lower(&self, b: &Self) -> Self {
        let n = self.rows;
        let mut x = b.clone();
        for c in 0..b.cols {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self[(i, i)];
            }
        }
        x
    }

    /// Solves `L* X = B` for lower-triangular `self`.
    pub fn solve_lower_adjoint(&self, b: &Self) -> Self {
        let n = self.rows;
        let mut x = b.clone();
        for c in 0..b.cols {
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self[(k, i)].conj() * x[(k, c)];
                }
                x[(i, c)] = s / self[(i, i)].conj();
            }
        }
        x
    }

    /// Hermitian eigendecomposition by cyclic Jacobi rotations.
    ///
    /// Only the Hermitian part of `self` is used. Eigenvalues are returned in
    /// ascending order with matching unit eigenvector columns.
    pub fn eigh(&self) -> Result<Eigh<T>> {
        if !self.is_square() {
            return Err(Error::ShapeMismatch(format!("eigh of {}x{}", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut a = self.hermitian_part();
        let mut v = Self::identity(n);
        let thresh = T::tol(JACOBI_TOL) * a.frob_norm();
        let mut converged = false;
        for _ in 0..JACOBI_MAX_SWEEPS {
            if off_diag_norm(&a) <= thresh {
                converged = true;
                break;
            }
            for p in 0..n.saturating_sub(1) {
                for q in p + 1..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
        if !converged && off_diag_norm(&a) > thresh {
            return Err(Error::NotConverged(format!("Jacobi eigensolver on {n}x{n} block")));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
        let values = order.iter().map(|&i| a[(i, i)].re).collect();
        let vectors = v.select_columns(&order);
        Ok(Eigh { values, vectors })
    }

    /// `f(A)` for Hermitian `A` through its eigendecomposition.
    pub fn hermitian_fn(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Ok(self.eigh()?.apply(f))
    }

    /// Modified Gram-Schmidt of the columns of `self` with respect to the
    /// positive metric `g` (`<x, y> = y* g x`), run twice per vector.
    /// Columns whose residual norm falls below `drop_tol` times their
    /// original norm are discarded.
    pub fn orthonormalize_in(&self, g: &Self, drop_tol: T) -> Self {
        let mut basis: Vec<Vec<C<T>>> = Vec::new();
        for c in 0..self.cols {
            let mut v = self.column(c);
            let orig = metric_norm(g, &v);
            if orig == T::zero() {
                continue;
            }
            for _ in 0..2 {
                for q in &basis {
                    let gv = mat_vec(g, &v);
                    let coeff = dot(q, &gv);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= *qi * coeff;
                    }
                }
            }
            let nrm = metric_norm(g, &v);
            if nrm > drop_tol * orig {
                let inv = T::one() / nrm;
                basis.push(v.into_iter().map(|z| z * inv).collect());
            }
        }
        Self::from_columns(self.rows, &basis)
    }
}

/// `x* y`.
pub(crate) fn dot<T: Real>(x: &[C<T>], y: &[C<T>]) -> C<T> {
    x.iter().zip(y).fold(C::zero(), |acc, (a, b)| acc + a.conj() * b)
}

pub(crate) fn mat_vec<T: Real>(m: &CMatrix<T>, v: &[C<T>]) -> Vec<C<T>> {
    (0..m.rows)
        .map(|r| (0..m.cols).fold(C::zero(), |acc, c| acc + m[(r, c)] * v[c]))
        .collect()
}

fn metric_norm<T: Real>(g: &CMatrix<T>, v: &[C<T>]) -> T {
    dot(v, &mat_vec(g, v)).re.max(T::zero()).sqrt()
}

fn off_diag_norm<T: Real>(a: &CMatrix<T>) -> T {
    let mut s = T::zero();
    for r in 0..a.rows {
        for c in 0..a.cols {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating `a[p][q]`. The unitary is
/// `G = diag(1, e^{-i phi}) R` with `R` the classical real rotation.
fn jacobi_rotate<T: Real>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == T::zero() {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase_conj = (apq / mag).conj();
    let theta = (aqq - app) / (mag + mag);
    let t = if theta.abs() > T::lit(1e150).min(T::max_value().sqrt()) {
        T::one() / (theta + theta)
    } else {
        let s = if theta < T::zero() { -T::one() } else { T::one() };
        s / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let gpp = cr(c);
    let gpq = cr(s);
    let gqp = phase_conj * (-s);
    let gqq = phase_conj * c;
    let n = a.rows;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * gpp + akq * gqp;
        a[(k, q)] = akp * gpq + akq * gqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    a[(p, q)] = C::zero();
    a[(q, p)] = C::zero();
    a[(p, p)].im = T::zero();
    a[(q, q)].im = T::zero();
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

/// Result of [`CMatrix::lu`].
#[derive(Debug, Clone)]
pub struct Lu<T: Real> {
    lu: CMatrix<T>,
    perm: Vec<usize>,
    sign: T,
    singular: bool,
}

impl<T: Real> Lu<T> {
    pub fn det(&self) -> C<T> {
        if self.singular {
            return C::zero();
        }
        (0..self.lu.rows).fold(cr(self.sign), |acc, i| acc * self.lu[(i, i)])
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn solve(&self, b: &CMatrix<T>) -> Result<CMatrix<T>> {
        if self.singular {
            return Err(Error::Singular);
        }
        let n = self.lu.rows;
        if b.rows != n {
            return Err(Error::ShapeMismatch(format!("solve with {n} rows vs rhs {}", b.rows)));
        }
        let mut x = CMatrix::from_fn(n, b.cols, |r, c| b[(self.perm[r], c)]);
        for c in 0..b.cols {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }
}

/// Eigenpairs of a Hermitian matrix, ascending.
#[derive(Debug, Clone)]
pub struct Eigh<T: Real> {
    pub values: Vec<T>,
    pub vectors: CMatrix<T>,
}

impl<T: Real> Eigh<T> {
    /// `V f(Λ) V*`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        let n = self.values.len();
        let fv: Vec<T> = self.values.iter().map(|&x| f(x)).collect();
        CMatrix::from_fn(n, n, |r, c| {
            (0..n).fold(C::zero(), |acc, k| {
                acc + self.vectors[(r, k)] * self.vectors[(c, k)].conj() * fv[k]
            })
        })
    }
}

impl<T: Real> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C<T> {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == C::zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    out.data[r * rhs.cols + c] += a * rhs[(k, c)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.shape(), rhs.shape(), "matrix difference shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: Real> Neg for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn neg(self) -> CMatrix<T> {
        self.scale_re(-T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    #[test]
    fn jacobi_diagonalizes_complex_hermitian() {
        let a = CMatrix::from_vec(
            3,
            3,
            vec![c(2.0, 0.0), c(1.0, 1.0), c(0.0, -0.5), c(1.0, -1.0), c(3.0, 0.0), c(0.25, 0.0), c(0.0, 0.5), c(0.25, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        let e = a.eigh().unwrap();
        let rebuilt = e.apply(|x| x);
        assert!((&rebuilt - &a).frob_norm() < 1e-12);
        let vhv = &e.vectors.adjoint() * &e.vectors;
        assert!((&vhv - &CMatrix::identity(3)).frob_norm() < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        // trace is preserved
        let s: f64 = e.values.iter().sum();
        assert!((s - 6.0).abs() < 1e-12);
    }

    #[test]
    fn empty_matrices_are_fine() {
        let z = CMatrix::<f64>::zeros(0, 0);
        assert_eq!(z.det().unwrap(), c(1.0, 0.0));
        assert!(z.eigh().unwrap().values.is_empty());
        assert_eq!(z.cholesky().unwrap().shape(), (0, 0));
        let w = CMatrix::<f64>::zeros(0, 3);
        let p = &w.adjoint() * &w;
        assert_eq!(p, CMatrix::zeros(3, 3));
    }

    #[test]
    fn lu_inverse_and_det() {
        let a = CMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(2.0, 1.0), c(1.0, 0.0), c(3.0, 0.0)]).unwrap();
        let d = a.det().unwrap();
        assert!((d - c(-2.0, -1.0)).norm() < 1e-14);
        let inv = a.inverse().unwrap();
        assert!((&(&a * &inv) - &CMatrix::identity(2)).frob_norm() < 1e-14);
        let sing = CMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]).unwrap();
        assert_eq!(sing.inverse().unwrap_err(), Error::Singular);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = CMatrix::<f64>::from_real_diag(&[1.0, -1.0]);
        assert!(matches!(a.cholesky(), Err(Error::NotPositive { .. })));
        let b = CMatrix::from_vec(2, 2, vec![c(4.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(3.0, 0.0)]).unwrap();
        let l = b.cholesky().unwrap();
        assert!((&(&l * &l.adjoint()) - &b).frob_norm() < 1e-14);
        let x = l.solve_lower_adjoint(&l.solve_lower(&CMatrix::identity(2)));
        assert!((&(&b * &x) - &CMatrix::identity(2)).frob_norm() < 1e-14);
    }

    #[test]
    fn gram_schmidt_in_metric_drops_dependent_columns() {
        let g = CMatrix::<f64>::from_real_diag(&[1.0, 4.0, 9.0]);
        let cols = CMatrix::from_vec(
            3,
            3,
            vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        let q = cols.orthonormalize_in(&g, 1e-10);
        assert_eq!(q.cols(), 2);
        let gram = &(&q.adjoint() * &g) * &q;
        assert!((&gram - &CMatrix::identity(2)).frob_norm() < 1e-13);
    }

    #[test]
    fn jacobi_works_in_single_precision() {
        let a = CMatrix::<f32>::from_fn(3, 3, |r, c| C::new((r + c) as f32, 0.0) + if r == c { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) });
        let e = a.eigh().unwrap();
        assert!((&e.apply(|x| x) - &a).frob_norm() < 1e-4);
    }
}
