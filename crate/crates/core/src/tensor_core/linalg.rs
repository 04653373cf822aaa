//! Small dense linear algebra: symmetric matrices, the generalized symmetric
//! eigenproblem, radicals of degenerate metrics, and a generic Gaussian solver
//! that works over any [`Scalar`] so jets flow through it.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::jet::Scalar;
use crate::error::TensorError;

/// Default relative tolerance for deciding that a singular value vanishes.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    entries: DMatrix<f64>,
}

impl SymMatrix {
    /// Accepts `m` if it is square and symmetric to 1e-10 relative; the stored
    /// copy is exactly symmetrized.
    pub fn new(m: DMatrix<f64>) -> Result<Self, TensorError> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(TensorError::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let asym = (&m - m.transpose()).amax();
        if asym > 1e-10 * (1.0 + m.amax()) {
            return Err(TensorError::NotSymmetric(asym));
        }
        let entries = (&m + m.transpose()) * 0.5;
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Self { entries: DMatrix::identity(n, n) }
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self { entries: DMatrix::from_diagonal(&DVector::from_column_slice(d)) }
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { entries: &self.entries * c }
    }
}

#[derive(Clone, Debug)]
pub struct GeneralizedEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Columns are G-orthonormal eigenvectors, in the order of `values`.
    pub vectors: DMatrix<f64>,
}

/// Solves `A v = lambda G v` for symmetric `A` and SPD `G`.
///
/// Eigenvectors are normalized so that `V^T G V = I` and the first entry of
/// significant magnitude in each column is positive.
pub fn generalized_symmetric_eigen(
    a: &SymMatrix,
    g: &SymMatrix,
) -> Result<GeneralizedEigen, TensorError> {
    let n = a.dimension();
    if g.dimension() != n {
        return Err(TensorError::DimensionMismatch { expected: n, found: g.dimension() });
    }
    let chol = g.entries.clone().cholesky().ok_or(TensorError::NonSpd)?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or(TensorError::NonSpd)?;
    let c = &l_inv * a.entries() * l_inv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.try_symmetric_eigen(f64::EPSILON, 10_000).ok_or(TensorError::NoConvergence)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let back = l_inv.transpose();
    let mut vectors = DMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        values.push(eig.eigenvalues[k]);
        let mut v = &back * eig.eigenvectors.column(k);
        orient(&mut v);
        vectors.set_column(col, &v);
    }
    Ok(GeneralizedEigen { values, vectors })
}

/// First coordinate of significant magnitude made positive.
pub fn orient(v: &mut DVector<f64>) {
    let scale = v.amax();
    if let Some(first) = v.iter().copied().find(|x| x.abs() > 1e-9 * scale) {
        if first < 0.0 {
            *v *= -1.0;
        }
    }
}

/// Spans the radical of a symmetric matrix with exactly one vanishing
/// singular value (relative to the largest one, at `rank_tol`).
pub fn degenerate_null_direction(g: &SymMatrix, rank_tol: f64) -> Result<DVector<f64>, TensorError> {
    let svd = g.entries.clone().svd(false, true);
    let vt = svd.v_t.as_ref().ok_or(TensorError::NoConvergence)?;
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return Err(TensorError::RankDeficient(g.dimension()));
    }
    let small: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < rank_tol * smax)
        .map(|(i, _)| i)
        .collect();
    match small.len() {
        0 => Err(TensorError::NotDegenerate),
        1 => {
            let mut v = vt.row(small[0]).transpose();
            v /= v.norm();
            orient(&mut v);
            Ok(v)
        }
        k => Err(TensorError::RankDeficient(k)),
    }
}

/// Dense row-major matrix over a generic scalar.
#[derive(Clone, Debug)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::cst(0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::cst(1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j].clone()
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = T::cst(0.0);
            for k in 0..self.cols {
                acc = acc + self.get(i, k) * rhs.get(k, j);
            }
            acc
        })
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = T::cst(0.0);
                for k in 0..self.cols {
                    acc = acc + self.get(i, k) * v[k].clone();
                }
                acc
            })
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.at(i, j).value())
    }

    /// Inverse by Gauss-Jordan elimination, pivoting on real values.
    pub fn inverse(&self) -> Result<Self, TensorError> {
        solve(self, &Self::identity(self.rows))
    }
}

impl Mat<f64> {
    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting on the real
/// part, so the same pivot sequence is used for every jet component.
pub fn solve<T: Scalar>(a: &Mat<T>, b: &Mat<T>) -> Result<Mat<T>, TensorError> {
    let n = a.rows;
    if a.cols != n || b.rows != n {
        return Err(TensorError::DimensionMismatch { expected: n, found: b.rows });
    }
    let scale = a.data.iter().map(|x| x.value().abs()).fold(0.0, f64::max);
    let mut m = a.clone();
    let mut r = b.clone();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m.at(i, col).value().abs().total_cmp(&m.at(j, col).value().abs()))
            .unwrap();
        if m.at(piv, col).value().abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(TensorError::Singular);
        }
        if piv != col {
            for j in 0..n {
                m.data.swap(piv * n + j, col * n + j);
            }
            for j in 0..r.cols {
                r.data.swap(piv * r.cols + j, col * r.cols + j);
            }
        }
        let inv = m.get(col, col).recip();
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = m.get(row, col) * inv.clone();
            for j in col..n {
                let v = m.get(row, j) - f.clone() * m.get(col, j);
                m.set(row, j, v);
            }
            for j in 0..r.cols {
                let v = r.get(row, j) - f.clone() * r.get(col, j);
                r.set(row, j, v);
            }
        }
        for j in col..n {
            let v = m.get(col, j) * inv.clone();
            m.set(col, j, v);
        }
        for j in 0..r.cols {
            let v = r.get(col, j) * inv.clone();
            r.set(col, j, v);
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_core::jet::Jet1;

    #[test]
    fn eigen_identity_and_diagonal() {
        let e = generalized_symmetric_eigen(&SymMatrix::identity(2), &SymMatrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        let e = generalized_symmetric_eigen(
            &SymMatrix::from_diagonal(&[3.0, 2.0]),
            &SymMatrix::identity(2),
        )
        .unwrap();
        assert!((e.values[0] - 2.0).abs() < 1e-14 && (e.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_swap_matrix_with_scaled_metric() {
        // det([[-2l, 1], [1, -2l]]) = 4 l^2 - 1 = 0  =>  l = -1/2, 1/2
        let a = SymMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        let g = SymMatrix::from_diagonal(&[2.0, 2.0]);
        let e = generalized_symmetric_eigen(&a, &g).unwrap();
        assert!((e.values[0] + 0.5).abs() < 1e-14);
        assert!((e.values[1] - 0.5).abs() < 1e-14);
        let vtgv = e.vectors.transpose() * g.entries() * &e.vectors;
        assert!((vtgv - DMatrix::identity(2, 2)).amax() < 1e-12);
    }

    #[test]
    fn eigen_rejects_indefinite_metric() {
        let g = SymMatrix::from_diagonal(&[1.0, -1.0]);
        assert_eq!(
            generalized_symmetric_eigen(&SymMatrix::identity(2), &g).unwrap_err(),
            TensorError::NonSpd
        );
    }

    #[test]
    fn null_direction_of_diagonal() {
        let v = degenerate_null_direction(&SymMatrix::from_diagonal(&[0.0, 1.0, 1.0]), DEFAULT_RANK_TOL).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && v[1].abs() < 1e-14 && v[2].abs() < 1e-14);
    }

    #[test]
    fn null_direction_of_null_hyperplane_pullback() {
        // pullback of -dt^2 + dx1^2 + dx2^2 along (s, s, x2)
        let g = SymMatrix::from_diagonal(&[0.0, 1.0]);
        let v = degenerate_null_direction(&g, DEFAULT_RANK_TOL).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && v[1].abs() < 1e-14);
    }

    #[test]
    fn null_direction_errors() {
        assert_eq!(
            degenerate_null_direction(&SymMatrix::identity(3), DEFAULT_RANK_TOL).unwrap_err(),
            TensorError::NotDegenerate
        );
        assert_eq!(
            degenerate_null_direction(&SymMatrix::from_diagonal(&[0.0, 0.0, 1.0]), DEFAULT_RANK_TOL)
                .unwrap_err(),
            TensorError::RankDeficient(2)
        );
    }

    #[test]
    fn generic_solve_propagates_jets() {
        // A(x) = [[x, 1], [1, 2]], solve A y = e1 ; y0 = 2/(2x-1)
        let x = Jet1::variable(1.5_f64, 0, 1);
        let a = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => x.clone(),
            (1, 1) => Jet1::cst(2.0),
            _ => Jet1::cst(1.0),
        });
        let b = Mat::from_fn(2, 1, |i, _| Jet1::cst(if i == 0 { 1.0 } else { 0.0 }));
        let y = solve(&a, &b).unwrap();
        let y0 = y.get(0, 0);
        assert!((y0.val - 1.0).abs() < 1e-14);
        assert!((y0.d(0) - (-4.0 / 4.0)).abs() < 1e-14);
    }

    #[test]
    fn generic_solve_singular() {
        let a = Mat::from_fn(2, 2, |_, _| 1.0_f64);
        assert_eq!(a.inverse().unwrap_err(), TensorError::Singular);
    }
}
