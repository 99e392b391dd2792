//! Dense and sparse complex linear algebra helpers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Real matrix promoted to complex.
pub fn complexify(m: &RMat) -> CMat {
    m.map(|x| c(x, 0.0))
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let h = symmetrized(m);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let h = symmetrized(m);
    let eig = SymmetricEigen::new(h);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(m.nrows(), idx.len(), |r, k| eig.eigenvectors[(r, idx[k])]);
    (vals, vecs)
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub fn symmetric_eigen(m: &RMat) -> (Vec<f64>, RMat) {
    let h = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(h);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = RMat::from_fn(m.nrows(), idx.len(), |r, k| eig.eigenvectors[(r, idx[k])]);
    (vals, vecs)
}

fn symmetrized(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Operator norm of a Hermitian matrix (largest absolute eigenvalue).
pub fn hermitian_op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    hermitian_eigenvalues(m)
        .iter()
        .fold(0.0, |acc: f64, x| acc.max(x.abs()))
}

/// Operator norm (largest singular value) of an arbitrary complex matrix.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().fold(0.0, |acc: f64, x| acc.max(*x))
}

/// Trace norm of a Hermitian matrix.
pub fn hermitian_trace_norm(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).iter().map(|x| x.abs()).sum()
}

/// Trace norm (sum of singular values) of a real matrix.
pub fn real_trace_norm(m: &RMat) -> f64 {
    m.singular_values().iter().sum()
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product of dense matrices.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Complex sparse matrix in coordinate form with sorted, merged entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Sparse {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl Sparse {
    pub fn new(nrows: usize, ncols: usize, entries: Vec<(usize, usize, C64)>) -> Self {
        let mut s = Self {
            nrows,
            ncols,
            entries,
        };
        s.normalize();
        s
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::new(nrows, ncols, Vec::new())
    }

    pub fn identity(n: usize) -> Self {
        Self::new(n, n, (0..n).map(|i| (i, i, ONE)).collect())
    }

    /// Drops entries with modulus at most `drop_tol`.
    pub fn from_dense(m: &CMat, drop_tol: f64) -> Self {
        let mut entries = Vec::new();
        for r in 0..m.nrows() {
            for col in 0..m.ncols() {
                let v = m[(r, col)];
                if v.norm() > drop_tol {
                    entries.push((r, col, v));
                }
            }
        }
        Self::new(m.nrows(), m.ncols(), entries)
    }

    fn normalize(&mut self) {
        self.entries.sort_by_key(|&(r, col, _)| (r, col));
        let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(self.entries.len());
        for &(r, col, v) in &self.entries {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == col => last.2 += v,
                _ => merged.push((r, col, v)),
            }
        }
        merged.retain(|e| e.2 != ZERO);
        self.entries = merged;
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.nrows, self.ncols);
        for &(r, col, v) in &self.entries {
            m[(r, col)] += v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self::new(
            self.ncols,
            self.nrows,
            self.entries
                .iter()
                .map(|&(r, col, v)| (col, r, v.conj()))
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(
            self.nrows,
            self.ncols,
            self.entries.iter().map(|&(r, col, v)| (r, col, v * s)).collect(),
        )
    }

    /// Linear combination `Σ coeff_i · m_i` of equally shaped sparse matrices.
    pub fn combination(nrows: usize, ncols: usize, terms: &[(C64, &Sparse)]) -> Self {
        let mut entries = Vec::new();
        for (s, m) in terms {
            entries.extend(m.entries.iter().map(|&(r, col, v)| (r, col, v * s)));
        }
        Self::new(nrows, ncols, entries)
    }

    pub fn kron(&self, other: &Sparse) -> Self {
        let mut entries = Vec::with_capacity(self.nnz() * other.nnz());
        for &(r1, c1, v1) in &self.entries {
            for &(r2, c2, v2) in &other.entries {
                entries.push((r1 * other.nrows + r2, c1 * other.ncols + c2, v1 * v2));
            }
        }
        Self::new(self.nrows * other.nrows, self.ncols * other.ncols, entries)
    }

    pub fn mul_sparse(&self, other: &Sparse) -> Self {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); other.nrows];
        for &(r, col, v) in &other.entries {
            rows[r].push((col, v));
        }
        let mut entries = Vec::new();
        for &(r, k, v) in &self.entries {
            for &(col, w) in &rows[k] {
                entries.push((r, col, v * w));
            }
        }
        Self::new(self.nrows, other.ncols, entries)
    }

    /// `self · m` for dense `m`.
    pub fn mul_dense(&self, m: &CMat) -> CMat {
        let mut out = CMat::zeros(self.nrows, m.ncols());
        for &(r, k, v) in &self.entries {
            for col in 0..m.ncols() {
                out[(r, col)] += v * m[(k, col)];
            }
        }
        out
    }

    /// `m · self` for dense `m`.
    pub fn dense_mul(&self, m: &CMat) -> CMat {
        let mut out = CMat::zeros(m.nrows(), self.ncols);
        for &(k, col, v) in &self.entries {
            let src = m.column(k);
            let mut dst = out.column_mut(col);
            for r in 0..src.len() {
                dst[r] += src[r] * v;
            }
        }
        out
    }

    /// Adds `s · self` into the dense matrix `acc`.
    pub fn add_to_dense(&self, s: C64, acc: &mut CMat) {
        for &(r, col, v) in &self.entries {
            acc[(r, col)] += s * v;
        }
    }

    /// `Tr(self · m)`.
    pub fn trace_with(&self, m: &CMat) -> C64 {
        self.entries
            .iter()
            .map(|&(r, col, v)| v * m[(col, r)])
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CMat {
        CMat::from_fn(3, 3, |r, col| c(r as f64 + 0.5, col as f64 - 1.0))
    }

    #[test]
    fn sparse_products_match_dense() {
        let d = sample();
        let s = Sparse::new(
            3,
            3,
            vec![(0, 1, c(2.0, 1.0)), (2, 0, c(-1.0, 0.0)), (2, 0, c(0.5, 0.0))],
        );
        let sd = s.to_dense();
        assert!(max_abs_diff(&s.mul_dense(&d), &(&sd * &d)) < 1e-14);
        assert!(max_abs_diff(&s.dense_mul(&d), &(&d * &sd)) < 1e-14);
        assert!((s.trace_with(&d) - (&sd * &d).trace()).norm() < 1e-14);
        assert!(max_abs_diff(&s.kron(&s).to_dense(), &kron(&sd, &sd)) < 1e-14);
        assert!(max_abs_diff(&s.mul_sparse(&s).to_dense(), &(&sd * &sd)) < 1e-14);
        assert!(max_abs_diff(&s.adjoint().to_dense(), &sd.adjoint()) < 1e-14);
    }

    #[test]
    fn duplicate_entries_merge() {
        let s = Sparse::new(2, 2, vec![(1, 1, ONE), (1, 1, -ONE), (0, 0, ONE)]);
        assert_eq!(s.nnz(), 1);
    }

    #[test]
    fn hermitian_norms() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 2.0), c(0.0, -2.0), c(1.0, 0.0)]);
        assert!((hermitian_op_norm(&m) - 3.0).abs() < 1e-12);
        assert!((op_norm(&m) - 3.0).abs() < 1e-12);
        assert!((hermitian_trace_norm(&m) - 4.0).abs() < 1e-12);
        let (vals, vecs) = hermitian_eigen(&m);
        assert!((vals[0] + 1.0).abs() < 1e-12);
        let v = vecs.column(0);
        assert!(((&m * v) - v * c(-1.0, 0.0)).norm() < 1e-12);
    }
}
