//! Dense complex matrices and the spectral machinery built on them.
//!
//! Matrices are stored row-major as `Vec<Complex64>`. All consumers in this
//! crate work with small dense matrices (dimension at most a few hundred), so
//! the implementation favors clarity and reproducibility over blocking or
//! vectorization tricks: every reduction runs in a fixed order, which keeps
//! results bit-stable for a fixed input.

mod eigen;
mod io;
mod svd;

pub use eigen::{
    hermitian_eigen, normal_spectral, normal_spectral_with, HermitianEigen, NormalSpectralOptions,
    SpectralDecomposition,
};
pub use io::{matrix_from_json, matrix_to_json};
pub use svd::{
    operator_norm, schatten_norm, schatten_of_values, singular_values, weak_quasinorm,
    SingularValues,
};

use num_complex::Complex64;
use thiserror::Error;

/// Tolerances and failures shared by the linear-algebra layer.
#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch in {op}: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    DimensionMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("matrix is not normal: commutator defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotNormal { defect: f64, tol: f64 },
    #[error("eigensolver did not converge within {sweeps} sweeps (off-diagonal {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("non-finite entry at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("invalid matrix data: {0}")]
    BadFormat(String),
}

/// Dense complex matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data. Fails if the length does not
    /// match or any entry is non-finite.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::BadFormat(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                data.len()
            )));
        }
        let m = Self { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for j in 0..n {
            m[(j, j)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (j, &d) in diag.iter().enumerate() {
            m[(j, j)] = d;
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

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn check_finite(&self) -> Result<(), LinalgError> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(LinalgError::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    /// Entrywise (Hadamard) product; this is how multiplier matrices act.
    pub fn hadamard(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, "hadamard", |a, b| a * b)
    }

    fn zip_with(
        &self,
        rhs: &Self,
        op: &'static str,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Self {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "{op}: shape {}x{} vs {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scaled_re(&self, c: f64) -> Self {
        self.scaled(Complex64::new(c, 0.0))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert!(
            self.cols == rhs.rows,
            "mul: shape {}x{} vs {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// Frobenius norm of `M M* - M* M`; zero exactly when `M` is normal.
    pub fn normality_defect(&self) -> f64 {
        let adj = self.adjoint();
        self.mul(&adj).sub(&adj.mul(self)).frobenius_norm()
    }

    /// Frobenius norm of `M - M*`.
    pub fn hermitian_defect(&self) -> f64 {
        self.sub(&self.adjoint()).frobenius_norm()
    }

    /// Contiguous block of columns, used to compress cluster invariant
    /// subspaces.
    pub fn column_block(&self, start: usize, len: usize) -> Self {
        assert!(start + len <= self.cols, "column_block out of range");
        Self::from_fn(self.rows, len, |i, j| self[(i, start + j)])
    }

    /// Trace of the matrix; callers guarantee squareness.
    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|j| self[(j, j)]).sum()
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Hermitian and anti-Hermitian parts: `A = (N + N*)/2`, `B = (N - N*)/(2i)`,
/// so `N = A + iB`. Each entry pair is produced from a single rounded sum, so
/// both outputs are exactly Hermitian.
pub fn real_imag_parts(n: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix), LinalgError> {
    if !n.is_square() {
        return Err(LinalgError::NotSquare {
            rows: n.rows,
            cols: n.cols,
        });
    }
    n.check_finite()?;
    let d = n.rows();
    let mut a = ComplexMatrix::zeros(d, d);
    let mut b = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        a[(i, i)] = Complex64::new(n[(i, i)].re, 0.0);
        b[(i, i)] = Complex64::new(n[(i, i)].im, 0.0);
        for j in (i + 1)..d {
            let s = (n[(i, j)] + n[(j, i)].conj()) * 0.5;
            let t = (n[(i, j)] - n[(j, i)].conj()) * 0.5;
            a[(i, j)] = s;
            a[(j, i)] = s.conj();
            // t = i * b_ij, so b_ij = -i * t; multiplying by i is exact.
            let bij = Complex64::new(t.im, -t.re);
            b[(i, j)] = bij;
            b[(j, i)] = bij.conj();
        }
    }
    Ok((a, b))
}
