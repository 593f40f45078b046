//! Function calculus for normal matrices and double operator integrals.
//!
//! For normal `N = U diag(lambda) U*` the calculus is spectral:
//! `f(N) = U diag(f(lambda)) U*`. Differences `f(N1) - f(N2)` are
//! represented exactly by a pair of double operator integrals whose kernels
//! are the one-coordinate divided differences of `f`: one against the
//! difference of anti-Hermitian parts, one against the difference of
//! Hermitian parts. The identity telescopes entrywise in the mixed
//! eigenbasis, so it holds for every symbol at every finite dimension, up to
//! floating-point accumulation; no smoothness is needed.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::funcspace::{FuncspaceError, ScalarField2D};
use crate::linalg::{
    normal_spectral, real_imag_parts, ComplexMatrix, LinalgError, SpectralDecomposition,
};

/// Relative coincidence threshold for divided differences.
const COINCIDENCE_DELTA: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CalculusError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Funcspace(#[from] FuncspaceError),
    #[error("symbol produced a non-finite value at eigenvalue ({re}, {im})")]
    NonFiniteSymbol { re: f64, im: f64 },
    #[error("multiplier kernel produced a non-finite entry at ({row}, {col})")]
    NonFiniteKernel { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

/// Coordinate varied by a divided difference.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DifferenceAxis {
    X,
    Y,
}

/// One-coordinate divided difference of `f` between `z1` and `z2`.
///
/// Axis `Y` compares `(x1, y1)` with `(x1, y2)` and divides by `y1 - y2`;
/// axis `X` compares `(x1, y2)` with `(x2, y2)` and divides by `x1 - x2`.
/// The two axes chain through the mixed point `(x1, y2)`, which is what
/// makes the pair of integrals telescope.
///
/// When the denominator is at most `1e-9 * scale` the one-sided partial
/// derivative at the shared point is used instead, or zero if the symbol
/// carries none. Any finite convention is equally valid for the
/// representation identity because the coincident factor vanishes.
pub fn divided_difference(
    f: &ScalarField2D,
    axis: DifferenceAxis,
    z1: Complex64,
    z2: Complex64,
    scale: f64,
) -> Complex64 {
    let delta = COINCIDENCE_DELTA * scale;
    match axis {
        DifferenceAxis::Y => {
            let den = z1.im - z2.im;
            if den.abs() <= delta {
                f.dy(z1).unwrap_or(Complex64::new(0.0, 0.0))
            } else {
                let p = z1;
                let q = Complex64::new(z1.re, z2.im);
                (f.eval(p) - f.eval(q)) / den
            }
        }
        DifferenceAxis::X => {
            let den = z1.re - z2.re;
            let shared = Complex64::new(z1.re, z2.im);
            if den.abs() <= delta {
                f.dx(shared).unwrap_or(Complex64::new(0.0, 0.0))
            } else {
                (f.eval(shared) - f.eval(z2)) / den
            }
        }
    }
}

type KernelFn = Arc<dyn Fn(Complex64, Complex64) -> Complex64 + Send + Sync>;

/// Scalar kernel `Phi(z1, z2)` evaluated on eigenvalue pairs.
#[derive(Clone)]
pub struct MultiplierKernel {
    name: String,
    eval: KernelFn,
}

impl MultiplierKernel {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(Complex64, Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, z1: Complex64, z2: Complex64) -> Complex64 {
        (self.eval)(z1, z2)
    }

    /// The kernel `(z1, z2) -> conj(Phi(z2, z1))`, which represents the
    /// adjoint of the integral: `doi(Phi, d1, d2, T)* = doi(flip, d2, d1, T*)`.
    pub fn adjoint_flip(&self) -> MultiplierKernel {
        let inner = self.eval.clone();
        MultiplierKernel {
            name: format!("{}~", self.name),
            eval: Arc::new(move |z1, z2| inner(z2, z1).conj()),
        }
    }
}

impl fmt::Debug for MultiplierKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiplierKernel({})", self.name)
    }
}

/// Divided difference of a symbol as a multiplier kernel.
pub fn divided_difference_kernel(
    f: &ScalarField2D,
    axis: DifferenceAxis,
    scale: f64,
) -> MultiplierKernel {
    let field = f.clone();
    let tag = match axis {
        DifferenceAxis::X => "ddx",
        DifferenceAxis::Y => "ddy",
    };
    MultiplierKernel::new(format!("{tag}[{}]", f.name()), move |z1, z2| {
        divided_difference(&field, axis, z1, z2, scale)
    })
}

/// Kernel evaluated on an eigenvalue grid: `M[j][k] = Phi(left[j], right[k])`.
pub fn multiplier_matrix(
    kernel: &MultiplierKernel,
    left: &[Complex64],
    right: &[Complex64],
) -> Result<ComplexMatrix, CalculusError> {
    let m = ComplexMatrix::from_fn(left.len(), right.len(), |j, k| {
        kernel.eval(left[j], right[k])
    });
    for j in 0..left.len() {
        for k in 0..right.len() {
            let v = m[(j, k)];
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(CalculusError::NonFiniteKernel { row: j, col: k });
            }
        }
    }
    Ok(m)
}

/// Double operator integral of `T` against the kernel in the eigenbases of
/// two normal matrices: `U1 (M . (U1* T U2)) U2*` with `.` the entrywise
/// product. `T` may be rectangular as long as it maps the right space to
/// the left one.
pub fn doi(
    kernel: &MultiplierKernel,
    left: &SpectralDecomposition,
    right: &SpectralDecomposition,
    t: &ComplexMatrix,
) -> Result<ComplexMatrix, CalculusError> {
    if t.rows() != left.dim() || t.cols() != right.dim() {
        return Err(CalculusError::Shape(format!(
            "integrand is {}x{}, bases are {} and {}",
            t.rows(),
            t.cols(),
            left.dim(),
            right.dim()
        )));
    }
    let m = multiplier_matrix(kernel, left.eigenvalues(), right.eigenvalues())?;
    let mid = left.basis().adjoint().mul(t).mul(right.basis());
    Ok(left
        .basis()
        .mul(&m.hadamard(&mid))
        .mul(&right.basis().adjoint()))
}

/// `f(N)` through a precomputed spectral decomposition.
pub fn apply_function_spectral(
    f: &ScalarField2D,
    dec: &SpectralDecomposition,
) -> Result<ComplexMatrix, CalculusError> {
    let values: Vec<Complex64> = dec.eigenvalues().iter().map(|&z| f.eval(z)).collect();
    for (z, v) in dec.eigenvalues().iter().zip(values.iter()) {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(CalculusError::NonFiniteSymbol { re: z.re, im: z.im });
        }
    }
    let d = ComplexMatrix::diagonal(&values);
    Ok(dec.basis().mul(&d).mul(&dec.basis().adjoint()))
}

/// `f(N)` for a normal matrix.
pub fn apply_function(
    f: &ScalarField2D,
    n: &ComplexMatrix,
) -> Result<ComplexMatrix, CalculusError> {
    let dec = normal_spectral(n)?;
    apply_function_spectral(f, &dec)
}

/// Coincidence scale for divided differences between two spectra: one plus
/// the largest coordinate magnitude.
pub fn coincidence_scale(d1: &SpectralDecomposition, d2: &SpectralDecomposition) -> f64 {
    let mut m = 0.0f64;
    for z in d1.eigenvalues().iter().chain(d2.eigenvalues()) {
        m = m.max(z.re.abs()).max(z.im.abs());
    }
    1.0 + m
}

/// Both sides of the exact representation of `f(N1) - f(N2)` as two double
/// operator integrals, with the building blocks kept for inspection.
#[derive(Clone, Debug)]
pub struct RepresentationCheck {
    /// `f(N1) - f(N2)`.
    pub lhs: ComplexMatrix,
    /// Integral of the y-axis divided difference against `B1 - B2`.
    pub imag_term: ComplexMatrix,
    /// Integral of the x-axis divided difference against `A1 - A2`.
    pub real_term: ComplexMatrix,
    /// `imag_term + real_term`.
    pub rhs: ComplexMatrix,
    /// `||lhs - rhs||_F`.
    pub defect: f64,
}

/// Realizes `f(N1) - f(N2)` as the sum of two double operator integrals,
/// decomposing both matrices internally.
pub fn representation_difference(
    f: &ScalarField2D,
    n1: &ComplexMatrix,
    n2: &ComplexMatrix,
) -> Result<RepresentationCheck, CalculusError> {
    let d1 = normal_spectral(n1)?;
    let d2 = normal_spectral(n2)?;
    representation_inner(f, &d1, &d2, n1, n2)
}

/// Same as [`representation_difference`] but reuses cached decompositions;
/// the operators are reconstructed from them.
pub fn representation_difference_spectral(
    f: &ScalarField2D,
    d1: &SpectralDecomposition,
    d2: &SpectralDecomposition,
) -> Result<RepresentationCheck, CalculusError> {
    let n1 = d1.reconstruct();
    let n2 = d2.reconstruct();
    representation_inner(f, d1, d2, &n1, &n2)
}

fn representation_inner(
    f: &ScalarField2D,
    d1: &SpectralDecomposition,
    d2: &SpectralDecomposition,
    n1: &ComplexMatrix,
    n2: &ComplexMatrix,
) -> Result<RepresentationCheck, CalculusError> {
    if d1.dim() != d2.dim() {
        return Err(CalculusError::Shape(format!(
            "operator dimensions differ: {} vs {}",
            d1.dim(),
            d2.dim()
        )));
    }
    let f1 = apply_function_spectral(f, d1)?;
    let f2 = apply_function_spectral(f, d2)?;
    let lhs = f1.sub(&f2);

    // A1 - A2 and B1 - B2 are the Hermitian parts of the single difference.
    let (a_diff, b_diff) = real_imag_parts(&n1.sub(n2))?;
    let scale = coincidence_scale(d1, d2);
    let ky = divided_difference_kernel(f, DifferenceAxis::Y, scale);
    let kx = divided_difference_kernel(f, DifferenceAxis::X, scale);
    let imag_term = doi(&ky, d1, d2, &b_diff)?;
    let real_term = doi(&kx, d1, d2, &a_diff)?;
    let rhs = imag_term.add(&real_term);
    let defect = lhs.sub(&rhs).frobenius_norm();
    Ok(RepresentationCheck {
        lhs,
        imag_term,
        real_term,
        rhs,
        defect,
    })
}

/// Both sides of the quasicommutator representation: `f(N1) Q - Q f(N2)`
/// written as two integrals against combinations of `N1 Q - Q N2` and
/// `N1* Q - Q N2*`.
#[derive(Clone, Debug)]
pub struct QuasicommutatorCheck {
    /// `f(N1) Q - Q f(N2)`.
    pub lhs: ComplexMatrix,
    /// `N1 Q - Q N2`.
    pub x_part: ComplexMatrix,
    /// `N1* Q - Q N2*`.
    pub y_part: ComplexMatrix,
    pub rhs: ComplexMatrix,
    /// `||lhs - rhs||_F`.
    pub defect: f64,
}

/// Represents `f(N1) Q - Q f(N2)` as a pair of double operator integrals.
/// `Q` maps the space of `N2` into the space of `N1`, so it may be
/// rectangular; `Q = I` recovers the difference representation.
pub fn quasicommutator_representation(
    f: &ScalarField2D,
    d1: &SpectralDecomposition,
    d2: &SpectralDecomposition,
    q: &ComplexMatrix,
) -> Result<QuasicommutatorCheck, CalculusError> {
    if q.rows() != d1.dim() || q.cols() != d2.dim() {
        return Err(CalculusError::Shape(format!(
            "coupling is {}x{}, operators have dimensions {} and {}",
            q.rows(),
            q.cols(),
            d1.dim(),
            d2.dim()
        )));
    }
    let n1 = d1.reconstruct();
    let n2 = d2.reconstruct();
    let f1 = apply_function_spectral(f, d1)?;
    let f2 = apply_function_spectral(f, d2)?;
    let lhs = f1.mul(q).sub(&q.mul(&f2));

    let x_part = n1.mul(q).sub(&q.mul(&n2));
    let y_part = n1.adjoint().mul(q).sub(&q.mul(&n2.adjoint()));
    // (X + Y)/2 couples the Hermitian parts, (X - Y)/(2i) the
    // anti-Hermitian parts.
    let a_part = x_part.add(&y_part).scaled_re(0.5);
    let b_part = x_part.sub(&y_part).scaled(Complex64::new(0.0, -0.5));

    let scale = coincidence_scale(d1, d2);
    let ky = divided_difference_kernel(f, DifferenceAxis::Y, scale);
    let kx = divided_difference_kernel(f, DifferenceAxis::X, scale);
    let rhs = doi(&ky, d1, d2, &b_part)?.add(&doi(&kx, d1, d2, &a_part)?);
    let defect = lhs.sub(&rhs).frobenius_norm();
    Ok(QuasicommutatorCheck {
        lhs,
        x_part,
        y_part,
        rhs,
        defect,
    })
}
