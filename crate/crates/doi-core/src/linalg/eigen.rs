//! Hermitian eigensolver and spectral decomposition of normal matrices.
//!
//! The Hermitian solver is a cyclic complex Jacobi iteration: each rotation
//! annihilates one off-diagonal pair with a unitary plane rotation, sweeps
//! run over all pairs in row order, and convergence is declared once the
//! off-diagonal Frobenius mass drops below `1e-14` relative to the input.
//! Normal matrices are decomposed by diagonalizing the Hermitian part first,
//! then rediagonalizing the anti-Hermitian part inside each eigenvalue
//! cluster; both steps reuse the same Jacobi kernel.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{real_imag_parts, ComplexMatrix, LinalgError};

/// Relative Hermitian-defect tolerance accepted by the eigensolver.
const HERMITIAN_TOL: f64 = 1e-10;
/// Relative off-diagonal mass at which Jacobi declares convergence.
const JACOBI_TOL: f64 = 1e-14;
/// Hard cap on Jacobi sweeps.
const MAX_SWEEPS: usize = 60;
/// Relative commutator tolerance accepted as "normal".
const NORMALITY_TOL: f64 = 1e-10;
/// Relative gap under which Hermitian-part eigenvalues join one cluster.
const CLUSTER_GAP: f64 = 1e-8;
/// Relative reconstruction defect accepted from the normal decomposition.
const RECONSTRUCT_TOL: f64 = 1e-10;

/// Eigenvalues (ascending) and an orthonormal eigenbasis of a Hermitian
/// matrix; column `j` of `basis` belongs to `eigenvalues[j]`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    eigenvalues: Vec<f64>,
    basis: ComplexMatrix,
}

impl HermitianEigen {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(eigenvalues) V*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let diag: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        let d = ComplexMatrix::diagonal(&diag);
        self.basis.mul(&d).mul(&self.basis.adjoint())
    }
}

/// Eigenvalues and an orthonormal eigenbasis of a normal matrix; column `j`
/// of `basis` belongs to `eigenvalues[j]`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<Complex64>,
    basis: ComplexMatrix,
}

impl SpectralDecomposition {
    /// Assembles a decomposition from parts already known to be valid, e.g.
    /// when the eigenbasis was constructed explicitly. The basis must be
    /// unitary with columns matching the eigenvalues.
    pub fn from_parts(
        eigenvalues: Vec<Complex64>,
        basis: ComplexMatrix,
    ) -> Result<Self, LinalgError> {
        if !basis.is_square() {
            return Err(LinalgError::NotSquare {
                rows: basis.rows(),
                cols: basis.cols(),
            });
        }
        if basis.rows() != eigenvalues.len() {
            return Err(LinalgError::BadFormat(format!(
                "{} eigenvalues for a {}x{} basis",
                eigenvalues.len(),
                basis.rows(),
                basis.cols()
            )));
        }
        basis.check_finite()?;
        Ok(Self { eigenvalues, basis })
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V diag(eigenvalues) V*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::diagonal(&self.eigenvalues);
        self.basis.mul(&d).mul(&self.basis.adjoint())
    }

    /// Frobenius norm of `V*V - I`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        self.basis
            .adjoint()
            .mul(&self.basis)
            .sub(&ComplexMatrix::identity(n))
            .frobenius_norm()
    }

    /// Largest pairwise eigenvalue distance.
    pub fn spectral_diameter(&self) -> f64 {
        let mut diam = 0.0f64;
        for (k, a) in self.eigenvalues.iter().enumerate() {
            for b in &self.eigenvalues[k + 1..] {
                diam = diam.max((a - b).norm());
            }
        }
        diam
    }

    /// Axis-aligned bounding box of the spectrum: `(x_min, x_max, y_min,
    /// y_max)`. Zero box for an empty spectrum.
    pub fn spectrum_bounds(&self) -> (f64, f64, f64, f64) {
        let mut xmin = f64::INFINITY;
        let mut xmax = f64::NEG_INFINITY;
        let mut ymin = f64::INFINITY;
        let mut ymax = f64::NEG_INFINITY;
        for z in &self.eigenvalues {
            xmin = xmin.min(z.re);
            xmax = xmax.max(z.re);
            ymin = ymin.min(z.im);
            ymax = ymax.max(z.im);
        }
        if self.eigenvalues.is_empty() {
            (0.0, 0.0, 0.0, 0.0)
        } else {
            (xmin, xmax, ymin, ymax)
        }
    }
}

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
///
/// Accepts matrices whose Hermitian defect is at most `1e-10 * (1 + ||H||_F)`
/// and works on the symmetrized copy, so the returned basis is exactly
/// unitary up to rotation roundoff and eigenvalues are exactly real.
pub fn hermitian_eigen(h: &ComplexMatrix) -> Result<HermitianEigen, LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    h.check_finite()?;
    let defect = h.hermitian_defect();
    let tol = HERMITIAN_TOL * (1.0 + h.frobenius_norm());
    if defect > tol {
        return Err(LinalgError::NotHermitian { defect, tol });
    }
    // Symmetrize once; the Jacobi updates below preserve exact Hermitian
    // symmetry because mirrored entries are produced by conjugating the same
    // rounded products.
    let (mut a, _) = real_imag_parts(h)?;
    let n = h.rows();
    let mut v = ComplexMatrix::identity(n);
    let frob = a.frobenius_norm();
    let target = JACOBI_TOL * frob;

    let mut converged = frob == 0.0 || n < 2;
    let mut last_off = 0.0;
    if !converged {
        for _sweep in 0..MAX_SWEEPS {
            let off = off_diagonal_norm(&a);
            last_off = off;
            if off <= target {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
        if !converged && off_diagonal_norm(&a) <= target {
            converged = true;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            sweeps: MAX_SWEEPS,
            off: last_off,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|j| a[(j, j)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&j| diag[j]).collect();
    let basis = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { eigenvalues, basis })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One Jacobi rotation annihilating the `(p, q)` entry. The rotation is
/// `U = I` except `U[p][p] = c`, `U[p][q] = -u s`, `U[q][p] = conj(u) s`,
/// `U[q][q] = c` with `u = a[p][q] / |a[p][q]|`; `a <- U* a U`, `v <- v U`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let n = a.rows();
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let u = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (app - aqq) / (2.0 * r);
    // Smaller-magnitude root of r t^2 + (app - aqq) t - r = 0.
    let t = if tau == 0.0 {
        1.0
    } else {
        tau.signum() / (tau.abs() + (tau * tau + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let us = u * s;
    let ubar_s = u.conj() * s;

    for j in 0..n {
        if j == p || j == q {
            continue;
        }
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * c + us * aqj;
        a[(q, j)] = -ubar_s * apj + aqj * c;
    }
    for i in 0..n {
        if i == p || i == q {
            continue;
        }
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * c + aiq * ubar_s;
        a[(i, q)] = -aip * us + aiq * c;
    }
    a[(p, p)] = Complex64::new(app + t * r, 0.0);
    a[(q, q)] = Complex64::new(aqq - t * r, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * c + viq * ubar_s;
        v[(i, q)] = -vip * us + viq * c;
    }
}

/// Options for [`normal_spectral_with`].
#[derive(Clone, Debug, Default)]
pub struct NormalSpectralOptions {
    /// Use the randomized joint-diagonalization route (a single Hermitian
    /// solve of `A + cB` for a seeded random `c`, verified and retried)
    /// instead of the clustered two-step reduction.
    pub random_fallback: bool,
    /// Seed for the fallback draws of `c`.
    pub fallback_seed: u64,
}

/// Spectral decomposition of a normal matrix via the clustered two-step
/// Hermitian reduction.
///
/// Eigenvalues are ordered by ascending real part, ties resolved by
/// ascending imaginary part inside each real-part cluster, so the output is
/// a deterministic function of the input.
pub fn normal_spectral(n: &ComplexMatrix) -> Result<SpectralDecomposition, LinalgError> {
    normal_spectral_with(n, &NormalSpectralOptions::default())
}

pub fn normal_spectral_with(
    n: &ComplexMatrix,
    options: &NormalSpectralOptions,
) -> Result<SpectralDecomposition, LinalgError> {
    if !n.is_square() {
        return Err(LinalgError::NotSquare {
            rows: n.rows(),
            cols: n.cols(),
        });
    }
    n.check_finite()?;
    let frob = n.frobenius_norm();
    let defect = n.normality_defect();
    let tol = NORMALITY_TOL * (1.0 + frob * frob);
    if defect > tol {
        return Err(LinalgError::NotNormal { defect, tol });
    }
    if options.random_fallback {
        return joint_diagonalize(n, options.fallback_seed);
    }

    // A marginal cluster split (Hermitian-part gap right at the threshold)
    // can leak anti-Hermitian mass across the split; retrying with a coarser
    // gap merges the offending clusters.
    let mut gap_scale = 1.0;
    let mut last_defect = 0.0;
    for _attempt in 0..3 {
        let dec = clustered_decomposition(n, gap_scale)?;
        let recon_defect = dec.reconstruct().sub(n).frobenius_norm();
        if recon_defect <= RECONSTRUCT_TOL * (1.0 + frob) {
            return Ok(dec);
        }
        last_defect = recon_defect;
        gap_scale *= 1000.0;
    }
    Err(LinalgError::NoConvergence {
        sweeps: MAX_SWEEPS,
        off: last_defect,
    })
}

fn clustered_decomposition(
    n: &ComplexMatrix,
    gap_scale: f64,
) -> Result<SpectralDecomposition, LinalgError> {
    let d = n.rows();
    let (a, b) = real_imag_parts(n)?;
    let ea = hermitian_eigen(&a)?;
    let xs = ea.eigenvalues();
    let max_x = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let gap = gap_scale * CLUSTER_GAP * (1.0 + max_x);

    let mut basis = ea.basis().clone();
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && xs[end] - xs[end - 1] <= gap {
            end += 1;
        }
        let len = end - start;
        if len > 1 {
            let vc = basis.column_block(start, len);
            let bc = vc.adjoint().mul(&b).mul(&vc);
            let eb = hermitian_eigen(&bc)?;
            let rotated = vc.mul(eb.basis());
            for i in 0..d {
                for j in 0..len {
                    basis[(i, start + j)] = rotated[(i, j)];
                }
            }
        }
        start = end;
    }

    // Rayleigh quotients in the joint basis give the complex eigenvalues.
    let nv = n.mul(&basis);
    let eigenvalues: Vec<Complex64> = (0..d)
        .map(|j| (0..d).map(|i| basis[(i, j)].conj() * nv[(i, j)]).sum())
        .collect();
    Ok(SpectralDecomposition { eigenvalues, basis })
}

/// Randomized joint diagonalization: solve `A + cB` for a random `c`, then
/// verify both parts actually became diagonal in that basis.
fn joint_diagonalize(n: &ComplexMatrix, seed: u64) -> Result<SpectralDecomposition, LinalgError> {
    let d = n.rows();
    let (a, b) = real_imag_parts(n)?;
    let scale = 1.0 + a.frobenius_norm() + b.frobenius_norm();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_off = 0.0;
    for _attempt in 0..8 {
        let c = 0.25 + 3.75 * rng.random::<f64>();
        let h = a.add(&b.scaled_re(c));
        let eh = hermitian_eigen(&h)?;
        let v = eh.basis();
        let da = v.adjoint().mul(&a).mul(v);
        let db = v.adjoint().mul(&b).mul(v);
        let off = off_diagonal_norm(&da).hypot(off_diagonal_norm(&db));
        last_off = off;
        if off <= 1e-9 * scale {
            let nv = n.mul(v);
            let eigenvalues: Vec<Complex64> = (0..d)
                .map(|j| (0..d).map(|i| v[(i, j)].conj() * nv[(i, j)]).sum())
                .collect();
            return Ok(SpectralDecomposition {
                eigenvalues,
                basis: v.clone(),
            });
        }
    }
    Err(LinalgError::NoConvergence {
        sweeps: 8,
        off: last_off,
    })
}
