//! Seeded construction of normal matrix pairs at a prescribed distance.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::funcspace::BoxSpec;
use crate::linalg::{
    hermitian_eigen, normal_spectral, operator_norm, singular_values, ComplexMatrix,
    SingularValues, SpectralDecomposition,
};
use crate::seedmix;
use crate::theorems::TheoremError;

/// How the second operator of a pair is derived from the first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    /// Same eigenbasis, perturbed eigenvalues; the distance is exact.
    SharedBasis,
    /// Two unrelated bases and spectra, jointly rescaled to the distance.
    Independent,
    /// Unitary conjugation `N2 = V N1 V*`, with the rotation angle solved
    /// for the distance.
    Conjugated,
}

impl PairMode {
    pub const ALL: [PairMode; 3] = [
        PairMode::SharedBasis,
        PairMode::Independent,
        PairMode::Conjugated,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PairMode::SharedBasis => "shared_basis",
            PairMode::Independent => "independent",
            PairMode::Conjugated => "conjugated",
        }
    }
}

/// Request for one random pair of normal matrices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalPairSpec {
    pub dim: usize,
    pub mode: PairMode,
    pub eps: f64,
    pub seed: u64,
}

impl NormalPairSpec {
    pub fn validate(&self) -> Result<(), TheoremError> {
        if self.dim == 0 {
            return Err(TheoremError::BadSpec("dimension must be at least 1".into()));
        }
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(TheoremError::BadSpec(format!(
                "target distance must be positive and finite, got {}",
                self.eps
            )));
        }
        Ok(())
    }
}

fn complex_in_square(rng: &mut ChaCha8Rng, half: f64) -> Complex64 {
    Complex64::new(
        (rng.random::<f64>() * 2.0 - 1.0) * half,
        (rng.random::<f64>() * 2.0 - 1.0) * half,
    )
}

/// Unitary factor of a random Hermitian matrix; seeded and deterministic.
pub fn random_unitary(dim: usize, seed: u64) -> Result<ComplexMatrix, TheoremError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| complex_in_square(&mut rng, 1.0));
    let h = g.add(&g.adjoint()).scaled_re(0.5);
    Ok(hermitian_eigen(&h)?.basis().clone())
}

fn random_spectrum(dim: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim).map(|_| complex_in_square(&mut rng, 2.0)).collect()
}

fn assemble(u: &ComplexMatrix, lambda: &[Complex64]) -> ComplexMatrix {
    u.mul(&ComplexMatrix::diagonal(lambda)).mul(&u.adjoint())
}

/// Shared-basis building blocks: unitary, base spectrum, and a perturbation
/// rescaled so its largest modulus is exactly `eps`. Exposed inside the
/// module so the witness search can nudge individual eigenvalues.
pub(crate) fn shared_basis_parts(
    dim: usize,
    eps: f64,
    seed: u64,
) -> Result<(ComplexMatrix, Vec<Complex64>, Vec<Complex64>), TheoremError> {
    let u = random_unitary(dim, seedmix::derive(seed, 1))?;
    let lambda = random_spectrum(dim, seedmix::derive(seed, 2));
    let mut rng = ChaCha8Rng::seed_from_u64(seedmix::derive(seed, 3));
    let mut delta: Vec<Complex64> = (0..dim).map(|_| complex_in_square(&mut rng, 1.0)).collect();
    let peak = delta.iter().map(|d| d.norm()).fold(0.0f64, f64::max);
    if peak == 0.0 {
        delta[0] = Complex64::new(eps, 0.0);
    } else {
        let c = eps / peak;
        for d in &mut delta {
            *d *= c;
        }
    }
    Ok((u, lambda, delta))
}

pub(crate) fn assemble_shared(
    u: &ComplexMatrix,
    lambda: &[Complex64],
    delta: &[Complex64],
) -> (ComplexMatrix, ComplexMatrix) {
    let shifted: Vec<Complex64> = lambda.iter().zip(delta).map(|(l, d)| l + d).collect();
    (assemble(u, lambda), assemble(u, &shifted))
}

/// Unitary `exp(i s H)` through the eigendecomposition of `H`.
fn unitary_exponent(h_eigen: &crate::linalg::HermitianEigen, s: f64) -> ComplexMatrix {
    let phases: Vec<Complex64> = h_eigen
        .eigenvalues()
        .iter()
        .map(|&x| Complex64::from_polar(1.0, s * x))
        .collect();
    let w = h_eigen.basis();
    w.mul(&ComplexMatrix::diagonal(&phases)).mul(&w.adjoint())
}

pub(crate) fn conjugated_pair(
    dim: usize,
    eps: f64,
    seed: u64,
) -> Result<(ComplexMatrix, ComplexMatrix), TheoremError> {
    let u = random_unitary(dim, seedmix::derive(seed, 1))?;
    let lambda = random_spectrum(dim, seedmix::derive(seed, 2));
    let n1 = assemble(&u, &lambda);

    let mut rng = ChaCha8Rng::seed_from_u64(seedmix::derive(seed, 4));
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| complex_in_square(&mut rng, 1.0));
    let mut h = g.add(&g.adjoint()).scaled_re(0.5);
    let hnorm = h.frobenius_norm();
    if hnorm > 0.0 {
        h = h.scaled_re(1.0 / hnorm);
    }
    let h_eigen = hermitian_eigen(&h)?;

    let distance = |s: f64| -> Result<f64, TheoremError> {
        let v = unitary_exponent(&h_eigen, s);
        Ok(operator_norm(&v.mul(&n1).mul(&v.adjoint()).sub(&n1))?)
    };

    let full = distance(std::f64::consts::PI)?;
    if full < eps {
        return Err(TheoremError::ScaleUnreachable(format!(
            "conjugation cannot move a {dim}-dimensional operator by {eps:.3e}; \
             the full rotation reaches only {full:.3e}"
        )));
    }
    // distance(0) = 0 and distance(pi) >= eps, so bisection on the level
    // set converges; monotonicity is not required.
    let mut lo = 0.0f64;
    let mut hi = std::f64::consts::PI;
    let mut mid = 0.5 * hi;
    for _ in 0..80 {
        mid = 0.5 * (lo + hi);
        let d = distance(mid)?;
        if (d - eps).abs() <= 0.02 * eps {
            break;
        }
        if d < eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let v = unitary_exponent(&h_eigen, mid);
    let n2 = v.mul(&n1).mul(&v.adjoint());
    Ok((n1, n2))
}

/// Draws a pair of normal matrices with `||N1 - N2||` within a few percent
/// of the requested distance (exact for the shared-basis mode).
pub fn random_normal_pair(
    spec: &NormalPairSpec,
) -> Result<(ComplexMatrix, ComplexMatrix), TheoremError> {
    spec.validate()?;
    match spec.mode {
        PairMode::SharedBasis => {
            let (u, lambda, delta) = shared_basis_parts(spec.dim, spec.eps, spec.seed)?;
            Ok(assemble_shared(&u, &lambda, &delta))
        }
        PairMode::Independent => {
            let u1 = random_unitary(spec.dim, seedmix::derive(spec.seed, 1))?;
            let u2 = random_unitary(spec.dim, seedmix::derive(spec.seed, 5))?;
            let n1 = assemble(
                &u1,
                &random_spectrum(spec.dim, seedmix::derive(spec.seed, 2)),
            );
            let n2 = assemble(
                &u2,
                &random_spectrum(spec.dim, seedmix::derive(spec.seed, 6)),
            );
            let d = operator_norm(&n1.sub(&n2))?;
            if d == 0.0 {
                return Err(TheoremError::ScaleUnreachable(
                    "independent draw produced identical operators".into(),
                ));
            }
            let c = spec.eps / d;
            Ok((n1.scaled_re(c), n2.scaled_re(c)))
        }
        PairMode::Conjugated => conjugated_pair(spec.dim, spec.eps, spec.seed),
    }
}

/// A pair with everything the ratio computations reuse: spectral
/// decompositions, the difference, and its singular values.
#[derive(Clone, Debug)]
pub struct PairContext {
    pub n1: ComplexMatrix,
    pub n2: ComplexMatrix,
    pub dec1: SpectralDecomposition,
    pub dec2: SpectralDecomposition,
    pub diff: ComplexMatrix,
    pub diff_singular: SingularValues,
    /// Operator norm of the difference.
    pub eps_achieved: f64,
    /// The generating spec when the pair came from [`random_normal_pair`].
    pub origin: Option<NormalPairSpec>,
}

impl PairContext {
    pub fn from_pair(n1: ComplexMatrix, n2: ComplexMatrix) -> Result<Self, TheoremError> {
        if n1.rows() != n2.rows() || n1.cols() != n2.cols() {
            return Err(TheoremError::BadSpec(format!(
                "pair dimensions differ: {}x{} vs {}x{}",
                n1.rows(),
                n1.cols(),
                n2.rows(),
                n2.cols()
            )));
        }
        let dec1 = normal_spectral(&n1)?;
        let dec2 = normal_spectral(&n2)?;
        let diff = n1.sub(&n2);
        let diff_singular = singular_values(&diff)?;
        let eps_achieved = diff_singular.largest();
        Ok(Self {
            n1,
            n2,
            dec1,
            dec2,
            diff,
            diff_singular,
            eps_achieved,
            origin: None,
        })
    }

    pub fn from_spec(spec: &NormalPairSpec) -> Result<Self, TheoremError> {
        let (n1, n2) = random_normal_pair(spec)?;
        let mut ctx = Self::from_pair(n1, n2)?;
        ctx.origin = Some(*spec);
        Ok(ctx)
    }

    pub fn dim(&self) -> usize {
        self.dec1.dim()
    }

    /// Square box covering both spectra, inflated by one unit; the domain
    /// for sup-norm and seminorm estimation.
    pub fn estimation_box(&self) -> Result<BoxSpec, TheoremError> {
        let (x1a, x1b, y1a, y1b) = self.dec1.spectrum_bounds();
        let (x2a, x2b, y2a, y2b) = self.dec2.spectrum_bounds();
        let (xmin, xmax) = (x1a.min(x2a), x1b.max(x2b));
        let (ymin, ymax) = (y1a.min(y2a), y1b.max(y2b));
        let center = Complex64::new(0.5 * (xmin + xmax), 0.5 * (ymin + ymax));
        let half = 0.5 * (xmax - xmin).max(ymax - ymin) + 1.0;
        Ok(BoxSpec::new(center, half)?)
    }
}
