//! Builtin symbol library.
//!
//! A small set of named symbols shared by the experiment driver and the
//! tests: coordinate projections, radial powers, piecewise-smooth samples,
//! holomorphic monomials, single exponentials, and seeded random
//! trigonometric polynomials. Partial derivatives are attached wherever the
//! symbol has them (one-sided values at kinks), because divided differences
//! consult them on the coincidence diagonal.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{FuncspaceError, ScalarField2D, TrigPoly2D, TrigTerm};

/// `f(z) = z`.
pub fn identity() -> ScalarField2D {
    ScalarField2D::new("z", |z| z)
        .with_derivatives(|_| Complex64::new(1.0, 0.0), |_| Complex64::new(0.0, 1.0))
}

/// `f(z) = conj(z)`.
pub fn conjugate() -> ScalarField2D {
    ScalarField2D::new("conj", |z| z.conj())
        .with_derivatives(|_| Complex64::new(1.0, 0.0), |_| Complex64::new(0.0, -1.0))
}

/// `f(z) = Re z`.
pub fn real_part() -> ScalarField2D {
    ScalarField2D::new("re", |z| Complex64::new(z.re, 0.0))
        .with_derivatives(|_| Complex64::new(1.0, 0.0), |_| Complex64::new(0.0, 0.0))
}

/// `f(z) = Im z`.
pub fn imag_part() -> ScalarField2D {
    ScalarField2D::new("im", |z| Complex64::new(z.im, 0.0))
        .with_derivatives(|_| Complex64::new(0.0, 0.0), |_| Complex64::new(1.0, 0.0))
}

/// `f(z) = |z|^2`.
pub fn abs_squared() -> ScalarField2D {
    ScalarField2D::new("abs2", |z| Complex64::new(z.norm_sqr(), 0.0)).with_derivatives(
        |z| Complex64::new(2.0 * z.re, 0.0),
        |z| Complex64::new(2.0 * z.im, 0.0),
    )
}

/// `f(z) = |z|^alpha` for `alpha > 0`. The gradient convention at the
/// origin (where none exists for alpha <= 1) is zero.
pub fn abs_power(alpha: f64) -> Result<ScalarField2D, FuncspaceError> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(FuncspaceError::BadParameter(format!(
            "radial power exponent must be positive, got {alpha}"
        )));
    }
    let name = format!("abs_pow({alpha})");
    let a1 = alpha;
    let a2 = alpha;
    let a3 = alpha;
    Ok(
        ScalarField2D::new(name, move |z| Complex64::new(z.norm().powf(a1), 0.0)).with_derivatives(
            move |z| {
                let r = z.norm();
                if r == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(a2 * z.re * r.powf(a2 - 2.0), 0.0)
                }
            },
            move |z| {
                let r = z.norm();
                if r == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(a3 * z.im * r.powf(a3 - 2.0), 0.0)
                }
            },
        ),
    )
}

/// `f(z) = min(|z|, 1)`, a piecewise-smooth radial plateau. On the unit
/// circle the inside gradient is used.
pub fn capped_abs() -> ScalarField2D {
    ScalarField2D::new("cap_abs", |z| Complex64::new(z.norm().min(1.0), 0.0)).with_derivatives(
        |z| {
            let r = z.norm();
            if r == 0.0 || r > 1.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(z.re / r, 0.0)
            }
        },
        |z| {
            let r = z.norm();
            if r == 0.0 || r > 1.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(z.im / r, 0.0)
            }
        },
    )
}

/// `f(z) = max(x, 0) + i max(y, 0)`, a hinge in each coordinate with the
/// zero-side convention on the kink.
pub fn ramp() -> ScalarField2D {
    ScalarField2D::new("ramp", |z| Complex64::new(z.re.max(0.0), z.im.max(0.0))).with_derivatives(
        |z| Complex64::new(if z.re > 0.0 { 1.0 } else { 0.0 }, 0.0),
        |z| Complex64::new(0.0, if z.im > 0.0 { 1.0 } else { 0.0 }),
    )
}

/// `f(z) = z^k`.
pub fn power(k: u32) -> ScalarField2D {
    let name = format!("zpow({k})");
    ScalarField2D::new(name, move |z| z.powu(k)).with_derivatives(
        move |z| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                z.powu(k - 1) * k as f64
            }
        },
        move |z| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                z.powu(k - 1) * k as f64 * Complex64::new(0.0, 1.0)
            }
        },
    )
}

/// The single exponential `exp(i (a x + b y))` as a trigonometric
/// polynomial.
pub fn exponential(a: f64, b: f64) -> Result<TrigPoly2D, FuncspaceError> {
    TrigPoly2D::new(vec![TrigTerm {
        a,
        b,
        coeff: Complex64::new(1.0, 0.0),
    }])
}

/// Seeded random trigonometric polynomial: `terms` frequencies drawn
/// uniformly from a square of side `2 * freq_scale`, complex Gaussian
/// coefficients scaled by `1/sqrt(terms)`.
pub fn random_trig(terms: usize, freq_scale: f64, seed: u64) -> TrigPoly2D {
    assert!(terms >= 1, "random polynomial needs at least one term");
    assert!(
        freq_scale > 0.0 && freq_scale.is_finite(),
        "frequency scale must be positive"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (terms as f64).sqrt();
    let mut list = Vec::with_capacity(terms);
    for _ in 0..terms {
        let a = freq_scale * (2.0 * rng.random::<f64>() - 1.0);
        let b = freq_scale * (2.0 * rng.random::<f64>() - 1.0);
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        list.push(TrigTerm {
            a,
            b,
            coeff: Complex64::new(re * scale, im * scale),
        });
    }
    TrigPoly2D::new(list).expect("sampled terms are finite")
}
