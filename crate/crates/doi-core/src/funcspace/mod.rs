//! Scalar symbols on the plane and the function-space quantities attached to
//! them: sup norms over boxes, Littlewood-Paley pieces and Besov norms for
//! trigonometric polynomials, moduli of continuity with their averaged
//! transforms, and seminorm estimators.
//!
//! A symbol is a complex-valued function of `z = x + iy`. It is *not*
//! assumed analytic; conjugation-type symbols are first-class citizens,
//! which is why evaluation is a function of the point rather than a power
//! series.

mod modulus;
mod seminorm;
pub mod symbols;
mod window;

pub use modulus::{omega_star, omega_star_quadrature, ModulusOfContinuity};
pub use seminorm::{holder_seminorm, lambda_omega_seminorm, SeminormEstimate};
pub use window::{besov_norm, lp_pieces, window_weight, BesovLadder};

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FuncspaceError {
    #[error("symbol produced a non-finite value at ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("averaged modulus integral diverges: {0}")]
    DivergentTail(String),
    #[error("invalid symbol data: {0}")]
    BadFormat(String),
}

type FieldFn = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A scalar symbol `f(x + iy)` with optional one-sided partial derivatives.
/// The derivatives are consulted only on the coincidence diagonal of divided
/// differences; a symbol without them falls back to a zero derivative there.
#[derive(Clone)]
pub struct ScalarField2D {
    name: String,
    eval: FieldFn,
    dx: Option<FieldFn>,
    dy: Option<FieldFn>,
}

impl ScalarField2D {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            dx: None,
            dy: None,
        }
    }

    /// Attaches partial derivatives `df/dx` and `df/dy`.
    pub fn with_derivatives(
        mut self,
        dx: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        dy: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        self.dx = Some(Arc::new(dx));
        self.dy = Some(Arc::new(dy));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.eval)(z)
    }

    /// Partial derivative in `x` if the symbol carries one.
    pub fn dx(&self, z: Complex64) -> Option<Complex64> {
        self.dx.as_ref().map(|f| f(z))
    }

    /// Partial derivative in `y` if the symbol carries one.
    pub fn dy(&self, z: Complex64) -> Option<Complex64> {
        self.dy.as_ref().map(|f| f(z))
    }
}

impl fmt::Debug for ScalarField2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField2D")
            .field("name", &self.name)
            .field("has_derivatives", &self.dx.is_some())
            .finish()
    }
}

/// One term `coeff * exp(i (a x + b y))` of a trigonometric polynomial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrigTerm {
    pub a: f64,
    pub b: f64,
    pub coeff: Complex64,
}

impl TrigTerm {
    /// Euclidean length of the frequency vector `(a, b)`.
    pub fn freq_norm(&self) -> f64 {
        self.a.hypot(self.b)
    }
}

/// Finite sum of complex exponentials with real frequency vectors. Terms are
/// kept sorted by frequency and duplicate frequencies are merged, so equal
/// polynomials have equal term lists.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly2D {
    terms: Vec<TrigTerm>,
}

impl TrigPoly2D {
    pub fn new(terms: Vec<TrigTerm>) -> Result<Self, FuncspaceError> {
        for t in &terms {
            if !t.a.is_finite()
                || !t.b.is_finite()
                || !t.coeff.re.is_finite()
                || !t.coeff.im.is_finite()
            {
                return Err(FuncspaceError::BadFormat(
                    "trigonometric term with non-finite frequency or coefficient".into(),
                ));
            }
        }
        let mut sorted = terms;
        sorted.sort_by(|s, t| s.a.total_cmp(&t.a).then(s.b.total_cmp(&t.b)));
        let mut merged: Vec<TrigTerm> = Vec::with_capacity(sorted.len());
        for t in sorted {
            match merged.last_mut() {
                Some(last) if last.a == t.a && last.b == t.b => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
        Ok(Self { terms: merged })
    }

    pub fn zero() -> Self {
        Self { terms: vec![] }
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let phase = t.a * z.re + t.b * z.im;
            acc += t.coeff * Complex64::from_polar(1.0, phase);
        }
        acc
    }

    /// Largest frequency length; zero for the zero polynomial.
    pub fn band_radius(&self) -> f64 {
        self.terms.iter().fold(0.0f64, |m, t| m.max(t.freq_norm()))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&rhs.terms);
        Self::new(terms).expect("terms of valid polynomials are finite")
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| TrigTerm {
                a: t.a,
                b: t.b,
                coeff: t.coeff * c,
            })
            .collect();
        Self::new(terms).expect("terms of valid polynomials are finite")
    }

    /// View as a general symbol; derivatives are exact term-by-term.
    pub fn to_field(&self) -> ScalarField2D {
        let poly = self.clone();
        let dx_poly = self.clone();
        let dy_poly = self.clone();
        ScalarField2D::new(format!("trig[{} terms]", self.terms.len()), move |z| {
            poly.eval(z)
        })
        .with_derivatives(
            move |z| {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in &dx_poly.terms {
                    let phase = t.a * z.re + t.b * z.im;
                    acc += t.coeff * Complex64::new(0.0, t.a) * Complex64::from_polar(1.0, phase);
                }
                acc
            },
            move |z| {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in &dy_poly.terms {
                    let phase = t.a * z.re + t.b * z.im;
                    acc += t.coeff * Complex64::new(0.0, t.b) * Complex64::from_polar(1.0, phase);
                }
                acc
            },
        )
    }

    pub fn to_json(&self) -> String {
        let body = TrigPolyJson {
            terms: self
                .terms
                .iter()
                .map(|t| TrigTermJson {
                    a: t.a,
                    b: t.b,
                    re: t.coeff.re,
                    im: t.coeff.im,
                })
                .collect(),
        };
        serde_json::to_string(&body).expect("trig poly serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, FuncspaceError> {
        let body: TrigPolyJson =
            serde_json::from_str(text).map_err(|e| FuncspaceError::BadFormat(e.to_string()))?;
        Self::new(
            body.terms
                .into_iter()
                .map(|t| TrigTerm {
                    a: t.a,
                    b: t.b,
                    coeff: Complex64::new(t.re, t.im),
                })
                .collect(),
        )
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct TrigPolyJson {
    terms: Vec<TrigTermJson>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct TrigTermJson {
    a: f64,
    b: f64,
    re: f64,
    im: f64,
}

/// Largest frequency length of a trigonometric polynomial.
pub fn band_radius(f: &TrigPoly2D) -> f64 {
    f.band_radius()
}

/// Axis-aligned square region of the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxSpec {
    pub center: Complex64,
    pub half_width: f64,
}

impl BoxSpec {
    pub fn new(center: Complex64, half_width: f64) -> Result<Self, FuncspaceError> {
        if !(half_width > 0.0)
            || !half_width.is_finite()
            || !center.re.is_finite()
            || !center.im.is_finite()
        {
            return Err(FuncspaceError::BadParameter(format!(
                "box must have finite center and positive half width, got center ({}, {}), half width {}",
                center.re, center.im, half_width
            )));
        }
        Ok(Self { center, half_width })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z.re - self.center.re).abs() <= self.half_width
            && (z.im - self.center.im).abs() <= self.half_width
    }

    /// Projects a point into the box.
    pub fn clamp(&self, z: Complex64) -> Complex64 {
        Complex64::new(
            z.re.clamp(
                self.center.re - self.half_width,
                self.center.re + self.half_width,
            ),
            z.im.clamp(
                self.center.im - self.half_width,
                self.center.im + self.half_width,
            ),
        )
    }

    pub fn corners(&self) -> [Complex64; 4] {
        let h = self.half_width;
        [
            self.center + Complex64::new(-h, -h),
            self.center + Complex64::new(h, -h),
            self.center + Complex64::new(-h, h),
            self.center + Complex64::new(h, h),
        ]
    }

    pub fn edge_midpoints(&self) -> [Complex64; 4] {
        let h = self.half_width;
        [
            self.center + Complex64::new(-h, 0.0),
            self.center + Complex64::new(h, 0.0),
            self.center + Complex64::new(0.0, -h),
            self.center + Complex64::new(0.0, h),
        ]
    }
}

/// Result of an adaptive sup-norm scan.
#[derive(Clone, Copy, Debug)]
pub struct SupNorm {
    pub value: f64,
    /// Grid points per axis at which the scan stopped.
    pub refinement_level: u32,
}

const SUP_GRID_START: u32 = 64;
const SUP_GRID_MAX: u32 = 4096;
const SUP_REL_TOL: f64 = 1e-4;

/// Supremum of `|f|` over a box, estimated on uniform grids that double per
/// axis from 64 to 4096 points until the value moves by less than `1e-4`
/// relatively between levels.
pub fn sup_norm(f: &ScalarField2D, region: &BoxSpec) -> Result<SupNorm, FuncspaceError> {
    let mut prev: Option<f64> = None;
    let mut k = SUP_GRID_START;
    loop {
        let m = grid_max(f, region, k)?;
        if let Some(p) = prev {
            if (m - p).abs() <= SUP_REL_TOL * m {
                return Ok(SupNorm {
                    value: m,
                    refinement_level: k,
                });
            }
        }
        if k >= SUP_GRID_MAX {
            return Ok(SupNorm {
                value: m,
                refinement_level: k,
            });
        }
        prev = Some(m);
        k *= 2;
    }
}

fn grid_max(f: &ScalarField2D, region: &BoxSpec, points: u32) -> Result<f64, FuncspaceError> {
    let n = points as usize;
    let step = 2.0 * region.half_width / (n - 1) as f64;
    let x0 = region.center.re - region.half_width;
    let y0 = region.center.im - region.half_width;
    let mut best = 0.0f64;
    for i in 0..n {
        let x = x0 + step * i as f64;
        for j in 0..n {
            let y = y0 + step * j as f64;
            let v = f.eval(Complex64::new(x, y));
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(FuncspaceError::NonFinite { x, y });
            }
            best = best.max(v.norm());
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trig_terms_merge_and_sort() {
        let f = TrigPoly2D::new(vec![
            TrigTerm {
                a: 1.0,
                b: 0.0,
                coeff: c(1.0, 0.0),
            },
            TrigTerm {
                a: 0.0,
                b: 1.0,
                coeff: c(2.0, 0.0),
            },
            TrigTerm {
                a: 1.0,
                b: 0.0,
                coeff: c(0.5, 1.0),
            },
        ])
        .unwrap();
        assert_eq!(f.terms().len(), 2);
        assert_eq!(f.terms()[0].coeff, c(2.0, 0.0));
        assert_eq!(f.terms()[1].coeff, c(1.5, 1.0));
    }

    #[test]
    fn cancelled_terms_vanish() {
        let f = TrigPoly2D::new(vec![
            TrigTerm {
                a: 2.0,
                b: 1.0,
                coeff: c(1.0, -1.0),
            },
            TrigTerm {
                a: 2.0,
                b: 1.0,
                coeff: c(-1.0, 1.0),
            },
        ])
        .unwrap();
        assert!(f.is_zero());
        assert_eq!(f.band_radius(), 0.0);
    }

    #[test]
    fn band_radius_is_max_frequency_length() {
        let f = TrigPoly2D::new(vec![
            TrigTerm {
                a: 3.0,
                b: 4.0,
                coeff: c(1.0, 0.0),
            },
            TrigTerm {
                a: 1.0,
                b: 1.0,
                coeff: c(1.0, 0.0),
            },
        ])
        .unwrap();
        assert_eq!(band_radius(&f), 5.0);
    }

    #[test]
    fn eval_of_plain_exponential() {
        let f = TrigPoly2D::new(vec![TrigTerm {
            a: 1.0,
            b: 0.0,
            coeff: c(1.0, 0.0),
        }])
        .unwrap();
        let z = c(std::f64::consts::FRAC_PI_2, 7.0);
        let v = f.eval(z);
        assert!((v - c(0.0, 1.0)).norm() <= 1e-15);
    }

    #[test]
    fn trig_json_round_trip() {
        let f = TrigPoly2D::new(vec![
            TrigTerm {
                a: 0.75,
                b: -2.0,
                coeff: c(0.1, -0.9),
            },
            TrigTerm {
                a: 0.0,
                b: 0.0,
                coeff: c(3.0, 0.0),
            },
        ])
        .unwrap();
        let back = TrigPoly2D::from_json(&f.to_json()).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn sup_norm_of_unimodular_exponential_is_one() {
        let f = TrigPoly2D::new(vec![TrigTerm {
            a: 2.0,
            b: 1.0,
            coeff: c(1.0, 0.0),
        }])
        .unwrap();
        let region = BoxSpec::new(c(0.0, 0.0), 3.0).unwrap();
        let sup = sup_norm(&f.to_field(), &region).unwrap();
        assert!((sup.value - 1.0).abs() <= 1e-12);
        assert_eq!(sup.refinement_level, 128);
    }

    #[test]
    fn sup_norm_of_coordinate_function_hits_the_corner() {
        // |z| on a centered box attains sqrt(2) * half width at corners.
        let f = ScalarField2D::new("abs", |z| c(z.norm(), 0.0));
        let region = BoxSpec::new(c(0.0, 0.0), 2.0).unwrap();
        let sup = sup_norm(&f, &region).unwrap();
        let expect = 8.0f64.sqrt();
        assert!((sup.value - expect).abs() <= 1e-3 * expect);
    }

    #[test]
    fn sup_norm_rejects_non_finite_symbols() {
        let f = ScalarField2D::new("bad", |z| c(if z.re > 0.5 { f64::NAN } else { 1.0 }, 0.0));
        let region = BoxSpec::new(c(0.5, 0.0), 1.0).unwrap();
        assert!(matches!(
            sup_norm(&f, &region),
            Err(FuncspaceError::NonFinite { .. })
        ));
    }

    #[test]
    fn box_rejects_bad_half_width() {
        assert!(BoxSpec::new(c(0.0, 0.0), 0.0).is_err());
        assert!(BoxSpec::new(c(0.0, 0.0), -1.0).is_err());
        assert!(BoxSpec::new(c(f64::NAN, 0.0), 1.0).is_err());
    }

    #[test]
    fn field_derivatives_of_trig_poly_are_exact() {
        let f = TrigPoly2D::new(vec![TrigTerm {
            a: 2.0,
            b: -1.0,
            coeff: c(0.0, 1.0),
        }])
        .unwrap();
        let field = f.to_field();
        let z = c(0.3, 0.7);
        // d/dx adds a factor i*a, d/dy a factor i*b.
        let expect_dx = f.eval(z) * c(0.0, 2.0);
        let expect_dy = f.eval(z) * c(0.0, -1.0);
        assert!((field.dx(z).unwrap() - expect_dx).norm() <= 1e-15);
        assert!((field.dy(z).unwrap() - expect_dy).norm() <= 1e-15);
    }
}
