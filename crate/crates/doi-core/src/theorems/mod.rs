//! Empirical verification of perturbation bounds for functions of normal
//! matrices.
//!
//! Each bound has the shape `lhs <= const * rhs` with an unspecified
//! constant. The harness computes the ratio `lhs / rhs` on concrete pairs,
//! so a run charts the constant empirically: ratios must stay bounded as
//! parameters sweep, and known sharp witnesses must push them to 1. The
//! norm estimates entering denominators are box-limited lower bounds, which
//! makes every reported ratio a conservative upper estimate.

pub mod generate;
pub mod search;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{apply_function_spectral, CalculusError};
use crate::funcspace::{
    besov_norm, holder_seminorm, lambda_omega_seminorm, omega_star, sup_norm, FuncspaceError,
    ModulusOfContinuity, ScalarField2D, TrigPoly2D,
};
use crate::linalg::{schatten_of_values, singular_values, ComplexMatrix, LinalgError};

pub use generate::{random_normal_pair, random_unitary, NormalPairSpec, PairContext, PairMode};
pub use search::{adversarial_search, ConstantEstimate, SearchGrid};

#[derive(Debug, Error)]
pub enum TheoremError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Funcspace(#[from] FuncspaceError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error("invalid pair request: {0}")]
    BadSpec(String),
    #[error("requested distance is unreachable: {0}")]
    ScaleUnreachable(String),
    #[error("denominator vanishes: {0}")]
    ZeroDenominator(String),
    #[error("tag and parameters do not fit: {0}")]
    TagParamMismatch(String),
    #[error("computed value is not finite: {0}")]
    NonFinite(String),
}

/// The verified inequalities, named by what they bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremTag {
    /// Band-limited symbols: operator norm against `sigma * sup|f| * distance`.
    KeyIneq,
    /// Operator-Lipschitz bound with the first-order Besov norm.
    LipBesov,
    /// Trace-norm version of the Besov Lipschitz bound.
    TraceBesov,
    /// Hoelder bound of order alpha.
    Holder,
    /// General modulus-of-continuity bound through the tail transform.
    Omega,
    /// Schatten ladder: `S_{p/alpha}` of the function difference against
    /// `S_p` of the perturbation.
    SchattenP,
    /// `S_{1/alpha}` against the alpha-order Besov norm and `S_1`.
    BesovAlphaS1,
}

impl TheoremTag {
    pub const ALL: [TheoremTag; 7] = [
        TheoremTag::KeyIneq,
        TheoremTag::LipBesov,
        TheoremTag::TraceBesov,
        TheoremTag::Holder,
        TheoremTag::Omega,
        TheoremTag::SchattenP,
        TheoremTag::BesovAlphaS1,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TheoremTag::KeyIneq => "key_ineq",
            TheoremTag::LipBesov => "lip_besov",
            TheoremTag::TraceBesov => "trace_besov",
            TheoremTag::Holder => "holder",
            TheoremTag::Omega => "omega",
            TheoremTag::SchattenP => "schatten_p",
            TheoremTag::BesovAlphaS1 => "besov_alpha_s1",
        }
    }
}

/// A symbol together with its trigonometric structure when it has one.
/// Besov norms and band radii exist only for the trigonometric kind.
#[derive(Clone, Debug)]
pub enum Symbol {
    Field(ScalarField2D),
    Trig(TrigPoly2D),
}

impl Symbol {
    pub fn name(&self) -> String {
        match self {
            Symbol::Field(f) => f.name().to_string(),
            Symbol::Trig(t) => format!("trig[{} terms]", t.terms().len()),
        }
    }

    pub fn field(&self) -> ScalarField2D {
        match self {
            Symbol::Field(f) => f.clone(),
            Symbol::Trig(t) => t.to_field(),
        }
    }

    pub fn trig(&self) -> Option<&TrigPoly2D> {
        match self {
            Symbol::Field(_) => None,
            Symbol::Trig(t) => Some(t),
        }
    }
}

/// Knobs for one ratio evaluation. `budget` and `seed` drive the seminorm
/// estimators; `alpha`, `p`, `omega` apply per tag.
#[derive(Clone, Debug)]
pub struct RatioParams {
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub omega: Option<ModulusOfContinuity>,
    pub budget: u64,
    pub seed: u64,
}

impl Default for RatioParams {
    fn default() -> Self {
        Self {
            alpha: None,
            p: None,
            omega: None,
            budget: 800,
            seed: 0,
        }
    }
}

/// One verified inequality instance: the ratio, both sides, and everything
/// needed to reproduce it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RatioReport {
    pub tag: String,
    pub symbol: String,
    pub dim: usize,
    pub mode: Option<String>,
    pub eps_achieved: f64,
    /// The distance the generator was asked for, when the pair came from one.
    pub eps_requested: Option<f64>,
    pub ratio: f64,
    pub numerator: f64,
    pub denominator: f64,
    /// Holder only: the ratio with the `1/(1 - alpha)` growth factored out.
    pub normalized_ratio: Option<f64>,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub l: Option<usize>,
    pub omega: Option<String>,
    /// Band radius when the bound is band-limited.
    pub sigma: Option<f64>,
    /// Estimated seminorm entering the denominator, when one does.
    pub seminorm: Option<f64>,
    pub budget: u64,
    pub seed: u64,
    pub pair_seed: Option<u64>,
    pub box_center: (f64, f64),
    pub box_half_width: f64,
    pub eigenvalues_left: Vec<(f64, f64)>,
    pub eigenvalues_right: Vec<(f64, f64)>,
    pub note: String,
}

fn digest(values: &[Complex64]) -> Vec<(f64, f64)> {
    values.iter().map(|z| (z.re, z.im)).collect()
}

fn require_alpha(params: &RatioParams, tag: &str) -> Result<f64, TheoremError> {
    match params.alpha {
        Some(a) if a > 0.0 && a < 1.0 => Ok(a),
        Some(a) => Err(TheoremError::TagParamMismatch(format!(
            "{tag} needs alpha in (0, 1), got {a}"
        ))),
        None => Err(TheoremError::TagParamMismatch(format!(
            "{tag} needs alpha in (0, 1)"
        ))),
    }
}

fn require_p(params: &RatioParams, tag: &str) -> Result<f64, TheoremError> {
    match params.p {
        Some(p) if p > 1.0 && p.is_finite() => Ok(p),
        Some(p) => Err(TheoremError::TagParamMismatch(format!(
            "{tag} needs a finite p > 1, got {p}"
        ))),
        None => Err(TheoremError::TagParamMismatch(format!(
            "{tag} needs a finite p > 1"
        ))),
    }
}

fn require_trig<'a>(symbol: &'a Symbol, tag: &str) -> Result<&'a TrigPoly2D, TheoremError> {
    symbol.trig().ok_or_else(|| {
        TheoremError::TagParamMismatch(format!(
            "{tag} needs a trigonometric symbol; {} carries no frequency data",
            symbol.name()
        ))
    })
}

/// `f(N1) - f(N2)` evaluated through the cached decompositions.
pub fn function_difference(
    symbol: &Symbol,
    ctx: &PairContext,
) -> Result<ComplexMatrix, TheoremError> {
    let field = symbol.field();
    let f1 = apply_function_spectral(&field, &ctx.dec1)?;
    let f2 = apply_function_spectral(&field, &ctx.dec2)?;
    Ok(f1.sub(&f2))
}

const NOTE_EXACT_BESOV: &str = "Besov norm computed exactly from the dyadic ladder";
const NOTE_LOWER_BOUND: &str =
    "seminorm is a box-limited lower-bound estimate, so the ratio is a conservative upper estimate";
const NOTE_SUP_BOX: &str = "sup norm estimated on the spectra bounding box inflated by one unit";

/// Computes the empirical ratio of one inequality on one pair.
pub fn theorem_ratio(
    tag: TheoremTag,
    symbol: &Symbol,
    ctx: &PairContext,
    params: &RatioParams,
) -> Result<RatioReport, TheoremError> {
    if !(ctx.eps_achieved > 0.0) {
        return Err(TheoremError::ZeroDenominator(
            "the operators coincide, so every distance factor vanishes".into(),
        ));
    }
    let diff_f = function_difference(symbol, ctx)?;
    let fs = singular_values(&diff_f)?;
    let bx = ctx.estimation_box()?;
    let field = symbol.field();

    let mut seminorm = None;
    let mut sigma = None;
    let mut omega_name = None;
    let note;

    let (numerator, denominator) = match tag {
        TheoremTag::KeyIneq => {
            let trig = require_trig(symbol, tag.name())?;
            let band = trig.band_radius();
            sigma = Some(band);
            let sup = sup_norm(&field, &bx)?.value;
            note = NOTE_SUP_BOX;
            (fs.largest(), band * sup * ctx.eps_achieved)
        }
        TheoremTag::LipBesov => {
            let trig = require_trig(symbol, tag.name())?;
            note = NOTE_EXACT_BESOV;
            (fs.largest(), besov_norm(trig, 1.0)? * ctx.eps_achieved)
        }
        TheoremTag::TraceBesov => {
            let trig = require_trig(symbol, tag.name())?;
            note = NOTE_EXACT_BESOV;
            (
                schatten_of_values(fs.values(), 1.0)?,
                besov_norm(trig, 1.0)? * schatten_of_values(ctx.diff_singular.values(), 1.0)?,
            )
        }
        TheoremTag::Holder => {
            let alpha = require_alpha(params, tag.name())?;
            let est = holder_seminorm(&field, alpha, &bx, params.budget, params.seed)?;
            seminorm = Some(est.value);
            note = NOTE_LOWER_BOUND;
            (fs.largest(), est.value * ctx.eps_achieved.powf(alpha))
        }
        TheoremTag::Omega => {
            let om = params.omega.as_ref().ok_or_else(|| {
                TheoremError::TagParamMismatch(
                    "the modulus bound needs a modulus of continuity".into(),
                )
            })?;
            omega_name = Some(om.name());
            let est = lambda_omega_seminorm(&field, om, &bx, params.budget, params.seed)?;
            seminorm = Some(est.value);
            note = NOTE_LOWER_BOUND;
            (fs.largest(), est.value * omega_star(om, ctx.eps_achieved)?)
        }
        TheoremTag::SchattenP => {
            let alpha = require_alpha(params, tag.name())?;
            let p = require_p(params, tag.name())?;
            let est = holder_seminorm(&field, alpha, &bx, params.budget, params.seed)?;
            seminorm = Some(est.value);
            note = NOTE_LOWER_BOUND;
            (
                schatten_of_values(fs.values(), p / alpha)?,
                est.value * schatten_of_values(ctx.diff_singular.values(), p)?.powf(alpha),
            )
        }
        TheoremTag::BesovAlphaS1 => {
            let alpha = require_alpha(params, tag.name())?;
            let trig = require_trig(symbol, tag.name())?;
            note = NOTE_EXACT_BESOV;
            (
                schatten_of_values(fs.values(), 1.0 / alpha)?,
                besov_norm(trig, alpha)?
                    * schatten_of_values(ctx.diff_singular.values(), 1.0)?.powf(alpha),
            )
        }
    };

    finish_report(
        tag.name(),
        symbol,
        ctx,
        params,
        numerator,
        denominator,
        seminorm,
        sigma,
        omega_name,
        note,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish_report(
    tag: &str,
    symbol: &Symbol,
    ctx: &PairContext,
    params: &RatioParams,
    numerator: f64,
    denominator: f64,
    seminorm: Option<f64>,
    sigma: Option<f64>,
    omega_name: Option<String>,
    note: &str,
) -> Result<RatioReport, TheoremError> {
    if !numerator.is_finite() || !denominator.is_finite() {
        return Err(TheoremError::NonFinite(format!(
            "{tag}: numerator {numerator}, denominator {denominator}"
        )));
    }
    if !(denominator > 0.0) {
        return Err(TheoremError::ZeroDenominator(format!(
            "{tag}: denominator is {denominator}"
        )));
    }
    let ratio = numerator / denominator;
    let normalized_ratio = match (tag, params.alpha) {
        ("holder", Some(a)) => Some(ratio * (1.0 - a)),
        _ => None,
    };
    let bx = ctx.estimation_box()?;
    Ok(RatioReport {
        tag: tag.to_string(),
        symbol: symbol.name(),
        dim: ctx.dim(),
        mode: ctx.origin.map(|s| s.mode.name().to_string()),
        eps_achieved: ctx.eps_achieved,
        eps_requested: ctx.origin.map(|s| s.eps),
        ratio,
        numerator,
        denominator,
        normalized_ratio,
        alpha: params.alpha,
        p: params.p,
        l: None,
        omega: omega_name,
        sigma,
        seminorm,
        budget: params.budget,
        seed: params.seed,
        pair_seed: ctx.origin.map(|s| s.seed),
        box_center: (bx.center.re, bx.center.im),
        box_half_width: bx.half_width,
        eigenvalues_left: digest(ctx.dec1.eigenvalues()),
        eigenvalues_right: digest(ctx.dec2.eigenvalues()),
        note: note.to_string(),
    })
}

/// One singular value of the function difference with its decay weight.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WeakSingularRow {
    pub j: usize,
    pub s: f64,
    /// `(1 + j)^alpha * s_j`.
    pub weighted: f64,
}

/// Weak-type decay table of `f(N1) - f(N2)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeakSingularTable {
    pub alpha: f64,
    /// `sup_j (1 + j)^alpha s_j`.
    pub quasinorm: f64,
    /// The `S_{1/alpha}` norm of the same matrix; dominates the quasinorm.
    pub strong_quasinorm: f64,
    pub rows: Vec<WeakSingularRow>,
}

/// Tabulates the weighted singular value decay of the function difference.
pub fn weak_singular_check(
    symbol: &Symbol,
    alpha: f64,
    ctx: &PairContext,
) -> Result<WeakSingularTable, TheoremError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(TheoremError::TagParamMismatch(format!(
            "weak-type check needs alpha in (0, 1), got {alpha}"
        )));
    }
    let diff_f = function_difference(symbol, ctx)?;
    let fs = singular_values(&diff_f)?;
    let rows: Vec<WeakSingularRow> = fs
        .values()
        .iter()
        .enumerate()
        .map(|(j, &s)| WeakSingularRow {
            j,
            s,
            weighted: (1.0 + j as f64).powf(alpha) * s,
        })
        .collect();
    let quasinorm = rows.iter().map(|r| r.weighted).fold(0.0f64, f64::max);
    let strong_quasinorm = schatten_of_values(fs.values(), 1.0 / alpha)?;
    Ok(WeakSingularTable {
        alpha,
        quasinorm,
        strong_quasinorm,
        rows,
    })
}

/// Partial power sums of the singular values at one truncation length.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PartialSumRow {
    pub l: usize,
    /// `sum_{j<=l} s_j(f(N1)-f(N2))^{p/alpha}`.
    pub lhs: f64,
    /// `sum_{j<=l} s_j(N1-N2)^p`.
    pub rhs: f64,
    /// `lhs / (seminorm^{p/alpha} * rhs)`; absent when that denominator
    /// vanishes.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartialSumTable {
    pub alpha: f64,
    pub p: f64,
    pub seminorm: f64,
    pub rows: Vec<PartialSumRow>,
}

/// Compares truncated singular value power sums of the function difference
/// against those of the perturbation, one row per truncation length.
pub fn partial_sum_check(
    symbol: &Symbol,
    alpha: f64,
    p: f64,
    ctx: &PairContext,
    params: &RatioParams,
) -> Result<PartialSumTable, TheoremError> {
    let ps = RatioParams {
        alpha: Some(alpha),
        p: Some(p),
        ..params.clone()
    };
    let alpha = require_alpha(&ps, "partial sum check")?;
    let p = require_p(&ps, "partial sum check")?;
    let diff_f = function_difference(symbol, ctx)?;
    let fs = singular_values(&diff_f)?;
    let bx = ctx.estimation_box()?;
    let field = symbol.field();
    let est = holder_seminorm(&field, alpha, &bx, params.budget, params.seed)?;
    let scale = est.value.powf(p / alpha);

    let mut rows = Vec::with_capacity(ctx.dim());
    let mut lhs = 0.0f64;
    let mut rhs = 0.0f64;
    for l in 0..ctx.dim() {
        lhs += fs.values()[l].powf(p / alpha);
        rhs += ctx.diff_singular.values()[l].powf(p);
        let den = scale * rhs;
        let ratio = if den > 0.0 && den.is_finite() {
            Some(lhs / den)
        } else {
            None
        };
        rows.push(PartialSumRow { l, lhs, rhs, ratio });
    }
    Ok(PartialSumTable {
        alpha,
        p,
        seminorm: est.value,
        rows,
    })
}

const NOTE_QUASI: &str = "denominator convention: seminorm * max(|X|, |Y|)^alpha * |Q|^(1-alpha) \
     with X, Y the two transformation defects";

/// Ratio for the coupled difference `f(N1) Q - Q f(N2)`. The denominator
/// convention is recorded in the report note; `alpha = 1` turns it into a
/// plain commutator-style bound. `Q = I` reproduces the Hoelder ratio.
pub fn quasicommutator_ratio(
    symbol: &Symbol,
    ctx: &PairContext,
    q: &ComplexMatrix,
    alpha: f64,
    params: &RatioParams,
) -> Result<RatioReport, TheoremError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(TheoremError::TagParamMismatch(format!(
            "coupled ratio needs alpha in (0, 1], got {alpha}"
        )));
    }
    if q.rows() != ctx.dim() || q.cols() != ctx.dim() {
        return Err(TheoremError::BadSpec(format!(
            "coupling must be {0}x{0} to match the pair, got {1}x{2}",
            ctx.dim(),
            q.rows(),
            q.cols()
        )));
    }
    let field = symbol.field();
    let f1 = apply_function_spectral(&field, &ctx.dec1)?;
    let f2 = apply_function_spectral(&field, &ctx.dec2)?;
    let lhs = f1.mul(q).sub(&q.mul(&f2));
    let x_part = ctx.n1.mul(q).sub(&q.mul(&ctx.n2));
    let y_part = ctx.n1.adjoint().mul(q).sub(&q.mul(&ctx.n2.adjoint()));

    let numerator = singular_values(&lhs)?.largest();
    let x_norm = singular_values(&x_part)?.largest();
    let y_norm = singular_values(&y_part)?.largest();
    let q_norm = singular_values(q)?.largest();

    let bx = ctx.estimation_box()?;
    let est = holder_seminorm(&field, alpha, &bx, params.budget, params.seed)?;
    let denominator = est.value * x_norm.max(y_norm).powf(alpha) * q_norm.powf(1.0 - alpha);

    let ps = RatioParams {
        alpha: Some(alpha),
        ..params.clone()
    };
    finish_report(
        "quasicommutator",
        symbol,
        ctx,
        &ps,
        numerator,
        denominator,
        Some(est.value),
        None,
        None,
        NOTE_QUASI,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::symbols;
    use crate::linalg::weak_quasinorm;

    fn scalar_pair(a: Complex64, b: Complex64) -> PairContext {
        PairContext::from_pair(ComplexMatrix::diagonal(&[a]), ComplexMatrix::diagonal(&[b]))
            .unwrap()
    }

    fn diag_pair(left: &[Complex64], right: &[Complex64]) -> PairContext {
        PairContext::from_pair(
            ComplexMatrix::diagonal(left),
            ComplexMatrix::diagonal(right),
        )
        .unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn holder_params(alpha: f64) -> RatioParams {
        RatioParams {
            alpha: Some(alpha),
            budget: 200,
            seed: 7,
            ..RatioParams::default()
        }
    }

    #[test]
    fn scalar_witness_is_exactly_sharp() {
        for alpha in [0.25, 0.5, 0.75] {
            let ctx = scalar_pair(c(0.0, 0.0), c(0.3, 0.0));
            let symbol = Symbol::Field(symbols::abs_power(alpha).unwrap());
            let report =
                theorem_ratio(TheoremTag::Holder, &symbol, &ctx, &holder_params(alpha)).unwrap();
            assert_eq!(report.ratio, 1.0, "alpha {alpha}: ratio {}", report.ratio);
            let norm = report.normalized_ratio.unwrap();
            assert!((norm - (1.0 - alpha)).abs() <= 1e-15);
        }
    }

    #[test]
    fn scalar_chord_bound_for_one_exponential() {
        // Eigenvalues 0 and t on the real axis: the numerator is the chord
        // |1 - e^{iat}| = 2|sin(at/2)|, the denominator the arc a*t.
        let (a, t) = (2.0, 0.8);
        let ctx = scalar_pair(c(0.0, 0.0), c(t, 0.0));
        let symbol = Symbol::Trig(symbols::exponential(a, 0.0).unwrap());
        let report =
            theorem_ratio(TheoremTag::KeyIneq, &symbol, &ctx, &RatioParams::default()).unwrap();
        let expected = 2.0 * (a * t / 2.0).sin().abs() / (a * t);
        assert!(
            (report.ratio - expected).abs() <= 1e-12 * expected,
            "ratio {} vs {expected}",
            report.ratio
        );
        assert!(report.ratio <= 1.0 + 1e-12);
        assert_eq!(report.sigma, Some(a));
    }

    #[test]
    fn lipschitz_ratio_of_an_exponential_is_nearly_sharp() {
        // Frequency magnitude 2 on a diagonal pair with a tiny shift: the
        // chord approaches the arc, so the ratio approaches 1 from below.
        let shift = 1e-6;
        let ctx = diag_pair(
            &[c(0.4, 0.0), c(-0.3, 0.0)],
            &[c(0.4 + shift, 0.0), c(-0.3, 0.0)],
        );
        let symbol = Symbol::Trig(symbols::exponential(2.0, 0.0).unwrap());
        let report =
            theorem_ratio(TheoremTag::LipBesov, &symbol, &ctx, &RatioParams::default()).unwrap();
        assert!(report.ratio <= 1.0 + 1e-9, "ratio {}", report.ratio);
        assert!(report.ratio >= 0.99, "ratio {}", report.ratio);
    }

    #[test]
    fn ratio_field_equals_the_quotient() {
        let ctx = PairContext::from_spec(&NormalPairSpec {
            dim: 3,
            mode: PairMode::SharedBasis,
            eps: 0.2,
            seed: 31,
        })
        .unwrap();
        let symbol = Symbol::Field(symbols::abs_power(0.5).unwrap());
        let report = theorem_ratio(TheoremTag::Holder, &symbol, &ctx, &holder_params(0.5)).unwrap();
        assert_eq!(report.ratio, report.numerator / report.denominator);
        assert_eq!(report.mode.as_deref(), Some("shared_basis"));
        assert_eq!(report.pair_seed, Some(31));
    }

    #[test]
    fn coinciding_pair_has_no_denominator() {
        let n = ComplexMatrix::diagonal(&[c(1.0, 0.5), c(-0.5, 0.25)]);
        let ctx = PairContext::from_pair(n.clone(), n).unwrap();
        let symbol = Symbol::Field(symbols::abs_power(0.5).unwrap());
        assert!(matches!(
            theorem_ratio(TheoremTag::Holder, &symbol, &ctx, &holder_params(0.5)),
            Err(TheoremError::ZeroDenominator(_))
        ));
    }

    #[test]
    fn parameter_mismatches_are_rejected() {
        let ctx = scalar_pair(c(0.0, 0.0), c(0.5, 0.0));
        let field = Symbol::Field(symbols::abs_power(0.5).unwrap());
        let trig = Symbol::Trig(symbols::exponential(1.0, 0.0).unwrap());

        assert!(matches!(
            theorem_ratio(TheoremTag::KeyIneq, &field, &ctx, &RatioParams::default()),
            Err(TheoremError::TagParamMismatch(_))
        ));
        assert!(matches!(
            theorem_ratio(TheoremTag::Holder, &trig, &ctx, &RatioParams::default()),
            Err(TheoremError::TagParamMismatch(_))
        ));
        let bad_p = RatioParams {
            alpha: Some(0.5),
            p: Some(1.0),
            ..RatioParams::default()
        };
        assert!(matches!(
            theorem_ratio(TheoremTag::SchattenP, &field, &ctx, &bad_p),
            Err(TheoremError::TagParamMismatch(_))
        ));
        assert!(matches!(
            theorem_ratio(
                TheoremTag::Holder,
                &field,
                &ctx,
                &RatioParams {
                    alpha: Some(1.0),
                    ..RatioParams::default()
                }
            ),
            Err(TheoremError::TagParamMismatch(_))
        ));
    }

    #[test]
    fn weak_table_of_a_constant_is_zero() {
        let ctx = diag_pair(&[c(0.5, 0.0), c(1.5, 0.5)], &[c(0.7, 0.0), c(1.5, 0.3)]);
        let one = Symbol::Field(ScalarField2D::new("one", |_| c(1.0, 0.0)));
        let table = weak_singular_check(&one, 0.5, &ctx).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert!(table.quasinorm <= 1e-14);
    }

    #[test]
    fn weak_table_scalar_case() {
        let ctx = scalar_pair(c(0.0, 0.0), c(4.0, 0.0));
        let symbol = Symbol::Field(symbols::abs_power(0.5).unwrap());
        let table = weak_singular_check(&symbol, 0.5, &ctx).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert!((table.rows[0].s - 2.0).abs() <= 1e-12);
        assert!((table.quasinorm - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn weak_table_matches_diagonal_arithmetic() {
        // s_j of the function difference are the sorted values
        // ||lambda_j|^a - |mu_j|^a|.
        let ctx = diag_pair(&[c(0.0, 0.0), c(9.0, 0.0)], &[c(1.0, 0.0), c(16.0, 0.0)]);
        let symbol = Symbol::Field(symbols::abs_power(0.5).unwrap());
        let table = weak_singular_check(&symbol, 0.5, &ctx).unwrap();
        let got: Vec<f64> = table.rows.iter().map(|r| r.s).collect();
        assert!((got[0] - 1.0).abs() <= 1e-12, "{got:?}");
        assert!((got[1] - 1.0).abs() <= 1e-12, "{got:?}");
        // Cross-check against the direct quasinorm of the same matrix.
        let diff_f = function_difference(&symbol, &ctx).unwrap();
        assert_eq!(table.quasinorm, weak_quasinorm(&diff_f, 0.5).unwrap());
        // Weak quasinorm never exceeds the strong one.
        assert!(table.quasinorm <= table.strong_quasinorm + 1e-10);
    }

    #[test]
    fn partial_sums_match_hand_arithmetic() {
        // Singular values: perturbation (4, 1), function difference (2, 1).
        // With p = 2, alpha = 1/2 the first row is 16 / 16.
        let ctx = diag_pair(&[c(0.0, 0.0), c(0.0, 0.0)], &[c(1.0, 0.0), c(4.0, 0.0)]);
        let symbol = Symbol::Field(symbols::abs_power(0.5).unwrap());
        let table = partial_sum_check(&symbol, 0.5, 2.0, &ctx, &holder_params(0.5)).unwrap();
        assert_eq!(table.seminorm, 1.0);
        assert_eq!(table.rows.len(), 2);
        assert!((table.rows[0].lhs - 16.0).abs() <= 1e-10);
        assert!((table.rows[0].rhs - 16.0).abs() <= 1e-10);
        assert!((table.rows[0].ratio.unwrap() - 1.0).abs() <= 1e-12);
        assert!((table.rows[1].lhs - 17.0).abs() <= 1e-10);
        assert!((table.rows[1].rhs - 17.0).abs() <= 1e-10);
        assert!((table.rows[1].ratio.unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn identical_operators_zero_all_partial_sums() {
        let n = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 1.0)]);
        let ctx = PairContext::from_pair(n.clone(), n).unwrap();
        let symbol = Symbol::Field(symbols::abs_power(0.5).unwrap());
        let table = partial_sum_check(&symbol, 0.5, 2.0, &ctx, &holder_params(0.5)).unwrap();
        for row in &table.rows {
            assert_eq!(row.lhs, 0.0);
            assert!(row.ratio.is_none());
        }
    }

    #[test]
    fn full_partial_sum_agrees_with_the_schatten_ratio() {
        let ctx = PairContext::from_spec(&NormalPairSpec {
            dim: 5,
            mode: PairMode::Independent,
            eps: 0.4,
            seed: 91,
        })
        .unwrap();
        let symbol = Symbol::Field(symbols::abs_power(0.5).unwrap());
        let params = RatioParams {
            alpha: Some(0.5),
            p: Some(2.0),
            budget: 300,
            seed: 5,
            ..RatioParams::default()
        };
        let table = partial_sum_check(&symbol, 0.5, 2.0, &ctx, &params).unwrap();
        let report = theorem_ratio(TheoremTag::SchattenP, &symbol, &ctx, &params).unwrap();
        let last = table.rows.last().unwrap().ratio.unwrap();
        let want = report.ratio.powf(2.0 / 0.5);
        assert!(
            (last - want).abs() <= 1e-9 * want.max(1.0),
            "{last} vs {want}"
        );
    }

    #[test]
    fn identity_coupling_matches_the_plain_ratio() {
        let ctx = PairContext::from_spec(&NormalPairSpec {
            dim: 4,
            mode: PairMode::SharedBasis,
            eps: 0.3,
            seed: 17,
        })
        .unwrap();
        let symbol = Symbol::Field(symbols::abs_power(0.5).unwrap());
        let params = holder_params(0.5);
        let q = ComplexMatrix::identity(4);
        let coupled = quasicommutator_ratio(&symbol, &ctx, &q, 0.5, &params).unwrap();
        let plain = theorem_ratio(TheoremTag::Holder, &symbol, &ctx, &params).unwrap();
        assert!(
            (coupled.ratio - plain.ratio).abs() <= 1e-10 * plain.ratio.max(1.0),
            "{} vs {}",
            coupled.ratio,
            plain.ratio
        );
        assert!((coupled.numerator - plain.numerator).abs() <= 1e-12);
    }

    #[test]
    fn commutator_of_the_identity_symbol_is_sharp_in_dimension_two() {
        // For a two-point spectrum the adjoint defect has the same singular
        // values as the defect itself, so the linear-tag ratio is 1.
        let n = ComplexMatrix::diagonal(&[c(0.0, 1.0), c(0.0, -1.0)]);
        let ctx = PairContext::from_pair(n.clone(), n).unwrap();
        let q = ComplexMatrix::new(
            2,
            2,
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let symbol = Symbol::Field(symbols::identity());
        let report = quasicommutator_ratio(&symbol, &ctx, &q, 1.0, &holder_params(1.0)).unwrap();
        assert!(
            (report.ratio - 1.0).abs() <= 1e-12,
            "ratio {}",
            report.ratio
        );
        assert!((report.numerator - 2.0).abs() <= 1e-12);

        // The derived coupled example: f = Im z has numerator 2 as well.
        let report = quasicommutator_ratio(
            &Symbol::Field(symbols::imag_part()),
            &ctx,
            &q,
            1.0,
            &holder_params(1.0),
        )
        .unwrap();
        assert!((report.numerator - 2.0).abs() <= 1e-12);
        assert!(
            (report.ratio - 1.0).abs() <= 1e-12,
            "ratio {}",
            report.ratio
        );
    }

    #[test]
    fn holder_ratio_is_scale_invariant_for_power_symbols() {
        let base = PairContext::from_spec(&NormalPairSpec {
            dim: 4,
            mode: PairMode::Independent,
            eps: 0.5,
            seed: 23,
        })
        .unwrap();
        let scaled =
            PairContext::from_pair(base.n1.scaled_re(3.0), base.n2.scaled_re(3.0)).unwrap();
        let symbol = Symbol::Field(symbols::abs_power(0.5).unwrap());
        let params = holder_params(0.5);
        let r1 = theorem_ratio(TheoremTag::Holder, &symbol, &base, &params).unwrap();
        let r2 = theorem_ratio(TheoremTag::Holder, &symbol, &scaled, &params).unwrap();
        assert!(
            (r1.ratio - r2.ratio).abs() <= 1e-9 * r1.ratio.max(1.0),
            "{} vs {}",
            r1.ratio,
            r2.ratio
        );
    }

    #[test]
    fn ratios_are_unitarily_invariant() {
        let ctx = PairContext::from_spec(&NormalPairSpec {
            dim: 4,
            mode: PairMode::SharedBasis,
            eps: 0.4,
            seed: 29,
        })
        .unwrap();
        let w = generate::random_unitary(4, 999).unwrap();
        let rotated = PairContext::from_pair(
            w.mul(&ctx.n1).mul(&w.adjoint()),
            w.mul(&ctx.n2).mul(&w.adjoint()),
        )
        .unwrap();
        let symbol = Symbol::Field(symbols::abs_power(0.5).unwrap());
        let params = holder_params(0.5);
        let r1 = theorem_ratio(TheoremTag::Holder, &symbol, &ctx, &params).unwrap();
        let r2 = theorem_ratio(TheoremTag::Holder, &symbol, &rotated, &params).unwrap();
        assert!(
            (r1.ratio - r2.ratio).abs() <= 1e-9 * r1.ratio.max(1.0),
            "{} vs {}",
            r1.ratio,
            r2.ratio
        );
    }

    #[test]
    fn omega_tag_reports_a_bounded_ratio() {
        let ctx = PairContext::from_spec(&NormalPairSpec {
            dim: 3,
            mode: PairMode::Conjugated,
            eps: 0.3,
            seed: 41,
        })
        .unwrap();
        let symbol = Symbol::Field(symbols::capped_abs());
        let params = RatioParams {
            omega: Some(ModulusOfContinuity::CappedLinear),
            budget: 300,
            seed: 11,
            ..RatioParams::default()
        };
        let report = theorem_ratio(TheoremTag::Omega, &symbol, &ctx, &params).unwrap();
        assert!(report.ratio.is_finite() && report.ratio > 0.0);
        assert!(report.ratio < 10.0, "ratio {}", report.ratio);
        assert_eq!(report.omega.as_deref(), Some("capped_linear"));
    }

    #[test]
    fn besov_tags_accept_only_trig_symbols() {
        let ctx = scalar_pair(c(0.0, 0.0), c(0.5, 0.0));
        let trig = Symbol::Trig(symbols::exponential(2.0, 0.0).unwrap());
        let params = RatioParams {
            alpha: Some(0.5),
            ..RatioParams::default()
        };
        let r = theorem_ratio(TheoremTag::BesovAlphaS1, &trig, &ctx, &params).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
        let r = theorem_ratio(TheoremTag::TraceBesov, &trig, &ctx, &params).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
    }

    #[test]
    fn reports_serialize_deterministically() {
        let ctx = PairContext::from_spec(&NormalPairSpec {
            dim: 2,
            mode: PairMode::SharedBasis,
            eps: 0.1,
            seed: 3,
        })
        .unwrap();
        let symbol = Symbol::Field(symbols::abs_power(0.5).unwrap());
        let a = theorem_ratio(TheoremTag::Holder, &symbol, &ctx, &holder_params(0.5)).unwrap();
        let b = theorem_ratio(TheoremTag::Holder, &symbol, &ctx, &holder_params(0.5)).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        assert_eq!(ja, jb);
        let back: RatioReport = serde_json::from_str(&ja).unwrap();
        assert_eq!(back.ratio.to_bits(), a.ratio.to_bits());
    }
}
