//! Moduli of continuity and the averaged transform
//! `omega*(x) = x * integral_x^inf omega(t) / t^2 dt`.
//!
//! The transform has closed forms for power moduli; everything else goes
//! through dyadic-block quadrature with a power-law tail extrapolation. The
//! integral diverges whenever `omega` grows linearly or faster, which is
//! reported as an error rather than a large number.

use std::fmt;
use std::sync::Arc;

use serde::Deserialize;

use super::FuncspaceError;

type ModulusFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Nondecreasing concave gauge with `omega(0) = 0`.
#[derive(Clone)]
pub enum ModulusOfContinuity {
    /// `t^alpha` with `0 < alpha <= 1`.
    Power { alpha: f64 },
    /// `min(t, 1)`.
    CappedLinear,
    /// Piecewise-linear interpolation through `(t, value)` nodes starting at
    /// `(0, 0)`; beyond the last node the last slope continues.
    Table { samples: Vec<(f64, f64)> },
    /// Caller-supplied gauge; must be finite and nonnegative where queried.
    Custom { name: String, f: ModulusFn },
}

impl fmt::Debug for ModulusOfContinuity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModulusOfContinuity({})", self.name())
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ModulusJson {
    Power { alpha: f64 },
    CappedLinear,
    Table { samples: Vec<(f64, f64)> },
}

impl ModulusOfContinuity {
    pub fn name(&self) -> String {
        match self {
            Self::Power { alpha } => format!("power({alpha})"),
            Self::CappedLinear => "capped_linear".into(),
            Self::Table { samples } => format!("table({} nodes)", samples.len()),
            Self::Custom { name, .. } => format!("custom({name})"),
        }
    }

    pub fn validate(&self) -> Result<(), FuncspaceError> {
        match self {
            Self::Power { alpha } => {
                if !(*alpha > 0.0 && *alpha <= 1.0) {
                    return Err(FuncspaceError::BadParameter(format!(
                        "power modulus needs alpha in (0, 1], got {alpha}"
                    )));
                }
            }
            Self::CappedLinear | Self::Custom { .. } => {}
            Self::Table { samples } => {
                if samples.len() < 2 {
                    return Err(FuncspaceError::BadParameter(
                        "table modulus needs at least two nodes".into(),
                    ));
                }
                if samples[0] != (0.0, 0.0) {
                    return Err(FuncspaceError::BadParameter(
                        "table modulus must start at (0, 0)".into(),
                    ));
                }
                let mut prev_slope = f64::INFINITY;
                for w in samples.windows(2) {
                    let (t0, v0) = w[0];
                    let (t1, v1) = w[1];
                    if !t1.is_finite() || !v1.is_finite() {
                        return Err(FuncspaceError::BadParameter(
                            "table modulus node is not finite".into(),
                        ));
                    }
                    if t1 <= t0 {
                        return Err(FuncspaceError::BadParameter(
                            "table modulus abscissas must increase strictly".into(),
                        ));
                    }
                    if v1 < v0 {
                        return Err(FuncspaceError::BadParameter(
                            "table modulus values must be nondecreasing".into(),
                        ));
                    }
                    let slope = (v1 - v0) / (t1 - t0);
                    // Concavity up to a relative fudge for rounded inputs.
                    if slope > prev_slope * (1.0 + 1e-12) + 1e-300 {
                        return Err(FuncspaceError::BadParameter(
                            "table modulus must be concave (nonincreasing slopes)".into(),
                        ));
                    }
                    prev_slope = slope;
                }
            }
        }
        Ok(())
    }

    /// Evaluates the gauge at `t >= 0`; negative arguments clip to zero.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match self {
            Self::Power { alpha } => t.powf(*alpha),
            Self::CappedLinear => t.min(1.0),
            Self::Table { samples } => {
                let last = samples.len() - 1;
                if t >= samples[last].0 {
                    let (t0, v0) = samples[last - 1];
                    let (t1, v1) = samples[last];
                    let slope = (v1 - v0) / (t1 - t0);
                    return v1 + slope * (t - t1);
                }
                let mut idx = samples.partition_point(|&(ti, _)| ti <= t);
                if idx == 0 {
                    idx = 1;
                }
                let (t0, v0) = samples[idx - 1];
                let (t1, v1) = samples[idx];
                v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
            }
            Self::Custom { f, .. } => f(t),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, FuncspaceError> {
        let body: ModulusJson =
            serde_json::from_str(text).map_err(|e| FuncspaceError::BadFormat(e.to_string()))?;
        let out = match body {
            ModulusJson::Power { alpha } => Self::Power { alpha },
            ModulusJson::CappedLinear => Self::CappedLinear,
            ModulusJson::Table { samples } => Self::Table { samples },
        };
        out.validate()?;
        Ok(out)
    }
}

/// `omega*(x)`: closed form for power moduli, quadrature otherwise.
pub fn omega_star(omega: &ModulusOfContinuity, x: f64) -> Result<f64, FuncspaceError> {
    omega.validate()?;
    check_argument(x)?;
    match omega {
        ModulusOfContinuity::Power { alpha } if *alpha < 1.0 => Ok(x.powf(*alpha) / (1.0 - alpha)),
        ModulusOfContinuity::Power { .. } => Err(FuncspaceError::DivergentTail(
            "power modulus with alpha = 1 has a divergent averaged transform".into(),
        )),
        _ => omega_star_quadrature(omega, x),
    }
}

/// Quadrature route for `omega*(x)`, available for every modulus kind. The
/// integral over `[x, inf)` is summed over dyadic blocks; after each block
/// the remaining tail is extrapolated from the local growth exponent, and
/// the sum is accepted once two consecutive total estimates agree.
pub fn omega_star_quadrature(omega: &ModulusOfContinuity, x: f64) -> Result<f64, FuncspaceError> {
    omega.validate()?;
    check_argument(x)?;
    let g = |t: f64| -> Result<f64, FuncspaceError> {
        let w = omega.eval(t);
        if !w.is_finite() || w < 0.0 {
            return Err(FuncspaceError::BadParameter(format!(
                "modulus must be finite and nonnegative, got {w} at {t}"
            )));
        }
        Ok(w / (t * t))
    };

    let mut sum = 0.0;
    let mut prev_total: Option<f64> = None;
    let mut lo = x;
    for _k in 0..64 {
        let hi = 2.0 * lo;
        sum += adaptive_simpson(&g, lo, hi)?;
        let w_hi = omega.eval(hi);
        if w_hi == 0.0 {
            // Nondecreasing gauge vanishing at hi vanishes on the whole
            // integration range so far; the transform is zero.
            return Ok(x * sum);
        }
        let w_2hi = omega.eval(2.0 * hi);
        let beta = (w_2hi / w_hi).log2().clamp(0.0, 1.0);
        if beta < 1.0 - 1e-9 {
            // Model omega(t) ~ omega(hi) (t/hi)^beta beyond hi.
            let tail = w_hi / (hi * (1.0 - beta));
            let total = sum + tail;
            if let Some(p) = prev_total {
                if (total - p).abs() <= 1e-9 * total.abs() {
                    return Ok(x * total);
                }
            }
            prev_total = Some(total);
        } else {
            prev_total = None;
        }
        lo = hi;
    }
    Err(FuncspaceError::DivergentTail(format!(
        "no convergence after 64 dyadic blocks for {} at {x}",
        omega.name()
    )))
}

fn check_argument(x: f64) -> Result<(), FuncspaceError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(FuncspaceError::BadParameter(format!(
            "averaged transform argument must be positive and finite, got {x}"
        )));
    }
    Ok(())
}

fn adaptive_simpson(
    g: &impl Fn(f64) -> Result<f64, FuncspaceError>,
    a: f64,
    b: f64,
) -> Result<f64, FuncspaceError> {
    let fa = g(a)?;
    let fb = g(b)?;
    let m = 0.5 * (a + b);
    let fm = g(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let tol = 1e-10 * whole.abs();
    simpson_rec(g, a, b, fa, fm, fb, whole, tol, 40)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    g: &impl Fn(f64) -> Result<f64, FuncspaceError>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, FuncspaceError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = g(lm)?;
    let frm = g(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let refined = left + right;
    if depth == 0 || (refined - whole).abs() <= 15.0 * tol {
        return Ok(refined + (refined - whole) / 15.0);
    }
    let half = 0.5 * tol;
    Ok(simpson_rec(g, a, m, fa, flm, fm, left, half, depth - 1)?
        + simpson_rec(g, m, b, fm, frm, fb, right, half, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_closed_form_matches_hand_values() {
        let omega = ModulusOfContinuity::Power { alpha: 0.5 };
        // x^(1/2) / (1/2) = 2 sqrt(x).
        let got = omega_star(&omega, 4.0).unwrap();
        assert!((got - 4.0).abs() <= 1e-12);
        let got = omega_star(&omega, 0.25).unwrap();
        assert!((got - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn power_quadrature_matches_closed_form() {
        for &alpha in &[0.25, 0.5, 0.9] {
            let omega = ModulusOfContinuity::Power { alpha };
            for &x in &[1e-3f64, 0.5, 1.0, 2.0, 10.0] {
                let closed = x.powf(alpha) / (1.0 - alpha);
                let quad = omega_star_quadrature(&omega, x).unwrap();
                assert!(
                    (quad - closed).abs() <= 1e-7 * closed,
                    "alpha {alpha} x {x}: {quad} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn capped_linear_matches_its_closed_form() {
        let omega = ModulusOfContinuity::CappedLinear;
        for &x in &[1e-3f64, 0.5, 1.0, 2.0, 10.0] {
            let closed = if x < 1.0 { x * (1.0 - x.ln()) } else { 1.0 };
            let got = omega_star(&omega, x).unwrap();
            assert!(
                (got - closed).abs() <= 1e-7 * closed,
                "x {x}: {got} vs {closed}"
            );
        }
    }

    #[test]
    fn linear_growth_is_reported_divergent() {
        let omega = ModulusOfContinuity::Power { alpha: 1.0 };
        assert!(matches!(
            omega_star(&omega, 1.0),
            Err(FuncspaceError::DivergentTail(_))
        ));
        let table = ModulusOfContinuity::Table {
            samples: vec![(0.0, 0.0), (1.0, 1.0)],
        };
        // Last slope 1 continues forever: the transform diverges.
        assert!(matches!(
            omega_star(&table, 0.5),
            Err(FuncspaceError::DivergentTail(_))
        ));
    }

    #[test]
    fn bounded_table_agrees_with_capped_linear() {
        // min(t, 1) expressed as a table.
        let table = ModulusOfContinuity::Table {
            samples: vec![(0.0, 0.0), (1.0, 1.0), (2.0, 1.0)],
        };
        for &x in &[0.1, 0.75, 3.0] {
            let got = omega_star(&table, x).unwrap();
            let want = omega_star(&ModulusOfContinuity::CappedLinear, x).unwrap();
            assert!((got - want).abs() <= 1e-7 * want, "x {x}");
        }
    }

    #[test]
    fn custom_modulus_goes_through_quadrature() {
        let omega = ModulusOfContinuity::Custom {
            name: "sqrt".into(),
            f: Arc::new(|t| t.sqrt()),
        };
        let got = omega_star(&omega, 2.0).unwrap();
        let want = 2.0f64.sqrt() * 2.0;
        assert!((got - want).abs() <= 1e-7 * want);
    }

    #[test]
    fn table_validation_rejects_bad_shapes() {
        let not_concave = ModulusOfContinuity::Table {
            samples: vec![(0.0, 0.0), (1.0, 0.1), (2.0, 1.0)],
        };
        assert!(not_concave.validate().is_err());
        let decreasing = ModulusOfContinuity::Table {
            samples: vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)],
        };
        assert!(decreasing.validate().is_err());
        let bad_start = ModulusOfContinuity::Table {
            samples: vec![(0.5, 0.0), (1.0, 1.0)],
        };
        assert!(bad_start.validate().is_err());
        let unordered = ModulusOfContinuity::Table {
            samples: vec![(0.0, 0.0), (1.0, 1.0), (1.0, 1.0)],
        };
        assert!(unordered.validate().is_err());
    }

    #[test]
    fn argument_must_be_positive() {
        let omega = ModulusOfContinuity::CappedLinear;
        assert!(omega_star(&omega, 0.0).is_err());
        assert!(omega_star(&omega, -1.0).is_err());
        assert!(omega_star(&omega, f64::INFINITY).is_err());
    }

    #[test]
    fn power_alpha_validation() {
        assert!(ModulusOfContinuity::Power { alpha: 0.0 }
            .validate()
            .is_err());
        assert!(ModulusOfContinuity::Power { alpha: 1.5 }
            .validate()
            .is_err());
        assert!(ModulusOfContinuity::Power { alpha: 1.0 }.validate().is_ok());
    }

    #[test]
    fn table_interpolates_and_extends_linearly() {
        let table = ModulusOfContinuity::Table {
            samples: vec![(0.0, 0.0), (2.0, 1.0), (4.0, 1.5)],
        };
        table.validate().unwrap();
        assert_eq!(table.eval(1.0), 0.5);
        assert_eq!(table.eval(3.0), 1.25);
        // Beyond the last node the last slope (0.25) continues.
        assert_eq!(table.eval(8.0), 2.5);
        assert_eq!(table.eval(-1.0), 0.0);
    }

    #[test]
    fn modulus_json_parses_all_kinds() {
        let p = ModulusOfContinuity::from_json(r#"{"kind":"power","alpha":0.5}"#).unwrap();
        assert!(matches!(p, ModulusOfContinuity::Power { alpha } if alpha == 0.5));
        let c = ModulusOfContinuity::from_json(r#"{"kind":"capped_linear"}"#).unwrap();
        assert!(matches!(c, ModulusOfContinuity::CappedLinear));
        let t = ModulusOfContinuity::from_json(
            r#"{"kind":"table","samples":[[0.0,0.0],[1.0,0.5],[2.0,0.75]]}"#,
        )
        .unwrap();
        assert!(matches!(t, ModulusOfContinuity::Table { .. }));
        assert!(ModulusOfContinuity::from_json(r#"{"kind":"power","alpha":2.0}"#).is_err());
        assert!(ModulusOfContinuity::from_json(r#"{"kind":"nope"}"#).is_err());
    }
}
