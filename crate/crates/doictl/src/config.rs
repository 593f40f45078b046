//! Run configuration: JSON schema, validation, defaults.
//!
//! Everything is checked here, before a single output file is touched; a
//! config that fails validation exits with code 2 and writes nothing.

use std::path::{Path, PathBuf};

use doi_core::funcspace::{symbols, ModulusOfContinuity, TrigPoly2D};
use doi_core::theorems::{PairMode, Symbol, TheoremTag};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Experiment families the driver knows how to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Exact two-integral representation of `f(N1) - f(N2)`; hard defect checks.
    Identity,
    /// Band-limited operator bound ratios.
    KeyIneq,
    /// First-order Besov bounds, operator and trace norm.
    Lipschitz,
    /// Hoelder bound ratios.
    Holder,
    /// Modulus-of-continuity bound ratios.
    Omega,
    /// Schatten ladder ratios.
    Schatten,
    /// Weighted singular value decay tables.
    Weak,
    /// Truncated singular value power sums.
    PartialSum,
    /// Coupled difference `f(N1) Q - Q f(N2)`: hard defect checks plus ratios.
    Quasicommutator,
    /// Adversarial hunt for the largest ratio of one inequality.
    Search,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Identity => "identity",
            Suite::KeyIneq => "key_ineq",
            Suite::Lipschitz => "lipschitz",
            Suite::Holder => "holder",
            Suite::Omega => "omega",
            Suite::Schatten => "schatten",
            Suite::Weak => "weak",
            Suite::PartialSum => "partial_sum",
            Suite::Quasicommutator => "quasicommutator",
            Suite::Search => "search",
        }
    }
}

/// A symbol reference: either a builtin by name (with its parameters) or a
/// JSON file holding a trigonometric polynomial.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    pub builtin: Option<String>,
    pub file: Option<PathBuf>,
    /// Exponent for `abs_power`.
    pub alpha: Option<f64>,
    /// Frequency components for `exponential`.
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// Shape of `random_trig`.
    pub terms: Option<usize>,
    pub freq_scale: Option<f64>,
    pub trig_seed: Option<u64>,
}

const BUILTINS: &str =
    "identity, conjugate, re, im, abs2, abs_power, capped_abs, exponential, random_trig";

impl SymbolSpec {
    /// Builds the symbol, falling back to `default_alpha` for `abs_power`
    /// when the spec does not pin its own exponent.
    pub fn build(&self, default_alpha: f64) -> Result<Symbol, CliError> {
        match (&self.builtin, &self.file) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "symbol spec sets both `builtin` and `file`; pick one".into(),
            )),
            (None, None) => Err(CliError::Config(
                "symbol spec needs `builtin` or `file`".into(),
            )),
            (Some(name), None) => self.build_builtin(name, default_alpha),
            (None, Some(path)) => load_trig_file(path),
        }
    }

    fn build_builtin(&self, name: &str, default_alpha: f64) -> Result<Symbol, CliError> {
        let bad = |e: doi_core::funcspace::FuncspaceError| CliError::Config(e.to_string());
        Ok(match name {
            "identity" => Symbol::Field(symbols::identity()),
            "conjugate" => Symbol::Field(symbols::conjugate()),
            "re" => Symbol::Field(symbols::real_part()),
            "im" => Symbol::Field(symbols::imag_part()),
            "abs2" => Symbol::Field(symbols::abs_squared()),
            "abs_power" => {
                let alpha = self.alpha.unwrap_or(default_alpha);
                Symbol::Field(symbols::abs_power(alpha).map_err(bad)?)
            }
            "capped_abs" => Symbol::Field(symbols::capped_abs()),
            "exponential" => {
                let a = self.a.unwrap_or(1.0);
                let b = self.b.unwrap_or(0.0);
                Symbol::Trig(symbols::exponential(a, b).map_err(bad)?)
            }
            "random_trig" => Symbol::Trig(symbols::random_trig(
                self.terms.unwrap_or(4),
                self.freq_scale.unwrap_or(2.0),
                self.trig_seed.unwrap_or(0),
            )),
            other => {
                return Err(CliError::Config(format!(
                    "unknown builtin symbol `{other}`; expected one of {BUILTINS}"
                )))
            }
        })
    }
}

fn load_trig_file(path: &Path) -> Result<Symbol, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!("cannot read symbol file {}: {e}", path.display()))
    })?;
    let poly = TrigPoly2D::from_json(&text)
        .map_err(|e| CliError::Config(format!("symbol file {}: {e}", path.display())))?;
    Ok(Symbol::Trig(poly))
}

/// Raw JSON configuration. Every field except `suite` is optional; defaults
/// are documented on [`ResolvedConfig`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub symbol: Option<SymbolSpec>,
    pub dims: Option<Vec<usize>>,
    pub modes: Option<Vec<PairMode>>,
    pub eps: Option<Vec<f64>>,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    /// Modulus of continuity, in the tagged form the function space layer
    /// accepts: `{"kind": "power", "alpha": 0.5}`, `{"kind": "capped_linear"}`
    /// or `{"kind": "table", "samples": [[t, w], ...]}`.
    pub omega: Option<serde_json::Value>,
    /// Seeded repetitions per grid point.
    pub trials: Option<u32>,
    pub seed: Option<u64>,
    /// Evaluation budget for seminorm estimation inside each ratio.
    pub budget: Option<u64>,
    /// Candidate budget for the search suite.
    pub search_budget: Option<u64>,
    /// Inequality the search suite hunts; ignored by the other suites.
    pub tag: Option<TheoremTag>,
    pub out: Option<PathBuf>,
}

/// A fully validated configuration with every default filled in.
#[derive(Clone, Debug)]
pub struct ResolvedConfig {
    pub suite: Suite,
    /// `None` means the suite draws from the builtin symbol pool
    /// (identity and quasicommutator) or the tag default grid (search).
    pub symbol: Option<Symbol>,
    pub dims: Vec<usize>,
    pub modes: Vec<PairMode>,
    pub eps: Vec<f64>,
    pub alpha: f64,
    pub p: f64,
    pub omega: ModulusOfContinuity,
    pub trials: u32,
    pub seed: u64,
    pub budget: u64,
    pub search_budget: u64,
    pub tag: TheoremTag,
    pub out: PathBuf,
}

const MAX_DIM: usize = 128;

impl ExperimentConfig {
    /// Reads and parses a config file. A missing file is an i/o failure;
    /// unparseable JSON is a configuration failure.
    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let raw = std::fs::read(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: ExperimentConfig = serde_json::from_slice(&raw)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        Ok((cfg, raw))
    }

    /// Checks ranges, resolves defaults, and builds the symbol. Errors here
    /// must surface before any output file is created.
    pub fn resolve(&self) -> Result<ResolvedConfig, CliError> {
        let suite = self.suite;

        let dims = self.dims.clone().unwrap_or_else(|| vec![2, 4, 8]);
        if dims.is_empty() {
            return Err(CliError::Config("`dims` must not be empty".into()));
        }
        for &d in &dims {
            if d == 0 || d > MAX_DIM {
                return Err(CliError::Config(format!(
                    "dimension {d} out of range 1..={MAX_DIM}"
                )));
            }
        }

        let modes = self.modes.clone().unwrap_or_else(|| PairMode::ALL.to_vec());
        if modes.is_empty() {
            return Err(CliError::Config("`modes` must not be empty".into()));
        }

        let eps = self.eps.clone().unwrap_or_else(|| vec![1.0, 1e-2, 1e-4]);
        if eps.is_empty() {
            return Err(CliError::Config("`eps` must not be empty".into()));
        }
        for &e in &eps {
            if !(e > 0.0) || !e.is_finite() {
                return Err(CliError::Config(format!(
                    "perturbation size must be positive and finite, got {e}"
                )));
            }
        }

        let alpha = self.alpha.unwrap_or(0.5);
        let alpha_ok = if suite == Suite::Quasicommutator {
            alpha > 0.0 && alpha <= 1.0
        } else {
            alpha > 0.0 && alpha < 1.0
        };
        if !alpha_ok {
            let range = if suite == Suite::Quasicommutator {
                "(0, 1]"
            } else {
                "(0, 1)"
            };
            return Err(CliError::Config(format!(
                "alpha must lie in {range} for the {} suite, got {alpha}",
                suite.name()
            )));
        }

        let p = self.p.unwrap_or(2.0);
        if !(p > 1.0) || !p.is_finite() {
            return Err(CliError::Config(format!(
                "p must be a finite number greater than 1, got {p}"
            )));
        }

        let omega = match &self.omega {
            None => ModulusOfContinuity::CappedLinear,
            Some(value) => ModulusOfContinuity::from_json(&value.to_string())
                .map_err(|e| CliError::Config(format!("omega: {e}")))?,
        };

        let trials = self.trials.unwrap_or(2);
        if trials == 0 || trials > 10_000 {
            return Err(CliError::Config(format!(
                "trials must lie in 1..=10000, got {trials}"
            )));
        }

        let budget = self.budget.unwrap_or(800);
        if budget == 0 {
            return Err(CliError::Config("budget must be at least 1".into()));
        }
        let search_budget = self.search_budget.unwrap_or(200);
        if search_budget == 0 {
            return Err(CliError::Config("search_budget must be at least 1".into()));
        }

        let symbol = match &self.symbol {
            Some(spec) => Some(spec.build(alpha)?),
            None => match suite {
                Suite::Identity | Suite::Quasicommutator | Suite::Search => None,
                Suite::KeyIneq => Some(Symbol::Trig(
                    symbols::exponential(1.0, 0.0).map_err(|e| CliError::Config(e.to_string()))?,
                )),
                Suite::Lipschitz => Some(Symbol::Trig(
                    symbols::exponential(2.0, 0.0).map_err(|e| CliError::Config(e.to_string()))?,
                )),
                Suite::Omega => Some(Symbol::Field(symbols::capped_abs())),
                Suite::Holder | Suite::Schatten | Suite::Weak | Suite::PartialSum => {
                    Some(Symbol::Field(
                        symbols::abs_power(alpha).map_err(|e| CliError::Config(e.to_string()))?,
                    ))
                }
            },
        };

        // Band-limited suites cannot price a symbol without frequency data;
        // reject that before the whole grid fails point by point.
        if matches!(suite, Suite::KeyIneq | Suite::Lipschitz) {
            if let Some(sym) = &symbol {
                if sym.trig().is_none() {
                    return Err(CliError::Config(format!(
                        "the {} suite needs a trigonometric symbol (builtin `exponential`, \
                         `random_trig`, or a symbol file); `{}` has no frequency data",
                        suite.name(),
                        sym.name()
                    )));
                }
            }
        }

        Ok(ResolvedConfig {
            suite,
            symbol,
            dims,
            modes,
            eps,
            alpha,
            p,
            omega,
            trials,
            seed: self.seed.unwrap_or(0),
            budget,
            search_budget,
            tag: self.tag.unwrap_or(TheoremTag::Holder),
            out: self.out.clone().unwrap_or_else(|| PathBuf::from(".")),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ResolvedConfig, CliError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.resolve()
    }

    #[test]
    fn minimal_config_resolves_with_defaults() {
        let r = parse(r#"{"suite": "holder"}"#).unwrap();
        assert_eq!(r.suite, Suite::Holder);
        assert_eq!(r.dims, vec![2, 4, 8]);
        assert_eq!(r.modes.len(), 3);
        assert_eq!(r.alpha, 0.5);
        assert_eq!(r.trials, 2);
        assert!(matches!(r.symbol, Some(Symbol::Field(_))));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = parse(r#"{"suite": "holder", "bogus": 1}"#).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn unknown_suite_is_rejected() {
        let err = parse(r#"{"suite": "frobnicate"}"#).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn alpha_range_depends_on_suite() {
        assert!(parse(r#"{"suite": "holder", "alpha": 1.0}"#).is_err());
        assert!(parse(r#"{"suite": "quasicommutator", "alpha": 1.0}"#).is_ok());
        assert!(parse(r#"{"suite": "quasicommutator", "alpha": 1.1}"#).is_err());
        assert!(parse(r#"{"suite": "weak", "alpha": 0.0}"#).is_err());
    }

    #[test]
    fn bad_ranges_are_rejected() {
        assert!(parse(r#"{"suite": "holder", "dims": []}"#).is_err());
        assert!(parse(r#"{"suite": "holder", "dims": [0]}"#).is_err());
        assert!(parse(r#"{"suite": "holder", "dims": [129]}"#).is_err());
        assert!(parse(r#"{"suite": "holder", "eps": [0.0]}"#).is_err());
        assert!(parse(r#"{"suite": "holder", "eps": [-1.0]}"#).is_err());
        assert!(parse(r#"{"suite": "schatten", "p": 1.0}"#).is_err());
        assert!(parse(r#"{"suite": "holder", "trials": 0}"#).is_err());
        assert!(parse(r#"{"suite": "holder", "budget": 0}"#).is_err());
    }

    #[test]
    fn band_limited_suites_require_trig_symbols() {
        let err = parse(r#"{"suite": "key_ineq", "symbol": {"builtin": "abs2"}}"#).unwrap_err();
        assert!(err.to_string().contains("trigonometric"));
        assert!(
            parse(r#"{"suite": "key_ineq", "symbol": {"builtin": "exponential", "a": 2.0}}"#)
                .is_ok()
        );
        assert!(parse(r#"{"suite": "lipschitz"}"#).is_ok());
    }

    #[test]
    fn builtin_symbols_build() {
        for name in [
            "identity",
            "conjugate",
            "re",
            "im",
            "abs2",
            "abs_power",
            "capped_abs",
            "exponential",
            "random_trig",
        ] {
            let spec = SymbolSpec {
                builtin: Some(name.to_string()),
                ..SymbolSpec::default()
            };
            spec.build(0.5).unwrap();
        }
        let bad = SymbolSpec {
            builtin: Some("nope".into()),
            ..SymbolSpec::default()
        };
        assert!(bad.build(0.5).is_err());
    }

    #[test]
    fn symbol_spec_demands_exactly_one_source() {
        let both = SymbolSpec {
            builtin: Some("identity".into()),
            file: Some(PathBuf::from("x.json")),
            ..SymbolSpec::default()
        };
        assert!(both.build(0.5).is_err());
        assert!(SymbolSpec::default().build(0.5).is_err());
        let missing = SymbolSpec {
            file: Some(PathBuf::from("/nonexistent/poly.json")),
            ..SymbolSpec::default()
        };
        assert!(matches!(missing.build(0.5), Err(CliError::Config(_))));
    }

    #[test]
    fn omega_parses_through_the_tagged_form() {
        let r = parse(r#"{"suite": "omega", "omega": {"kind": "power", "alpha": 0.25}}"#).unwrap();
        assert!(r.omega.name().contains("power"));
        assert!(parse(r#"{"suite": "omega", "omega": {"kind": "power", "alpha": 2.0}}"#).is_err());
    }

    #[test]
    fn symbol_file_roundtrip() {
        let dir = std::env::temp_dir().join("doictl-symbol-file-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("poly.json");
        let poly = symbols::exponential(1.5, -0.5).unwrap();
        std::fs::write(&path, poly.to_json()).unwrap();
        let spec = SymbolSpec {
            file: Some(path.clone()),
            ..SymbolSpec::default()
        };
        let sym = spec.build(0.5).unwrap();
        assert!(sym.trig().is_some());
        std::fs::remove_file(path).ok();
    }
}
