//! Grid execution and report writing.
//!
//! A suite expands into a flat list of grid points (distance, dimension,
//! mode, trial). Points are independent: each derives its own seeds from the
//! run seed and its grid index, so the merged output is the same whether the
//! grid runs on one thread or many. Reports are written before the manifest;
//! the manifest is the marker that the run finished.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use doi_core::calculus::{quasicommutator_representation, representation_difference_spectral};
use doi_core::funcspace::symbols;
use doi_core::linalg::ComplexMatrix;
use doi_core::seedmix;
use doi_core::theorems::TheoremError;
use doi_core::theorems::{
    adversarial_search, partial_sum_check, quasicommutator_ratio, theorem_ratio,
    weak_singular_check, ConstantEstimate, NormalPairSpec, PairContext, PairMode, PartialSumTable,
    RatioParams, RatioReport, SearchGrid, Symbol, TheoremTag, WeakSingularTable,
};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, ResolvedConfig, Suite};
use crate::CliError;

/// Relative tolerance for representation defects; these are exact
/// identities, so the bound is pure rounding headroom.
pub const DEFECT_REL_TOL: f64 = 1e-8;

/// One hard assertion: a defect that must stay under its bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HardCheck {
    pub label: String,
    pub symbol: String,
    pub dim: usize,
    pub mode: String,
    pub eps: f64,
    pub pair_seed: u64,
    /// Measured defect.
    pub value: f64,
    /// Tolerance it must not exceed.
    pub bound: f64,
    pub passed: bool,
}

/// Weighted singular value table together with the pair that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeakEntry {
    pub symbol: String,
    pub dim: usize,
    pub mode: String,
    pub eps: f64,
    pub pair_seed: u64,
    pub table: WeakSingularTable,
}

/// Partial power sum table together with the pair that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartialSumEntry {
    pub symbol: String,
    pub dim: usize,
    pub mode: String,
    pub eps: f64,
    pub pair_seed: u64,
    pub table: PartialSumTable,
}

/// Everything a run produced, in grid order. Serialized as `report.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub suite: String,
    pub seed: u64,
    pub ratios: Vec<RatioReport>,
    pub hard_checks: Vec<HardCheck>,
    pub weak_tables: Vec<WeakEntry>,
    pub partial_sums: Vec<PartialSumEntry>,
    pub estimates: Vec<ConstantEstimate>,
    /// Points that could not be evaluated for structural reasons
    /// (unreachable distance, vanishing denominator). Not failures.
    pub skipped: Vec<String>,
    /// Points whose computation broke. Any entry fails the run.
    pub failures: Vec<String>,
}

impl RunReport {
    fn empty(suite: Suite, seed: u64) -> Self {
        Self {
            suite: suite.name().to_string(),
            seed,
            ratios: Vec::new(),
            hard_checks: Vec::new(),
            weak_tables: Vec::new(),
            partial_sums: Vec::new(),
            estimates: Vec::new(),
            skipped: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.hard_checks.iter().all(|c| c.passed)
    }
}

/// Run metadata. The only file that carries timestamps, so reports stay
/// byte-identical across reruns.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub suite: String,
    pub config_sha256: String,
    pub seed: u64,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub grid_points: usize,
    pub hard_checks: usize,
    pub hard_failures: usize,
    /// Largest measured defect over the hard checks, when the suite has any.
    pub max_defect: Option<f64>,
    pub computation_failures: usize,
    pub skipped: usize,
    pub passed: bool,
    pub report_files: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
struct GridPoint {
    index: usize,
    eps: f64,
    dim: usize,
    mode: PairMode,
    trial: u32,
}

/// Distance sweeps come first so CSV rows group by eps in config order.
fn build_grid(rc: &ResolvedConfig) -> Vec<GridPoint> {
    let mut points = Vec::new();
    let mut index = 0usize;
    for &eps in &rc.eps {
        for &dim in &rc.dims {
            for &mode in &rc.modes {
                for trial in 0..rc.trials {
                    points.push(GridPoint {
                        index,
                        eps,
                        dim,
                        mode,
                        trial,
                    });
                    index += 1;
                }
            }
        }
    }
    points
}

enum PointOutcome {
    Ratios(Vec<RatioReport>),
    Weak(WeakEntry),
    Partial(PartialSumEntry),
    Hard {
        check: HardCheck,
        ratios: Vec<RatioReport>,
    },
    Skip(String),
    Fail(String),
}

/// Structural misses become skips; anything else is a genuine failure.
fn classify(label: &str, e: TheoremError) -> PointOutcome {
    match e {
        TheoremError::ScaleUnreachable(m) | TheoremError::ZeroDenominator(m) => {
            PointOutcome::Skip(format!("{label}: {m}"))
        }
        other => PointOutcome::Fail(format!("{label}: {other}")),
    }
}

/// Symbols the defect suites cycle through when the config names none.
fn symbol_pool(rc: &ResolvedConfig) -> Result<Vec<Symbol>, CliError> {
    if let Some(sym) = &rc.symbol {
        return Ok(vec![sym.clone()]);
    }
    fn built<T>(r: Result<T, doi_core::funcspace::FuncspaceError>) -> Result<T, CliError> {
        r.map_err(|e| CliError::Assertion(format!("symbol pool: {e}")))
    }
    Ok(vec![
        Symbol::Field(symbols::identity()),
        Symbol::Field(symbols::conjugate()),
        Symbol::Field(symbols::real_part()),
        Symbol::Field(symbols::imag_part()),
        Symbol::Field(symbols::abs_squared()),
        Symbol::Field(built(symbols::abs_power(rc.alpha))?),
        Symbol::Field(symbols::capped_abs()),
        Symbol::Trig(built(symbols::exponential(1.0, 0.0))?),
        Symbol::Trig(symbols::random_trig(
            4,
            2.0,
            seedmix::derive(rc.seed, 0xF00D),
        )),
    ])
}

/// Dense coupling with entries uniform in the unit square, seeded.
fn random_coupling(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn run_point(rc: &ResolvedConfig, pool: &[Symbol], point: &GridPoint) -> PointOutcome {
    let pair_seed = seedmix::derive(rc.seed, point.index as u64);
    let label = format!(
        "{} dim {} {} eps {} trial {}",
        rc.suite.name(),
        point.dim,
        point.mode.name(),
        point.eps,
        point.trial
    );
    let spec = NormalPairSpec {
        dim: point.dim,
        mode: point.mode,
        eps: point.eps,
        seed: pair_seed,
    };
    let ctx = match PairContext::from_spec(&spec) {
        Ok(c) => c,
        Err(e) => return classify(&label, e),
    };
    let params = RatioParams {
        alpha: Some(rc.alpha),
        p: Some(rc.p),
        omega: Some(rc.omega.clone()),
        budget: rc.budget,
        seed: seedmix::derive(seedmix::derive(rc.seed, 0xE57), point.index as u64),
    };
    let symbol = &pool[point.index % pool.len()];

    let ratio_rows = |tags: &[TheoremTag]| -> Result<Vec<RatioReport>, TheoremError> {
        tags.iter()
            .map(|&tag| theorem_ratio(tag, symbol, &ctx, &params))
            .collect()
    };

    match rc.suite {
        Suite::Identity => {
            let field = symbol.field();
            let check = match representation_difference_spectral(&field, &ctx.dec1, &ctx.dec2) {
                Ok(c) => c,
                Err(e) => return PointOutcome::Fail(format!("{label}: {e}")),
            };
            let bound = DEFECT_REL_TOL * (1.0 + check.lhs.frobenius_norm());
            PointOutcome::Hard {
                check: HardCheck {
                    label,
                    symbol: symbol.name(),
                    dim: point.dim,
                    mode: point.mode.name().to_string(),
                    eps: point.eps,
                    pair_seed,
                    value: check.defect,
                    bound,
                    passed: check.defect <= bound,
                },
                ratios: Vec::new(),
            }
        }
        Suite::Quasicommutator => {
            let field = symbol.field();
            let q = random_coupling(point.dim, seedmix::derive(pair_seed, 0x0C0));
            let check = match quasicommutator_representation(&field, &ctx.dec1, &ctx.dec2, &q) {
                Ok(c) => c,
                Err(e) => return PointOutcome::Fail(format!("{label}: {e}")),
            };
            let bound = DEFECT_REL_TOL * (1.0 + check.lhs.frobenius_norm());
            let ratios = match quasicommutator_ratio(symbol, &ctx, &q, rc.alpha, &params) {
                Ok(r) => vec![r],
                Err(TheoremError::ZeroDenominator(_)) => Vec::new(),
                Err(e) => return PointOutcome::Fail(format!("{label}: {e}")),
            };
            PointOutcome::Hard {
                check: HardCheck {
                    label,
                    symbol: symbol.name(),
                    dim: point.dim,
                    mode: point.mode.name().to_string(),
                    eps: point.eps,
                    pair_seed,
                    value: check.defect,
                    bound,
                    passed: check.defect <= bound,
                },
                ratios,
            }
        }
        Suite::KeyIneq => match ratio_rows(&[TheoremTag::KeyIneq]) {
            Ok(rows) => PointOutcome::Ratios(rows),
            Err(e) => classify(&label, e),
        },
        Suite::Lipschitz => match ratio_rows(&[TheoremTag::LipBesov, TheoremTag::TraceBesov]) {
            Ok(rows) => PointOutcome::Ratios(rows),
            Err(e) => classify(&label, e),
        },
        Suite::Holder => match ratio_rows(&[TheoremTag::Holder]) {
            Ok(rows) => PointOutcome::Ratios(rows),
            Err(e) => classify(&label, e),
        },
        Suite::Omega => match ratio_rows(&[TheoremTag::Omega]) {
            Ok(rows) => PointOutcome::Ratios(rows),
            Err(e) => classify(&label, e),
        },
        Suite::Schatten => {
            let mut tags = vec![TheoremTag::SchattenP];
            if symbol.trig().is_some() {
                tags.push(TheoremTag::BesovAlphaS1);
            }
            match ratio_rows(&tags) {
                Ok(rows) => PointOutcome::Ratios(rows),
                Err(e) => classify(&label, e),
            }
        }
        Suite::Weak => match weak_singular_check(symbol, rc.alpha, &ctx) {
            Ok(table) => PointOutcome::Weak(WeakEntry {
                symbol: symbol.name(),
                dim: point.dim,
                mode: point.mode.name().to_string(),
                eps: point.eps,
                pair_seed,
                table,
            }),
            Err(e) => classify(&label, e),
        },
        Suite::PartialSum => match partial_sum_check(symbol, rc.alpha, rc.p, &ctx, &params) {
            Ok(table) => PointOutcome::Partial(PartialSumEntry {
                symbol: symbol.name(),
                dim: point.dim,
                mode: point.mode.name().to_string(),
                eps: point.eps,
                pair_seed,
                table,
            }),
            Err(e) => classify(&label, e),
        },
        Suite::Search => PointOutcome::Fail(format!("{label}: search does not run on a grid")),
    }
}

fn run_search(rc: &ResolvedConfig) -> Result<RunReport, CliError> {
    let params = RatioParams {
        alpha: Some(rc.alpha),
        p: Some(rc.p),
        omega: Some(rc.omega.clone()),
        budget: rc.budget,
        seed: rc.seed,
    };
    let mut grid = SearchGrid::for_tag(rc.tag, &params)
        .map_err(|e| CliError::Config(format!("search grid: {e}")))?;
    grid.dims = rc.dims.clone();
    grid.modes = rc.modes.clone();
    grid.eps = rc.eps.clone();
    if let Some(sym) = &rc.symbol {
        grid.symbols = vec![sym.clone()];
    }
    let estimate = adversarial_search(rc.tag, &grid, &params, rc.search_budget, rc.seed).map_err(
        |e| match e {
            TheoremError::BadSpec(m) | TheoremError::TagParamMismatch(m) => {
                CliError::Config(format!("search: {m}"))
            }
            other => CliError::Assertion(format!("search: {other}")),
        },
    )?;
    let mut report = RunReport::empty(rc.suite, rc.seed);
    report.estimates.push(estimate);
    Ok(report)
}

/// Runs the whole grid and folds the outcomes in grid order.
pub fn run_suite(rc: &ResolvedConfig, jobs: Option<usize>) -> Result<RunReport, CliError> {
    if rc.suite == Suite::Search {
        return run_search(rc);
    }
    let pool = symbol_pool(rc)?;
    let points = build_grid(rc);
    let outcomes: Vec<PointOutcome> = if jobs == Some(1) {
        points.iter().map(|p| run_point(rc, &pool, p)).collect()
    } else {
        let threads = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.unwrap_or(0))
            .build()
            .map_err(|e| CliError::Assertion(format!("thread pool: {e}")))?;
        threads.install(|| points.par_iter().map(|p| run_point(rc, &pool, p)).collect())
    };

    let mut report = RunReport::empty(rc.suite, rc.seed);
    for outcome in outcomes {
        match outcome {
            PointOutcome::Ratios(rows) => report.ratios.extend(rows),
            PointOutcome::Weak(entry) => report.weak_tables.push(entry),
            PointOutcome::Partial(entry) => report.partial_sums.push(entry),
            PointOutcome::Hard { check, ratios } => {
                report.hard_checks.push(check);
                report.ratios.extend(ratios);
            }
            PointOutcome::Skip(msg) => report.skipped.push(msg),
            PointOutcome::Fail(msg) => report.failures.push(msg),
        }
    }
    if rc.suite == Suite::Holder {
        report.ratios.push(holder_witness_row(rc)?);
    }
    Ok(report)
}

/// Scalar sharpness witness appended to every holder report: the pair
/// ([0], [eps]) under the radial power symbol sits exactly on the bound,
/// so the report always carries a ratio row pinned at 1.
fn holder_witness_row(rc: &ResolvedConfig) -> Result<RatioReport, CliError> {
    let eps = rc.eps[0];
    let n1 = ComplexMatrix::diagonal(&[Complex64::new(0.0, 0.0)]);
    let n2 = ComplexMatrix::diagonal(&[Complex64::new(eps, 0.0)]);
    let ctx = PairContext::from_pair(n1, n2)
        .map_err(|e| CliError::Assertion(format!("holder witness: {e}")))?;
    let symbol = Symbol::Field(
        symbols::abs_power(rc.alpha)
            .map_err(|e| CliError::Config(format!("holder witness: {e}")))?,
    );
    let params = RatioParams {
        alpha: Some(rc.alpha),
        p: Some(rc.p),
        omega: Some(rc.omega.clone()),
        budget: rc.budget,
        seed: seedmix::derive(rc.seed, 0xFACE),
    };
    let mut row = theorem_ratio(TheoremTag::Holder, &symbol, &ctx, &params)
        .map_err(|e| CliError::Assertion(format!("holder witness: {e}")))?;
    row.note = "scalar sharpness witness".to_string();
    Ok(row)
}

fn fmt_f(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt_f(v: Option<f64>) -> String {
    v.map(fmt_f).unwrap_or_default()
}

fn csv_row(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

pub const CSV_HEADER: &str = "tag,dim,mode,eps,alpha,p,l,ratio,numerator,denominator,seed";

/// Flattens a report into one CSV row per measurement. Section order is
/// fixed: ratios, hard checks, weak tables, partial sums, search witnesses.
pub fn render_csv(report: &RunReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let ratio_row = |out: &mut String, r: &RatioReport| {
        csv_row(
            out,
            &[
                r.tag.clone(),
                r.dim.to_string(),
                r.mode.clone().unwrap_or_default(),
                fmt_f(r.eps_requested.unwrap_or(r.eps_achieved)),
                fmt_opt_f(r.alpha),
                fmt_opt_f(r.p),
                r.l.map(|l| l.to_string()).unwrap_or_default(),
                fmt_f(r.ratio),
                fmt_f(r.numerator),
                fmt_f(r.denominator),
                r.pair_seed.unwrap_or(r.seed).to_string(),
            ],
        )
    };
    for r in &report.ratios {
        ratio_row(&mut out, r);
    }
    for c in &report.hard_checks {
        csv_row(
            &mut out,
            &[
                format!("{}_defect", report.suite),
                c.dim.to_string(),
                c.mode.clone(),
                fmt_f(c.eps),
                String::new(),
                String::new(),
                String::new(),
                fmt_f(c.value / c.bound),
                fmt_f(c.value),
                fmt_f(c.bound),
                c.pair_seed.to_string(),
            ],
        );
    }
    for entry in &report.weak_tables {
        for row in &entry.table.rows {
            csv_row(
                &mut out,
                &[
                    "weak".to_string(),
                    entry.dim.to_string(),
                    entry.mode.clone(),
                    fmt_f(entry.eps),
                    fmt_f(entry.table.alpha),
                    String::new(),
                    row.j.to_string(),
                    fmt_f(row.weighted),
                    fmt_f(row.s),
                    fmt_f(entry.table.strong_quasinorm),
                    entry.pair_seed.to_string(),
                ],
            );
        }
    }
    for entry in &report.partial_sums {
        for row in &entry.table.rows {
            csv_row(
                &mut out,
                &[
                    "partial_sum".to_string(),
                    entry.dim.to_string(),
                    entry.mode.clone(),
                    fmt_f(entry.eps),
                    fmt_f(entry.table.alpha),
                    fmt_f(entry.table.p),
                    row.l.to_string(),
                    fmt_opt_f(row.ratio),
                    fmt_f(row.lhs),
                    fmt_f(row.rhs),
                    entry.pair_seed.to_string(),
                ],
            );
        }
    }
    for est in &report.estimates {
        if let Some(w) = &est.witness {
            ratio_row(&mut out, w);
        }
    }
    out
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Loads, validates, runs, and writes. Reports land before the manifest;
/// nothing is written if validation fails.
pub fn execute(
    config_path: &Path,
    seed_override: Option<u64>,
    jobs: Option<usize>,
    out_override: Option<&Path>,
) -> Result<RunManifest, CliError> {
    let (cfg, raw) = ExperimentConfig::load(config_path)?;
    let mut rc = cfg.resolve()?;
    if let Some(seed) = seed_override {
        rc.seed = seed;
    }
    if let Some(out) = out_override {
        rc.out = out.to_path_buf();
    }

    let started_unix = unix_now();
    let grid_points = if rc.suite == Suite::Search {
        1
    } else {
        build_grid(&rc).len()
    };
    let report = run_suite(&rc, jobs)?;

    std::fs::create_dir_all(&rc.out)?;
    let json_text = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Assertion(format!("serialize report: {e}")))?;
    std::fs::write(rc.out.join("report.json"), json_text + "\n")?;
    std::fs::write(rc.out.join("report.csv"), render_csv(&report))?;

    let manifest = RunManifest {
        tool: "doictl".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        suite: rc.suite.name().to_string(),
        config_sha256: sha256_hex(&raw),
        seed: rc.seed,
        started_unix,
        finished_unix: unix_now(),
        grid_points,
        hard_checks: report.hard_checks.len(),
        hard_failures: report.hard_checks.iter().filter(|c| !c.passed).count(),
        max_defect: report.hard_checks.iter().map(|c| c.value).reduce(f64::max),
        computation_failures: report.failures.len(),
        skipped: report.skipped.len(),
        passed: report.passed(),
        report_files: vec!["report.json".to_string(), "report.csv".to_string()],
    };
    let manifest_text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Assertion(format!("serialize manifest: {e}")))?;
    std::fs::write(rc.out.join("manifest.json"), manifest_text + "\n")?;
    Ok(manifest)
}
