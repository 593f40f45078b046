//! Seeded search for worst-case witnesses of each inequality.
//!
//! The search interleaves random restarts over a grid of dimensions, pair
//! modes, and distances with greedy refinement of the incumbent: nudging
//! one eigenvalue of a shared-basis pair, or rotating a conjugated pair by
//! one plane rotation, with geometrically decaying steps. The candidate
//! sequence is a pure function of the seed and the evaluation counter, so a
//! larger budget replays the same prefix and the running maximum never
//! decreases.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::funcspace::symbols;
use crate::linalg::ComplexMatrix;
use crate::seedmix;
use crate::theorems::generate::{assemble_shared, shared_basis_parts};
use crate::theorems::{
    theorem_ratio, NormalPairSpec, PairContext, PairMode, RatioParams, RatioReport, Symbol,
    TheoremError, TheoremTag,
};

/// Candidate grid the restarts draw from.
#[derive(Clone, Debug)]
pub struct SearchGrid {
    pub dims: Vec<usize>,
    pub modes: Vec<PairMode>,
    pub eps: Vec<f64>,
    pub symbols: Vec<Symbol>,
}

impl SearchGrid {
    /// A tag-appropriate default: symbols the bound applies to, small
    /// dimensions, three distance decades.
    pub fn for_tag(tag: TheoremTag, params: &RatioParams) -> Result<Self, TheoremError> {
        let symbols: Vec<Symbol> = match tag {
            TheoremTag::KeyIneq => vec![
                Symbol::Trig(symbols::exponential(1.0, 0.0)?),
                Symbol::Trig(symbols::exponential(0.6, 0.8)?),
                Symbol::Trig(symbols::random_trig(3, 0.9, 5)),
            ],
            TheoremTag::LipBesov | TheoremTag::TraceBesov | TheoremTag::BesovAlphaS1 => vec![
                Symbol::Trig(symbols::exponential(2.0, 0.0)?),
                Symbol::Trig(symbols::exponential(0.0, 1.0)?),
                Symbol::Trig(symbols::random_trig(3, 2.0, 6)),
                Symbol::Trig(symbols::random_trig(5, 4.0, 7)),
            ],
            TheoremTag::Holder | TheoremTag::SchattenP => vec![
                Symbol::Field(symbols::abs_power(params.alpha.unwrap_or(0.5))?),
                Symbol::Field(symbols::capped_abs()),
                Symbol::Field(symbols::ramp()),
            ],
            TheoremTag::Omega => vec![
                Symbol::Field(symbols::capped_abs()),
                Symbol::Field(symbols::ramp()),
            ],
        };
        Ok(Self {
            dims: vec![1, 2, 3, 4, 6],
            modes: PairMode::ALL.to_vec(),
            eps: vec![1.0, 0.1, 0.01],
            symbols,
        })
    }

    fn validate(&self) -> Result<(), TheoremError> {
        if self.dims.is_empty()
            || self.modes.is_empty()
            || self.eps.is_empty()
            || self.symbols.is_empty()
        {
            return Err(TheoremError::BadSpec(
                "search grid must list at least one dimension, mode, distance, and symbol".into(),
            ));
        }
        if self.dims.contains(&0) {
            return Err(TheoremError::BadSpec(
                "search grid contains dimension 0".into(),
            ));
        }
        for &e in &self.eps {
            if !(e > 0.0) || !e.is_finite() {
                return Err(TheoremError::BadSpec(format!(
                    "search grid distance must be positive and finite, got {e}"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of a search: the largest ratio seen and the report that
/// produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub tag: String,
    pub best_ratio: f64,
    pub witness: Option<RatioReport>,
    pub budget: u64,
    /// Candidates actually drawn; equals the budget unless it is huge.
    pub evaluations: u64,
    pub seed: u64,
}

const MAX_REFINE_ROUNDS: u32 = 12;

/// Refinement chain state: where to perturb from and how far along the
/// step decay the chain is.
enum Refinement {
    Shared {
        u: ComplexMatrix,
        lambda: Vec<Complex64>,
        delta: Vec<Complex64>,
        eps: f64,
        symbol_index: usize,
        round: u32,
    },
    Rotate {
        n1: ComplexMatrix,
        n2: ComplexMatrix,
        symbol_index: usize,
        round: u32,
    },
}

fn plane_rotation(dim: usize, p: usize, q: usize, angle: f64) -> ComplexMatrix {
    let mut g = ComplexMatrix::identity(dim);
    let (c, s) = (angle.cos(), angle.sin());
    g[(p, p)] = Complex64::new(c, 0.0);
    g[(q, q)] = Complex64::new(c, 0.0);
    g[(p, q)] = Complex64::new(-s, 0.0);
    g[(q, p)] = Complex64::new(s, 0.0);
    g
}

fn upfront_validate(tag: TheoremTag, params: &RatioParams) -> Result<(), TheoremError> {
    match tag {
        TheoremTag::Holder | TheoremTag::BesovAlphaS1 => {
            super::require_alpha(params, tag.name()).map(|_| ())
        }
        TheoremTag::SchattenP => {
            super::require_alpha(params, tag.name())?;
            super::require_p(params, tag.name()).map(|_| ())
        }
        TheoremTag::Omega => params.omega.as_ref().map(|_| ()).ok_or_else(|| {
            TheoremError::TagParamMismatch("the modulus bound needs a modulus of continuity".into())
        }),
        _ => Ok(()),
    }
}

/// Hunts for the largest ratio of one inequality over the grid, spending
/// exactly `budget` candidate evaluations.
pub fn adversarial_search(
    tag: TheoremTag,
    grid: &SearchGrid,
    params: &RatioParams,
    budget: u64,
    seed: u64,
) -> Result<ConstantEstimate, TheoremError> {
    if budget == 0 {
        return Err(TheoremError::BadSpec(
            "search budget must be at least 1".into(),
        ));
    }
    grid.validate()?;
    upfront_validate(tag, params)?;

    let mut best: Option<RatioReport> = None;
    let mut pending: Option<Refinement> = None;
    let mut evals: u64 = 0;
    let mut restarts: u64 = 0;

    let consider =
        |report: Result<RatioReport, TheoremError>, best: &mut Option<RatioReport>| -> bool {
            match report {
                Ok(r) => {
                    let improved = best.as_ref().is_none_or(|b| r.ratio > b.ratio);
                    if improved {
                        *best = Some(r);
                    }
                    improved
                }
                // Unreachable scales and vanishing denominators just burn one
                // candidate; systematic parameter errors were screened above.
                Err(_) => false,
            }
        };

    while evals < budget {
        if let Some(state) = pending.take() {
            evals += 1;
            let mut rng = ChaCha8Rng::seed_from_u64(seedmix::derive(seed, 0x5000 + evals));
            match state {
                Refinement::Shared {
                    u,
                    lambda,
                    mut delta,
                    eps,
                    symbol_index,
                    round,
                } => {
                    let dim = lambda.len();
                    let j = rng.random_range(0..dim);
                    let step = eps * 0.5f64.powi(round as i32 + 1);
                    let unit = match rng.random_range(0..4u32) {
                        0 => Complex64::new(1.0, 0.0),
                        1 => Complex64::new(-1.0, 0.0),
                        2 => Complex64::new(0.0, 1.0),
                        _ => Complex64::new(0.0, -1.0),
                    };
                    let saved = delta[j];
                    delta[j] += unit * step;
                    let (n1, n2) = assemble_shared(&u, &lambda, &delta);
                    let report = PairContext::from_pair(n1, n2).and_then(|ctx| {
                        theorem_ratio(tag, &grid.symbols[symbol_index], &ctx, params)
                    });
                    let improved = consider(report, &mut best);
                    if !improved {
                        delta[j] = saved;
                    }
                    if round + 1 < MAX_REFINE_ROUNDS {
                        pending = Some(Refinement::Shared {
                            u,
                            lambda,
                            delta,
                            eps,
                            symbol_index,
                            round: round + 1,
                        });
                    }
                }
                Refinement::Rotate {
                    n1,
                    n2,
                    symbol_index,
                    round,
                } => {
                    let dim = n1.rows();
                    let angle = 0.3 * 0.5f64.powi(round as i32 + 1);
                    let p = rng.random_range(0..dim);
                    let q = (p + 1 + rng.random_range(0..dim.max(2) - 1)) % dim;
                    let rotated = if dim >= 2 && p != q {
                        let g = plane_rotation(dim, p, q, angle);
                        g.mul(&n2).mul(&g.adjoint())
                    } else {
                        n2.clone()
                    };
                    let report =
                        PairContext::from_pair(n1.clone(), rotated.clone()).and_then(|ctx| {
                            theorem_ratio(tag, &grid.symbols[symbol_index], &ctx, params)
                        });
                    let improved = consider(report, &mut best);
                    let next_n2 = if improved { rotated } else { n2 };
                    if round + 1 < MAX_REFINE_ROUNDS {
                        pending = Some(Refinement::Rotate {
                            n1,
                            n2: next_n2,
                            symbol_index,
                            round: round + 1,
                        });
                    }
                }
            }
            continue;
        }

        // Restart. The first holder candidate is the scalar sharpness
        // witness, which pins the estimate at 1 from below.
        evals += 1;
        let r = restarts;
        restarts += 1;
        if r == 0 && tag == TheoremTag::Holder {
            let eps = grid.eps[0];
            let alpha = params.alpha.unwrap_or(0.5);
            let witness_symbol = Symbol::Field(symbols::abs_power(alpha)?);
            let ctx = PairContext::from_pair(
                ComplexMatrix::diagonal(&[Complex64::new(0.0, 0.0)]),
                ComplexMatrix::diagonal(&[Complex64::new(eps, 0.0)]),
            )?;
            consider(theorem_ratio(tag, &witness_symbol, &ctx, params), &mut best);
            continue;
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seedmix::derive(seed, 0x10 + r));
        let dim = grid.dims[rng.random_range(0..grid.dims.len())];
        let mode = grid.modes[rng.random_range(0..grid.modes.len())];
        let eps = grid.eps[rng.random_range(0..grid.eps.len())];
        let symbol_index = (r as usize) % grid.symbols.len();
        let pair_seed = seedmix::derive(seed, 0x9000 + r);
        let spec = NormalPairSpec {
            dim,
            mode,
            eps,
            seed: pair_seed,
        };

        let candidate = PairContext::from_spec(&spec)
            .and_then(|ctx| theorem_ratio(tag, &grid.symbols[symbol_index], &ctx, params));
        let improved = consider(candidate, &mut best);
        if improved {
            match mode {
                PairMode::SharedBasis => {
                    let (u, lambda, delta) = shared_basis_parts(dim, eps, pair_seed)?;
                    pending = Some(Refinement::Shared {
                        u,
                        lambda,
                        delta,
                        eps,
                        symbol_index,
                        round: 0,
                    });
                }
                PairMode::Conjugated => {
                    if let Ok((n1, n2)) = super::generate::conjugated_pair(dim, eps, pair_seed) {
                        pending = Some(Refinement::Rotate {
                            n1,
                            n2,
                            symbol_index,
                            round: 0,
                        });
                    }
                }
                PairMode::Independent => {}
            }
        }
    }

    Ok(ConstantEstimate {
        tag: tag.name().to_string(),
        best_ratio: best.as_ref().map_or(0.0, |b| b.ratio),
        witness: best,
        budget,
        evaluations: evals,
        seed,
    })
}
