//! Dyadic frequency decomposition of trigonometric polynomials.
//!
//! The window is built from the smooth bump `b(u) = exp(-1/(1-u^2))` on
//! `|u| < 1`: normalizing `b` against its integer translates gives a
//! partition of unity in `log2` scale, so every frequency length `t > 0`
//! lands in at most two dyadic pieces and the piece weights sum to one.
//! A frequency that is exactly a power of two lands in exactly one piece
//! with weight exactly one.

use num_complex::Complex64;

use super::{sup_norm, BoxSpec, FuncspaceError, TrigPoly2D, TrigTerm};

/// Fixed region over which piece sup norms are taken. Pieces of a
/// trigonometric polynomial are almost periodic, so a box a few periods wide
/// already sees their global sup; frequencies below 1/4 never enter a piece
/// with meaningful weight against this width.
const BESOV_BOX_HALF_WIDTH: f64 = 32.0;

fn bump(u: f64) -> f64 {
    if u.abs() < 1.0 {
        (-1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

/// Value of the dyadic window at `t > 0`; supported on `[1/2, 2]`, equal to
/// one at `t = 1`, and `sum_n window_weight(t / 2^n) = 1` for every `t > 0`.
pub fn window_weight(t: f64) -> f64 {
    if !(t > 0.0) || !t.is_finite() {
        return 0.0;
    }
    let v = t.log2();
    let fr = v - v.floor();
    let num = bump(v);
    if num == 0.0 {
        return 0.0;
    }
    num / (bump(fr) + bump(fr - 1.0))
}

/// Weight with which a frequency of length `t` enters piece `n`.
fn piece_weight(t: f64, n: i32) -> f64 {
    window_weight(t / (n as f64).exp2())
}

/// Littlewood-Paley decomposition of a trigonometric polynomial: one piece
/// per dyadic band plus a dedicated piece for the zero frequency.
#[derive(Clone, Debug)]
pub struct BesovLadder {
    low: TrigPoly2D,
    pieces: Vec<(i32, TrigPoly2D)>,
}

impl BesovLadder {
    /// The zero-frequency (constant) part.
    pub fn low(&self) -> &TrigPoly2D {
        &self.low
    }

    /// Nonempty dyadic pieces, ascending in the band index.
    pub fn pieces(&self) -> &[(i32, TrigPoly2D)] {
        &self.pieces
    }

    /// Sum of all pieces; reproduces the decomposed polynomial.
    pub fn reconstruct(&self) -> TrigPoly2D {
        let mut acc = self.low.clone();
        for (_, piece) in &self.pieces {
            acc = acc.add(piece);
        }
        acc
    }
}

/// Splits `f` into dyadic frequency pieces. Each term of length `t` inside
/// piece `n` is weighted by the window at `t / 2^n`; the weights over all
/// pieces sum to one term by term.
pub fn lp_pieces(f: &TrigPoly2D) -> BesovLadder {
    let mut low_terms: Vec<TrigTerm> = Vec::new();
    let mut banded: Vec<(i32, Vec<TrigTerm>)> = Vec::new();
    for t in f.terms() {
        let len = t.freq_norm();
        if len == 0.0 {
            low_terms.push(*t);
            continue;
        }
        let base = len.log2().floor() as i32;
        for n in [base, base + 1] {
            let w = piece_weight(len, n);
            if w > 0.0 {
                let entry = match banded.iter_mut().find(|(m, _)| *m == n) {
                    Some((_, terms)) => terms,
                    None => {
                        banded.push((n, Vec::new()));
                        &mut banded.last_mut().expect("just pushed").1
                    }
                };
                entry.push(TrigTerm {
                    a: t.a,
                    b: t.b,
                    coeff: t.coeff * w,
                });
            }
        }
    }
    banded.sort_by_key(|(n, _)| *n);
    let pieces = banded
        .into_iter()
        .map(|(n, terms)| {
            (
                n,
                TrigPoly2D::new(terms).expect("weighted terms of a valid polynomial are finite"),
            )
        })
        .collect();
    BesovLadder {
        low: TrigPoly2D::new(low_terms).expect("terms of a valid polynomial are finite"),
        pieces,
    }
}

/// Besov-type norm of smoothness `s`: `sum_n 2^(n s) sup|piece_n|` plus the
/// sup of the zero-frequency part. Sup norms are taken over a fixed centered
/// box wide enough that the almost-periodic pieces attain their sup.
pub fn besov_norm(f: &TrigPoly2D, s: f64) -> Result<f64, FuncspaceError> {
    if !s.is_finite() {
        return Err(FuncspaceError::BadParameter(format!(
            "smoothness parameter must be finite, got {s}"
        )));
    }
    let region = BoxSpec::new(Complex64::new(0.0, 0.0), BESOV_BOX_HALF_WIDTH)
        .expect("fixed box parameters are valid");
    let ladder = lp_pieces(f);
    let mut total = 0.0;
    if !ladder.low().is_zero() {
        total += sup_norm(&ladder.low().to_field(), &region)?.value;
    }
    for (n, piece) in ladder.pieces() {
        let sup = sup_norm(&piece.to_field(), &region)?.value;
        total += (*n as f64 * s).exp2() * sup;
    }
    Ok(total)
}
