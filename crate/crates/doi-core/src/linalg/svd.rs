//! Singular values and Schatten (quasi)norms.
//!
//! Singular values come from a Hermitian eigensolve of the smaller Gram
//! matrix (`T T*` or `T* T`), with negative roundoff clamped to zero. The
//! independent cross-check used by the tests is the Hermitian dilation
//! `[[0, T], [T*, 0]]`, whose spectrum is the singular values with both
//! signs.

use super::{hermitian_eigen, ComplexMatrix, LinalgError};

/// Singular values in descending order.
#[derive(Clone, Debug)]
pub struct SingularValues {
    values: Vec<f64>,
}

impl SingularValues {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest singular value; zero for an empty list.
    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// Singular values of a rectangular matrix, descending. The list length is
/// `min(rows, cols)`.
pub fn singular_values(t: &ComplexMatrix) -> Result<SingularValues, LinalgError> {
    t.check_finite()?;
    let k = t.rows().min(t.cols());
    if k == 0 {
        return Ok(SingularValues { values: vec![] });
    }
    // Scale out the magnitude first: the Gram product squares entries and
    // would overflow around 1e154 otherwise.
    let m = t.max_abs();
    if m == 0.0 {
        return Ok(SingularValues {
            values: vec![0.0; k],
        });
    }
    let scaled = t.scaled_re(1.0 / m);
    let gram = if t.rows() <= t.cols() {
        scaled.mul(&scaled.adjoint())
    } else {
        scaled.adjoint().mul(&scaled)
    };
    let e = hermitian_eigen(&gram)?;
    let mut values: Vec<f64> = e
        .eigenvalues()
        .iter()
        .map(|&x| m * x.max(0.0).sqrt())
        .collect();
    values.reverse();
    Ok(SingularValues { values })
}

/// Largest singular value.
pub fn operator_norm(t: &ComplexMatrix) -> Result<f64, LinalgError> {
    Ok(singular_values(t)?.largest())
}

/// Schatten p-(quasi)norm for `p` in `(0, inf]`; `p = inf` is the operator
/// norm. The power sum is evaluated on ratios against the largest singular
/// value so that extreme scales cannot overflow.
pub fn schatten_norm(t: &ComplexMatrix, p: f64) -> Result<f64, LinalgError> {
    let sv = singular_values(t)?;
    schatten_of_values(sv.values(), p)
}

/// Schatten sum over an explicit list of singular values (descending or not;
/// the order does not matter).
pub fn schatten_of_values(values: &[f64], p: f64) -> Result<f64, LinalgError> {
    if !(p > 0.0) {
        return Err(LinalgError::BadFormat(format!(
            "Schatten exponent must be positive, got {p}"
        )));
    }
    let m = values.iter().fold(0.0f64, |acc, &s| acc.max(s));
    if p.is_infinite() {
        return Ok(m);
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = values.iter().map(|&s| (s / m).powf(p)).sum();
    Ok(m * sum.powf(1.0 / p))
}

/// Weak Schatten quasinorm `sup_j (1 + j)^alpha s_j` with `j` counted from
/// zero and singular values descending.
pub fn weak_quasinorm(t: &ComplexMatrix, alpha: f64) -> Result<f64, LinalgError> {
    if !(alpha > 0.0) {
        return Err(LinalgError::BadFormat(format!(
            "weak quasinorm exponent must be positive, got {alpha}"
        )));
    }
    let sv = singular_values(t)?;
    Ok(sv.values().iter().enumerate().fold(0.0f64, |acc, (j, &s)| {
        acc.max(((1 + j) as f64).powf(alpha) * s)
    }))
}
