//! JSON interchange format for matrices.
//!
//! A matrix is stored as `{"rows": r, "cols": c, "re": [...], "im": [...]}`
//! with both coefficient arrays row-major of length `r * c`. Serialization
//! uses shortest round-trip float formatting, so write-then-read reproduces
//! every entry bit for bit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexMatrix, LinalgError};

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// Serializes a matrix to the JSON interchange format.
pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    let body = MatrixJson {
        rows: m.rows(),
        cols: m.cols(),
        re: m.data().iter().map(|z| z.re).collect(),
        im: m.data().iter().map(|z| z.im).collect(),
    };
    serde_json::to_string(&body).expect("matrix serialization cannot fail")
}

/// Parses a matrix from the JSON interchange format, validating shape and
/// finiteness.
pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix, LinalgError> {
    let body: MatrixJson =
        serde_json::from_str(text).map_err(|e| LinalgError::BadFormat(e.to_string()))?;
    let expect = body.rows * body.cols;
    if body.re.len() != expect || body.im.len() != expect {
        return Err(LinalgError::BadFormat(format!(
            "coefficient arrays must have length {}, got re: {}, im: {}",
            expect,
            body.re.len(),
            body.im.len()
        )));
    }
    let data: Vec<Complex64> = body
        .re
        .iter()
        .zip(body.im.iter())
        .map(|(&re, &im)| Complex64::new(re, im))
        .collect();
    ComplexMatrix::new(body.rows, body.cols, data)
}
