//! On-disk formats: family definitions in, implicitization results out.
//! Everything is JSON with shortest round-trip float formatting, so values
//! survive a write/read cycle bit-exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use envcheb::bipoly::BiPoly;
use envcheb::geom::{Interval, Point2, Rect, Triangle};
use envcheb::implicitize::ImplicitApproximation;
use envcheb::RationalFamily;

use crate::CliError;

/// A rational family definition.
///
/// ```json
/// {
///   "bidegree": [2, 1],
///   "x": [[0.0, 1.0], [1.0, 0.0], [0.0, 0.0]],
///   "y": [[0.0, 0.0], [0.0, 2.0], [1.0, 0.0]],
///   "w": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]],
///   "domain": [[0.0, 1.0], [0.0, 1.0]]
/// }
/// ```
///
/// Coefficient matrices are in the tensor power basis: row `i` is the
/// `s`-degree, column `j` the `t`-degree, and every matrix must be shaped
/// `(n1+1) x (n2+1)`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub bidegree: [usize; 2],
    pub x: Vec<Vec<f64>>,
    pub y: Vec<Vec<f64>>,
    pub w: Vec<Vec<f64>>,
    pub domain: [[f64; 2]; 2],
}

impl FamilyFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("malformed family file {}: {e}", path.display())))
    }

    pub fn to_family(&self) -> Result<RationalFamily, CliError> {
        let [n1, n2] = self.bidegree;
        for (name, matrix) in [("x", &self.x), ("y", &self.y), ("w", &self.w)] {
            if matrix.len() != n1 + 1 || matrix.iter().any(|row| row.len() != n2 + 1) {
                return Err(CliError::Input(format!(
                    "matrix `{name}` must be {}x{} for bidegree [{n1}, {n2}]",
                    n1 + 1,
                    n2 + 1
                )));
            }
        }
        let [[s_lo, s_hi], [t_lo, t_hi]] = self.domain;
        let ordered = s_lo < s_hi && t_lo < t_hi;
        if !ordered {
            return Err(CliError::Input(
                "domain intervals must be ordered with positive length".into(),
            ));
        }
        let domain = Rect::new(Interval::new(s_lo, s_hi), Interval::new(t_lo, t_hi));
        RationalFamily::new(
            BiPoly::from_rows(self.x.clone()),
            BiPoly::from_rows(self.y.clone()),
            BiPoly::from_rows(self.w.clone()),
            domain,
        )
        .map_err(CliError::from_core)
    }
}

/// An implicitization result. `sigma_gap` is `null` when infinite.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultFile {
    pub tool_version: String,
    /// FNV-1a hash of the input family, hex-encoded.
    pub input_fingerprint: String,
    pub degree: usize,
    pub triangle: [[f64; 2]; 3],
    /// Unit-norm coefficient vector split: triangular Bernstein part.
    pub c_q: Vec<f64>,
    pub lambda_bidegree: [usize; 2],
    pub lambda_domain: [[f64; 2]; 2],
    pub c_lambda: Vec<f64>,
    pub sigma_min: f64,
    pub sigma_gap: Option<f64>,
    pub working_bidegree: [usize; 2],
    pub matrix_rows: usize,
    pub matrix_cols: usize,
    pub row_weighting: bool,
    pub domain: [[f64; 2]; 2],
}

fn rect_to_array(r: &Rect) -> [[f64; 2]; 2] {
    [[r.s.lo, r.s.hi], [r.t.lo, r.t.hi]]
}

impl ResultFile {
    pub fn from_approximation(a: &ImplicitApproximation) -> Self {
        ResultFile {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input_fingerprint: format!("{:016x}", a.family_fingerprint),
            degree: a.spec.degree,
            triangle: a.spec.triangle.vertices.map(|v| [v.x, v.y]),
            c_q: a.c_q.clone(),
            lambda_bidegree: [a.spec.lambda_bidegree.0, a.spec.lambda_bidegree.1],
            lambda_domain: rect_to_array(&a.spec.lambda_domain),
            c_lambda: a.c_lambda.clone(),
            sigma_min: a.sigma_min,
            sigma_gap: a.sigma_gap.is_finite().then_some(a.sigma_gap),
            working_bidegree: [a.spec.working_bidegree.0, a.spec.working_bidegree.1],
            matrix_rows: a.matrix_rows,
            matrix_cols: a.matrix_cols,
            row_weighting: a.spec.row_weighting,
            domain: rect_to_array(&a.domain),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        let file: ResultFile = serde_json::from_str(&text).map_err(|e| {
            CliError::Input(format!("malformed result file {}: {e}", path.display()))
        })?;
        let m = (file.degree + 1) * (file.degree + 2) / 2;
        if file.c_q.len() != m {
            return Err(CliError::Input(format!(
                "c_q has {} entries, expected {m} for degree {}",
                file.c_q.len(),
                file.degree
            )));
        }
        let lam = (file.lambda_bidegree[0] + 1) * (file.lambda_bidegree[1] + 1);
        if file.c_lambda.len() != lam {
            return Err(CliError::Input(format!(
                "c_lambda has {} entries, expected {lam}",
                file.c_lambda.len()
            )));
        }
        if file.triangle().is_degenerate() {
            return Err(CliError::Input("result triangle is degenerate".into()));
        }
        Ok(file)
    }

    pub fn triangle(&self) -> Triangle {
        let [a, b, c] = self.triangle;
        Triangle::new(
            Point2::new(a[0], a[1]),
            Point2::new(b[0], b[1]),
            Point2::new(c[0], c[1]),
        )
    }

    /// Evaluates the stored implicit polynomial at a plane point.
    pub fn eval_q(&self, p: Point2) -> Result<f64, CliError> {
        let beta = envcheb::implicitize::triangular_bernstein_eval(self.degree, &self.triangle(), p)
            .map_err(CliError::from_core)?;
        Ok(beta.iter().zip(&self.c_q).map(|(b, c)| b * c).sum())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serialization cannot fail")
    }
}

/// Writes via a temporary file in the same directory plus a rename, so
/// readers never observe partial output.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
        .map_err(|e| CliError::Input(format!("cannot create temporary file: {e}")))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}
