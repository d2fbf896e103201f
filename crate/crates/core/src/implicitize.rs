//! Assembly of the collocation matrix and the constrained minimization.
//!
//! The implicit polynomial `q` (triangular Bernstein basis over a reference
//! triangle, total degree `d`) and the cofactor `lambda` (tensor Bernstein
//! basis of bidegree `(k1, k2)` over the parameter rectangle) are found by
//! minimizing the weighted residual of
//!
//! ```text
//! (q o p)(s,t) w(s,t)^d - lambda(s,t) h(s,t)^2
//! ```
//!
//! over unit coefficient vectors. Expressing the residual in tensor
//! Chebyshev coefficients turns the objective into `||D c||_2`, so the
//! minimizer is the right singular vector of the smallest singular value.

use nalgebra::{DMatrix, DVector, SVD};
use rayon::prelude::*;

use crate::bipoly::BiPoly;
use crate::chebtransform::{cheb_transform_2d, ChebGrid};
use crate::envelope::{RationalFamily, DENOMINATOR_TOL};
use crate::error::{Error, Result};
use crate::geom::{Point2, Rect, Triangle};

/// Cofactor bidegree `(k1, k2) = (max(0, d*n1 - 2*deg_s h), max(0, d*n2 - 2*deg_t h))`,
/// the minimum needed to carry an exact solution. `h` must already be
/// degree-trimmed.
pub fn lambda_degrees(f: &RationalFamily, h: &BiPoly, d: usize) -> (usize, usize) {
    let (n1, n2) = f.bidegree();
    let k1 = (d * n1).saturating_sub(2 * h.deg_s());
    let k2 = (d * n2).saturating_sub(2 * h.deg_t());
    (k1, k2)
}

/// Working bidegree `(L1, L2) = (max(d*n1, k1 + 2*deg_s h), max(d*n2, k2 + 2*deg_t h))`
/// in which every term of the residual is exactly representable.
pub fn working_bidegree(
    f: &RationalFamily,
    h: &BiPoly,
    d: usize,
    k1: usize,
    k2: usize,
) -> (usize, usize) {
    let (n1, n2) = f.bidegree();
    let l1 = (d * n1).max(k1 + 2 * h.deg_s());
    let l2 = (d * n2).max(k2 + 2 * h.deg_t());
    (l1, l2)
}

/// Builds the reference triangle for `q`: sample the family image on a
/// 33x33 grid, pad the bounding box by 10% per side (at least 1e-6), and
/// return the right triangle with legs twice the padded extents, which
/// contains the padded box.
pub fn reference_triangle(f: &RationalFamily) -> Result<Triangle> {
    let domain = f.domain();
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in domain.s.linspace(33) {
        for t in domain.t.linspace(33) {
            let p = f.eval(s, t)?;
            min_x = min_x.min(p.x);
            max_x = max_x.max(p.x);
            min_y = min_y.min(p.y);
            max_y = max_y.max(p.y);
        }
    }
    if max_x - min_x == 0.0 && max_y - min_y == 0.0 {
        return Err(Error::DegenerateImage);
    }
    let pad_x = (0.1 * (max_x - min_x)).max(1e-6);
    let pad_y = (0.1 * (max_y - min_y)).max(1e-6);
    let x0 = min_x - pad_x;
    let y0 = min_y - pad_y;
    let width = (max_x - min_x) + 2.0 * pad_x;
    let height = (max_y - min_y) + 2.0 * pad_y;
    Ok(Triangle::new(
        Point2::new(x0, y0),
        Point2::new(x0 + 2.0 * width, y0),
        Point2::new(x0, y0 + 2.0 * height),
    ))
}

/// Multi-indices `(i, j, k)` of the degree-`d` triangular Bernstein basis in
/// lexicographic `(i, j)` order, with `k = d - i - j`.
pub fn triangle_multi_indices(d: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::with_capacity((d + 1) * (d + 2) / 2);
    for i in 0..=d {
        for j in 0..=(d - i) {
            out.push((i, j, d - i - j));
        }
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for r in 0..k {
        acc = acc * (n - r) as f64 / (r + 1) as f64;
    }
    acc
}

/// Values of the `M = (d+1)(d+2)/2` triangular Bernstein basis functions
/// `d!/(i!j!k!) u^i v^j w^k` at `point`, in lexicographic `(i, j)` order.
/// Points outside the triangle extrapolate through negative barycentric
/// coordinates.
pub fn triangular_bernstein_eval(d: usize, triangle: &Triangle, point: Point2) -> Result<Vec<f64>> {
    let (u, v, w) = triangle.barycentric(point)?;
    let mut out = Vec::with_capacity((d + 1) * (d + 2) / 2);
    for (i, j, k) in triangle_multi_indices(d) {
        let multinomial = binomial(d, i) * binomial(d - i, j);
        out.push(multinomial * u.powi(i as i32) * v.powi(j as i32) * w.powi(k as i32));
    }
    Ok(out)
}

fn bernstein_1d(k: usize, i: usize, x: f64) -> f64 {
    binomial(k, i) * x.powi(i as i32) * (1.0 - x).powi((k - i) as i32)
}

/// Values of the `(k1+1)(k2+1)` tensor-product Bernstein basis functions
/// over `domain` at `(s, t)`, row-major in `(i, j)`.
pub fn tensor_bernstein_eval(
    bidegree: (usize, usize),
    domain: &Rect,
    s: f64,
    t: f64,
) -> Vec<f64> {
    let (k1, k2) = bidegree;
    let u = domain.s.to_unit01(s);
    let v = domain.t.to_unit01(t);
    let bs: Vec<f64> = (0..=k1).map(|i| bernstein_1d(k1, i, u)).collect();
    let bt: Vec<f64> = (0..=k2).map(|j| bernstein_1d(k2, j, v)).collect();
    let mut out = Vec::with_capacity((k1 + 1) * (k2 + 1));
    for &a in &bs {
        for &b in &bt {
            out.push(a * b);
        }
    }
    out
}

/// Optional deviations from the derived basis setup.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub lambda_bidegree: Option<(usize, usize)>,
    pub triangle: Option<Triangle>,
    pub row_weighting: Option<bool>,
}

/// The basis bookkeeping for one implicitization problem.
#[derive(Debug, Clone)]
pub struct ImplicitBasisSpec {
    /// Total degree `d` of the implicit polynomial.
    pub degree: usize,
    /// Number of triangular Bernstein functions, `(d+1)(d+2)/2`.
    pub m: usize,
    pub triangle: Triangle,
    pub lambda_bidegree: (usize, usize),
    /// Domain of the tensor Bernstein basis for `lambda` (the parameter
    /// rectangle).
    pub lambda_domain: Rect,
    pub working_bidegree: (usize, usize),
    pub row_weighting: bool,
}

impl ImplicitBasisSpec {
    /// Derives the spec for `f` at implicit degree `d` from the trimmed
    /// envelope function, honoring any overrides.
    pub fn derive(
        f: &RationalFamily,
        h: &BiPoly,
        d: usize,
        overrides: &Overrides,
    ) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidParameter("degree must be >= 1".into()));
        }
        let (k1, k2) = overrides
            .lambda_bidegree
            .unwrap_or_else(|| lambda_degrees(f, h, d));
        let triangle = match overrides.triangle {
            Some(t) => t,
            None => reference_triangle(f)?,
        };
        if triangle.is_degenerate() {
            return Err(Error::DegenerateTriangle {
                area: triangle.area(),
            });
        }
        Ok(ImplicitBasisSpec {
            degree: d,
            m: (d + 1) * (d + 2) / 2,
            triangle,
            lambda_bidegree: (k1, k2),
            lambda_domain: f.domain(),
            working_bidegree: working_bidegree(f, h, d, k1, k2),
            row_weighting: overrides.row_weighting.unwrap_or(true),
        })
    }

    pub fn lambda_count(&self) -> usize {
        (self.lambda_bidegree.0 + 1) * (self.lambda_bidegree.1 + 1)
    }
}

/// Which basis function a column of the collocation matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisColumn {
    /// Triangular Bernstein function with barycentric exponents `(i, j, k)`.
    Q(usize, usize, usize),
    /// Tensor Bernstein function with exponents `(i, j)`.
    Lambda(usize, usize),
}

/// The matrix `D = (D_q, D_lambda)` of Chebyshev coefficients, one column
/// per basis function. Row `(i, j)` (row-major in the Chebyshev indices) is
/// optionally scaled by `2^(-(1[i>0] + 1[j>0]) / 2)` so that `||D c||_2` is
/// proportional to the Chebyshev-weighted L2 norm of the residual.
#[derive(Debug, Clone)]
pub struct CollocationMatrix {
    pub matrix: DMatrix<f64>,
    pub m: usize,
    pub lambda_bidegree: (usize, usize),
    pub working_bidegree: (usize, usize),
    pub row_weighting: bool,
}

impl CollocationMatrix {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    /// True when zero-row padding is needed before the SVD.
    pub fn needs_padding(&self) -> bool {
        self.rows() < self.cols()
    }

    pub fn column_basis(&self, col: usize) -> BasisColumn {
        assert!(col < self.cols());
        if col < self.m {
            let d = (0..).find(|&d| (d + 1) * (d + 2) / 2 == self.m).unwrap();
            let (i, j, k) = triangle_multi_indices(d)[col];
            BasisColumn::Q(i, j, k)
        } else {
            let l = col - self.m;
            let (_, k2) = self.lambda_bidegree;
            BasisColumn::Lambda(l / (k2 + 1), l % (k2 + 1))
        }
    }
}

/// Assembles `D` by sampling `w^d (beta_k o p)` and `-h^2 alpha_l` on the
/// working Chebyshev grid and transforming each function to coefficients.
/// Columns are built in parallel and land at fixed indices, so the matrix is
/// identical for any schedule.
pub fn build_d(
    f: &RationalFamily,
    h: &BiPoly,
    spec: &ImplicitBasisSpec,
) -> Result<CollocationMatrix> {
    let (l1, l2) = spec.working_bidegree;
    let domain = f.domain();
    let grid = ChebGrid::new(l1, l2, domain.s, domain.t);

    let w_cut = DENOMINATOR_TOL * f.w().max_abs_coeff();
    for &s in &grid.nodes_s {
        for &t in &grid.nodes_t {
            let wv = f.w().eval(s, t);
            if wv.abs() < w_cut {
                return Err(Error::DenominatorNearZero {
                    s,
                    t,
                    value: wv.abs(),
                });
            }
        }
    }

    let h2 = h.mul(h);
    let d = spec.degree as i32;
    let n_s = grid.nodes_s.len();
    let n_t = grid.nodes_t.len();
    let total_cols = spec.m + spec.lambda_count();

    // one pass over grid points: evaluate every basis image at once
    let point_rows: Result<Vec<Vec<f64>>> = (0..n_s * n_t)
        .into_par_iter()
        .map(|idx| {
            let s = grid.nodes_s[idx / n_t];
            let t = grid.nodes_t[idx % n_t];
            let wv = f.w().eval(s, t);
            let wd = wv.powi(d);
            let p = Point2::new(f.x().eval(s, t) / wv, f.y().eval(s, t) / wv);
            let beta = triangular_bernstein_eval(spec.degree, &spec.triangle, p)?;
            let alpha = tensor_bernstein_eval(spec.lambda_bidegree, &spec.lambda_domain, s, t);
            let h2v = h2.eval(s, t);
            let mut row = Vec::with_capacity(total_cols);
            row.extend(beta.iter().map(|b| wd * b));
            row.extend(alpha.iter().map(|a| -h2v * a));
            Ok(row)
        })
        .collect();
    let point_rows = point_rows?;

    // one transform per column
    let columns: Result<Vec<Vec<f64>>> = (0..total_cols)
        .into_par_iter()
        .map(|col| {
            let samples =
                DMatrix::from_fn(n_s, n_t, |i, j| point_rows[i * n_t + j][col]);
            Ok(cheb_transform_2d(&grid, &samples)?.flatten_row_major())
        })
        .collect();
    let columns = columns?;

    let n_rows = (l1 + 1) * (l2 + 1);
    let mut matrix = DMatrix::zeros(n_rows, total_cols);
    for (c, column) in columns.iter().enumerate() {
        for (r, &v) in column.iter().enumerate() {
            matrix[(r, c)] = v;
        }
    }
    if spec.row_weighting {
        for r in 0..n_rows {
            let (i, j) = (r / (l2 + 1), r % (l2 + 1));
            let mut weight = 1.0;
            if i > 0 {
                weight *= std::f64::consts::FRAC_1_SQRT_2;
            }
            if j > 0 {
                weight *= std::f64::consts::FRAC_1_SQRT_2;
            }
            if weight != 1.0 {
                for c in 0..total_cols {
                    matrix[(r, c)] *= weight;
                }
            }
        }
    }

    Ok(CollocationMatrix {
        matrix,
        m: spec.m,
        lambda_bidegree: spec.lambda_bidegree,
        working_bidegree: spec.working_bidegree,
        row_weighting: spec.row_weighting,
    })
}

/// Result of the singular value minimization.
#[derive(Debug, Clone)]
pub struct MinSolution {
    pub sigma_min: f64,
    /// Ratio of the second-smallest to the smallest singular value
    /// (infinite when `sigma_min == 0`). A small gap means the implicit
    /// degree exceeds the exact degree and several near-minimizers exist.
    pub sigma_gap: f64,
    /// Unit right singular vector of the smallest singular value, sign fixed
    /// so the largest-magnitude entry is positive.
    pub c: DVector<f64>,
    /// Number of zero rows appended to make the matrix at least square.
    pub padded_rows: usize,
}

/// Smallest singular value, gap and minimizing unit vector of `D`.
pub fn solve_min(d: &CollocationMatrix) -> Result<MinSolution> {
    let padded_rows = d.cols().saturating_sub(d.rows());
    let matrix = if padded_rows > 0 {
        let mut padded = DMatrix::zeros(d.cols(), d.cols());
        padded.view_mut((0, 0), (d.rows(), d.cols())).copy_from(&d.matrix);
        padded
    } else {
        d.matrix.clone()
    };

    let svd = SVD::try_new(matrix, false, true, f64::EPSILON, 10_000)
        .ok_or(Error::NumericalFailure)?;
    let sv = &svd.singular_values;
    let min_idx = (0..sv.len())
        .min_by(|&a, &b| sv[a].total_cmp(&sv[b]))
        .expect("at least one singular value");
    let sigma_min = sv[min_idx];
    let second = (0..sv.len())
        .filter(|&i| i != min_idx)
        .map(|i| sv[i])
        .fold(f64::INFINITY, f64::min);
    let sigma_gap = if sigma_min == 0.0 {
        f64::INFINITY
    } else {
        second / sigma_min
    };

    let v_t = svd.v_t.expect("right singular vectors were requested");
    let mut c: DVector<f64> = v_t.row(min_idx).transpose();
    c /= c.norm();
    let max_idx = (0..c.len())
        .max_by(|&a, &b| c[a].abs().total_cmp(&c[b].abs()))
        .unwrap();
    if c[max_idx] < 0.0 {
        c.neg_mut();
    }

    Ok(MinSolution {
        sigma_min,
        sigma_gap,
        c,
        padded_rows,
    })
}

/// A computed implicit approximation: the coefficients of `q` and `lambda`,
/// the smallest singular value and the basis bookkeeping.
#[derive(Debug, Clone)]
pub struct ImplicitApproximation {
    /// Triangular Bernstein coefficients of `q`, lexicographic `(i, j)`
    /// order. Together with `c_lambda` this is a unit vector.
    pub c_q: Vec<f64>,
    /// Tensor Bernstein coefficients of `lambda`, row-major `(i, j)` order.
    pub c_lambda: Vec<f64>,
    pub sigma_min: f64,
    pub sigma_gap: f64,
    pub spec: ImplicitBasisSpec,
    pub domain: Rect,
    pub family_fingerprint: u64,
    pub matrix_rows: usize,
    pub matrix_cols: usize,
}

impl ImplicitApproximation {
    /// Evaluates `q` at a plane point with the stored coefficients.
    pub fn eval_q(&self, p: Point2) -> Result<f64> {
        let beta = triangular_bernstein_eval(self.spec.degree, &self.spec.triangle, p)?;
        Ok(beta.iter().zip(&self.c_q).map(|(b, c)| b * c).sum())
    }

    /// Evaluates `lambda` at a parameter point.
    pub fn eval_lambda(&self, s: f64, t: f64) -> f64 {
        let alpha =
            tensor_bernstein_eval(self.spec.lambda_bidegree, &self.spec.lambda_domain, s, t);
        alpha.iter().zip(&self.c_lambda).map(|(a, c)| a * c).sum()
    }

    pub fn c_q_norm(&self) -> f64 {
        self.c_q.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Full pipeline: envelope function, degree formulas, reference triangle,
/// matrix assembly and the singular value solve.
pub fn implicitize(
    f: &RationalFamily,
    d: usize,
    overrides: &Overrides,
) -> Result<ImplicitApproximation> {
    let h = f.envelope_function();
    let spec = ImplicitBasisSpec::derive(f, &h, d, overrides)?;
    let dm = build_d(f, &h, &spec)?;
    let sol = solve_min(&dm)?;
    let (m, rows, cols) = (spec.m, dm.rows(), dm.cols());
    let c = sol.c.as_slice();
    Ok(ImplicitApproximation {
        c_q: c[..m].to_vec(),
        c_lambda: c[m..].to_vec(),
        sigma_min: sol.sigma_min,
        sigma_gap: sol.sigma_gap,
        spec,
        domain: f.domain(),
        family_fingerprint: f.fingerprint(),
        matrix_rows: rows,
        matrix_cols: cols,
    })
}
