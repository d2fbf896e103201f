//! Shared oracles for the integration and acceptance suites. Everything in
//! here is deliberately independent of the implementation paths it checks:
//! the interpolation oracle solves the dense linear system, the quadrature
//! integrates pointwise, and the basis conversion solves a small
//! interpolation problem.

#![allow(dead_code)]

use envcheb::bipoly::BiPoly;
use envcheb::chebtransform::ChebGrid;
use envcheb::envelope::RationalFamily;
use envcheb::geom::{Point2, Rect, Triangle};
use envcheb::implicitize::{triangle_multi_indices, triangular_bernstein_eval};
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::Rng;

/// Chebyshev polynomial of the first kind by the three-term recurrence.
pub fn chebyshev_t(n: usize, u: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, u);
    match n {
        0 => 1.0,
        1 => u,
        _ => {
            for _ in 2..=n {
                (prev, cur) = (cur, 2.0 * u * cur - prev);
            }
            cur
        }
    }
}

/// Interpolation coefficients of the samples by solving the dense
/// `(L1+1)(L2+1)` square linear system in the tensor Chebyshev basis.
pub fn dense_interpolation_coeffs(grid: &ChebGrid, samples: &DMatrix<f64>) -> DMatrix<f64> {
    let n1 = grid.l1 + 1;
    let n2 = grid.l2 + 1;
    let size = n1 * n2;
    let mut a = DMatrix::zeros(size, size);
    let mut rhs = DVector::zeros(size);
    for (i, &s) in grid.nodes_s.iter().enumerate() {
        let u_s = grid.interval_s.to_unit(s);
        for (j, &t) in grid.nodes_t.iter().enumerate() {
            let u_t = grid.interval_t.to_unit(t);
            let row = i * n2 + j;
            rhs[row] = samples[(i, j)];
            for m in 0..n1 {
                let tm = chebyshev_t(m, u_s);
                for n in 0..n2 {
                    a[(row, m * n2 + n)] = tm * chebyshev_t(n, u_t);
                }
            }
        }
    }
    let sol = a.lu().solve(&rhs).expect("interpolation system is regular");
    DMatrix::from_fn(n1, n2, |m, n| sol[m * n2 + n])
}

/// Gauss-Chebyshev-Lobatto quadrature of `f` against the tensor Chebyshev
/// weight over `rect`, using `(n1+1) x (n2+1)` extremal nodes with halved
/// end weights. Exact for integrands of bidegree up to `(2n1-1, 2n2-1)`.
pub fn gcl_quadrature(rect: &Rect, n1: usize, n2: usize, f: impl Fn(f64, f64) -> f64) -> f64 {
    let nodes_s = envcheb::cheb_points(n1, rect.s);
    let nodes_t = envcheb::cheb_points(n2, rect.t);
    let mut sum = 0.0;
    for (i, &s) in nodes_s.iter().enumerate() {
        let ci = if i == 0 || i == n1 { 0.5 } else { 1.0 };
        for (j, &t) in nodes_t.iter().enumerate() {
            let cj = if j == 0 || j == n2 { 0.5 } else { 1.0 };
            sum += ci * cj * f(s, t);
        }
    }
    let pi = std::f64::consts::PI;
    sum * (pi / n1 as f64) * (pi / n2 as f64) * rect.s.length() * rect.t.length() / 4.0
}

/// Coefficients of a bivariate polynomial `q(x, y)` (power basis, `s`-axis
/// read as `x`, `t`-axis as `y`) in the degree-`d` triangular Bernstein
/// basis over `triangle`, by interpolation at the domain points.
pub fn power_to_triangular_bernstein(q: &BiPoly, d: usize, triangle: &Triangle) -> Vec<f64> {
    let indices = triangle_multi_indices(d);
    let m = indices.len();
    let [va, vb, vc] = triangle.vertices;
    let points: Vec<Point2> = indices
        .iter()
        .map(|&(i, j, k)| {
            let (u, v, w) = (i as f64 / d as f64, j as f64 / d as f64, k as f64 / d as f64);
            Point2::new(
                u * va.x + v * vb.x + w * vc.x,
                u * va.y + v * vb.y + w * vc.y,
            )
        })
        .collect();
    let mut a = DMatrix::zeros(m, m);
    let mut rhs = DVector::zeros(m);
    for (r, p) in points.iter().enumerate() {
        let beta = triangular_bernstein_eval(d, triangle, *p).unwrap();
        for (c, b) in beta.iter().enumerate() {
            a[(r, c)] = *b;
        }
        rhs[r] = q.eval(p.x, p.y);
    }
    a.lu()
        .solve(&rhs)
        .expect("Bernstein interpolation system is regular")
        .as_slice()
        .to_vec()
}

/// `p(a*s + b, c*t + e)` expanded in the power basis.
pub fn compose_affine(p: &BiPoly, s_map: (f64, f64), t_map: (f64, f64)) -> BiPoly {
    let (a, b) = s_map;
    let (c, e) = t_map;
    let affine_pow = |slope: f64, offset: f64, n: usize, var_s: bool| -> Vec<BiPoly> {
        // (slope*x + offset)^i for i = 0..=n
        let lin = if var_s {
            BiPoly::from_rows(vec![vec![offset], vec![slope]])
        } else {
            BiPoly::from_rows(vec![vec![offset, slope]])
        };
        let mut pows = vec![BiPoly::constant(1.0)];
        for i in 1..=n {
            pows.push(pows[i - 1].mul(&lin));
        }
        pows
    };
    let s_pows = affine_pow(a, b, p.deg_s(), true);
    let t_pows = affine_pow(c, e, p.deg_t(), false);
    let mut out = BiPoly::zero();
    for (i, s_pow) in s_pows.iter().enumerate() {
        for (j, t_pow) in t_pows.iter().enumerate() {
            let coeff = p.coeff(i, j);
            if coeff != 0.0 {
                out = out.add(&s_pow.mul(t_pow).scale(coeff));
            }
        }
    }
    out
}

/// Random polynomial with coefficients in `[-1, 1]`.
pub fn random_poly(rng: &mut StdRng, m: usize, n: usize) -> BiPoly {
    BiPoly::from_rows(
        (0..=m)
            .map(|_| (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect(),
    )
}

/// Random rational family over the unit square whose denominator stays
/// bounded away from zero.
pub fn random_family(rng: &mut StdRng, n1: usize, n2: usize) -> RationalFamily {
    let x = random_poly(rng, n1, n2);
    let y = random_poly(rng, n1, n2);
    let gamma = 0.5 / ((n1 + 1) * (n2 + 1)) as f64;
    let mut w = BiPoly::constant(1.0);
    for i in 0..=n1 {
        for j in 0..=n2 {
            if (i, j) != (0, 0) {
                w = w.add(&BiPoly::monomial(i, j, rng.random_range(-gamma..gamma)));
            }
        }
    }
    RationalFamily::new(x, y, w, Rect::UNIT).expect("denominator bounded away from zero")
}

pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[sorted.len() / 2]
}
