//! Rational families of planar curves and their envelope function.
//!
//! A family maps a parameter rectangle into the plane via
//! `(x(s,t)/w(s,t), y(s,t)/w(s,t))`. The envelope function `h` is the 3x3
//! determinant built from `x`, `y`, `w` and their partials; its zero set in
//! the parameter domain maps onto the envelope, and the Jacobian determinant
//! of the map satisfies `det J = h / w^3`.

use crate::bipoly::{BiPoly, Var, DEFAULT_TRIM_TOL};
use crate::error::{Error, Result};
use crate::geom::{Point2, Rect};

/// Relative threshold below which the denominator counts as vanishing.
pub const DENOMINATOR_TOL: f64 = 1e-14;

/// A rational family `p(s, t) = (x/w, y/w)` over a parameter rectangle.
/// The three polynomials are stored zero-padded to a common bidegree.
#[derive(Debug, Clone)]
pub struct RationalFamily {
    x: BiPoly,
    y: BiPoly,
    w: BiPoly,
    domain: Rect,
    bidegree: (usize, usize),
}

impl RationalFamily {
    /// Validates the domain and checks `w != 0` by sampling a dense 64x64
    /// grid. (The Chebyshev grids actually used later are checked again at
    /// matrix-assembly time.)
    pub fn new(x: BiPoly, y: BiPoly, w: BiPoly, domain: Rect) -> Result<Self> {
        let domain_ok = domain.s.length() > 0.0 && domain.t.length() > 0.0;
        if !domain_ok {
            return Err(Error::InvalidFamily(
                "domain intervals must have positive length".into(),
            ));
        }
        let n1 = x.deg_s().max(y.deg_s()).max(w.deg_s());
        let n2 = x.deg_t().max(y.deg_t()).max(w.deg_t());
        let pad = |p: &BiPoly| p.add(&BiPoly::monomial(n1, n2, 0.0));
        let family = RationalFamily {
            x: pad(&x),
            y: pad(&y),
            w: pad(&w),
            domain,
            bidegree: (n1, n2),
        };

        let w_cut = DENOMINATOR_TOL * family.w.max_abs_coeff();
        for s in domain.s.linspace(64) {
            for t in domain.t.linspace(64) {
                let value = family.w.eval(s, t);
                if value.abs() < w_cut {
                    return Err(Error::DenominatorNearZero {
                        s,
                        t,
                        value: value.abs(),
                    });
                }
            }
        }
        Ok(family)
    }

    pub fn x(&self) -> &BiPoly {
        &self.x
    }

    pub fn y(&self) -> &BiPoly {
        &self.y
    }

    pub fn w(&self) -> &BiPoly {
        &self.w
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    /// Common bidegree `(n1, n2)` of `x`, `y`, `w`.
    pub fn bidegree(&self) -> (usize, usize) {
        self.bidegree
    }

    /// The same family restricted to a sub-rectangle of parameters.
    pub fn restricted(&self, domain: Rect) -> Result<Self> {
        RationalFamily::new(self.x.clone(), self.y.clone(), self.w.clone(), domain)
    }

    /// Evaluates the planar point `p(s, t)`.
    pub fn eval(&self, s: f64, t: f64) -> Result<Point2> {
        let w = self.w.eval(s, t);
        if w.abs() < DENOMINATOR_TOL * self.w.max_abs_coeff() {
            return Err(Error::DenominatorNearZero {
                s,
                t,
                value: w.abs(),
            });
        }
        Ok(Point2::new(self.x.eval(s, t) / w, self.y.eval(s, t) / w))
    }

    /// The envelope function: the determinant
    ///
    /// ```text
    ///     | x   x_s   x_t |
    /// h = | y   y_s   y_t |
    ///     | w   w_s   w_t |
    /// ```
    ///
    /// expanded exactly in the power basis and degree-trimmed. The trimmed
    /// degrees feed the degree formulas of the implicitization step, which is
    /// why `h` is expanded symbolically rather than sampled.
    pub fn envelope_function(&self) -> BiPoly {
        self.envelope_function_with_tol(DEFAULT_TRIM_TOL)
    }

    pub fn envelope_function_with_tol(&self, trim_tol: f64) -> BiPoly {
        let (x, y, w) = (&self.x, &self.y, &self.w);
        let (xs, xt) = (x.diff(Var::S), x.diff(Var::T));
        let (ys, yt) = (y.diff(Var::S), y.diff(Var::T));
        let (ws, wt) = (w.diff(Var::S), w.diff(Var::T));

        let h = &(x * &(&(&ys * &wt) - &(&yt * &ws)))
            - &(&(&xs * &(&(y * &wt) - &(&yt * w))) - &(&xt * &(&(y * &ws) - &(&ys * w))));
        h.degree_trim(trim_tol)
    }

    /// Jacobian determinant of the map `p` at `(s, t)`, computed by central
    /// finite differences of the rational map itself. This is deliberately
    /// independent of [`RationalFamily::envelope_function`] so the identity
    /// `det J = h / w^3` serves as a genuine cross-check.
    pub fn jacobian_det(&self, s: f64, t: f64) -> Result<f64> {
        const STEP: f64 = 1e-6;
        let ps = (self.eval(s + STEP, t)?, self.eval(s - STEP, t)?);
        let pt = (self.eval(s, t + STEP)?, self.eval(s, t - STEP)?);
        let x_s = (ps.0.x - ps.1.x) / (2.0 * STEP);
        let y_s = (ps.0.y - ps.1.y) / (2.0 * STEP);
        let x_t = (pt.0.x - pt.1.x) / (2.0 * STEP);
        let y_t = (pt.0.y - pt.1.y) / (2.0 * STEP);
        Ok(x_s * y_t - x_t * y_s)
    }

    /// Content hash of the family definition (coefficients, bidegree and
    /// domain), stable across runs. FNV-1a over the canonical byte encoding.
    pub fn fingerprint(&self) -> u64 {
        let mut hash: u64 = 0xcbf29ce484222325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                hash ^= b as u64;
                hash = hash.wrapping_mul(0x100000001b3);
            }
        };
        eat(&(self.bidegree.0 as u64).to_le_bytes());
        eat(&(self.bidegree.1 as u64).to_le_bytes());
        for p in [&self.x, &self.y, &self.w] {
            for row in p.coeff_rows() {
                for c in row {
                    eat(&c.to_bits().to_le_bytes());
                }
            }
        }
        for v in [
            self.domain.s.lo,
            self.domain.s.hi,
            self.domain.t.lo,
            self.domain.t.hi,
        ] {
            eat(&v.to_bits().to_le_bytes());
        }
        hash
    }
}

/// The tangent-line family of the parabola `(s, s^2)`:
/// `x = s + t`, `y = s^2 + 2ts`, `w = 1`. Its envelope function is `-2t` and
/// its envelope is the parabola itself.
pub fn parabola_tangent_family(domain: Rect) -> RationalFamily {
    let x = BiPoly::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    let y = BiPoly::from_rows(vec![vec![0.0, 0.0], vec![0.0, 2.0], vec![1.0, 0.0]]);
    RationalFamily::new(x, y, BiPoly::constant(1.0), domain).expect("valid family")
}

/// The tangent-line family of the cuspidal cubic `(s^2, s^3)`:
/// `x = s^2 + 2ts`, `y = s^3 + 3ts^2`, `w = 1`.
pub fn cusp_tangent_family(domain: Rect) -> RationalFamily {
    let x = BiPoly::from_rows(vec![vec![0.0, 0.0], vec![0.0, 2.0], vec![1.0, 0.0]]);
    let y = BiPoly::from_rows(vec![
        vec![0.0, 0.0],
        vec![0.0, 0.0],
        vec![0.0, 3.0],
        vec![1.0, 0.0],
    ]);
    RationalFamily::new(x, y, BiPoly::constant(1.0), domain).expect("valid family")
}

/// The tangent-line family of the monomial curve `(s, s^k)` for `k >= 2`:
/// `x = s + t`, `y = s^k + k t s^(k-1)`, `w = 1`. The envelope `y = x^k` has
/// implicit degree `k`.
pub fn monomial_tangent_family(k: usize, domain: Rect) -> RationalFamily {
    assert!(k >= 2);
    let x = BiPoly::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    let mut y = BiPoly::monomial(k, 0, 1.0);
    y = y.add(&BiPoly::monomial(k - 1, 1, k as f64));
    RationalFamily::new(x, y, BiPoly::constant(1.0), domain).expect("valid family")
}
