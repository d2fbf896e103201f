//! Approximate implicitization of envelopes of rational curve families.
//!
//! A rational family `p(s, t) = (x/w, y/w)` over a parameter rectangle
//! sweeps out a region of the plane; its envelope is the curve tangent to
//! every member. This crate finds a low-degree implicit polynomial whose
//! zero set approximates that envelope:
//!
//! 1. [`envelope`] builds the envelope function `h` (a 3x3 determinant in
//!    the family's polynomials) whose parameter-domain zero set maps onto
//!    the envelope.
//! 2. [`chebtransform`] converts samples on tensor Chebyshev grids into
//!    interpolation coefficients via an even extension and a bivariate FFT.
//! 3. [`mod@implicitize`] assembles the coefficient matrix of the residual
//!    `(q o p) w^d - lambda h^2` over the candidate bases and takes the
//!    right singular vector of the smallest singular value.
//! 4. [`experiment`] traces envelope zero sets, measures maximum algebraic
//!    errors and runs subdivision convergence studies.
//!
//! ```
//! use envcheb::envelope::parabola_tangent_family;
//! use envcheb::geom::{Point2, Rect};
//! use envcheb::implicitize::{implicitize, Overrides};
//!
//! // tangent lines of the parabola (s, s^2): the envelope is the parabola
//! let family = parabola_tangent_family(Rect::UNIT);
//! let approx = implicitize(&family, 2, &Overrides::default()).unwrap();
//! assert!(approx.sigma_min < 1e-10);
//! assert!(approx.eval_q(Point2::new(0.5, 0.25)).unwrap().abs() < 1e-9);
//! ```

pub mod bipoly;
pub mod chebtransform;
pub mod envelope;
pub mod error;
pub mod experiment;
pub mod geom;
pub mod implicitize;

pub use bipoly::{BiPoly, Var};
pub use chebtransform::{cheb_points, cheb_transform_2d, ChebCoeffs, ChebGrid};
pub use envelope::RationalFamily;
pub use error::{Error, Result};
pub use experiment::{
    benchmark, convergence_study, max_algebraic_error, subdivision_regions, trace_zero_set,
    BenchRow, ConvergenceTable, ZeroSetSample,
};
pub use geom::{Interval, Point2, Rect, Triangle};
pub use implicitize::{
    implicitize, CollocationMatrix, ImplicitApproximation, ImplicitBasisSpec, Overrides,
};
