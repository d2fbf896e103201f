//! Tensor-product Chebyshev grids and the fast bivariate coefficient
//! transform.
//!
//! Samples of a function on the tensor Chebyshev grid are turned into
//! interpolation coefficients by extending the sample matrix to its even
//! counterpart, running a bivariate FFT and extracting the leading block:
//!
//! ```text
//! samples -> even extension (2L1 x 2L2) -> FFT -> extract (L1+1 x L2+1)
//!         -> normalize
//! ```
//!
//! Coefficient `(i, j)` multiplies `T_i(u(s)) * T_j(u(t))` where `u` maps
//! each interval onto `[-1, 1]` increasingly. The normalization constants
//! (global `1/(L1*L2)` scale, halved border rows/columns, and a `(-1)^(i+j)`
//! sign from the node ordering) are pinned by the interpolation property and
//! checked against a dense linear-solve oracle in the test suite.

use nalgebra::DMatrix;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::geom::Interval;

/// Chebyshev points of degree `l` mapped affinely into `interval`:
/// the images of `(1 - cos(j*pi/l)) / 2`, `j = 0..=l`, which increase from
/// the left endpoint to the right one. For `l == 0` the single node is the
/// interval midpoint.
pub fn cheb_points(l: usize, interval: Interval) -> Vec<f64> {
    if l == 0 {
        return vec![interval.midpoint()];
    }
    (0..=l)
        .map(|j| {
            let frac = 0.5 * (1.0 - (j as f64 * std::f64::consts::PI / l as f64).cos());
            interval.lo + interval.length() * frac
        })
        .collect()
}

/// The tensor-product Chebyshev grid of bidegree `(l1, l2)` over a
/// parameter rectangle.
#[derive(Debug, Clone)]
pub struct ChebGrid {
    pub l1: usize,
    pub l2: usize,
    pub interval_s: Interval,
    pub interval_t: Interval,
    pub nodes_s: Vec<f64>,
    pub nodes_t: Vec<f64>,
}

impl ChebGrid {
    pub fn new(l1: usize, l2: usize, interval_s: Interval, interval_t: Interval) -> Self {
        ChebGrid {
            l1,
            l2,
            interval_s,
            interval_t,
            nodes_s: cheb_points(l1, interval_s),
            nodes_t: cheb_points(l2, interval_t),
        }
    }

    /// Fills the `(l1+1) x (l2+1)` sample matrix. Sampling is read-only and
    /// runs in parallel over grid points; entries land at fixed indices, so
    /// the result is bit-identical for any schedule.
    pub fn sample<F>(&self, f: F) -> DMatrix<f64>
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let n_s = self.nodes_s.len();
        let n_t = self.nodes_t.len();
        let values: Vec<f64> = (0..n_s * n_t)
            .into_par_iter()
            .map(|k| f(self.nodes_s[k / n_t], self.nodes_t[k % n_t]))
            .collect();
        DMatrix::from_row_slice(n_s, n_t, &values)
    }

    /// Serial reference version of [`ChebGrid::sample`].
    pub fn sample_serial<F>(&self, f: F) -> DMatrix<f64>
    where
        F: Fn(f64, f64) -> f64,
    {
        DMatrix::from_fn(self.nodes_s.len(), self.nodes_t.len(), |i, j| {
            f(self.nodes_s[i], self.nodes_t[j])
        })
    }
}

/// Tensor Chebyshev coefficients of a function over a rectangle. Entry
/// `(i, j)` multiplies `T_i(u(s)) * T_j(u(t))`.
#[derive(Debug, Clone)]
pub struct ChebCoeffs {
    pub coeffs: DMatrix<f64>,
    pub interval_s: Interval,
    pub interval_t: Interval,
}

impl ChebCoeffs {
    pub fn l1(&self) -> usize {
        self.coeffs.nrows() - 1
    }

    pub fn l2(&self) -> usize {
        self.coeffs.ncols() - 1
    }

    /// Evaluates the expansion by a Clenshaw recurrence per variable.
    /// Extrapolation outside the rectangle is permitted but unvalidated.
    pub fn eval(&self, s: f64, t: f64) -> f64 {
        let u_s = self.interval_s.to_unit(s);
        let u_t = self.interval_t.to_unit(t);
        let per_row: Vec<f64> = (0..self.coeffs.nrows())
            .map(|i| {
                let row: Vec<f64> = self.coeffs.row(i).iter().copied().collect();
                clenshaw(&row, u_t)
            })
            .collect();
        clenshaw(&per_row, u_s)
    }

    /// Coefficients flattened in row-major order, row index `i` (the
    /// `s`-direction Chebyshev index) outermost.
    pub fn flatten_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for i in 0..self.coeffs.nrows() {
            for j in 0..self.coeffs.ncols() {
                out.push(self.coeffs[(i, j)]);
            }
        }
        out
    }
}

/// Clenshaw evaluation of `sum_k c_k T_k(u)`.
fn clenshaw(c: &[f64], u: f64) -> f64 {
    if c.is_empty() {
        return 0.0;
    }
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let b = ck + 2.0 * u * b1 - b2;
        b2 = b1;
        b1 = b;
    }
    c[0] + u * b1 - b2
}

/// Even extension of the sample matrix to shape `2*l1 x 2*l2`.
fn even_extension(f: &DMatrix<f64>) -> DMatrix<f64> {
    let l1 = f.nrows() - 1;
    let l2 = f.ncols() - 1;
    let mut ext = DMatrix::zeros(2 * l1, 2 * l2);
    for i in 0..=l1 {
        for j in 0..=l2 {
            ext[(i, j)] = f[(i, j)];
        }
    }
    for i in 1..l1 {
        for j in 0..=l2 {
            ext[(l1 + i, j)] = f[(l1 - i, j)];
        }
    }
    for i in 0..=l1 {
        for j in 1..l2 {
            ext[(i, l2 + j)] = f[(i, l2 - j)];
        }
    }
    for i in 1..l1 {
        for j in 1..l2 {
            ext[(l1 + i, l2 + j)] = f[(l1 - i, l2 - j)];
        }
    }
    ext
}

/// In-place bivariate FFT: rows first, then columns.
fn bivariate_fft(data: &mut [Complex<f64>], rows: usize, cols: usize) {
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_forward(cols);
    for r in 0..rows {
        row_fft.process(&mut data[r * cols..(r + 1) * cols]);
    }
    let col_fft = planner.plan_fft_forward(rows);
    let mut scratch = vec![Complex::new(0.0, 0.0); rows];
    for c in 0..cols {
        for r in 0..rows {
            scratch[r] = data[r * cols + c];
        }
        col_fft.process(&mut scratch);
        for r in 0..rows {
            data[r * cols + c] = scratch[r];
        }
    }
}

/// FFT of the even extension; exposed separately so the symmetry of the
/// extension (a real transform) can be verified directly.
fn extension_fft(samples: &DMatrix<f64>) -> (Vec<Complex<f64>>, usize, usize) {
    let ext = even_extension(samples);
    let (rows, cols) = (ext.nrows(), ext.ncols());
    let mut data: Vec<Complex<f64>> = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            data.push(Complex::new(ext[(i, j)], 0.0));
        }
    }
    bivariate_fft(&mut data, rows, cols);
    (data, rows, cols)
}

/// Univariate transform used when one of the grid degrees is zero and the
/// bivariate extension degenerates.
fn dct_line(values: &[f64]) -> Vec<f64> {
    let l = values.len() - 1;
    if l == 0 {
        return values.to_vec();
    }
    let mut data: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    data.extend((1..l).rev().map(|i| Complex::new(values[i], 0.0)));
    FftPlanner::new().plan_fft_forward(2 * l).process(&mut data);
    (0..=l)
        .map(|i| {
            let mut g = data[i].re / l as f64;
            if i == 0 || i == l {
                g *= 0.5;
            }
            if i % 2 == 1 {
                g = -g;
            }
            g
        })
        .collect()
}

/// Transforms samples on `grid` into the tensor Chebyshev coefficients of
/// the interpolant, so that evaluating the result reproduces every sample.
pub fn cheb_transform_2d(grid: &ChebGrid, samples: &DMatrix<f64>) -> Result<ChebCoeffs> {
    let (want_rows, want_cols) = (grid.l1 + 1, grid.l2 + 1);
    if samples.nrows() != want_rows || samples.ncols() != want_cols {
        return Err(Error::DimensionMismatch {
            got_rows: samples.nrows(),
            got_cols: samples.ncols(),
            want_rows,
            want_cols,
        });
    }

    let coeffs = if grid.l1 == 0 && grid.l2 == 0 {
        DMatrix::from_element(1, 1, samples[(0, 0)])
    } else if grid.l1 == 0 {
        let row: Vec<f64> = samples.row(0).iter().copied().collect();
        DMatrix::from_row_slice(1, want_cols, &dct_line(&row))
    } else if grid.l2 == 0 {
        let col: Vec<f64> = samples.column(0).iter().copied().collect();
        DMatrix::from_column_slice(want_rows, 1, &dct_line(&col))
    } else {
        let (data, _rows, cols) = extension_fft(samples);
        let scale = 1.0 / (grid.l1 * grid.l2) as f64;
        DMatrix::from_fn(want_rows, want_cols, |i, j| {
            let mut g = data[i * cols + j].re * scale;
            if i == 0 || i == grid.l1 {
                g *= 0.5;
            }
            if j == 0 || j == grid.l2 {
                g *= 0.5;
            }
            if (i + j) % 2 == 1 {
                g = -g;
            }
            g
        })
    };

    Ok(ChebCoeffs {
        coeffs,
        interval_s: grid.interval_s,
        interval_t: grid.interval_t,
    })
}
