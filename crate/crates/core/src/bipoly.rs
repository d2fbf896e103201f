//! Dense bivariate polynomials in the tensor power basis.
//!
//! Coefficients are stored row-major: entry `(i, j)` multiplies `s^i t^j`,
//! so row index follows the `s`-degree and column index the `t`-degree.
//! These polynomials carry exact double-precision coefficients and are the
//! substrate for building the envelope function and its degree bookkeeping.

use std::ops::{Add, Mul, Sub};

/// Which variable an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    S,
    T,
}

/// Default relative tolerance used when trimming trailing zero degrees.
pub const DEFAULT_TRIM_TOL: f64 = 1e-12;

/// A bivariate polynomial of bidegree `(m, n)` with an `(m+1) x (n+1)`
/// coefficient matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BiPoly {
    coeffs: Vec<f64>,
    rows: usize, // m + 1
    cols: usize, // n + 1
}

impl BiPoly {
    /// Builds a polynomial from a row-major coefficient matrix. Rows index
    /// the `s`-degree, columns the `t`-degree. All rows must have the same
    /// length and the matrix must be nonempty.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        assert!(!rows.is_empty(), "coefficient matrix must be nonempty");
        let cols = rows[0].len();
        assert!(cols > 0, "coefficient matrix must be nonempty");
        assert!(
            rows.iter().all(|r| r.len() == cols),
            "coefficient rows must have equal length"
        );
        let n_rows = rows.len();
        BiPoly {
            coeffs: rows.into_iter().flatten().collect(),
            rows: n_rows,
            cols,
        }
    }

    /// The zero polynomial, bidegree (0, 0).
    pub fn zero() -> Self {
        BiPoly {
            coeffs: vec![0.0],
            rows: 1,
            cols: 1,
        }
    }

    pub fn constant(c: f64) -> Self {
        BiPoly {
            coeffs: vec![c],
            rows: 1,
            cols: 1,
        }
    }

    /// The monomial `c * s^i t^j`.
    pub fn monomial(i: usize, j: usize, c: f64) -> Self {
        let mut p = BiPoly {
            coeffs: vec![0.0; (i + 1) * (j + 1)],
            rows: i + 1,
            cols: j + 1,
        };
        *p.at_mut(i, j) = c;
        p
    }

    /// Degree in `s` (number of coefficient rows minus one).
    pub fn deg_s(&self) -> usize {
        self.rows - 1
    }

    /// Degree in `t`.
    pub fn deg_t(&self) -> usize {
        self.cols - 1
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.deg_s(), self.deg_t())
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i < self.rows && j < self.cols {
            self.coeffs[i * self.cols + j]
        } else {
            0.0
        }
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.coeffs[i * self.cols + j]
    }

    pub fn coeff_rows(&self) -> Vec<Vec<f64>> {
        self.coeffs.chunks(self.cols).map(|r| r.to_vec()).collect()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Evaluates by a nested Horner recurrence, inner loop in `t`, outer in
    /// `s`.
    pub fn eval(&self, s: f64, t: f64) -> f64 {
        let mut acc = 0.0;
        for row in self.coeffs.chunks(self.cols).rev() {
            let row_val = row.iter().rev().fold(0.0, |a, &c| a * t + c);
            acc = acc * s + row_val;
        }
        acc
    }

    /// Coefficient-wise sum; the result has the componentwise maximum
    /// bidegree of the operands.
    pub fn add(&self, other: &BiPoly) -> BiPoly {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &BiPoly, f: impl Fn(f64, f64) -> f64) -> BiPoly {
        let rows = self.rows.max(other.rows);
        let cols = self.cols.max(other.cols);
        let mut out = BiPoly {
            coeffs: vec![0.0; rows * cols],
            rows,
            cols,
        };
        for i in 0..rows {
            for j in 0..cols {
                *out.at_mut(i, j) = f(self.coeff(i, j), other.coeff(i, j));
            }
        }
        out
    }

    pub fn scale(&self, k: f64) -> BiPoly {
        BiPoly {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    /// Product via discrete 2-D convolution of the coefficient matrices.
    /// The result bidegree is the sum of the operand bidegrees.
    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let rows = self.rows + other.rows - 1;
        let cols = self.cols + other.cols - 1;
        let mut out = BiPoly {
            coeffs: vec![0.0; rows * cols],
            rows,
            cols,
        };
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.coeffs[i1 * self.cols + j1];
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        out.coeffs[(i1 + i2) * cols + (j1 + j2)] +=
                            a * other.coeffs[i2 * other.cols + j2];
                    }
                }
            }
        }
        out
    }

    /// Exact partial derivative. The bidegree drops by one in the
    /// differentiated variable (floored at zero).
    pub fn diff(&self, var: Var) -> BiPoly {
        match var {
            Var::S => {
                if self.rows == 1 {
                    return BiPoly::zero();
                }
                let rows = self.rows - 1;
                let mut out = BiPoly {
                    coeffs: vec![0.0; rows * self.cols],
                    rows,
                    cols: self.cols,
                };
                for i in 1..self.rows {
                    for j in 0..self.cols {
                        *out.at_mut(i - 1, j) = i as f64 * self.coeff(i, j);
                    }
                }
                out
            }
            Var::T => {
                if self.cols == 1 {
                    return BiPoly::zero();
                }
                let cols = self.cols - 1;
                let mut out = BiPoly {
                    coeffs: vec![0.0; self.rows * cols],
                    rows: self.rows,
                    cols,
                };
                for i in 0..self.rows {
                    for j in 1..self.cols {
                        *out.at_mut(i, j - 1) = j as f64 * self.coeff(i, j);
                    }
                }
                out
            }
        }
    }

    /// Removes trailing rows and columns whose entries are all at most
    /// `tol * max|coeffs|` in absolute value. The zero polynomial trims to
    /// bidegree (0, 0) with a single zero entry.
    pub fn degree_trim(&self, tol: f64) -> BiPoly {
        assert!(tol >= 0.0, "trim tolerance must be nonnegative");
        let cutoff = tol * self.max_abs_coeff();
        let significant = |c: f64| c.abs() > cutoff;

        let mut rows = self.rows;
        while rows > 1 && !(0..self.cols).any(|j| significant(self.coeff(rows - 1, j))) {
            rows -= 1;
        }
        let mut cols = self.cols;
        while cols > 1 && !(0..rows).any(|i| significant(self.coeff(i, cols - 1))) {
            cols -= 1;
        }
        if rows == 1 && cols == 1 && !significant(self.coeff(0, 0)) {
            return BiPoly::zero();
        }
        let mut out = BiPoly {
            coeffs: vec![0.0; rows * cols],
            rows,
            cols,
        };
        for i in 0..rows {
            for j in 0..cols {
                *out.at_mut(i, j) = self.coeff(i, j);
            }
        }
        out
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        BiPoly::add(self, rhs)
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        BiPoly::sub(self, rhs)
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        BiPoly::mul(self, rhs)
    }
}
