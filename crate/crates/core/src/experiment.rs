//! Convergence experiments: envelope zero-set tracing, maximum algebraic
//! error, subdivision studies and a pipeline benchmark.

use std::time::Instant;

use rayon::prelude::*;

use crate::bipoly::BiPoly;
use crate::envelope::RationalFamily;
use crate::error::{Error, Result};
use crate::geom::{Interval, Rect};
use crate::implicitize::{
    build_d, solve_min, ImplicitApproximation, ImplicitBasisSpec, Overrides,
};

/// Errors below this are reported as "n/a": they are dominated by roundoff.
pub const EPSILON_FLOOR: f64 = 1e-15;

/// Parameter points where the envelope function (numerically) vanishes.
#[derive(Debug, Clone)]
pub struct ZeroSetSample {
    pub points: Vec<(f64, f64)>,
    pub region: Rect,
    /// Absolute threshold on |h| used during the search.
    pub ztol: f64,
}

/// Locates the zero set of the envelope function of `f` inside `region` by
/// scanning `resolution` grid lines in each direction, bisecting sign
/// changes, merging both sweeps and deduplicating nearby points.
pub fn trace_zero_set(
    f: &RationalFamily,
    region: Rect,
    resolution: usize,
) -> Result<ZeroSetSample> {
    trace_polynomial_zeros(&f.envelope_function(), region, resolution)
}

/// Same as [`trace_zero_set`] but for an already-computed envelope function.
pub fn trace_polynomial_zeros(
    h: &BiPoly,
    region: Rect,
    resolution: usize,
) -> Result<ZeroSetSample> {
    if resolution < 8 {
        return Err(Error::InvalidParameter("resolution must be >= 8".into()));
    }
    let ztol = 1e-12 * h.max_abs_coeff();

    let s_lines = region.s.linspace(resolution);
    let t_lines = region.t.linspace(resolution);

    // horizontal sweep: fixed t, roots in s
    let mut points: Vec<(f64, f64)> = t_lines
        .par_iter()
        .map(|&t| {
            scan_line(|s| h.eval(s, t), &region.s, resolution, ztol)
                .into_iter()
                .map(|s| (s, t))
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();
    // vertical sweep: fixed s, roots in t
    let vertical: Vec<(f64, f64)> = s_lines
        .par_iter()
        .map(|&s| {
            scan_line(|t| h.eval(s, t), &region.t, resolution, ztol)
                .into_iter()
                .map(|t| (s, t))
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();
    points.extend(vertical);

    let radius = region.diameter() / (4.0 * resolution as f64);
    let points = dedup_points(points, radius);
    if points.is_empty() {
        return Err(Error::EmptyZeroSet);
    }
    Ok(ZeroSetSample {
        points,
        region,
        ztol,
    })
}

/// Roots of `g` along one grid line: grid samples already below `ztol`, plus
/// bisected sign changes. Bisection runs until `|g| <= ztol` or 80 steps;
/// points that fail to refine below `ztol` are dropped.
fn scan_line(g: impl Fn(f64) -> f64, interval: &Interval, resolution: usize, ztol: f64) -> Vec<f64> {
    let xs = interval.linspace(resolution);
    let vs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut roots = Vec::new();
    for k in 0..xs.len() {
        if vs[k].abs() <= ztol {
            roots.push(xs[k]);
        } else if k > 0 && vs[k - 1].abs() > ztol && (vs[k - 1] < 0.0) != (vs[k] < 0.0) {
            let (mut a, mut b) = (xs[k - 1], xs[k]);
            let mut ga = vs[k - 1];
            let mut found = None;
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                let gm = g(mid);
                if gm.abs() <= ztol {
                    found = Some(mid);
                    break;
                }
                if (ga < 0.0) != (gm < 0.0) {
                    b = mid;
                } else {
                    a = mid;
                    ga = gm;
                }
            }
            if let Some(root) = found {
                roots.push(root);
            }
        }
    }
    roots
}

/// Keeps the first point of every cluster of radius `radius`, in input
/// order. Bucketed by a grid of cell size `radius` so the scan stays linear.
fn dedup_points(points: Vec<(f64, f64)>, radius: f64) -> Vec<(f64, f64)> {
    use std::collections::HashMap;
    if radius <= 0.0 {
        return points;
    }
    let mut kept: Vec<(f64, f64)> = Vec::new();
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let cell = |x: f64| (x / radius).floor() as i64;
    for (s, t) in points {
        let (cs, ct) = (cell(s), cell(t));
        let mut close = false;
        'search: for ds in -1..=1 {
            for dt in -1..=1 {
                if let Some(ids) = buckets.get(&(cs + ds, ct + dt)) {
                    for &id in ids {
                        let (ks, kt) = kept[id];
                        if (ks - s).hypot(kt - t) < radius {
                            close = true;
                            break 'search;
                        }
                    }
                }
            }
        }
        if !close {
            buckets.entry((cs, ct)).or_default().push(kept.len());
            kept.push((s, t));
        }
    }
    kept
}

/// Maximum of `|q(p(s, t))|` over the zero-set sample, with the coefficients
/// of `q` rescaled to unit 2-norm so errors are comparable across runs.
pub fn max_algebraic_error(
    a: &ImplicitApproximation,
    f: &RationalFamily,
    zs: &ZeroSetSample,
) -> Result<f64> {
    if zs.points.is_empty() {
        return Err(Error::EmptyZeroSet);
    }
    let norm = a.c_q_norm();
    if norm == 0.0 {
        return Ok(f64::INFINITY);
    }
    let mut max = 0.0f64;
    for &(s, t) in &zs.points {
        let q = a.eval_q(f.eval(s, t)?)?.abs() / norm;
        max = max.max(q);
    }
    Ok(max)
}

/// Nested square regions of diameter `2^-i` (side `2^-i / sqrt(2)`) centered
/// at `center`, clipped to `base`, for `i = 0..=i_max`.
pub fn subdivision_regions(center: (f64, f64), i_max: usize, base: &Rect) -> Vec<Rect> {
    (0..=i_max)
        .map(|i| {
            let half_side = 2f64.powi(-(i as i32)) / (2.0 * std::f64::consts::SQRT_2);
            let square = Rect::new(
                Interval::new(center.0 - half_side, center.0 + half_side),
                Interval::new(center.1 - half_side, center.1 + half_side),
            );
            square
                .intersect(base)
                .expect("subdivision center must lie inside the base region")
        })
        .collect()
}

/// One `(d, i)` cell of a convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub degree: usize,
    pub level: usize,
    pub region: Rect,
    /// Nominal subdivision diameter `2^-level`.
    pub diameter: f64,
    /// Maximum algebraic error, `None` when below [`EPSILON_FLOOR`].
    pub epsilon: Option<f64>,
    /// `log2(eps_{d,i-1} / eps_{d,i})`, stored on the finer row; absent for
    /// level 0 and when either error is "n/a".
    pub rate: Option<f64>,
    pub matrix_rows: usize,
    pub matrix_cols: usize,
    pub assembly_ms: f64,
    pub svd_ms: f64,
}

/// Study results over the `(d, i)` grid, ordered by `(d, i)`.
#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub center: (f64, f64),
}

impl ConvergenceTable {
    pub fn row(&self, degree: usize, level: usize) -> Option<&ConvergenceRow> {
        self.rows
            .iter()
            .find(|r| r.degree == degree && r.level == level)
    }

    /// CSV with one row per `(d, i)` cell. Numbers use the shortest
    /// round-trip representation; missing errors and rates read "n/a".
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,i,diameter,epsilon,rate,rows,cols,assembly_ms,svd_ms\n");
        for r in &self.rows {
            let eps = r
                .epsilon
                .map(|e| format!("{e}"))
                .unwrap_or_else(|| "n/a".into());
            let rate = r
                .rate
                .map(|v| format!("{v}"))
                .unwrap_or_else(|| "n/a".into());
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.degree,
                r.level,
                r.diameter,
                eps,
                rate,
                r.matrix_rows,
                r.matrix_cols,
                r.assembly_ms,
                r.svd_ms
            ));
        }
        out
    }

    /// Plain-text table: one row per level, an error/rate column pair per
    /// degree.
    pub fn formatted(&self) -> String {
        let degrees: Vec<usize> = {
            let mut ds: Vec<usize> = self.rows.iter().map(|r| r.degree).collect();
            ds.dedup();
            ds
        };
        let levels = self.rows.iter().map(|r| r.level).max().unwrap_or(0);
        let mut out = String::from("diameter");
        for d in &degrees {
            out.push_str(&format!("  {:>10} {:>8}", format!("eps(d={d})"), "rate"));
        }
        out.push('\n');
        for i in 0..=levels {
            out.push_str(&format!("2^-{i:<5}"));
            for &d in &degrees {
                match self.row(d, i) {
                    Some(r) => {
                        let eps = r
                            .epsilon
                            .map(|e| format!("{e:10.3e}"))
                            .unwrap_or_else(|| format!("{:>10}", "n/a"));
                        let rate = r
                            .rate
                            .map(|v| format!("{v:8.3}"))
                            .unwrap_or_else(|| format!("{:>8}", "n/a"));
                        out.push_str(&format!("  {eps} {rate}"));
                    }
                    None => out.push_str(&format!("  {:>10} {:>8}", "-", "-")),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Resolution of the per-region zero-set trace inside a study.
const STUDY_TRACE_RESOLUTION: usize = 256;

/// Runs the subdivision study: for every degree `1..=d_max` and level
/// `0..=i_max`, implicitize over the nested region, trace the envelope zero
/// set inside it and record the maximum algebraic error and the level-to-
/// level convergence rate. Without an explicit center, the traced zero-set
/// point nearest the domain midpoint is used (ties: smaller `s`, then `t`).
pub fn convergence_study(
    f: &RationalFamily,
    d_max: usize,
    i_max: usize,
    center: Option<(f64, f64)>,
) -> Result<ConvergenceTable> {
    if d_max < 1 {
        return Err(Error::InvalidParameter("d_max must be >= 1".into()));
    }
    let base = f.domain();
    let h = f.envelope_function();

    let center = match center {
        Some((s0, t0)) => {
            let h_abs = h.eval(s0, t0).abs();
            if h_abs > 1e-8 * h.max_abs_coeff() {
                return Err(Error::CenterOffZeroSet { h_abs });
            }
            (s0, t0)
        }
        None => {
            let zs = trace_polynomial_zeros(&h, base, STUDY_TRACE_RESOLUTION)?;
            let (c_s, c_t) = base.center();
            *zs.points
                .iter()
                .min_by(|a, b| {
                    let da = (a.0 - c_s).hypot(a.1 - c_t);
                    let db = (b.0 - c_s).hypot(b.1 - c_t);
                    da.total_cmp(&db)
                        .then(a.0.total_cmp(&b.0))
                        .then(a.1.total_cmp(&b.1))
                })
                .expect("nonempty zero set")
        }
    };

    let regions = subdivision_regions(center, i_max, &base);
    // One reference triangle for all levels: error magnitudes at unit
    // coefficient norm are only comparable across levels in a fixed basis.
    let overrides = Overrides {
        triangle: Some(crate::implicitize::reference_triangle(f)?),
        ..Overrides::default()
    };
    let mut rows = Vec::with_capacity(d_max * (i_max + 1));
    for d in 1..=d_max {
        let mut prev_eps: Option<f64> = None;
        for (i, &region) in regions.iter().enumerate() {
            let fam = f.restricted(region)?;
            let spec = ImplicitBasisSpec::derive(&fam, &h, d, &overrides)?;

            let t0 = Instant::now();
            let dm = build_d(&fam, &h, &spec)?;
            let assembly_ms = t0.elapsed().as_secs_f64() * 1e3;
            let (matrix_rows, matrix_cols) = (dm.rows(), dm.cols());

            let t1 = Instant::now();
            let sol = solve_min(&dm)?;
            let svd_ms = t1.elapsed().as_secs_f64() * 1e3;

            let approx = ImplicitApproximation {
                c_q: sol.c.as_slice()[..spec.m].to_vec(),
                c_lambda: sol.c.as_slice()[spec.m..].to_vec(),
                sigma_min: sol.sigma_min,
                sigma_gap: sol.sigma_gap,
                spec,
                domain: region,
                family_fingerprint: fam.fingerprint(),
                matrix_rows,
                matrix_cols,
            };

            let zs = trace_polynomial_zeros(&h, region, STUDY_TRACE_RESOLUTION)?;
            let eps_raw = max_algebraic_error(&approx, &fam, &zs)?;
            let epsilon = (eps_raw >= EPSILON_FLOOR).then_some(eps_raw);
            let rate = match (i, prev_eps, epsilon) {
                (0, _, _) => None,
                (_, Some(prev), Some(cur)) => Some((prev / cur).log2()),
                _ => None,
            };
            prev_eps = epsilon;

            rows.push(ConvergenceRow {
                degree: d,
                level: i,
                region,
                diameter: 2f64.powi(-(i as i32)),
                epsilon,
                rate,
                matrix_rows,
                matrix_cols,
                assembly_ms,
                svd_ms,
            });
        }
    }
    Ok(ConvergenceTable { rows, center })
}

/// One degree's timings in a pipeline benchmark.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub degree: usize,
    pub rows: usize,
    pub cols: usize,
    pub entries: usize,
    pub assembly_ms: f64,
    pub svd_ms: f64,
    pub total_ms: f64,
}

/// CSV for a list of benchmark rows.
pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("d,rows,cols,entries,assembly_ms,svd_ms,total_ms\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.degree, r.rows, r.cols, r.entries, r.assembly_ms, r.svd_ms, r.total_ms
        ));
    }
    out
}

/// Times matrix assembly and the SVD for each degree, after one discarded
/// warmup run. Runs are serialized so the timings stay meaningful.
pub fn benchmark(f: &RationalFamily, degrees: &[usize]) -> Result<Vec<BenchRow>> {
    let h = f.envelope_function();
    if let Some(&d0) = degrees.first() {
        // discard run
        let spec = ImplicitBasisSpec::derive(f, &h, d0, &Overrides::default())?;
        let dm = build_d(f, &h, &spec)?;
        let _ = solve_min(&dm)?;
    }
    let mut out = Vec::with_capacity(degrees.len());
    for &d in degrees {
        let spec = ImplicitBasisSpec::derive(f, &h, d, &Overrides::default())?;
        let t0 = Instant::now();
        let dm = build_d(f, &h, &spec)?;
        let assembly_ms = t0.elapsed().as_secs_f64() * 1e3;
        let t1 = Instant::now();
        let _ = solve_min(&dm)?;
        let svd_ms = t1.elapsed().as_secs_f64() * 1e3;
        out.push(BenchRow {
            degree: d,
            rows: dm.rows(),
            cols: dm.cols(),
            entries: dm.rows() * dm.cols(),
            assembly_ms,
            svd_ms,
            total_ms: assembly_ms + svd_ms,
        });
    }
    Ok(out)
}
