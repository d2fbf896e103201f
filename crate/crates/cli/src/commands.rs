//! The four subcommands.

use std::path::{Path, PathBuf};

use envcheb::envelope::RationalFamily;
use envcheb::experiment;
use envcheb::geom::Point2;
use envcheb::implicitize::{lambda_degrees, Overrides};

use crate::files::{write_atomic, FamilyFile, ResultFile};
use crate::CliError;

/// `<input>.<suffix>` next to the input file.
fn default_out(input: &Path, suffix: &str) -> PathBuf {
    let stem = input.file_stem().unwrap_or(input.as_os_str());
    input.with_file_name(format!("{}.{suffix}", stem.to_string_lossy()))
}

fn load_family(path: &Path) -> Result<RationalFamily, CliError> {
    FamilyFile::load(path)?.to_family()
}

pub fn implicitize(
    family_path: &Path,
    degree: usize,
    k1: Option<usize>,
    k2: Option<usize>,
    no_row_weighting: bool,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    if degree < 1 {
        return Err(CliError::Input("degree must be >= 1".into()));
    }
    let family = load_family(family_path)?;

    let lambda_bidegree = if k1.is_some() || k2.is_some() {
        let h = family.envelope_function();
        let (dk1, dk2) = lambda_degrees(&family, &h, degree);
        Some((k1.unwrap_or(dk1), k2.unwrap_or(dk2)))
    } else {
        None
    };
    let overrides = Overrides {
        lambda_bidegree,
        triangle: None,
        row_weighting: no_row_weighting.then_some(false),
    };

    let approx =
        envcheb::implicitize::implicitize(&family, degree, &overrides).map_err(CliError::from_core)?;
    if approx.matrix_rows < approx.matrix_cols {
        eprintln!(
            "warning: matrix is wider ({} x {}) than tall; padded with zero rows",
            approx.matrix_rows, approx.matrix_cols
        );
    }

    println!("sigma_min = {:e}", approx.sigma_min);
    println!("sigma_gap = {:e}", approx.sigma_gap);
    println!("matrix    = {} x {}", approx.matrix_rows, approx.matrix_cols);

    let out = out.unwrap_or_else(|| default_out(family_path, "result.json"));
    write_atomic(&out, &ResultFile::from_approximation(&approx).to_json())?;
    println!("wrote {}", out.display());
    Ok(())
}

fn parse_pair(text: &str, what: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() == 2 {
        if let (Ok(a), Ok(b)) = (parts[0].trim().parse(), parts[1].trim().parse()) {
            return Ok((a, b));
        }
    }
    Err(CliError::Input(format!(
        "cannot parse {what} \"{text}\": expected \"a,b\""
    )))
}

pub fn study(
    family_path: &Path,
    dmax: usize,
    imax: usize,
    center: Option<&str>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    if dmax < 1 {
        return Err(CliError::Input("dmax must be >= 1".into()));
    }
    let family = load_family(family_path)?;
    let center = center.map(|c| parse_pair(c, "--center")).transpose()?;

    let table = experiment::convergence_study(&family, dmax, imax, center)
        .map_err(CliError::from_core)?;

    print!("{}", table.formatted());
    let out = out.unwrap_or_else(|| default_out(family_path, "study.csv"));
    write_atomic(&out, &table.to_csv())?;
    println!("wrote {}", out.display());
    Ok(())
}

fn parse_box(text: &str) -> Result<(f64, f64, f64, f64), CliError> {
    let parts: Result<Vec<f64>, _> = text.split(',').map(|p| p.trim().parse()).collect();
    match parts.as_deref() {
        Ok([x0, y0, x1, y1]) => Ok((*x0, *y0, *x1, *y1)),
        _ => Err(CliError::Input(format!(
            "cannot parse --box \"{text}\": expected \"x0,y0,x1,y1\""
        ))),
    }
}

/// Grid axis: `n` samples from `lo` to `hi`; a single sample sits at `lo`.
fn grid_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

pub fn contour(
    result_path: &Path,
    grid: usize,
    box_arg: Option<&str>,
    family_path: Option<&Path>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    if grid < 1 {
        return Err(CliError::Input("grid resolution must be >= 1".into()));
    }
    let result = ResultFile::load(result_path)?;

    let (x0, y0, x1, y1) = match box_arg {
        Some(text) => parse_box(text)?,
        None => {
            let (min, max) = result.triangle().bounding_box();
            (min.x, min.y, max.x, max.y)
        }
    };
    if x0 == x1 || y0 == y1 {
        return Err(CliError::Input("--box must have positive extent".into()));
    }

    let mut csv = String::from("x,y,q\n");
    for &x in &grid_axis(x0, x1, grid) {
        for &y in &grid_axis(y0, y1, grid) {
            let q = result.eval_q(Point2::new(x, y))?;
            csv.push_str(&format!("{x},{y},{q}\n"));
        }
    }
    let out = out.unwrap_or_else(|| default_out(result_path, "contour.csv"));
    write_atomic(&out, &csv)?;
    println!("wrote {}", out.display());

    if let Some(family_path) = family_path {
        let family = load_family(family_path)?;
        let fingerprint = format!("{:016x}", family.fingerprint());
        if fingerprint != result.input_fingerprint {
            return Err(CliError::Input(format!(
                "family file does not match the result (fingerprint {fingerprint} vs {})",
                result.input_fingerprint
            )));
        }
        let mut members = String::from("member,s,x,y\n");
        let domain = family.domain();
        for (index, &t) in domain.t.linspace(64).iter().enumerate() {
            for &s in &domain.s.linspace(128) {
                let p = family.eval(s, t).map_err(CliError::from_core)?;
                members.push_str(&format!("{index},{s},{},{}\n", p.x, p.y));
            }
        }
        let members_out = sibling_with_suffix(&out, "_members");
        write_atomic(&members_out, &members)?;
        println!("wrote {}", members_out.display());
    }
    Ok(())
}

/// `dir/name.ext` -> `dir/name<suffix>.ext`.
fn sibling_with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    match path.extension() {
        Some(ext) => path.with_file_name(format!("{stem}{suffix}.{}", ext.to_string_lossy())),
        None => path.with_file_name(format!("{stem}{suffix}")),
    }
}

fn parse_degrees(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Input(format!("cannot parse --degrees \"{text}\": expected \"a..b\", \"d\" or \"a,b,c\""));
    let mut degrees = Vec::new();
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        degrees.extend(lo..=hi);
    } else {
        for part in text.split(',') {
            degrees.push(part.trim().parse().map_err(|_| bad())?);
        }
    }
    if degrees.is_empty() || degrees.contains(&0) {
        return Err(CliError::Input("degrees must be >= 1".into()));
    }
    Ok(degrees)
}

pub fn bench(family_path: &Path, degrees: &str, out: Option<PathBuf>) -> Result<(), CliError> {
    let degrees = parse_degrees(degrees)?;
    let family = load_family(family_path)?;
    let rows = experiment::benchmark(&family, &degrees).map_err(CliError::from_core)?;

    println!(
        "{:>3} {:>6} {:>6} {:>9} {:>12} {:>10} {:>10}",
        "d", "rows", "cols", "entries", "assembly_ms", "svd_ms", "total_ms"
    );
    for r in &rows {
        println!(
            "{:>3} {:>6} {:>6} {:>9} {:>12.3} {:>10.3} {:>10.3}",
            r.degree, r.rows, r.cols, r.entries, r.assembly_ms, r.svd_ms, r.total_ms
        );
    }

    let out = out.unwrap_or_else(|| default_out(family_path, "bench.csv"));
    write_atomic(&out, &experiment::bench_csv(&rows))?;
    println!("wrote {}", out.display());
    Ok(())
}
