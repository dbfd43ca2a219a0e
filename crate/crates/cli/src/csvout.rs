//! CSV files with a one-line `# version,schema` header.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use cmpreserve::analysis::ConvergenceTable;
use cmpreserve::schemes::SchemeWeights;
use cmpreserve::solver::{ComplexTrajectory, Trajectory};
use cmpreserve::stability::{GridPoint, StabilityLocus};
use num_complex::Complex64;

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn num(x: f64) -> String {
    format!("{x}")
}

/// Writes `dir/name` and returns `name`.
pub fn write_table<I>(
    dir: &Path,
    name: &str,
    schema: &str,
    header: &[String],
    rows: I,
) -> Result<String, CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let path = dir.join(name);
    let io_err = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut file = BufWriter::new(File::create(&path).map_err(io_err)?);
    writeln!(file, "# {VERSION},{schema}").map_err(io_err)?;
    let mut w = csv::Writer::from_writer(file);
    let csv_err = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(name.to_string())
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn trajectory(dir: &Path, name: &str, tr: &Trajectory) -> Result<String, CliError> {
    let mut header = cols(&["n", "t"]);
    header.extend((0..tr.dim()).map(|i| format!("u_{i}")));
    let rows = tr
        .values
        .iter()
        .zip(&tr.times)
        .enumerate()
        .map(|(n, (u, &t))| {
            let mut r = vec![n.to_string(), num(t)];
            r.extend(u.iter().map(|&x| num(x)));
            r
        });
    write_table(dir, name, "trajectory", &header, rows)
}

pub fn complex_trajectory(
    dir: &Path,
    name: &str,
    tr: &ComplexTrajectory,
) -> Result<String, CliError> {
    let rows = tr
        .values
        .iter()
        .zip(&tr.times)
        .enumerate()
        .map(|(n, (u, &t))| vec![n.to_string(), num(t), num(u.re), num(u.im), num(u.norm())]);
    write_table(
        dir,
        name,
        "complex-trajectory",
        &cols(&["n", "t", "re", "im", "modulus"]),
        rows,
    )
}

pub fn weights(dir: &Path, name: &str, w: &SchemeWeights) -> Result<String, CliError> {
    let rows = w
        .omega
        .iter()
        .zip(w.a.iter())
        .enumerate()
        .map(|(j, (o, a))| vec![j.to_string(), num(*o), num(*a)]);
    write_table(dir, name, "weights", &cols(&["index", "omega", "a"]), rows)
}

pub fn locus(dir: &Path, name: &str, l: &StabilityLocus) -> Result<String, CliError> {
    let rows = l
        .samples
        .iter()
        .map(|(th, z)| vec![num(*th), num(z.re), num(z.im)]);
    write_table(dir, name, "locus", &cols(&["theta", "re", "im"]), rows)
}

pub fn grid(dir: &Path, name: &str, g: &[GridPoint]) -> Result<String, CliError> {
    let rows = g.iter().map(|p| {
        vec![
            num(p.lambda.re),
            num(p.lambda.im),
            p.report.stable.to_string(),
        ]
    });
    write_table(
        dir,
        name,
        "stability-grid",
        &cols(&["re_lambda", "im_lambda", "stable"]),
        rows,
    )
}

pub fn convergence(dir: &Path, name: &str, t: &ConvergenceTable) -> Result<String, CliError> {
    let rows = t
        .h_list
        .iter()
        .zip(&t.errors)
        .enumerate()
        .map(|(i, (h, e))| {
            let order = if i == 0 {
                String::new()
            } else {
                num(t.observed_orders[i - 1])
            };
            vec![num(*h), num(*e), order]
        });
    write_table(
        dir,
        name,
        "convergence",
        &cols(&["h", "error", "observed_order"]),
        rows,
    )
}

pub fn field(dir: &Path, name: &str, x: &[f64], u: &[f64]) -> Result<String, CliError> {
    let rows = x.iter().zip(u).map(|(x, u)| vec![num(*x), num(*u)]);
    write_table(dir, name, "field", &cols(&["x", "u"]), rows)
}

pub fn eigenvalues(dir: &Path, name: &str, ev: &[Complex64]) -> Result<String, CliError> {
    let rows = ev
        .iter()
        .enumerate()
        .map(|(j, z)| vec![(j + 1).to_string(), num(z.re), num(z.im)]);
    write_table(dir, name, "eigenvalues", &cols(&["j", "re", "im"]), rows)
}

pub fn series(
    dir: &Path,
    name: &str,
    schema: &str,
    value: &str,
    h: f64,
    v: &[f64],
) -> Result<String, CliError> {
    let rows = v
        .iter()
        .enumerate()
        .map(|(n, x)| vec![n.to_string(), num(n as f64 * h), num(*x)]);
    write_table(dir, name, schema, &cols(&["n", "t", value]), rows)
}
