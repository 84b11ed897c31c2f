//! Text tables and JSON records written by the commands.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use spin2_gs::{Axis, Grid, SpinorField, StepRecord};

use crate::CliError;

const COMPONENT_TAGS: [&str; 5] = ["p2", "p1", "0", "m1", "m2"];
const COORD_NAMES: [&str; 2] = ["x", "y"];

pub fn field_header(dim: usize) -> String {
    let mut cols: Vec<String> = COORD_NAMES[..dim].iter().map(|s| s.to_string()).collect();
    for t in COMPONENT_TAGS {
        cols.push(format!("re_{t}"));
        cols.push(format!("im_{t}"));
    }
    cols.join("\t")
}

/// One row per stored grid point (boundary included), full precision.
pub fn write_field(out: &mut impl Write, phi: &SpinorField) -> std::io::Result<()> {
    let grid = phi.grid();
    writeln!(out, "{}", field_header(grid.dim()))?;
    for idx in 0..grid.len() {
        let x = grid.point(idx);
        let mut row: Vec<String> = x[..grid.dim()].iter().map(|c| format!("{c:.17e}")).collect();
        for z in phi.at(idx) {
            row.push(format!("{:.17e}", z.re));
            row.push(format!("{:.17e}", z.im));
        }
        writeln!(out, "{}", row.join("\t"))?;
    }
    Ok(())
}

fn axis_from_coords(mut c: Vec<f64>) -> Result<Axis, CliError> {
    c.sort_by(f64::total_cmp);
    c.dedup();
    if c.len() < 3 {
        return Err(CliError::Config("field table needs at least three points per axis".into()));
    }
    Ok(Axis {
        lower: c[0],
        upper: c[c.len() - 1],
        cells: c.len() - 1,
    })
}

/// Reads a table written by [`write_field`]; the grid is recovered from the
/// coordinate columns.
pub fn read_field(input: impl BufRead) -> Result<SpinorField, CliError> {
    let bad = |msg: String| CliError::Config(format!("field table: {msg}"));
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| bad("empty".into()))?.map_err(CliError::Io)?;
    let dim = match header.split('\t').next() {
        Some("x") if header == field_header(1) => 1,
        Some("x") if header == field_header(2) => 2,
        _ => return Err(bad(format!("unexpected header {header:?}"))),
    };
    let mut rows: Vec<Vec<f64>> = vec![];
    for (n, line) in lines.enumerate() {
        let line = line.map_err(CliError::Io)?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split('\t')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("row {}: {e}", n + 2)))?;
        if vals.len() != dim + 10 {
            return Err(bad(format!("row {} has {} columns, expected {}", n + 2, vals.len(), dim + 10)));
        }
        rows.push(vals);
    }
    let axes = (0..dim)
        .map(|k| axis_from_coords(rows.iter().map(|r| r[k]).collect()))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = Grid::new(axes)?;
    if rows.len() != grid.len() {
        return Err(bad(format!("{} rows for a grid of {} points", rows.len(), grid.len())));
    }
    let mut comps: [Vec<Complex64>; 5] = std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); grid.len()]);
    for r in &rows {
        let idx = locate(&grid, &r[..dim]).ok_or_else(|| bad(format!("coordinate {:?} is off the grid", &r[..dim])))?;
        for k in 0..5 {
            comps[k][idx] = Complex64::new(r[dim + 2 * k], r[dim + 2 * k + 1]);
        }
    }
    Ok(SpinorField::from_components(grid, comps))
}

fn locate(grid: &Grid, x: &[f64]) -> Option<usize> {
    let mut ij = [0usize; 2];
    for (k, &c) in x.iter().enumerate() {
        let ax = grid.axis(k);
        let t = (c - ax.lower) / ax.spacing();
        let i = t.round();
        if (t - i).abs() > 1e-6 || i < 0.0 || i as usize > ax.cells {
            return None;
        }
        ij[k] = i as usize;
    }
    Some(if grid.dim() == 1 { ij[0] } else { grid.flatten(ij[0], ij[1]) })
}

pub const DIAGNOSTICS_HEADER: &str = "iteration\tenergy\tn_total\tm_total\tresidual\tlambda";

/// `m_sign` is -1 for mirrored runs so the reported magnetization has the
/// requested sign.
pub fn diagnostics_row(r: &StepRecord, m_sign: f64) -> String {
    let lambda = r.lambda.map_or_else(|| "nan".to_string(), |l| format!("{:.17e}", m_sign * l));
    format!(
        "{}\t{:.17e}\t{:.17e}\t{:.17e}\t{:.17e}\t{}",
        r.iteration,
        r.energy,
        r.n_total,
        m_sign * r.m_total,
        r.residual,
        lambda
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub total: f64,
    pub magnetization: f64,
    /// Component masses in the order `l = 2, 1, 0, -1, -2`.
    pub components: [f64; 5],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub label: String,
    /// Open regimes whose ground states are admissible at these interactions.
    pub regimes: Vec<String>,
    pub tau: f64,
    pub delta: f64,
    /// Uniform ground-state energy at the same interactions and magnetization.
    pub beta_of_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmaSummary {
    pub valid: bool,
    pub deviation: f64,
    /// Magnetic quantum number of the reference component.
    pub reference: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub converged: bool,
    pub dry_run: bool,
    pub iterations: usize,
    pub energy: f64,
    pub masses: MassReport,
    pub mu: Option<f64>,
    pub lambda: Option<f64>,
    /// Discrete Euler-Lagrange residual with the least-squares multipliers.
    pub el_residual: Option<f64>,
    /// Last `max |Phi^{n+1} - Phi^n| / dt`.
    pub step_residual: f64,
    pub seed: Option<u64>,
    pub mirrored: bool,
    pub phase: PhaseReport,
    pub sma: Option<SmaSummary>,
}
