//! Profile and map file formats.
//!
//! Profiles are CSV files with the columns `x, phi1, phi2, omega` (the last
//! one is the local coupling), plus a JSON sidecar next to them carrying the
//! parameters and solver diagnostics. Maps are CSV files with one row per
//! sweep point and a JSON sidecar with the sweep metadata. Floating-point
//! values are written with 17 significant digits so that reading them back
//! reproduces the stored doubles exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinks::KinkReport;
use crate::model::{make_grid, CouplingProfile, FieldPair, SystemParams};
use crate::solver::{GroundStateResult, SolverConfig};
use crate::sweep::{MapRow, MapTable, ALPHA0};

pub const PROFILE_COLUMNS: [&str; 4] = ["x", "phi1", "phi2", "omega"];
pub const MAP_COLUMNS: [&str; 7] = [
    "A",
    "alpha",
    "alpha_over_alpha0",
    "kink_count",
    "converged",
    "energy",
    "mu",
];

/// Writes a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Location of the JSON sidecar belonging to a CSV file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Everything recorded next to a profile besides the sampled values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeta {
    /// `"solve"` for relaxed ground states, `"tf"` for the perturbative pair.
    pub source: String,
    pub params: SystemParams,
    pub coupling: CouplingProfile,
    pub x_max: f64,
    pub n_points: usize,
    pub mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_eff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<Convergence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinks: Option<KinkReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub converged: bool,
    pub iterations: u64,
    pub tau: f64,
    pub residual: f64,
    pub norm_drift: f64,
    pub energy_trace: Vec<(f64, f64)>,
}

impl ProfileMeta {
    pub fn for_ground_state(
        result: &GroundStateResult,
        params: &SystemParams,
        coupling: &CouplingProfile,
        solver: &SolverConfig,
    ) -> Self {
        let grid = &result.fields.grid;
        Self {
            source: "solve".into(),
            params: *params,
            coupling: *coupling,
            x_max: grid.x_max(),
            n_points: grid.n_points(),
            mu: result.mu,
            mu_eff: None,
            energy: Some(result.energy),
            solver: Some(*solver),
            convergence: Some(Convergence {
                converged: result.converged,
                iterations: result.iterations,
                tau: result.tau,
                residual: result.residual,
                norm_drift: result.norm_drift,
                energy_trace: result.energy_trace.clone(),
            }),
            kinks: Some(result.kinks.clone()),
        }
    }
}

/// A profile read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileData {
    pub fields: FieldPair,
    /// Sampled coupling `Omega(x)`.
    pub coupling: Vec<f64>,
    /// Sidecar contents, when the sidecar exists.
    pub meta: Option<ProfileMeta>,
}

/// Writes sampled fields and their sidecar.
pub fn write_fields(
    fields: &FieldPair,
    coupling: &CouplingProfile,
    meta: &ProfileMeta,
    path: &Path,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", PROFILE_COLUMNS.join(","))?;
    for (i, &x) in fields.grid.nodes().iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(x),
            fmt_f64(fields.phi1[i]),
            fmt_f64(fields.phi2[i]),
            fmt_f64(crate::model::coupling_at(coupling, x)),
        )?;
    }
    out.flush()?;
    let sidecar = File::create(sidecar_path(path))?;
    serde_json::to_writer_pretty(BufWriter::new(sidecar), meta)?;
    Ok(())
}

/// Writes a relaxed ground state and its sidecar.
pub fn write_profile(
    result: &GroundStateResult,
    params: &SystemParams,
    coupling: &CouplingProfile,
    solver: &SolverConfig,
    path: &Path,
) -> Result<()> {
    let meta = ProfileMeta::for_ground_state(result, params, coupling, solver);
    write_fields(&result.fields, coupling, &meta, path)
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Maps the required column names to their positions in the header.
fn column_indices<const N: usize>(
    path: &Path,
    headers: &csv::StringRecord,
    required: [&str; N],
) -> Result<[usize; N]> {
    let mut idx = [0; N];
    for (slot, name) in idx.iter_mut().zip(required) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| parse_error(path, 1, format!("missing column `{name}`")))?;
    }
    Ok(idx)
}

fn field<'a>(
    path: &Path,
    record: &'a csv::StringRecord,
    idx: usize,
    name: &str,
) -> Result<&'a str> {
    let line = record.position().map_or(0, |p| p.line());
    record
        .get(idx)
        .map(str::trim)
        .ok_or_else(|| parse_error(path, line, format!("missing value for `{name}`")))
}

fn parse_f64(path: &Path, record: &csv::StringRecord, idx: usize, name: &str) -> Result<f64> {
    let line = record.position().map_or(0, |p| p.line());
    let text = field(path, record, idx, name)?;
    text.parse::<f64>()
        .map_err(|e| parse_error(path, line, format!("column `{name}`: {e} ({text:?})")))
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)?)
}

/// Reads a profile CSV and, when present, its sidecar.
pub fn read_profile(path: &Path) -> Result<ProfileData> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers()?.clone();
    let [ix, i1, i2, iw] = column_indices(path, &headers, PROFILE_COLUMNS)?;

    let (mut xs, mut phi1, mut phi2, mut coupling) = (vec![], vec![], vec![], vec![]);
    for record in rdr.records() {
        let record = record?;
        xs.push(parse_f64(path, &record, ix, "x")?);
        phi1.push(parse_f64(path, &record, i1, "phi1")?);
        phi2.push(parse_f64(path, &record, i2, "phi2")?);
        coupling.push(parse_f64(path, &record, iw, "omega")?);
    }
    let n = xs.len();
    if n < 2 {
        return Err(parse_error(
            path,
            n as u64 + 1,
            "profile has fewer than two rows",
        ));
    }
    let grid = make_grid(xs[n - 1], n)
        .map_err(|e| parse_error(path, n as u64 + 1, format!("cannot rebuild grid: {e}")))?;
    let tol = 1e-12 * grid.x_max();
    if let Some(i) = xs
        .iter()
        .zip(grid.nodes())
        .position(|(a, b)| (a - b).abs() > tol)
    {
        return Err(parse_error(
            path,
            i as u64 + 2,
            format!("x = {} is not on a uniform symmetric grid", xs[i]),
        ));
    }
    let fields =
        FieldPair::new(grid, phi1, phi2).map_err(|e| parse_error(path, 0, e.to_string()))?;

    let sidecar = sidecar_path(path);
    let meta = if sidecar.exists() {
        let file = File::open(&sidecar)?;
        Some(serde_json::from_reader(std::io::BufReader::new(file))?)
    } else {
        None
    };
    Ok(ProfileData {
        fields,
        coupling,
        meta,
    })
}

/// Writes the map CSV and its metadata sidecar.
pub fn write_map(table: &MapTable, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", MAP_COLUMNS.join(","))?;
    for row in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(row.amplitude),
            fmt_f64(row.alpha),
            fmt_f64(row.alpha / ALPHA0),
            row.kink_count,
            row.converged,
            fmt_f64(row.energy),
            fmt_f64(row.mu),
        )?;
    }
    out.flush()?;
    let sidecar = File::create(sidecar_path(path))?;
    serde_json::to_writer_pretty(BufWriter::new(sidecar), &table.metadata)?;
    Ok(())
}

/// Reads the numeric payload of a map CSV.
pub fn read_map_rows(path: &Path) -> Result<Vec<MapRow>> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers()?.clone();
    let [ia, il, _, ik, ic, ie, im] = column_indices(path, &headers, MAP_COLUMNS)?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let count = field(path, &record, ik, "kink_count")?;
        let converged = field(path, &record, ic, "converged")?;
        rows.push(MapRow {
            amplitude: parse_f64(path, &record, ia, "A")?,
            alpha: parse_f64(path, &record, il, "alpha")?,
            kink_count: count
                .parse()
                .map_err(|e| parse_error(path, line, format!("column `kink_count`: {e}")))?,
            converged: converged
                .parse()
                .map_err(|e| parse_error(path, line, format!("column `converged`: {e}")))?,
            energy: parse_f64(path, &record, ie, "energy")?,
            mu: parse_f64(path, &record, im, "mu")?,
            ..MapRow::default()
        });
    }
    Ok(rows)
}
