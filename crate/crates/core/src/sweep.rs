//! Kink-count maps over the coupling amplitude and modulation wavenumber.

use std::time::{SystemTime, UNIX_EPOCH};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinks::KinkThresholdConfig;
use crate::model::{
    make_grid, CouplingProfile, GridSpec, Parity, SystemParams, DEFAULT_OMEGA, DEFAULT_TOTAL_NORM,
};
use crate::solver::{solve_ground_state, SolverConfig};

/// Wavenumber unit of the map axes.
pub const ALPHA0: f64 = 0.09248;

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    lin_space(a, b, count).into_iter().map(f64::exp).collect()
}

/// `count` evenly spaced values from `lo` to `hi` inclusive.
pub fn lin_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSpec {
    pub g: f64,
    pub parity: Parity,
    /// Coupling amplitudes `A`.
    pub amplitudes: Vec<f64>,
    /// Wavenumbers in units of [`ALPHA0`].
    pub wavenumbers: Vec<f64>,
    pub solver: SolverConfig,
    pub grid: GridSpec,
    pub threshold: KinkThresholdConfig,
    pub omega: f64,
    pub total_norm: f64,
    /// Global seed from which per-point seeds are derived.
    pub rng_seed: u64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            g: 0.0,
            parity: Parity::Odd,
            amplitudes: log_space(0.01, 1.0, 25),
            wavenumbers: lin_space(1.0, 10.0, 25),
            solver: SolverConfig::default(),
            grid: GridSpec::default(),
            threshold: KinkThresholdConfig::default(),
            omega: DEFAULT_OMEGA,
            total_norm: DEFAULT_TOTAL_NORM,
            rng_seed: 0,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.amplitudes.is_empty() || self.wavenumbers.is_empty() {
            return Err(Error::InvalidParameter(
                "sweep axes must be non-empty".into(),
            ));
        }
        if let Some(a) = self
            .amplitudes
            .iter()
            .find(|a| !(a.is_finite() && **a > 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "amplitudes must be positive, got {a}"
            )));
        }
        if let Some(k) = self
            .wavenumbers
            .iter()
            .find(|k| !(k.is_finite() && **k > 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "wavenumbers must be positive, got {k}"
            )));
        }
        self.solver.validate()?;
        SystemParams::new(self.g, self.omega, self.total_norm)?;
        make_grid(self.grid.x_max, self.grid.n_points)?;
        Ok(())
    }

    fn params(&self) -> SystemParams {
        SystemParams {
            g: self.g,
            omega: self.omega,
            total_norm: self.total_norm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MapRow {
    pub amplitude: f64,
    pub alpha: f64,
    pub kink_count: usize,
    pub converged: bool,
    pub energy: f64,
    pub mu: f64,
    pub residual: f64,
    pub norm_drift: f64,
    pub parity_consistent: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapMetadata {
    pub spec: SweepSpec,
    pub version: String,
    /// Seconds since the Unix epoch at which the sweep finished.
    pub timestamp: u64,
    /// Points whose kink-count parity disagrees with the modulation parity.
    pub parity_failures: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapTable {
    pub rows: Vec<MapRow>,
    pub metadata: MapMetadata,
}

impl MapTable {
    /// Kink count at `(i, j)` of the amplitude and wavenumber axes.
    pub fn count(&self, amp_index: usize, alpha_index: usize) -> usize {
        self.rows[amp_index * self.metadata.spec.wavenumbers.len() + alpha_index].kink_count
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-point RNG seed, a function of the point coordinates and the global seed only.
pub fn point_seed(amplitude: f64, alpha: f64, global: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(global) ^ amplitude.to_bits()) ^ alpha.to_bits())
}

fn solve_point(spec: &SweepSpec, amplitude: f64, alpha: f64) -> MapRow {
    let seed = point_seed(amplitude, alpha, spec.rng_seed);
    let mut row = MapRow {
        amplitude,
        alpha,
        energy: f64::NAN,
        mu: f64::NAN,
        residual: f64::NAN,
        norm_drift: f64::NAN,
        seed,
        ..MapRow::default()
    };
    let outcome = CouplingProfile::new(amplitude, alpha, spec.parity).and_then(|profile| {
        let grid = make_grid(spec.grid.x_max, spec.grid.n_points)?;
        let solver = SolverConfig {
            rng_seed: seed,
            ..spec.solver
        };
        let result = solve_ground_state(&spec.params(), &profile, &grid, &solver)?;
        let kinks =
            crate::kinks::count_kinks(&result.fields, &spec.threshold).with_parity(&profile);
        Ok((result, kinks))
    });
    match outcome {
        Ok((result, kinks)) => {
            row.kink_count = kinks.count;
            row.converged = result.converged;
            row.energy = result.energy;
            row.mu = result.mu;
            row.residual = result.residual;
            row.norm_drift = result.norm_drift;
            row.parity_consistent = kinks.parity_consistent.unwrap_or(false);
        }
        Err(e) => warn!("point A = {amplitude}, alpha = {alpha} failed: {e}"),
    }
    row
}

/// Solves every point of the sweep on the current rayon pool.
pub fn run_sweep(spec: &SweepSpec) -> Result<MapTable> {
    spec.validate()?;
    let points: Vec<(f64, f64)> = spec
        .amplitudes
        .iter()
        .flat_map(|&a| spec.wavenumbers.iter().map(move |&k| (a, k * ALPHA0)))
        .collect();
    info!("sweeping {} points at g = {}", points.len(), spec.g);
    let mut rows: Vec<MapRow> = points
        .par_iter()
        .map(|&(a, alpha)| solve_point(spec, a, alpha))
        .collect();
    rows.sort_by(|x, y| {
        x.amplitude
            .total_cmp(&y.amplitude)
            .then(x.alpha.total_cmp(&y.alpha))
    });
    let parity_failures = rows
        .iter()
        .filter(|r| r.converged && !r.parity_consistent)
        .map(|r| (r.amplitude, r.alpha))
        .collect::<Vec<_>>();
    if !parity_failures.is_empty() {
        warn!(
            "{} converged points violate parity locking",
            parity_failures.len()
        );
    }
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    Ok(MapTable {
        rows,
        metadata: MapMetadata {
            spec: spec.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
            parity_failures,
        },
    })
}

/// Runs the sweep on a dedicated pool with `workers` threads.
pub fn run_sweep_with_workers(spec: &SweepSpec, workers: usize) -> Result<MapTable> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot build worker pool: {e}")))?;
    pool.install(|| run_sweep(spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_axes() {
        let spec = SweepSpec::default();
        assert_eq!(spec.amplitudes.len(), 25);
        assert!((spec.amplitudes[0] - 0.01).abs() < 1e-15);
        assert!((spec.amplitudes[24] - 1.0).abs() < 1e-14);
        assert_eq!(spec.wavenumbers[0], 1.0);
        assert_eq!(spec.wavenumbers[24], 10.0);
        assert!((5.0 * ALPHA0 - 0.4624).abs() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        let mut spec = SweepSpec::default();
        assert!(spec.validate().is_ok());
        spec.amplitudes = vec![];
        assert!(spec.validate().is_err());
        spec.amplitudes = vec![0.1, -0.2];
        assert!(spec.validate().is_err());
        spec.amplitudes = vec![0.1];
        spec.wavenumbers = vec![0.0];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn config_json_uses_field_names() {
        let text = r#"{"g": 2.0, "parity": "even", "amplitudes": [0.1], "wavenumbers": [5.0],
                       "grid": {"x_max": 25.0, "n_points": 256}, "solver": {"dtau": 0.05}}"#;
        let spec: SweepSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.parity, Parity::Even);
        assert_eq!(spec.solver.dtau, 0.05);
        assert_eq!(spec.solver.tau_max, 500.0);
        assert_eq!(spec.total_norm, DEFAULT_TOTAL_NORM);
    }

    #[test]
    fn point_seeds_depend_on_coordinates() {
        let a = point_seed(0.1, 0.4624, 7);
        assert_eq!(a, point_seed(0.1, 0.4624, 7));
        assert_ne!(a, point_seed(0.1, 0.4624, 8));
        assert_ne!(a, point_seed(0.2, 0.4624, 7));
        assert_ne!(a, point_seed(0.1, 0.5, 7));
    }
}
