//! WebAssembly bindings for a single-page demo.
//!
//! Three operations are exposed, each returning a JSON string: relaxing a
//! ground state, scanning the uniform-state energy landscape, and sampling
//! the small-coupling perturbative pair. The `*_report` functions hold the
//! logic and are plain Rust, so they are also tested natively.

use bico::model::{make_grid, CouplingProfile, Parity, SystemParams};
use bico::solver::{solve_ground_state, SolverConfig};
use bico::uniform::{hamiltonian_density, uniform_brute_force, uniform_ground_state, UniformState};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const X_MAX: f64 = 25.0;
const DTAU: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub x: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub omega: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub profile: Profile,
    pub kinks: usize,
    pub kink_positions: Vec<f64>,
    pub parity_consistent: bool,
    pub energy: f64,
    pub mu: f64,
    pub converged: bool,
    pub tau: f64,
    pub amplitude_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Landscape {
    /// Mixing angle: `phi1 = sqrt(N) cos t`, `phi2 = sqrt(N) sin t`.
    pub theta: Vec<f64>,
    pub h_density: Vec<f64>,
    pub ground_state: UniformState,
    pub oracle: UniformState,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TfReport {
    pub profile: Profile,
    pub mu_eff: f64,
    pub support_radius: f64,
}

fn parse_parity(parity: &str) -> Result<Parity, String> {
    parity.parse().map_err(|e: bico::Error| e.to_string())
}

fn setup(
    g: f64,
    a: f64,
    alpha: f64,
    parity: &str,
    points: usize,
) -> Result<(SystemParams, CouplingProfile, bico::Grid1D), String> {
    let params = SystemParams::new(
        g,
        bico::model::DEFAULT_OMEGA,
        bico::model::DEFAULT_TOTAL_NORM,
    )
    .map_err(|e| e.to_string())?;
    let profile =
        CouplingProfile::new(a, alpha, parse_parity(parity)?).map_err(|e| e.to_string())?;
    let grid = make_grid(X_MAX, points).map_err(|e| e.to_string())?;
    Ok((params, profile, grid))
}

fn sampled(fields: &bico::FieldPair, profile: &CouplingProfile) -> Profile {
    let x = fields.grid.nodes().to_vec();
    Profile {
        omega: x.iter().map(|&x| bico::coupling_at(profile, x)).collect(),
        x,
        phi1: fields.phi1.clone(),
        phi2: fields.phi2.clone(),
    }
}

pub fn solve_report(
    g: f64,
    a: f64,
    alpha: f64,
    parity: &str,
    points: usize,
) -> Result<SolveReport, String> {
    let (params, profile, grid) = setup(g, a, alpha, parity, points)?;
    let config = SolverConfig {
        dtau: DTAU,
        ..SolverConfig::default()
    };
    let r = solve_ground_state(&params, &profile, &grid, &config).map_err(|e| e.to_string())?;
    Ok(SolveReport {
        profile: sampled(&r.fields, &profile),
        kinks: r.kinks.count,
        kink_positions: r.kinks.positions.clone(),
        parity_consistent: r.kinks.parity_consistent.unwrap_or(false),
        energy: r.energy,
        mu: r.mu,
        converged: r.converged,
        tau: r.tau,
        amplitude_ratio: r.amplitude_ratio(),
    })
}

pub fn landscape_report(density: f64, g: f64, a: f64, samples: usize) -> Result<Landscape, String> {
    if !(density.is_finite() && density > 0.0) {
        return Err(format!("density must be positive, got {density}"));
    }
    let samples = samples.max(2);
    let root = density.sqrt();
    let theta: Vec<f64> = (0..samples)
        .map(|k| std::f64::consts::PI * k as f64 / (samples - 1) as f64)
        .collect();
    let h_density = theta
        .iter()
        .map(|&t| hamiltonian_density(root * t.cos(), root * t.sin(), g, a))
        .collect();
    Ok(Landscape {
        theta,
        h_density,
        ground_state: uniform_ground_state(density, g, a),
        oracle: uniform_brute_force(density, g, a, 100_000),
    })
}

pub fn tf_report(
    g: f64,
    a: f64,
    alpha: f64,
    parity: &str,
    mu: f64,
    points: usize,
) -> Result<TfReport, String> {
    let (params, profile, grid) = setup(g, a, alpha, parity, points)?;
    let tf = bico::tf_pair(&params, &profile, mu, &grid).map_err(|e| e.to_string())?;
    Ok(TfReport {
        profile: sampled(&tf.fields, &profile),
        mu_eff: tf.mu_eff,
        support_radius: tf.support_radius,
    })
}

fn to_js<T: Serialize>(value: Result<T, String>) -> Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

/// Relaxes the ground state in the default trap; JSON [`SolveReport`].
#[wasm_bindgen]
pub fn solve(g: f64, a: f64, alpha: f64, parity: &str, points: usize) -> Result<String, JsError> {
    to_js(solve_report(g, a, alpha, parity, points))
}

/// Uniform-state energy over the mixing angle; JSON [`Landscape`].
#[wasm_bindgen]
pub fn uniform_landscape(density: f64, g: f64, a: f64, samples: usize) -> Result<String, JsError> {
    to_js(landscape_report(density, g, a, samples))
}

/// Perturbative pair; JSON [`TfReport`].
#[wasm_bindgen]
pub fn perturbative(
    g: f64,
    a: f64,
    alpha: f64,
    parity: &str,
    mu: f64,
    points: usize,
) -> Result<String, JsError> {
    to_js(tf_report(g, a, alpha, parity, mu, points))
}
