//! Norm-projected imaginary-time relaxation to the ground state.
//!
//! Each step solves the linearized backward-Euler system
//! `(I + dtau H[phi_old]) phi_new = phi_old`, where `H` is the stationary
//! operator with the cubic coefficients frozen at the previous iterate and
//! the linear coupling treated implicitly. The unknowns of both components
//! are interleaved node by node, so the system is block tridiagonal with 2x2
//! diagonal blocks and scalar off-diagonal blocks. After every step both
//! components are rescaled jointly to the prescribed total norm: the
//! coupling exchanges norm between the components, so only the sum is
//! conserved.
//!
//! A fixed point of the step satisfies the discrete stationary equations
//! exactly, with `mu = (1 / lambda - 1) / dtau` for the renormalization
//! factor `lambda`, independently of the step size.

use log::{debug, info};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinks::{count_kinks, KinkReport, KinkThresholdConfig};
use crate::model::{
    chemical_potential_with, energy_with, residual_with, CouplingProfile, FieldPair, Grid1D,
    Potentials, SystemParams,
};
use crate::perturbation::{thomas_fermi_mu, thomas_fermi_profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedKind {
    /// Thomas-Fermi profile in the first component, second component empty.
    Tf,
    /// Thomas-Fermi envelope with smooth random modulation in both components.
    Random,
    /// Equal constants in both components.
    Constant,
}

impl std::str::FromStr for SeedKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tf" => Ok(SeedKind::Tf),
            "random" => Ok(SeedKind::Random),
            "constant" => Ok(SeedKind::Constant),
            other => Err(Error::InvalidParameter(format!(
                "seed kind must be tf, random or constant, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Fields vanish at both ends of the grid.
    #[default]
    Dirichlet,
    /// The last node duplicates the first one.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub dtau: f64,
    pub tau_max: f64,
    /// Threshold on `|dE / dtau| / |E|`.
    pub energy_tol: f64,
    /// Threshold on the max-norm stationary residual.
    pub residual_tol: f64,
    pub seed_kind: SeedKind,
    pub rng_seed: u64,
    /// Relative amplitude of the modulation added by the random seed.
    pub seed_noise: f64,
    /// Imaginary-time interval between convergence checks and trace samples.
    pub check_interval: f64,
    pub boundary: Boundary,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dtau: 1e-3,
            tau_max: 500.0,
            energy_tol: 1e-10,
            residual_tol: 1e-6,
            seed_kind: SeedKind::Tf,
            rng_seed: 0,
            seed_noise: 0.1,
            check_interval: 1.0,
            boundary: Boundary::Dirichlet,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dtau", self.dtau),
            ("tau_max", self.tau_max),
            ("energy_tol", self.energy_tol),
            ("residual_tol", self.residual_tol),
            ("check_interval", self.check_interval),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if !(self.seed_noise.is_finite() && self.seed_noise >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "seed_noise must be non-negative, got {}",
                self.seed_noise
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateResult {
    pub fields: FieldPair,
    pub mu: f64,
    pub energy: f64,
    pub iterations: u64,
    pub tau: f64,
    /// `(tau, energy)` samples, one per convergence check.
    pub energy_trace: Vec<(f64, f64)>,
    pub converged: bool,
    pub residual: f64,
    /// Largest relative deviation of the total norm from its target over all
    /// recorded iterates.
    pub norm_drift: f64,
    pub kinks: KinkReport,
}

impl GroundStateResult {
    /// Largest single increase between consecutive trace samples, relative
    /// to the magnitude of the energy.
    pub fn max_energy_increase(&self) -> f64 {
        self.energy_trace
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / w[0].1.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }

    /// `min / max` of the two component peak amplitudes.
    pub fn amplitude_ratio(&self) -> f64 {
        let (a, b) = self.fields.max_abs();
        let hi = a.max(b);
        if hi == 0.0 {
            0.0
        } else {
            a.min(b) / hi
        }
    }
}

/// Reusable storage for the block-tridiagonal solve.
struct Stepper {
    pot: Potentials,
    g: f64,
    boundary: Boundary,
    /// Inverses of the eliminated diagonal blocks, stored as (a, b, d) of [[a, b], [b, d]].
    inv: Vec<[f64; 3]>,
    diag: Vec<[f64; 3]>,
    rhs: Vec<[f64; 2]>,
    // Periodic correction columns.
    z1: Vec<[f64; 2]>,
    z2: Vec<[f64; 2]>,
}

#[inline]
fn inv2(m: [f64; 3]) -> [f64; 3] {
    let det = m[0] * m[2] - m[1] * m[1];
    [m[2] / det, -m[1] / det, m[0] / det]
}

#[inline]
fn mul2(m: [f64; 3], v: [f64; 2]) -> [f64; 2] {
    [m[0] * v[0] + m[1] * v[1], m[1] * v[0] + m[2] * v[1]]
}

impl Stepper {
    fn new(
        grid: &Grid1D,
        params: &SystemParams,
        profile: &CouplingProfile,
        boundary: Boundary,
    ) -> Self {
        let n = grid.n_points();
        Self {
            pot: Potentials::sample(grid, params, profile),
            g: params.g,
            boundary,
            inv: vec![[0.0; 3]; n],
            diag: vec![[0.0; 3]; n],
            rhs: vec![[0.0; 2]; n],
            z1: vec![[0.0; 2]; n],
            z2: vec![[0.0; 2]; n],
        }
    }

    /// Range of unknown node indices.
    fn unknowns(&self, n: usize) -> std::ops::Range<usize> {
        match self.boundary {
            Boundary::Dirichlet => 1..n - 1,
            Boundary::Periodic => 0..n - 1,
        }
    }

    /// Advances `fields` by one step, without renormalization.
    fn step(&mut self, fields: &mut FieldPair, dtau: f64) {
        let n = fields.len();
        let h = fields.grid.spacing();
        let kin = dtau / (h * h);
        let off = -0.5 * kin;
        let range = self.unknowns(n);
        let (start, end) = (range.start, range.end);

        for i in range.clone() {
            let (a, b) = (fields.phi1[i], fields.phi2[i]);
            let (a2, b2) = (a * a, b * b);
            let v = self.pot.trap[i];
            self.diag[i] = [
                1.0 + kin + dtau * (v + a2 + self.g * b2),
                0.5 * dtau * self.pot.coupling[i],
                1.0 + kin + dtau * (v + b2 + self.g * a2),
            ];
            self.rhs[i] = [a, b];
        }

        match self.boundary {
            Boundary::Dirichlet => {
                self.factor(start, end, off);
                solve_in_place(&self.inv, &mut self.rhs, start, end, off);
            }
            Boundary::Periodic => {
                // Cyclic system: corner blocks off * I. Write T = T' + u v^T (x) I
                // with u = (gamma, 0, .., 0, off), v = (1, 0, .., 0, off / gamma).
                let gamma = -self.diag[start][0].min(self.diag[start][2]);
                let last = end - 1;
                self.diag[start][0] -= gamma;
                self.diag[start][2] -= gamma;
                let shift = off * off / gamma;
                self.diag[last][0] -= shift;
                self.diag[last][2] -= shift;
                self.factor(start, end, off);
                for i in range.clone() {
                    self.z1[i] = [0.0; 2];
                    self.z2[i] = [0.0; 2];
                }
                self.z1[start] = [gamma, 0.0];
                self.z2[start] = [0.0, gamma];
                self.z1[last] = [off, 0.0];
                self.z2[last] = [0.0, off];
                solve_in_place(&self.inv, &mut self.rhs, start, end, off);
                solve_in_place(&self.inv, &mut self.z1, start, end, off);
                solve_in_place(&self.inv, &mut self.z2, start, end, off);
                let ratio = off / gamma;
                let vy = [
                    self.rhs[start][0] + ratio * self.rhs[last][0],
                    self.rhs[start][1] + ratio * self.rhs[last][1],
                ];
                // Columns of V^T Z.
                let c1 = [
                    self.z1[start][0] + ratio * self.z1[last][0],
                    self.z1[start][1] + ratio * self.z1[last][1],
                ];
                let c2 = [
                    self.z2[start][0] + ratio * self.z2[last][0],
                    self.z2[start][1] + ratio * self.z2[last][1],
                ];
                // (I + V^T Z) w = V^T y
                let m = [1.0 + c1[0], c2[0], c1[1], 1.0 + c2[1]];
                let det = m[0] * m[3] - m[1] * m[2];
                let w = [
                    (m[3] * vy[0] - m[1] * vy[1]) / det,
                    (-m[2] * vy[0] + m[0] * vy[1]) / det,
                ];
                for i in range.clone() {
                    self.rhs[i][0] -= self.z1[i][0] * w[0] + self.z2[i][0] * w[1];
                    self.rhs[i][1] -= self.z1[i][1] * w[0] + self.z2[i][1] * w[1];
                }
            }
        }

        for i in range {
            fields.phi1[i] = self.rhs[i][0];
            fields.phi2[i] = self.rhs[i][1];
        }
        match self.boundary {
            Boundary::Dirichlet => fields.enforce_dirichlet(),
            Boundary::Periodic => {
                fields.phi1[n - 1] = fields.phi1[0];
                fields.phi2[n - 1] = fields.phi2[0];
            }
        }
    }

    /// Block LU elimination of the tridiagonal system on `start..end`.
    fn factor(&mut self, start: usize, end: usize, off: f64) {
        let off2 = off * off;
        let mut prev: Option<[f64; 3]> = None;
        for i in start..end {
            let mut m = self.diag[i];
            if let Some(p) = prev {
                m[0] -= off2 * p[0];
                m[1] -= off2 * p[1];
                m[2] -= off2 * p[2];
            }
            let inv = inv2(m);
            self.inv[i] = inv;
            prev = Some(inv);
        }
    }
}

/// Forward and back substitution with a factored block-tridiagonal matrix.
fn solve_in_place(inv: &[[f64; 3]], rhs: &mut [[f64; 2]], start: usize, end: usize, off: f64) {
    for i in start + 1..end {
        let carried = mul2(inv[i - 1], rhs[i - 1]);
        rhs[i][0] -= off * carried[0];
        rhs[i][1] -= off * carried[1];
    }
    let last = end - 1;
    rhs[last] = mul2(inv[last], rhs[last]);
    for i in (start..last).rev() {
        let y = [
            rhs[i][0] - off * rhs[i + 1][0],
            rhs[i][1] - off * rhs[i + 1][1],
        ];
        rhs[i] = mul2(inv[i], y);
    }
}

fn check_finite(fields: &FieldPair, tau: f64) -> Result<()> {
    if let Some(i) = fields
        .phi1
        .iter()
        .chain(fields.phi2.iter())
        .position(|v| !v.is_finite())
    {
        return Err(Error::Unstable {
            tau,
            detail: format!("non-finite value at node {}", i % fields.len()),
        });
    }
    Ok(())
}

/// One imaginary-time step with homogeneous Dirichlet boundaries, followed
/// by joint renormalization to `params.total_norm`.
pub fn imaginary_time_step(
    fields: &FieldPair,
    params: &SystemParams,
    profile: &CouplingProfile,
    dtau: f64,
) -> Result<FieldPair> {
    imaginary_time_step_with(fields, params, profile, dtau, Boundary::Dirichlet)
}

pub fn imaginary_time_step_with(
    fields: &FieldPair,
    params: &SystemParams,
    profile: &CouplingProfile,
    dtau: f64,
    boundary: Boundary,
) -> Result<FieldPair> {
    if !(dtau.is_finite() && dtau > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dtau must be positive, got {dtau}"
        )));
    }
    let mut next = FieldPair::new(
        fields.grid.clone(),
        fields.phi1.clone(),
        fields.phi2.clone(),
    )?;
    let mut stepper = Stepper::new(&fields.grid, params, profile, boundary);
    stepper.step(&mut next, dtau);
    check_finite(&next, dtau)?;
    next.normalize_to(params.total_norm)?;
    Ok(next)
}

/// Smooth random function on `[-radius, radius]` with unit sup-norm bound.
fn smooth_noise(rng: &mut ChaCha8Rng, nodes: &[f64], radius: f64) -> Vec<f64> {
    const MODES: usize = 8;
    let coefs: Vec<(f64, f64)> = (0..MODES)
        .map(|_| {
            (
                rng.random_range(-1.0..1.0),
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let total: f64 = coefs
        .iter()
        .map(|(c, _)| c.abs())
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    nodes
        .iter()
        .map(|&x| {
            coefs
                .iter()
                .enumerate()
                .map(|(k, (c, phase))| c * ((k as f64 + 1.0) * x / radius + phase).sin())
                .sum::<f64>()
                / total
        })
        .collect()
}

/// Initial condition for the relaxation, normalized to the total norm.
pub fn seed_fields(
    params: &SystemParams,
    grid: &Grid1D,
    config: &SolverConfig,
) -> Result<FieldPair> {
    let n = grid.n_points();
    let envelope = if params.omega > 0.0 {
        let mu = thomas_fermi_mu(params.total_norm, params.omega);
        thomas_fermi_profile(grid, mu, params.omega)
    } else {
        vec![1.0; n]
    };
    let radius = if params.omega > 0.0 {
        (2.0 * thomas_fermi_mu(params.total_norm, params.omega)).sqrt() / params.omega
    } else {
        grid.x_max()
    };
    let (phi1, phi2) = match config.seed_kind {
        SeedKind::Tf => (envelope, vec![0.0; n]),
        SeedKind::Constant => (vec![1.0; n], vec![1.0; n]),
        SeedKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
            let s1 = smooth_noise(&mut rng, grid.nodes(), radius);
            let s2 = smooth_noise(&mut rng, grid.nodes(), radius);
            let eps = config.seed_noise;
            let phi1 = envelope
                .iter()
                .zip(&s1)
                .map(|(e, s)| e * (1.0 + eps * s))
                .collect();
            let phi2 = envelope.iter().zip(&s2).map(|(e, s)| eps * e * s).collect();
            (phi1, phi2)
        }
    };
    let mut fields = FieldPair::new(grid.clone(), phi1, phi2)?;
    match config.boundary {
        Boundary::Dirichlet => fields.enforce_dirichlet(),
        Boundary::Periodic => {
            fields.phi1[n - 1] = fields.phi1[0];
            fields.phi2[n - 1] = fields.phi2[0];
        }
    }
    fields.normalize_to(params.total_norm)?;
    Ok(fields)
}

/// Puts the sign-definite component first and makes it positive.
///
/// Exchanging the components and flipping the global sign are exact
/// symmetries of the energy; the kink-bearing component is the one with more
/// thresholded sign changes, with the smaller norm breaking ties.
pub fn canonicalize(fields: &mut FieldPair) {
    let cfg = KinkThresholdConfig::default();
    let as_is = count_kinks(fields, &cfg).count;
    let swapped = fields.swapped();
    let exchanged = count_kinks(&swapped, &cfg).count;
    let (n1, n2) = fields.component_norms();
    if exchanged > as_is || (exchanged == as_is && n2 > n1) {
        *fields = swapped;
    }
    let weight: f64 = fields.phi1.iter().sum();
    if weight < 0.0 {
        fields.phi1.iter_mut().for_each(|v| *v = -*v);
        fields.phi2.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Relaxes a seed to the ground state.
pub fn solve_ground_state(
    params: &SystemParams,
    profile: &CouplingProfile,
    grid: &Grid1D,
    config: &SolverConfig,
) -> Result<GroundStateResult> {
    config.validate()?;
    let seed = seed_fields(params, grid, config)?;
    relax(seed, params, profile, config)
}

/// Relaxes the given initial fields.
pub fn relax(
    mut fields: FieldPair,
    params: &SystemParams,
    profile: &CouplingProfile,
    config: &SolverConfig,
) -> Result<GroundStateResult> {
    config.validate()?;
    let target = params.total_norm;
    fields.normalize_to(target)?;
    let mut stepper = Stepper::new(&fields.grid, params, profile, config.boundary);
    let pot = Potentials::sample(&fields.grid, params, profile);

    let steps_per_check = ((config.check_interval / config.dtau).round() as u64).max(1);
    let max_steps = (config.tau_max / config.dtau).ceil() as u64;

    let mut energy = energy_with(&fields, params.g, &pot);
    let mut trace = vec![(0.0, energy)];
    let mut iterations = 0_u64;
    let mut norm_drift = 0.0_f64;
    let mut converged = false;
    let mut residual = f64::INFINITY;
    let mut mu = chemical_potential_with(&fields, params.g, &pot)?;

    while iterations < max_steps {
        let batch = steps_per_check.min(max_steps - iterations);
        for _ in 0..batch {
            stepper.step(&mut fields, config.dtau);
            let norm = fields.norm();
            if !(norm.is_finite() && norm > 0.0) {
                check_finite(&fields, iterations as f64 * config.dtau)?;
                return Err(Error::Unstable {
                    tau: iterations as f64 * config.dtau,
                    detail: "norm collapsed to zero".into(),
                });
            }
            let scale = (target / norm).sqrt();
            fields.phi1.iter_mut().for_each(|v| *v *= scale);
            fields.phi2.iter_mut().for_each(|v| *v *= scale);
            iterations += 1;
        }
        let tau = iterations as f64 * config.dtau;
        check_finite(&fields, tau)?;
        norm_drift = norm_drift.max((fields.norm() - target).abs() / target);

        let next_energy = energy_with(&fields, params.g, &pot);
        let interval = batch as f64 * config.dtau;
        let rate =
            (next_energy - energy).abs() / (next_energy.abs().max(f64::MIN_POSITIVE) * interval);
        energy = next_energy;
        trace.push((tau, energy));
        mu = chemical_potential_with(&fields, params.g, &pot)?;
        residual = residual_with(&fields, mu, params.g, &pot);
        debug!("tau {tau:.3} energy {energy:.15e} rate {rate:.3e} residual {residual:.3e}");
        if rate < config.energy_tol && residual < config.residual_tol {
            converged = true;
            break;
        }
    }

    canonicalize(&mut fields);
    let kinks = count_kinks(&fields, &KinkThresholdConfig::default()).with_parity(profile);
    let tau = iterations as f64 * config.dtau;
    info!(
        "relaxation stopped at tau {tau:.2} (converged: {converged}, residual {residual:.2e}, kinks {})",
        kinks.count
    );
    Ok(GroundStateResult {
        fields,
        mu,
        energy,
        iterations,
        tau,
        energy_trace: trace,
        converged,
        residual,
        norm_drift,
        kinks,
    })
}
