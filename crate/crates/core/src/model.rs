//! Discretized model: grid, physical parameters, the modulated coupling, the
//! energy functional and the stationary equations.
//!
//! Derivatives are taken as difference quotients on each grid cell (the
//! central difference at the cell midpoint) and integrals use the trapezoidal
//! rule. With these choices the gradient of the discrete energy with respect
//! to an interior node value is exactly `2 h` times the bracket of the
//! stationary equation evaluated with the three-point Laplacian, so the
//! solver's fixed points, [`chemical_potential`] and [`stationary_residual`]
//! are mutually consistent to round-off.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible number of grid nodes.
pub const MIN_POINTS: usize = 16;

/// Uniform symmetric grid on `[-x_max, x_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid1D {
    x_max: f64,
    spacing: f64,
    nodes: Vec<f64>,
}

/// Serialized form of a [`Grid1D`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_max: f64,
    pub n_points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_max: 25.0,
            n_points: 1024,
        }
    }
}

impl TryFrom<GridSpec> for Grid1D {
    type Error = Error;

    fn try_from(spec: GridSpec) -> Result<Self> {
        make_grid(spec.x_max, spec.n_points)
    }
}

impl From<Grid1D> for GridSpec {
    fn from(grid: Grid1D) -> Self {
        grid.spec()
    }
}

/// Builds the uniform grid with `n_points` nodes spanning `[-x_max, x_max]`.
pub fn make_grid(x_max: f64, n_points: usize) -> Result<Grid1D> {
    if !(x_max.is_finite() && x_max > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "half-width must be positive and finite, got {x_max}"
        )));
    }
    if n_points < MIN_POINTS {
        return Err(Error::InvalidGrid(format!(
            "need at least {MIN_POINTS} points, got {n_points}"
        )));
    }
    let intervals = (n_points - 1) as f64;
    // Integer offsets keep the node set exactly symmetric about zero.
    let nodes = (0..n_points)
        .map(|i| {
            let k = 2.0 * i as f64 - intervals;
            (k / intervals) * x_max
        })
        .collect();
    Ok(Grid1D {
        x_max,
        spacing: 2.0 * x_max / intervals,
        nodes,
    })
}

impl Grid1D {
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.nodes.len()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            x_max: self.x_max,
            n_points: self.nodes.len(),
        }
    }

    /// Trapezoidal weight of node `i`.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.nodes.len() {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }

    /// Trapezoidal integral of sampled values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        let n = values.len();
        let inner: f64 = values[1..n - 1].iter().sum();
        self.spacing * (inner + 0.5 * (values[0] + values[n - 1]))
    }
}

/// Physical constants of the stationary problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Cross-interaction (XPM) coefficient; self-interaction is normalized to 1.
    pub g: f64,
    /// Harmonic trap frequency.
    pub omega: f64,
    /// Total norm of both components.
    pub total_norm: f64,
}

/// Default total norm: the 1D Thomas-Fermi norm for `mu = 0.16` at `omega = 0.05`,
/// which puts the peak of a fully polarized profile at 0.4.
pub const DEFAULT_TOTAL_NORM: f64 = 2.41;
pub const DEFAULT_OMEGA: f64 = 0.05;

impl SystemParams {
    pub fn new(g: f64, omega: f64, total_norm: f64) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "g must be finite, got {g}"
            )));
        }
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "trap frequency must be non-negative, got {omega}"
            )));
        }
        if !(total_norm.is_finite() && total_norm > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "total norm must be positive, got {total_norm}"
            )));
        }
        Ok(Self {
            g,
            omega,
            total_norm,
        })
    }

    pub fn with_g(g: f64) -> Self {
        Self {
            g,
            omega: DEFAULT_OMEGA,
            total_norm: DEFAULT_TOTAL_NORM,
        }
    }
}

/// Parity of the modulation function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// `sin(alpha x)`
    Odd,
    /// `cos(alpha x)`
    Even,
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "odd" | "sin" => Ok(Parity::Odd),
            "even" | "cos" => Ok(Parity::Even),
            other => Err(Error::InvalidParameter(format!(
                "parity must be odd or even, got {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        })
    }
}

/// Spatially modulated linear coupling `A sin(alpha x)` or `A cos(alpha x)`.
///
/// A negative amplitude is stored as `|A|` with a half-period shift, which
/// for both parities amounts to an exact overall sign flip of the profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingProfile {
    amplitude: f64,
    wavenumber: f64,
    parity: Parity,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    half_period_shift: bool,
}

impl CouplingProfile {
    pub fn new(amplitude: f64, wavenumber: f64, parity: Parity) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "coupling amplitude must be finite, got {amplitude}"
            )));
        }
        if !(wavenumber.is_finite() && wavenumber >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "wavenumber must be non-negative, got {wavenumber}"
            )));
        }
        Ok(Self {
            amplitude: amplitude.abs(),
            wavenumber,
            parity,
            half_period_shift: amplitude.is_sign_negative() && amplitude != 0.0,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_shifted(&self) -> bool {
        self.half_period_shift
    }

    /// Samples the coupling on every grid node.
    pub fn sample(&self, grid: &Grid1D) -> Vec<f64> {
        grid.nodes().iter().map(|&x| coupling_at(self, x)).collect()
    }
}

/// Local coupling strength at `x`.
pub fn coupling_at(profile: &CouplingProfile, x: f64) -> f64 {
    let phase = profile.wavenumber * x;
    let shape = match profile.parity {
        Parity::Odd => phase.sin(),
        Parity::Even => phase.cos(),
    };
    let value = profile.amplitude * shape;
    if profile.half_period_shift {
        -value
    } else {
        value
    }
}

/// Harmonic trap potential `omega^2 x^2 / 2`.
#[inline]
pub fn trap_at(params: &SystemParams, x: f64) -> f64 {
    0.5 * params.omega * params.omega * x * x
}

/// Real stationary wave functions of both components on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldPair {
    pub grid: Grid1D,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
}

impl FieldPair {
    pub fn new(grid: Grid1D, phi1: Vec<f64>, phi2: Vec<f64>) -> Result<Self> {
        let n = grid.n_points();
        for len in [phi1.len(), phi2.len()] {
            if len != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: len,
                });
            }
        }
        if let Some(index) = phi1.iter().chain(phi2.iter()).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: index % n });
        }
        Ok(Self { grid, phi1, phi2 })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        let n = grid.n_points();
        Self {
            grid,
            phi1: vec![0.0; n],
            phi2: vec![0.0; n],
        }
    }

    /// Both components set to the given constants on every node, boundary included.
    pub fn constant(grid: Grid1D, phi1: f64, phi2: f64) -> Self {
        let n = grid.n_points();
        Self {
            grid,
            phi1: vec![phi1; n],
            phi2: vec![phi2; n],
        }
    }

    pub fn len(&self) -> usize {
        self.phi1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi1.is_empty()
    }

    /// `integral of phi1^2 + phi2^2`.
    pub fn norm(&self) -> f64 {
        let n = self.len();
        let mut sum = 0.0;
        for i in 0..n {
            sum +=
                self.grid.weight(i) * (self.phi1[i] * self.phi1[i] + self.phi2[i] * self.phi2[i]);
        }
        sum
    }

    pub fn component_norms(&self) -> (f64, f64) {
        let n = self.len();
        let (mut a, mut b) = (0.0, 0.0);
        for i in 0..n {
            let w = self.grid.weight(i);
            a += w * self.phi1[i] * self.phi1[i];
            b += w * self.phi2[i] * self.phi2[i];
        }
        (a, b)
    }

    /// Rescales both components jointly so that the total norm equals `target`.
    pub fn normalize_to(&mut self, target: f64) -> Result<()> {
        let current = self.norm();
        if !(current > 0.0) || !current.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let scale = (target / current).sqrt();
        self.phi1.iter_mut().for_each(|v| *v *= scale);
        self.phi2.iter_mut().for_each(|v| *v *= scale);
        Ok(())
    }

    pub fn enforce_dirichlet(&mut self) {
        let n = self.len();
        for phi in [&mut self.phi1, &mut self.phi2] {
            phi[0] = 0.0;
            phi[n - 1] = 0.0;
        }
    }

    pub fn max_abs(&self) -> (f64, f64) {
        let m = |v: &[f64]| v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        (m(&self.phi1), m(&self.phi2))
    }

    /// Exchanges the two components.
    pub fn swapped(&self) -> Self {
        let mut out = self.clone();
        std::mem::swap(&mut out.phi1, &mut out.phi2);
        out
    }

    /// `(phi1(-x), sign * phi2(-x))`.
    pub fn reflected(&self, phi2_sign: f64) -> Self {
        let mut out = self.clone();
        out.phi1.reverse();
        out.phi2.reverse();
        out.phi2.iter_mut().for_each(|v| *v *= phi2_sign);
        out
    }

    fn check_grid(&self) -> Result<()> {
        let n = self.grid.n_points();
        for len in [self.phi1.len(), self.phi2.len()] {
            if len != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: len,
                });
            }
        }
        Ok(())
    }
}

/// Pre-sampled trap and coupling values for repeated evaluations on one grid.
#[derive(Debug, Clone)]
pub(crate) struct Potentials {
    pub trap: Vec<f64>,
    pub coupling: Vec<f64>,
}

impl Potentials {
    pub fn sample(grid: &Grid1D, params: &SystemParams, profile: &CouplingProfile) -> Self {
        Self {
            trap: grid.nodes().iter().map(|&x| trap_at(params, x)).collect(),
            coupling: profile.sample(grid),
        }
    }
}

/// Kinetic energy `1/2 integral of phi'^2` from cell difference quotients.
fn kinetic(grid: &Grid1D, phi: &[f64]) -> f64 {
    let h = grid.spacing();
    let sum: f64 = phi.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum();
    0.5 * sum / h
}

pub(crate) fn energy_with(fields: &FieldPair, g: f64, pot: &Potentials) -> f64 {
    let grid = &fields.grid;
    let mut density = 0.0;
    for i in 0..fields.len() {
        let (a, b) = (fields.phi1[i], fields.phi2[i]);
        let (a2, b2) = (a * a, b * b);
        let local = pot.trap[i] * (a2 + b2)
            + 0.5 * (a2 * a2 + b2 * b2)
            + g * a2 * b2
            + pot.coupling[i] * a * b;
        density += grid.weight(i) * local;
    }
    kinetic(grid, &fields.phi1) + kinetic(grid, &fields.phi2) + density
}

/// Discrete energy functional
/// `E = integral of 1/2 (phi1'^2 + phi2'^2) + V (phi1^2 + phi2^2)
///      + 1/2 (phi1^4 + phi2^4) + g phi1^2 phi2^2 + Omega phi1 phi2`.
pub fn energy(fields: &FieldPair, params: &SystemParams, profile: &CouplingProfile) -> Result<f64> {
    fields.check_grid()?;
    let pot = Potentials::sample(&fields.grid, params, profile);
    Ok(energy_with(fields, params.g, &pot))
}

pub(crate) fn chemical_potential_with(fields: &FieldPair, g: f64, pot: &Potentials) -> Result<f64> {
    let grid = &fields.grid;
    let norm = fields.norm();
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let mut density = 0.0;
    for i in 0..fields.len() {
        let (a, b) = (fields.phi1[i], fields.phi2[i]);
        let (a2, b2) = (a * a, b * b);
        let local = pot.trap[i] * (a2 + b2)
            + (a2 * a2 + b2 * b2)
            + 2.0 * g * a2 * b2
            + pot.coupling[i] * a * b;
        density += grid.weight(i) * local;
    }
    Ok((kinetic(grid, &fields.phi1) + kinetic(grid, &fields.phi2) + density) / norm)
}

/// Chemical potential shared by both components (norm-weighted Rayleigh quotient).
pub fn chemical_potential(
    fields: &FieldPair,
    params: &SystemParams,
    profile: &CouplingProfile,
) -> Result<f64> {
    fields.check_grid()?;
    let pot = Potentials::sample(&fields.grid, params, profile);
    chemical_potential_with(fields, params.g, &pot)
}

/// Applies the stationary operator to both components at interior nodes:
/// `[-1/2 d2 + V + phi_n^2 + g phi_m^2] phi_n + 1/2 Omega phi_m`.
/// Boundary entries are left at zero.
pub(crate) fn apply_hamiltonian(
    fields: &FieldPair,
    g: f64,
    pot: &Potentials,
) -> (Vec<f64>, Vec<f64>) {
    let n = fields.len();
    let inv_h2 = 1.0 / (fields.grid.spacing() * fields.grid.spacing());
    let (p1, p2) = (&fields.phi1, &fields.phi2);
    let mut h1 = vec![0.0; n];
    let mut h2 = vec![0.0; n];
    for i in 1..n - 1 {
        let lap1 = (p1[i + 1] - 2.0 * p1[i] + p1[i - 1]) * inv_h2;
        let lap2 = (p2[i + 1] - 2.0 * p2[i] + p2[i - 1]) * inv_h2;
        let (a2, b2) = (p1[i] * p1[i], p2[i] * p2[i]);
        let half_omega = 0.5 * pot.coupling[i];
        h1[i] = -0.5 * lap1 + (pot.trap[i] + a2 + g * b2) * p1[i] + half_omega * p2[i];
        h2[i] = -0.5 * lap2 + (pot.trap[i] + b2 + g * a2) * p2[i] + half_omega * p1[i];
    }
    (h1, h2)
}

pub(crate) fn residual_with(fields: &FieldPair, mu: f64, g: f64, pot: &Potentials) -> f64 {
    let (h1, h2) = apply_hamiltonian(fields, g, pot);
    let n = fields.len();
    (1..n - 1)
        .map(|i| {
            let r1 = h1[i] - mu * fields.phi1[i];
            let r2 = h2[i] - mu * fields.phi2[i];
            r1.abs().max(r2.abs())
        })
        .fold(0.0, f64::max)
}

/// Max-norm of the stationary-equation residual over interior nodes and both
/// components.
pub fn stationary_residual(
    fields: &FieldPair,
    mu: f64,
    params: &SystemParams,
    profile: &CouplingProfile,
) -> Result<f64> {
    fields.check_grid()?;
    let pot = Potentials::sample(&fields.grid, params, profile);
    Ok(residual_with(fields, mu, params.g, &pot))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn odd(a: f64, alpha: f64) -> CouplingProfile {
        CouplingProfile::new(a, alpha, Parity::Odd).unwrap()
    }

    #[test]
    fn grid_spacing_and_endpoints() {
        let grid = make_grid(25.0, 1024).unwrap();
        assert!((grid.spacing() - 50.0 / 1023.0).abs() < 1e-15);
        assert!((grid.spacing() - 0.04888).abs() < 1e-5);
        let small = make_grid(1.0, 16).unwrap();
        assert_eq!(small.nodes()[0], -1.0);
        assert_eq!(small.nodes()[15], 1.0);
        for (a, b) in grid.nodes().iter().zip(grid.nodes().iter().rev()) {
            assert_eq!(*a, -*b);
        }
        assert!(grid.nodes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(matches!(make_grid(25.0, 8), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(0.0, 64), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(-3.0, 64), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn grid_serde_uses_spec() {
        let grid = make_grid(25.0, 64).unwrap();
        let text = serde_json::to_string(&grid).unwrap();
        assert_eq!(text, r#"{"x_max":25.0,"n_points":64}"#);
        let back: Grid1D = serde_json::from_str(&text).unwrap();
        assert_eq!(back, grid);
    }

    #[test]
    fn coupling_values() {
        assert_eq!(coupling_at(&odd(0.1, 0.4624), 0.0), 0.0);
        let even = CouplingProfile::new(1.0, 0.4624, Parity::Even).unwrap();
        assert_eq!(coupling_at(&even, 0.0), 1.0);
        let v = coupling_at(&odd(0.1, 0.5), std::f64::consts::PI);
        assert!((v - 0.1).abs() < 1e-15);
    }

    #[test]
    fn coupling_degenerate_wavenumber() {
        let even = CouplingProfile::new(0.3, 0.0, Parity::Even).unwrap();
        let odd = CouplingProfile::new(0.3, 0.0, Parity::Odd).unwrap();
        for x in [-7.0, 0.0, 3.5] {
            assert_eq!(coupling_at(&even, x), 0.3);
            assert_eq!(coupling_at(&odd, x), 0.0);
        }
    }

    #[test]
    fn negative_amplitude_is_normalized() {
        let neg = CouplingProfile::new(-0.2, 0.7, Parity::Odd).unwrap();
        let pos = odd(0.2, 0.7);
        assert_eq!(neg.amplitude(), 0.2);
        for x in [-3.0, 0.4, 9.1] {
            assert_eq!(coupling_at(&neg, x), -coupling_at(&pos, x));
        }
    }

    #[test]
    fn trap_values() {
        let p = SystemParams::with_g(0.0);
        assert_eq!(trap_at(&p, 0.0), 0.0);
        assert!((trap_at(&p, 25.0) - 0.78125).abs() < 1e-15);
        let free = SystemParams::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(trap_at(&free, 13.0), 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(SystemParams::new(1.0, -0.1, 1.0).is_err());
        assert!(SystemParams::new(1.0, 0.05, 0.0).is_err());
        assert!(SystemParams::new(-1.0, 0.05, 2.41).is_ok());
    }

    #[test]
    fn vacuum_energy_and_residual() {
        let grid = make_grid(5.0, 64).unwrap();
        let fields = FieldPair::zeros(grid);
        let p = SystemParams::with_g(0.7);
        let c = odd(0.3, 0.5);
        assert_eq!(energy(&fields, &p, &c).unwrap(), 0.0);
        assert_eq!(stationary_residual(&fields, 1.234, &p, &c).unwrap(), 0.0);
        assert!(matches!(
            chemical_potential(&fields, &p, &c),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn constant_fields_on_unit_domain() {
        let grid = make_grid(0.5, 101).unwrap();
        let amp = 0.5_f64.sqrt();
        let fields = FieldPair::constant(grid, amp, amp);
        let p = SystemParams::new(1.0, 0.0, 1.0).unwrap();
        let c = CouplingProfile::new(0.0, 0.0, Parity::Even).unwrap();
        let e = energy(&fields, &p, &c).unwrap();
        assert!((e - 0.5).abs() < 1e-14, "{e}");
    }

    #[test]
    fn symmetric_uniform_state_density() {
        // N = 1, g = 0, A = 0.2: phi1 = -phi2, density 1/4 - 0.1.
        let grid = make_grid(0.5, 101).unwrap();
        let amp = 0.5_f64.sqrt();
        let fields = FieldPair::constant(grid, amp, -amp);
        let p = SystemParams::new(0.0, 0.0, 1.0).unwrap();
        let c = CouplingProfile::new(0.2, 0.0, Parity::Even).unwrap();
        let e = energy(&fields, &p, &c).unwrap();
        assert!((e - 0.15).abs() < 1e-14, "{e}");
        let mu = chemical_potential(&fields, &p, &c).unwrap();
        assert!((mu - 0.4).abs() < 1e-14, "{mu}");
        let r = stationary_residual(&fields, mu, &p, &c).unwrap();
        assert!(r < 1e-14, "{r}");
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let grid = make_grid(5.0, 32).unwrap();
        assert!(matches!(
            FieldPair::new(grid.clone(), vec![0.0; 31], vec![0.0; 32]),
            Err(Error::LengthMismatch {
                expected: 32,
                got: 31
            })
        ));
        let mut bad = FieldPair::zeros(grid);
        bad.phi2.pop();
        let p = SystemParams::with_g(0.0);
        let c = odd(0.1, 0.5);
        assert!(energy(&bad, &p, &c).is_err());
    }

    #[test]
    fn non_finite_fields_are_rejected() {
        let grid = make_grid(5.0, 32).unwrap();
        let mut phi2 = vec![0.0; 32];
        phi2[7] = f64::NAN;
        assert!(matches!(
            FieldPair::new(grid, vec![0.0; 32], phi2),
            Err(Error::NonFinite { index: 7 })
        ));
    }

    fn smooth_pair(grid: &Grid1D, c: [f64; 4]) -> FieldPair {
        let x_max = grid.x_max();
        let (p1, p2) = grid
            .nodes()
            .iter()
            .map(|&x| {
                let bump = 1.0 - (x / x_max).powi(2);
                (
                    bump * (c[0] + c[1] * (0.7 * x).sin()),
                    bump * (c[2] * (1.3 * x).cos() + c[3] * x / x_max),
                )
            })
            .unzip();
        FieldPair::new(grid.clone(), p1, p2).unwrap()
    }

    #[test]
    fn energy_gradient_matches_operator() {
        // dE / dphi_n(x_i) = 2 h (H phi)_n at interior nodes.
        let grid = make_grid(6.0, 81).unwrap();
        let p = SystemParams::new(0.6, 0.2, 1.0).unwrap();
        let c = odd(0.3, 0.8);
        let fields = smooth_pair(&grid, [0.5, 0.3, 0.4, -0.2]);
        let pot = Potentials::sample(&grid, &p, &c);
        let (h1, h2) = apply_hamiltonian(&fields, p.g, &pot);
        let h = grid.spacing();
        let eps = 1e-6;
        for i in [1, 17, 40, 63, 79] {
            for (component, analytic) in [(0, h1[i]), (1, h2[i])] {
                let shifted = |delta: f64| {
                    let mut f = fields.clone();
                    let target = if component == 0 {
                        &mut f.phi1
                    } else {
                        &mut f.phi2
                    };
                    target[i] += delta;
                    energy_with(&f, p.g, &pot)
                };
                let numeric = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
                let want = 2.0 * h * analytic;
                assert!(
                    (numeric - want).abs() < 1e-5 * want.abs().max(1e-3),
                    "node {i}: {numeric} vs {want}"
                );
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn energy_symmetries(c in proptest::array::uniform4(-1.0f64..1.0), g in -1.0f64..2.0, a in -1.0f64..1.0) {
            let grid = make_grid(8.0, 129).unwrap();
            let p = SystemParams::new(g, 0.1, 1.0).unwrap();
            let f = smooth_pair(&grid, c);
            let tol = |e: f64| 1e-12 * e.abs().max(1.0);
            for (parity, sign) in [(Parity::Odd, -1.0), (Parity::Even, 1.0)] {
                let prof = CouplingProfile::new(a, 0.6, parity).unwrap();
                let e = energy(&f, &p, &prof).unwrap();
                let mirrored = energy(&f.reflected(sign), &p, &prof).unwrap();
                proptest::prop_assert!((e - mirrored).abs() < tol(e));
                let mut flipped = f.clone();
                flipped.phi1.iter_mut().chain(flipped.phi2.iter_mut()).for_each(|v| *v = -*v);
                proptest::prop_assert!((e - energy(&flipped, &p, &prof).unwrap()).abs() < tol(e));
                proptest::prop_assert!((e - energy(&f.swapped(), &p, &prof).unwrap()).abs() < tol(e));
            }
        }
    }
}
