//! Strongly asymmetric small-coupling approximation in the harmonic trap.
//!
//! At zeroth order the state is `phi2 = 0` with `phi1` the Thomas-Fermi
//! profile. The first-order response of `phi2` and the second-order
//! correction to `phi1` are evaluated with an effective chemical potential
//! `mu_eff = mu + A^2 / (4 alpha^2)`, and both fields vanish outside
//! `x^2 < 2 mu_eff / omega^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CouplingProfile, FieldPair, Grid1D, Parity, SystemParams};

/// Sampled perturbative pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfApprox {
    pub mu_eff: f64,
    /// `sqrt(2 mu_eff) / omega`, infinite for an untrapped system.
    pub support_radius: f64,
    pub fields: FieldPair,
}

/// `mu + A^2 / (4 alpha^2)`.
pub fn effective_mu(mu: f64, amplitude: f64, wavenumber: f64) -> Result<f64> {
    if !(wavenumber > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "effective chemical potential needs a positive wavenumber, got {wavenumber}"
        )));
    }
    Ok(mu + amplitude * amplitude / (4.0 * wavenumber * wavenumber))
}

/// Chemical potential of the one-component Thomas-Fermi profile holding
/// `norm` in the trap `omega`, from `N = (4 sqrt 2 / 3) mu^(3/2) / omega`.
pub fn thomas_fermi_mu(norm: f64, omega: f64) -> f64 {
    (3.0 * omega * norm / (4.0 * std::f64::consts::SQRT_2)).powf(2.0 / 3.0)
}

/// One-component Thomas-Fermi profile `sqrt(max(0, mu - omega^2 x^2 / 2))`.
pub fn thomas_fermi_profile(grid: &Grid1D, mu: f64, omega: f64) -> Vec<f64> {
    grid.nodes()
        .iter()
        .map(|&x| (mu - 0.5 * omega * omega * x * x).max(0.0).sqrt())
        .collect()
}

/// Thomas-Fermi energy `integral of V n + n^2 / 2` with `n = max(0, mu - V)`,
/// evaluated in closed form for the trapped 1D profile.
pub fn thomas_fermi_energy(mu: f64, omega: f64) -> f64 {
    // With R = sqrt(2 mu) / omega: integral of V n = (4/15) mu^2 R and
    // integral of n^2 / 2 = (8/15) mu^2 R.
    let radius = (2.0 * mu).sqrt() / omega;
    0.8 * mu * mu * radius
}

/// Samples the perturbative pair on `grid` for the chemical potential `mu`.
///
/// Fails with [`Error::SingularDenominator`] when
/// `(g - 1)(mu_eff - omega^2 x^2 / 2) + alpha^2 / 2` changes sign or vanishes
/// inside the support, listing the grid locations where it happens.
pub fn tf_pair(
    params: &SystemParams,
    profile: &CouplingProfile,
    mu: f64,
    grid: &Grid1D,
) -> Result<TfApprox> {
    let alpha = profile.wavenumber();
    let a = if profile.is_shifted() {
        -profile.amplitude()
    } else {
        profile.amplitude()
    };
    let mu_eff = effective_mu(mu, a, alpha)?;
    if !(mu_eff > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "effective chemical potential must be positive, got {mu_eff}"
        )));
    }
    let omega = params.omega;
    let support_radius = if omega > 0.0 {
        (2.0 * mu_eff).sqrt() / omega
    } else {
        f64::INFINITY
    };
    let detuning = params.g - 1.0;
    let half_alpha2 = 0.5 * alpha * alpha;
    // Upper sign for the odd profile, lower for the even one.
    let second_order_sign = match profile.parity() {
        Parity::Odd => -1.0,
        Parity::Even => 1.0,
    };

    let nodes = grid.nodes();
    let n = nodes.len();
    let mut phi1 = vec![0.0; n];
    let mut phi2 = vec![0.0; n];
    let mut singular = Vec::new();
    let mut previous_sign = 0.0;
    for (i, &x) in nodes.iter().enumerate() {
        let local = mu_eff - 0.5 * omega * omega * x * x;
        if local <= 0.0 {
            continue;
        }
        let denom = detuning * local + half_alpha2;
        let sign = denom.signum();
        if denom.abs() <= f64::EPSILON * (detuning.abs() * local + half_alpha2)
            || (previous_sign != 0.0 && sign != previous_sign)
        {
            singular.push(x);
        }
        previous_sign = sign;
        let envelope = local.sqrt();
        let shape = match profile.parity() {
            Parity::Odd => (alpha * x).sin(),
            Parity::Even => (alpha * x).cos(),
        };
        phi2[i] = -0.5 * a * envelope / denom * shape;
        let correction = a * a / 16.0 * (2.0 * alpha * x).cos() / ((alpha * alpha + local) * denom);
        phi1[i] = envelope * (1.0 + second_order_sign * correction);
    }
    if !singular.is_empty() {
        return Err(Error::SingularDenominator {
            locations: singular,
        });
    }
    Ok(TfApprox {
        mu_eff,
        support_radius,
        fields: FieldPair {
            grid: grid.clone(),
            phi1,
            phi2,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{apply_hamiltonian, make_grid, Potentials};

    const ALPHA: f64 = 0.4624;

    fn profile(a: f64, parity: Parity) -> CouplingProfile {
        CouplingProfile::new(a, ALPHA, parity).unwrap()
    }

    #[test]
    fn effective_mu_examples() {
        assert_eq!(effective_mu(0.16, 0.0, ALPHA).unwrap(), 0.16);
        let v = effective_mu(0.16, 0.1, ALPHA).unwrap();
        assert!((v - (0.16 + 0.01 / (4.0 * ALPHA * ALPHA))).abs() < 1e-15);
        assert!((v - 0.17169).abs() < 1e-5, "{v}");
        assert!(effective_mu(0.16, 0.1, 0.0).is_err());
    }

    #[test]
    fn thomas_fermi_defaults() {
        let mu = thomas_fermi_mu(2.41, 0.05);
        assert!((mu - 0.16).abs() < 2e-4, "{mu}");
        // Norm identity inverted.
        let norm = 4.0 * std::f64::consts::SQRT_2 / 3.0 * mu.powf(1.5) / 0.05;
        assert!((norm - 2.41).abs() < 1e-12);
    }

    #[test]
    fn thomas_fermi_energy_matches_quadrature() {
        let (mu, omega) = (0.16, 0.05);
        let grid = make_grid(25.0, 200_001).unwrap();
        let values: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&x| {
                let v = 0.5 * omega * omega * x * x;
                let n = (mu - v).max(0.0);
                v * n + 0.5 * n * n
            })
            .collect();
        let quad = grid.integrate(&values);
        assert!((quad - thomas_fermi_energy(mu, omega)).abs() < 1e-8);
    }

    #[test]
    fn odd_profile_vanishes_at_center() {
        let grid = make_grid(25.0, 1023).unwrap();
        let tf = tf_pair(
            &SystemParams::with_g(2.0),
            &profile(0.01, Parity::Odd),
            0.16,
            &grid,
        )
        .unwrap();
        assert_eq!(tf.fields.phi2[511], 0.0);
        assert_eq!(grid.nodes()[511], 0.0);
    }

    #[test]
    fn even_profile_center_value() {
        let grid = make_grid(25.0, 1023).unwrap();
        let a = 0.01;
        let mu_eff = 0.17169;
        let mu = mu_eff - a * a / (4.0 * ALPHA * ALPHA);
        let tf = tf_pair(
            &SystemParams::with_g(2.0),
            &profile(a, Parity::Even),
            mu,
            &grid,
        )
        .unwrap();
        let expected = -0.005 * mu_eff.sqrt() / (mu_eff + 0.5 * ALPHA * ALPHA);
        assert!((tf.fields.phi2[511] - expected).abs() < 1e-15);
        assert!((tf.fields.phi2[511] + 7.44e-3).abs() < 1e-5);
    }

    #[test]
    fn zero_outside_support() {
        let grid = make_grid(25.0, 1024).unwrap();
        for parity in [Parity::Odd, Parity::Even] {
            let tf = tf_pair(
                &SystemParams::with_g(2.0),
                &profile(0.1, parity),
                0.16,
                &grid,
            )
            .unwrap();
            for (i, &x) in grid.nodes().iter().enumerate() {
                if x.abs() > tf.support_radius {
                    assert_eq!((tf.fields.phi1[i], tf.fields.phi2[i]), (0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn parity_inheritance() {
        let grid = make_grid(25.0, 1024).unwrap();
        let p = SystemParams::with_g(2.0);
        let odd = tf_pair(&p, &profile(0.1, Parity::Odd), 0.16, &grid)
            .unwrap()
            .fields;
        let even = tf_pair(&p, &profile(0.1, Parity::Even), 0.16, &grid)
            .unwrap()
            .fields;
        let n = grid.n_points();
        for i in 0..n {
            let j = n - 1 - i;
            assert!((odd.phi1[i] - odd.phi1[j]).abs() < 1e-12);
            assert!((odd.phi2[i] + odd.phi2[j]).abs() < 1e-12);
            assert!((even.phi1[i] - even.phi1[j]).abs() < 1e-12);
            assert!((even.phi2[i] - even.phi2[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_denominator_is_reported() {
        // g < 1 with a wavenumber small enough that (g-1)(mu_eff - V) + alpha^2/2
        // crosses zero inside the support.
        let grid = make_grid(25.0, 512).unwrap();
        let prof = CouplingProfile::new(0.01, 0.2, Parity::Odd).unwrap();
        let err = tf_pair(&SystemParams::with_g(0.0), &prof, 0.16, &grid).unwrap_err();
        match err {
            Error::SingularDenominator { locations } => {
                assert_eq!(locations.len(), 2);
                // Crossing where mu_eff - V = alpha^2 / 2.
                let mu_eff = effective_mu(0.16, 0.01, 0.2).unwrap();
                let x_star = (2.0 * (mu_eff - 0.02)).sqrt() / 0.05;
                for x in locations {
                    assert!((x.abs() - x_star).abs() < 2.0 * grid.spacing());
                }
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn dip_correction_sign_at_center() {
        // Where the phi2 denominator stays positive, the odd-profile correction
        // lowers phi1 at the center below the TF envelope.
        let grid = make_grid(25.0, 1023).unwrap();
        let cases = [
            (2.0 / 3.0, ALPHA),
            (-1.0, 2.0 * ALPHA),
            (0.0, 2.0 * ALPHA),
            (2.0 / 3.0, 2.0 * ALPHA),
        ];
        for (g, alpha) in cases {
            let prof = CouplingProfile::new(0.1, alpha, Parity::Odd).unwrap();
            let tf = tf_pair(&SystemParams::with_g(g), &prof, 0.16, &grid).unwrap();
            let envelope = tf.mu_eff.sqrt();
            assert!(tf.fields.phi1[511] < envelope, "g = {g}, alpha = {alpha}");
        }
        // The even profile has the opposite sign in front of the correction.
        let prof = CouplingProfile::new(0.1, ALPHA, Parity::Even).unwrap();
        let tf = tf_pair(&SystemParams::with_g(2.0 / 3.0), &prof, 0.16, &grid).unwrap();
        assert!(tf.fields.phi1[511] > tf.mu_eff.sqrt());
    }

    /// Max residual of each stationary equation over `|x| < limit`, with `mu_eff`
    /// as the eigenvalue.
    fn component_residuals(p: &SystemParams, prof: &CouplingProfile, limit: f64) -> (f64, f64) {
        let grid = make_grid(25.0, 4096).unwrap();
        let tf = tf_pair(p, prof, 0.16, &grid).unwrap();
        let pot = Potentials::sample(&grid, p, prof);
        let (h1, h2) = apply_hamiltonian(&tf.fields, p.g, &pot);
        let n = grid.n_points();
        (1..n - 1).filter(|&i| grid.nodes()[i].abs() < limit).fold(
            (0.0_f64, 0.0_f64),
            |(r1, r2), i| {
                (
                    r1.max((h1[i] - tf.mu_eff * tf.fields.phi1[i]).abs()),
                    r2.max((h2[i] - tf.mu_eff * tf.fields.phi2[i]).abs()),
                )
            },
        )
    }

    #[test]
    fn residual_scaling_untrapped() {
        // Without the trap the envelope is flat: halving A divides the phi2
        // residual by 8 and the phi1 residual by 4.
        let p = SystemParams::new(2.0, 0.0, 2.41).unwrap();
        for parity in [Parity::Odd, Parity::Even] {
            let (a1, a2) = component_residuals(&p, &profile(0.02, parity), 20.0);
            let (b1, b2) = component_residuals(&p, &profile(0.01, parity), 20.0);
            assert!((a2 / b2 - 8.0).abs() < 0.2, "{parity}: {}", a2 / b2);
            assert!((a1 / b1 - 4.0).abs() < 0.1, "{parity}: {}", a1 / b1);
        }
    }

    #[test]
    fn residual_scaling_trapped() {
        // In the trap the neglected envelope curvature leaves an O(A) phi2
        // residual and an A-independent phi1 residual.
        let p = SystemParams::with_g(2.0);
        let limit = 0.8 * (2.0 * 0.16_f64).sqrt() / p.omega;
        let (a1, a2) = component_residuals(&p, &profile(0.02, Parity::Odd), limit);
        let (b1, b2) = component_residuals(&p, &profile(0.01, Parity::Odd), limit);
        assert!((a2 / b2 - 2.0).abs() < 0.1, "{}", a2 / b2);
        assert!((a1 / b1 - 1.0).abs() < 0.1, "{}", a1 / b1);
    }
}
