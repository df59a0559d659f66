//! Uniform states of the untrapped system with constant coupling `A`.
//!
//! For a fixed total density `N = phi1^2 + phi2^2` the Hamiltonian density is
//! `1/2 (phi1^4 + phi2^4) + g phi1^2 phi2^2 + A phi1 phi2`. Two families of
//! stationary uniform states exist: the symmetric one, with equal densities
//! and the relative sign locked against `A`, and the asymmetric one, which
//! exists only when `|g - 1| > |A| / N`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UniformLabel {
    Symmetric,
    Asymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformState {
    pub phi1: f64,
    pub phi2: f64,
    pub mu: f64,
    pub h_density: f64,
    pub label: UniformLabel,
    /// Set when the selection is a tie between the two families (`g = 1`) or
    /// when the brute-force landscape is flat.
    #[serde(default)]
    pub degenerate: bool,
}

/// Reason the asymmetric family does not provide a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymmetricAbsent {
    /// `|g - 1| <= |A| / N`.
    ExistenceConditionFails,
    /// `g = 1` and `A = 0`: the asymmetric branch merges into the degenerate
    /// circle of states with equal energy.
    MergesWithSymmetric,
}

/// Hamiltonian density of a uniform state.
#[inline]
pub fn hamiltonian_density(phi1: f64, phi2: f64, g: f64, a: f64) -> f64 {
    let (p, q) = (phi1 * phi1, phi2 * phi2);
    0.5 * (p * p + q * q) + g * p * q + a * phi1 * phi2
}

/// Sign function with `sgn(0) = 0`.
fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Symmetric state `phi1 = -sgn(A) phi2`, `phi1^2 = phi2^2 = N/2`.
///
/// At `A = 0` the relative sign is free; the positive product is returned.
pub fn uniform_symmetric(density: f64, g: f64, a: f64) -> UniformState {
    let amp = (0.5 * density).sqrt();
    let product_sign = if a == 0.0 { 1.0 } else { -sgn(a) };
    UniformState {
        phi1: amp,
        phi2: product_sign * amp,
        mu: 0.5 * (1.0 + g) * density - 0.5 * a.abs(),
        h_density: 0.25 * (g + 1.0) * density * density - 0.5 * density * a.abs(),
        label: UniformLabel::Symmetric,
        degenerate: false,
    }
}

/// The symmetric state with the opposite (energetically unfavourable) sign locking.
pub fn uniform_symmetric_antilocked(density: f64, g: f64, a: f64) -> UniformState {
    let amp = (0.5 * density).sqrt();
    let product_sign = if a == 0.0 { -1.0 } else { sgn(a) };
    let (phi1, phi2) = (amp, product_sign * amp);
    UniformState {
        phi1,
        phi2,
        mu: 0.5 * (1.0 + g) * density + 0.5 * a.abs(),
        h_density: hamiltonian_density(phi1, phi2, g, a),
        label: UniformLabel::Symmetric,
        degenerate: false,
    }
}

/// Asymmetric state with `phi1^2 > phi2^2`.
pub fn uniform_asymmetric(density: f64, g: f64, a: f64) -> Result<UniformState, AsymmetricAbsent> {
    let detuning = g - 1.0;
    if detuning == 0.0 {
        return Err(if a == 0.0 {
            AsymmetricAbsent::MergesWithSymmetric
        } else {
            AsymmetricAbsent::ExistenceConditionFails
        });
    }
    if detuning.abs() <= a.abs() / density {
        return Err(AsymmetricAbsent::ExistenceConditionFails);
    }
    let root = (density * density - (a / detuning).powi(2)).sqrt();
    let major = (0.5 * (density + root)).sqrt();
    let minor = (0.5 * (density - root)).max(0.0).sqrt();
    let product_sign = if a == 0.0 { 1.0 } else { -sgn(detuning * a) };
    Ok(UniformState {
        phi1: major,
        phi2: product_sign * minor,
        mu: density,
        h_density: 0.5 * density * density - 0.25 * a * a / detuning,
        label: UniformLabel::Asymmetric,
        degenerate: false,
    })
}

/// Lower-energy uniform state. At `g = 1` the symmetric state is returned with
/// `degenerate` set.
pub fn uniform_ground_state(density: f64, g: f64, a: f64) -> UniformState {
    let mut symmetric = uniform_symmetric(density, g, a);
    if g == 1.0 {
        symmetric.degenerate = true;
        return symmetric;
    }
    match uniform_asymmetric(density, g, a) {
        Ok(asym) if asym.h_density < symmetric.h_density => asym,
        _ => symmetric,
    }
}

/// Relative density imbalance `|phi1^2 - phi2^2| / N` below which a
/// brute-force minimizer is labelled symmetric. Where the asymmetric branch
/// merges with the symmetric state the minimum is quartic, and its location
/// is resolved only to about `eps^(1/4)`.
pub const SYMMETRIC_IMBALANCE_TOL: f64 = 1e-3;

/// Scans `phi1 = sqrt(N) cos t`, `phi2 = sqrt(N) sin t` over `t in [0, 2 pi)`
/// and returns the minimizer of the Hamiltonian density, refined by a
/// golden-section search inside the best scan cell.
pub fn uniform_brute_force(density: f64, g: f64, a: f64, resolution: usize) -> UniformState {
    let resolution = resolution.max(1000);
    let root_n = density.sqrt();
    let h_at = |t: f64| hamiltonian_density(root_n * t.cos(), root_n * t.sin(), g, a);
    let step = std::f64::consts::TAU / resolution as f64;

    let mut best_t = 0.0;
    let mut best_h = f64::INFINITY;
    let mut worst_h = f64::NEG_INFINITY;
    // Angle-addition recurrence, re-anchored to exact values every block.
    const BLOCK: usize = 1024;
    let (ds, dc) = step.sin_cos();
    for start in (0..resolution).step_by(BLOCK) {
        let (mut s, mut c) = (start as f64 * step).sin_cos();
        for k in start..(start + BLOCK).min(resolution) {
            let h = hamiltonian_density(root_n * c, root_n * s, g, a);
            if h < best_h {
                best_h = h;
                best_t = k as f64 * step;
            }
            worst_h = worst_h.max(h);
            (s, c) = (s * dc + c * ds, c * dc - s * ds);
        }
    }

    let flat = worst_h - best_h <= 1e-12 * best_h.abs().max(1.0);
    if !flat {
        let (t, h) = golden_section(h_at, best_t - step, best_t + step, 1e-13);
        if h < best_h {
            best_h = h;
            best_t = t;
        }
    }

    let (phi1, phi2) = (root_n * best_t.cos(), root_n * best_t.sin());
    let imbalance = (phi1 * phi1 - phi2 * phi2).abs() / density;
    let label = if imbalance < SYMMETRIC_IMBALANCE_TOL {
        UniformLabel::Symmetric
    } else {
        UniformLabel::Asymmetric
    };
    // Rayleigh quotient of the uniform stationary equations.
    let (p, q) = (phi1 * phi1, phi2 * phi2);
    let mu = (p * p + q * q + 2.0 * g * p * q + a * phi1 * phi2) / density;
    UniformState {
        phi1,
        phi2,
        mu,
        h_density: best_h,
        label,
        degenerate: flat,
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let ratio = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    let t = 0.5 * (lo + hi);
    (t, f(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn symmetric_examples() {
        let s = uniform_symmetric(1.0, 0.0, 0.2);
        assert!(close(s.mu, 0.4, 1e-15) && close(s.h_density, 0.15, 1e-15));
        assert!(s.phi1 * s.phi2 < 0.0);

        let s = uniform_symmetric(1.0, 1.0, 0.0);
        assert!(close(s.mu, 1.0, 1e-15) && close(s.h_density, 0.5, 1e-15));
        assert!(s.phi1 * s.phi2 > 0.0);

        let s = uniform_symmetric(2.0, 2.0 / 3.0, 1.0);
        assert!(close(s.mu, 7.0 / 6.0, 1e-14), "{}", s.mu);
        assert!(close(s.h_density, 2.0 / 3.0, 1e-14), "{}", s.h_density);
        assert!(close(
            s.h_density,
            hamiltonian_density(s.phi1, s.phi2, 2.0 / 3.0, 1.0),
            1e-14
        ));
    }

    #[test]
    fn asymmetric_examples() {
        let s = uniform_asymmetric(1.0, 2.0, 0.1).unwrap();
        assert!(close(s.phi1 * s.phi1, 0.997_493_7, 1e-6));
        assert!(close(s.phi2 * s.phi2, 0.002_506_3, 1e-6));
        assert!(close(s.h_density, 0.4975, 1e-14));
        assert_eq!(s.mu, 1.0);
        // sgn(phi1 phi2) = -sgn((g - 1) A)
        assert!(s.phi1 * s.phi2 < 0.0);
        assert!(close(
            s.h_density,
            hamiltonian_density(s.phi1, s.phi2, 2.0, 0.1),
            1e-14
        ));

        assert_eq!(
            uniform_asymmetric(1.0, 2.0, 1.5),
            Err(AsymmetricAbsent::ExistenceConditionFails)
        );

        let s = uniform_asymmetric(1.0, 2.0, 0.0).unwrap();
        assert_eq!((s.phi1 * s.phi1, s.phi2), (1.0, 0.0));
        assert!(close(s.h_density, 0.5, 1e-15));
    }

    #[test]
    fn asymmetric_absent_at_unit_g() {
        assert_eq!(
            uniform_asymmetric(1.0, 1.0, 0.3),
            Err(AsymmetricAbsent::ExistenceConditionFails)
        );
        assert_eq!(
            uniform_asymmetric(1.0, 1.0, 0.0),
            Err(AsymmetricAbsent::MergesWithSymmetric)
        );
    }

    #[test]
    fn asymmetric_sign_locking_below_unit_g() {
        // g < 1: sgn(phi1 phi2) = -sgn((g-1) A) = +1 for A > 0.
        let s = uniform_asymmetric(1.0, -1.0, 0.5).unwrap();
        assert!(s.phi1 * s.phi2 > 0.0);
    }

    #[test]
    fn ground_state_selection() {
        let s = uniform_ground_state(1.0, 2.0, 0.1);
        assert_eq!(s.label, UniformLabel::Asymmetric);
        assert!(close(s.h_density, 0.4975, 1e-14));
        assert!(close(
            uniform_symmetric(1.0, 2.0, 0.1).h_density,
            0.70,
            1e-14
        ));

        assert_eq!(
            uniform_ground_state(1.0, 0.0, 0.1).label,
            UniformLabel::Symmetric
        );

        for a in [0.0, 0.3, 1.7] {
            let s = uniform_ground_state(1.0, 1.0, a);
            assert_eq!(s.label, UniformLabel::Symmetric);
            assert!(s.degenerate);
        }
    }

    #[test]
    fn brute_force_examples() {
        let s = uniform_brute_force(1.0, 2.0, 0.1, 1_000_000);
        assert!(close(s.h_density, 0.4975, 1e-6));
        assert_eq!(s.label, UniformLabel::Asymmetric);

        let s = uniform_brute_force(1.0, 0.0, 0.2, 1_000_000);
        assert!(close(s.h_density, 0.15, 1e-6));
        assert_eq!(s.label, UniformLabel::Symmetric);

        let s = uniform_brute_force(1.0, 1.0, 0.0, 10_000);
        assert!(close(s.h_density, 0.5, 1e-12));
        assert!(s.degenerate);
    }

    #[test]
    fn antilocked_symmetric_is_higher() {
        for a in [0.05, 0.7, -0.4] {
            let good = uniform_symmetric(1.3, 0.4, a);
            let bad = uniform_symmetric_antilocked(1.3, 0.4, a);
            assert!(bad.h_density > good.h_density);
            assert!(close(
                good.h_density,
                hamiltonian_density(good.phi1, good.phi2, 0.4, a),
                1e-14
            ));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn ground_state_matches_oracle(n in 0.1f64..5.0, g in -2.0f64..3.0, a in 0.0f64..2.0) {
            let exact = uniform_ground_state(n, g, a);
            let oracle = uniform_brute_force(n, g, a, 20_000);
            prop_assert!((exact.h_density - oracle.h_density).abs() < 1e-5,
                "exact {} oracle {}", exact.h_density, oracle.h_density);
        }

        #[test]
        fn label_depends_only_on_detuning_sign(n in 0.1f64..5.0, g in -2.0f64..3.0, frac in 0.0f64..0.999) {
            prop_assume!((g - 1.0).abs() > 1e-9);
            let a = frac * (g - 1.0).abs() * n;
            let expected = if g > 1.0 { UniformLabel::Asymmetric } else { UniformLabel::Symmetric };
            prop_assert_eq!(uniform_ground_state(n, g, a).label, expected);
        }

        #[test]
        fn states_conserve_density(n in 0.1f64..5.0, g in -2.0f64..3.0, a in -2.0f64..2.0) {
            let s = uniform_symmetric(n, g, a);
            prop_assert!(((s.phi1 * s.phi1 + s.phi2 * s.phi2) - n).abs() <= 1e-12 * n);
            if let Ok(s) = uniform_asymmetric(n, g, a) {
                prop_assert!(((s.phi1 * s.phi1 + s.phi2 * s.phi2) - n).abs() <= 1e-12 * n);
                if a != 0.0 {
                    prop_assert_eq!((s.phi1 * s.phi2).signum(), -((g - 1.0) * a).signum());
                }
            }
        }
    }
}
