//! Kink (dark soliton) counting in the sign-changing component.
//!
//! `phi2` is split into lobes of constant sign. A lobe whose peak `|phi2|`
//! stays below the threshold is treated as numerical sign flicker and fused
//! into its neighbours, removing its bounding zero crossings. The remaining
//! crossings are the kinks.

use serde::{Deserialize, Serialize};

use crate::model::{CouplingProfile, FieldPair, Parity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdReference {
    /// Fraction of `max |phi1|`.
    MaxPhi1,
    /// Fixed amplitude.
    AbsoluteValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KinkThresholdConfig {
    pub relative_threshold: f64,
    pub reference: ThresholdReference,
    pub absolute_value: f64,
}

impl Default for KinkThresholdConfig {
    fn default() -> Self {
        Self {
            relative_threshold: 0.05,
            reference: ThresholdReference::MaxPhi1,
            absolute_value: 0.02,
        }
    }
}

impl KinkThresholdConfig {
    pub fn relative(fraction: f64) -> Self {
        Self {
            relative_threshold: fraction,
            ..Self::default()
        }
    }

    pub fn absolute(value: f64) -> Self {
        Self {
            reference: ThresholdReference::AbsoluteValue,
            absolute_value: value,
            ..Self::default()
        }
    }

    fn threshold(&self, fields: &FieldPair) -> f64 {
        match self.reference {
            ThresholdReference::MaxPhi1 => self.relative_threshold * fields.max_abs().0,
            ThresholdReference::AbsoluteValue => self.absolute_value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinkReport {
    pub count: usize,
    /// Zero-crossing locations, linearly interpolated between nodes.
    pub positions: Vec<f64>,
    pub threshold_used: f64,
    /// `None` when no coupling profile was supplied.
    pub parity_consistent: Option<bool>,
}

impl KinkReport {
    /// Fills in `parity_consistent` for the given modulation.
    pub fn with_parity(mut self, profile: &CouplingProfile) -> Self {
        let odd_count = self.count % 2 == 1;
        self.parity_consistent = Some(odd_count == (parity_of(profile) == Parity::Odd));
        self
    }
}

pub fn parity_of(profile: &CouplingProfile) -> Parity {
    profile.parity()
}

#[derive(Debug, Clone, Copy)]
struct Lobe {
    peak: f64,
}

/// Counts thresholded kinks of `phi2`.
pub fn count_kinks(fields: &FieldPair, cfg: &KinkThresholdConfig) -> KinkReport {
    let threshold = cfg.threshold(fields);
    let (lobes, crossings) = split_lobes(&fields.phi2, fields.grid.nodes());
    let (_, kept) = merge_lobes(lobes, crossings, threshold);
    KinkReport {
        count: kept.len(),
        positions: kept,
        threshold_used: threshold,
        parity_consistent: None,
    }
}

/// Splits a sampled function into constant-sign lobes separated by crossings.
///
/// Values with magnitude at or below `10 eps max|phi|` are treated as zero
/// and never start a new lobe.
fn split_lobes(phi: &[f64], nodes: &[f64]) -> (Vec<Lobe>, Vec<f64>) {
    let max = phi.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let floor = 10.0 * f64::EPSILON * max;
    let mut lobes = Vec::new();
    let mut crossings = Vec::new();
    if max == 0.0 {
        return (lobes, crossings);
    }

    // (index, sign) of the last node above the floor.
    let mut last: Option<(usize, f64)> = None;
    let mut peak = 0.0_f64;
    for (i, &v) in phi.iter().enumerate() {
        if v.abs() <= floor {
            continue;
        }
        let sign = v.signum();
        if let Some((j, s)) = last {
            if s != sign {
                lobes.push(Lobe { peak });
                peak = 0.0;
                // Linear interpolation between the bracketing significant nodes.
                let (xa, xb, va) = (nodes[j], nodes[i], phi[j]);
                let t = va / (va - v);
                crossings.push(xa + t * (xb - xa));
            }
        }
        peak = peak.max(v.abs());
        last = Some((i, sign));
    }
    lobes.push(Lobe { peak });
    (lobes, crossings)
}

/// Repeatedly fuses the smallest sub-threshold lobe into its neighbours.
///
/// An interior lobe loses both bounding crossings (its neighbours share a
/// sign and become one lobe); an edge lobe loses its single crossing.
fn merge_lobes(
    mut lobes: Vec<Lobe>,
    mut crossings: Vec<f64>,
    threshold: f64,
) -> (Vec<Lobe>, Vec<f64>) {
    while lobes.len() > 1 {
        let (idx, smallest) =
            lobes
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |(bi, bp), (i, l)| {
                    if l.peak < bp {
                        (i, l.peak)
                    } else {
                        (bi, bp)
                    }
                });
        if smallest >= threshold {
            break;
        }
        let last = lobes.len() - 1;
        if idx == 0 {
            lobes.remove(0);
            crossings.remove(0);
        } else if idx == last {
            lobes.pop();
            crossings.pop();
        } else {
            let merged = lobes[idx - 1].peak.max(lobes[idx + 1].peak);
            lobes[idx - 1].peak = merged;
            lobes.drain(idx..=idx + 1);
            crossings.drain(idx - 1..=idx);
        }
    }
    (lobes, crossings)
}
