//! Obstructions to the glued manifold being holomorphic Lagrangian: volume
//! pairings against `[omega_2 + i omega_3]^n`, the homology-class test, and the
//! parity of the first Betti number.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foundations::{AngleClass, Direction, Tolerance};
use crate::quiver::{first_betti, SummandExpression};

/// `e^{i n theta} V`, exact when `n theta` is a quarter turn.
pub fn pairing_volume(theta: AngleClass, n: usize, volume: f64) -> Complex64 {
    let scaled = AngleClass::new(theta.num() * n as i64, theta.den()).expect("positive denominator");
    let (c, s) = scaled.cos_sin();
    Complex64::new(c * volume, s * volume)
}

/// The `k in 1..=2n` with `sigma = sigma(k pi / n)`, or `None` when no special
/// Lagrangian can be `sigma`-holomorphic Lagrangian.
pub fn sl_sigma_candidates(sigma: &Direction, n: usize, tol: &Tolerance) -> Option<usize> {
    let v = sigma.vector();
    if v[0].abs() > tol.geom || n == 0 {
        return None;
    }
    let theta = v[2].atan2(v[1]).rem_euclid(std::f64::consts::TAU);
    let step = std::f64::consts::PI / n as f64;
    let k = (theta / step).round();
    if (theta - k * step).abs() > tol.geom {
        return None;
    }
    let k = (k as usize) % (2 * n);
    Some(if k == 0 { 2 * n } else { k })
}

/// A summand calibrated in direction `sigma(k pi / n)` with volume `V`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibratedSummand {
    pub theta: AngleClass,
    /// `(-1)^k` unless overridden.
    pub epsilon: i8,
    pub volume: f64,
}

impl CalibratedSummand {
    pub fn new(theta: AngleClass, n: usize, volume: f64) -> Result<Self> {
        let k = summand_index(theta, n)?;
        if !(volume.is_finite() && volume > 0.0) {
            return Err(Error::NonPositiveVolume(volume));
        }
        Ok(CalibratedSummand {
            theta,
            epsilon: if k % 2 == 0 { 1 } else { -1 },
            volume,
        })
    }

    /// Bypasses the orientation convention; `hl_obstruction` rejects
    /// inconsistent signs.
    pub fn with_epsilon(theta: AngleClass, epsilon: i8, volume: f64) -> Self {
        CalibratedSummand { theta, epsilon, volume }
    }
}

/// `k in 1..=2n` with `theta = k pi / n`.
fn summand_index(theta: AngleClass, n: usize) -> Result<i64> {
    let k = theta.as_multiple_of(n as i64).ok_or_else(|| Error::AngleNotMultiple {
        vertex: "summand".into(),
        angle: theta.to_string(),
        n,
    })?;
    Ok(if k == 0 { 2 * n as i64 } else { k })
}

/// `(-1)^d cos^n(d pi / n)`; equals 1 exactly when `d` is a multiple of `n`.
pub fn homology_term(d: i64, n: usize) -> f64 {
    let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * (d as f64 * std::f64::consts::PI / n as f64).cos().powi(n as i32)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum HlVerdict {
    /// No direction `sigma(k pi / n)` admits a holomorphic Lagrangian representative.
    NeverHl,
    /// Directions `k pi / n` not excluded by the homology class.
    Candidates { ks: Vec<usize> },
}

/// Homology-class obstruction: a `sigma(k pi / n)`-holomorphic Lagrangian
/// representative forces `k - k_a` to be a multiple of `n` for every summand.
/// The pairing identities behind the test are re-evaluated numerically and
/// must agree with the exact congruences.
pub fn hl_obstruction(summands: &[CalibratedSummand], n: usize) -> Result<HlVerdict> {
    if summands.is_empty() {
        return Err(Error::EmptySummands);
    }
    if n == 0 {
        return Err(Error::DimensionTooSmall(0));
    }
    let mut ks = Vec::with_capacity(summands.len());
    for s in summands {
        let k = summand_index(s.theta, n)?;
        let expected = if k % 2 == 0 { 1 } else { -1 };
        if s.epsilon != expected {
            return Err(Error::InconsistentSign { k, sign: s.epsilon });
        }
        if !(s.volume.is_finite() && s.volume > 0.0) {
            return Err(Error::NonPositiveVolume(s.volume));
        }
        ks.push(k);
    }
    let total: f64 = summands.iter().map(|s| s.volume).sum();
    let eps = 1e-9 * total;
    let signed: Complex64 = summands
        .iter()
        .map(|s| pairing_volume(s.theta, n, s.volume) * s.epsilon as f64)
        .sum();
    if (signed - Complex64::new(total, 0.0)).norm() > eps {
        return Err(Error::IdentityViolated(format!(
            "signed pairing {signed} differs from total volume {total}"
        )));
    }
    let mut passing = Vec::new();
    for k in 1..=2 * n as i64 {
        let passes = ks.iter().all(|&ka| (k - ka).rem_euclid(n as i64) == 0);
        let projected: f64 = summands
            .iter()
            .zip(&ks)
            .map(|(s, &ka)| homology_term(k - ka, n) * s.volume)
            .sum();
        if ((projected - total).abs() <= eps) != passes {
            return Err(Error::IdentityViolated(format!(
                "direction k = {k}: projected volume {projected} vs total {total}"
            )));
        }
        if passes {
            passing.push(k as usize);
        }
    }
    Ok(if passing.is_empty() {
        HlVerdict::NeverHl
    } else {
        HlVerdict::Candidates { ks: passing }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityVerdict {
    /// Odd first Betti number: no Kähler, hence no holomorphic Lagrangian, structure.
    NeverHlByParity,
    Inconclusive,
}

pub fn parity_obstruction(e: &SummandExpression) -> Result<ParityVerdict> {
    Ok(if first_betti(e)? % 2 == 1 {
        ParityVerdict::NeverHlByParity
    } else {
        ParityVerdict::Inconclusive
    })
}
