use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances shared by the floating-point checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Relative tolerance for geometric decisions in ImH (x) t*.
    pub geom: f64,
    /// Branch tolerance for eigenvalue arguments and angle sums.
    pub angle: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            geom: 1e-9,
            angle: 1e-7,
        }
    }
}

impl Tolerance {
    pub fn with_geom(geom: f64) -> Self {
        Tolerance {
            geom,
            ..Tolerance::default()
        }
    }

    /// Absolute threshold for quantities of size `scale`.
    pub fn abs(&self, scale: f64) -> f64 {
        self.geom * scale.max(1.0)
    }
}

/// A vector in ImH = R^3 (components along i, j, k).
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct ImVector(pub [f64; 3]);

impl ImVector {
    pub const ZERO: ImVector = ImVector([0.0; 3]);

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        ImVector([x, y, z])
    }

    pub fn dot(&self, other: &ImVector) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn cross(&self, o: &ImVector) -> ImVector {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = o.0;
        ImVector([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Component of `self` orthogonal to the unit vector `dir`.
    pub fn reject(&self, dir: &Direction) -> ImVector {
        *self - dir.0 * self.dot(&dir.0)
    }
}

impl Index<usize> for ImVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for ImVector {
    type Output = ImVector;
    fn add(self, o: ImVector) -> ImVector {
        ImVector([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for ImVector {
    type Output = ImVector;
    fn sub(self, o: ImVector) -> ImVector {
        ImVector([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for ImVector {
    type Output = ImVector;
    fn neg(self) -> ImVector {
        ImVector([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<f64> for ImVector {
    type Output = ImVector;
    fn mul(self, s: f64) -> ImVector {
        ImVector([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// A unit vector in ImH.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ImVector", into = "ImVector")]
pub struct Direction(ImVector);

impl Direction {
    /// Accepts `v` if `|v| = 1` within `tol`; the stored vector is renormalized.
    pub fn new(v: ImVector, tol: f64) -> Result<Self> {
        let norm = v.norm();
        if !v.is_finite() || (norm - 1.0).abs() > tol {
            return Err(Error::NonUnit { norm });
        }
        Ok(Direction(v * (1.0 / norm)))
    }

    /// Normalizes any nonzero finite vector.
    pub fn normalize(v: ImVector) -> Result<Self> {
        let norm = v.norm();
        if !v.is_finite() || norm == 0.0 {
            return Err(Error::NonUnit { norm });
        }
        Ok(Direction(v * (1.0 / norm)))
    }

    pub fn vector(&self) -> ImVector {
        self.0
    }

    pub fn flipped(&self) -> Direction {
        Direction(-self.0)
    }

    /// Completes `self` to a positively oriented orthonormal frame `(sigma, sigma', sigma'')`.
    pub fn complete_frame(&self) -> (ImVector, ImVector) {
        let s = self.0;
        let axis = (0..3)
            .min_by(|&a, &b| s[a].abs().total_cmp(&s[b].abs()))
            .unwrap_or(0);
        let mut e = [0.0; 3];
        e[axis] = 1.0;
        let first = s.cross(&ImVector(e));
        let first = first * (1.0 / first.norm());
        let second = s.cross(&first);
        (first, second)
    }
}

impl TryFrom<ImVector> for Direction {
    type Error = Error;
    fn try_from(v: ImVector) -> Result<Self> {
        Direction::new(v, 1e-9)
    }
}

impl From<Direction> for ImVector {
    fn from(d: Direction) -> ImVector {
        d.0
    }
}

/// An element of ImH (x) (t^n)^*: one ImH vector per torus coordinate.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct FlatVector(pub Vec<ImVector>);

impl FlatVector {
    pub fn zeros(n: usize) -> Self {
        FlatVector(vec![ImVector::ZERO; n])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// `sigma (x) x = (x_1 sigma, ..., x_n sigma)`.
    pub fn tensor(sigma: ImVector, x: &[f64]) -> Self {
        FlatVector(x.iter().map(|&t| sigma * t).collect())
    }

    /// Pairing `<y, u> = sum_a u_a y_a` with an integer vector.
    pub fn pair(&self, u: &[i64]) -> ImVector {
        self.0
            .iter()
            .zip(u)
            .fold(ImVector::ZERO, |acc, (y, &c)| acc + *y * c as f64)
    }

    pub fn max_norm(&self) -> f64 {
        self.0.iter().map(ImVector::norm).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &FlatVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (*a - *b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &FlatVector {
    type Output = FlatVector;
    fn add(self, o: &FlatVector) -> FlatVector {
        FlatVector(self.0.iter().zip(&o.0).map(|(a, b)| *a + *b).collect())
    }
}

impl Sub for &FlatVector {
    type Output = FlatVector;
    fn sub(self, o: &FlatVector) -> FlatVector {
        FlatVector(self.0.iter().zip(&o.0).map(|(a, b)| *a - *b).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_is_positive_orthonormal() {
        for v in [
            ImVector::new(1.0, 0.0, 0.0),
            ImVector::new(0.0, 0.6, 0.8),
            ImVector::new(-0.48, 0.6, 0.64),
        ] {
            let d = Direction::normalize(v).unwrap();
            let (a, b) = d.complete_frame();
            let s = d.vector();
            assert!(s.dot(&a).abs() < 1e-15 && s.dot(&b).abs() < 1e-15 && a.dot(&b).abs() < 1e-15);
            assert!((a.norm() - 1.0).abs() < 1e-15 && (b.norm() - 1.0).abs() < 1e-15);
            assert!((s.cross(&a).dot(&b) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn direction_rejects_non_unit() {
        assert!(Direction::new(ImVector::new(0.0, 2.0, 0.0), 1e-9).is_err());
        assert!(Direction::normalize(ImVector::ZERO).is_err());
    }

    #[test]
    fn pairing() {
        let y = FlatVector(vec![ImVector::new(1.0, 2.0, 3.0), ImVector::new(0.0, 1.0, 0.0)]);
        assert_eq!(y.pair(&[2, -1]), ImVector::new(2.0, 3.0, 6.0));
    }
}
