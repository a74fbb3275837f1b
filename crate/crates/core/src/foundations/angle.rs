use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::ImVector;
use crate::error::{Error, Result};

/// An angle `num * pi / den`, reduced and normalized into `[0, 2 pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawAngle", into = "RawAngle")]
pub struct AngleClass {
    num: i64,
    den: i64,
}

#[derive(Serialize, Deserialize)]
struct RawAngle {
    num: i64,
    den: i64,
}

impl TryFrom<RawAngle> for AngleClass {
    type Error = Error;
    fn try_from(raw: RawAngle) -> Result<Self> {
        AngleClass::new(raw.num, raw.den)
    }
}

impl From<AngleClass> for RawAngle {
    fn from(a: AngleClass) -> Self {
        RawAngle {
            num: a.num,
            den: a.den,
        }
    }
}

impl AngleClass {
    pub const ZERO: AngleClass = AngleClass { num: 0, den: 1 };
    pub const PI: AngleClass = AngleClass { num: 1, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den <= 0 {
            return Err(Error::InvalidAngle(den));
        }
        Ok(Self::normalized(num as i128, den as i128))
    }

    /// `k * pi / n`.
    pub fn pi_multiple(k: i64, n: i64) -> Result<Self> {
        Self::new(k, n)
    }

    fn normalized(num: i128, den: i128) -> Self {
        let g = num.gcd(&den).max(1);
        let (num, den) = (num / g, den / g);
        let num = num.rem_euclid(2 * den);
        AngleClass {
            num: num as i64,
            den: den as i64,
        }
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    pub fn radians(self) -> f64 {
        self.num as f64 * PI / self.den as f64
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// Half of the representative in `[0, 2 pi)`, so the result lies in `[0, pi)`.
    pub fn half(self) -> Self {
        Self::normalized(self.num as i128, 2 * self.den as i128)
    }

    /// `k` with `self = k pi / n` and `0 <= k < 2n`, if `self` is a multiple of `pi / n`.
    pub fn as_multiple_of(self, n: i64) -> Option<i64> {
        if n <= 0 || n % self.den != 0 {
            return None;
        }
        Some(self.num * (n / self.den))
    }

    /// Snap a real angle to the nearest `num pi / den` with `den <= max_den`.
    pub fn snap(radians: f64, max_den: i64, tol: f64) -> Result<Self> {
        if radians.is_finite() {
            for den in 1..=max_den.max(1) {
                let k = (radians * den as f64 / PI).round();
                let candidate = k * PI / den as f64;
                let gap = (candidate - radians).abs();
                if gap <= tol * radians.abs().max(1.0) {
                    return Self::new(k as i64, den);
                }
            }
        }
        Err(Error::AngleNotRepresentable { radians, max_den })
    }

    /// `(cos theta, sin theta)` with exact values on quarter turns.
    pub fn cos_sin(self) -> (f64, f64) {
        if (2 * self.num) % self.den == 0 {
            match (2 * self.num / self.den).rem_euclid(4) {
                0 => return (1.0, 0.0),
                1 => return (0.0, 1.0),
                2 => return (-1.0, 0.0),
                _ => return (0.0, -1.0),
            }
        }
        let t = self.radians();
        (t.cos(), t.sin())
    }

    /// `sigma(theta) = (0, cos theta, sin theta)`.
    pub fn sigma(self) -> ImVector {
        let (c, s) = self.cos_sin();
        ImVector::new(0.0, c, s)
    }
}

/// Exact sum of two angle classes.
pub fn angle_add(a: AngleClass, b: AngleClass) -> AngleClass {
    a + b
}

impl Add for AngleClass {
    type Output = AngleClass;
    fn add(self, rhs: AngleClass) -> AngleClass {
        let den = self.den as i128 * rhs.den as i128;
        let num = self.num as i128 * rhs.den as i128 + rhs.num as i128 * self.den as i128;
        AngleClass::normalized(num, den)
    }
}

impl Neg for AngleClass {
    type Output = AngleClass;
    fn neg(self) -> AngleClass {
        AngleClass::normalized(-(self.num as i128), self.den as i128)
    }
}

impl Sub for AngleClass {
    type Output = AngleClass;
    fn sub(self, rhs: AngleClass) -> AngleClass {
        self + (-rhs)
    }
}

impl fmt::Display for AngleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.num, self.den) {
            (0, _) => write!(f, "0"),
            (1, 1) => write!(f, "pi"),
            (n, 1) => write!(f, "{n}pi"),
            (1, d) => write!(f, "pi/{d}"),
            (n, d) => write!(f, "{n}pi/{d}"),
        }
    }
}
