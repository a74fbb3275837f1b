use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ImVector;

/// A quaternion `re + im_1 i + im_2 j + im_3 k`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub re: f64,
    pub im: ImVector,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion {
        re: 1.0,
        im: ImVector::ZERO,
    };
    pub const I: Quaternion = Quaternion {
        re: 0.0,
        im: ImVector([1.0, 0.0, 0.0]),
    };

    pub fn new(re: f64, i: f64, j: f64, k: f64) -> Self {
        Quaternion {
            re,
            im: ImVector::new(i, j, k),
        }
    }

    /// `a + b j` for complex `a`, `b` (so `b j = Re b j + Im b k`).
    pub fn from_complex_pair(a: Complex64, b: Complex64) -> Self {
        Quaternion::new(a.re, a.im, b.re, b.im)
    }

    /// The pair `(a, b)` with `self = a + b j`.
    pub fn complex_pair(&self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.re, self.im[0]),
            Complex64::new(self.im[1], self.im[2]),
        )
    }

    pub fn conj(&self) -> Self {
        Quaternion {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im.dot(&self.im)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        Quaternion {
            re: self.re * o.re - self.im.dot(&o.im),
            im: o.im * self.re + self.im * o.re + self.im.cross(&o.im),
        }
    }
}

/// Imaginary part of `x i x-bar`, the moment map of the circle action on H.
pub fn quaternion_moment(x: Quaternion) -> ImVector {
    (x * Quaternion::I * x.conj()).im
}
