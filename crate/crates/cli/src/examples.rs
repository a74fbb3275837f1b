//! Generators for the three worked families: the 2n boxes around an n-gon,
//! the four triangles in real dimension 8, and the chain of squares.

use std::f64::consts::PI;

use num_complex::Complex64;
use slag_core::foundations::{AngleClass, FlatVector, ImVector};
use slag_core::polytope::BaseSpec;

use crate::config::{ConfigFile, Mode, PolytopeSpec, QuiverSpec, TorusSpec};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ExampleError {
    #[error("invalid parameter `{name}`: {message}")]
    Parameter { name: &'static str, message: String },
}

fn bad(name: &'static str, message: impl Into<String>) -> ExampleError {
    ExampleError::Parameter {
        name,
        message: message.into(),
    }
}

fn plane(z: Complex64) -> ImVector {
    ImVector::new(0.0, z.re, z.im)
}

fn angle(num: i64, den: i64) -> AngleClass {
    AngleClass::new(num, den).expect("positive denominator")
}

/// `2n` boxes in `(H)^n`, one direction step `(n+1)pi/n` apart.
#[derive(Clone, Debug, PartialEq)]
pub struct Example1 {
    pub n: usize,
    /// `a_1..a_n`, each greater than 1.
    pub a: Vec<f64>,
    /// 1-based coordinates using the unshifted points; the rest use the shifted ones.
    pub plus: Vec<usize>,
}

impl Example1 {
    /// Upper bound on `a_m - 1` keeping non-adjacent boxes apart (none for `n = 2`).
    pub fn bound(n: usize) -> Option<f64> {
        if n < 3 {
            return None;
        }
        let c = (2.0 * PI / n as f64).cos();
        Some((1.0 - c) / (1.0 + c))
    }

    pub fn with_defaults(n: usize) -> Self {
        let a = Self::bound(n).map_or(1.2, |b| 1.0 + b / 2.0);
        Example1 {
            n,
            a: vec![a; n],
            plus: vec![1],
        }
    }

    fn check(&self) -> Result<(), ExampleError> {
        let n = self.n;
        if n < 2 {
            return Err(bad("n", format!("need n >= 2, got {n}")));
        }
        if self.a.len() != n {
            return Err(bad("a", format!("need {n} values, got {}", self.a.len())));
        }
        for &a in &self.a {
            if !(a.is_finite() && a > 1.0) {
                return Err(bad("a", format!("{a} is not greater than 1")));
            }
            if let Some(b) = Self::bound(n) {
                if a - 1.0 >= b {
                    return Err(bad("a", format!("{a} - 1 is not below {b}")));
                }
            }
        }
        let mut plus = self.plus.clone();
        plus.sort_unstable();
        plus.dedup();
        if plus.len() != self.plus.len() || plus.iter().any(|&p| p == 0 || p > n) {
            return Err(bad("plus", format!("must be distinct indices in 1..={n}")));
        }
        if plus.is_empty() || plus.len() == n {
            return Err(bad("plus", "must be a nonempty proper subset"));
        }
        Ok(())
    }

    /// The `2n` points around the n-gon, rotated so that the step from
    /// `rho_k` to `rho_{k+1}` points in direction `(n+1)k pi/n`.
    pub fn rho(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut rho = Vec::with_capacity(2 * n);
        if n == 2 {
            let (a1, a2) = (self.a[0], self.a[1]);
            rho.extend([
                Complex64::new(a1, a2),
                Complex64::new(a1, -a2),
                Complex64::new(-a1, -a2),
                Complex64::new(-a1, a2),
            ]);
        } else {
            let omega = |j: usize| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
            for m in 1..=n {
                let a = self.a[m - 1];
                rho.push(omega(m - 1) + (omega(m) - omega(m - 1)) * a);
                rho.push(omega(m + 1) + (omega(m) - omega(m + 1)) * a);
            }
        }
        let step = (n as f64 + 1.0) * PI / n as f64;
        let theta0 = (rho[1] - rho[0]).arg() - step;
        let turn = Complex64::from_polar(1.0, -theta0);
        rho.into_iter().map(|z| z * turn).collect()
    }

    /// `rho_{k,alpha}` for `k = 0..2n` (0-based) and coordinate `alpha`.
    pub fn points(&self) -> Vec<Vec<Complex64>> {
        let n = self.n;
        let rho = self.rho();
        let shift = Complex64::from_polar(1.0, PI / n as f64);
        (0..2 * n)
            .map(|k| {
                (0..n)
                    .map(|alpha| {
                        if self.plus.contains(&(alpha + 1)) {
                            rho[k]
                        } else {
                            -rho[(k + 2 * n - 1) % (2 * n)] * shift
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn generate(&self) -> Result<ConfigFile, ExampleError> {
        self.check()?;
        let n = self.n;
        let points = self.points();
        let d = 2 * n * n;
        let u: Vec<Vec<i64>> = (0..n)
            .map(|row| (0..d).map(|col| i64::from(col % n == row)).collect())
            .collect();
        let lambda = points.iter().flatten().map(|&z| plane(-z)).collect();
        let polytopes = (0..2 * n)
            .map(|k| {
                let next = &points[(k + 1) % (2 * n)];
                PolytopeSpec {
                    name: format!("B{}", k + 1),
                    q: FlatVector(points[k].iter().map(|&z| plane(z)).collect()),
                    theta: angle((n as i64 + 1) * (k as i64 + 1), n as i64),
                    base: BaseSpec::Box {
                        r: points[k].iter().zip(next).map(|(a, b)| (b - a).norm()).collect(),
                    },
                    scale: 1.0,
                }
            })
            .collect();
        Ok(ConfigFile {
            mode: None,
            torus: TorusSpec { n, d, u },
            lambda,
            polytopes,
            quiver: QuiverSpec::default(),
        })
    }
}

/// Four triangles in `(H)^2` over five hyperplanes.
#[derive(Clone, Debug, PartialEq)]
pub struct Example2 {
    pub r1: f64,
    pub r2: f64,
    /// Replace the fourth triangle by one overlapping the second.
    pub overlap: bool,
}

impl Default for Example2 {
    fn default() -> Self {
        Example2 {
            r1: 1.0,
            r2: 2.0,
            overlap: false,
        }
    }
}

impl Example2 {
    pub fn generate(&self) -> Result<ConfigFile, ExampleError> {
        for (name, r) in [("r1", self.r1), ("r2", self.r2)] {
            if !(r.is_finite() && r > 0.0) {
                return Err(bad(name, format!("{r} is not positive")));
            }
        }
        let (r1, r2) = (self.r1, self.r2);
        let lambda = vec![
            ImVector::ZERO,
            ImVector::ZERO,
            ImVector::new(0.0, 0.0, r1),
            ImVector::new(0.0, -r2, -r1),
            ImVector::new(0.0, r2, 0.0),
        ];
        let neg = |a: usize, b: usize| FlatVector(vec![-lambda[a], -lambda[b]]);
        let triangle = |name: &str, q: FlatVector, k: i64, scale: f64| PolytopeSpec {
            name: name.into(),
            q,
            theta: angle(k, 2),
            base: BaseSpec::Simplex,
            scale,
        };
        let mut polytopes = vec![
            triangle("T1", neg(1, 2), 1, r1),
            triangle("T2", neg(3, 2), 2, r2),
            triangle("T3", neg(3, 4), 3, r1),
            triangle("T4", neg(1, 4), 4, r2),
        ];
        if self.overlap {
            polytopes[3] = PolytopeSpec {
                name: "T4".into(),
                ..polytopes[1].clone()
            };
        }
        Ok(ConfigFile {
            mode: None,
            torus: TorusSpec {
                n: 2,
                d: 5,
                u: vec![vec![1, 1, 0, 1, 0], vec![1, 0, 1, 0, 1]],
            },
            lambda,
            polytopes,
            quiver: QuiverSpec::default(),
        })
    }
}

/// A chain of `N` squares of products of segments, sharing one corner with
/// each neighbour; the quiver has first Betti number `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct Example3 {
    /// `0 < a_1 < ... < a_N`.
    pub steps: Vec<f64>,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Example3 {
    pub fn with_defaults(squares: usize) -> Self {
        Example3 {
            steps: (1..=squares).map(|m| m as f64).collect(),
            a: 1.0,
            b: 1.0,
            c: 1.0,
        }
    }

    pub fn squares(&self) -> usize {
        self.steps.len()
    }

    pub fn generate(&self) -> Result<ConfigFile, ExampleError> {
        let big_n = self.steps.len();
        if big_n == 0 {
            return Err(bad("steps", "need at least one square"));
        }
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(name, format!("{v} is not positive")));
            }
        }
        let mut prev = 0.0;
        for &s in &self.steps {
            if !(s.is_finite() && s > prev) {
                return Err(bad("steps", "must be positive and strictly increasing"));
            }
            prev = s;
        }
        let (a, b, c) = (self.a, self.b, self.c);
        let z = Complex64::new;
        // Points -lambda in the order of the columns of u.
        let first = [z(a, 0.0), z(a, b), z(0.0, b), z(0.0, 0.0)];
        let mut levels = vec![0.0];
        levels.extend(&self.steps);
        let second: Vec<Complex64> = levels.iter().flat_map(|&x| [z(x, c), z(x, 0.0)]).collect();
        let d = first.len() + second.len();
        let u = vec![
            (0..d).map(|k| i64::from(k < 4)).collect(),
            (0..d).map(|k| i64::from(k >= 4)).collect(),
        ];
        let lambda = first.iter().chain(&second).map(|&p| plane(-p)).collect();

        // Segments by their endpoints.
        let minus = (first[3], first[2]);
        let plus = (first[1], first[0]);
        let s_plus = (first[2], first[1]);
        let s_minus = (first[0], first[3]);
        let upright = |m: usize| (second[2 * m], second[2 * m + 1]);
        let top = |m: usize| (second[2 * m - 2], second[2 * m]);
        let bottom = |m: usize| (second[2 * m - 1], second[2 * m + 1]);

        let mut polytopes: Vec<PolytopeSpec> = Vec::new();
        for m in 0..big_n {
            for j in 1..=4usize {
                let duplicate = (m % 2 == 0 && m >= 2 && j == 1) || (m % 2 == 1 && j == 3);
                if duplicate {
                    continue;
                }
                let (l, even) = if m % 2 == 0 { (m / 2, true) } else { (m.div_ceil(2), false) };
                let segments = match (j, even) {
                    (1, _) => [minus, upright(2 * l)],
                    (2, true) => [s_plus, top(2 * l + 1)],
                    (3, true) => [plus, upright(2 * l + 1)],
                    (4, true) => [s_minus, bottom(2 * l + 1)],
                    (2, false) => [s_plus, bottom(2 * l)],
                    (3, false) => [plus, upright(2 * l - 1)],
                    (4, false) => [s_minus, top(2 * l)],
                    _ => unreachable!(),
                };
                let theta = angle(j as i64, 2);
                let (dir_c, dir_s) = theta.cos_sin();
                let dir = z(dir_c, dir_s);
                let mut q = Vec::new();
                let mut r = Vec::new();
                for (p0, p1) in segments {
                    let delta = p1 - p0;
                    let along = (delta * dir.conj()).re;
                    q.push(plane(if along > 0.0 { p0 } else { p1 }));
                    r.push(delta.norm());
                }
                polytopes.push(PolytopeSpec {
                    name: format!("S{m}.{j}"),
                    q: FlatVector(q),
                    theta,
                    base: BaseSpec::Box { r },
                    scale: 1.0,
                });
            }
        }
        Ok(ConfigFile {
            mode: Some(Mode::Graph),
            torus: TorusSpec { n: 2, d, u },
            lambda,
            polytopes,
            quiver: QuiverSpec::default(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_one_steps_have_exact_directions() {
        for n in 2..=6 {
            let ex = Example1::with_defaults(n);
            let rho = ex.rho();
            for k in 0..2 * n {
                let step = rho[(k + 1) % (2 * n)] - rho[k];
                let want = angle((n as i64 + 1) * (k as i64 + 1), n as i64).radians();
                let off = (step.arg() - want).rem_euclid(2.0 * PI);
                assert!(off.min(2.0 * PI - off) < 1e-12, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn example_one_rejects_bad_parameters() {
        let mut ex = Example1::with_defaults(3);
        ex.a[0] = 1.0 + Example1::bound(3).unwrap();
        assert!(ex.generate().is_err());
        let mut ex = Example1::with_defaults(3);
        ex.plus = vec![1, 2, 3];
        assert!(ex.generate().is_err());
        assert!(Example1::with_defaults(1).generate().is_err());
    }

    #[test]
    fn example_two_matches_hand_data() {
        let cfg = Example2::default().generate().unwrap();
        assert_eq!(cfg.lambda[3], ImVector::new(0.0, -2.0, -1.0));
        assert_eq!(cfg.polytopes[0].q, FlatVector(vec![ImVector::ZERO, ImVector::new(0.0, 0.0, -1.0)]));
        assert_eq!(cfg.polytopes[3].theta, AngleClass::ZERO);
    }

    #[test]
    fn example_three_counts() {
        for big_n in 1..=4 {
            let cfg = Example3::with_defaults(big_n).generate().unwrap();
            assert_eq!(cfg.polytopes.len(), 3 * big_n + 1);
            assert_eq!(cfg.torus.d, 2 * big_n + 6);
        }
        assert!(Example3 {
            steps: vec![2.0, 1.0],
            ..Example3::with_defaults(2)
        }
        .generate()
        .is_err());
    }
}
