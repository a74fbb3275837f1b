//! sigma-Delzant polytopes `q + sigma(theta) (x) (scale * base)` in a slice of
//! ImH (x) (t^n)^*, their check against an arrangement, tangent cones and
//! pairwise intersection classification.

use std::collections::BTreeSet;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arrangement::{slice_trace, Arrangement, SliceTrace};
use crate::error::{Error, Result};
use crate::foundations::{primitive, AngleClass, Direction, FlatVector, IntMatrix, Tolerance};

/// How a base polytope was specified.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BaseSpec {
    /// `[0, r_1] x ... x [0, r_n]`.
    Box { r: Vec<f64> },
    /// `{ t_i >= 0, t_1 + ... + t_n <= 1 }`.
    Simplex,
    /// `{ x : a_j . x <= b_j }`.
    Hrep { normals: Vec<Vec<i64>>, offsets: Vec<f64> },
}

/// A simple, bounded, full-dimensional polytope `{ x : a_j . x <= b_j }` with
/// primitive integer normals and unimodular vertex cones.
#[derive(Clone, Debug, PartialEq)]
pub struct BasePolytope {
    spec: BaseSpec,
    n: usize,
    normals: Vec<Vec<i64>>,
    offsets: Vec<f64>,
    vertices: Vec<Vec<f64>>,
    active: Vec<Vec<usize>>,
}

fn dot(a: &[i64], x: &[f64]) -> f64 {
    a.iter().zip(x).map(|(&a, &x)| a as f64 * x).sum()
}

fn solve(rows: &[&[i64]], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |r, c| rows[r][c] as f64);
    let b = DVector::from_column_slice(rhs);
    m.lu().solve(&b).map(|x| x.iter().copied().collect())
}

impl BasePolytope {
    pub fn from_spec(spec: &BaseSpec, n: usize, tol: &Tolerance) -> Result<Self> {
        let (normals, offsets) = match spec {
            BaseSpec::Box { r } => {
                if r.len() != n {
                    return Err(Error::DimensionMismatch {
                        what: "box side lengths",
                        expected: n,
                        found: r.len(),
                    });
                }
                if let Some(bad) = r.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                    return Err(Error::MalformedPolytope(format!("box side length {bad} is not positive")));
                }
                let mut normals = Vec::new();
                let mut offsets = Vec::new();
                for (i, &ri) in r.iter().enumerate() {
                    let mut e = vec![0; n];
                    e[i] = -1;
                    normals.push(e.clone());
                    offsets.push(0.0);
                    e[i] = 1;
                    normals.push(e);
                    offsets.push(ri);
                }
                (normals, offsets)
            }
            BaseSpec::Simplex => {
                let mut normals: Vec<Vec<i64>> = (0..n)
                    .map(|i| (0..n).map(|j| if i == j { -1 } else { 0 }).collect())
                    .collect();
                normals.push(vec![1; n]);
                let mut offsets = vec![0.0; n];
                offsets.push(1.0);
                (normals, offsets)
            }
            BaseSpec::Hrep { normals, offsets } => (normals.clone(), offsets.clone()),
        };
        Self::build(spec.clone(), n, normals, offsets, tol)
    }

    pub fn unit_box(n: usize) -> Self {
        Self::from_spec(&BaseSpec::Box { r: vec![1.0; n] }, n, &Tolerance::default())
            .expect("unit box is valid")
    }

    pub fn simplex(n: usize) -> Self {
        Self::from_spec(&BaseSpec::Simplex, n, &Tolerance::default()).expect("simplex is valid")
    }

    fn build(
        spec: BaseSpec,
        n: usize,
        normals: Vec<Vec<i64>>,
        offsets: Vec<f64>,
        tol: &Tolerance,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::MalformedPolytope(msg));
        if n == 0 {
            return bad("dimension must be positive".into());
        }
        if normals.len() != offsets.len() {
            return bad(format!("{} normals but {} offsets", normals.len(), offsets.len()));
        }
        for (j, a) in normals.iter().enumerate() {
            if a.len() != n {
                return bad(format!("normal {j} has length {}, expected {n}", a.len()));
            }
            let g = a.iter().fold(0i64, |g, x| g.gcd(x));
            if g != 1 {
                return bad(format!("normal {j} is not a primitive nonzero integer vector"));
            }
            if !offsets[j].is_finite() {
                return bad(format!("offset {j} is not finite"));
            }
        }
        let scale = offsets.iter().fold(1.0f64, |m, b| m.max(b.abs()));
        let eps = tol.abs(scale);
        let mut vertices: Vec<Vec<f64>> = Vec::new();
        for subset in (0..normals.len()).combinations(n) {
            let rows: Vec<&[i64]> = subset.iter().map(|&j| normals[j].as_slice()).collect();
            let cols: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
            if IntMatrix::from_rows(&cols)?.det()?.is_zero() {
                continue;
            }
            let rhs: Vec<f64> = subset.iter().map(|&j| offsets[j]).collect();
            let Some(x) = solve(&rows, &rhs) else { continue };
            let feasible = normals.iter().zip(&offsets).all(|(a, &b)| dot(a, &x) <= b + eps);
            let known = vertices
                .iter()
                .any(|v| v.iter().zip(&x).all(|(p, q)| (p - q).abs() <= eps));
            if feasible && !known {
                vertices.push(x);
            }
        }
        if vertices.is_empty() {
            return bad("no vertices (empty or unbounded)".into());
        }
        vertices.sort_by(|a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let active: Vec<Vec<usize>> = vertices
            .iter()
            .map(|v| {
                (0..normals.len())
                    .filter(|&j| (dot(&normals[j], v) - offsets[j]).abs() <= eps)
                    .collect()
            })
            .collect();
        for (v, act) in vertices.iter().zip(&active) {
            if act.len() != n {
                return bad(format!("vertex {v:?} lies on {} facets, expected {n}", act.len()));
            }
            let cols: Vec<Vec<i64>> = act.iter().map(|&j| normals[j].clone()).collect();
            if !IntMatrix::from_rows(&cols)?.det()?.abs().is_one() {
                return bad(format!("vertex {v:?} has a non-unimodular cone"));
            }
        }
        for j in 0..normals.len() {
            let count = active.iter().filter(|a| a.contains(&j)).count();
            if count < n {
                return bad(format!("constraint {j} does not define a facet"));
            }
        }
        let poly = BasePolytope {
            spec,
            n,
            normals,
            offsets,
            vertices,
            active,
        };
        for vi in 0..poly.vertices.len() {
            let v = &poly.vertices[vi];
            for g in poly.cone_generators(vi)? {
                let gf: Vec<f64> = g.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
                let bounded = poly
                    .normals
                    .iter()
                    .zip(&poly.offsets)
                    .any(|(a, &b)| dot(a, &gf) > 0.0 && dot(a, v) <= b + eps);
                if !bounded {
                    return bad("polytope is unbounded".into());
                }
            }
        }
        let centroid: Vec<f64> = (0..n)
            .map(|i| poly.vertices.iter().map(|v| v[i]).sum::<f64>() / poly.vertices.len() as f64)
            .collect();
        if poly
            .normals
            .iter()
            .zip(&poly.offsets)
            .any(|(a, &b)| dot(a, &centroid) > b - eps)
        {
            return bad("polytope is not full-dimensional".into());
        }
        Ok(poly)
    }

    pub fn spec(&self) -> &BaseSpec {
        &self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn normals(&self) -> &[Vec<i64>] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Facets through vertex `v`.
    pub fn active_facets(&self, v: usize) -> &[usize] {
        &self.active[v]
    }

    pub fn contains(&self, x: &[f64], tol: &Tolerance) -> bool {
        let eps = tol.abs(self.size());
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(a, &b)| dot(a, x) <= b + eps)
    }

    fn size(&self) -> f64 {
        self.vertices
            .iter()
            .flatten()
            .chain(&self.offsets)
            .fold(1.0f64, |m, x| m.max(x.abs()))
    }

    pub fn find_vertex(&self, x: &[f64], tol: &Tolerance) -> Option<usize> {
        let eps = tol.abs(self.size());
        self.vertices
            .iter()
            .position(|v| v.iter().zip(x).all(|(p, q)| (p - q).abs() <= eps))
    }

    /// Primitive edge directions at vertex `v`; generator `i` leaves the `i`-th active facet.
    fn cone_generators(&self, v: usize) -> Result<Vec<Vec<BigInt>>> {
        let rows: Vec<Vec<i64>> = self.active[v].iter().map(|&j| self.normals[j].clone()).collect();
        let m = IntMatrix::from_rows(&rows)?;
        let det = m.det()?;
        let adj = m.adjugate()?;
        let sign = if det.is_negative() { BigInt::from(1) } else { BigInt::from(-1) };
        Ok((0..self.n)
            .map(|i| {
                let col: Vec<BigInt> = (0..self.n).map(|r| adj.get(r, i) * &sign).collect();
                primitive(&col)
            })
            .collect())
    }

    /// Euclidean n-volume, by a pulling triangulation of the face lattice.
    pub fn volume(&self) -> f64 {
        let facet_vertices: Vec<BTreeSet<usize>> = (0..self.normals.len())
            .map(|j| (0..self.vertices.len()).filter(|&v| self.active[v].contains(&j)).collect())
            .collect();
        let mut simplices = Vec::new();
        let all: BTreeSet<usize> = (0..self.vertices.len()).collect();
        self.pull(&facet_vertices, &BTreeSet::new(), &all, self.n, &mut Vec::new(), &mut simplices);
        let fact: f64 = (1..=self.n).map(|k| k as f64).product();
        simplices
            .iter()
            .map(|s| {
                let v0 = &self.vertices[s[0]];
                let m = DMatrix::from_fn(self.n, self.n, |r, c| self.vertices[s[c + 1]][r] - v0[r]);
                m.determinant().abs() / fact
            })
            .sum()
    }

    fn pull(
        &self,
        facet_vertices: &[BTreeSet<usize>],
        facets: &BTreeSet<usize>,
        verts: &BTreeSet<usize>,
        dim: usize,
        chain: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let apex = *verts.iter().next().expect("faces are nonempty");
        chain.push(apex);
        if dim == 0 {
            out.push(chain.clone());
        } else {
            for (j, fv) in facet_vertices.iter().enumerate() {
                if facets.contains(&j) || fv.contains(&apex) {
                    continue;
                }
                let sub: BTreeSet<usize> = verts.intersection(fv).copied().collect();
                if sub.is_empty() {
                    continue;
                }
                let mut next = facets.clone();
                next.insert(j);
                self.pull(facet_vertices, &next, &sub, dim - 1, chain, out);
            }
        }
        chain.pop();
    }
}

/// A polytope `q + sigma(theta) (x) (scale * base)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DelzantPolytope {
    pub name: String,
    pub q: FlatVector,
    pub theta: AngleClass,
    pub base: BasePolytope,
    pub scale: f64,
}

impl DelzantPolytope {
    pub fn new(
        name: impl Into<String>,
        q: FlatVector,
        theta: AngleClass,
        base: BasePolytope,
        scale: f64,
    ) -> Result<Self> {
        if q.rank() != base.n() {
            return Err(Error::DimensionMismatch {
                what: "base point",
                expected: base.n(),
                found: q.rank(),
            });
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::MalformedPolytope(format!("scale {scale} is not positive")));
        }
        if !q.0.iter().all(|v| v.is_finite()) {
            return Err(Error::MalformedPolytope("base point is not finite".into()));
        }
        Ok(DelzantPolytope {
            name: name.into(),
            q,
            theta,
            base,
            scale,
        })
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn sigma(&self) -> Direction {
        Direction::normalize(self.theta.sigma()).expect("sigma(theta) is a unit vector")
    }

    /// The point `q + sigma (x) (scale * x)` for base coordinates `x`.
    pub fn point(&self, x: &[f64]) -> FlatVector {
        let scaled: Vec<f64> = x.iter().map(|t| t * self.scale).collect();
        &self.q + &FlatVector::tensor(self.theta.sigma(), &scaled)
    }

    fn extent(&self) -> f64 {
        self.q.max_norm() + self.scale * self.base.size()
    }
}

/// Which part of the sigma-Delzant condition failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum DelzantFailure {
    /// A facet lies on no hyperplane trace.
    FacetUnmatched { facet: usize },
    /// A hyperplane trace meets the interior.
    InteriorCut { hyperplane: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DelzantVerdict {
    /// `facet_hyperplanes[j]` lists the hyperplanes carrying facet `j`.
    Delzant { facet_hyperplanes: Vec<Vec<usize>> },
    Failed(DelzantFailure),
}

impl DelzantVerdict {
    pub fn is_delzant(&self) -> bool {
        matches!(self, DelzantVerdict::Delzant { .. })
    }
}

/// Integer `m` with `u = m a`, if any.
fn integer_multiple(u: &[i64], a: &[i64]) -> Option<i64> {
    let (i, &ai) = a.iter().enumerate().find(|(_, &x)| x != 0)?;
    if u[i] % ai != 0 {
        return None;
    }
    let m = u[i] / ai;
    (m != 0 && u.iter().zip(a).all(|(&x, &y)| x == m * y)).then_some(m)
}

/// Checks that every facet lies on a hyperplane trace and no trace cuts the
/// interior. Boundedness and full dimension are invariants of [`BasePolytope`].
pub fn check_sigma_delzant(
    p: &DelzantPolytope,
    arr: &Arrangement,
    tol: &Tolerance,
) -> Result<DelzantVerdict> {
    if arr.n() != p.n() {
        return Err(Error::DimensionMismatch {
            what: "polytope rank",
            expected: arr.n(),
            found: p.n(),
        });
    }
    let sigma = p.sigma();
    let traces: Vec<SliceTrace> = (0..arr.d())
        .map(|k| slice_trace(arr, k, &p.q, &sigma, tol))
        .collect();
    let eps = tol.abs(p.extent() + arr.lambda().iter().map(|l| l.norm()).fold(0.0, f64::max));
    let mut facet_hyperplanes = Vec::new();
    for (j, (a, &b)) in p.base.normals().iter().zip(p.base.offsets()).enumerate() {
        let matches: Vec<usize> = traces
            .iter()
            .enumerate()
            .filter_map(|(k, t)| match t {
                SliceTrace::Boundary { normal, offset } => integer_multiple(normal, a)
                    .filter(|&m| (offset - m as f64 * p.scale * b).abs() <= eps * m.abs() as f64)
                    .map(|_| k),
                SliceTrace::Empty => None,
            })
            .collect();
        if matches.is_empty() {
            return Ok(DelzantVerdict::Failed(DelzantFailure::FacetUnmatched { facet: j }));
        }
        facet_hyperplanes.push(matches);
    }
    for (k, t) in traces.iter().enumerate() {
        let SliceTrace::Boundary { normal, offset } = t else {
            continue;
        };
        let values: Vec<f64> = p
            .base
            .vertices()
            .iter()
            .map(|v| p.scale * dot(normal, v))
            .collect();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let cuts = if normal.iter().all(|&x| x == 0) {
            offset.abs() <= eps
        } else {
            lo < offset - eps && hi > offset + eps
        };
        if cuts {
            return Ok(DelzantVerdict::Failed(DelzantFailure::InteriorCut { hyperplane: k }));
        }
    }
    Ok(DelzantVerdict::Delzant { facet_hyperplanes })
}

/// Primitive integer generators of the tangent cone of `p` at base vertex `v`.
pub fn tangent_cone(p: &DelzantPolytope, v: &[f64], tol: &Tolerance) -> Result<Vec<Vec<i64>>> {
    let idx = p.base.find_vertex(v, tol).ok_or(Error::NotAVertex)?;
    to_i64(p.base.cone_generators(idx)?)
}

fn to_i64(gens: Vec<Vec<BigInt>>) -> Result<Vec<Vec<i64>>> {
    gens.into_iter()
        .map(|g| {
            g.iter()
                .map(|x| x.to_i64().ok_or_else(|| Error::MalformedPolytope("generator overflow".into())))
                .collect()
        })
        .collect()
}

/// How two polytopes meet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntersectionRecord {
    Disjoint,
    /// A single common vertex whose cones agree after `psi`, with slice
    /// directions `sigma(theta_0)` and `sigma(theta_0 + angle)`.
    StandardVertex {
        point: FlatVector,
        angle: AngleClass,
        psi: IntMatrix,
        generators: Vec<Vec<i64>>,
        signs: [i8; 2],
    },
    NonStandard { reason: String },
}

impl IntersectionRecord {
    pub fn kind_name(&self) -> &'static str {
        match self {
            IntersectionRecord::Disjoint => "disjoint",
            IntersectionRecord::StandardVertex { .. } => "standard_vertex",
            IntersectionRecord::NonStandard { .. } => "non_standard",
        }
    }
}

fn non_standard(reason: impl Into<String>) -> IntersectionRecord {
    IntersectionRecord::NonStandard {
        reason: reason.into(),
    }
}

fn cone_set(gens: &[Vec<i64>], sign: i64) -> BTreeSet<Vec<i64>> {
    gens.iter()
        .map(|g| g.iter().map(|x| x * sign).collect())
        .collect()
}

/// Classifies `pA ∩ pB` as disjoint, a standard vertex intersection, or non-standard.
pub fn classify_intersection(
    pa: &DelzantPolytope,
    pb: &DelzantPolytope,
    tol: &Tolerance,
) -> Result<IntersectionRecord> {
    let n = pa.n();
    if pb.n() != n {
        return Err(Error::DimensionMismatch {
            what: "polytope rank",
            expected: n,
            found: pb.n(),
        });
    }
    let (sa, sb) = (pa.sigma().vector(), pb.sigma().vector());
    let eps = tol.abs(pa.extent().max(pb.extent()));
    let c = sa.dot(&sb);
    let delta = &pb.q - &pa.q;
    if sa.cross(&sb).norm() <= tol.geom {
        return classify_same_line(pa, pb, c.signum(), &delta, tol);
    }
    let det = 1.0 - c * c;
    let mut xa = Vec::with_capacity(n);
    let mut xb = Vec::with_capacity(n);
    for d in &delta.0 {
        let (da, db) = (sa.dot(d), sb.dot(d));
        let x = (da - c * db) / det;
        let y = (c * da - db) / det;
        if (sa * x - sb * y - *d).norm() > eps {
            return Ok(IntersectionRecord::Disjoint);
        }
        xa.push(x / pa.scale);
        xb.push(y / pb.scale);
    }
    if !pa.base.contains(&xa, tol) || !pb.base.contains(&xb, tol) {
        return Ok(IntersectionRecord::Disjoint);
    }
    let (Some(va), Some(vb)) = (pa.base.find_vertex(&xa, tol), pb.base.find_vertex(&xb, tol)) else {
        return Ok(non_standard("common point is not a vertex of both polytopes"));
    };
    let ga = to_i64(pa.base.cone_generators(va)?)?;
    let gb = to_i64(pb.base.cone_generators(vb)?)?;
    for (s_a, s_b) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
        if cone_set(&ga, s_a) != cone_set(&gb, s_b) {
            continue;
        }
        let generators: Vec<Vec<i64>> = cone_set(&ga, s_a).into_iter().collect();
        let g = IntMatrix::from_columns(&generators)?;
        let Some(psi) = g.integer_inverse()? else {
            return Ok(non_standard("common cone is not unimodular"));
        };
        let shift = |s: i64| if s < 0 { AngleClass::PI } else { AngleClass::ZERO };
        let angle = (pb.theta + shift(s_b)) - (pa.theta + shift(s_a));
        if angle.is_zero() {
            return Ok(non_standard("slice directions coincide"));
        }
        return Ok(IntersectionRecord::StandardVertex {
            point: pa.point(&xa),
            angle,
            psi,
            generators,
            signs: [s_a as i8, s_b as i8],
        });
    }
    Ok(non_standard("tangent cones differ up to sign"))
}

/// Both slices are parallel: either distinct (disjoint) or the same slice, where
/// any common point makes the pair non-standard.
fn classify_same_line(
    pa: &DelzantPolytope,
    pb: &DelzantPolytope,
    orientation: f64,
    delta: &FlatVector,
    tol: &Tolerance,
) -> Result<IntersectionRecord> {
    let sigma = pa.sigma();
    let eps = tol.abs(pa.extent().max(pb.extent()));
    if delta.0.iter().any(|d| d.reject(&sigma).norm() > eps) {
        return Ok(IntersectionRecord::Disjoint);
    }
    let shift: Vec<f64> = delta.0.iter().map(|d| d.dot(&sigma.vector())).collect();
    let mut normals: Vec<Vec<f64>> = Vec::new();
    let mut offsets = Vec::new();
    for (a, &b) in pa.base.normals().iter().zip(pa.base.offsets()) {
        normals.push(a.iter().map(|&x| x as f64).collect());
        offsets.push(b);
    }
    // x_B = orientation (scale_A x_A - shift) / scale_B
    for (a, &b) in pb.base.normals().iter().zip(pb.base.offsets()) {
        normals.push(a.iter().map(|&x| orientation * pa.scale * x as f64).collect());
        offsets.push(pb.scale * b + orientation * dot(a, &shift));
    }
    let n = pa.n();
    let size = offsets.iter().fold(1.0f64, |m, b| m.max(b.abs()));
    let e = tol.abs(size);
    for subset in (0..normals.len()).combinations(n) {
        let m = DMatrix::from_fn(n, n, |r, c| normals[subset[r]][c]);
        if m.determinant().abs() < 1e-12 {
            continue;
        }
        let rhs = DVector::from_iterator(n, subset.iter().map(|&j| offsets[j]));
        let Some(x) = m.lu().solve(&rhs) else { continue };
        let feasible = normals
            .iter()
            .zip(&offsets)
            .all(|(a, &b)| a.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() <= b + e);
        if feasible {
            return Ok(non_standard("polytopes share points inside a common slice"));
        }
    }
    Ok(IntersectionRecord::Disjoint)
}

/// Euclidean n-volume of `scale * base`.
pub fn euclidean_volume(p: &DelzantPolytope) -> f64 {
    p.base.volume() * p.scale.powi(p.n() as i32)
}

/// `n! (2 pi)^n` times the Euclidean volume: the volume convention for the
/// toric submanifold over the polytope.
pub fn lagrangian_volume(p: &DelzantPolytope) -> f64 {
    let n = p.n();
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    fact * std::f64::consts::TAU.powi(n as i32) * euclidean_volume(p)
}
