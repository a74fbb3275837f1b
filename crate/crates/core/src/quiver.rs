//! Quivers: boundary operator, Betti numbers, cycle covers with certificates,
//! and the connected-sum topology of a glued configuration.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foundations::{AngleClass, IntMatrix};
use crate::polytope::BaseSpec;

/// A finite directed multigraph `(V, E, s, t)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl Quiver {
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let v = vertices.len();
        if let Some(h) = edges.iter().position(|&(s, t)| s >= v || t >= v) {
            return Err(Error::MalformedQuiver(format!("edge {h} has an endpoint outside {v} vertices")));
        }
        Ok(Quiver { vertices, edges })
    }

    /// Vertices labelled `0..count`.
    pub fn unlabelled(count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::new((0..count).map(|i| i.to_string()).collect(), edges)
    }

    /// Parses one `src -> dst` per line; a line holding a single name declares
    /// an isolated vertex. Blank lines and `#` comments are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let index = |name: &str, names: &mut Vec<String>| {
            names.iter().position(|n| n == name).unwrap_or_else(|| {
                names.push(name.to_string());
                names.len() - 1
            })
        };
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once("->") {
                Some((s, t)) => {
                    let (s, t) = (s.trim(), t.trim());
                    if s.is_empty() || t.is_empty() || t.contains("->") {
                        return Err(Error::MalformedQuiver(format!("line {}: {raw:?}", lineno + 1)));
                    }
                    let s = index(s, &mut names);
                    let t = index(t, &mut names);
                    edges.push((s, t));
                }
                None => {
                    index(line, &mut names);
                }
            }
        }
        Self::new(names, edges)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn source(&self, h: usize) -> usize {
        self.edges[h].0
    }

    pub fn target(&self, h: usize) -> usize {
        self.edges[h].1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    /// The `V x E` matrix of `dh = s(h) - t(h)`.
    pub fn boundary(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.vertex_count(), self.edge_count());
        for (h, &(s, t)) in self.edges.iter().enumerate() {
            if s != t {
                m.set(s, h, 1.into());
                m.set(t, h, (-1).into());
            }
        }
        m
    }

    /// `d A` for an edge weighting `A`.
    pub fn apply_boundary(&self, weights: &[i64]) -> Vec<i64> {
        let mut out = vec![0; self.vertex_count()];
        for (&(s, t), &a) in self.edges.iter().zip(weights) {
            out[s] += a;
            out[t] -= a;
        }
        out
    }

    pub fn without_edge(&self, h: usize) -> Result<Self> {
        if h >= self.edge_count() {
            return Err(Error::EdgeOutOfRange {
                edge: h,
                count: self.edge_count(),
            });
        }
        let mut edges = self.edges.clone();
        edges.remove(h);
        Ok(Quiver {
            vertices: self.vertices.clone(),
            edges,
        })
    }

    pub fn reversed(&self) -> Self {
        Quiver {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().map(|&(s, t)| (t, s)).collect(),
        }
    }

    fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertex_count()];
        for (h, &(s, _)) in self.edges.iter().enumerate() {
            out[s].push(h);
        }
        out
    }
}

/// `(h0, h1)`: dimensions of `Ker d*` and `Ker d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Betti {
    pub h0: usize,
    pub h1: usize,
}

pub fn betti(q: &Quiver) -> Betti {
    let rank = q.boundary().rank();
    Betti {
        h0: q.vertex_count() - rank,
        h1: q.edge_count() - rank,
    }
}

/// A closed walk `h_1, ..., h_r` with `t(h_k) = s(h_{k+1})`, taken `weight` times.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedCycle {
    pub edges: Vec<usize>,
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCoverCertificate {
    pub cover: bool,
    /// Per edge: does it lie on a directed cycle.
    pub covered: Vec<bool>,
    /// Cycles peeled from `kernel_vector`.
    pub cycles: Vec<WeightedCycle>,
    /// Integer flow with `d A = 0`, positive exactly on covered edges.
    pub kernel_vector: Vec<i64>,
}

impl CycleCoverCertificate {
    /// Re-checks closure of every cycle, `d A = 0`, positivity, and that the
    /// cycles reassemble `A`.
    pub fn validate(&self, q: &Quiver) -> Result<()> {
        let fail = |msg: &str| Err(Error::IdentityViolated(msg.to_string()));
        let e = q.edge_count();
        if self.covered.len() != e || self.kernel_vector.len() != e {
            return fail("certificate length differs from edge count");
        }
        let mut total = vec![0i64; e];
        for c in &self.cycles {
            if c.edges.is_empty() || c.weight == 0 {
                return fail("empty cycle");
            }
            for (i, &h) in c.edges.iter().enumerate() {
                let next = c.edges[(i + 1) % c.edges.len()];
                if h >= e || next >= e || q.target(h) != q.source(next) {
                    return fail("cycle does not close");
                }
                total[h] += c.weight as i64;
            }
        }
        if total != self.kernel_vector {
            return fail("cycles do not sum to the kernel vector");
        }
        if q.apply_boundary(&self.kernel_vector).iter().any(|&x| x != 0) {
            return fail("kernel vector is not a cycle");
        }
        for h in 0..e {
            if (self.kernel_vector[h] > 0) != self.covered[h] {
                return fail("kernel vector support differs from covered edges");
            }
        }
        if self.cover != self.covered.iter().all(|&c| c) {
            return fail("cover flag inconsistent");
        }
        Ok(())
    }
}

/// Shortest edge path from `from` to `to` (empty when equal).
fn edge_path(out: &[Vec<usize>], q: &Quiver, from: usize, to: usize) -> Option<Vec<usize>> {
    let mut via: Vec<Option<usize>> = vec![None; q.vertex_count()];
    let mut seen = vec![false; q.vertex_count()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = Vec::new();
            let mut cur = to;
            while cur != from {
                let h = via[cur].expect("visited vertices have a parent edge");
                path.push(h);
                cur = q.source(h);
            }
            path.reverse();
            return Some(path);
        }
        for &h in &out[v] {
            let w = q.target(h);
            if !seen[w] {
                seen[w] = true;
                via[w] = Some(h);
                queue.push_back(w);
            }
        }
    }
    None
}

/// Decides whether every edge lies on a directed cycle and certifies the answer.
pub fn cycle_cover(q: &Quiver) -> CycleCoverCertificate {
    let mut g: DiGraph<(), ()> = DiGraph::new();
    let nodes: Vec<_> = (0..q.vertex_count()).map(|_| g.add_node(())).collect();
    for &(s, t) in q.edges() {
        g.add_edge(nodes[s], nodes[t], ());
    }
    let mut component = vec![0; q.vertex_count()];
    for (c, scc) in tarjan_scc(&g).iter().enumerate() {
        for v in scc {
            component[v.index()] = c;
        }
    }
    let covered: Vec<bool> = q.edges().iter().map(|&(s, t)| component[s] == component[t]).collect();

    let out = q.out_edges();
    let mut weights = vec![0i64; q.edge_count()];
    for h in 0..q.edge_count() {
        if covered[h] && weights[h] == 0 {
            let back = edge_path(&out, q, q.target(h), q.source(h))
                .expect("strongly connected ends have a return path");
            weights[h] += 1;
            for e in back {
                weights[e] += 1;
            }
        }
    }
    let cycles = peel(q, &out, &weights);
    CycleCoverCertificate {
        cover: covered.iter().all(|&c| c),
        covered,
        cycles,
        kernel_vector: weights,
    }
}

/// Splits a nonnegative integer flow into weighted simple cycles by repeated walk
/// extension and subtraction of the cycle found.
fn peel(q: &Quiver, out: &[Vec<usize>], flow: &[i64]) -> Vec<WeightedCycle> {
    let mut rest = flow.to_vec();
    let mut cycles = Vec::new();
    while let Some(start) = rest.iter().position(|&a| a > 0) {
        let mut walk = vec![start];
        let mut visited_at = vec![None; q.vertex_count()];
        visited_at[q.source(start)] = Some(0);
        let cycle = loop {
            let last = *walk.last().expect("walk is nonempty");
            let v = q.target(last);
            if let Some(i) = visited_at[v] {
                break walk[i..].to_vec();
            }
            visited_at[v] = Some(walk.len());
            let next = out[v]
                .iter()
                .copied()
                .find(|&h| rest[h] > 0)
                .expect("a balanced flow leaves every vertex it enters");
            walk.push(next);
        };
        let weight = cycle.iter().map(|&h| rest[h]).min().expect("cycle is nonempty");
        for &h in &cycle {
            rest[h] -= weight;
        }
        cycles.push(WeightedCycle {
            edges: cycle,
            weight: weight as u64,
        });
    }
    cycles
}

/// Effect of deleting one edge on `(h0, h1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum EdgeRemoval {
    /// `(h0 + 1, h1)`.
    BridgeLike { h0: usize, h1: usize },
    /// `(h0, h1 - 1)`.
    CycleEdge { h0: usize, h1: usize },
}

pub fn edge_removal_profile(q: &Quiver, h: usize) -> Result<EdgeRemoval> {
    let before = betti(q);
    let after = betti(&q.without_edge(h)?);
    if after.h0 == before.h0 + 1 && after.h1 == before.h1 {
        Ok(EdgeRemoval::BridgeLike {
            h0: after.h0,
            h1: after.h1,
        })
    } else if after.h0 == before.h0 && after.h1 + 1 == before.h1 {
        Ok(EdgeRemoval::CycleEdge {
            h0: after.h0,
            h1: after.h1,
        })
    } else {
        Err(Error::IdentityViolated(format!(
            "removing edge {h}: {before:?} -> {after:?}"
        )))
    }
}

/// Diffeomorphism type of a summand.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "shape", content = "param", rename_all = "snake_case")]
pub enum Shape {
    /// `(P^1)^k`.
    ProductOfLines(usize),
    /// `P^k`, `k >= 2`.
    ProjectiveSpace(usize),
    /// Toric manifold of a polytope that is neither a box nor a simplex.
    Toric(String),
}

fn superscript(k: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    k.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap_or(0) as usize])
        .collect()
}

impl Shape {
    /// Shape of the toric manifold over a base polytope of dimension `n`.
    pub fn of_base(spec: &BaseSpec, n: usize, name: &str) -> Shape {
        match spec {
            BaseSpec::Box { .. } => Shape::ProductOfLines(n),
            BaseSpec::Simplex if n == 1 => Shape::ProductOfLines(1),
            BaseSpec::Simplex => Shape::ProjectiveSpace(n),
            BaseSpec::Hrep { .. } => Shape::Toric(format!("X({name})")),
        }
    }

    /// Whether the shape has an orientation-reversing self-diffeomorphism,
    /// so a reversed copy is the same oriented manifold.
    pub fn reversible(&self) -> bool {
        match self {
            Shape::ProductOfLines(_) => true,
            Shape::ProjectiveSpace(k) => k % 2 == 1,
            Shape::Toric(_) => false,
        }
    }

    pub fn first_betti(&self) -> usize {
        0
    }

    fn render(&self, reversed: bool) -> String {
        let bar = if reversed { "\u{0304}" } else { "" };
        match self {
            Shape::ProductOfLines(1) => format!("ℙ{bar}¹"),
            Shape::ProductOfLines(k) => format!("(ℙ{bar}¹){}", superscript(*k)),
            Shape::ProjectiveSpace(k) => format!("ℙ{bar}{}", superscript(*k)),
            Shape::Toric(name) => {
                let mut chars = name.chars();
                let first = chars.next().map(String::from).unwrap_or_default();
                format!("{first}{bar}{}", chars.as_str())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summand {
    pub shape: Shape,
    /// `+1` or `-1`; `-1` is the reversed orientation.
    pub orientation: i8,
    pub multiplicity: usize,
}

/// `L_1 # ... # L_A # N (S^1 x S^{m-1})` with summands grouped by oriented shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummandExpression {
    /// Real dimension of the glued manifold.
    pub m: usize,
    pub summands: Vec<Summand>,
    pub handles: usize,
}

impl SummandExpression {
    pub fn summand_count(&self) -> usize {
        self.summands.iter().map(|s| s.multiplicity).sum()
    }

    /// Canonical rendering, e.g. `2ℙ² # 2ℙ̄² # (S¹×S³)`.
    pub fn canonical(&self) -> String {
        let mut parts: Vec<String> = self
            .summands
            .iter()
            .map(|s| {
                let count = if s.multiplicity > 1 { s.multiplicity.to_string() } else { String::new() };
                format!("{count}{}", s.shape.render(s.orientation < 0))
            })
            .collect();
        if self.handles > 0 {
            let count = if self.handles > 1 { self.handles.to_string() } else { String::new() };
            parts.push(format!("{count}(S¹×S{})", superscript(self.m.saturating_sub(1))));
        }
        if parts.is_empty() {
            format!("S{}", superscript(self.m))
        } else {
            parts.join(" # ")
        }
    }
}

impl fmt::Display for SummandExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// Connected-sum type of the manifold glued along a connected quiver whose
/// vertex `a` carries shape `labels[a].0` calibrated in direction `labels[a].1`.
/// The orientation of a summand is `+` when `(n / pi) theta` is even.
pub fn glued_topology(q: &Quiver, labels: &[(Shape, AngleClass)], n: usize) -> Result<SummandExpression> {
    if labels.len() != q.vertex_count() {
        return Err(Error::DimensionMismatch {
            what: "vertex labels",
            expected: q.vertex_count(),
            found: labels.len(),
        });
    }
    let b = betti(q);
    if b.h0 != 1 {
        return Err(Error::DisconnectedQuiver { components: b.h0 });
    }
    let mut groups: BTreeMap<(Shape, i8), usize> = BTreeMap::new();
    for (vertex, (shape, theta)) in labels.iter().enumerate() {
        let k = theta.as_multiple_of(n as i64).ok_or_else(|| Error::AngleNotMultiple {
            vertex: q.vertices()[vertex].clone(),
            angle: theta.to_string(),
            n,
        })?;
        let orientation = if k % 2 == 0 || shape.reversible() { 1 } else { -1 };
        *groups.entry((shape.clone(), -orientation)).or_default() += 1;
    }
    Ok(SummandExpression {
        m: 2 * n,
        summands: groups
            .into_iter()
            .map(|((shape, neg), multiplicity)| Summand {
                shape,
                orientation: -neg,
                multiplicity,
            })
            .collect(),
        handles: b.h1,
    })
}

/// First Betti number of a connected sum in dimension `m >= 3`.
pub fn first_betti(e: &SummandExpression) -> Result<usize> {
    if e.m < 3 {
        return Err(Error::DimensionTooSmall(e.m));
    }
    Ok(e.summands
        .iter()
        .map(|s| s.shape.first_betti() * s.multiplicity)
        .sum::<usize>()
        + e.handles)
}
