//! The verification pipeline: smoothness, Delzant property, pairwise
//! intersections, quiver, cycle cover, intersection types, topology and
//! obstructions, each recorded as a stage of the report.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use slag_core::arrangement::{check_smooth, SmoothVerdict};
use slag_core::foundations::{AngleClass, Tolerance};
use slag_core::local_model::{hk_angles, intersection_type};
use slag_core::obstruction::{hl_obstruction, parity_obstruction, CalibratedSummand, HlVerdict, ParityVerdict};
use slag_core::polytope::{
    check_sigma_delzant, classify_intersection, lagrangian_volume, DelzantVerdict, IntersectionRecord,
};
use slag_core::quiver::{betti, cycle_cover, first_betti, glued_topology, Betti, CycleCoverCertificate, Quiver, Shape, SummandExpression};

use crate::config::{ConfigFile, GlueConfiguration, Mode, QuiverSpec};

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub tol: Tolerance,
    /// Overrides the configuration's mode.
    pub mode: Option<Mode>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedDelzant {
    pub name: String,
    pub verdict: DelzantVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub first: String,
    pub second: String,
    pub record: IntersectionRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeType {
    pub source: String,
    pub target: String,
    /// Common characterizing angle, exact.
    pub angle: Option<AngleClass>,
    pub multiplicity: usize,
    pub numeric: Vec<f64>,
    pub intersection_type: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum Stage {
    Smoothness {
        passed: bool,
        verdict: Option<SmoothVerdict>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
    Delzant {
        passed: bool,
        polytopes: Vec<NamedDelzant>,
    },
    Pairwise {
        passed: bool,
        pairs: Vec<PairRecord>,
        offending: Vec<(String, String)>,
    },
    Quiver {
        passed: bool,
        vertices: Vec<String>,
        edges: Vec<(String, String)>,
        betti: Option<Betti>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        failure: Option<String>,
    },
    CycleCover {
        passed: bool,
        certificate: CycleCoverCertificate,
    },
    IntersectionTypes {
        passed: bool,
        edges: Vec<EdgeType>,
    },
    Topology {
        passed: bool,
        expression: Option<SummandExpression>,
        canonical: Option<String>,
        first_betti: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
    Obstruction {
        passed: bool,
        volumes: Vec<f64>,
        hl: Option<HlVerdict>,
        parity: Option<ParityVerdict>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        error: Option<String>,
    },
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Smoothness { .. } => "smoothness",
            Stage::Delzant { .. } => "delzant",
            Stage::Pairwise { .. } => "pairwise",
            Stage::Quiver { .. } => "quiver",
            Stage::CycleCover { .. } => "cycle_cover",
            Stage::IntersectionTypes { .. } => "intersection_types",
            Stage::Topology { .. } => "topology",
            Stage::Obstruction { .. } => "obstruction",
        }
    }

    pub fn passed(&self) -> bool {
        match self {
            Stage::Smoothness { passed, .. }
            | Stage::Delzant { passed, .. }
            | Stage::Pairwise { passed, .. }
            | Stage::Quiver { passed, .. }
            | Stage::CycleCover { passed, .. }
            | Stage::IntersectionTypes { passed, .. }
            | Stage::Topology { passed, .. }
            | Stage::Obstruction { passed, .. } => *passed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conclusion {
    pub hl: HlVerdict,
    pub parity: ParityVerdict,
    /// True when either obstruction excludes every holomorphic Lagrangian structure.
    pub never_hl: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub mode: Mode,
    pub passed: bool,
    pub failed_stage: Option<String>,
    pub diagnosis: Option<String>,
    pub stages: Vec<Stage>,
    pub topology: Option<String>,
    pub conclusion: Option<Conclusion>,
    /// The configuration that was checked.
    pub config: ConfigFile,
}

impl Report {
    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name() == name)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable summary, one line per stage.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mode: {}", self.mode);
        for stage in &self.stages {
            let status = if stage.passed() { "pass" } else { "FAIL" };
            let detail = match stage {
                Stage::Smoothness {
                    verdict: Some(SmoothVerdict::Smooth { subsets_checked }),
                    ..
                } => format!("{subsets_checked} subsets checked"),
                Stage::Smoothness { verdict: Some(v), .. } => format!("{v:?}"),
                Stage::Smoothness { error, .. } => error.clone().unwrap_or_default(),
                Stage::Delzant { polytopes, .. } => {
                    let bad: Vec<String> = polytopes
                        .iter()
                        .filter(|p| !p.verdict.is_delzant())
                        .map(|p| format!("{}: {:?}", p.name, p.verdict))
                        .collect();
                    if bad.is_empty() {
                        format!("{} polytopes", polytopes.len())
                    } else {
                        bad.join("; ")
                    }
                }
                Stage::Pairwise { pairs, offending, .. } => {
                    let count = |kind: &str| pairs.iter().filter(|p| p.record.kind_name() == kind).count();
                    let mut d = format!("{} standard, {} disjoint", count("standard_vertex"), count("disjoint"));
                    for (a, b) in offending {
                        let _ = write!(d, "; non-standard ({a}, {b})");
                    }
                    d
                }
                Stage::Quiver {
                    vertices,
                    edges,
                    betti,
                    failure,
                    ..
                } => match (failure, betti) {
                    (Some(f), _) => f.clone(),
                    (None, Some(b)) => format!("{} vertices, {} edges, h0 = {}, h1 = {}", vertices.len(), edges.len(), b.h0, b.h1),
                    (None, None) => String::new(),
                },
                Stage::CycleCover { certificate, .. } => {
                    let uncovered = certificate.covered.iter().filter(|c| !**c).count();
                    format!("{} cycles, {uncovered} uncovered edges", certificate.cycles.len())
                }
                Stage::IntersectionTypes { edges, .. } => {
                    let bad: Vec<String> = edges
                        .iter()
                        .filter(|e| e.intersection_type != Some(1))
                        .map(|e| format!("{} -> {}: {:?} {}", e.source, e.target, e.intersection_type, e.error.clone().unwrap_or_default()))
                        .collect();
                    if bad.is_empty() {
                        format!("{} edges of type 1", edges.len())
                    } else {
                        bad.join("; ")
                    }
                }
                Stage::Topology { canonical, first_betti, error, .. } => match (canonical, error) {
                    (Some(c), _) => format!("{c} (b1 = {})", first_betti.map_or("?".into(), |b| b.to_string())),
                    (None, e) => e.clone().unwrap_or_default(),
                },
                Stage::Obstruction { hl, parity, error, .. } => match (hl, parity) {
                    (Some(h), Some(p)) => format!("homology: {h:?}; parity: {p:?}"),
                    _ => error.clone().unwrap_or_default(),
                },
            };
            let _ = writeln!(out, "{:<20}{status}  {detail}", stage.name());
        }
        match (&self.failed_stage, &self.conclusion) {
            (Some(stage), _) => {
                let _ = writeln!(out, "result: hypothesis violated at stage {stage}: {}", self.diagnosis.clone().unwrap_or_default());
            }
            (None, Some(c)) => {
                let _ = writeln!(
                    out,
                    "result: all hypotheses verified; {}",
                    if c.never_hl { "never holomorphic Lagrangian" } else { "holomorphic Lagrangian not excluded" }
                );
            }
            (None, None) => {}
        }
        out
    }
}

struct Ledger {
    config: ConfigFile,
    mode: Mode,
    stages: Vec<Stage>,
}

impl Ledger {
    fn fail(mut self, stage: Stage, diagnosis: String) -> Report {
        let name = stage.name().to_string();
        self.stages.push(stage);
        Report {
            mode: self.mode,
            passed: false,
            failed_stage: Some(name),
            diagnosis: Some(diagnosis),
            stages: self.stages,
            topology: None,
            conclusion: None,
            config: self.config,
        }
    }
}

fn shift(sign: i8) -> AngleClass {
    if sign < 0 {
        AngleClass::PI
    } else {
        AngleClass::ZERO
    }
}

/// Runs every stage in order, stopping at the first failure.
pub fn verify_all(cfg: &GlueConfiguration, opts: &VerifyOptions) -> Report {
    let tol = &opts.tol;
    let mode = opts.mode.unwrap_or(cfg.mode());
    let n = cfg.n();
    let names: Vec<String> = cfg.polytopes.iter().map(|p| p.name.clone()).collect();
    let mut ledger = Ledger {
        config: cfg.file.clone(),
        mode,
        stages: Vec::new(),
    };

    match check_smooth(&cfg.arrangement, false, tol) {
        Ok(verdict) if verdict.is_smooth() => ledger.stages.push(Stage::Smoothness {
            passed: true,
            verdict: Some(verdict),
            error: None,
        }),
        Ok(verdict) => {
            let diagnosis = format!("arrangement is not smooth: {verdict:?}");
            return ledger.fail(
                Stage::Smoothness {
                    passed: false,
                    verdict: Some(verdict),
                    error: None,
                },
                diagnosis,
            );
        }
        Err(e) => {
            return ledger.fail(
                Stage::Smoothness {
                    passed: false,
                    verdict: None,
                    error: Some(e.to_string()),
                },
                e.to_string(),
            )
        }
    }

    let mut delzant = Vec::new();
    for p in &cfg.polytopes {
        let verdict = match check_sigma_delzant(p, &cfg.arrangement, tol) {
            Ok(v) => v,
            Err(e) => return ledger.fail(Stage::Delzant { passed: false, polytopes: delzant }, format!("{}: {e}", p.name)),
        };
        delzant.push(NamedDelzant {
            name: p.name.clone(),
            verdict,
        });
    }
    if let Some(bad) = delzant.iter().find(|d| !d.verdict.is_delzant()) {
        let diagnosis = format!("{} is not sigma-Delzant: {:?}", bad.name, bad.verdict);
        return ledger.fail(Stage::Delzant { passed: false, polytopes: delzant }, diagnosis);
    }
    ledger.stages.push(Stage::Delzant {
        passed: true,
        polytopes: delzant,
    });

    let mut pairs = Vec::new();
    for i in 0..cfg.polytopes.len() {
        for j in i + 1..cfg.polytopes.len() {
            let record = match classify_intersection(&cfg.polytopes[i], &cfg.polytopes[j], tol) {
                Ok(r) => r,
                Err(e) => return ledger.fail(Stage::Pairwise { passed: false, pairs, offending: vec![] }, e.to_string()),
            };
            pairs.push(PairRecord {
                first: names[i].clone(),
                second: names[j].clone(),
                record,
            });
        }
    }
    let offending: Vec<(String, String)> = pairs
        .iter()
        .filter(|p| matches!(p.record, IntersectionRecord::NonStandard { .. }))
        .map(|p| (p.first.clone(), p.second.clone()))
        .collect();
    if !offending.is_empty() {
        let reasons: Vec<String> = pairs
            .iter()
            .filter_map(|p| match &p.record {
                IntersectionRecord::NonStandard { reason } => Some(format!("({}, {}): {reason}", p.first, p.second)),
                _ => None,
            })
            .collect();
        let diagnosis = format!("non-standard intersection {}", reasons.join("; "));
        return ledger.fail(Stage::Pairwise { passed: false, pairs, offending }, diagnosis);
    }

    let step = AngleClass::new(1, n as i64).expect("positive rank");
    let quiver_result = build_quiver(cfg, &pairs, step, mode);
    ledger.stages.push(Stage::Pairwise {
        passed: true,
        pairs: pairs.clone(),
        offending,
    });
    let quiver = match quiver_result {
        Ok(q) => q,
        Err((edges, failure)) => {
            return ledger.fail(
                Stage::Quiver {
                    passed: false,
                    vertices: names,
                    edges,
                    betti: None,
                    failure: Some(failure.clone()),
                },
                failure,
            )
        }
    };
    let edge_names: Vec<(String, String)> = quiver
        .edges()
        .iter()
        .map(|&(s, t)| (names[s].clone(), names[t].clone()))
        .collect();
    ledger.stages.push(Stage::Quiver {
        passed: true,
        vertices: names.clone(),
        edges: edge_names,
        betti: Some(betti(&quiver)),
        failure: None,
    });

    let certificate = cycle_cover(&quiver);
    if let Err(e) = certificate.validate(&quiver) {
        return ledger.fail(Stage::CycleCover { passed: false, certificate }, e.to_string());
    }
    if !certificate.cover {
        let uncovered: Vec<String> = quiver
            .edges()
            .iter()
            .zip(&certificate.covered)
            .filter(|(_, c)| !**c)
            .map(|(&(s, t), _)| format!("{} -> {}", names[s], names[t]))
            .collect();
        let diagnosis = format!("edges not covered by cycles: {}", uncovered.join(", "));
        return ledger.fail(Stage::CycleCover { passed: false, certificate }, diagnosis);
    }
    ledger.stages.push(Stage::CycleCover {
        passed: true,
        certificate,
    });

    let mut edge_types = Vec::new();
    for &(s, t) in quiver.edges() {
        let (ps, pt) = (&cfg.polytopes[s], &cfg.polytopes[t]);
        let signs = pairs
            .iter()
            .find_map(|p| match &p.record {
                IntersectionRecord::StandardVertex { signs, .. } if p.first == ps.name && p.second == pt.name => Some(*signs),
                IntersectionRecord::StandardVertex { signs, .. } if p.first == pt.name && p.second == ps.name => {
                    Some([signs[1], signs[0]])
                }
                _ => None,
            })
            .expect("quiver edges come from standard pairs");
        let theta_plus = ps.theta + shift(signs[0]);
        let theta_minus = pt.theta + shift(signs[1]);
        let mut entry = EdgeType {
            source: ps.name.clone(),
            target: pt.name.clone(),
            angle: None,
            multiplicity: 0,
            numeric: vec![],
            intersection_type: None,
            error: None,
        };
        match hk_angles(theta_plus, theta_minus, n, tol) {
            Ok(a) => {
                match intersection_type(&a.numeric, 2 * n, tol) {
                    Ok(k) => entry.intersection_type = Some(k),
                    Err(e) => entry.error = Some(e.to_string()),
                }
                entry.angle = Some(a.angle);
                entry.multiplicity = a.multiplicity;
                entry.numeric = a.numeric.angles;
            }
            Err(e) => entry.error = Some(e.to_string()),
        }
        edge_types.push(entry);
    }
    if let Some(bad) = edge_types.iter().find(|e| e.intersection_type != Some(1)) {
        let diagnosis = format!(
            "intersection {} -> {} is of type {:?}, expected 1",
            bad.source, bad.target, bad.intersection_type
        );
        return ledger.fail(Stage::IntersectionTypes { passed: false, edges: edge_types }, diagnosis);
    }
    ledger.stages.push(Stage::IntersectionTypes {
        passed: true,
        edges: edge_types,
    });

    let labels: Vec<(Shape, AngleClass)> = cfg
        .polytopes
        .iter()
        .map(|p| (Shape::of_base(p.base.spec(), n, &p.name), p.theta))
        .collect();
    let expression = glued_topology(&quiver, &labels, n).and_then(|e| first_betti(&e).map(|b| (e, b)));
    let (expression, b1) = match expression {
        Ok(x) => x,
        Err(e) => {
            return ledger.fail(
                Stage::Topology {
                    passed: false,
                    expression: None,
                    canonical: None,
                    first_betti: None,
                    error: Some(e.to_string()),
                },
                e.to_string(),
            )
        }
    };
    let canonical = expression.canonical();
    ledger.stages.push(Stage::Topology {
        passed: true,
        expression: Some(expression.clone()),
        canonical: Some(canonical.clone()),
        first_betti: Some(b1),
        error: None,
    });

    let volumes: Vec<f64> = cfg.polytopes.iter().map(lagrangian_volume).collect();
    let obstruction = cfg
        .polytopes
        .iter()
        .zip(&volumes)
        .map(|(p, &v)| CalibratedSummand::new(p.theta, n, v))
        .collect::<Result<Vec<_>, _>>()
        .and_then(|s| hl_obstruction(&s, n))
        .and_then(|hl| parity_obstruction(&expression).map(|parity| (hl, parity)));
    let (hl, parity) = match obstruction {
        Ok(x) => x,
        Err(e) => {
            return ledger.fail(
                Stage::Obstruction {
                    passed: false,
                    volumes,
                    hl: None,
                    parity: None,
                    error: Some(e.to_string()),
                },
                e.to_string(),
            )
        }
    };
    ledger.stages.push(Stage::Obstruction {
        passed: true,
        volumes,
        hl: Some(hl.clone()),
        parity: Some(parity),
        error: None,
    });
    let never_hl = hl == HlVerdict::NeverHl || parity == ParityVerdict::NeverHlByParity;
    Report {
        mode,
        passed: true,
        failed_stage: None,
        diagnosis: None,
        stages: ledger.stages,
        topology: Some(canonical),
        conclusion: Some(Conclusion { hl, parity, never_hl }),
        config: ledger.config,
    }
}

type QuiverFailure = (Vec<(String, String)>, String);

/// Builds the quiver from the pairwise records: an edge `A -> B` for every
/// standard pair meeting with angle `pi/n` from `A` to `B`.
fn build_quiver(
    cfg: &GlueConfiguration,
    pairs: &[PairRecord],
    step: AngleClass,
    mode: Mode,
) -> Result<Quiver, QuiverFailure> {
    let index = |name: &str| cfg.polytopes.iter().position(|p| p.name == name).expect("pair names are polytope names");
    let mut edges = Vec::new();
    for p in pairs {
        if let IntersectionRecord::StandardVertex { angle, .. } = &p.record {
            let (i, j) = (index(&p.first), index(&p.second));
            if *angle == step {
                edges.push((i, j));
            } else if *angle == -step {
                edges.push((j, i));
            } else {
                return Err((
                    vec![],
                    format!("({}, {}) intersect standardly with angle {angle}, expected {step}", p.first, p.second),
                ));
            }
        }
    }
    let named = |edges: &[(usize, usize)]| -> Vec<(String, String)> {
        edges
            .iter()
            .map(|&(s, t)| (cfg.polytopes[s].name.clone(), cfg.polytopes[t].name.clone()))
            .collect()
    };
    if let QuiverSpec::Edges(listed) = &cfg.file.quiver {
        let listed: Vec<(usize, usize)> = listed.iter().map(|(s, t)| (index(s), index(t))).collect();
        for &(s, t) in &listed {
            if !edges.contains(&(s, t)) {
                return Err((
                    named(&listed),
                    format!(
                        "listed edge {} -> {} is not a standard intersection with angle {step}",
                        cfg.polytopes[s].name, cfg.polytopes[t].name
                    ),
                ));
            }
        }
        if let Some(&(s, t)) = edges.iter().find(|e| !listed.contains(e)) {
            return Err((
                named(&listed),
                format!(
                    "{} and {} intersect but {} -> {} is not a listed edge",
                    cfg.polytopes[s].name, cfg.polytopes[t].name, cfg.polytopes[s].name, cfg.polytopes[t].name
                ),
            ));
        }
        edges = listed;
    }
    let names: Vec<String> = cfg.polytopes.iter().map(|p| p.name.clone()).collect();
    let quiver = Quiver::new(names, edges.clone()).map_err(|e| (named(&edges), e.to_string()))?;
    if mode == Mode::Main {
        let v = quiver.vertex_count();
        let mut out_deg = vec![0; v];
        let mut in_deg = vec![0; v];
        for &(s, t) in quiver.edges() {
            out_deg[s] += 1;
            in_deg[t] += 1;
        }
        let single_cycle = v > 0
            && out_deg.iter().chain(&in_deg).all(|&d| d == 1)
            && betti(&quiver).h0 == 1;
        if !single_cycle {
            return Err((
                named(&edges),
                "main mode needs one directed cycle through every polytope (use graph mode for general quivers)".into(),
            ));
        }
    }
    Ok(quiver)
}
