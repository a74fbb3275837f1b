//! JSON configuration: torus datum, lambda, named polytopes and an optional quiver.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use slag_core::arrangement::{Arrangement, TorusDatum};
use slag_core::foundations::{AngleClass, FlatVector, ImVector, Tolerance};
use slag_core::polytope::{BasePolytope, BaseSpec, DelzantPolytope};

/// How the quiver edges must be arranged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// A single directed cycle through every polytope, each step turning by pi/n.
    #[default]
    Main,
    /// Any quiver whose edges are standard pi/n intersections and whose edges are covered by cycles.
    Graph,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Main => "main",
            Mode::Graph => "graph",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusSpec {
    pub n: usize,
    pub d: usize,
    /// `n` rows of length `d`.
    pub u: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeSpec {
    pub name: String,
    pub q: FlatVector,
    pub theta: AngleClass,
    pub base: BaseSpec,
    pub scale: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuiverKeyword {
    Auto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuiverSpec {
    Keyword(QuiverKeyword),
    /// `[source, target]` polytope names.
    Edges(Vec<(String, String)>),
}

impl Default for QuiverSpec {
    fn default() -> Self {
        QuiverSpec::Keyword(QuiverKeyword::Auto)
    }
}

/// The on-disk document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    pub torus: TorusSpec,
    pub lambda: Vec<ImVector>,
    pub polytopes: Vec<PolytopeSpec>,
    #[serde(default)]
    pub quiver: QuiverSpec,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("schema violation at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema violation in `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("invalid `{field}`: {source}")]
    Invalid {
        field: String,
        source: slag_core::Error,
    },
}

impl ConfigError {
    fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Schema {
            field: field.into(),
            message: message.into(),
        }
    }

    fn invalid(field: impl Into<String>) -> impl FnOnce(slag_core::Error) -> Self {
        let field = field.into();
        move |source| ConfigError::Invalid { field, source }
    }
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct GlueConfiguration {
    pub file: ConfigFile,
    pub arrangement: Arrangement,
    pub polytopes: Vec<DelzantPolytope>,
}

impl GlueConfiguration {
    pub fn n(&self) -> usize {
        self.arrangement.n()
    }

    pub fn mode(&self) -> Mode {
        self.file.mode.unwrap_or_default()
    }
}

pub fn parse_config(text: &str) -> Result<ConfigFile, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn load_config(path: &Path) -> Result<GlueConfiguration, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    validate(parse_config(&text)?)
}

pub fn validate(file: ConfigFile) -> Result<GlueConfiguration, ConfigError> {
    let TorusSpec { n, d, u } = &file.torus;
    let (n, d) = (*n, *d);
    if u.len() != n {
        return Err(ConfigError::schema("torus.u", format!("expected {n} rows, found {}", u.len())));
    }
    for (i, row) in u.iter().enumerate() {
        if row.len() != d {
            return Err(ConfigError::schema(
                format!("torus.u[{i}]"),
                format!("expected {d} entries, found {}", row.len()),
            ));
        }
    }
    if file.lambda.len() < d {
        return Err(ConfigError::schema(
            format!("lambda[{}]", file.lambda.len()),
            format!("missing entry: d = {d} but only {} given", file.lambda.len()),
        ));
    }
    if file.lambda.len() > d {
        return Err(ConfigError::schema(
            format!("lambda[{d}]"),
            format!("unexpected entry: d = {d} but {} given", file.lambda.len()),
        ));
    }
    if let Some(k) = file.lambda.iter().position(|l| !l.is_finite()) {
        return Err(ConfigError::schema(format!("lambda[{k}]"), "non-finite component"));
    }
    let torus = TorusDatum::from_rows(u).map_err(ConfigError::invalid("torus.u"))?;
    let arrangement = Arrangement::new(torus, file.lambda.clone()).map_err(ConfigError::invalid("lambda"))?;

    let tol = Tolerance::default();
    let mut polytopes = Vec::with_capacity(file.polytopes.len());
    for (i, p) in file.polytopes.iter().enumerate() {
        let field = format!("polytopes[{i}]");
        if file.polytopes[..i].iter().any(|o| o.name == p.name) {
            return Err(ConfigError::schema(format!("{field}.name"), format!("duplicate name {:?}", p.name)));
        }
        if p.q.rank() != n {
            return Err(ConfigError::schema(
                format!("{field}.q"),
                format!("expected {n} triples, found {}", p.q.rank()),
            ));
        }
        let base = BasePolytope::from_spec(&p.base, n, &tol).map_err(ConfigError::invalid(format!("{field}.base")))?;
        let poly = DelzantPolytope::new(p.name.clone(), p.q.clone(), p.theta, base, p.scale)
            .map_err(ConfigError::invalid(field))?;
        polytopes.push(poly);
    }
    if let QuiverSpec::Edges(edges) = &file.quiver {
        for (h, (s, t)) in edges.iter().enumerate() {
            for name in [s, t] {
                if !file.polytopes.iter().any(|p| &p.name == name) {
                    return Err(ConfigError::schema(format!("quiver[{h}]"), format!("unknown polytope {name:?}")));
                }
            }
        }
    }
    Ok(GlueConfiguration {
        file,
        arrangement,
        polytopes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "torus": {"n": 1, "d": 2, "u": [[1, 1]]},
        "lambda": [[0, 0, 0], [0, -1, 0]],
        "polytopes": [
            {"name": "a", "q": [[0, 0, 0]], "theta": {"num": 0, "den": 1}, "base": {"type": "box", "r": [1.0]}, "scale": 1.0}
        ]
    }"#;

    #[test]
    fn loads_minimal_config() {
        let cfg = validate(parse_config(SMALL).unwrap()).unwrap();
        assert_eq!(cfg.n(), 1);
        assert_eq!(cfg.mode(), Mode::Main);
        assert_eq!(cfg.file.quiver, QuiverSpec::default());
    }

    #[test]
    fn missing_lambda_names_index() {
        let text = SMALL.replace(r#"[[0, 0, 0], [0, -1, 0]]"#, "[[0, 0, 0]]");
        let err = validate(parse_config(&text).unwrap()).unwrap_err();
        assert!(err.to_string().contains("lambda[1]"), "{err}");
    }

    #[test]
    fn non_surjective_u() {
        let text = SMALL
            .replace(r#""d": 2, "u": [[1, 1]]"#, r#""d": 1, "u": [[2]]"#)
            .replace(r#"[[0, 0, 0], [0, -1, 0]]"#, "[[0, 0, 0]]");
        let err = validate(parse_config(&text).unwrap()).unwrap_err();
        assert!(matches!(
            err,
            ConfigError::Invalid {
                source: slag_core::Error::NonSurjective { .. },
                ..
            }
        ));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_config("{\n  \"torus\": 3\n}").unwrap_err();
        assert!(matches!(err, ConfigError::Syntax { line: 2, .. }), "{err}");
    }

    #[test]
    fn explicit_quiver_round_trips() {
        let text = SMALL.replace("\n    }", ",\n \"quiver\": [[\"a\", \"a\"]], \"mode\": \"graph\"\n    }");
        let file = parse_config(&text).unwrap();
        assert_eq!(file.quiver, QuiverSpec::Edges(vec![("a".into(), "a".into())]));
        let again = parse_config(&serde_json::to_string(&file).unwrap()).unwrap();
        assert_eq!(again, file);
    }
}
