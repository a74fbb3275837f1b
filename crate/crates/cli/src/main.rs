use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use serde::Serialize;
use slag_core::foundations::Tolerance;
use slag_core::quiver::{betti, cycle_cover, edge_removal_profile, Betti, CycleCoverCertificate, EdgeRemoval, Quiver};
use slag_verify::config::{load_config, Mode};
use slag_verify::examples::{Example1, Example2, Example3};
use slag_verify::exit;
use slag_verify::pipeline::{verify_all, VerifyOptions};
use slag_verify::plot::render_svg;

#[derive(Parser)]
#[command(name = "slag-verify", version, about = "Verify gluing data for special Lagrangian submanifolds in toric hyper-Kähler manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every verification stage on a configuration.
    Check {
        config: PathBuf,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Geometric tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Generate one of the worked example configurations.
    Example {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        id: u8,
        /// Example 1: complex dimension.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Example 1: a_1,..,a_n.
        #[arg(long, value_delimiter = ',')]
        a: Option<Vec<f64>>,
        /// Example 1: 1-based coordinates of the unshifted group.
        #[arg(long, value_delimiter = ',')]
        plus: Option<Vec<usize>>,
        /// Example 2: first side length.
        #[arg(long, default_value_t = 1.0)]
        r1: f64,
        /// Example 2: second side length.
        #[arg(long, default_value_t = 2.0)]
        r2: f64,
        /// Example 2: move the fourth triangle onto the second.
        #[arg(long)]
        overlap: bool,
        /// Example 3: number of squares.
        #[arg(long, default_value_t = 2)]
        squares: usize,
        /// Example 3: increasing positions a_1,..,a_N.
        #[arg(long, value_delimiter = ',')]
        steps: Option<Vec<f64>>,
        /// Example 3: rectangle a, b and height c.
        #[arg(long, value_delimiter = ',', num_args = 1)]
        abc: Option<Vec<f64>>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Draw the complex-plane traces of a configuration.
    Plot {
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Analyse a quiver given as `a -> b` lines.
    Quiver {
        edges: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Serialize)]
struct QuiverReport {
    vertices: Vec<String>,
    edges: Vec<(String, String)>,
    betti: Betti,
    certificate: CycleCoverCertificate,
    removal: Vec<EdgeRemoval>,
}

fn write_out(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs a command; any error is an input error.
fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Check {
            config,
            report,
            tolerance,
            mode,
        } => {
            let cfg = load_config(&config)?;
            let tol = match tolerance {
                Some(t) if t.is_finite() && t > 0.0 => Tolerance::with_geom(t),
                Some(t) => bail!("tolerance must be positive, got {t}"),
                None => Tolerance::default(),
            };
            let result = verify_all(&cfg, &VerifyOptions { tol, mode });
            print!("{}", result.summary());
            if let Some(path) = report {
                write_out(Some(&path), &result.to_json())?;
            }
            Ok(result.exit_code())
        }
        Command::Example {
            id,
            n,
            a,
            plus,
            r1,
            r2,
            overlap,
            squares,
            steps,
            abc,
            output,
        } => {
            let file = match id {
                1 => {
                    let mut ex = Example1::with_defaults(n);
                    if let Some(a) = a {
                        ex.a = a;
                    }
                    if let Some(plus) = plus {
                        ex.plus = plus;
                    }
                    ex.generate()?
                }
                2 => Example2 { r1, r2, overlap }.generate()?,
                _ => {
                    let mut ex = Example3::with_defaults(squares);
                    if let Some(steps) = steps {
                        ex.steps = steps;
                    }
                    if let Some(abc) = abc {
                        let [a, b, c] = abc[..] else {
                            bail!("--abc needs three values");
                        };
                        (ex.a, ex.b, ex.c) = (a, b, c);
                    }
                    ex.generate()?
                }
            };
            let mut text = serde_json::to_string_pretty(&file)?;
            text.push('\n');
            write_out(output.as_deref(), &text)?;
            Ok(exit::VERIFIED)
        }
        Command::Plot { config, output } => {
            let cfg = load_config(&config)?;
            write_out(Some(&output), &render_svg(&cfg)?)?;
            Ok(exit::VERIFIED)
        }
        Command::Quiver { edges, json } => {
            let text = std::fs::read_to_string(&edges).with_context(|| format!("cannot read {}", edges.display()))?;
            let q = Quiver::parse_edge_list(&text)?;
            let certificate = cycle_cover(&q);
            certificate.validate(&q)?;
            let report = QuiverReport {
                vertices: q.vertices().to_vec(),
                edges: q
                    .edges()
                    .iter()
                    .map(|&(s, t)| (q.vertices()[s].clone(), q.vertices()[t].clone()))
                    .collect(),
                betti: betti(&q),
                removal: (0..q.edge_count())
                    .map(|h| edge_removal_profile(&q, h))
                    .collect::<Result<_, _>>()?,
                certificate,
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("vertices: {}, edges: {}", report.vertices.len(), report.edges.len());
                println!("h0 = {}, h1 = {}", report.betti.h0, report.betti.h1);
                println!("covered by cycles: {}", report.certificate.cover);
                for (cycle, (s, t)) in report.certificate.covered.iter().zip(&report.edges) {
                    let status = if *cycle { "on a cycle" } else { "not on a cycle" };
                    println!("  {s} -> {t}: {status}");
                }
                for c in &report.certificate.cycles {
                    let walk: Vec<String> = c
                        .edges
                        .iter()
                        .map(|&h| format!("{} -> {}", report.edges[h].0, report.edges[h].1))
                        .collect();
                    println!("cycle x{}: {}", c.weight, walk.join(", "));
                }
            }
            Ok(exit::VERIFIED)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::INPUT_ERROR as u8)
        }
    }
}
