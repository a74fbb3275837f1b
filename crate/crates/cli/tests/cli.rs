use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use slag_verify::config::{load_config, parse_config, validate};
use slag_verify::examples::Example2;
use slag_verify::plot::{render_svg, PlotError};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slag-verify"))
}

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = manifest().join("configs/example2.json");
    let report = dir.path().join("report.json");
    let out = run(&["check", path(&good), "--report", path(&report)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("2ℙ² # 2ℙ̄² # (S¹×S³)"));
    let golden = std::fs::read_to_string(manifest().join("tests/golden/example2_report.json")).unwrap();
    assert_eq!(std::fs::read_to_string(&report).unwrap(), golden);

    let bad = manifest().join("configs/example2_overlap.json");
    let out = run(&["check", path(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("(T2, T4)"));

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"torus\": ").unwrap();
    assert_eq!(run(&["check", path(&broken)]).status.code(), Some(2));
    assert_eq!(run(&["check", path(&dir.path().join("missing.json"))]).status.code(), Some(2));
    assert_eq!(run(&["check", path(&good), "--tolerance", "-1"]).status.code(), Some(2));
}

#[test]
fn mode_flag_overrides_config() {
    let cfg = manifest().join("configs/example3_n2.json");
    assert_eq!(run(&["check", path(&cfg)]).status.code(), Some(0));
    assert_eq!(run(&["check", path(&cfg), "--mode", "main"]).status.code(), Some(1));
}

#[test]
fn example_command_writes_shipped_configs() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 4] = [
        (&["example", "1", "--n", "3"], "example1_n3.json"),
        (&["example", "2"], "example2.json"),
        (&["example", "2", "--overlap"], "example2_overlap.json"),
        (&["example", "3", "--squares", "4"], "example3_n4.json"),
    ];
    for (args, name) in cases {
        let out = dir.path().join(name);
        let mut all: Vec<&str> = args.to_vec();
        all.extend(["-o", path(&out)]);
        assert_eq!(run(&all).status.code(), Some(0), "{name}");
        let shipped = std::fs::read_to_string(manifest().join("configs").join(name)).unwrap();
        assert_eq!(std::fs::read_to_string(&out).unwrap(), shipped, "{name}");
    }
    assert_eq!(run(&["example", "1", "--n", "3", "--a", "9,9,9"]).status.code(), Some(2));
    assert_eq!(run(&["example", "3", "--steps", "2,1"]).status.code(), Some(2));
    assert_eq!(run(&["example", "2", "--r1", "0"]).status.code(), Some(2));
    assert_eq!(run(&["example", "4"]).status.code(), Some(2));
}

#[test]
fn plot_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plot.svg");
    let cfg = manifest().join("configs/example2.json");
    assert_eq!(run(&["plot", path(&cfg), "-o", path(&out)]).status.code(), Some(0));
    let golden = std::fs::read_to_string(manifest().join("tests/golden/example2.svg")).unwrap();
    assert_eq!(std::fs::read_to_string(out).unwrap(), golden);
}

#[test]
fn plot_of_example_one_has_one_panel_per_coordinate() {
    let cfg = load_config(&manifest().join("configs/example1_n3.json")).unwrap();
    let svg = render_svg(&cfg).unwrap();
    assert_eq!(svg.matches("<g id=\"coordinate-").count(), 3);
    // 2n hyperplane points and 2n segments in each panel.
    assert_eq!(svg.matches("<circle").count(), 18);
    assert_eq!(svg.matches("stroke-width=\"3\"").count(), 18);
}

#[test]
fn plot_rejects_non_planar_data_and_draws_axes_only_when_empty() {
    let mut file = Example2::default().generate().unwrap();
    file.polytopes.clear();
    let svg = render_svg(&validate(file.clone()).unwrap()).unwrap();
    assert!(!svg.contains("stroke-width=\"3\""));
    assert_eq!(svg.matches("stroke=\"#999999\"").count(), 4);

    file.lambda[2].0[0] = 0.5;
    assert!(matches!(
        render_svg(&validate(file).unwrap()),
        Err(PlotError::NonPlanar { .. })
    ));
}

#[test]
fn quiver_command() {
    let edges = manifest().join("configs/two_cycles.txt");
    let out = run(&["quiver", path(&edges), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["betti"]["h1"], 2);
    assert_eq!(json["certificate"]["cover"], false);
    let text = String::from_utf8(run(&["quiver", path(&edges)]).stdout).unwrap();
    assert!(text.contains("e -> f: not on a cycle"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "a -> \n").unwrap();
    assert_eq!(run(&["quiver", path(&bad)]).status.code(), Some(2));
}

#[test]
fn shipped_example_two_has_expected_shape() {
    let text = std::fs::read_to_string(manifest().join("configs/example2.json")).unwrap();
    let cfg = validate(parse_config(&text).unwrap()).unwrap();
    assert_eq!(cfg.arrangement.d(), 5);
    assert_eq!(cfg.n(), 2);
}
