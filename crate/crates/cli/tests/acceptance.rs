//! Acceptance checks, one line per criterion. Run with
//! `cargo test -p slag-verify --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slag_core::foundations::{AngleClass, Direction, ImVector, Tolerance};
use slag_core::local_model::{
    characterizing_angles, decompose_invariant, hk_angles, hk_frame, intersection_type, moment, signed_sum,
    standard_form_restriction, v_basis, CMatrix, FlatSubspace,
};
use slag_core::obstruction::{hl_obstruction, homology_term, CalibratedSummand, HlVerdict, ParityVerdict};
use slag_core::polytope::IntersectionRecord;
use slag_core::quiver::{betti, cycle_cover, edge_removal_profile, EdgeRemoval, Quiver};
use slag_verify::config::{parse_config, validate, ConfigFile};
use slag_verify::examples::{Example1, Example2, Example3};
use slag_verify::pipeline::{verify_all, Report, Stage, VerifyOptions};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed_verify(file: ConfigFile) -> Result<(Report, Duration), String> {
    let start = Instant::now();
    let cfg = validate(file).map_err(|e| e.to_string())?;
    let report = verify_all(&cfg, &VerifyOptions::default());
    Ok((report, start.elapsed()))
}

fn stage_edges(report: &Report) -> Vec<(String, String)> {
    match report.stage("quiver") {
        Some(Stage::Quiver { edges, .. }) => edges.clone(),
        _ => vec![],
    }
}

fn example_two() -> Outcome {
    let file = Example2::default().generate().map_err(|e| e.to_string())?;
    let (report, took) = timed_verify(file)?;
    ensure(report.passed, || report.summary())?;
    let mut edges = stage_edges(&report);
    edges.sort();
    let cycle: Vec<(String, String)> = ["T1", "T2", "T3", "T4"]
        .iter()
        .zip(["T2", "T3", "T4", "T1"])
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let mut sorted = cycle.clone();
    sorted.sort();
    ensure(edges == sorted, || format!("quiver edges {edges:?}"))?;
    if let Some(Stage::IntersectionTypes { edges, .. }) = report.stage("intersection_types") {
        for e in edges {
            let pair_angle = AngleClass::new(1, 2).unwrap();
            // The record stores half the direction difference; each pair turns by pi/2.
            ensure(e.angle.map(|a| a + a) == Some(pair_angle), || format!("{e:?}"))?;
            ensure(e.intersection_type == Some(1), || format!("{e:?}"))?;
        }
    }
    let topology = report.topology.clone().unwrap_or_default();
    ensure(topology == "2ℙ² # 2ℙ̄² # (S¹×S³)", || topology.clone())?;
    let hl = report.conclusion.as_ref().map(|c| c.hl.clone());
    ensure(hl == Some(HlVerdict::NeverHl), || format!("{hl:?}"))?;
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("{topology}, {took:.2?}"))
}

fn cyclic_distance(k: usize, l: usize, m: usize) -> usize {
    let d = (k + m - l) % m;
    d.min(m - d)
}

fn example_one() -> Outcome {
    let mut notes = vec![];
    for n in [2usize, 3] {
        let file = Example1::with_defaults(n).generate().map_err(|e| e.to_string())?;
        let (report, took) = timed_verify(file)?;
        ensure(report.passed, || report.summary())?;
        let expected = format!("{}(ℙ¹){} # (S¹×S{})", 2 * n, ["²", "³"][n - 2], ["³", "⁵"][n - 2]);
        let topology = report.topology.clone().unwrap_or_default();
        ensure(topology == expected, || format!("{topology} != {expected}"))?;
        match report.stage("topology") {
            Some(Stage::Topology { first_betti, .. }) => ensure(*first_betti == Some(1), || format!("b1 {first_betti:?}"))?,
            _ => return Err("no topology stage".into()),
        }
        let parity = report.conclusion.as_ref().map(|c| c.parity);
        ensure(parity == Some(ParityVerdict::NeverHlByParity), || format!("{parity:?}"))?;
        let Some(Stage::Pairwise { pairs, .. }) = report.stage("pairwise") else {
            return Err("no pairwise stage".into());
        };
        ensure(pairs.len() == n * (2 * n - 1), || format!("{} pairs", pairs.len()))?;
        for p in pairs {
            let (k, l) = (p.first[1..].parse::<usize>().unwrap(), p.second[1..].parse::<usize>().unwrap());
            let disjoint = matches!(p.record, IntersectionRecord::Disjoint);
            ensure(disjoint == (cyclic_distance(k, l, 2 * n) > 1), || {
                format!("({}, {}) is {}", p.first, p.second, p.record.kind_name())
            })?;
        }
        ensure(took < Duration::from_secs(5), || format!("n={n} took {took:?}"))?;
        notes.push(format!("n={n}: {topology}, {took:.2?}"));
    }
    Ok(notes.join("; "))
}

fn example_three() -> Outcome {
    let mut total = Duration::ZERO;
    for big_n in 1..=4usize {
        let file = Example3::with_defaults(big_n).generate().map_err(|e| e.to_string())?;
        let (report, took) = timed_verify(file)?;
        total += took;
        ensure(report.passed, || report.summary())?;
        let Some(Stage::Quiver { vertices, betti, .. }) = report.stage("quiver") else {
            return Err("no quiver stage".into());
        };
        ensure(vertices.len() == 3 * big_n + 1, || format!("N={big_n}: {} vertices", vertices.len()))?;
        ensure(betti.map(|b| b.h1) == Some(big_n), || format!("N={big_n}: {betti:?}"))?;
        let Some(Stage::CycleCover { certificate, .. }) = report.stage("cycle_cover") else {
            return Err("no cycle cover stage".into());
        };
        ensure(certificate.cover, || format!("N={big_n}: not covered"))?;
        let handles = if big_n == 1 { String::new() } else { big_n.to_string() };
        let expected = format!("{}(ℙ¹)² # {handles}(S¹×S³)", 3 * big_n + 1);
        let topology = report.topology.clone().unwrap_or_default();
        ensure(topology == expected, || format!("{topology} != {expected}"))?;
        ensure(took < Duration::from_secs(5), || format!("N={big_n} took {took:?}"))?;
    }
    Ok(format!("N = 1..4, {total:.2?} total"))
}

fn angles_oracle() -> Outcome {
    let tol = Tolerance::default();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 1..=4i64 {
        let m = 2 * n as usize;
        for kp in 1..=2 * n {
            for km in 1..=2 * n {
                if (kp - km) % n == 0 {
                    continue;
                }
                let (tp, tm) = (AngleClass::new(kp, n).unwrap(), AngleClass::new(km, n).unwrap());
                let closed = hk_angles(tp, tm, n as usize, &tol).map_err(|e| e.to_string())?;
                let eigen = characterizing_angles(&hk_frame(tp.radians(), n as usize), &hk_frame(tm.radians(), n as usize), &tol)
                    .map_err(|e| e.to_string())?;
                ensure(eigen.angles.len() == m, || format!("n={n}: {} angles", eigen.angles.len()))?;
                for a in &eigen.angles {
                    worst = worst.max((a - closed.angle.radians()).abs());
                }
                let k = intersection_type(&eigen, m, &tol).map_err(|e| e.to_string())?;
                let step = AngleClass::new(1, n).unwrap();
                ensure((k == 1) == (tm - tp == step), || format!("n={n} k+={kp} k-={km}: type {k}"))?;
                let back = characterizing_angles(&hk_frame(tm.radians(), n as usize), &hk_frame(tp.radians(), n as usize), &tol)
                    .map_err(|e| e.to_string())?;
                let kb = intersection_type(&back, m, &tol).map_err(|e| e.to_string())?;
                ensure(kb == m - k, || format!("n={n} k+={kp} k-={km}: reversed type {kb}, forward {k}"))?;
                cases += 1;
            }
        }
    }
    ensure(worst < 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!("{cases} angle pairs, max deviation {worst:.1e}"))
}

fn random_unitary(rng: &mut ChaCha8Rng, m: usize) -> CMatrix {
    CMatrix::from_fn(m, m, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .qr()
        .q()
}

fn random_orthogonal(rng: &mut ChaCha8Rng, m: usize, det: f64) -> CMatrix {
    let mut q = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0)).qr().q();
    if q.determinant() * det < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q.map(|x| Complex64::new(x, 0.0))
}

fn gauge_invariance() -> Outcome {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let m = 1 + trial % 8;
        let (gp, gm) = (random_unitary(&mut rng, m), random_unitary(&mut rng, m));
        let base = characterizing_angles(&gp, &gm, &tol).map_err(|e| e.to_string())?;
        let hp = random_orthogonal(&mut rng, m, 1.0);
        let flip = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let hm = random_orthogonal(&mut rng, m, flip);
        let moved = characterizing_angles(&(&hp * &gp), &(&hm * &gm), &tol).map_err(|e| e.to_string())?;
        worst = worst.max(base.max_deviation(&moved));
    }
    ensure(worst < 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!("200 trials, max deviation {worst:.1e}"))
}

fn reaches(q: &Quiver, from: usize, to: usize) -> bool {
    let mut seen = vec![false; q.vertex_count()];
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        if v == to {
            return true;
        }
        if !std::mem::replace(&mut seen[v], true) {
            stack.extend(q.edges().iter().filter(|e| e.0 == v).map(|e| e.1));
        }
    }
    false
}

fn quiver_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut covered = 0;
    for i in 0..500 {
        let v = rng.random_range(1..=12);
        let e = rng.random_range(0..=30);
        let edges = (0..e).map(|_| (rng.random_range(0..v), rng.random_range(0..v))).collect();
        let q = Quiver::unlabelled(v, edges).map_err(|e| e.to_string())?;
        let b = betti(&q);
        ensure(b.h0 as i64 - b.h1 as i64 == v as i64 - e as i64, || format!("quiver {i}: Euler identity"))?;
        let cert = cycle_cover(&q);
        cert.validate(&q).map_err(|err| format!("quiver {i}: {err}"))?;
        for (h, &(s, t)) in q.edges().iter().enumerate() {
            ensure(cert.covered[h] == reaches(&q, t, s), || format!("quiver {i} edge {h}"))?;
        }
        if cert.cover {
            covered += 1;
            ensure(cert.kernel_vector.iter().all(|&a| a > 0), || format!("quiver {i}: A not positive"))?;
            ensure(q.apply_boundary(&cert.kernel_vector).iter().all(|&x| x == 0), || format!("quiver {i}: dA != 0"))?;
        }
        for h in 0..q.edge_count() {
            let ok = match edge_removal_profile(&q, h).map_err(|e| e.to_string())? {
                EdgeRemoval::BridgeLike { h0, h1 } => (h0, h1) == (b.h0 + 1, b.h1),
                EdgeRemoval::CycleEdge { h0, h1 } => (h0, h1) == (b.h0, b.h1 - 1),
            };
            ensure(ok, || format!("quiver {i} edge {h}: unexpected removal profile"))?;
        }
    }
    Ok(format!("500 quivers, {covered} covered by cycles"))
}

fn random_direction(rng: &mut ChaCha8Rng) -> Direction {
    loop {
        let v = ImVector::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if v.norm() > 0.1 {
            return Direction::normalize(v).unwrap();
        }
    }
}

fn local_model() -> Outcome {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ray: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..=4);
        let i = rng.random_range(0..n);
        let y = random_direction(&mut rng);
        let basis = v_basis(i, &y, n);
        for _ in 0..5 {
            let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let v = &basis[0] * Complex64::new(a, 0.0) + &basis[1] * Complex64::new(b, 0.0);
            for (j, c) in moment(&v).0.iter().enumerate() {
                if j == i {
                    let along = c.dot(&y.vector());
                    ensure(along >= -1e-9, || format!("negative along {along}"))?;
                    ray = ray.max(c.reject(&y).norm() / along.max(1.0));
                } else {
                    ray = ray.max(c.norm());
                }
            }
        }
    }
    ensure(ray < 1e-9, || format!("off-ray component {ray:e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut hl: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..=4);
        let sigma = random_direction(&mut rng);
        let signs: Vec<i8> = (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
        let v = signed_sum(&sigma, &signs).map_err(|e| e.to_string())?;
        let (r1, r2) = standard_form_restriction(&v, &sigma);
        hl = hl.max(r1).max(r2);
        let back = decompose_invariant(&v, &sigma, &tol).map_err(|e| e.to_string())?;
        ensure(back == signs, || format!("signs {back:?} != {signs:?}"))?;
    }
    ensure(hl < 1e-12, || format!("signed sums deviate by {hl:e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut rejected = 0;
    for _ in 0..100 {
        let (sigma, other) = (random_direction(&mut rng), random_direction(&mut rng));
        if sigma.vector().cross(&other.vector()).norm() < 0.1 {
            continue;
        }
        let v = FlatSubspace::direct_sum(2, &[v_basis(0, &sigma, 2), v_basis(1, &other, 2)]).map_err(|e| e.to_string())?;
        let (r1, r2) = standard_form_restriction(&v, &sigma);
        ensure(r1.max(r2) > 1e-3, || "mixed directions pass the test".into())?;
        ensure(decompose_invariant(&v, &sigma, &tol).is_err(), || "mixed directions decompose".into())?;
        rejected += 1;
    }
    Ok(format!("ray deviation {ray:.1e}, signed sums {hl:.1e}, {rejected} mixed sums rejected"))
}

fn obstruction() -> Outcome {
    let mut checked = 0;
    for n in 1..=6usize {
        for k in 1..=2 * n as i64 {
            for ka in 1..=2 * n as i64 {
                let one = (homology_term(k - ka, n) - 1.0).abs() <= 1e-12;
                ensure(one == ((k - ka) % n as i64 == 0), || format!("n={n} k={k} k_a={ka}"))?;
                checked += 1;
            }
        }
    }
    for n in 2..=6usize {
        let summands = (1..=2 * n as i64)
            .map(|k| CalibratedSummand::new(AngleClass::new(k, n as i64).unwrap(), n, 1.0 + k as f64))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let verdict = hl_obstruction(&summands, n).map_err(|e| e.to_string())?;
        ensure(verdict == HlVerdict::NeverHl, || format!("n={n}: {verdict:?}"))?;
    }
    Ok(format!("{checked} (k, k_a) pairs, full rotations n = 2..6"))
}

fn determinism() -> Outcome {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut names: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    for path in &names {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let run = |file: ConfigFile| -> Result<String, String> {
            let cfg = validate(file).map_err(|e| e.to_string())?;
            Ok(verify_all(&cfg, &VerifyOptions::default()).to_json())
        };
        let parse = || parse_config(&text).map_err(|e| e.to_string());
        let (first, second) = (run(parse()?)?, run(parse()?)?);
        let shown = path.display();
        ensure(first == second, || format!("{shown}: reports differ"))?;
        let report: Report = serde_json::from_str(&first).map_err(|e| e.to_string())?;
        ensure(report.to_json() == first, || format!("{shown}: report round trip"))?;
        ensure(report.config == parse()?, || format!("{shown}: config echo differs"))?;
        ensure(run(report.config)? == first, || format!("{shown}: re-run from report differs"))?;
    }
    Ok(format!("{} shipped configs", names.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("example 2 end-to-end", example_two),
        ("example 1 for n = 2, 3", example_one),
        ("example 3 for N = 1..4", example_three),
        ("characterizing angles: closed form vs eigendecomposition", angles_oracle),
        ("characterizing angles: gauge invariance", gauge_invariance),
        ("quiver suite", quiver_suite),
        ("local model", local_model),
        ("obstruction arithmetic", obstruction),
        ("determinism and round trip", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS  {name} ({detail}) [{took:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why} [{took:.2?}]");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
