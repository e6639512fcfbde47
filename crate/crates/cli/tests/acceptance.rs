//! Acceptance suite: one test per criterion, each driving the documented command.
//! Every test prints a single `criterion N: PASS|FAIL ...` line.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;
use tempfile::TempDir;

fn origami(dir: &Path, args: &[&str]) -> (Output, Duration) {
    let t0 = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_origami")).current_dir(dir).args(args).output().expect("spawn");
    (out, t0.elapsed())
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).expect(name)).expect(name)
}

fn rows(dir: &Path, name: &str) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(dir.join(name)).expect(name);
    r.records().map(Result::unwrap).collect()
}

fn col(r: &csv::StringRecord, headers: &csv::StringRecord, name: &str) -> String {
    let i = headers.iter().position(|h| h == name).unwrap_or_else(|| panic!("column {name}"));
    r[i].to_string()
}

fn headers(dir: &Path, name: &str) -> csv::StringRecord {
    csv::Reader::from_path(dir.join(name)).unwrap().headers().unwrap().clone()
}

fn verdict(n: u32, ok: bool, detail: String) {
    let line = format!("criterion {n}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    println!("{line}");
    eprintln!("{line}");
    assert!(ok, "{line}");
}

#[test]
fn criterion_01_x_o_invariants() {
    let d = TempDir::new().unwrap();
    let (o, dt) = origami(d.path(), &["info", "--out", "info.json"]);
    let j = json(d.path(), "info.json");
    let orders: Vec<u64> = j["cones"].as_array().unwrap().iter().map(|c| c["order"].as_u64().unwrap()).collect();
    let angles: Vec<u64> = j["cones"].as_array().unwrap().iter().map(|c| c["angle_over_pi"].as_u64().unwrap()).collect();
    let ok = o.status.success()
        && j["n"] == 12
        && orders == [2, 2, 2]
        && angles == [6, 6, 6]
        && j["regular_vertices"] == 3
        && j["genus"] == 4
        && j["automorphism_group_order"] == 3
        && dt < Duration::from_secs(1);
    verdict(
        1,
        ok,
        format!(
            "n={} cones={orders:?} regular={} genus={} aut={} in {dt:?}",
            j["n"], j["regular_vertices"], j["genus"], j["automorphism_group_order"]
        ),
    );
}

#[test]
fn criterion_02_sl2_fixed_point() {
    let d = TempDir::new().unwrap();
    let t0 = Instant::now();
    let mut fixed = vec![];
    for (name, args) in [
        ("T", vec!["act", "--matrix", "1,1,0,1", "--out", "t.origami"]),
        ("R", vec!["act", "--matrix", "0,-1,1,0", "--out", "r.origami"]),
        ("S", vec!["act", "--reflect", "--out", "s.origami"]),
    ] {
        let (o, _) = origami(d.path(), &args);
        let s = String::from_utf8_lossy(&o.stdout).into_owned();
        fixed.push((name, o.status.success() && s.lines().any(|l| l == "isomorphic_to_source=true")));
    }
    let (o, _) = origami(d.path(), &["orbit", "--out", "orbit"]);
    let j = json(d.path(), "orbit/orbit.json");
    let dt = t0.elapsed();
    let ok = fixed.iter().all(|f| f.1) && o.status.success() && j["classes"] == 1 && j["complete"] == true;
    verdict(2, ok && dt < Duration::from_secs(1), format!("fixed={fixed:?} orbit_classes={} in {dt:?}", j["classes"]));
}

#[test]
fn criterion_03_cf_suite() {
    let d = TempDir::new().unwrap();
    let (o, dt) = origami(d.path(), &["cf", "--suite", "100", "--out", "cf.json"]);
    let j = json(d.path(), "cf.json");
    let slopes = j["slopes"].as_array().unwrap();
    let max_depth = slopes.iter().map(|s| s["depth"].as_u64().unwrap()).max().unwrap();
    let ok = o.status.success() && j["failures"] == 0 && slopes.len() >= 100 && max_depth <= 30;
    verdict(3, ok, format!("slopes={} failures={} max_depth={max_depth} in {dt:?}", slopes.len(), j["failures"]));
}

#[test]
fn criterion_04_transition_relation() {
    let d = TempDir::new().unwrap();
    let (o, dt) = origami(d.path(), &["verify", "transitions", "--cone", "0,1", "--out", "tr.json"]);
    let j = json(d.path(), "tr.json");
    let samples = j["relation"]["samples_per_letter"].as_u64().unwrap();
    let letters = j["checks"].as_array().unwrap().len();
    let ok = o.status.success()
        && j["violations"] == 0
        && j["unrealized"] == 0
        && samples >= 10_000
        && letters == 12
        && dt < Duration::from_secs(60);
    let bad: Vec<String> = j["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| !c["violations"].as_array().unwrap().is_empty() || !c["unrealized"].as_array().unwrap().is_empty())
        .map(|c| format!("{}: sampled {} asserted {}", c["letter"], c["sampled"], c["asserted"]))
        .collect();
    verdict(
        4,
        ok,
        format!(
            "samples/letter={samples} letters={letters} violations={} unrealized={} in {dt:?} {bad:?}",
            j["violations"], j["unrealized"]
        ),
    );
}

#[test]
fn criterion_05_tile_crossing() {
    let d = TempDir::new().unwrap();
    let mut detail = vec![];
    let mut ok = true;
    for (cone, out) in [("0,1", "tiles_unit.json"), ("-inf,-1", "tiles_steep.json")] {
        let (o, _) = origami(d.path(), &["verify", "tiles", &format!("--cone={cone}"), "--trials", "1000", "--min-letters", "6", "--out", out]);
        let j = json(d.path(), out);
        ok &= o.status.success() && j["report"]["segments"] == 1000 && j["report"]["violations"] == 0;
        detail.push(format!("({cone}): segments={} violations={}", j["report"]["segments"], j["report"]["violations"]));
    }
    verdict(5, ok, detail.join(" "));
}

#[test]
fn criterion_06_intersection_property() {
    let d = TempDir::new().unwrap();
    let (o, dt) = origami(d.path(), &["verify", "intersections", "--K", "17", "--trials", "10000", "--pair", "both", "--out", "int.json"]);
    let j = json(d.path(), "int.json");
    let mut ok = o.status.success();
    let mut detail = vec![];
    for r in j["reports"].as_array().unwrap() {
        ok &= r["trials"] == 10000 && r["non_intersecting"] == 0 && r["classified"] == r["classified_confirmed"];
        detail.push(format!(
            "{}: trials={} non_intersecting={} classified={} confirmed={}",
            r["cone_pair"], r["trials"], r["non_intersecting"], r["classified"], r["classified_confirmed"]
        ));
    }
    ok &= j["reports"].as_array().unwrap().len() == 2;
    for k in ["17", "34", "50"] {
        let out = format!("control_{k}.json");
        let (o, _) = origami(
            d.path(),
            &["verify", "intersections", "--origami", "genus2_L", "--K", k, "--trials", "2000", "--pair", "main", "--expect", "fail", "--out", &out],
        );
        let c = json(d.path(), &out);
        let found = c["reports"][0]["non_intersecting"].as_u64().unwrap();
        ok &= o.status.success() && found > 0;
        detail.push(format!("genus2 K={k}: witnesses={found}"));
    }
    verdict(6, ok, format!("{} (X_O in {dt:?})", detail.join("; ")));
}

#[test]
fn criterion_07_cylinders() {
    let d = TempDir::new().unwrap();
    let (o, _) = origami(d.path(), &["cylinders", "--out", "vertical.csv"]);
    let h = headers(d.path(), "vertical.csv");
    let rs = rows(d.path(), "vertical.csv");
    let mut sets = BTreeSet::new();
    let mut area = 0;
    let mut lw_ok = true;
    for r in &rs {
        let (l, w): (u64, u64) = (col(r, &h, "L").parse().unwrap(), col(r, &h, "W").parse().unwrap());
        lw_ok &= l == 6 && w == 1;
        area += l * w;
        let sq: BTreeSet<usize> = col(r, &h, "squares").split(' ').map(|s| s.parse().unwrap()).collect();
        sets.insert(sq);
    }
    // cylinders {(i,1,b)} and {(i,0,b)}, square (i,a,b) at index 4i+2a+b
    let expect: BTreeSet<BTreeSet<usize>> = (0..2)
        .map(|a| (0..3).flat_map(|i| (0..2).map(move |b| 4 * i + 2 * a + b)).collect())
        .collect();
    let (oa, _) = origami(d.path(), &["cylinders", "--audit", "1000", "--qmax", "50", "--out", "audit.json"]);
    let j = json(d.path(), "audit.json");
    let ok = o.status.success()
        && oa.status.success()
        && rs.len() == 2
        && lw_ok
        && area == 12
        && sets == expect
        && j["audit"]["segments"] == 1000
        && j["audit"]["violations"] == 0;
    verdict(
        7,
        ok,
        format!(
            "cylinders={} area={area} sets_match={} audit segments={} violations={}",
            rs.len(),
            sets == expect,
            j["audit"]["segments"],
            j["audit"]["violations"]
        ),
    );
}

#[test]
fn criterion_08_upper_bound_at_special_times() {
    let d = TempDir::new().unwrap();
    let (o, dt) = origami(d.path(), &["hitting", "--slope", "golden", "--mode", "special", "--K", "17", "--levels", "6..14", "--out", "special.csv"]);
    let h = headers(d.path(), "special.csv");
    let rs = rows(d.path(), "special.csv");
    let mut ok = o.status.success() && rs.len() == 9 && dt < Duration::from_secs(300);
    let mut worst = 0f64;
    for r in &rs {
        let q: f64 = col(r, &h, "q_n").parse().unwrap();
        let t: f64 = col(r, &h, "T").parse().unwrap();
        ok &= col(r, &h, "capped") == "false" && t <= 4.0 * 17.0 * q;
        worst = worst.max(t / (4.0 * 17.0 * q));
    }
    let qmax = rs.last().map(|r| col(r, &h, "q_n")).unwrap_or_default();
    verdict(8, ok, format!("levels={} q_max={qmax} max T/(4Kq)={worst:.4} in {dt:?}", rs.len()));
}

#[test]
fn criterion_09_lower_bound() {
    let d = TempDir::new().unwrap();
    let (o, dt) = origami(
        d.path(),
        &["--mem-budget", "256M", "hitting", "--slope", "type:w=2", "--mode", "lower", "--qmin", "50", "--qmax", "1000", "--out", "lower.csv"],
    );
    let h = headers(d.path(), "lower.csv");
    let rs = rows(d.path(), "lower.csv");
    let mut ok = o.status.success() && !rs.is_empty() && dt < Duration::from_secs(900);
    let mut detail = vec![];
    for r in &rs {
        let q: f64 = col(r, &h, "q_n").parse().unwrap();
        let t: f64 = col(r, &h, "T").parse().unwrap();
        let audit = col(r, &h, "kappa_ok") == "true" && !col(r, &h, "free_cylinder").is_empty();
        ok &= (50.0..=1000.0).contains(&q) && t >= q * q / 8f64.sqrt() && audit;
        detail.push(format!("q={q} T={t:.1} bound={:.1} audit={audit}", q * q / 8f64.sqrt()));
    }
    verdict(9, ok, format!("{} in {dt:?}", detail.join("; ")));
}

#[test]
fn criterion_10_exponent_estimates() {
    let d = TempDir::new().unwrap();
    let (o1, _) = origami(d.path(), &["hitting", "--slope", "golden", "--radii", "auto", "--out", "golden.csv"]);
    let (o2, _) = origami(d.path(), &["exponent", "--in", "golden.csv", "--expect-range", "0.85,1.3", "--out", "golden_fit.json"]);
    let g = json(d.path(), "golden_fit.json");
    let golden_ok = o1.status.success() && o2.status.success() && g["passed"] == true;
    let (o3, _) = origami(d.path(), &["hitting", "--slope", "type:w=2", "--radii", "auto+lower:50..1000", "--out", "w2.csv"]);
    let (o4, _) = origami(
        d.path(),
        &[
            "exponent", "--in", "w2.csv", "--expect-range", "1.6,inf", "--special-slope", "type:w=2", "--qmin", "50",
            "--qmax", "1000", "--special-min", "1.6", "--special-count", "2", "--out", "w2_fit.json",
        ],
    );
    let w = json(d.path(), "w2_fit.json");
    let w2_ok = o3.status.success() && o4.status.success() && w["passed"] == true;
    verdict(
        10,
        golden_ok && w2_ok,
        format!(
            "golden Ĥ={:.4} in [0.85,1.3]: {golden_ok}; w=2 envelope Ĥ={:.4} special={} failures={}",
            g["h_hat"].as_f64().unwrap(),
            w["h_hat"].as_f64().unwrap(),
            w["special"],
            w["failures"]
        ),
    );
}

#[test]
fn criterion_11_determinism() {
    let runs: Vec<(Vec<&str>, Vec<&str>)> = vec![
        (vec!["info", "--out", "a"], vec!["a"]),
        (vec!["orbit", "--out", "o"], vec!["o/orbit.json", "o/adjacency.csv"]),
        (vec!["cf", "--suite", "100", "--out", "a"], vec!["a"]),
        (vec!["verify", "transitions", "--out", "a"], vec!["a"]),
        (vec!["verify", "tiles", "--cone=-inf,-1", "--out", "a"], vec!["a"]),
        (vec!["verify", "intersections", "--out", "a"], vec!["a"]),
        (vec!["verify", "intersections", "--origami", "genus2_L", "--K", "50", "--trials", "2000", "--pair", "main", "--expect", "fail", "--out", "a"], vec!["a"]),
        (vec!["cylinders", "--audit", "1000", "--out", "a"], vec!["a"]),
        (vec!["hitting", "--mode", "special", "--out", "a"], vec!["a", "a.meta.json"]),
        (vec!["hitting", "--slope", "type:w=2", "--mode", "lower", "--out", "a"], vec!["a"]),
        (vec!["hitting", "--slope", "type:w=2", "--radii", "auto+lower:50..1000", "--out", "a"], vec!["a"]),
    ];
    let mut differing = vec![];
    for (args, files) in &runs {
        let seeded: Vec<&str> = ["--seed", "5"].into_iter().chain(args.iter().copied()).collect();
        let (d1, d2) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        origami(d1.path(), &seeded);
        origami(d2.path(), &seeded);
        for f in files {
            let (b1, b2) = (std::fs::read(d1.path().join(f)), std::fs::read(d2.path().join(f)));
            if !matches!((&b1, &b2), (Ok(x), Ok(y)) if x == y) {
                differing.push(format!("{} -> {f}", args.join(" ")));
            }
        }
    }
    verdict(11, differing.is_empty(), format!("commands={} differing={differing:?}", runs.len()));
}
