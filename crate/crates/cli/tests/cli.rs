use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn origami(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_origami")).current_dir(dir).args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn info_summary_lines() {
    let d = TempDir::new().unwrap();
    let o = origami(d.path(), &["info", "--out", "info.json"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for line in ["n=12", "genus=4", "cones=2,2,2", "regular_vertices=3", "automorphisms=3"] {
        assert!(s.lines().any(|l| l == line), "missing {line} in {s}");
    }
    let j = read_json(&d.path().join("info.json"));
    assert_eq!(j["command"], "info");
    assert_eq!(j["seed"], 0);
    assert_eq!(j["euler_characteristic"], -6);
}

#[test]
fn json_to_stdout_moves_summary_to_stderr() {
    let d = TempDir::new().unwrap();
    let o = origami(d.path(), &["info"]);
    let j: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["genus"], 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("genus=4"));
}

#[test]
fn exit_codes_by_family() {
    let d = TempDir::new().unwrap();
    let code = |args: &[&str]| origami(d.path(), args).status.code().unwrap();
    assert_eq!(code(&["run", "--config", "missing.toml"]), 2);
    assert_eq!(code(&["info", "--origami", "no_such_surface"]), 2);
    assert_eq!(code(&["bogus"]), 2);
    assert_eq!(code(&["act", "--matrix", "2,0,0,1"]), 10);
    assert_eq!(code(&["cf", "--rational", "1/0"]), 10);
    assert_eq!(code(&["hitting", "--slope", "type:w=2", "--mode", "special", "--levels", "6..9"]), 12);
    assert_eq!(code(&["exponent", "--in", "absent.csv"]), 3);
}

#[test]
fn missing_config_has_diagnostic() {
    let d = TempDir::new().unwrap();
    let o = origami(d.path(), &["run", "--config", "missing.toml"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.toml"));
}

#[test]
fn cf_table_determinants_alternate() {
    let d = TempDir::new().unwrap();
    let o = origami(d.path(), &["cf", "--slope", "golden", "--depth", "8"]);
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(r.headers().unwrap(), vec!["n", "a_n", "p_n", "q_n", "det"]);
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 8);
    for (i, row) in rows.iter().enumerate() {
        let n = i + 1;
        assert_eq!(&row[1], "1");
        assert_eq!(&row[4], if n % 2 == 1 { "1" } else { "-1" });
    }
    assert_eq!(&rows[7][3], "34");
}

#[test]
fn orbit_of_x_o_is_one_class() {
    let d = TempDir::new().unwrap();
    assert!(origami(d.path(), &["orbit", "--out", "orb"]).status.success());
    let j = read_json(&d.path().join("orb/orbit.json"));
    assert_eq!(j["classes"], 1);
    assert_eq!(j["complete"], true);
    let adj = std::fs::read_to_string(d.path().join("orb/adjacency.csv")).unwrap();
    assert!(adj.starts_with("from,generator,to\n"));
    assert!(adj.lines().skip(1).all(|l| l.starts_with("0,") && l.ends_with(",0")));
}

#[test]
fn act_writes_loadable_origami() {
    let d = TempDir::new().unwrap();
    assert!(origami(d.path(), &["act", "--origami", "genus2_L", "--matrix", "1,1,0,1", "--out", "t.origami"]).status.success());
    let o = origami(d.path(), &["info", "--origami", "t.origami"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).lines().any(|l| l == "genus=2"));
}

#[test]
fn config_runs_tasks_with_sidecars() {
    let d = TempDir::new().unwrap();
    std::fs::write(
        d.path().join("exp.toml"),
        "seed = 4\nout_dir = \"res\"\n\n[cylinders]\nmatrix = [1, 1, 0, 1]\nout = \"c.csv\"\n\n[verify.tiles]\ncone = \"-inf,-1\"\ntrials = 50\nout = \"tiles.json\"\n",
    )
    .unwrap();
    let o = origami(d.path(), &["run", "--config", "exp.toml"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let meta = read_json(&d.path().join("res/c.csv.meta.json"));
    assert_eq!(meta["seed"], 4);
    assert_eq!(meta["rows"], 2);
    let tiles = read_json(&d.path().join("res/tiles.json"));
    assert_eq!(tiles["passed"], true);
    assert_eq!(tiles["seed"], 4);
    assert_eq!(tiles["report"]["segments"], 50);
}

#[test]
fn config_hash_ignores_output_location() {
    let d = TempDir::new().unwrap();
    origami(d.path(), &["cutseq", "--slope", "2/5", "--out", "a.json"]);
    origami(d.path(), &["--out-dir", "sub", "cutseq", "--slope", "2/5", "--out", "b.json"]);
    origami(d.path(), &["--seed", "9", "cutseq", "--slope", "2/5", "--out", "c.json"]);
    let a = read_json(&d.path().join("a.json"));
    let b = read_json(&d.path().join("sub/b.json"));
    let c = read_json(&d.path().join("c.json"));
    assert_eq!(a["config_hash"], b["config_hash"]);
    assert_ne!(a["config_hash"], c["config_hash"]);
    assert_eq!(a["letters"], c["letters"]);
}

#[test]
fn hitting_csv_feeds_exponent() {
    let d = TempDir::new().unwrap();
    let o = origami(d.path(), &["--seed", "2", "hitting", "--radii", "auto:8:0.01", "--out", "h.csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(d.path().join("h.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "slope_spec,pN,qN,square,x,y,r,cells,T,capped,crossings,seed");
    assert_eq!(text.lines().count(), 9);
    let o = origami(d.path(), &["exponent", "--in", "h.csv", "--plot", "h.svg", "--out", "fit.json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fit = read_json(&d.path().join("fit.json"));
    assert!(fit["h_hat"].as_f64().unwrap() > 0.0);
    assert!(std::fs::read_to_string(d.path().join("h.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn exponent_range_violation_exits_one() {
    let d = TempDir::new().unwrap();
    origami(d.path(), &["hitting", "--radii", "auto:8:0.01", "--out", "h.csv"]);
    let o = origami(d.path(), &["exponent", "--in", "h.csv", "--expect-range", "5,6", "--out", "fit.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(read_json(&d.path().join("fit.json"))["passed"], false);
}

#[test]
fn flow_events_are_ordered() {
    let d = TempDir::new().unwrap();
    let o = origami(d.path(), &["flow", "--direction", "1,3", "--crossings", "20"]);
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(r.headers().unwrap(), vec!["k", "t", "square", "side", "edge_class", "label", "pos"]);
    let ts: Vec<f64> = r.records().map(|x| x.unwrap()[1].parse().unwrap()).collect();
    assert_eq!(ts.len(), 20);
    assert!(ts.windows(2).all(|w| w[0] <= w[1]));
}
