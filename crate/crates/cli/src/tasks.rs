use std::path::PathBuf;

use origami_core::cf::{audit_depth, cf_expand, diophantine_type_estimate, identity_audit, parse_rational, random_slopes};
use origami_core::cylinder::{induced_cylinders, transversal_bound_audit, Base};
use origami_core::flow::{cutting_sequence, flow_trace, make_segment, Crossing, Direction, Extent, Stop, StopReason};
use origami_core::hitting::{
    exponent_estimate, geometric_radii, hitting_records, lower_bound_experiment, lower_bound_levels, radius_floor,
    seeded_start, special_times_check, Caps, HittingRecord,
};
use origami_core::sl2::{act, orbit_enumerate, reflect_s, stabilizer_certificate};
use origami_core::verify::{
    check_against_asserted, intersection_property_harness, next_letter_relation, tile_property, tiles_crossed, ConePair,
    SlopeCone,
};
use origami_core::{builtin, CfSlope, Error, IntMatrix2, Origami, SurfacePoint};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::output::Sink;
use crate::svg::exponent_plot;

pub fn load_origami(src: &str) -> CliResult<Origami> {
    if let Some(o) = builtin(src) {
        return Ok(o);
    }
    let text = std::fs::read_to_string(src)
        .map_err(|e| CliError::Usage(format!("{src:?} is neither a builtin origami nor a readable file: {e}")))?;
    Ok(Origami::from_text(&text)?)
}

pub fn parse_start(o: &Origami, s: &str) -> CliResult<SurfacePoint> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [j, x, y] = parts.as_slice() else {
        return Err(CliError::Usage(format!("start point must be j,x,y, got {s:?}")));
    };
    let j: usize = j.parse().map_err(|_| CliError::Usage(format!("bad square index {j:?}")))?;
    Ok(SurfacePoint::new(o, j, parse_rational(x)?, parse_rational(y)?)?)
}

fn parse_pair(s: &str) -> CliResult<(i64, i64)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => match (a.parse(), b.parse()) {
            (Ok(a), Ok(b)) => Ok((a, b)),
            _ => Err(CliError::Usage(format!("expected two integers, got {s:?}"))),
        },
        _ => Err(CliError::Usage(format!("expected two integers, got {s:?}"))),
    }
}

fn parse_direction(d: &DirectionArgs) -> CliResult<Direction> {
    let dir = match (&d.slope, &d.direction) {
        (_, Some(v)) => {
            let (dx, dy) = parse_pair(v)?;
            Direction::new(dx, dy)?
        }
        (Some(s), None) if s == "inf" => Direction::new(1, 0)?,
        (Some(s), None) => match s.parse::<CfSlope>() {
            Ok(cf) => Direction::from_rational_slope(&cf.convergent(d.depth), true),
            Err(_) => Direction::from_rational_slope(&parse_rational(s)?, true),
        },
        (None, None) => return Err(CliError::Usage("give --slope or --direction".into())),
    };
    Ok(if d.down { dir.reversed() } else { dir })
}

/// `6..14` (inclusive) or `6,8,10`.
pub fn parse_levels(s: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Usage(format!("bad level list {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

fn parse_f64_pair(s: &str) -> CliResult<(f64, f64)> {
    let f = |t: &str| -> CliResult<f64> {
        match t.trim() {
            "inf" | "+inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            t => t.parse().map_err(|_| CliError::Usage(format!("bad number {t:?}"))),
        }
    };
    let (a, b) = s.split_once(',').ok_or_else(|| CliError::Usage(format!("expected lo,hi, got {s:?}")))?;
    Ok((f(a)?, f(b)?))
}

fn check(ok: bool, what: impl Into<String>) -> CliResult<()> {
    if ok { Ok(()) } else { Err(CliError::CheckFailed(what.into())) }
}

pub fn info(a: &InfoArgs, sink: &mut Sink) -> CliResult<()> {
    let o = load_origami(&a.src.origami)?;
    let cd = o.cone_data();
    let aut = o.automorphism_group().len();
    let stab = stabilizer_certificate(&o);
    let cones: Vec<_> = cd
        .cones
        .iter()
        .map(|c| json!({ "vertex": c.vertex, "order": c.order, "angle_over_pi": 2 * (c.order + 1), "cycle": c.cycle }))
        .collect();
    let orders: Vec<String> = cd.orders().iter().map(|k| k.to_string()).collect();
    sink.note(format!("n={}", o.n()));
    sink.note(format!("genus={}", cd.genus));
    sink.note(format!("cones={}", orders.join(",")));
    sink.note(format!("regular_vertices={}", cd.regular_vertices));
    sink.note(format!("automorphisms={aut}"));
    sink.note(format!("sl2_fixed={}", stab.certified));
    let report = json!({
        "origami": a.src.origami,
        "n": o.n(),
        "genus": cd.genus,
        "euler_characteristic": o.euler_characteristic(),
        "edge_classes": o.edges().len(),
        "cones": cones,
        "regular_vertices": cd.regular_vertices,
        "automorphism_group_order": aut,
        "commutator_cycle_type": o.commutator().cycle_type(),
        "stabilizer": stab,
    });
    sink.json(a.out.as_deref(), &report)
}

pub fn act_cmd(a: &ActArgs, sink: &mut Sink) -> CliResult<()> {
    let o = load_origami(&a.src.origami)?;
    let img = match (&a.matrix, a.reflect) {
        (_, true) => reflect_s(&o),
        (Some(m), false) => act(&m.parse::<IntMatrix2>()?, &o)?,
        (None, false) => return Err(CliError::Usage("give --matrix a,b,c,d or --reflect".into())),
    };
    sink.note(format!("isomorphic_to_source={}", img.isomorphic(&o)));
    sink.text(a.out.as_deref(), &img.to_text())
}

#[derive(Serialize)]
struct AdjacencyRow {
    from: usize,
    generator: String,
    to: usize,
}

pub fn orbit(a: &OrbitArgs, sink: &mut Sink) -> CliResult<()> {
    let o = load_origami(&a.src.origami)?;
    let orbit = orbit_enumerate(&o, a.cap)?;
    let dir = a.out.clone().unwrap_or_else(|| PathBuf::from("orbit"));
    for (k, c) in orbit.classes.iter().enumerate() {
        let p = dir.join(format!("class_{k:04}.origami"));
        let full = sink.resolve(&p);
        if let Some(parent) = full.parent() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        std::fs::write(&full, c.to_text()).map_err(|e| CliError::io(&full, e))?;
    }
    let rows: Vec<AdjacencyRow> =
        orbit.edges.iter().map(|&(f, g, t)| AdjacencyRow { from: f, generator: g.to_string(), to: t }).collect();
    sink.csv(Some(&dir.join("adjacency.csv")), &rows)?;
    let stab = stabilizer_certificate(&o);
    sink.note(format!("classes={}", orbit.len()));
    sink.note(format!("complete={}", orbit.complete));
    let report = json!({
        "origami": a.src.origami,
        "classes": orbit.len(),
        "complete": orbit.complete,
        "stabilizer": stab,
    });
    sink.json(Some(&dir.join("orbit.json")), &report)?;
    if !orbit.complete {
        return Err(Error::CapExceeded(orbit.len()).into());
    }
    Ok(())
}

#[derive(Serialize)]
struct ConvergentRow {
    n: usize,
    a_n: String,
    p_n: String,
    q_n: String,
    det: String,
}

pub fn cf(a: &CfArgs, sink: &mut Sink) -> CliResult<()> {
    if let Some(count) = a.suite {
        let mut slopes = random_slopes(count, sink.seed);
        slopes.push(CfSlope::golden());
        slopes.push("type:w=2".parse()?);
        let audits: Vec<_> = slopes.iter().map(|s| identity_audit(s, audit_depth(s))).collect();
        let failures: usize = audits.iter().map(|x| x.failures.len()).sum();
        sink.note(format!("slopes={} failures={failures}", audits.len()));
        sink.json(a.out.as_deref(), &json!({ "slopes": audits, "failures": failures, "passed": failures == 0 }))?;
        return check(failures == 0, format!("{failures} identity failures"));
    }
    let slope: CfSlope = match (&a.rational, &a.w, &a.slope) {
        (Some(r), _, _) => CfSlope::from_quotients(cf_expand(&parse_rational(r)?, a.depth)?)?,
        (_, Some(w), _) => {
            let w = parse_rational(w)?;
            match &a.prefix {
                Some(p) => format!("type:w={w};prefix=[{p}]").parse()?,
                None => CfSlope::with_type(w)?,
            }
        }
        (_, _, Some(s)) => s.parse()?,
        _ => return Err(CliError::Usage("give --rational, --type, --slope or --suite".into())),
    };
    let e = slope.expand(a.depth);
    let rows: Vec<ConvergentRow> = (1..=e.depth())
        .map(|n| ConvergentRow {
            n,
            a_n: e.a[n - 1].to_string(),
            p_n: e.p[n].to_string(),
            q_n: e.q[n].to_string(),
            det: (&e.p[n] * &e.q[n - 1] - &e.p[n - 1] * &e.q[n]).to_string(),
        })
        .collect();
    sink.note(format!("slope={slope}"));
    sink.note(format!("depth={}", e.depth()));
    if e.depth() >= 3 {
        let (w, n) = diophantine_type_estimate(&slope, e.depth() - 1)?;
        sink.note(format!("type_estimate={w:.6} at n={n}"));
    }
    sink.csv(a.out.as_deref(), &rows)
}

#[derive(Serialize)]
struct EventRow {
    k: usize,
    t: f64,
    square: usize,
    side: &'static str,
    edge_class: String,
    label: String,
    pos: String,
}

pub fn flow(a: &FlowArgs, sink: &mut Sink) -> CliResult<()> {
    let o = load_origami(&a.src.origami)?;
    let dir = parse_direction(&a.dir)?;
    let p = parse_start(&o, &a.dir.start)?;
    let stop = match (&a.time, a.crossings) {
        (Some(t), _) => Stop::Time(parse_rational(t)?),
        (None, Some(n)) => Stop::Crossings(n),
        (None, None) => Stop::Crossings(100),
    };
    let tr = flow_trace(&o, &dir, &p, &stop)?;
    let rows: Vec<EventRow> = tr
        .events
        .iter()
        .map(|ev| {
            let (edge_class, pos) = match &ev.crossing {
                Crossing::Edge { edge, pos, .. } => (edge.to_string(), pos.to_string()),
                Crossing::Vertex { vertex, .. } => (format!("v{vertex}"), String::new()),
            };
            EventRow {
                k: ev.k,
                t: ev.time(&dir),
                square: ev.square,
                side: ev.side_name(),
                edge_class,
                label: ev.label.clone().unwrap_or_default(),
                pos,
            }
        })
        .collect();
    sink.note(format!("direction={dir}"));
    sink.note(format!("events={}", rows.len()));
    if let StopReason::ConeVertex { vertex, lambda } = &tr.stop {
        sink.note(format!("stopped at cone vertex {vertex} at parameter {lambda}"));
    }
    sink.csv(a.out.as_deref(), &rows)
}

pub fn cutseq(a: &CutseqArgs, sink: &mut Sink) -> CliResult<()> {
    let o = load_origami(&a.src.origami)?;
    let dir = parse_direction(&a.dir)?;
    let p = parse_start(&o, &a.dir.start)?;
    let seg = make_segment(&o, &p, &dir, &Extent::MinLength(parse_rational(&a.length)?))?;
    let cs = cutting_sequence(&seg);
    let tiles: Option<Vec<usize>> = o.has_labels().then(|| tiles_crossed(&o, &seg).into_iter().collect());
    sink.note(format!("letters={}", cs.letters.join(" ")));
    let report = json!({
        "start": p.to_string(),
        "direction": dir.to_string(),
        "lambda_end": seg.lambda_end.to_string(),
        "length": seg.length(),
        "letters": cs.letters,
        "edges": cs.edges.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "lambdas": cs.lambdas.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        "squares": seg.squares(),
        "tiles": tiles,
    });
    sink.json(a.out.as_deref(), &report)
}

pub fn verify(v: &VerifyCommand, sink: &mut Sink) -> CliResult<()> {
    match v {
        VerifyCommand::Transitions(a) => {
            let o = load_origami(&a.src.origami)?;
            let cone: SlopeCone = a.cone.parse()?;
            let rounds = parse_levels(&a.rounds)?;
            let rel = next_letter_relation(&o, &cone, &rounds)?;
            let checks = check_against_asserted(&rel)?;
            let violations: usize = checks.iter().map(|c| c.violations.len()).sum();
            let unrealized: usize = checks.iter().map(|c| c.unrealized.len()).sum();
            let passed = violations == 0 && unrealized == 0;
            for c in checks.iter().filter(|c| !c.violations.is_empty() || !c.unrealized.is_empty()) {
                sink.note(format!("{}: sampled {:?} asserted {:?}", c.letter, c.sampled, c.asserted));
            }
            sink.note(format!("samples_per_letter={} violations={violations} unrealized={unrealized}", rel.samples_per_letter));
            sink.json(
                a.out.as_deref(),
                &json!({ "relation": rel, "checks": checks, "violations": violations, "unrealized": unrealized, "passed": passed }),
            )?;
            check(passed, format!("{violations} successor violations, {unrealized} unrealized successors"))
        }
        VerifyCommand::Tiles(a) => {
            let o = load_origami(&a.src.origami)?;
            let cone: SlopeCone = a.cone.parse()?;
            let rep = tile_property(&o, &cone, a.trials, a.min_letters, sink.seed);
            let passed = rep.violations == 0 && rep.segments == a.trials;
            sink.note(format!("cone={} segments={} violations={}", rep.cone, rep.segments, rep.violations));
            sink.json(a.out.as_deref(), &json!({ "report": rep, "passed": passed }))?;
            check(passed, format!("{} segments missed a tile", rep.violations))
        }
        VerifyCommand::Intersections(a) => {
            let o = load_origami(&a.src.origami)?;
            let k = parse_rational(&a.k)?;
            let pairs = match a.pair {
                PairChoice::Main => vec![ConePair::Main],
                PairChoice::Reflected => vec![ConePair::Reflected],
                PairChoice::Both => vec![ConePair::Main, ConePair::Reflected],
            };
            let reports: Vec<_> =
                pairs.iter().map(|&p| intersection_property_harness(&o, &k, a.trials, p, sink.seed)).collect();
            let passed = match a.expect {
                Expectation::Hold => reports.iter().all(|r| r.passed()),
                Expectation::Fail => reports.iter().all(|r| r.non_intersecting > 0),
            };
            for r in &reports {
                sink.note(format!(
                    "{:?}: trials={} non_intersecting={} classified={} confirmed={}",
                    r.cone_pair, r.trials, r.non_intersecting, r.classified, r.classified_confirmed
                ));
            }
            sink.json(a.out.as_deref(), &json!({ "expect": a.expect, "reports": reports, "passed": passed }))?;
            check(passed, "intersection property outcome differs from the expectation")
        }
    }
}

#[derive(Serialize)]
struct CylinderRow {
    index: usize,
    slope: String,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "W")]
    w: usize,
    squares: String,
}

pub fn cylinders(a: &CylindersArgs, sink: &mut Sink) -> CliResult<()> {
    let o = load_origami(&a.src.origami)?;
    if let Some(n) = a.audit {
        let rep = transversal_bound_audit(&o, n, a.qmax, sink.seed)?;
        let passed = rep.violations == 0 && rep.segments == n;
        sink.note(format!("segments={} violations={} max_ratio={:.6}", rep.segments, rep.violations, rep.max_ratio));
        sink.json(a.out.as_deref(), &json!({ "audit": rep, "qmax": a.qmax, "passed": passed }))?;
        return check(passed, format!("{} transversal bound violations", rep.violations));
    }
    let m = match &a.matrix {
        Some(m) => m.parse()?,
        None => IntMatrix2::identity(),
    };
    let base: Base = a.base.parse()?;
    let d = induced_cylinders(&o, &m, base)?;
    let rows: Vec<CylinderRow> = d
        .cylinders
        .iter()
        .enumerate()
        .map(|(i, c)| CylinderRow {
            index: i,
            slope: d.slope.to_string(),
            l: c.length,
            w: c.width,
            squares: c.squares.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" "),
        })
        .collect();
    sink.note(format!("slope={} cylinders={} area={}", d.slope, rows.len(), d.area()));
    sink.csv(a.out.as_deref(), &rows)
}

/// Hitting record CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub slope_spec: String,
    #[serde(rename = "pN")]
    pub p_n: String,
    #[serde(rename = "qN")]
    pub q_n: String,
    pub square: usize,
    pub x: String,
    pub y: String,
    pub r: f64,
    pub cells: u64,
    #[serde(rename = "T")]
    pub t: f64,
    pub capped: bool,
    pub crossings: u64,
    pub seed: u64,
}

impl From<HittingRecord> for RecordRow {
    fn from(h: HittingRecord) -> Self {
        RecordRow {
            slope_spec: h.slope_spec,
            p_n: h.p_n,
            q_n: h.q_n,
            square: h.square,
            x: h.x,
            y: h.y,
            r: h.r,
            cells: h.cells,
            t: h.t,
            capped: h.capped,
            crossings: h.crossings,
            seed: h.seed,
        }
    }
}

/// `r_k = 1/(q_{2k}√32)` at the lower-bound levels with `q_{2k} ∈ [qmin, qmax]`.
pub fn lower_radii(slope: &CfSlope, qmin: u64, qmax: u64) -> CliResult<Vec<(usize, f64)>> {
    let levels = lower_bound_levels(slope, qmin, qmax)?;
    let e = slope.expand(levels.iter().max().copied().unwrap_or(0) + 1);
    Ok(levels
        .into_iter()
        .map(|n| {
            let q: f64 = e.q[n].to_string().parse().expect("integer");
            (n, 1.0 / (q * 32f64.sqrt()))
        })
        .collect())
}

fn parse_radii(spec: &str, o: &Origami, slope: &CfSlope, mem: usize) -> CliResult<Vec<f64>> {
    let floor = radius_floor(o, mem);
    let mut out = vec![];
    for part in spec.split('+').map(str::trim) {
        let bad = || CliError::Usage(format!("bad radii spec {part:?}"));
        if part == "auto" {
            out.extend(geometric_radii(0.5, floor.max(0.0025), 12));
        } else if let Some(rest) = part.strip_prefix("auto:") {
            let (count, rmin) = rest.split_once(':').ok_or_else(bad)?;
            let count: usize = count.parse().map_err(|_| bad())?;
            let rmin: f64 = rmin.parse().map_err(|_| bad())?;
            out.extend(geometric_radii(0.5, floor.max(rmin), count));
        } else if let Some(rest) = part.strip_prefix("lower:") {
            let (a, b) = rest.split_once("..").ok_or_else(bad)?;
            let (qmin, qmax) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
            out.extend(lower_radii(slope, qmin, qmax)?.into_iter().map(|(_, r)| r));
        } else {
            for t in part.split(',') {
                out.push(t.trim().parse().map_err(|_| bad())?);
            }
        }
    }
    out.sort_by(|a, b| b.total_cmp(a));
    out.dedup();
    Ok(out)
}

#[derive(Serialize)]
struct LowerRow {
    n: usize,
    p_n: String,
    q_n: String,
    r_k: f64,
    #[serde(rename = "T")]
    t: f64,
    bound: f64,
    capped: bool,
    ok: bool,
    kappa: f64,
    kappa_ok: bool,
    window: f64,
    free_cylinder: Option<usize>,
    free_lo: Option<f64>,
    free_hi: Option<f64>,
}

pub fn hitting(a: &HittingArgs, sink: &mut Sink, mem: usize) -> CliResult<()> {
    let o = load_origami(&a.src.origami)?;
    let slope: CfSlope = a.slope.parse()?;
    let caps = Caps { time: a.cap, mem_bytes: mem };
    let start = |r: f64, t_cap: f64| -> CliResult<SurfacePoint> {
        match &a.start {
            Some(s) => parse_start(&o, s),
            None => Ok(seeded_start(&o, &slope, r, t_cap, sink.seed)?),
        }
    };
    match a.mode {
        HittingMode::Records => {
            let radii = parse_radii(&a.radii, &o, &slope, mem)?;
            let rmin = radii.last().copied().ok_or_else(|| CliError::Usage("no radii".into()))?;
            let p = start(rmin, a.cap)?;
            let recs = hitting_records(&o, &slope, &p, &radii, &caps, sink.seed)?;
            let capped = recs.iter().filter(|r| r.capped).count();
            sink.note(format!("start={p} records={} capped={capped}", recs.len()));
            let rows: Vec<RecordRow> = recs.into_iter().map(RecordRow::from).collect();
            sink.csv(a.out.as_deref(), &rows)
        }
        HittingMode::Special => {
            let levels = parse_levels(&a.levels)?;
            let e = slope.expand(levels.iter().max().copied().unwrap_or(0));
            let qmax: f64 = e.q[e.depth()].to_string().parse().expect("integer");
            let rmin = 2.0 * (a.k as f64 + 1.0) / qmax;
            let floor = radius_floor(&o, mem);
            if rmin < floor {
                return Err(Error::CapTooSmall(format!("r_n = {rmin:e} is below the grid floor {floor:e}")).into());
            }
            let p = start(rmin, 16.0 * a.k as f64 * qmax)?;
            let rows = special_times_check(&o, &slope, &p, &levels, a.k, mem, sink.seed)?;
            let bad = rows.iter().filter(|r| !r.ok).count();
            let worst = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
            sink.note(format!("start={p} levels={} failing={bad} max_ratio={worst:.6}", rows.len()));
            sink.csv(a.out.as_deref(), &rows)?;
            check(bad == 0, format!("{bad} levels exceed 4K·q_n"))
        }
        HittingMode::Lower => {
            let levels = lower_bound_levels(&slope, a.qmin, a.qmax)?;
            let radii = lower_radii(&slope, a.qmin, a.qmax)?;
            let rmin = radii.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
            if levels.is_empty() {
                return Err(CliError::CheckFailed(format!("no lower-bound levels with q in [{}, {}]", a.qmin, a.qmax)));
            }
            let p = start(rmin, a.cap)?;
            let rows = lower_bound_experiment(&o, &slope, &p, &levels, &caps, sink.seed)?;
            let bad = rows.iter().filter(|r| !(r.ok && r.audit.kappa_ok && r.audit.free_band.is_some())).count();
            sink.note(format!("start={p} levels={} failing={bad}", rows.len()));
            let out: Vec<LowerRow> = rows
                .into_iter()
                .map(|r| LowerRow {
                    n: r.n,
                    p_n: r.p_n,
                    q_n: r.q_n,
                    r_k: r.r_k,
                    t: r.t,
                    bound: r.bound,
                    capped: r.capped,
                    ok: r.ok,
                    kappa: r.audit.kappa,
                    kappa_ok: r.audit.kappa_ok,
                    window: r.audit.window,
                    free_cylinder: r.audit.free_band.map(|b| b.0),
                    free_lo: r.audit.free_band.map(|b| b.1),
                    free_hi: r.audit.free_band.map(|b| b.2),
                })
                .collect();
            sink.csv(a.out.as_deref(), &out)?;
            check(bad == 0, format!("{bad} levels fail the lower bound or its audit"))
        }
    }
}

pub fn read_records(paths: &[PathBuf]) -> CliResult<Vec<RecordRow>> {
    let mut out = vec![];
    for p in paths {
        let mut r = csv::Reader::from_path(p).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(p, io),
            other => CliError::Usage(format!("{}: {other:?}", p.display())),
        })?;
        for row in r.deserialize() {
            out.push(row?);
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct PointRow {
    r: f64,
    #[serde(rename = "T")]
    t: f64,
    exponent: f64,
}

pub fn exponent(a: &ExponentArgs, sink: &mut Sink) -> CliResult<()> {
    let rows = read_records(&a.input)?;
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| !r.capped).map(|r| (r.r, r.t)).collect();
    let fit = exponent_estimate(&pts)?;
    let mut failures: Vec<String> = vec![];
    if let Some(range) = &a.expect_range {
        let (lo, hi) = parse_f64_pair(range)?;
        if !(lo <= fit.h_hat && fit.h_hat <= hi) {
            failures.push(format!("Ĥ = {:.6} outside [{lo}, {hi}]", fit.h_hat));
        }
    }
    let mut special = vec![];
    if let Some(spec) = &a.special_slope {
        let slope: CfSlope = spec.parse()?;
        let radii = lower_radii(&slope, a.qmin, a.qmax)?;
        if radii.len() < a.special_count {
            failures.push(format!("{} special levels in [{}, {}], {} required", radii.len(), a.qmin, a.qmax, a.special_count));
        }
        for &(n, rk) in radii.iter().rev().take(a.special_count) {
            let hit = pts.iter().find(|p| (p.0 - rk).abs() <= 1e-12 * rk);
            let e = hit.map(|&(r, t)| t.ln() / -r.ln());
            match e {
                Some(e) if e >= a.special_min => {}
                Some(e) => failures.push(format!("per-point exponent {e:.6} < {} at level {n}", a.special_min)),
                None => failures.push(format!("no uncapped record at r_k = {rk} (level {n})")),
            }
            special.push(json!({ "n": n, "r_k": rk, "exponent": e }));
        }
    }
    let per_point: Vec<PointRow> =
        pts.iter().zip(&fit.per_point).map(|(&(r, t), &e)| PointRow { r, t, exponent: e }).collect();
    let passed = failures.is_empty();
    sink.note(format!("h_hat={:.6} points={} decades={:.3}", fit.h_hat, fit.points, fit.decades));
    for f in &failures {
        sink.note(f.clone());
    }
    if let Some(plot) = &a.plot {
        let title = rows.first().map(|r| r.slope_spec.clone()).unwrap_or_default();
        let svg = exponent_plot(&pts, &fit, &title);
        let full = sink.resolve(plot);
        std::fs::write(&full, svg).map_err(|e| CliError::io(&full, e))?;
    }
    let report = json!({
        "h_hat": fit.h_hat,
        "intercept": fit.intercept,
        "points": fit.points,
        "decades": fit.decades,
        "envelope": fit.envelope,
        "per_point": per_point,
        "special": special,
        "failures": failures,
        "passed": passed,
    });
    sink.json(a.out.as_deref(), &report)?;
    check(passed, failures.join("; "))
}
