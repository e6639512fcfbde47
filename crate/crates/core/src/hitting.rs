//! `r`-dense times of linear flows and hitting-time exponents.
//!
//! Each unit square is cut into `N × N` cells with `N = ⌈√2/r⌉`, so a cell
//! has diameter at most `r`. The forward orbit is walked cell by cell with
//! integer arithmetic and every cell records the first time `t > r` at which
//! the orbit is inside it; the largest of these times is `T`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::{ceil_rational_power, g_matrix, CfExpansion, CfSlope, QuotientRule};
use crate::cylinder::{induced_cylinders, Base};
use crate::error::{Error, Result};
use crate::flow::{make_segment, Direction, Extent};
use crate::origami::{Corner, Origami, SurfacePoint};

type Q = BigRational;

pub const DEFAULT_MEM_BUDGET: usize = 256 << 20;

/// Limits for one measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Caps {
    /// Largest flow time simulated.
    pub time: f64,
    /// Bytes available for the visited-cell flags.
    pub mem_bytes: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { time: 1e7, mem_bytes: DEFAULT_MEM_BUDGET }
    }
}

/// Cells per unit side for radius `r`.
pub fn cells_per_side(r: f64) -> usize {
    ((2f64.sqrt() / r) - 1e-9).ceil().max(1.0) as usize
}

/// Smallest radius whose flag array fits in `mem_bytes` on `o`.
pub fn radius_floor(o: &Origami, mem_bytes: usize) -> f64 {
    let per_square = (mem_bytes as f64 * 8.0) / o.n() as f64;
    2f64.sqrt() / per_square.sqrt().floor()
}

/// A convergent standing in for the slope during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub depth: usize,
    pub p: BigInt,
    pub q: BigInt,
    /// `T_cap / (q_N q_{N+1})`, an upper bound on the drift from the true orbit; zero for rational slopes.
    pub drift: f64,
}

/// Picks the first convergent `p_N/q_N` with `T_cap/(q_N q_{N+1}) < r/10`, which
/// keeps the rational orbit within `r/10` of the true one up to time `T_cap`.
pub fn realize_slope(slope: &CfSlope, r: f64, t_cap: f64) -> Result<Realization> {
    let mut depth = 16;
    loop {
        let e = slope.expand(depth);
        if slope.is_rational() && e.depth() < depth {
            let n = e.depth();
            return Ok(Realization { depth: n, p: e.p[n].clone(), q: e.q[n].clone(), drift: 0.0 });
        }
        for n in 1..e.depth() {
            let prod = (&e.q[n] * &e.q[n + 1]).to_f64().unwrap_or(f64::INFINITY);
            let drift = t_cap / prod;
            if drift < r / 10.0 {
                return Ok(Realization { depth: n, p: e.p[n].clone(), q: e.q[n].clone(), drift });
            }
        }
        if depth > 4096 {
            return Err(Error::CapExceeded(depth));
        }
        depth *= 2;
    }
}

/// End of a cell walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkEnd {
    /// Time of the last crossing processed.
    pub t: f64,
    /// The time cap was reached.
    pub capped: bool,
    /// Square edges crossed.
    pub crossings: u64,
}

fn to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128().ok_or_else(|| Error::Overflow(x.to_string()))
}

/// Walks the orbit of `start` in direction `(a, b)` through the `N × N` cell
/// grid of every square. `visit(cell, t)` is called for the cell occupied at
/// time `t_min` and then for every cell entered later, until it returns `true`
/// or the time passes `t_cap`. Cell indices are `square·N² + row·N + column`.
pub fn walk_cells<F: FnMut(usize, f64) -> bool>(
    o: &Origami,
    dir: (&BigInt, &BigInt),
    start: &SurfacePoint,
    n_side: usize,
    t_min: f64,
    t_cap: f64,
    mut visit: F,
) -> Result<WalkEnd> {
    let (a, b) = (to_i128(dir.0)?, to_i128(dir.1)?);
    if a == 0 && b == 0 {
        return Err(Error::InvalidArgument("zero direction".into()));
    }
    let n = n_side as i128;
    let d_big = start.x.denom().lcm(start.y.denom());
    let d = to_i128(&d_big)?;
    let ux = to_i128(&(start.x.numer() * (&d_big / start.x.denom())))? * n;
    let vy = to_i128(&(start.y.numer() * (&d_big / start.y.denom())))? * n;
    let (sx, sy) = (a >= 0, b >= 0);
    let (aa, bb) = (a.abs(), b.abs());
    let side = n * d;
    let mut u = if sx { ux } else { side - ux };
    let mut v = if sy { vy } else { side - vy };
    let h = |j: usize| if sx { o.h().apply(j) } else { o.h_inv().apply(j) };
    let vv = |j: usize| if sy { o.v().apply(j) } else { o.v_inv().apply(j) };
    let corner = match (sx, sy) {
        (true, true) => Corner::TopRight,
        (false, true) => Corner::TopLeft,
        (true, false) => Corner::BottomRight,
        (false, false) => Corner::BottomLeft,
    };
    let cone_ahead: Vec<bool> = (0..o.n()).map(|j| o.is_cone_vertex(o.vertex_at(j, corner))).collect();
    let mut j = start.square;
    let at_u = u == side && aa > 0;
    let at_v = v == side && bb > 0;
    if at_u && at_v {
        if cone_ahead[j] {
            return Err(Error::StartOnSingularLeaf(o.vertex_at(j, corner)));
        }
        j = vv(h(j));
        u = 0;
        v = 0;
    } else if at_u {
        j = h(j);
        u = 0;
    } else if at_v {
        j = vv(j);
        v = 0;
    }
    let mut cx = (u / d).min(n - 1);
    let mut cy = (v / d).min(n - 1);
    let du0 = (cx + 1) * d - u;
    let dv0 = (cy + 1) * d - v;
    let mut e = du0 * bb - dv0 * aa;
    let norm = ((a as f64).powi(2) + (b as f64).powi(2)).sqrt();
    let su = if aa > 0 { norm / (aa as f64 * side as f64) } else { f64::INFINITY };
    let sv = if bb > 0 { norm / (bb as f64 * side as f64) } else { f64::INFINITY };
    let (mut kx, mut ky) = (0i128, 0i128);
    let nn = n_side * n_side;
    let cell = |j: usize, cx: i128, cy: i128| {
        let rx = if sx { cx } else { n - 1 - cx } as usize;
        let ry = if sy { cy } else { n - 1 - cy } as usize;
        j * nn + ry * n_side + rx
    };
    let mut armed = t_min <= 0.0;
    if armed && visit(cell(j, cx, cy), 0.0) {
        return Ok(WalkEnd { t: 0.0, capped: false, crossings: 0 });
    }
    let mut crossings = 0u64;
    loop {
        let t_next = if e <= 0 { (du0 + kx * d) as f64 * su } else { (dv0 + ky * d) as f64 * sv };
        if t_next > t_cap {
            return Ok(WalkEnd { t: t_cap, capped: true, crossings });
        }
        if !armed && t_next >= t_min {
            armed = true;
            if visit(cell(j, cx, cy), t_min) {
                return Ok(WalkEnd { t: t_min, capped: false, crossings });
            }
        }
        if e < 0 {
            kx += 1;
            e += d * bb;
            cx += 1;
            if cx == n {
                cx = 0;
                j = h(j);
                crossings += 1;
            }
        } else if e > 0 {
            ky += 1;
            e -= d * aa;
            cy += 1;
            if cy == n {
                cy = 0;
                j = vv(j);
                crossings += 1;
            }
        } else {
            kx += 1;
            ky += 1;
            e += d * (bb - aa);
            match (cx == n - 1, cy == n - 1) {
                (true, true) => {
                    if cone_ahead[j] {
                        return Err(Error::StartOnSingularLeaf(o.vertex_at(j, corner)));
                    }
                    j = vv(h(j));
                    cx = 0;
                    cy = 0;
                    crossings += 2;
                }
                (true, false) => {
                    j = h(j);
                    cx = 0;
                    cy += 1;
                    crossings += 1;
                }
                (false, true) => {
                    j = vv(j);
                    cy = 0;
                    cx += 1;
                    crossings += 1;
                }
                (false, false) => {
                    cx += 1;
                    cy += 1;
                }
            }
        }
        if armed && visit(cell(j, cx, cy), t_next) {
            return Ok(WalkEnd { t: t_next, capped: false, crossings });
        }
    }
}

/// First time `t > t_min` at which the orbit is in each cell; `None` for cells not reached before `t_cap`.
pub fn first_visit_times(
    o: &Origami,
    dir: (&BigInt, &BigInt),
    start: &SurfacePoint,
    n_side: usize,
    t_min: f64,
    t_cap: f64,
) -> Result<Vec<Option<f64>>> {
    let mut times = vec![None; o.n() * n_side * n_side];
    let mut left = times.len();
    walk_cells(o, dir, start, n_side, t_min, t_cap, |c, t| {
        if times[c].is_none() {
            times[c] = Some(t);
            left -= 1;
        }
        left == 0
    })?;
    Ok(times)
}

/// One measurement of `T(X, α, p, r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HittingRecord {
    pub slope_spec: String,
    pub depth: usize,
    #[serde(rename = "pN")]
    pub p_n: String,
    #[serde(rename = "qN")]
    pub q_n: String,
    pub square: usize,
    pub x: String,
    pub y: String,
    pub r: f64,
    pub cells: u64,
    /// Measured time, or the cap when `capped`.
    #[serde(rename = "T")]
    pub t: f64,
    pub capped: bool,
    pub crossings: u64,
    pub seed: u64,
}

/// Measures the `r`-dense time of the orbit of `p` in the given slope.
pub fn r_dense_time(o: &Origami, slope: &CfSlope, p: &SurfacePoint, r: f64, caps: &Caps, seed: u64) -> Result<HittingRecord> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius {r}")));
    }
    if caps.time <= r {
        return Err(Error::CapTooSmall(format!("time cap {} does not exceed r = {r}", caps.time)));
    }
    let n_side = cells_per_side(r);
    let cells = o.n() * n_side * n_side;
    if cells.div_ceil(8) > caps.mem_bytes {
        return Err(Error::CapExceeded(cells.div_ceil(8)));
    }
    let real = realize_slope(slope, r, caps.time)?;
    let mut flags = vec![0u64; cells.div_ceil(64)];
    let mut left = cells;
    let mut last = 0f64;
    let end = walk_cells(o, (&real.p, &real.q), p, n_side, r, caps.time, |c, t| {
        let (w, bit) = (c / 64, 1u64 << (c % 64));
        if flags[w] & bit == 0 {
            flags[w] |= bit;
            left -= 1;
            last = t;
        }
        left == 0
    })?;
    // The backward orbit over the same span must avoid cone vertices too.
    let (bp, bq) = (-&real.p, -&real.q);
    walk_cells(o, (&bp, &bq), p, 1, f64::INFINITY, end.t, |_, _| false)?;
    Ok(HittingRecord {
        slope_spec: slope.to_string(),
        depth: real.depth,
        p_n: real.p.to_string(),
        q_n: real.q.to_string(),
        square: p.square,
        x: p.x.to_string(),
        y: p.y.to_string(),
        r,
        cells: cells as u64,
        t: if end.capped { caps.time } else { last },
        capped: end.capped,
        crossings: end.crossings,
        seed,
    })
}

/// Random start point with coordinates `k/9973` whose orbit avoids cone vertices
/// over `±t_cap` in the realized slope.
pub fn random_start(o: &Origami, slope: &CfSlope, r: f64, t_cap: f64, rng: &mut ChaCha8Rng) -> Result<SurfacePoint> {
    const DEN: i64 = 9973;
    let real = realize_slope(slope, r, t_cap)?;
    let (bp, bq) = (-&real.p, -&real.q);
    for _ in 0..1000 {
        let p = SurfacePoint {
            square: rng.gen_range(0..o.n()),
            x: Q::new(rng.gen_range(1..DEN).into(), DEN.into()),
            y: Q::new(rng.gen_range(1..DEN).into(), DEN.into()),
        };
        let fwd = walk_cells(o, (&real.p, &real.q), &p, 1, f64::INFINITY, t_cap, |_, _| false);
        let bwd = walk_cells(o, (&bp, &bq), &p, 1, f64::INFINITY, t_cap, |_, _| false);
        if fwd.is_ok() && bwd.is_ok() {
            return Ok(p);
        }
    }
    Err(Error::StartOnSingularLeaf(usize::MAX))
}

/// Measures `T` at every radius in parallel; the output follows the order of `radii`.
pub fn hitting_records(o: &Origami, slope: &CfSlope, p: &SurfacePoint, radii: &[f64], caps: &Caps, seed: u64) -> Result<Vec<HittingRecord>> {
    radii.par_iter().map(|&r| r_dense_time(o, slope, p, r, caps, seed)).collect()
}

/// `count` radii spaced geometrically from `r_max` down to `r_min`.
pub fn geometric_radii(r_max: f64, r_min: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![r_max];
    }
    let ratio = (r_min / r_max).powf(1.0 / (count - 1) as f64);
    (0..count).map(|k| r_max * ratio.powi(k as i32)).collect()
}

/// One row of the check `T(r_n) ≤ 4K q_n` at `r_n = 2(K+1)/q_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecialTimeRow {
    pub n: usize,
    pub q_n: String,
    pub r_n: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub bound: f64,
    pub ratio: f64,
    pub capped: bool,
    pub ok: bool,
}

/// Measures `T` at the radii `r_n = 2(K+1)/q_n` and compares with `4K q_n`.
/// The time cap of each run is four times its bound.
pub fn special_times_check(
    o: &Origami,
    slope: &CfSlope,
    p: &SurfacePoint,
    levels: &[usize],
    k: u32,
    mem_bytes: usize,
    seed: u64,
) -> Result<Vec<SpecialTimeRow>> {
    let depth = levels.iter().max().copied().unwrap_or(0);
    let e = slope.expand(depth);
    levels
        .par_iter()
        .map(|&n| {
            let q = e.q.get(n).ok_or_else(|| Error::OutOfRange(format!("level {n}")))?;
            let qf = q.to_f64().unwrap_or(f64::INFINITY);
            let r_n = 2.0 * (k as f64 + 1.0) / qf;
            let bound = 4.0 * k as f64 * qf;
            let caps = Caps { time: 4.0 * bound, mem_bytes };
            let rec = r_dense_time(o, slope, p, r_n, &caps, seed)?;
            Ok(SpecialTimeRow {
                n,
                q_n: q.to_string(),
                r_n,
                t: rec.t,
                bound,
                ratio: rec.t / bound,
                capped: rec.capped,
                ok: !rec.capped && rec.t <= bound,
            })
        })
        .collect()
}

/// Geometric audit behind the lower bound at one level `n = 2k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TubeAudit {
    /// `κ² > q_n²/2` for the stretch factor of `A = g(a_1, …, a_n)` on the pulled-back direction.
    pub kappa_ok: bool,
    pub kappa: f64,
    /// Cylinder of `Y` and horizontal interval of width `2·r₀` avoided by the
    /// pulled-back orbit during `0 ≤ t ≤ q_n^{w−1}/2`.
    pub free_band: Option<(usize, f64, f64)>,
    pub window: f64,
}

fn ln(x: &BigInt) -> f64 {
    crate::cf::ln_big(x)
}

/// Pulls the orbit back to `Y = A⁻¹·X` with `A = g(a_1, …, a_n)`, checks the
/// stretch factor and looks for a vertical geodesic whose `1/4`-neighbourhood
/// is not visited during the window `q_n^{w−1}/2`.
pub fn tube_audit(o: &Origami, e: &CfExpansion, n: usize, w: &Q, dir: (&BigInt, &BigInt), p: &SurfacePoint) -> Result<TubeAudit> {
    let a = g_matrix(&e.a[..n])?;
    let d = induced_cylinders(o, &a, Base::Vertical)?;
    let orig = Direction::new(dir.0.clone(), dir.1.clone())?;
    let back = orig.transformed(&a.inverse()?);
    let q = &e.q[n];
    // κ² = |dir|² / |A⁻¹ dir|²
    let kappa_ok = orig.norm_sq() * BigInt::from(2) > q * q * back.norm_sq();
    let kappa = orig.norm() / back.norm();
    let window = ((w - Q::one()).to_f64().unwrap_or(0.0) * ln(q)).exp() / 2.0;
    let lam_f = window / back.norm();
    let lam = Q::new(BigInt::from((lam_f * 1048576.0).ceil() as i64), BigInt::from(1048576));
    let start = d.pull_back(p);
    let seg = make_segment(&d.origami, &start, &back, &Extent::Lambda(lam)).map_err(|err| match err {
        Error::ConeVertexInInterior(v) => Error::StartOnSingularLeaf(v),
        err => err,
    })?;
    let mut visited: Vec<Vec<(Q, Q)>> = vec![vec![]; d.cylinders.len()];
    let pieces = seg.pieces.iter().chain(seg.endpoint_contacts.iter());
    for pc in pieces {
        let (c, off) = d.strip_position(pc.square);
        let off = Q::from_integer(off.into());
        let (x0, x1) = (&off + &pc.from.0, &off + &pc.to.0);
        visited[c].push(if x0 <= x1 { (x0, x1) } else { (x1, x0) });
    }
    let r0 = Q::new(1.into(), 4.into());
    let mut free_band = None;
    for (c, iv) in visited.iter_mut().enumerate() {
        iv.sort();
        let width = Q::from_integer(d.cylinders[c].width.into());
        let mut cursor = Q::zero();
        let mut gaps = vec![];
        for (lo, hi) in iv.iter() {
            if *lo > cursor {
                gaps.push((cursor.clone(), lo.clone()));
            }
            if *hi > cursor {
                cursor = hi.clone();
            }
        }
        if cursor < width {
            gaps.push((cursor, width));
        }
        if let Some((lo, hi)) = gaps.into_iter().find(|(lo, hi)| hi - lo >= &r0 + &r0) {
            let f = |x: &Q| x.to_f64().unwrap_or(f64::NAN);
            free_band = Some((c, f(&lo), f(&hi)));
            break;
        }
    }
    Ok(TubeAudit { kappa_ok, kappa, free_band, window })
}

/// One row of the check `T(r_k) ≥ q_{2k}^w/√8` at `r_k = 1/(q_{2k}√32)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerBoundRow {
    pub n: usize,
    pub p_n: String,
    pub q_n: String,
    pub r_k: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub bound: f64,
    pub capped: bool,
    pub ok: bool,
    pub audit: TubeAudit,
}

/// Diophantine type of a slope built by the type rule, or `ExponentTooSmall`.
pub fn slope_type(slope: &CfSlope) -> Result<Q> {
    match &slope.rule {
        QuotientRule::Type(w) if *w > Q::one() => Ok(w.clone()),
        QuotientRule::Type(w) => Err(Error::ExponentTooSmall(w.to_f64().unwrap_or(1.0))),
        _ => Err(Error::ExponentTooSmall(1.0)),
    }
}

/// Even levels `n` with `a_{n+1} ≥ q_n^{w−1}` and `q_n` in `[q_min, q_max]`.
pub fn lower_bound_levels(slope: &CfSlope, q_min: u64, q_max: u64) -> Result<Vec<usize>> {
    let w = slope_type(slope)?;
    let mut out = vec![];
    let mut depth = 8;
    loop {
        let e = slope.expand(depth);
        out.clear();
        for n in (2..e.depth()).step_by(2) {
            let q = &e.q[n];
            if *q < BigInt::from(q_min) || *q > BigInt::from(q_max) {
                continue;
            }
            if e.a[n] >= ceil_rational_power(q, &(&w - Q::one())) {
                out.push(n);
            }
        }
        if e.q[e.depth()] > BigInt::from(q_max) {
            return Ok(out);
        }
        depth *= 2;
    }
}

/// Measures `T` at `r_k = 1/(q_{2k}√32)` for each level and runs the tube audit.
pub fn lower_bound_experiment(
    o: &Origami,
    slope: &CfSlope,
    p: &SurfacePoint,
    levels: &[usize],
    caps: &Caps,
    seed: u64,
) -> Result<Vec<LowerBoundRow>> {
    let w = slope_type(slope)?;
    let wf = w.to_f64().unwrap_or(f64::NAN);
    let depth = levels.iter().max().copied().unwrap_or(0) + 1;
    let e = slope.expand(depth);
    levels
        .par_iter()
        .map(|&n| {
            if n % 2 == 1 || n > e.depth() {
                return Err(Error::OutOfRange(format!("level {n} is not an even level within depth {}", e.depth())));
            }
            let q = &e.q[n];
            let qf = q.to_f64().unwrap_or(f64::INFINITY);
            let r_k = 1.0 / (qf * 32f64.sqrt());
            let bound = (wf * qf.ln()).exp() / 8f64.sqrt();
            let rec = r_dense_time(o, slope, p, r_k, caps, seed)?;
            let real = realize_slope(slope, r_k, caps.time)?;
            let audit = tube_audit(o, &e, n, &w, (&real.p, &real.q), p)?;
            Ok(LowerBoundRow {
                n,
                p_n: e.p[n].to_string(),
                q_n: q.to_string(),
                r_k,
                t: rec.t,
                bound,
                capped: rec.capped,
                ok: (rec.capped && caps.time >= bound) || rec.t >= bound,
                audit,
            })
        })
        .collect()
}

/// Least-squares fit through the upper envelope of `(−log r, log T)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub h_hat: f64,
    pub intercept: f64,
    /// Envelope vertices `(−log r, log T)` in increasing order.
    pub envelope: Vec<(f64, f64)>,
    /// `log T / −log r` for every input point, in input order.
    pub per_point: Vec<f64>,
    pub points: usize,
    pub decades: f64,
}

/// Fits `Ĥ` from `(r, T)` pairs: at least 5 points spanning 1.5 decades of `r`.
pub fn exponent_estimate(points: &[(f64, f64)]) -> Result<ExponentFit> {
    let valid: Vec<(f64, f64)> = points.iter().copied().filter(|&(r, t)| r > 0.0 && t > 0.0 && r < 1.0).collect();
    let (rmin, rmax) = valid.iter().fold((f64::INFINITY, 0f64), |(lo, hi), &(r, _)| (lo.min(r), hi.max(r)));
    let decades = if valid.is_empty() { 0.0 } else { (rmax / rmin).log10() };
    if valid.len() < 5 || decades < 1.5 {
        return Err(Error::InsufficientSpan(format!("{} points over {decades:.2} decades", valid.len())));
    }
    let mut xy: Vec<(f64, f64)> = valid.iter().map(|&(r, t)| (-r.ln(), t.ln())).collect();
    xy.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    let mut hull: Vec<(f64, f64)> = vec![];
    for &pt in xy.iter().rev() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Keep only right turns when scanning from right to left.
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross <= 0.0 {
                break;
            }
            hull.pop();
        }
        if hull.last().is_some_and(|h| h.0 == pt.0) {
            continue;
        }
        hull.push(pt);
    }
    hull.reverse();
    let m = hull.len() as f64;
    let (sx, sy) = hull.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let (sxx, sxy) = hull.iter().fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx).powi(2), b + (p.0 - mx) * (p.1 - my)));
    let h_hat = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    Ok(ExponentFit {
        h_hat,
        intercept: my - h_hat * mx,
        envelope: hull,
        per_point: points.iter().map(|&(r, t)| t.ln() / -r.ln()).collect(),
        points: valid.len(),
        decades,
    })
}

/// Deterministic start point for a seed.
pub fn seeded_start(o: &Origami, slope: &CfSlope, r: f64, t_cap: f64, seed: u64) -> Result<SurfacePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_start(o, slope, r, t_cap, &mut rng)
}

/// `(r, T)` pairs of uncapped records.
pub fn fit_points(records: &[HittingRecord]) -> Vec<(f64, f64)> {
    records.iter().filter(|r| !r.capped).map(|r| (r.r, r.t)).collect()
}

/// Whether an expansion's `n`-th convergent is `A·0` for `A = g(a_1, …, a_n)`.
pub fn convergent_is_column(e: &CfExpansion, n: usize) -> Result<bool> {
    let a = g_matrix(&e.a[..n])?;
    Ok(n % 2 == 0 && a.b == e.p[n] && a.d == e.q[n] || n % 2 == 1 && a.a == e.p[n] && a.c == e.q[n])
}
