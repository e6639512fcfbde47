//! Letter transitions, tile crossings, the cutting-sequence classifier and
//! the randomized intersection harness on lettered origamis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::parse_rational;
use crate::error::{Error, Result};
use crate::flow::{
    cutting_sequence, make_segment, planar_intersection, point_on_segment, segments_intersect, squares_at_vertex,
    AdvanceKind, Crossing, Direction, Extent, Segment, Tracer,
};
use crate::origami::{EdgeId, Origami, SurfacePoint};
use crate::sl2::reflect_s;

type Q = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    A,
    B,
    C,
    D,
}

/// A letter `A_i, B_i, C_i, D_i` with `i ∈ Z/3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub family: Family,
    pub index: u8,
}

impl Letter {
    pub fn new(family: Family, index: i64) -> Self {
        Letter { family, index: index.rem_euclid(3) as u8 }
    }

    pub fn all() -> Vec<Letter> {
        let mut v = Vec::new();
        for f in [Family::A, Family::B, Family::C, Family::D] {
            for i in 0..3 {
                v.push(Letter::new(f, i));
            }
        }
        v
    }

    fn i(self) -> i64 {
        i64::from(self.index)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.index)
    }
}

impl FromStr for Letter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        let family = match chars.next() {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            _ => return Err(Error::Parse(format!("bad letter {s:?}"))),
        };
        let index: i64 = chars.as_str().parse().map_err(|_| Error::Parse(format!("bad letter {s:?}")))?;
        if !(0..3).contains(&index) {
            return Err(Error::Parse(format!("letter index out of range in {s:?}")));
        }
        Ok(Letter::new(family, index))
    }
}

impl Serialize for Letter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Successors claimed for upward segments with slope in `(0,1)`:
/// `C_i → A_{i+1}`, `B_i → D_{i−1}, C_{i−1}`, `A_i → A_{i+1}, B_{i+1}, C_{i+1}`, `D_i → A_{i−1}, B_{i−1}`.
pub fn asserted_successors(l: Letter) -> BTreeSet<Letter> {
    let i = l.i();
    let set: Vec<Letter> = match l.family {
        Family::C => vec![Letter::new(Family::A, i + 1)],
        Family::B => vec![Letter::new(Family::D, i - 1), Letter::new(Family::C, i - 1)],
        Family::A => vec![Letter::new(Family::A, i + 1), Letter::new(Family::B, i + 1), Letter::new(Family::C, i + 1)],
        Family::D => vec![Letter::new(Family::A, i - 1), Letter::new(Family::B, i - 1)],
    };
    set.into_iter().collect()
}

/// An open interval of slopes; `None` is an infinite endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeCone {
    pub lo: Option<Q>,
    pub hi: Option<Q>,
}

impl SlopeCone {
    pub fn new(lo: Option<Q>, hi: Option<Q>) -> Result<Self> {
        if lo.is_none() && hi.is_none() {
            return Err(Error::InvalidArgument("a cone needs at least one finite endpoint".into()));
        }
        if let (Some(a), Some(b)) = (&lo, &hi) {
            if a >= b {
                return Err(Error::InvalidArgument(format!("empty cone ({a}, {b})")));
            }
        }
        Ok(SlopeCone { lo, hi })
    }

    fn finite(lo: i64, hi: i64) -> Self {
        SlopeCone { lo: Some(Q::from_integer(lo.into())), hi: Some(Q::from_integer(hi.into())) }
    }

    /// `0 < Slope < 1`.
    pub fn unit() -> Self {
        SlopeCone::finite(0, 1)
    }

    /// `Slope < −1`.
    pub fn below_minus_one() -> Self {
        SlopeCone { lo: None, hi: Some(Q::from_integer((-1).into())) }
    }

    /// `−1 < Slope < 0`.
    pub fn minus_unit() -> Self {
        SlopeCone::finite(-1, 0)
    }

    /// `Slope > 1`.
    pub fn above_one() -> Self {
        SlopeCone { lo: Some(Q::one()), hi: None }
    }

    pub fn contains(&self, s: &Q) -> bool {
        self.lo.as_ref().is_none_or(|a| s > a) && self.hi.as_ref().is_none_or(|b| s < b)
    }

    /// Maps `u ∈ (0,1)` monotonically onto the cone.
    pub fn from_unit(&self, u: &Q) -> Q {
        let one = Q::one();
        match (&self.lo, &self.hi) {
            (Some(a), Some(b)) => a + u * (b - a),
            (None, Some(b)) => b - (u.recip() - &one),
            (Some(a), None) => a + (u.recip() - &one),
            (None, None) => unreachable!("validated on construction"),
        }
    }
}

impl fmt::Display for SlopeCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = |x: &Option<Q>, inf: &str| x.as_ref().map_or(inf.to_string(), |q| q.to_string());
        write!(f, "({},{})", e(&self.lo, "-inf"), e(&self.hi, "inf"))
    }
}

impl FromStr for SlopeCone {
    type Err = Error;
    /// `a,b` with `inf` / `-inf` for infinite endpoints.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected a,b for a cone, got {s:?}")))?;
        let end = |t: &str| -> Result<Option<Q>> {
            match t.trim() {
                "inf" | "+inf" | "-inf" => Ok(None),
                t => parse_rational(t).map(Some),
            }
        };
        SlopeCone::new(end(a)?, end(b)?)
    }
}

/// Where an upward line starting on a lettered edge first meets another lettered edge.
fn next_letter(o: &Origami, start_edge: EdgeId, t: &Q, slope: &Q) -> Option<String> {
    let start = match start_edge {
        EdgeId::Horizontal(j) => SurfacePoint { square: o.v().apply(j), x: t.clone(), y: Q::zero() },
        EdgeId::Vertical(j) => SurfacePoint { square: o.h().apply(j), x: Q::zero(), y: t.clone() },
    };
    let dir = Direction::from_rational_slope(slope, true);
    let mut tr = Tracer::new(o, &start, &dir).ok()?;
    for _ in 0..10_000 {
        match tr.advance(None).ok()?.kind {
            AdvanceKind::Edge(ev) => {
                if let Some(l) = ev.label {
                    return Some(l);
                }
            }
            AdvanceKind::Vertex(ev) => {
                if matches!(ev.crossing, Crossing::Vertex { cone: true, .. }) {
                    return None;
                }
            }
            AdvanceKind::Limit => unreachable!("no limit given"),
        }
    }
    None
}

#[derive(Debug, Clone, Serialize)]
pub struct PairEvidence {
    pub count: usize,
    /// `(position, slope)` of the sample with the smallest slope.
    pub min_slope_sample: (String, String),
    /// `(position, slope)` of the sample with the largest slope.
    pub max_slope_sample: (String, String),
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitionRelation {
    pub cone: String,
    pub successors: BTreeMap<String, BTreeSet<String>>,
    pub evidence: BTreeMap<String, BTreeMap<String, PairEvidence>>,
    pub samples_per_letter: usize,
    pub cone_hits: usize,
    /// Letters whose successor set changed in the final refinement round.
    pub non_converged: Vec<String>,
}

struct Sample {
    t: Q,
    u: Q,
}

fn grid(g: usize) -> Vec<Sample> {
    let mut out = Vec::with_capacity(g * g);
    let den = BigInt::from(2 * g);
    for a in 0..g {
        for b in 0..g {
            out.push(Sample {
                t: Q::new(BigInt::from(2 * a + 1), den.clone()),
                u: Q::new(BigInt::from(2 * b + 1), den.clone()),
            });
        }
    }
    out
}

fn adversarial() -> Vec<Sample> {
    let mut vals = Vec::new();
    for k in 1..=6u32 {
        let e = Q::new(BigInt::one(), BigInt::from(10u64.pow(k)));
        vals.push(e.clone());
        vals.push(Q::one() - e);
    }
    let mut out = Vec::new();
    for t in &vals {
        for u in &vals {
            out.push(Sample { t: t.clone(), u: u.clone() });
        }
    }
    out
}

/// Samples the first lettered edge reached from every lettered edge.
///
/// Rounds use stratified grids of side `g` for each `g` in `rounds`, plus
/// samples near the corners of the parameter square in the last round.
pub fn next_letter_relation(o: &Origami, cone: &SlopeCone, rounds: &[usize]) -> Result<TransitionRelation> {
    if !o.has_labels() {
        return Err(Error::PreconditionViolated("origami has no lettered edges".into()));
    }
    if rounds.is_empty() {
        return Err(Error::InvalidArgument("at least one sampling round required".into()));
    }
    let lettered: Vec<(String, EdgeId)> = o
        .edges()
        .iter()
        .filter(|e| !e.dotted)
        .filter_map(|e| e.label.clone().map(|l| (l, e.id)))
        .collect();
    let mut successors: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut evidence: BTreeMap<String, BTreeMap<String, PairEvidence>> = BTreeMap::new();
    let mut previous: Option<BTreeMap<String, BTreeSet<String>>> = None;
    let mut samples_per_letter = 0;
    let mut cone_hits = 0;
    for (r, &g) in rounds.iter().enumerate() {
        let mut samples = grid(g);
        if r + 1 == rounds.len() {
            samples.extend(adversarial());
        }
        samples_per_letter += samples.len();
        let results: Vec<(usize, Vec<Option<String>>)> = lettered
            .par_iter()
            .enumerate()
            .map(|(li, (_, edge))| {
                let out = samples.iter().map(|s| next_letter(o, *edge, &s.t, &cone.from_unit(&s.u))).collect();
                (li, out)
            })
            .collect();
        for (li, outs) in results {
            let from = &lettered[li].0;
            for (s, res) in samples.iter().zip(outs) {
                let Some(to) = res else {
                    cone_hits += 1;
                    continue;
                };
                successors.entry(from.clone()).or_default().insert(to.clone());
                let slope = cone.from_unit(&s.u);
                let ev = evidence.entry(from.clone()).or_default().entry(to).or_insert_with(|| PairEvidence {
                    count: 0,
                    min_slope_sample: (s.t.to_string(), slope.to_string()),
                    max_slope_sample: (s.t.to_string(), slope.to_string()),
                });
                ev.count += 1;
                if slope < parse_rational(&ev.min_slope_sample.1)? {
                    ev.min_slope_sample = (s.t.to_string(), slope.to_string());
                }
                if slope > parse_rational(&ev.max_slope_sample.1)? {
                    ev.max_slope_sample = (s.t.to_string(), slope.to_string());
                }
            }
        }
        if r + 1 < rounds.len() {
            previous = Some(successors.clone());
        }
    }
    let non_converged = match previous {
        Some(prev) => successors
            .iter()
            .filter(|(k, v)| prev.get(*k) != Some(*v))
            .map(|(k, _)| k.clone())
            .collect(),
        None => vec![],
    };
    Ok(TransitionRelation { cone: cone.to_string(), successors, evidence, samples_per_letter, cone_hits, non_converged })
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitionCheck {
    pub letter: String,
    pub sampled: Vec<String>,
    pub asserted: Vec<String>,
    /// Sampled successors outside the asserted set.
    pub violations: Vec<String>,
    /// Asserted successors never sampled.
    pub unrealized: Vec<String>,
}

/// Compares a relation sampled in the cone `(0,1)` with the asserted successor sets.
pub fn check_against_asserted(rel: &TransitionRelation) -> Result<Vec<TransitionCheck>> {
    let mut out = Vec::new();
    for l in Letter::all() {
        let key = l.to_string();
        let sampled: BTreeSet<Letter> = rel
            .successors
            .get(&key)
            .map(|s| s.iter().map(|x| x.parse()).collect::<Result<_>>())
            .transpose()?
            .unwrap_or_default();
        let asserted = asserted_successors(l);
        out.push(TransitionCheck {
            letter: key,
            sampled: sampled.iter().map(Letter::to_string).collect(),
            asserted: asserted.iter().map(Letter::to_string).collect(),
            violations: sampled.difference(&asserted).map(Letter::to_string).collect(),
            unrealized: asserted.difference(&sampled).map(Letter::to_string).collect(),
        });
    }
    Ok(out)
}

/// Tile index `i` of Ornithorynque square `(i, a, b)`.
pub fn tile_of(square: usize) -> usize {
    square / 4
}

/// Tiles whose closed squares meet the segment.
pub fn tiles_crossed(o: &Origami, s: &Segment) -> BTreeSet<usize> {
    let mut squares: BTreeSet<usize> = s.pieces.iter().chain(&s.endpoint_contacts).map(|p| p.square).collect();
    for v in s.vertices() {
        squares.extend(squares_at_vertex(o, v));
    }
    squares.into_iter().map(tile_of).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Verdict {
    /// A triple `(C_{i+2}, C_i, C_{i+1})` or `(D_i, D_{i+2}, D_{i+1})` at position `k` (1-based).
    Triple { i: u8, k: usize },
    /// `γ_k ∈ {C_{i+2}, A_i}` followed by `γ_{k+1} ∈ {B_{i+1}, D_i}` with `2 ≤ k ≤ n−1`.
    Pair { i: u8, k: usize },
    /// Neither pattern; `slope_in_range` records whether `−6 < Slope(H) < −1`.
    Unclassified { slope_in_range: bool },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Triple { .. } => "triple",
            Verdict::Pair { .. } => "pair",
            Verdict::Unclassified { .. } => "unclassified",
        }
    }

    pub fn predicts_intersection(&self) -> bool {
        !matches!(self, Verdict::Unclassified { .. })
    }
}

pub const MIN_WORD: usize = 12;

/// Decides which combinatorial pattern of the `H` word forces `H ∩ V ≠ ∅`.
/// `word_h` is read with `H` oriented rightward.
pub fn criterion_classify(word_h: &[Letter], word_v: &[Letter], slope_h: &Q) -> Result<Verdict> {
    for (got, _) in [(word_h.len(), 'h'), (word_v.len(), 'v')] {
        if got < MIN_WORD {
            return Err(Error::WordTooShort { needed: MIN_WORD, got });
        }
    }
    let n = word_h.len();
    for k in 0..n - 2 {
        for i in 0..3i64 {
            let c = |d: i64| Letter::new(Family::C, i + d);
            let d = |e: i64| Letter::new(Family::D, i + e);
            let w = &word_h[k..k + 3];
            if w == [c(2), c(0), c(1)] || w == [d(0), d(2), d(1)] {
                return Ok(Verdict::Triple { i: i as u8, k: k + 1 });
            }
        }
    }
    // 1-based k with 2 ≤ k ≤ n−1 is 0-based 1..=n−2.
    for k in 1..n - 1 {
        for i in 0..3i64 {
            let first = [Letter::new(Family::C, i + 2), Letter::new(Family::A, i)];
            let second = [Letter::new(Family::B, i + 1), Letter::new(Family::D, i)];
            if first.contains(&word_h[k]) && second.contains(&word_h[k + 1]) {
                return Ok(Verdict::Pair { i: i as u8, k: k + 1 });
            }
        }
    }
    let slope_in_range = *slope_h > Q::from_integer((-6).into()) && *slope_h < Q::from_integer((-1).into());
    Ok(Verdict::Unclassified { slope_in_range })
}

pub fn parse_word(letters: &[String]) -> Result<Vec<Letter>> {
    letters.iter().map(|l| l.parse()).collect()
}

/// Planar oracle for two lines in the plane: if both cross `{1}×[0,1]`,
/// returns whether their intersection lies in `[0,2]×[0,1]`. `None` when the
/// hypotheses fail (a line misses the edge, or the lines are parallel).
pub fn lines_meet_near_shared_edge(v_point: (Q, Q), v_slope: &Q, h_point: (Q, Q), h_slope: &Q) -> Option<bool> {
    // x = px + slope·(y − py); at x = 1: y = py + (1 − px)/slope
    let at_edge = |p: &(Q, Q), s: &Q| -> Option<Q> {
        if s.is_zero() {
            return (p.0 == Q::one()).then(|| p.1.clone());
        }
        Some(&p.1 + (Q::one() - &p.0) / s)
    };
    let in_unit = |y: &Q| !y.is_negative() && *y <= Q::one();
    let yv = at_edge(&v_point, v_slope)?;
    let yh = at_edge(&h_point, h_slope)?;
    if !in_unit(&yv) || !in_unit(&yh) || v_slope == h_slope {
        return None;
    }
    // Both pass (1, yv), (1, yh); solve 1 + sv (y − yv) = 1 + sh (y − yh).
    let y = (v_slope * &yv - h_slope * &yh) / (v_slope - h_slope);
    let x = Q::one() + v_slope * (&y - &yv);
    let two = Q::from_integer(2.into());
    Some(!x.is_negative() && x <= two && in_unit(&y))
}

/// Planar oracle for two chords of the unit square: extends both into
/// the neighbouring square across a side they share and tests for a common
/// point in the union of the two squares.
pub fn chords_meet_via_shared_side(h: &((Q, Q), (Q, Q)), v: &((Q, Q), (Q, Q))) -> bool {
    if planar_intersection(&h.0, &h.1, &v.0, &v.1).is_some() {
        return true;
    }
    let (zero, one) = (Q::zero(), Q::one());
    let sides = |p: &(Q, Q)| -> Vec<u8> {
        let mut s = vec![];
        if p.0 == zero {
            s.push(0);
        }
        if p.0 == one {
            s.push(1);
        }
        if p.1 == zero {
            s.push(2);
        }
        if p.1 == one {
            s.push(3);
        }
        s
    };
    let hs: BTreeSet<u8> = sides(&h.0).into_iter().chain(sides(&h.1)).collect();
    let vs: BTreeSet<u8> = sides(&v.0).into_iter().chain(sides(&v.1)).collect();
    let extend = |c: &((Q, Q), (Q, Q))| {
        let d = (&c.1 .0 - &c.0 .0, &c.1 .1 - &c.0 .1);
        let three = Q::from_integer(3.into());
        (
            (&c.0 .0 - &three * &d.0, &c.0 .1 - &three * &d.1),
            (&c.1 .0 + &three * &d.0, &c.1 .1 + &three * &d.1),
        )
    };
    let (he, ve) = (extend(h), extend(v));
    hs.intersection(&vs).any(|&side| {
        let Some(p) = planar_intersection(&he.0, &he.1, &ve.0, &ve.1) else { return false };
        let (lo_x, hi_x, lo_y, hi_y) = match side {
            0 => (-1, 1, 0, 1),
            1 => (0, 2, 0, 1),
            2 => (0, 1, -1, 1),
            _ => (0, 1, 0, 2),
        };
        let q = |k: i64| Q::from_integer(k.into());
        p.0 >= q(lo_x) && p.0 <= q(hi_x) && p.1 >= q(lo_y) && p.1 <= q(hi_y)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConePair {
    /// `Slope(H) < −1`, `0 < Slope(V) < 1`.
    Main,
    /// `−1 < Slope(H) < 0`, `Slope(V) > 1`.
    Reflected,
}

impl ConePair {
    pub fn cones(self) -> (SlopeCone, SlopeCone) {
        match self {
            ConePair::Main => (SlopeCone::below_minus_one(), SlopeCone::unit()),
            ConePair::Reflected => (SlopeCone::minus_unit(), SlopeCone::above_one()),
        }
    }
}

impl FromStr for ConePair {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "main" => Ok(ConePair::Main),
            "reflected" => Ok(ConePair::Reflected),
            _ => Err(Error::Parse(format!("cone pair must be main or reflected, got {s:?}"))),
        }
    }
}

/// Random exact value in `(0,1)` with denominator `2^32`.
fn random_unit(rng: &mut ChaCha8Rng) -> Q {
    let k: u32 = rng.gen_range(1..=u32::MAX);
    Q::new(BigInt::from(k), BigInt::one() << 32)
}

/// Cone parameter in `(0,1)`: half uniform, half log-uniform towards either end.
fn random_cone_unit(rng: &mut ChaCha8Rng) -> Q {
    if rng.gen_bool(0.5) {
        let b: u32 = 4096;
        Q::new(BigInt::from(rng.gen_range(1..b)), BigInt::from(b))
    } else {
        let m = (rng.gen_range(0.0..(1e4f64).ln())).exp().floor().max(2.0) as u64;
        let e = Q::new(BigInt::one(), BigInt::from(m));
        if rng.gen_bool(0.5) { e } else { Q::one() - e }
    }
}

pub fn random_point(o: &Origami, rng: &mut ChaCha8Rng) -> SurfacePoint {
    let square = rng.gen_range(0..o.n());
    SurfacePoint { square, x: random_unit(rng), y: random_unit(rng) }
}

/// Random upward segment with slope in the cone and length at least `min_len`.
/// Returns `None` when the draw runs into a cone vertex.
pub fn random_segment(o: &Origami, cone: &SlopeCone, min_len: &Q, rng: &mut ChaCha8Rng) -> Option<Segment> {
    let p = random_point(o, rng);
    let s = cone.from_unit(&random_cone_unit(rng));
    let dir = Direction::from_rational_slope(&s, true);
    make_segment(o, &p, &dir, &Extent::MinLength(min_len.clone())).ok()
}

/// Compact description of a segment for reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentDesc {
    pub square: usize,
    pub x: String,
    pub y: String,
    pub dx: String,
    pub dy: String,
    pub lambda: String,
    pub length: f64,
}

impl SegmentDesc {
    pub fn of(s: &Segment) -> Self {
        SegmentDesc {
            square: s.start.square,
            x: s.start.x.to_string(),
            y: s.start.y.to_string(),
            dx: s.direction.dx.to_string(),
            dy: s.direction.dy.to_string(),
            lambda: s.lambda_end.to_string(),
            length: s.length(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairWitness {
    pub trial: usize,
    pub h: SegmentDesc,
    pub v: SegmentDesc,
    pub word_h: Vec<String>,
    pub word_v: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HarnessReport {
    pub cone_pair: ConePair,
    pub min_length: String,
    pub trials: usize,
    pub seed: u64,
    pub rejected_draws: usize,
    pub non_intersecting: usize,
    pub witnesses: Vec<PairWitness>,
    pub verdicts: BTreeMap<String, usize>,
    pub too_short: usize,
    pub classified: usize,
    pub classified_confirmed: usize,
    pub unclassified_out_of_range: usize,
    pub incidence_failures: usize,
    pub min_letters_h: Option<usize>,
    pub min_letters_v: Option<usize>,
}

impl HarnessReport {
    pub fn passed(&self) -> bool {
        self.non_intersecting == 0
            && self.classified == self.classified_confirmed
            && self.unclassified_out_of_range == 0
            && self.incidence_failures == 0
    }
}

/// The orientation-reversing symmetry with linear part `(x, y) ↦ (−x, y)`,
/// when the reflected origami is isomorphic to the original.
pub struct Reflection {
    sigma: crate::perm::Permutation,
}

impl Reflection {
    pub fn new(o: &Origami) -> Option<Self> {
        let s = reflect_s(o);
        s.is_isomorphic(o).ok().flatten().map(|sigma| Reflection { sigma })
    }

    pub fn point(&self, o: &Origami, p: &SurfacePoint) -> SurfacePoint {
        SurfacePoint { square: self.sigma.apply(p.square), x: Q::one() - &p.x, y: p.y.clone() }.normalized(o)
    }

    pub fn segment(&self, o: &Origami, s: &Segment) -> Result<Segment> {
        let dir = Direction::new(-&s.direction.dx, s.direction.dy.clone())?;
        make_segment(o, &self.point(o, &s.start), &dir, &Extent::Lambda(s.lambda_end.clone()))
    }
}

enum Trial {
    Rejected,
    Done {
        intersects: bool,
        incidence_ok: bool,
        verdict: Option<Verdict>,
        n_h: usize,
        n_v: usize,
        witness: Option<PairWitness>,
    },
}

fn run_trial(o: &Origami, pair: ConePair, k: &Q, seed: u64, trial: usize, refl: Option<&Reflection>) -> Trial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let (ch, cv) = pair.cones();
    let (Some(h), Some(v)) = (random_segment(o, &ch, k, &mut rng), random_segment(o, &cv, k, &mut rng)) else {
        return Trial::Rejected;
    };
    let hit = segments_intersect(o, &h, &v);
    let incidence_ok = hit.as_ref().is_none_or(|p| point_on_segment(o, &h, p) && point_on_segment(o, &v, p));
    // Classification runs on the main-cone representatives.
    let (ch_seg, cv_seg) = match (pair, refl) {
        (ConePair::Main, _) => (Some(h.clone()), Some(v.clone())),
        (ConePair::Reflected, Some(r)) => (r.segment(o, &v).ok(), r.segment(o, &h).ok()),
        (ConePair::Reflected, None) => (None, None),
    };
    let word = |s: &Segment| parse_word(&cutting_sequence(s).letters).ok();
    let verdict = match (&ch_seg, &cv_seg) {
        (Some(hh), Some(vv)) if o.has_labels() => match (word(hh), word(vv)) {
            (Some(wh), Some(wv)) => {
                let mut wh = wh;
                if hh.direction.dx.is_negative() {
                    wh.reverse();
                }
                let slope_h = Q::new(hh.direction.dx.clone(), hh.direction.dy.clone());
                criterion_classify(&wh, &wv, &slope_h).ok()
            }
            _ => None,
        },
        _ => None,
    };
    let n_h = cutting_sequence(&h).len();
    let n_v = cutting_sequence(&v).len();
    let witness = hit.is_none().then(|| PairWitness {
        trial,
        h: SegmentDesc::of(&h),
        v: SegmentDesc::of(&v),
        word_h: cutting_sequence(&h).letters,
        word_v: cutting_sequence(&v).letters,
    });
    Trial::Done { intersects: hit.is_some(), incidence_ok, verdict, n_h, n_v, witness }
}

/// Draws `trials` random pairs `(H, V)` in the cone pair with lengths at least `k`
/// and tests each for intersection; deterministic for a given seed.
pub fn intersection_property_harness(o: &Origami, k: &Q, trials: usize, pair: ConePair, seed: u64) -> HarnessReport {
    let refl = Reflection::new(o);
    let results: Vec<Trial> = (0..trials).into_par_iter().map(|t| run_trial(o, pair, k, seed, t, refl.as_ref())).collect();
    let mut rep = HarnessReport {
        cone_pair: pair,
        min_length: k.to_string(),
        trials,
        seed,
        rejected_draws: 0,
        non_intersecting: 0,
        witnesses: vec![],
        verdicts: BTreeMap::new(),
        too_short: 0,
        classified: 0,
        classified_confirmed: 0,
        unclassified_out_of_range: 0,
        incidence_failures: 0,
        min_letters_h: None,
        min_letters_v: None,
    };
    for r in results {
        match r {
            Trial::Rejected => rep.rejected_draws += 1,
            Trial::Done { intersects, incidence_ok, verdict, n_h, n_v, witness } => {
                if !intersects {
                    rep.non_intersecting += 1;
                    if let Some(w) = witness {
                        if rep.witnesses.len() < 20 {
                            rep.witnesses.push(w);
                        }
                    }
                }
                if !incidence_ok {
                    rep.incidence_failures += 1;
                }
                rep.min_letters_h = Some(rep.min_letters_h.map_or(n_h, |m| m.min(n_h)));
                rep.min_letters_v = Some(rep.min_letters_v.map_or(n_v, |m| m.min(n_v)));
                match verdict {
                    None if o.has_labels() => rep.too_short += 1,
                    None => {}
                    Some(v) => {
                        *rep.verdicts.entry(v.name().to_string()).or_default() += 1;
                        if v.predicts_intersection() {
                            rep.classified += 1;
                            if intersects {
                                rep.classified_confirmed += 1;
                            }
                        } else if let Verdict::Unclassified { slope_in_range: false } = v {
                            rep.unclassified_out_of_range += 1;
                        }
                    }
                }
            }
        }
    }
    rep
}

#[derive(Debug, Clone, Serialize)]
pub struct TileReport {
    pub cone: String,
    pub segments: usize,
    pub draws: usize,
    pub violations: usize,
    pub violation_examples: Vec<SegmentDesc>,
}

/// Random segments in the cone with at least `min_letters` letters; counts
/// those missing a tile.
pub fn tile_property(o: &Origami, cone: &SlopeCone, segments: usize, min_letters: usize, seed: u64) -> TileReport {
    let found: Vec<(usize, Option<(bool, SegmentDesc)>)> = (0..segments)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            for draw in 1..=1000 {
                let len = Q::new(BigInt::from(rng.gen_range(2u32..=17 * 64)), BigInt::from(64));
                let Some(s) = random_segment(o, cone, &len, &mut rng) else { continue };
                if cutting_sequence(&s).len() < min_letters {
                    continue;
                }
                return (draw, Some((tiles_crossed(o, &s).len() == 3, SegmentDesc::of(&s))));
            }
            (1000, None)
        })
        .collect();
    let mut rep = TileReport { cone: cone.to_string(), segments: 0, draws: 0, violations: 0, violation_examples: vec![] };
    for (draws, r) in found {
        rep.draws += draws;
        if let Some((ok, desc)) = r {
            rep.segments += 1;
            if !ok {
                rep.violations += 1;
                if rep.violation_examples.len() < 20 {
                    rep.violation_examples.push(desc);
                }
            }
        }
    }
    rep
}

/// Flat time along a segment in floating point, for reporting.
pub fn as_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
