//! Exact straight-line flow: edge-crossing traces, straight segments,
//! cutting sequences and segment intersection.
//!
//! A direction is an integer vector `(dx, dy)`; the flow line from `p` is
//! `p + λ·(dx, dy)` for a rational parameter `λ`, and flat time is
//! `t = λ·‖(dx, dy)‖`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::origami::{Corner, EdgeId, Origami, Side, SurfacePoint};
use crate::sl2::{IntMatrix2, ProjSlope};

type Q = BigRational;

/// A primitive integer direction vector `(dx, dy)` with slope `dx/dy`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Direction {
    pub dx: BigInt,
    pub dy: BigInt,
}

impl Direction {
    pub fn new(dx: impl Into<BigInt>, dy: impl Into<BigInt>) -> Result<Self> {
        let (dx, dy) = (dx.into(), dy.into());
        if dx.is_zero() && dy.is_zero() {
            return Err(Error::InvalidArgument("zero direction vector".into()));
        }
        let g = dx.gcd(&dy);
        Ok(Direction { dx: dx / &g, dy: dy / &g })
    }

    /// `up` selects `Δy > 0` for finite slopes and `Δx > 0` for the horizontal slope.
    pub fn from_slope(slope: &ProjSlope, up: bool) -> Self {
        let (x, y) = slope.direction();
        let d = Direction::new(x, y).expect("slope direction is nonzero");
        if up { d } else { d.reversed() }
    }

    pub fn from_rational_slope(s: &Q, up: bool) -> Self {
        Direction::from_slope(&ProjSlope::Finite(s.clone()), up)
    }

    pub fn reversed(&self) -> Self {
        Direction { dx: -&self.dx, dy: -&self.dy }
    }

    pub fn slope(&self) -> ProjSlope {
        ProjSlope::from_ratio(self.dx.clone(), self.dy.clone())
    }

    pub fn norm_sq(&self) -> BigInt {
        &self.dx * &self.dx + &self.dy * &self.dy
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().to_f64().expect("finite").sqrt()
    }

    pub fn transformed(&self, m: &IntMatrix2) -> Direction {
        let (x, y) = m.apply_vector(&self.dx, &self.dy);
        Direction::new(x, y).expect("unimodular image of a nonzero vector")
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.dx, self.dy)
    }
}

/// What the flow line meets at an event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Crossing {
    /// Crossing the interior of an edge; `pos` is the coordinate along the edge.
    Edge { side: Side, edge: EdgeId, pos: Q },
    /// Passing through (regular) or stopping at (cone) a square vertex.
    Vertex { vertex: usize, cone: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub k: usize,
    pub lambda: Q,
    /// The square being left.
    pub square: usize,
    pub crossing: Crossing,
    pub label: Option<String>,
}

impl Event {
    pub fn time(&self, dir: &Direction) -> f64 {
        self.lambda.to_f64().expect("finite") * dir.norm()
    }

    pub fn edge(&self) -> Option<EdgeId> {
        match self.crossing {
            Crossing::Edge { edge, .. } => Some(edge),
            Crossing::Vertex { .. } => None,
        }
    }

    pub fn side_name(&self) -> &'static str {
        match &self.crossing {
            Crossing::Edge { side: Side::Top, .. } => "top",
            Crossing::Edge { side: Side::Bottom, .. } => "bottom",
            Crossing::Edge { side: Side::Left, .. } => "left",
            Crossing::Edge { side: Side::Right, .. } => "right",
            Crossing::Vertex { .. } => "corner",
        }
    }
}

/// The part of a flow line inside one closed square, in local coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub square: usize,
    pub lam0: Q,
    pub lam1: Q,
    pub from: (Q, Q),
    pub to: (Q, Q),
}

impl Piece {
    pub fn is_point(&self) -> bool {
        self.from == self.to
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdvanceKind {
    Limit,
    Edge(Event),
    Vertex(Event),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Advance {
    pub piece: Piece,
    pub kind: AdvanceKind,
}

fn sgn(x: &BigInt) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Square in the given quadrant around the vertex at `corner` of `j`, for a regular vertex.
fn quadrant_square(o: &Origami, j: usize, corner: Corner, east: bool, north: bool) -> usize {
    let sw = match corner {
        Corner::TopRight => j,
        Corner::TopLeft => o.h_inv().apply(j),
        Corner::BottomRight => o.v_inv().apply(j),
        Corner::BottomLeft => o.h_inv().apply(o.v_inv().apply(j)),
    };
    match (east, north) {
        (false, false) => sw,
        (true, false) => o.h().apply(sw),
        (false, true) => o.v().apply(sw),
        (true, true) => o.v().apply(o.h().apply(sw)),
    }
}

/// Step-by-step exact walker along a flow line.
///
/// The current point is kept in a closed square into which the direction
/// points; lines running along an edge are kept on the left or bottom side
/// of the square.
pub struct Tracer<'a> {
    o: &'a Origami,
    dir: Direction,
    sx: i8,
    sy: i8,
    j: usize,
    x: Q,
    y: Q,
    lam: Q,
    k: usize,
    dead: Option<usize>,
    initial: Option<Event>,
}

impl<'a> Tracer<'a> {
    /// A start at a cone vertex is accepted only when the direction points
    /// into the given square, which then selects the outgoing sector.
    pub fn new(o: &'a Origami, start: &SurfacePoint, dir: &Direction) -> Result<Self> {
        if start.square >= o.n() {
            return Err(Error::InvalidArgument(format!("square {} out of range", start.square)));
        }
        let (sx, sy) = (sgn(&dir.dx), sgn(&dir.dy));
        let (zero, one) = (Q::zero(), Q::one());
        let (mut j, mut x, mut y) = (start.square, start.x.clone(), start.y.clone());
        let on_x = x == zero || x == one;
        let on_y = y == zero || y == one;
        let mut vertex = None;
        if on_x && on_y {
            let corner = match (x == one, y == one) {
                (false, false) => Corner::BottomLeft,
                (true, false) => Corner::BottomRight,
                (false, true) => Corner::TopLeft,
                (true, true) => Corner::TopRight,
            };
            let vtx = o.vertex_at(j, corner);
            vertex = Some(vtx);
            let inward = (if x == one { sx < 0 } else { sx >= 0 }) && (if y == one { sy < 0 } else { sy >= 0 });
            if o.is_cone_vertex(vtx) {
                if !inward {
                    return Err(Error::PreconditionViolated(format!(
                        "start is cone vertex {vtx}; direction must point into the given square"
                    )));
                }
            } else {
                j = quadrant_square(o, j, corner, sx >= 0, sy >= 0);
                x = if sx >= 0 { zero.clone() } else { one.clone() };
                y = if sy >= 0 { zero.clone() } else { one.clone() };
            }
        } else {
            if x == one && sx >= 0 {
                j = o.h().apply(j);
                x = zero.clone();
            } else if x == zero && sx < 0 {
                j = o.h_inv().apply(j);
                x = one.clone();
            }
            if y == one && sy >= 0 {
                j = o.v().apply(j);
                y = zero.clone();
            } else if y == zero && sy < 0 {
                j = o.v_inv().apply(j);
                y = one.clone();
            }
        }
        let initial = if let Some(vtx) = vertex {
            Some(Event {
                k: 0,
                lambda: zero.clone(),
                square: start.square,
                crossing: Crossing::Vertex { vertex: vtx, cone: o.is_cone_vertex(vtx) },
                label: None,
            })
        } else if sx != 0 && ((sx > 0 && x == zero) || (sx < 0 && x == one)) {
            let (prev, side, edge) = if sx > 0 {
                let p = o.h_inv().apply(j);
                (p, Side::Right, EdgeId::Vertical(p))
            } else {
                (o.h().apply(j), Side::Left, EdgeId::Vertical(j))
            };
            Some(Event {
                k: 0,
                lambda: zero.clone(),
                square: prev,
                crossing: Crossing::Edge { side, edge, pos: y.clone() },
                label: o.edge_label(edge).map(str::to_string),
            })
        } else if sy != 0 && ((sy > 0 && y == zero) || (sy < 0 && y == one)) {
            let (prev, side, edge) = if sy > 0 {
                let p = o.v_inv().apply(j);
                (p, Side::Top, EdgeId::Horizontal(p))
            } else {
                (o.v().apply(j), Side::Bottom, EdgeId::Horizontal(j))
            };
            Some(Event {
                k: 0,
                lambda: zero.clone(),
                square: prev,
                crossing: Crossing::Edge { side, edge, pos: x.clone() },
                label: o.edge_label(edge).map(str::to_string),
            })
        } else {
            None
        };
        let k = usize::from(initial.is_some());
        Ok(Tracer { o, dir: dir.clone(), sx, sy, j, x, y, lam: zero, k, dead: None, initial })
    }

    /// Event at parameter 0 when the start lies on an edge or a vertex.
    pub fn initial_event(&self) -> Option<&Event> {
        self.initial.as_ref()
    }

    pub fn lambda(&self) -> &Q {
        &self.lam
    }

    pub fn position(&self) -> SurfacePoint {
        SurfacePoint { square: self.j, x: self.x.clone(), y: self.y.clone() }.normalized(self.o)
    }

    /// Local position `(square, x, y)` in the square the walker currently occupies.
    pub fn local(&self) -> (usize, &Q, &Q) {
        (self.j, &self.x, &self.y)
    }

    pub fn stopped_at_cone(&self) -> Option<usize> {
        self.dead
    }

    /// Moves to the next edge or vertex, or to parameter `limit` if that comes first.
    /// Reaching an edge exactly at `limit` counts as reaching the edge.
    pub fn advance(&mut self, limit: Option<&Q>) -> Result<Advance> {
        if let Some(vertex) = self.dead {
            return Err(Error::HitsConeVertex { vertex, at: self.lam.to_string() });
        }
        let (zero, one) = (Q::zero(), Q::one());
        let dxq = Q::from_integer(self.dir.dx.clone());
        let dyq = Q::from_integer(self.dir.dy.clone());
        let tx = match self.sx {
            1 => Some((&one - &self.x) / &dxq),
            -1 => Some(&self.x / -&dxq),
            _ => None,
        };
        let ty = match self.sy {
            1 => Some((&one - &self.y) / &dyq),
            -1 => Some(&self.y / -&dyq),
            _ => None,
        };
        let t_edge = match (&tx, &ty) {
            (Some(a), Some(b)) => a.min(b).clone(),
            (Some(a), None) => a.clone(),
            (None, Some(b)) => b.clone(),
            (None, None) => unreachable!("direction is nonzero"),
        };
        let (t, at_limit) = match limit {
            Some(l) => {
                let rem = l - &self.lam;
                if rem < t_edge { (rem, true) } else { (t_edge, false) }
            }
            None => (t_edge, false),
        };
        let x1 = &self.x + &t * &dxq;
        let y1 = &self.y + &t * &dyq;
        let lam1 = &self.lam + &t;
        let piece = Piece {
            square: self.j,
            lam0: self.lam.clone(),
            lam1: lam1.clone(),
            from: (self.x.clone(), self.y.clone()),
            to: (x1.clone(), y1.clone()),
        };
        self.lam = lam1.clone();
        if at_limit {
            self.x = x1;
            self.y = y1;
            return Ok(Advance { piece, kind: AdvanceKind::Limit });
        }
        let hitx = tx.as_ref() == Some(&t);
        let hity = ty.as_ref() == Some(&t);
        let x_edge = x1 == zero || x1 == one;
        let y_edge = y1 == zero || y1 == one;
        let k = self.k;
        self.k += 1;
        let o = self.o;
        if (hitx && hity) || (hity && x_edge) || (hitx && y_edge) {
            let corner = match (x1 == one, y1 == one) {
                (false, false) => Corner::BottomLeft,
                (true, false) => Corner::BottomRight,
                (false, true) => Corner::TopLeft,
                (true, true) => Corner::TopRight,
            };
            let vertex = o.vertex_at(self.j, corner);
            let cone = o.is_cone_vertex(vertex);
            let ev = Event { k, lambda: lam1, square: self.j, crossing: Crossing::Vertex { vertex, cone }, label: None };
            if cone {
                self.dead = Some(vertex);
                self.x = x1;
                self.y = y1;
            } else {
                let (east, north) = (self.sx >= 0, self.sy >= 0);
                self.j = quadrant_square(o, self.j, corner, east, north);
                self.x = if east { zero } else { one.clone() };
                self.y = if north { Q::zero() } else { one };
            }
            return Ok(Advance { piece, kind: AdvanceKind::Vertex(ev) });
        }
        let from = self.j;
        let (side, edge, pos) = if hitx {
            if self.sx > 0 {
                self.j = o.h().apply(from);
                self.x = zero;
                (Side::Right, EdgeId::Vertical(from), y1.clone())
            } else {
                self.j = o.h_inv().apply(from);
                self.x = one;
                (Side::Left, EdgeId::Vertical(self.j), y1.clone())
            }
        } else if self.sy > 0 {
            self.j = o.v().apply(from);
            self.y = zero;
            (Side::Top, EdgeId::Horizontal(from), x1.clone())
        } else {
            self.j = o.v_inv().apply(from);
            self.y = one;
            (Side::Bottom, EdgeId::Horizontal(self.j), x1.clone())
        };
        if hitx {
            self.y = y1;
        } else {
            self.x = x1;
        }
        let ev = Event {
            k,
            lambda: lam1,
            square: from,
            crossing: Crossing::Edge { side, edge, pos },
            label: o.edge_label(edge).map(str::to_string),
        };
        Ok(Advance { piece, kind: AdvanceKind::Edge(ev) })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stop {
    /// Stop after this many events.
    Crossings(usize),
    /// Stop at this flow parameter (inclusive).
    Lambda(Q),
    /// Stop at this flat time (inclusive).
    Time(Q),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StopReason {
    Reached,
    ConeVertex { vertex: usize, lambda: Q },
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub direction: Direction,
    pub events: Vec<Event>,
    pub stop: StopReason,
}

impl Trace {
    /// Turns a trace that ended on a cone vertex into an error.
    pub fn complete(self) -> Result<Trace> {
        match &self.stop {
            StopReason::Reached => Ok(self),
            StopReason::ConeVertex { vertex, lambda } => {
                Err(Error::HitsConeVertex { vertex: *vertex, at: lambda.to_string() })
            }
        }
    }
}

fn within_time(lam: &Q, norm_sq: &BigInt, t: &Q) -> bool {
    lam * lam * Q::from_integer(norm_sq.clone()) <= t * t
}

/// Edge and vertex events of the flow line from `start`, in order.
///
/// A trace that reaches a cone vertex ends there with `StopReason::ConeVertex`.
pub fn flow_trace(o: &Origami, dir: &Direction, start: &SurfacePoint, stop: &Stop) -> Result<Trace> {
    let mut tr = Tracer::new(o, start, dir)?;
    let norm_sq = dir.norm_sq();
    let mut events = Vec::new();
    let accept = |ev: &Event, count: usize| match stop {
        Stop::Crossings(n) => count < *n,
        Stop::Lambda(l) => ev.lambda <= *l,
        Stop::Time(t) => within_time(&ev.lambda, &norm_sq, t),
    };
    if let Some(ev) = tr.initial_event() {
        if accept(ev, 0) {
            events.push(ev.clone());
        }
    }
    let mut stop_reason = StopReason::Reached;
    let limit = match stop {
        Stop::Lambda(l) => Some(l.clone()),
        _ => None,
    };
    loop {
        if let Stop::Crossings(n) = stop {
            if events.len() >= *n {
                break;
            }
        }
        if let Some(l) = &limit {
            if tr.lambda() >= l {
                break;
            }
        }
        let adv = tr.advance(limit.as_ref())?;
        match adv.kind {
            AdvanceKind::Limit => break,
            AdvanceKind::Edge(ev) | AdvanceKind::Vertex(ev) => {
                if !accept(&ev, events.len()) {
                    break;
                }
                let cone = matches!(ev.crossing, Crossing::Vertex { cone: true, .. });
                let lambda = ev.lambda.clone();
                events.push(ev);
                if let Some(vertex) = tr.stopped_at_cone() {
                    debug_assert!(cone);
                    stop_reason = StopReason::ConeVertex { vertex, lambda };
                    break;
                }
            }
        }
    }
    for (k, ev) in events.iter_mut().enumerate() {
        ev.k = k;
    }
    Ok(Trace { direction: dir.clone(), events, stop: stop_reason })
}

/// How far a segment extends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extent {
    /// Flow parameter `λ`; the segment is `p + [0, λ]·(dx, dy)`.
    Lambda(Q),
    /// Exact Euclidean length; requires `‖(dx, dy)‖` to be rational.
    Length(Q),
    /// Euclidean length at least this, rounded up to a parameter with denominator 1024.
    MinLength(Q),
}

/// Smallest `m ≥ 0` with `m² ≥ x`.
fn ceil_sqrt(x: &BigInt) -> BigInt {
    if !x.is_positive() {
        return BigInt::zero();
    }
    let r = x.sqrt();
    if &(&r * &r) < x { r + 1 } else { r }
}

fn extent_lambda(dir: &Direction, extent: &Extent) -> Result<Q> {
    let n2 = dir.norm_sq();
    let lam = match extent {
        Extent::Lambda(l) => l.clone(),
        Extent::Length(len) => {
            let r = n2.sqrt();
            if &r * &r != n2 {
                return Err(Error::InvalidArgument(format!(
                    "length of direction {dir} is irrational; use a minimum length"
                )));
            }
            len / Q::from_integer(r)
        }
        Extent::MinLength(len) => {
            let den = BigInt::from(1024);
            let scaled = len * Q::from_integer(den.clone());
            // m² · n2 ≥ (1024·len)²
            let target = (&scaled * &scaled / Q::from_integer(n2)).ceil().to_integer();
            Q::new(ceil_sqrt(&target), den)
        }
    };
    if lam.is_negative() {
        return Err(Error::InvalidArgument(format!("negative extent {lam}")));
    }
    Ok(lam)
}

/// A closed straight segment `p + [0, λ_end]·(dx, dy)` avoiding cone vertices in its interior.
#[derive(Debug, Clone)]
pub struct Segment {
    pub start: SurfacePoint,
    pub end: SurfacePoint,
    pub direction: Direction,
    pub lambda_end: Q,
    /// Non-degenerate pieces in parameter order.
    pub pieces: Vec<Piece>,
    /// Edge and vertex events with `0 ≤ λ ≤ λ_end`.
    pub events: Vec<Event>,
    /// Endpoints on edges, repeated in every adjacent square.
    pub endpoint_contacts: Vec<Piece>,
}

impl Segment {
    /// Squared Euclidean length.
    pub fn length_sq(&self) -> Q {
        &self.lambda_end * &self.lambda_end * Q::from_integer(self.direction.norm_sq())
    }

    pub fn length(&self) -> f64 {
        self.lambda_end.to_f64().expect("finite") * self.direction.norm()
    }

    pub fn vertices(&self) -> BTreeSet<usize> {
        self.events
            .iter()
            .filter_map(|e| match e.crossing {
                Crossing::Vertex { vertex, .. } => Some(vertex),
                _ => None,
            })
            .collect()
    }

    pub fn reversed(&self, o: &Origami) -> Result<Segment> {
        make_segment(o, &self.end, &self.direction.reversed(), &Extent::Lambda(self.lambda_end.clone()))
    }

    /// Squares met by non-degenerate pieces, in order, without repetition of consecutive entries.
    pub fn squares(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for p in &self.pieces {
            if out.last() != Some(&p.square) {
                out.push(p.square);
            }
        }
        out
    }
}

/// Representations `(square, x, y)` of a non-vertex point in every closed square containing it.
fn edge_point_reps(o: &Origami, j: usize, x: &Q, y: &Q) -> Vec<(usize, Q, Q)> {
    let (zero, one) = (Q::zero(), Q::one());
    let mut reps = vec![(j, x.clone(), y.clone())];
    if *x == zero {
        reps.push((o.h_inv().apply(j), one.clone(), y.clone()));
    } else if *x == one {
        reps.push((o.h().apply(j), zero.clone(), y.clone()));
    } else if *y == zero {
        reps.push((o.v_inv().apply(j), x.clone(), one.clone()));
    } else if *y == one {
        reps.push((o.v().apply(j), x.clone(), zero.clone()));
    }
    reps
}

fn is_vertex_point(x: &Q, y: &Q) -> bool {
    (x.is_zero() || x.is_one()) && (y.is_zero() || y.is_one())
}

pub fn make_segment(o: &Origami, start: &SurfacePoint, dir: &Direction, extent: &Extent) -> Result<Segment> {
    let lambda_end = extent_lambda(dir, extent)?;
    let mut tr = Tracer::new(o, start, dir)?;
    let mut events: Vec<Event> = tr.initial_event().cloned().into_iter().collect();
    let mut pieces = Vec::new();
    let (first_j, fx, fy) = {
        let (j, x, y) = tr.local();
        (j, x.clone(), y.clone())
    };
    while tr.lambda() < &lambda_end {
        let adv = tr.advance(Some(&lambda_end))?;
        if adv.piece.lam1 > adv.piece.lam0 {
            pieces.push(adv.piece);
        }
        match adv.kind {
            AdvanceKind::Limit => break,
            AdvanceKind::Edge(ev) => events.push(ev),
            AdvanceKind::Vertex(ev) => {
                let at_end = ev.lambda == lambda_end;
                if let Crossing::Vertex { vertex, cone: true } = ev.crossing {
                    if !at_end {
                        return Err(Error::ConeVertexInInterior(vertex));
                    }
                }
                events.push(ev);
            }
        }
    }
    for (k, ev) in events.iter_mut().enumerate() {
        ev.k = k;
    }
    let mut endpoint_contacts = Vec::new();
    let (lj, lx, ly) = {
        let (j, x, y) = tr.local();
        (j, x.clone(), y.clone())
    };
    for (j, x, y, lam) in [(first_j, fx, fy, Q::zero()), (lj, lx.clone(), ly.clone(), lambda_end.clone())] {
        if is_vertex_point(&x, &y) {
            continue;
        }
        for (s, px, py) in edge_point_reps(o, j, &x, &y) {
            endpoint_contacts.push(Piece {
                square: s,
                lam0: lam.clone(),
                lam1: lam.clone(),
                from: (px.clone(), py.clone()),
                to: (px, py),
            });
        }
    }
    let end = if tr.stopped_at_cone().is_some() {
        SurfacePoint { square: lj, x: lx, y: ly }.normalized(o)
    } else {
        tr.position()
    };
    Ok(Segment {
        start: start.clone().normalized(o),
        end,
        direction: dir.clone(),
        lambda_end,
        pieces,
        events,
        endpoint_contacts,
    })
}

/// Word of labeled edges crossed by a segment, with crossing parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuttingSequence {
    pub letters: Vec<String>,
    pub edges: Vec<EdgeId>,
    pub lambdas: Vec<Q>,
}

impl CuttingSequence {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

pub fn cutting_sequence(s: &Segment) -> CuttingSequence {
    let mut cs = CuttingSequence { letters: vec![], edges: vec![], lambdas: vec![] };
    for ev in &s.events {
        if let (Some(label), Crossing::Edge { edge, .. }) = (&ev.label, &ev.crossing) {
            cs.letters.push(label.clone());
            cs.edges.push(*edge);
            cs.lambdas.push(ev.lambda.clone());
        }
    }
    cs
}

fn cross(a: &(Q, Q), b: &(Q, Q)) -> Q {
    &a.0 * &b.1 - &a.1 * &b.0
}

fn sub(a: &(Q, Q), b: &(Q, Q)) -> (Q, Q) {
    (&a.0 - &b.0, &a.1 - &b.1)
}

fn dot(a: &(Q, Q), b: &(Q, Q)) -> Q {
    &a.0 * &b.0 + &a.1 * &b.1
}

/// A common point of two closed planar segments, if any.
pub fn planar_intersection(a0: &(Q, Q), a1: &(Q, Q), b0: &(Q, Q), b1: &(Q, Q)) -> Option<(Q, Q)> {
    let d1 = sub(a1, a0);
    let d2 = sub(b1, b0);
    let zero = Q::zero();
    let one = Q::one();
    let point = |d: &(Q, Q)| d.0.is_zero() && d.1.is_zero();
    let on_segment = |p: &(Q, Q), s0: &(Q, Q), s1: &(Q, Q)| {
        let d = sub(s1, s0);
        let w = sub(p, s0);
        if !cross(&d, &w).is_zero() {
            return false;
        }
        let t = dot(&w, &d);
        t >= Q::zero() && t <= dot(&d, &d)
    };
    if point(&d1) {
        return if (point(&d2) && a0 == b0) || (!point(&d2) && on_segment(a0, b0, b1)) { Some(a0.clone()) } else { None };
    }
    if point(&d2) {
        return if on_segment(b0, a0, a1) { Some(b0.clone()) } else { None };
    }
    let w = sub(b0, a0);
    let den = cross(&d1, &d2);
    if den.is_zero() {
        if !cross(&w, &d1).is_zero() {
            return None;
        }
        // Collinear: overlap of parameter intervals along d1.
        let dd = dot(&d1, &d1);
        let tb0 = dot(&w, &d1) / &dd;
        let tb1 = dot(&sub(b1, a0), &d1) / &dd;
        let lo = tb0.clone().min(tb1.clone()).max(zero.clone());
        let hi = tb0.max(tb1).min(one);
        if lo > hi {
            return None;
        }
        return Some((&a0.0 + &lo * &d1.0, &a0.1 + &lo * &d1.1));
    }
    let t = cross(&w, &d2) / &den;
    let u = cross(&w, &d1) / &den;
    if t < zero || t > one || u < zero || u > one {
        return None;
    }
    Some((&a0.0 + &t * &d1.0, &a0.1 + &t * &d1.1))
}

/// Canonical point for a vertex: the bottom-left corner of the smallest square having it there.
pub fn vertex_point(o: &Origami, vertex: usize) -> SurfacePoint {
    let s = (0..o.n())
        .find(|&s| o.vertex_at(s, Corner::BottomLeft) == vertex)
        .expect("every vertex is a bottom-left corner");
    SurfacePoint { square: s, x: Q::zero(), y: Q::zero() }
}

fn canonical_point(o: &Origami, j: usize, x: Q, y: Q) -> SurfacePoint {
    if is_vertex_point(&x, &y) {
        let corner = match (x.is_one(), y.is_one()) {
            (false, false) => Corner::BottomLeft,
            (true, false) => Corner::BottomRight,
            (false, true) => Corner::TopLeft,
            (true, true) => Corner::TopRight,
        };
        return vertex_point(o, o.vertex_at(j, corner));
    }
    SurfacePoint { square: j, x, y }.normalized(o)
}

/// A common point of two closed segments, in canonical form.
pub fn segments_intersect(o: &Origami, s1: &Segment, s2: &Segment) -> Option<SurfacePoint> {
    let v2 = s2.vertices();
    if let Some(&v) = s1.vertices().iter().find(|v| v2.contains(v)) {
        return Some(vertex_point(o, v));
    }
    let mut by_square: HashMap<usize, Vec<&Piece>> = HashMap::new();
    for p in s2.pieces.iter().chain(&s2.endpoint_contacts) {
        by_square.entry(p.square).or_default().push(p);
    }
    for a in s1.pieces.iter().chain(&s1.endpoint_contacts) {
        let Some(bs) = by_square.get(&a.square) else { continue };
        for b in bs {
            if let Some((x, y)) = planar_intersection(&a.from, &a.to, &b.from, &b.to) {
                return Some(canonical_point(o, a.square, x, y));
            }
        }
    }
    None
}

/// Whether a canonical point lies on the closed segment.
pub fn point_on_segment(o: &Origami, seg: &Segment, p: &SurfacePoint) -> bool {
    if is_vertex_point(&p.x, &p.y) {
        let corner = match (p.x.is_one(), p.y.is_one()) {
            (false, false) => Corner::BottomLeft,
            (true, false) => Corner::BottomRight,
            (false, true) => Corner::TopLeft,
            (true, true) => Corner::TopRight,
        };
        return seg.vertices().contains(&o.vertex_at(p.square, corner));
    }
    let reps = edge_point_reps(o, p.square, &p.x, &p.y);
    seg.pieces.iter().chain(&seg.endpoint_contacts).any(|piece| {
        reps.iter().any(|(s, x, y)| {
            let q = (x.clone(), y.clone());
            *s == piece.square && planar_intersection(&piece.from, &piece.to, &q, &q).is_some()
        })
    })
}

/// Squares having a corner at the vertex.
pub fn squares_at_vertex(o: &Origami, vertex: usize) -> Vec<usize> {
    (0..o.n())
        .filter(|&j| {
            [Corner::BottomLeft, Corner::BottomRight, Corner::TopLeft, Corner::TopRight]
                .iter()
                .any(|&c| o.vertex_at(j, c) == vertex)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::origami::{builtin_ornithorynque, ornithorynque_square};

    fn q(p: i64, d: i64) -> Q {
        Q::new(p.into(), d.into())
    }

    fn pt(o: &Origami, j: usize, x: (i64, i64), y: (i64, i64)) -> SurfacePoint {
        SurfacePoint::from_ints(o, j, x, y).unwrap()
    }

    #[test]
    fn torus_half_slope_pattern() {
        let t = Origami::torus();
        let dir = Direction::from_rational_slope(&q(1, 2), true);
        let tr = flow_trace(&t, &dir, &pt(&t, 0, (1, 1000), (1, 100)), &Stop::Crossings(9)).unwrap();
        let sides: Vec<_> = tr.events.iter().map(|e| e.side_name()).collect();
        assert_eq!(sides, ["top", "top", "right", "top", "top", "right", "top", "top", "right"]);
    }

    #[test]
    fn ornithorynque_vertical_period() {
        let o = builtin_ornithorynque();
        let a0 = ornithorynque_square(0, 1, 0);
        let start = pt(&o, o.v().apply(a0), (1, 2), (0, 1));
        let dir = Direction::new(0, 1).unwrap();
        let tr = flow_trace(&o, &dir, &start, &Stop::Time(q(6, 1))).unwrap();
        let labels: Vec<_> = tr.events.iter().filter_map(|e| e.label.clone()).collect();
        assert_eq!(labels, ["A0", "A1", "A2", "A0"]);
        let seg = make_segment(&o, &start, &dir, &Extent::Length(q(6, 1))).unwrap();
        assert_eq!(seg.end, start);
    }

    #[test]
    fn zero_time_is_empty() {
        let o = builtin_ornithorynque();
        let tr = flow_trace(&o, &Direction::new(2, 3).unwrap(), &pt(&o, 3, (1, 3), (1, 3)), &Stop::Time(q(0, 1))).unwrap();
        assert!(tr.events.is_empty());
    }

    #[test]
    fn slope_third_piece_count() {
        let o = builtin_ornithorynque();
        let dir = Direction::from_rational_slope(&q(1, 3), true);
        let seg = make_segment(&o, &pt(&o, 0, (1, 2), (0, 1)), &dir, &Extent::Lambda(q(2, 1))).unwrap();
        assert_eq!(seg.pieces.len(), 8);
        let total: Q = seg.pieces.iter().map(|p| &p.lam1 - &p.lam0).sum();
        assert_eq!(total, seg.lambda_end);
    }

    #[test]
    fn single_piece_to_first_edge() {
        let o = builtin_ornithorynque();
        let seg = make_segment(&o, &pt(&o, 5, (1, 4), (1, 4)), &Direction::new(0, 1).unwrap(), &Extent::Length(q(3, 4)))
            .unwrap();
        assert_eq!(seg.pieces.len(), 1);
    }

    #[test]
    fn cone_in_interior_rejected() {
        let o = builtin_ornithorynque();
        let j = (0..o.n()).find(|&j| o.is_cone_vertex(o.vertex_at(j, Corner::TopRight))).unwrap();
        let dir = Direction::new(1, 1).unwrap();
        let start = pt(&o, j, (1, 2), (1, 2));
        let err = make_segment(&o, &start, &dir, &Extent::Lambda(q(1, 1))).unwrap_err();
        assert!(matches!(err, Error::ConeVertexInInterior(_)));
        // ending exactly at the cone is allowed
        assert!(make_segment(&o, &start, &dir, &Extent::Lambda(q(1, 2))).is_ok());
        let tr = flow_trace(&o, &dir, &start, &Stop::Crossings(5)).unwrap();
        assert!(matches!(tr.stop, StopReason::ConeVertex { .. }));
        assert!(tr.complete().is_err());
    }

    #[test]
    fn diagonals_cross_at_center() {
        let o = builtin_ornithorynque();
        let s1 = make_segment(&o, &pt(&o, 4, (1, 10), (1, 10)), &Direction::new(1, 1).unwrap(), &Extent::Lambda(q(4, 5)))
            .unwrap();
        let s2 = make_segment(&o, &pt(&o, 4, (9, 10), (1, 10)), &Direction::new(-1, 1).unwrap(), &Extent::Lambda(q(4, 5)))
            .unwrap();
        assert_eq!(segments_intersect(&o, &s1, &s2), Some(pt(&o, 4, (1, 2), (1, 2))));
        assert!(segments_intersect(&o, &s1, &s1).is_some());
    }

    #[test]
    fn planar_cases() {
        let p = |a: i64, b: i64| (q(a, 1), q(b, 1));
        assert_eq!(planar_intersection(&p(0, 0), &p(2, 2), &p(0, 2), &p(2, 0)), Some(p(1, 1)));
        assert_eq!(planar_intersection(&p(0, 0), &p(1, 1), &p(2, 2), &p(3, 3)), None);
        assert_eq!(planar_intersection(&p(0, 0), &p(2, 2), &p(1, 1), &p(3, 3)), Some(p(1, 1)));
        assert_eq!(planar_intersection(&p(0, 0), &p(1, 0), &p(1, 0), &p(1, 5)), Some(p(1, 0)));
        assert_eq!(planar_intersection(&p(0, 0), &p(0, 0), &p(0, 0), &p(0, 0)), Some(p(0, 0)));
    }

    #[test]
    fn min_length_rounding() {
        let d = Direction::new(1, 2).unwrap();
        let lam = extent_lambda(&d, &Extent::MinLength(q(17, 1))).unwrap();
        let len_sq = &lam * &lam * q(5, 1);
        assert!(len_sq >= q(289, 1));
        let smaller = &lam - q(1, 1024);
        assert!(&smaller * &smaller * q(5, 1) < q(289, 1));
    }
}
