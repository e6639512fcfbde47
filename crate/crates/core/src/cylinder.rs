//! Cylinder decompositions in rational slopes.
//!
//! A decomposition of `X` in slope `A·0` (or `A·∞`) is read off the vertical
//! (or horizontal) decomposition of `Y = A⁻¹·X` and carried to `X` by the
//! affine chart `ψ: Y → X` with linear part `A`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{make_segment, Direction, Extent, Segment};
use crate::origami::{Corner, Origami, SurfacePoint};
use crate::sl2::{act_word, decompose, projective_slope, psi_word, Generator, GeneratorWord, IntMatrix2, ProjSlope};
use crate::verify::random_point;

type Q = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Base {
    Vertical,
    Horizontal,
}

impl std::str::FromStr for Base {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vertical" => Ok(Base::Vertical),
            "horizontal" => Ok(Base::Horizontal),
            _ => Err(Error::Parse(format!("unknown base {s:?}"))),
        }
    }
}

/// One cylinder of the base decomposition of `Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cylinder {
    /// Squares of `Y`, sorted.
    pub squares: Vec<usize>,
    /// Strips from the first boundary line to the second, each a cycle of squares.
    pub strips: Vec<Vec<usize>>,
    /// Period in units of the base direction.
    pub length: usize,
    /// Number of unit strips.
    pub width: usize,
}

/// Cylinder decomposition of `X` in the slope of `A·(0,1)` or `A·(1,0)`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub base: Base,
    pub matrix: IntMatrix2,
    pub slope: ProjSlope,
    /// Primitive direction `(p, q)` of the closed geodesics on `X`.
    pub direction: (BigInt, BigInt),
    pub cylinders: Vec<Cylinder>,
    /// The surface `X`.
    pub surface: Origami,
    /// `Y = A⁻¹·X`.
    pub origami: Origami,
    pullback: GeneratorWord,
    strip_of: Vec<usize>,
    cylinder_of_strip: Vec<usize>,
    strip_offset: Vec<usize>,
    boundary_after: Vec<bool>,
}

fn strip_cycles(step: &[usize]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let n = step.len();
    let mut strip_of = vec![usize::MAX; n];
    let mut strips = Vec::new();
    for start in 0..n {
        if strip_of[start] != usize::MAX {
            continue;
        }
        let mut cycle = vec![];
        let mut j = start;
        while strip_of[j] == usize::MAX {
            strip_of[j] = strips.len();
            cycle.push(j);
            j = step[j];
        }
        strips.push(cycle);
    }
    (strips, strip_of)
}

struct BaseData {
    cylinders: Vec<Cylinder>,
    strip_of: Vec<usize>,
    cylinder_of_strip: Vec<usize>,
    strip_offset: Vec<usize>,
    boundary_after: Vec<bool>,
}

fn base_decomposition(y: &Origami, base: Base) -> BaseData {
    let n = y.n();
    let (step, across, after, before) = match base {
        Base::Vertical => (y.v(), y.h(), Corner::TopRight, Corner::TopLeft),
        Base::Horizontal => (y.h(), y.v(), Corner::TopRight, Corner::BottomRight),
    };
    let step: Vec<usize> = (0..n).map(|j| step.apply(j)).collect();
    let (strips, strip_of) = strip_cycles(&step);
    let conical = |c: &[usize], corner: Corner| c.iter().any(|&j| y.is_cone_vertex(y.vertex_at(j, corner)));
    let mut boundary_after: Vec<bool> = strips.iter().map(|c| conical(c, after)).collect();
    let boundary_before: Vec<bool> = strips.iter().map(|c| conical(c, before)).collect();
    let next = |s: usize| strip_of[across.apply(strips[s][0])];
    // Chains of strips separated by cone-free lines; a closed chain gets one artificial boundary.
    let mut seen = vec![false; strips.len()];
    let mut chains: Vec<Vec<usize>> = vec![];
    let starts: Vec<usize> = (0..strips.len()).filter(|&s| boundary_before[s]).collect();
    for s in starts {
        let mut chain = vec![s];
        seen[s] = true;
        let mut c = s;
        while !boundary_after[c] {
            c = next(c);
            seen[c] = true;
            chain.push(c);
        }
        chains.push(chain);
    }
    for s in 0..strips.len() {
        if seen[s] {
            continue;
        }
        let mut chain = vec![s];
        seen[s] = true;
        let mut c = next(s);
        while c != s {
            seen[c] = true;
            chain.push(c);
            c = next(c);
        }
        boundary_after[*chain.last().expect("non-empty")] = true;
        chains.push(chain);
    }
    chains.sort_by_key(|ch| ch.iter().flat_map(|&s| strips[s].iter().copied()).min());
    let mut cylinder_of_strip = vec![0; strips.len()];
    let mut strip_offset = vec![0; strips.len()];
    let cylinders = chains
        .iter()
        .enumerate()
        .map(|(i, ch)| {
            for (k, &s) in ch.iter().enumerate() {
                cylinder_of_strip[s] = i;
                strip_offset[s] = k;
            }
            let mut squares: Vec<usize> = ch.iter().flat_map(|&s| strips[s].iter().copied()).collect();
            squares.sort_unstable();
            let mut cyl_strips: Vec<Vec<usize>> = vec![];
            for &s in ch {
                let first = *strips[s].iter().min().expect("non-empty");
                let k = strips[s].iter().position(|&j| j == first).expect("present");
                let mut c = strips[s].clone();
                c.rotate_left(k);
                cyl_strips.push(c);
            }
            Cylinder { squares, length: strips[ch[0]].len(), width: ch.len(), strips: cyl_strips }
        })
        .collect();
    BaseData { cylinders, strip_of, cylinder_of_strip, strip_offset, boundary_after }
}

/// Vertical cylinders: strips are cycles of `v`, merged across vertical lines free of cone vertices.
pub fn vertical_cylinders(o: &Origami) -> Decomposition {
    induced_cylinders(o, &IntMatrix2::identity(), Base::Vertical).expect("identity is unimodular")
}

/// Horizontal cylinders: strips are cycles of `h`, merged across horizontal lines free of cone vertices.
pub fn horizontal_cylinders(o: &Origami) -> Decomposition {
    induced_cylinders(o, &IntMatrix2::identity(), Base::Horizontal).expect("identity is unimodular")
}

/// Decomposition of `o` in slope `A·0` (vertical base) or `A·∞` (horizontal base).
pub fn induced_cylinders(o: &Origami, a: &IntMatrix2, base: Base) -> Result<Decomposition> {
    if !a.det().is_one() {
        return Err(Error::NotUnimodular(a.to_string()));
    }
    let pullback = decompose(&a.inverse()?)?;
    let y = act_word(&pullback, o);
    let BaseData { cylinders, strip_of, cylinder_of_strip, strip_offset, boundary_after } = base_decomposition(&y, base);
    let (slope, direction) = match base {
        Base::Vertical => (projective_slope(a, &ProjSlope::Finite(Q::zero())), (a.b.clone(), a.d.clone())),
        Base::Horizontal => (projective_slope(a, &ProjSlope::Infinity), (a.a.clone(), a.c.clone())),
    };
    Ok(Decomposition {
        base,
        matrix: a.clone(),
        slope,
        direction,
        cylinders,
        surface: o.clone(),
        origami: y,
        pullback,
        strip_of,
        cylinder_of_strip,
        strip_offset,
        boundary_after,
    })
}

impl Decomposition {
    /// `Σ L_i W_i`.
    pub fn area(&self) -> usize {
        self.cylinders.iter().map(|c| c.length * c.width).sum()
    }

    pub fn total_width(&self) -> usize {
        self.cylinders.iter().map(|c| c.width).sum()
    }

    /// `p² + q²` for the geodesic direction.
    pub fn direction_norm_sq(&self) -> BigInt {
        &self.direction.0 * &self.direction.0 + &self.direction.1 * &self.direction.1
    }

    /// Length of the closed geodesics of cylinder `i` on `X`: `L_i·√(p²+q²)`.
    pub fn geometric_length(&self, i: usize) -> f64 {
        self.cylinders[i].length as f64 * self.direction_norm_sq().to_f64().unwrap_or(f64::INFINITY).sqrt()
    }

    /// Cylinder of a square of `Y` and the number of strips of that cylinder before its strip.
    pub fn strip_position(&self, square: usize) -> (usize, usize) {
        let s = self.strip_of[square];
        (self.cylinder_of_strip[s], self.strip_offset[s])
    }

    /// The affine chart `X → Y`.
    pub fn pull_back(&self, p: &SurfacePoint) -> SurfacePoint {
        psi_word(&self.pullback, &self.surface, p).0
    }

    /// The affine chart `Y → X`.
    pub fn push_forward(&self, p: &SurfacePoint) -> SurfacePoint {
        psi_word(&self.pullback.inverse(), &self.origami, p).0
    }

    /// Image in `Y` of a segment of `X`.
    pub fn pull_back_segment(&self, s: &Segment) -> Result<Segment> {
        let inv = self.matrix.inverse()?;
        make_segment(&self.origami, &self.pull_back(&s.start), &s.direction.transformed(&inv), &Extent::Lambda(s.lambda_end.clone()))
    }

    fn normal_component(&self, dir: &Direction) -> BigInt {
        match self.base {
            Base::Vertical => dir.dx.clone(),
            Base::Horizontal => dir.dy.clone(),
        }
    }

    /// Crossings of cylinder boundaries by a segment of `Y`: parameter and cylinder entered.
    fn boundary_crossings(&self, s: &Segment) -> Result<Vec<(Q, usize)>> {
        let dn = self.normal_component(&s.direction);
        if dn.is_zero() {
            return Err(Error::ParallelToDecomposition);
        }
        let forward = dn.is_positive();
        let y = &self.origami;
        let mut out = vec![];
        for w in s.pieces.windows(2) {
            let (p, next) = (&w[0], &w[1]);
            let coord = match self.base {
                Base::Vertical => &p.to.0,
                Base::Horizontal => &p.to.1,
            };
            let line_strip = if forward && coord.is_one() {
                self.strip_of[p.square]
            } else if !forward && coord.is_zero() {
                let prev = match self.base {
                    Base::Vertical => y.h_inv().apply(p.square),
                    Base::Horizontal => y.v_inv().apply(p.square),
                };
                self.strip_of[prev]
            } else {
                continue;
            };
            if self.boundary_after[line_strip] {
                out.push((p.lam1.clone(), self.cylinder_of_strip[self.strip_of[next.square]]));
            }
        }
        Ok(out)
    }

    /// Cylinders visited in order by a segment of `X`.
    pub fn visits(&self, s: &Segment) -> Result<Vec<usize>> {
        let sy = self.pull_back_segment(s)?;
        let first = sy.pieces.first().map(|p| p.square).unwrap_or(sy.start.square);
        let mut v = vec![self.cylinder_of_strip[self.strip_of[first]]];
        v.extend(self.boundary_crossings(&sy)?.into_iter().map(|(_, c)| c));
        Ok(v)
    }

    /// Checks that the image of a closed geodesic through an interior point of
    /// cylinder `i` of `Y` closes up on `X` after one period.
    pub fn closed_geodesic_audit(&self, i: usize, x: &Q, y: &Q) -> Result<bool> {
        let c = &self.cylinders[i];
        let p = SurfacePoint { square: c.strips[0][0], x: x.clone(), y: y.clone() };
        let img = self.push_forward(&p);
        let dir = Direction::new(self.direction.0.clone(), self.direction.1.clone())?;
        let seg = make_segment(&self.surface, &img, &dir, &Extent::Lambda(Q::from_integer(c.length.into())))?;
        Ok(seg.end == img.normalized(&self.surface))
    }
}

/// Upper bound on the length of a segment from the widths of the cylinders it visits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransversalBound {
    pub visits: Vec<usize>,
    pub width_sum: usize,
    /// Square of the bound `ΣW / (√(p²+q²)·cos θ)`.
    pub squared: Q,
}

impl TransversalBound {
    pub fn value(&self) -> f64 {
        self.squared.to_f64().unwrap_or(f64::INFINITY).sqrt()
    }

    /// Exact comparison `|H| ≤ bound`.
    pub fn holds(&self, h: &Segment) -> bool {
        h.length_sq() <= self.squared
    }
}

/// `ΣW / (√(p²+q²)·cos θ)` where `θ` is the angle between `H` and the
/// direction orthogonal to the cylinders, and `ΣW` runs over the cylinder visits of `H`.
pub fn transversal_bound(h: &Segment, d: &Decomposition) -> Result<TransversalBound> {
    let (p, q) = &d.direction;
    let (dx, dy) = (&h.direction.dx, &h.direction.dy);
    // cos θ = |p·dy − q·dx| / (‖h‖·√(p²+q²))
    let cross = p * dy - q * dx;
    if cross.is_zero() {
        return Err(Error::ParallelToDecomposition);
    }
    let visits = d.visits(h)?;
    let width_sum: usize = visits.iter().map(|&c| d.cylinders[c].width).sum();
    let w = BigInt::from(width_sum);
    let squared = Q::new(&w * &w * h.direction.norm_sq(), &cross * &cross);
    Ok(TransversalBound { visits, width_sum, squared })
}

/// Outcome of a trapping-window check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trap {
    pub cylinder: usize,
    /// Window `W_i·√(1+α²)/α` in flat time.
    pub window: f64,
    /// First time the orbit reaches another boundary line.
    pub exit_time: f64,
    /// Exact flow parameters of the window and exit.
    pub window_lambda: String,
    pub exit_lambda: String,
    pub trapped: bool,
}

/// Traces the orbit of `p` in slope `α` from a vertical cylinder boundary
/// until it leaves the cylinder it enters, and compares with the window.
pub fn trapping_window(d: &Decomposition, alpha: &Q, p: &SurfacePoint) -> Result<Trap> {
    if d.base != Base::Vertical || d.matrix != IntMatrix2::identity() {
        return Err(Error::InvalidArgument("trapping window needs the vertical decomposition".into()));
    }
    let max_len = d.cylinders.iter().map(|c| c.length).max().unwrap_or(1);
    if !alpha.is_positive() || *alpha >= Q::new(BigInt::one(), BigInt::from(max_len)) {
        return Err(Error::PreconditionViolated(format!("slope {alpha} is not in (0, 1/{max_len})")));
    }
    let o = &d.origami;
    let p = p.clone().normalized(o);
    let on_boundary = if p.x.is_zero() {
        d.boundary_after[d.strip_of[o.h_inv().apply(p.square)]]
    } else {
        p.x.is_one() && d.boundary_after[d.strip_of[p.square]]
    };
    if !on_boundary {
        return Err(Error::PreconditionViolated("start is not on a cylinder boundary".into()));
    }
    let dir = Direction::from_rational_slope(alpha, true);
    let max_w = d.cylinders.iter().map(|c| c.width).max().unwrap_or(1);
    let extent = Q::new(BigInt::from(max_w + 1), dir.dx.clone());
    let seg = make_segment(o, &p, &dir, &Extent::Lambda(extent)).map_err(|e| match e {
        Error::ConeVertexInInterior(v) | Error::HitsConeVertex { vertex: v, .. } => Error::StartOnSingularLeaf(v),
        e => e,
    })?;
    let no_exit = || Error::InvalidArgument("orbit did not leave the cylinder".into());
    let first = seg.pieces.first().ok_or_else(no_exit)?.square;
    let cylinder = d.cylinder_of_strip[d.strip_of[first]];
    let (exit, _) = d.boundary_crossings(&seg)?.into_iter().next().ok_or_else(no_exit)?;
    let window = Q::new(BigInt::from(d.cylinders[cylinder].width), dir.dx.clone());
    let norm = dir.norm();
    Ok(Trap {
        cylinder,
        window: window.to_f64().unwrap_or(f64::NAN) * norm,
        exit_time: exit.to_f64().unwrap_or(f64::NAN) * norm,
        trapped: exit >= window,
        window_lambda: window.to_string(),
        exit_lambda: exit.to_string(),
    })
}

/// Result of checking the transversal bound on random segments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundAudit {
    pub segments: usize,
    pub draws: usize,
    pub violations: usize,
    /// Largest `|H| / bound` seen.
    pub max_ratio: f64,
    pub max_direction_entry: u64,
}

/// Random matrix with `A·0` or `A·∞` of height at most `qmax`, and the base realizing it.
pub fn random_decomposition_matrix(qmax: u64, rng: &mut ChaCha8Rng) -> (IntMatrix2, Base) {
    loop {
        let len = rng.gen_range(0..=8);
        let word = GeneratorWord((0..len).map(|_| Generator::ALL[rng.gen_range(0..4)]).collect());
        let a = word.evaluate();
        let base = if rng.gen_bool(0.5) { Base::Vertical } else { Base::Horizontal };
        let (p, q) = match base {
            Base::Vertical => (&a.b, &a.d),
            Base::Horizontal => (&a.a, &a.c),
        };
        if p.abs().max(q.abs()) <= BigInt::from(qmax) {
            return (a, base);
        }
    }
}

/// Draws `segments` random segments of `o`, each against its own random induced
/// decomposition with direction entries at most `qmax`, and compares `|H|` with
/// the transversal bound exactly.
pub fn transversal_bound_audit(o: &Origami, segments: usize, qmax: u64, seed: u64) -> Result<BoundAudit> {
    let results: Vec<Result<(usize, Option<(bool, f64, u64)>)>> = (0..segments)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let (a, base) = random_decomposition_matrix(qmax, &mut rng);
            let d = induced_cylinders(o, &a, base)?;
            let entry = d.direction.0.abs().max(d.direction.1.abs()).to_u64().unwrap_or(u64::MAX);
            for draw in 1..=1000 {
                let p = random_point(o, &mut rng);
                let (dx, dy) = (rng.gen_range(-6i64..=6), rng.gen_range(-6i64..=6));
                if (dx, dy) == (0, 0) {
                    continue;
                }
                let dir = Direction::new(dx, dy)?;
                let lam = Q::new(BigInt::from(rng.gen_range(1u32..=256)), BigInt::from(64));
                let Ok(h) = make_segment(o, &p, &dir, &Extent::Lambda(lam)) else { continue };
                match transversal_bound(&h, &d) {
                    Ok(b) => {
                        let ratio = (h.length_sq() / &b.squared).to_f64().unwrap_or(f64::NAN).sqrt();
                        return Ok((draw, Some((b.holds(&h), ratio, entry))));
                    }
                    Err(Error::ParallelToDecomposition) => continue,
                    Err(e) => return Err(e),
                }
            }
            Ok((1000, None))
        })
        .collect();
    let mut audit = BoundAudit { segments: 0, draws: 0, violations: 0, max_ratio: 0.0, max_direction_entry: 0 };
    for r in results {
        let (draws, found) = r?;
        audit.draws += draws;
        if let Some((ok, ratio, entry)) = found {
            audit.segments += 1;
            audit.violations += usize::from(!ok);
            audit.max_ratio = audit.max_ratio.max(ratio);
            audit.max_direction_entry = audit.max_direction_entry.max(entry);
        }
    }
    Ok(audit)
}
