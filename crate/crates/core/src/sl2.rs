//! Integer 2×2 matrices, words in the generators `T`, `V`, and the action of
//! `SL(2,Z)` on origamis, on slopes and on points (affine homeomorphisms).

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::origami::{Origami, SurfacePoint};

/// `[[a, b], [c, d]]` acting on column vectors `(x, y)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl IntMatrix2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        IntMatrix2 { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    pub fn identity() -> Self {
        IntMatrix2::new(1, 0, 0, 1)
    }

    pub fn t() -> Self {
        IntMatrix2::new(1, 1, 0, 1)
    }

    pub fn v() -> Self {
        IntMatrix2::new(1, 0, 1, 1)
    }

    pub fn r() -> Self {
        IntMatrix2::new(0, -1, 1, 0)
    }

    /// The reflection `(x, y) ↦ (−x, y)`.
    pub fn s() -> Self {
        IntMatrix2::new(-1, 0, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn is_sl2(&self) -> bool {
        self.det().is_one()
    }

    fn require_sl2(&self) -> Result<()> {
        if self.is_sl2() {
            Ok(())
        } else {
            Err(Error::NotUnimodular(self.det().to_string()))
        }
    }

    /// Inverse of a determinant ±1 matrix.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if !det.abs().is_one() {
            return Err(Error::NotUnimodular(det.to_string()));
        }
        Ok(IntMatrix2 {
            a: &self.d * &det,
            b: -&self.b * &det,
            c: -&self.c * &det,
            d: &self.a * &det,
        })
    }

    pub fn apply_vector(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        (&self.a * x + &self.b * y, &self.c * x + &self.d * y)
    }

    pub fn apply_rational(&self, x: &BigRational, y: &BigRational) -> (BigRational, BigRational) {
        let m = |k: &BigInt| BigRational::from_integer(k.clone());
        (m(&self.a) * x + m(&self.b) * y, m(&self.c) * x + m(&self.d) * y)
    }

    /// Squared stretch factor `‖A·u‖² / ‖u‖²` along the direction `(dx, dy)`.
    pub fn stretch_squared(&self, dx: &BigInt, dy: &BigInt) -> BigRational {
        let (x, y) = self.apply_vector(dx, dy);
        BigRational::new(&x * &x + &y * &y, dx * dx + dy * dy)
    }

    /// Operator-norm style bound used for orbit-segment images: `|a|+|b|+|c|+|d|`.
    pub fn l1_norm(&self) -> BigInt {
        self.a.abs() + self.b.abs() + self.c.abs() + self.d.abs()
    }
}

impl Mul for &IntMatrix2 {
    type Output = IntMatrix2;
    fn mul(self, o: &IntMatrix2) -> IntMatrix2 {
        IntMatrix2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }
}

impl Mul for IntMatrix2 {
    type Output = IntMatrix2;
    fn mul(self, o: IntMatrix2) -> IntMatrix2 {
        &self * &o
    }
}

impl fmt::Debug for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for IntMatrix2 {
    type Err = Error;
    /// Parses `a,b,c,d`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<BigInt> = s
            .split(',')
            .map(|t| t.trim().parse::<BigInt>().map_err(|e| Error::Parse(format!("bad matrix entry {t:?}: {e}"))))
            .collect::<Result<_>>()?;
        match parts.as_slice() {
            [a, b, c, d] => Ok(IntMatrix2::new(a.clone(), b.clone(), c.clone(), d.clone())),
            _ => Err(Error::Parse(format!("expected 4 comma-separated entries, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Generator {
    T,
    TInv,
    V,
    VInv,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::T, Generator::TInv, Generator::V, Generator::VInv];

    pub fn matrix(self) -> IntMatrix2 {
        match self {
            Generator::T => IntMatrix2::new(1, 1, 0, 1),
            Generator::TInv => IntMatrix2::new(1, -1, 0, 1),
            Generator::V => IntMatrix2::new(1, 0, 1, 1),
            Generator::VInv => IntMatrix2::new(1, 0, -1, 1),
        }
    }

    pub fn inverse(self) -> Generator {
        match self {
            Generator::T => Generator::TInv,
            Generator::TInv => Generator::T,
            Generator::V => Generator::VInv,
            Generator::VInv => Generator::V,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Generator::T => "T",
            Generator::TInv => "T^-1",
            Generator::V => "V",
            Generator::VInv => "V^-1",
        };
        f.write_str(s)
    }
}

/// A product `g₁ g₂ … g_k` of generators.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GeneratorWord(pub Vec<Generator>);

impl GeneratorWord {
    pub fn evaluate(&self) -> IntMatrix2 {
        self.0.iter().fold(IntMatrix2::identity(), |acc, g| &acc * &g.matrix())
    }

    pub fn inverse(&self) -> GeneratorWord {
        GeneratorWord(self.0.iter().rev().map(|g| g.inverse()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|g| g.to_string()).collect();
        write!(f, "[{}]", s.join(", "))
    }
}

fn push_power(ops: &mut Vec<Generator>, g: Generator, k: &BigInt) {
    let (g, k) = if k.is_negative() { (g.inverse(), -k) } else { (g, k.clone()) };
    let mut i = BigInt::zero();
    while i < k {
        ops.push(g);
        i += 1;
    }
}

/// Writes a determinant-one matrix as a word in `T^{±1}, V^{±1}` by
/// Euclidean reduction of the first column.
pub fn decompose(m: &IntMatrix2) -> Result<GeneratorWord> {
    m.require_sl2()?;
    let mut a = m.clone();
    let mut prefix = Vec::new();
    if a.a.is_zero() && a.c.is_zero() {
        unreachable!("determinant one forbids a zero column");
    }
    // Left multiplications applied to `a`, recorded in order.
    let mut ops: Vec<Generator> = Vec::new();
    let left = |a: &mut IntMatrix2, g: Generator, k: &BigInt, ops: &mut Vec<Generator>| {
        let mut gk = IntMatrix2::identity();
        match g {
            Generator::T => gk.b = k.clone(),
            Generator::V => gk.c = k.clone(),
            _ => unreachable!(),
        }
        *a = &gk * a;
        push_power(ops, g, k);
    };
    while !a.c.is_zero() {
        if a.a.is_zero() {
            let k = if a.c.is_positive() { BigInt::one() } else { -BigInt::one() };
            left(&mut a, Generator::T, &k, &mut ops);
        } else if a.c.abs() >= a.a.abs() {
            let q = &a.c / &a.a;
            left(&mut a, Generator::V, &-q, &mut ops);
        } else {
            let q = &a.a / &a.c;
            left(&mut a, Generator::T, &-q, &mut ops);
        }
    }
    if a.a.is_negative() {
        // −I = R² with R = T⁻¹ V T⁻¹.
        let r = [Generator::TInv, Generator::V, Generator::TInv];
        prefix.extend_from_slice(&r);
        prefix.extend_from_slice(&r);
        a = IntMatrix2 { a: -&a.a, b: -&a.b, c: -&a.c, d: -&a.d };
    }
    debug_assert!(a.a.is_one() && a.d.is_one() && a.c.is_zero());
    let b = a.b.clone();
    left(&mut a, Generator::T, &-b, &mut ops);
    debug_assert_eq!(a, IntMatrix2::identity());
    // ops_k ⋯ ops_1 · M = ±I, so M = ±ops_1⁻¹ ⋯ ops_k⁻¹.
    let mut word = prefix;
    word.extend(ops.iter().map(|g| g.inverse()));
    Ok(GeneratorWord(simplify(word)))
}

/// Cancels adjacent inverse pairs.
fn simplify(word: Vec<Generator>) -> Vec<Generator> {
    let mut out: Vec<Generator> = Vec::with_capacity(word.len());
    for g in word {
        if out.last() == Some(&g.inverse()) {
            out.pop();
        } else {
            out.push(g);
        }
    }
    out
}

/// The generator action on gluing data:
/// `T: (h, v∘h⁻¹)`, `T⁻¹: (h, v∘h)`, `V: (h∘v⁻¹, v)`, `V⁻¹: (h∘v, v)`.
pub fn act_generator(g: Generator, o: &Origami) -> Origami {
    let (h, v) = (o.h(), o.v());
    let (nh, nv) = match g {
        Generator::T => (h.clone(), v.compose(o.h_inv())),
        Generator::TInv => (h.clone(), v.compose(h)),
        Generator::V => (h.compose(o.v_inv()), v.clone()),
        Generator::VInv => (h.compose(v), v.clone()),
    };
    Origami::new(nh, nv).expect("generator action preserves transitivity")
}

/// `g₁ g₂ ⋯ g_k · O`, applying `g_k` first.
pub fn act_word(word: &GeneratorWord, o: &Origami) -> Origami {
    word.0.iter().rev().fold(o.clone(), |acc, &g| act_generator(g, &acc))
}

pub fn act(m: &IntMatrix2, o: &Origami) -> Result<Origami> {
    Ok(act_word(&decompose(m)?, o))
}

/// Horizontal reflection: left and right gluings swap.
pub fn reflect_s(o: &Origami) -> Origami {
    Origami::new(o.h_inv().clone(), o.v().clone()).expect("reflection preserves transitivity")
}

/// Image of a point under the affine homeomorphism `X → g·X` with linear part `g`.
pub fn psi_generator(g: Generator, o: &Origami, p: &SurfacePoint) -> SurfacePoint {
    let one = BigRational::one();
    let zero = BigRational::zero();
    let (j, x, y) = (p.square, p.x.clone(), p.y.clone());
    let (sq, nx, ny) = match g {
        Generator::T => {
            let s = &x + &y;
            if s < one { (j, s, y) } else { (o.h().apply(j), s - &one, y) }
        }
        Generator::TInv => {
            let s = &x - &y;
            if s >= zero { (j, s, y) } else { (o.h_inv().apply(j), s + &one, y) }
        }
        Generator::V => {
            let s = &x + &y;
            if s < one { (j, x, s) } else { (o.v().apply(j), x, s - &one) }
        }
        Generator::VInv => {
            let s = &y - &x;
            if s >= zero { (j, x, s) } else { (o.v_inv().apply(j), x, s + &one) }
        }
    };
    let target = act_generator(g, o);
    SurfacePoint { square: sq, x: nx, y: ny }.normalized(&target)
}

/// Affine homeomorphism along a word: returns the image point and the target origami.
pub fn psi_word(word: &GeneratorWord, o: &Origami, p: &SurfacePoint) -> (SurfacePoint, Origami) {
    let mut cur = o.clone();
    let mut pt = p.clone();
    for &g in word.0.iter().rev() {
        pt = psi_generator(g, &cur, &pt);
        cur = act_generator(g, &cur);
    }
    (pt, cur)
}

/// Image of a point under the reflection homeomorphism `X → S·X`.
pub fn psi_reflect(o: &Origami, p: &SurfacePoint) -> SurfacePoint {
    let target = reflect_s(o);
    if p.x.is_zero() {
        // The left edge of j becomes the right edge of j, i.e. the left edge of h⁻¹(j) in S·X.
        SurfacePoint { square: p.square, x: BigRational::one(), y: p.y.clone() }.normalized(&target)
    } else {
        SurfacePoint { square: p.square, x: BigRational::one() - &p.x, y: p.y.clone() }.normalized(&target)
    }
}

/// A point of `Q ∪ {∞}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProjSlope {
    Finite(BigRational),
    Infinity,
}

impl ProjSlope {
    pub fn from_ratio(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        let (p, q) = (p.into(), q.into());
        if q.is_zero() {
            ProjSlope::Infinity
        } else {
            ProjSlope::Finite(BigRational::new(p, q))
        }
    }

    /// Homogeneous coordinates `(x, y)` with `slope = x/y`, reduced, `y ≥ 0`.
    pub fn direction(&self) -> (BigInt, BigInt) {
        match self {
            ProjSlope::Infinity => (BigInt::one(), BigInt::zero()),
            ProjSlope::Finite(r) => (r.numer().clone(), r.denom().clone()),
        }
    }
}

impl fmt::Display for ProjSlope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjSlope::Infinity => write!(f, "inf"),
            ProjSlope::Finite(r) => write!(f, "{r}"),
        }
    }
}

/// `(a s + b) / (c s + d)` with `∞` handled projectively.
pub fn projective_slope(m: &IntMatrix2, s: &ProjSlope) -> ProjSlope {
    let (x, y) = s.direction();
    let (nx, ny) = m.apply_vector(&x, &y);
    if ny.is_zero() {
        ProjSlope::Infinity
    } else {
        let g = nx.gcd(&ny);
        let (nx, ny) = (nx / &g, ny / &g);
        let (nx, ny) = if ny.is_negative() { (-nx, -ny) } else { (nx, ny) };
        ProjSlope::Finite(BigRational::new(nx, ny))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilizerReport {
    pub t_fixes: bool,
    pub r_fixes: bool,
    /// `T` and `R` generate `SL(2,Z)`, so both fixing certifies the full group.
    pub certified: bool,
    pub moved_by: Vec<String>,
}

pub fn stabilizer_certificate(o: &Origami) -> StabilizerReport {
    let t_fixes = act_generator(Generator::T, o).isomorphic(o);
    let r_fixes = act(&IntMatrix2::r(), o).expect("R has determinant 1").isomorphic(o);
    let mut moved_by = Vec::new();
    if !t_fixes {
        moved_by.push("T".to_string());
    }
    if !r_fixes {
        moved_by.push("R".to_string());
    }
    StabilizerReport { t_fixes, r_fixes, certified: t_fixes && r_fixes, moved_by }
}

/// `SL(2,Z)`-orbit up to isomorphism, with the generator graph between classes.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub classes: Vec<Origami>,
    /// `(from, generator, to)` class indices.
    pub edges: Vec<(usize, Generator, usize)>,
    pub complete: bool,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn into_result(self) -> Result<Orbit> {
        if self.complete {
            Ok(self)
        } else {
            Err(Error::CapExceeded(self.classes.len()))
        }
    }
}

/// Breadth-first closure under `T^{±1}, V^{±1}`, stopping once `cap` classes are known
/// and a new one appears.
pub fn orbit_enumerate(o: &Origami, cap: usize) -> Result<Orbit> {
    if cap == 0 {
        return Err(Error::InvalidArgument("cap must be at least 1".into()));
    }
    let mut index: HashMap<(Vec<usize>, Vec<usize>), usize> = HashMap::new();
    let mut classes = vec![o.clone()];
    index.insert(o.canonical_form(), 0);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        for g in Generator::ALL {
            let img = act_generator(g, &classes[k]);
            let key = img.canonical_form();
            let target = match index.get(&key) {
                Some(&t) => t,
                None => {
                    if classes.len() >= cap {
                        return Ok(Orbit { classes, edges, complete: false });
                    }
                    let t = classes.len();
                    index.insert(key, t);
                    classes.push(img);
                    queue.push_back(t);
                    t
                }
            };
            edges.push((k, g, target));
        }
    }
    Ok(Orbit { classes, edges, complete: true })
}

/// `g(a₁,…,a_n) = V^{a₁} T^{a₂} ⋯` ending in `T^{a_n}` (even n) or `V^{a_n}` (odd n).
pub fn g_word(quotients: &[u64]) -> GeneratorWord {
    let mut w = Vec::new();
    for (k, &a) in quotients.iter().enumerate() {
        let g = if k % 2 == 0 { Generator::V } else { Generator::T };
        w.extend(std::iter::repeat_n(g, a as usize));
    }
    GeneratorWord(w)
}
