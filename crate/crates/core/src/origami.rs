//! Origamis (square-tiled surfaces): construction, vertex and edge data,
//! cone points, automorphisms and isomorphism testing.
//!
//! Squares are indexed `0..n`. The right side of square `j` is glued to the
//! left side of `h(j)` and the top side of `j` to the bottom side of `v(j)`.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Corner {
    BottomLeft,
    BottomRight,
    TopLeft,
    TopRight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// Identifier of an edge class. Horizontal class `j` is the top side of
/// square `j`; vertical class `j` is the right side of square `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeId {
    Horizontal(usize),
    Vertical(usize),
}

impl EdgeId {
    /// Dense index in `0..2n`: horizontal classes first.
    pub fn index(self, n: usize) -> usize {
        match self {
            EdgeId::Horizontal(j) => j,
            EdgeId::Vertical(j) => n + j,
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            EdgeId::Horizontal(_) => Orientation::Horizontal,
            EdgeId::Vertical(_) => Orientation::Vertical,
        }
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeId::Horizontal(j) => write!(f, "H{j}"),
            EdgeId::Vertical(j) => write!(f, "V{j}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeClass {
    pub id: EdgeId,
    pub incidences: [(usize, Side); 2],
    pub label: Option<String>,
    pub dotted: bool,
}

impl EdgeClass {
    pub fn orientation(&self) -> Orientation {
        self.id.orientation()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    pub vertex: usize,
    /// Cone angle is `2π(order + 1)`.
    pub order: usize,
    /// Commutator cycle realizing the cone: the squares whose top-right corner is this vertex.
    pub cycle: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeData {
    pub cones: Vec<Cone>,
    pub regular_vertices: usize,
    pub genus: usize,
}

impl ConeData {
    pub fn orders(&self) -> Vec<usize> {
        let mut o: Vec<usize> = self.cones.iter().map(|c| c.order).collect();
        o.sort_unstable();
        o
    }
}

/// A point of an origami in the canonical chart: `x, y ∈ [0,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SurfacePoint {
    pub square: usize,
    pub x: BigRational,
    pub y: BigRational,
}

impl SurfacePoint {
    /// Builds a point from coordinates in `[0,1]` and normalizes it.
    pub fn new(o: &Origami, square: usize, x: BigRational, y: BigRational) -> Result<Self> {
        let zero = BigRational::zero();
        let one = BigRational::one();
        if square >= o.n() || x < zero || x > one || y < zero || y > one {
            return Err(Error::InvalidArgument(format!(
                "point ({square}, {x}, {y}) outside the closed unit square"
            )));
        }
        Ok(SurfacePoint { square, x, y }.normalized(o))
    }

    pub fn from_ints(o: &Origami, square: usize, x: (i64, i64), y: (i64, i64)) -> Result<Self> {
        let q = |(a, b): (i64, i64)| BigRational::new(BigInt::from(a), BigInt::from(b));
        SurfacePoint::new(o, square, q(x), q(y))
    }

    /// Right-edge points move to the left edge of `h(j)`, top-edge points to
    /// the bottom edge of `v(j)`; the x-rule is applied before the y-rule.
    pub fn normalized(mut self, o: &Origami) -> Self {
        let one = BigRational::one();
        if self.x == one {
            self.square = o.h().apply(self.square);
            self.x = BigRational::zero();
        }
        if self.y == one {
            self.square = o.v().apply(self.square);
            self.y = BigRational::zero();
        }
        self
    }

    pub fn is_corner(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
}

impl fmt::Display for SurfacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.square, self.x, self.y)
    }
}

#[derive(Clone)]
pub struct Origami {
    h: Permutation,
    v: Permutation,
    h_inv: Permutation,
    v_inv: Permutation,
    names: Option<Vec<String>>,
    /// Vertex class of the top-right corner of each square.
    tr_vertex: Vec<usize>,
    vertex_sizes: Vec<usize>,
    edges: Vec<EdgeClass>,
}

impl fmt::Debug for Origami {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Origami").field("n", &self.n()).field("h", &self.h).field("v", &self.v).finish()
    }
}

/// Equality of gluing data; names and labels are presentation only.
impl PartialEq for Origami {
    fn eq(&self, other: &Self) -> bool {
        self.h == other.h && self.v == other.v
    }
}

impl Eq for Origami {}

impl Origami {
    pub fn new(h: Permutation, v: Permutation) -> Result<Self> {
        if h.len() != v.len() {
            return Err(Error::SizeMismatch(h.len(), v.len()));
        }
        let n = h.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(x) = queue.pop_front() {
            for y in [h.apply(x), v.apply(x)] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        if let Some(unreachable) = seen.iter().position(|s| !s) {
            return Err(Error::NotTransitive { unreachable });
        }
        let (tr_vertex, vertex_sizes) = vertex_classes(&h, &v);
        let edges = (0..n)
            .map(|j| EdgeClass {
                id: EdgeId::Horizontal(j),
                incidences: [(j, Side::Top), (v.apply(j), Side::Bottom)],
                label: None,
                dotted: false,
            })
            .chain((0..n).map(|j| EdgeClass {
                id: EdgeId::Vertical(j),
                incidences: [(j, Side::Right), (h.apply(j), Side::Left)],
                label: None,
                dotted: false,
            }))
            .collect();
        let (h_inv, v_inv) = (h.inverse(), v.inverse());
        Ok(Origami { h, v, h_inv, v_inv, names: None, tr_vertex, vertex_sizes, edges })
    }

    /// `make_origami`: validates raw image vectors.
    pub fn from_images(h: Vec<usize>, v: Vec<usize>, names: Option<Vec<String>>) -> Result<Self> {
        if h.len() != v.len() {
            return Err(Error::SizeMismatch(h.len(), v.len()));
        }
        let mut o = Origami::new(Permutation::new(h)?, Permutation::new(v)?)?;
        if let Some(names) = names {
            o = o.with_names(names)?;
        }
        Ok(o)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n() {
            return Err(Error::SizeMismatch(names.len(), self.n()));
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn torus() -> Self {
        Origami::new(Permutation::identity(1), Permutation::identity(1)).expect("torus is valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.h.len()
    }

    #[inline]
    pub fn h(&self) -> &Permutation {
        &self.h
    }

    #[inline]
    pub fn v(&self) -> &Permutation {
        &self.v
    }

    #[inline]
    pub fn h_inv(&self) -> &Permutation {
        &self.h_inv
    }

    #[inline]
    pub fn v_inv(&self) -> &Permutation {
        &self.v_inv
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn square_name(&self, j: usize) -> String {
        match &self.names {
            Some(names) => names[j].clone(),
            None => j.to_string(),
        }
    }

    /// The commutator `[v,h] = v⁻¹ h⁻¹ v h` (apply `h` first).
    pub fn commutator(&self) -> Permutation {
        self.v_inv.compose(&self.h_inv).compose(&self.v).compose(&self.h)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_sizes.len()
    }

    /// Vertex class of a corner of square `j`.
    pub fn vertex_at(&self, j: usize, corner: Corner) -> usize {
        let anchor = match corner {
            Corner::TopRight => j,
            Corner::TopLeft => self.h_inv.apply(j),
            Corner::BottomRight => self.v_inv.apply(j),
            Corner::BottomLeft => self.v_inv.apply(self.h_inv.apply(j)),
        };
        self.tr_vertex[anchor]
    }

    /// Number of square corners identified to the vertex; `4(k+1)` for a cone of order `k`.
    pub fn vertex_corner_count(&self, vertex: usize) -> usize {
        self.vertex_sizes[vertex]
    }

    pub fn is_cone_vertex(&self, vertex: usize) -> bool {
        self.vertex_sizes[vertex] > 4
    }

    pub fn edges(&self) -> &[EdgeClass] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &EdgeClass {
        &self.edges[id.index(self.n())]
    }

    pub fn set_edge_label(&mut self, id: EdgeId, label: Option<String>, dotted: bool) {
        let k = id.index(self.n());
        self.edges[k].label = label;
        self.edges[k].dotted = dotted;
    }

    pub fn edge_label(&self, id: EdgeId) -> Option<&str> {
        self.edge(id).label.as_deref()
    }

    pub fn has_labels(&self) -> bool {
        self.edges.iter().any(|e| e.label.is_some())
    }

    /// Cone points from the cycles of `[v,h]`; cycles of length `c ≥ 2` are
    /// cones of order `c − 1`.
    pub fn cone_data(&self) -> ConeData {
        let mut cones = Vec::new();
        let mut regular = 0;
        for cycle in self.commutator().cycles() {
            if cycle.len() == 1 {
                regular += 1;
            } else {
                cones.push(Cone { vertex: self.tr_vertex[cycle[0]], order: cycle.len() - 1, cycle });
            }
        }
        let sum: usize = cones.iter().map(|c| c.order).sum();
        ConeData { cones, regular_vertices: regular, genus: sum / 2 + 1 }
    }

    /// Euler characteristic from the corner-walk vertex classes: `V − 2n + n`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.n() as i64
    }

    /// Checks that the corner-walk vertex classes agree with the commutator
    /// cycles: same count, and each cycle lies in one class of matching size.
    pub fn vertex_cross_check(&self) -> bool {
        let cycles = self.commutator().cycles();
        if cycles.len() != self.vertex_count() {
            return false;
        }
        let mut used = HashSet::new();
        for c in &cycles {
            let vtx = self.tr_vertex[c[0]];
            if c.iter().any(|&x| self.tr_vertex[x] != vtx) || !used.insert(vtx) {
                return false;
            }
            if self.vertex_sizes[vtx] != 4 * c.len() {
                return false;
            }
        }
        true
    }

    /// Translation automorphisms: permutations commuting with both `h` and `v`.
    pub fn automorphism_group(&self) -> Vec<Permutation> {
        let mut out: Vec<Permutation> =
            (0..self.n()).filter_map(|u| relabeling_from_anchor(self, self, u)).collect();
        out.sort();
        out
    }

    /// A relabeling `σ` with `h₂ = σ h₁ σ⁻¹` and `v₂ = σ v₁ σ⁻¹`, if any.
    pub fn is_isomorphic(&self, other: &Origami) -> Result<Option<Permutation>> {
        if self.n() != other.n() {
            return Err(Error::SizeMismatch(self.n(), other.n()));
        }
        Ok((0..other.n()).find_map(|u| relabeling_from_anchor(self, other, u)))
    }

    pub fn isomorphic(&self, other: &Origami) -> bool {
        matches!(self.is_isomorphic(other), Ok(Some(_)))
    }

    /// Canonical representative of the isomorphism class: the lexicographically
    /// least `(h, v)` over breadth-first relabelings from every square.
    pub fn canonical_form(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.n();
        let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
        for s in 0..n {
            let mut label = vec![usize::MAX; n];
            let mut order = Vec::with_capacity(n);
            label[s] = 0;
            order.push(s);
            let mut k = 0;
            while k < order.len() {
                let x = order[k];
                for y in [self.h.apply(x), self.v.apply(x)] {
                    if label[y] == usize::MAX {
                        label[y] = order.len();
                        order.push(y);
                    }
                }
                k += 1;
            }
            let h: Vec<usize> = order.iter().map(|&x| label[self.h.apply(x)]).collect();
            let v: Vec<usize> = order.iter().map(|&x| label[self.v.apply(x)]).collect();
            let cand = (h, v);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
        best.expect("origami has at least one square")
    }

    /// Relabels squares by `sigma` (square `j` becomes `sigma(j)`).
    pub fn relabeled(&self, sigma: &Permutation) -> Origami {
        let mut o = Origami::new(self.h.conjugate_by(sigma), self.v.conjugate_by(sigma))
            .expect("relabeling preserves validity");
        let inv = sigma.inverse();
        if let Some(names) = &self.names {
            o.names = Some((0..self.n()).map(|j| names[inv.apply(j)].clone()).collect());
        }
        for e in &self.edges {
            let id = match e.id {
                EdgeId::Horizontal(j) => EdgeId::Horizontal(sigma.apply(j)),
                EdgeId::Vertical(j) => EdgeId::Vertical(sigma.apply(j)),
            };
            o.set_edge_label(id, e.label.clone(), e.dotted);
        }
        o
    }

    /// Text format: `n=`, `h=`, `v=` and an optional `names=` line.
    pub fn to_text(&self) -> String {
        let mut s = format!("n={}\nh={}\nv={}\n", self.n(), self.h, self.v);
        if let Some(names) = &self.names {
            s.push_str(&format!("names={}\n", names.join(" ")));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut n = None;
        let mut h = None;
        let mut v = None;
        let mut names = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (key, value) =
                line.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got {line:?}")))?;
            let ints = |s: &str| -> Result<Vec<usize>> {
                s.split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}"))))
                    .collect()
            };
            match key.trim() {
                "n" => {
                    n = Some(value.trim().parse::<usize>().map_err(|e| Error::Parse(format!("bad n: {e}")))?)
                }
                "h" => h = Some(ints(value)?),
                "v" => v = Some(ints(value)?),
                "names" => names = Some(value.split_whitespace().map(String::from).collect::<Vec<_>>()),
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
        }
        let n = n.ok_or_else(|| Error::Parse("missing n= line".into()))?;
        let h = h.ok_or_else(|| Error::Parse("missing h= line".into()))?;
        let v = v.ok_or_else(|| Error::Parse("missing v= line".into()))?;
        if h.len() != n || v.len() != n {
            return Err(Error::Parse(format!("n={n} but h has {} and v has {} entries", h.len(), v.len())));
        }
        Origami::from_images(h, v, names)
    }
}

/// Tries to extend `σ(0) = u` to an isomorphism from `a` to `b`.
fn relabeling_from_anchor(a: &Origami, b: &Origami, u: usize) -> Option<Permutation> {
    let n = a.n();
    let mut sigma = vec![usize::MAX; n];
    let mut used = vec![false; n];
    sigma[0] = u;
    used[u] = true;
    let mut stack = vec![0usize];
    while let Some(x) = stack.pop() {
        let sx = sigma[x];
        for (ya, yb) in [(a.h.apply(x), b.h.apply(sx)), (a.v.apply(x), b.v.apply(sx))] {
            if sigma[ya] == usize::MAX {
                if used[yb] {
                    return None;
                }
                sigma[ya] = yb;
                used[yb] = true;
                stack.push(ya);
            } else if sigma[ya] != yb {
                return None;
            }
        }
    }
    Permutation::new(sigma).ok()
}

/// Union-find over the `4n` corner incidences. Returns the class of each
/// square's top-right corner and the number of corners in each class.
fn vertex_classes(h: &Permutation, v: &Permutation) -> (Vec<usize>, Vec<usize>) {
    let n = h.len();
    let idx = |j: usize, c: Corner| -> usize {
        4 * j
            + match c {
                Corner::BottomLeft => 0,
                Corner::BottomRight => 1,
                Corner::TopLeft => 2,
                Corner::TopRight => 3,
            }
    };
    let mut parent: Vec<usize> = (0..4 * n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let union = |p: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(p, a), find(p, b));
        if ra != rb {
            p[ra] = rb;
        }
    };
    for j in 0..n {
        let r = h.apply(j);
        union(&mut parent, idx(j, Corner::TopRight), idx(r, Corner::TopLeft));
        union(&mut parent, idx(j, Corner::BottomRight), idx(r, Corner::BottomLeft));
        let t = v.apply(j);
        union(&mut parent, idx(j, Corner::TopLeft), idx(t, Corner::BottomLeft));
        union(&mut parent, idx(j, Corner::TopRight), idx(t, Corner::BottomRight));
    }
    let mut class_of_root = vec![usize::MAX; 4 * n];
    let mut sizes = Vec::new();
    for k in 0..4 * n {
        let r = find(&mut parent, k);
        if class_of_root[r] == usize::MAX {
            class_of_root[r] = sizes.len();
            sizes.push(0);
        }
        sizes[class_of_root[r]] += 1;
    }
    let tr = (0..n)
        .map(|j| {
            let r = find(&mut parent, idx(j, Corner::TopRight));
            class_of_root[r]
        })
        .collect();
    (tr, sizes)
}

/// Index of square `(i, a, b)` of the Ornithorynque (lexicographic order).
pub fn ornithorynque_square(i: usize, a: usize, b: usize) -> usize {
    4 * (i % 3) + 2 * (a % 2) + (b % 2)
}

/// The genus 4 Ornithorynque origami on `Z/3 × Z/2 × Z/2`, with its twelve
/// lettered edge classes `A_i, B_i, C_i, D_i` and twelve dotted ones.
pub fn builtin_ornithorynque() -> Origami {
    let sq = ornithorynque_square;
    let mut h = vec![0; 12];
    let mut v = vec![0; 12];
    for i in 0..3 {
        let (ip, im) = ((i + 1) % 3, (i + 2) % 3);
        h[sq(i, 0, 0)] = sq(ip, 1, 0);
        h[sq(i, 0, 1)] = sq(im, 1, 1);
        h[sq(i, 1, 0)] = sq(i, 0, 0);
        h[sq(i, 1, 1)] = sq(i, 0, 1);
        v[sq(i, 0, 0)] = sq(im, 0, 1);
        v[sq(i, 0, 1)] = sq(i, 0, 0);
        v[sq(i, 1, 0)] = sq(ip, 1, 1);
        v[sq(i, 1, 1)] = sq(i, 1, 0);
    }
    let names = (0..12).map(|j| format!("({},{},{})", j / 4, (j / 2) % 2, j % 2)).collect();
    let mut o = Origami::from_images(h, v, Some(names)).expect("Ornithorynque tables are valid");
    for e in o.edges.iter_mut() {
        e.dotted = true;
    }
    for i in 0..3 {
        o.set_edge_label(EdgeId::Horizontal(sq(i, 1, 0)), Some(format!("A{i}")), false);
        o.set_edge_label(EdgeId::Horizontal(sq(i, 0, 0)), Some(format!("B{i}")), false);
        o.set_edge_label(EdgeId::Vertical(sq(i, 0, 0)), Some(format!("C{i}")), false);
        o.set_edge_label(EdgeId::Vertical(sq(i, 0, 1)), Some(format!("D{i}")), false);
    }
    o
}

/// Three-square L: `h = (0 1)`, `v = (0 2)`; one cone of order 2, genus 2.
pub fn builtin_genus2_l() -> Origami {
    Origami::from_images(vec![1, 0, 2], vec![2, 1, 0], None).expect("L origami is valid")
}

/// Looks up a builtin by name.
pub fn builtin(name: &str) -> Option<Origami> {
    match name {
        "ornithorynque" | "xo" | "X_O" => Some(builtin_ornithorynque()),
        "genus2_L" | "genus2_l" | "L" => Some(builtin_genus2_l()),
        "torus" => Some(Origami::torus()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_has_no_cones() {
        let t = Origami::torus();
        let cd = t.cone_data();
        assert!(cd.cones.is_empty());
        assert_eq!(cd.regular_vertices, 1);
        assert_eq!(cd.genus, 1);
        assert_eq!(t.automorphism_group().len(), 1);
    }

    #[test]
    fn disconnected_is_rejected() {
        let err = Origami::from_images(vec![0, 1], vec![0, 1], None).unwrap_err();
        assert_eq!(err, Error::NotTransitive { unreachable: 1 });
    }

    #[test]
    fn bad_images_rejected() {
        assert!(matches!(Origami::from_images(vec![0, 0], vec![1, 0], None), Err(Error::NotBijective(_))));
    }

    #[test]
    fn ornithorynque_commutator_type() {
        let o = builtin_ornithorynque();
        assert_eq!(o.commutator().cycle_type(), vec![3, 3, 3, 1, 1, 1]);
        let cd = o.cone_data();
        assert_eq!(cd.orders(), vec![2, 2, 2]);
        assert_eq!(cd.regular_vertices, 3);
        assert_eq!(cd.genus, 4);
        assert!(o.vertex_cross_check());
        assert_eq!(o.euler_characteristic(), 2 - 2 * 4);
    }

    #[test]
    fn ornithorynque_dotted_identities() {
        let o = builtin_ornithorynque();
        let sq = ornithorynque_square;
        for i in 0..3 {
            assert_eq!(o.v().apply(sq(i, 1, 1)), sq(i, 1, 0));
            assert_eq!(o.v().apply(sq(i, 0, 1)), sq(i, 0, 0));
            assert_eq!(o.h().apply(sq(i, 1, 0)), sq(i, 0, 0));
            assert_eq!(o.h().apply(sq(i, 1, 1)), sq(i, 0, 1));
        }
        let labeled = o.edges().iter().filter(|e| e.label.is_some()).count();
        let dotted = o.edges().iter().filter(|e| e.dotted).count();
        assert_eq!((labeled, dotted), (12, 12));
    }

    #[test]
    fn ornithorynque_labels_match_figure() {
        // Lower sides of the tile squares carry the letters of their neighbours.
        let o = builtin_ornithorynque();
        let sq = ornithorynque_square;
        for i in 0..3 {
            let below_a = o.v().inverse().apply(sq(i, 1, 1));
            assert_eq!(o.edge_label(EdgeId::Horizontal(below_a)).unwrap(), format!("A{}", (i + 2) % 3));
            let below_b = o.v().inverse().apply(sq(i, 0, 1));
            assert_eq!(o.edge_label(EdgeId::Horizontal(below_b)).unwrap(), format!("B{}", (i + 1) % 3));
            let left_c = o.h().inverse().apply(sq(i, 1, 0));
            assert_eq!(o.edge_label(EdgeId::Vertical(left_c)).unwrap(), format!("C{}", (i + 2) % 3));
            let left_d = o.h().inverse().apply(sq(i, 1, 1));
            assert_eq!(o.edge_label(EdgeId::Vertical(left_d)).unwrap(), format!("D{}", (i + 1) % 3));
        }
    }

    #[test]
    fn ornithorynque_cone_positions() {
        // Tile corners, side midpoints and centres.
        let o = builtin_ornithorynque();
        let sq = ornithorynque_square;
        for i in 0..3 {
            let center = o.vertex_at(sq(i, 1, 1), Corner::TopRight);
            assert!(!o.is_cone_vertex(center));
            let top_mid = o.vertex_at(sq(i, 1, 0), Corner::TopRight);
            let side_mid = o.vertex_at(sq(i, 0, 0), Corner::BottomRight);
            let corner = o.vertex_at(sq(i, 1, 1), Corner::BottomLeft);
            assert!(o.is_cone_vertex(top_mid) && o.is_cone_vertex(side_mid) && o.is_cone_vertex(corner));
            assert_ne!(top_mid, side_mid);
            assert_ne!(corner, side_mid);
            assert_ne!(corner, top_mid);
        }
    }

    #[test]
    fn automorphisms() {
        assert_eq!(builtin_ornithorynque().automorphism_group().len(), 3);
        assert_eq!(builtin_genus2_l().automorphism_group().len(), 1);
    }

    #[test]
    fn genus2_l_data() {
        let l = builtin_genus2_l();
        let cd = l.cone_data();
        assert_eq!(cd.orders(), vec![2]);
        assert_eq!(cd.genus, 2);
        assert!(l.vertex_cross_check());
    }

    #[test]
    fn isomorphism_size_mismatch() {
        let err = Origami::torus().is_isomorphic(&builtin_genus2_l()).unwrap_err();
        assert_eq!(err, Error::SizeMismatch(1, 3));
    }

    #[test]
    fn point_normalization() {
        let o = builtin_ornithorynque();
        let p = SurfacePoint::from_ints(&o, 0, (1, 1), (1, 3)).unwrap();
        assert_eq!(p.square, o.h().apply(0));
        assert!(p.x.is_zero());
        let c = SurfacePoint::from_ints(&o, 5, (1, 1), (1, 1)).unwrap();
        assert_eq!(c.square, o.v().apply(o.h().apply(5)));
        assert!(c.is_corner());
        assert_eq!(c.clone().normalized(&o), c);
    }

    #[test]
    fn text_round_trip() {
        let o = builtin_ornithorynque();
        let back = Origami::from_text(&o.to_text()).unwrap();
        assert_eq!(back, o);
        assert_eq!(back.names().unwrap()[5], "(1,0,1)");
        assert!(Origami::from_text("n=2\nh=0 1\n").is_err());
    }
}
