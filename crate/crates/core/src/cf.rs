//! Continued fractions `α = [0; a₁, a₂, …]`, convergents, g-matrices and
//! slopes of prescribed diophantine type.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sl2::{projective_slope, IntMatrix2, ProjSlope};

/// Gauss map `G(x) = {1/x}`.
pub fn gauss(x: &BigRational) -> BigRational {
    let inv = x.recip();
    &inv - inv.floor()
}

/// Partial quotients of a rational in `(0,1)` by iterating the Gauss map,
/// stopping after `depth` terms or when the expansion terminates.
pub fn cf_expand(x: &BigRational, depth: usize) -> Result<Vec<BigInt>> {
    if !x.is_positive() || *x >= BigRational::one() {
        return Err(Error::OutOfRange(x.to_string()));
    }
    let mut out = Vec::new();
    let mut t = x.clone();
    while out.len() < depth && !t.is_zero() {
        let inv = t.recip();
        let a = inv.floor();
        out.push(a.to_integer());
        t = inv - a;
    }
    Ok(out)
}

/// `V^{a₁} T^{a₂} V^{a₃} ⋯`.
pub fn g_matrix(quotients: &[BigInt]) -> Result<IntMatrix2> {
    let mut m = IntMatrix2::identity();
    for (k, a) in quotients.iter().enumerate() {
        if !a.is_positive() {
            return Err(Error::NonPositiveQuotient(a.to_string()));
        }
        let g = if k % 2 == 0 {
            IntMatrix2::new(1, 0, a.clone(), 1)
        } else {
            IntMatrix2::new(1, a.clone(), 0, 1)
        };
        m = &m * &g;
    }
    Ok(m)
}

/// How partial quotients beyond the explicit prefix are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum QuotientRule {
    /// The expansion ends after the prefix (a rational slope).
    Terminate,
    /// The given block repeats forever.
    Periodic(Vec<BigInt>),
    /// `a_{n+1} = max(1, ⌈q_n^{w−1}⌉)` for even `n`, `a_{n+1} = 1` for odd `n`.
    Type(BigRational),
}

/// A slope in `(0,1)` given by partial quotients.
#[derive(Debug, Clone, PartialEq)]
pub struct CfSlope {
    pub prefix: Vec<BigInt>,
    pub rule: QuotientRule,
}

/// Partial quotients and convergents up to some depth. Index `n` of `p`, `q`
/// holds `p_n`, `q_n`; index 0 is `(0, 1)`. `a[n-1]` is `a_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CfExpansion {
    pub a: Vec<BigInt>,
    pub p: Vec<BigInt>,
    pub q: Vec<BigInt>,
}

impl CfExpansion {
    pub fn depth(&self) -> usize {
        self.a.len()
    }

    pub fn convergent(&self, n: usize) -> BigRational {
        BigRational::new(self.p[n].clone(), self.q[n].clone())
    }

    /// `[0; a_{n+1}, …, a_depth]`, the truncated tail `α_n`.
    pub fn tail(&self, n: usize) -> BigRational {
        let mut t = BigRational::zero();
        for a in self.a[n..].iter().rev() {
            t = (BigRational::from_integer(a.clone()) + t).recip();
        }
        t
    }
}

/// Smallest integer `m` with `m ≥ q^{e}` for rational `e ≥ 0`.
pub fn ceil_rational_power(q: &BigInt, e: &BigRational) -> BigInt {
    assert!(!e.is_negative() && q.is_positive());
    let num = e.numer().to_u32().expect("exponent numerator fits u32");
    let den = e.denom().to_u32().expect("exponent denominator fits u32");
    let target: BigInt = Pow::pow(q, num);
    let root = target.nth_root(den);
    if Pow::pow(&root, den) < target { root + 1 } else { root }
}

impl CfSlope {
    pub fn golden() -> Self {
        CfSlope { prefix: vec![], rule: QuotientRule::Periodic(vec![BigInt::one()]) }
    }

    pub fn from_quotients(q: Vec<BigInt>) -> Result<Self> {
        if let Some(a) = q.iter().find(|a| !a.is_positive()) {
            return Err(Error::NonPositiveQuotient(a.to_string()));
        }
        if q.is_empty() {
            return Err(Error::InvalidArgument("at least one partial quotient required".into()));
        }
        Ok(CfSlope { prefix: q, rule: QuotientRule::Terminate })
    }

    pub fn from_rational(x: &BigRational) -> Result<Self> {
        CfSlope::from_quotients(cf_expand(x, usize::MAX)?)
    }

    /// Slope with diophantine type `w` built from the prefix `[1, 1]`.
    pub fn with_type(w: BigRational) -> Result<Self> {
        CfSlope::with_type_prefix(w, vec![BigInt::one(), BigInt::one()])
    }

    pub fn with_type_prefix(w: BigRational, prefix: Vec<BigInt>) -> Result<Self> {
        if w < BigRational::one() {
            return Err(Error::InvalidArgument(format!("diophantine type must be at least 1, got {w}")));
        }
        if let Some(a) = prefix.iter().find(|a| !a.is_positive()) {
            return Err(Error::NonPositiveQuotient(a.to_string()));
        }
        Ok(CfSlope { prefix, rule: QuotientRule::Type(w) })
    }

    pub fn is_rational(&self) -> bool {
        self.rule == QuotientRule::Terminate
    }

    /// Quotients and convergents up to `depth` (fewer for a terminating expansion).
    pub fn expand(&self, depth: usize) -> CfExpansion {
        let mut e = CfExpansion { a: vec![], p: vec![BigInt::zero()], q: vec![BigInt::one()] };
        let (mut p_prev, mut q_prev) = (BigInt::one(), BigInt::zero());
        while e.a.len() < depth {
            let n = e.a.len();
            let a = if n < self.prefix.len() {
                self.prefix[n].clone()
            } else {
                match &self.rule {
                    QuotientRule::Terminate => break,
                    QuotientRule::Periodic(block) => block[(n - self.prefix.len()) % block.len()].clone(),
                    QuotientRule::Type(w) => {
                        // computing a_{n+1} from q_n
                        if n % 2 == 0 {
                            let c = ceil_rational_power(&e.q[n], &(w - BigRational::one()));
                            c.max(BigInt::one())
                        } else {
                            BigInt::one()
                        }
                    }
                }
            };
            let pn = &a * &e.p[n] + &p_prev;
            let qn = &a * &e.q[n] + &q_prev;
            p_prev = e.p[n].clone();
            q_prev = e.q[n].clone();
            e.p.push(pn);
            e.q.push(qn);
            e.a.push(a);
        }
        e
    }

    pub fn convergent(&self, n: usize) -> BigRational {
        let e = self.expand(n);
        e.convergent(e.depth())
    }

    /// Convergent with the largest denominator not exceeding `qmax` (at least `p_1/q_1`).
    pub fn convergent_below(&self, qmax: &BigInt) -> (usize, BigRational) {
        let mut n = 1;
        let mut depth = 8;
        loop {
            let e = self.expand(depth);
            while n < e.depth() && e.q[n + 1] <= *qmax {
                n += 1;
            }
            if n < e.depth() || e.depth() < depth {
                return (n.min(e.depth()), e.convergent(n.min(e.depth())));
            }
            depth *= 2;
        }
    }
}

impl fmt::Display for CfSlope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[BigInt]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
        match &self.rule {
            QuotientRule::Periodic(b) if self.prefix.is_empty() && b.len() == 1 && b[0].is_one() => write!(f, "golden"),
            QuotientRule::Periodic(b) => write!(f, "quotients:[{}] periodic:[{}]", list(&self.prefix), list(b)),
            QuotientRule::Terminate => write!(f, "quotients:[{}]", list(&self.prefix)),
            QuotientRule::Type(w) => write!(f, "type:w={w};prefix=[{}]", list(&self.prefix)),
        }
    }
}

/// Parses a decimal (`1.5`), fraction (`3/2`) or integer into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((i, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = i.starts_with('-');
        let i: BigInt = if i.is_empty() || i == "-" { BigInt::zero() } else { i.parse().map_err(|_| bad())? };
        let scale: BigInt = Pow::pow(&BigInt::from(10), frac.len() as u32);
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let mag = BigRational::new(i.abs() * &scale + f, scale);
        return Ok(if neg { -mag } else { mag });
    }
    Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?))
}

fn parse_list(s: &str) -> Result<Vec<BigInt>> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad partial quotient {t:?}"))))
        .collect()
}

impl FromStr for CfSlope {
    type Err = Error;

    /// Accepts `golden`, `type:w=2` (optionally `;prefix=[1,1]`),
    /// `quotients:[1,2,3]` and `rational:p/q`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "golden" {
            return Ok(CfSlope::golden());
        }
        if let Some(rest) = s.strip_prefix("type:") {
            let mut parts = rest.split(';');
            let w = parts.next().unwrap_or("");
            let w = w.trim().strip_prefix("w=").unwrap_or(w);
            let w = parse_rational(w)?;
            let mut prefix = None;
            for part in parts {
                match part.trim().split_once('=') {
                    Some(("prefix", v)) => prefix = Some(parse_list(v)?),
                    _ => return Err(Error::Parse(format!("unknown slope option {part:?}"))),
                }
            }
            return match prefix {
                Some(p) => CfSlope::with_type_prefix(w, p),
                None => CfSlope::with_type(w),
            };
        }
        if let Some(rest) = s.strip_prefix("quotients:") {
            return CfSlope::from_quotients(parse_list(rest)?);
        }
        if let Some(rest) = s.strip_prefix("rational:") {
            return CfSlope::from_rational(&parse_rational(rest)?);
        }
        Err(Error::Parse(format!("unknown slope spec {s:?}")))
    }
}

/// Largest `1 + log a_{n+1} / log q_n` over `2 ≤ q_n`, `n ≤ depth`, with the index attaining it.
pub fn diophantine_type_estimate(cf: &CfSlope, depth: usize) -> Result<(f64, usize)> {
    if depth < 2 {
        return Err(Error::InvalidArgument("depth must be at least 2".into()));
    }
    let e = cf.expand(depth + 1);
    let mut best = (1.0, 1);
    for n in 1..=depth.min(e.depth().saturating_sub(1)) {
        let q = &e.q[n];
        if *q < BigInt::from(2) {
            continue;
        }
        let est = 1.0 + ln_big(&e.a[n]) / ln_big(q);
        if est > best.0 {
            best = (est, n);
        }
    }
    Ok(best)
}

/// Natural logarithm of a positive big integer.
pub fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Outcome of the convergent identities for one slope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityAudit {
    pub slope: String,
    pub depth: usize,
    /// Failed identities, as `name@n`.
    pub failures: Vec<String>,
}

/// Checks, for `1 ≤ n ≤ depth`: `p_n q_{n−1} − p_{n−1} q_n = (−1)^{n−1}`; the columns of
/// `g(a_1, …, a_n)`; `g·0 = p_n/q_n` (even `n`) or `g·∞ = p_n/q_n` (odd `n`); and
/// `|α − p_n/q_n| < 1/(q_n q_{n+1})` with `α` replaced by the depth-`(n+10)` convergent.
/// A terminating expansion meets the last bound with equality at its final step.
pub fn identity_audit(slope: &CfSlope, depth: usize) -> IdentityAudit {
    let deep = slope.expand(depth + 10);
    let e = slope.expand(depth);
    let alpha = deep.convergent(deep.depth());
    let mut failures = vec![];
    for n in 1..=e.depth() {
        let det = &e.p[n] * &e.q[n - 1] - &e.p[n - 1] * &e.q[n];
        if det != if n % 2 == 1 { BigInt::one() } else { -BigInt::one() } {
            failures.push(format!("determinant@{n}"));
        }
        let g = g_matrix(&e.a[..n]).expect("quotients are positive");
        let (pn, qn) = (&e.p[n], &e.q[n]);
        let (pm, qm) = (&e.p[n - 1], &e.q[n - 1]);
        let columns_ok = if n % 2 == 0 {
            (&g.a, &g.c, &g.b, &g.d) == (pm, qm, pn, qn)
        } else {
            (&g.a, &g.c, &g.b, &g.d) == (pn, qn, pm, qm)
        };
        if !columns_ok {
            failures.push(format!("columns@{n}"));
        }
        let fixed = if n % 2 == 0 { ProjSlope::Finite(BigRational::zero()) } else { ProjSlope::Infinity };
        if projective_slope(&g, &fixed) != ProjSlope::Finite(e.convergent(n)) {
            failures.push(format!("parity@{n}"));
        }
        if n < deep.depth() {
            let err = (&alpha - e.convergent(n)).abs();
            let bound = BigRational::new(BigInt::one(), &deep.q[n] * &deep.q[n + 1]);
            let last = slope.is_rational() && n + 1 == deep.depth();
            if (last && err != bound) || (!last && err >= bound) {
                failures.push(format!("bound@{n}"));
            }
        }
    }
    IdentityAudit { slope: slope.to_string(), depth: e.depth(), failures }
}

/// `count` slopes cycling through random rationals with denominators below `10⁹`,
/// random quotient lists of length at most 30 and type-rule slopes with `w ∈ [1, 3)`.
pub fn random_slopes(count: usize, seed: u64) -> Vec<CfSlope> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| match k % 3 {
            0 => {
                let q: i64 = rng.gen_range(2..1_000_000_000);
                let p: i64 = rng.gen_range(1..q);
                CfSlope::from_rational(&BigRational::new(p.into(), q.into())).expect("p/q lies in (0,1)")
            }
            1 => {
                let len = rng.gen_range(1..=30);
                CfSlope::from_quotients((0..len).map(|_| BigInt::from(rng.gen_range(1..50))).collect())
                    .expect("quotients are positive")
            }
            _ => {
                let w = BigRational::new(rng.gen_range(4..12).into(), 4.into());
                let prefix = (0..rng.gen_range(1..4)).map(|_| BigInt::from(rng.gen_range(1..5))).collect();
                CfSlope::with_type_prefix(w, prefix).expect("w ≥ 1")
            }
        })
        .collect()
}

/// Audit depth for a slope: 30, or 12 for type-rule slopes whose quotients grow as powers.
pub fn audit_depth(slope: &CfSlope) -> usize {
    if matches!(slope.rule, QuotientRule::Type(_)) { 12 } else { 30 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn expand_examples() {
        assert_eq!(cf_expand(&r(1, 2), 10).unwrap(), ints(&[2]));
        assert_eq!(cf_expand(&r(5, 7), 10).unwrap(), ints(&[1, 2, 2]));
        assert!(matches!(cf_expand(&r(3, 2), 10), Err(Error::OutOfRange(_))));
        assert!(matches!(cf_expand(&r(0, 1), 10), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn golden_convergents_are_fibonacci_ratios() {
        let e = CfSlope::golden().expand(14);
        let fib = [1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610];
        for n in 1..=14 {
            assert_eq!(e.q[n], BigInt::from(fib[n]));
            assert_eq!(e.p[n], BigInt::from(fib[n - 1]));
        }
    }

    #[test]
    fn type_two_rule() {
        let e = CfSlope::with_type(r(2, 1)).unwrap().expand(7);
        assert_eq!(e.a, ints(&[1, 1, 2, 1, 7, 1, 61]));
        assert_eq!(e.q[2], BigInt::from(2));
        assert_eq!(e.q[4], BigInt::from(7));
        assert_eq!(e.q[6], BigInt::from(61));
        let all_one = CfSlope::with_type(r(1, 1)).unwrap().expand(10);
        assert!(all_one.a.iter().all(|a| a.is_one()));
    }

    #[test]
    fn ceil_power_exact() {
        assert_eq!(ceil_rational_power(&BigInt::from(7), &r(1, 1)), BigInt::from(7));
        assert_eq!(ceil_rational_power(&BigInt::from(7), &r(1, 2)), BigInt::from(3));
        assert_eq!(ceil_rational_power(&BigInt::from(9), &r(1, 2)), BigInt::from(3));
        assert_eq!(ceil_rational_power(&BigInt::from(8), &r(2, 3)), BigInt::from(4));
        assert_eq!(ceil_rational_power(&BigInt::from(5), &r(0, 1)), BigInt::from(1));
    }

    #[test]
    fn type_estimates() {
        let (w, n) = diophantine_type_estimate(&CfSlope::with_type(r(2, 1)).unwrap(), 8).unwrap();
        assert!((1.8..=2.05).contains(&w), "{w} at {n}");
        let (w, _) = diophantine_type_estimate(&CfSlope::golden(), 30).unwrap();
        assert_eq!(w, 1.0);
    }

    #[test]
    fn g_matrix_small() {
        assert_eq!(g_matrix(&ints(&[1])).unwrap(), IntMatrix2::new(1, 0, 1, 1));
        assert!(matches!(g_matrix(&ints(&[1, 0])), Err(Error::NonPositiveQuotient(_))));
    }

    #[test]
    fn spec_parsing() {
        assert_eq!("golden".parse::<CfSlope>().unwrap(), CfSlope::golden());
        let t: CfSlope = "type:w=2".parse().unwrap();
        assert_eq!(t.rule, QuotientRule::Type(r(2, 1)));
        let t: CfSlope = "type:w=1.5;prefix=[3,1]".parse().unwrap();
        assert_eq!(t.rule, QuotientRule::Type(r(3, 2)));
        assert_eq!(t.prefix, ints(&[3, 1]));
        let q: CfSlope = "quotients:[1,2,2]".parse().unwrap();
        assert_eq!(q.expand(10).convergent(3), r(5, 7));
        let p: CfSlope = "rational:5/7".parse().unwrap();
        assert_eq!(p, q);
        assert!("nonsense".parse::<CfSlope>().is_err());
        for s in ["golden", "type:w=2;prefix=[1,1]", "quotients:[1,2,2]"] {
            assert_eq!(s.parse::<CfSlope>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1.5").unwrap(), r(3, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), r(-1, 4));
        assert_eq!(parse_rational("3/6").unwrap(), r(1, 2));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn convergent_below_picks_largest() {
        let (n, c) = CfSlope::golden().convergent_below(&BigInt::from(100));
        assert_eq!(n, 10);
        assert_eq!(c, r(55, 89));
    }
}
