//! Permutations of `0..n` stored in image form.

use std::fmt;

use crate::error::{Error, Result};

/// A bijection of `0..n`, stored as the vector of images.
///
/// Composition follows the usual right-to-left convention: `f.compose(&g)`
/// is the map `x -> f(g(x))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::NotBijective("empty permutation".into()));
        }
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n {
                return Err(Error::NotBijective(format!("image {x} out of range 0..{n}")));
            }
            if seen[x] {
                return Err(Error::NotBijective(format!("image {x} repeated")));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// Builds a permutation from disjoint cycles; points not mentioned are fixed.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        for c in cycles {
            for (k, &x) in c.iter().enumerate() {
                if x >= n {
                    return Err(Error::NotBijective(format!("cycle entry {x} out of range")));
                }
                images[x] = c[(k + 1) % c.len()];
            }
        }
        Permutation::new(images)
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "composing permutations of different sizes");
        Permutation { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { images: inv }
    }

    /// `sigma ∘ self ∘ sigma⁻¹`: the same permutation after relabeling points by `sigma`.
    pub fn conjugate_by(&self, sigma: &Permutation) -> Permutation {
        sigma.compose(self).compose(&sigma.inverse())
    }

    /// Disjoint cycles, each starting at its smallest element, sorted by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Sorted multiset of cycle lengths (descending).
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation(")?;
        let nontrivial: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if nontrivial.is_empty() {
            write!(f, "id")?;
        }
        for c in nontrivial {
            let s: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", s.join(" "))?;
        }
        write!(f, "; n={})", self.len())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.images.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", s.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert!(Permutation::new(vec![]).is_err());
    }

    #[test]
    fn compose_applies_right_first() {
        let f = Permutation::from_cycles(3, &[&[0, 1]]).unwrap();
        let g = Permutation::from_cycles(3, &[&[1, 2]]).unwrap();
        // f(g(1)) = f(2) = 2
        assert_eq!(f.compose(&g).apply(1), 2);
        assert_eq!(g.compose(&f).apply(1), 0);
    }

    #[test]
    fn cycles_and_inverse() {
        let p = Permutation::new(vec![1, 2, 0, 4, 3, 5]).unwrap();
        assert_eq!(p.cycles(), vec![vec![0, 1, 2], vec![3, 4], vec![5]]);
        assert_eq!(p.cycle_type(), vec![3, 2, 1]);
        assert!(p.compose(&p.inverse()).is_identity());
    }
}
