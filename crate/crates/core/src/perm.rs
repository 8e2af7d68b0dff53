use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `{0, …, n−1}` stored as its image table: `img[x]` is the
/// image of `x`. Serializes as a plain JSON array of images.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Perm {
    img: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm {
            img: (0..n).collect(),
        }
    }

    /// Builds a permutation from an image table, rejecting non-bijections.
    pub fn from_images(img: Vec<usize>) -> Result<Perm> {
        let n = img.len();
        let mut seen = vec![false; n];
        for &y in &img {
            if y >= n || seen[y] {
                return Err(Error::Validation(format!(
                    "image table {:?} is not a bijection on 0..{}",
                    img, n
                )));
            }
            seen[y] = true;
        }
        Ok(Perm { img })
    }

    /// The translation `x ↦ x + shift (mod n)`.
    pub fn translation(n: usize, shift: usize) -> Perm {
        Perm {
            img: (0..n).map(|x| (x + shift) % n).collect(),
        }
    }

    /// The negation `x ↦ −x (mod n)`.
    pub fn negation(n: usize) -> Perm {
        Perm {
            img: (0..n).map(|x| (n - x) % n).collect(),
        }
    }

    /// Swaps `a` and `b`, fixing everything else.
    pub fn transposition(n: usize, a: usize, b: usize) -> Perm {
        let mut img: Vec<usize> = (0..n).collect();
        img.swap(a, b);
        Perm { img }
    }

    pub fn degree(&self) -> usize {
        self.img.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.img[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.img
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// Functional composition: `(p ∘ q)(x) = p(q(x))`, i.e. apply `q` first.
    pub fn compose(&self, other: &Perm) -> Result<Perm> {
        if self.degree() != other.degree() {
            return Err(Error::Validation(format!(
                "degree mismatch: {} vs {}",
                self.degree(),
                other.degree()
            )));
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            img: other.img.iter().map(|&y| self.img[y]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut img = vec![0; self.img.len()];
        for (x, &y) in self.img.iter().enumerate() {
            img[y] = x;
        }
        Perm { img }
    }

    pub fn commutes_with(&self, other: &Perm) -> Result<bool> {
        Ok(self.compose(other)? == other.compose(self)?)
    }

    /// Decomposition into cycles of length ≥ 2, each cycle rotated to start
    /// at its minimum and cycles sorted by that minimum.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.img.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.img[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut x = self.img[start];
            while x != start {
                seen[x] = true;
                cyc.push(x);
                x = self.img[x];
            }
            out.push(cyc);
        }
        out
    }

    /// True when the permutation is a single cycle through all `n` points;
    /// such an element generates a regular cyclic group of order `n`.
    pub fn is_full_cycle(&self) -> bool {
        let n = self.img.len();
        if n == 0 {
            return false;
        }
        let mut x = 0;
        for _ in 0..n {
            x = self.img[x];
        }
        if x != 0 {
            return false;
        }
        // 0 returned after exactly n steps iff its cycle has length dividing n
        // and covering all points; count explicitly.
        let mut len = 1;
        let mut y = self.img[0];
        while y != 0 {
            len += 1;
            y = self.img[y];
        }
        len == n
    }
}

impl fmt::Display for Perm {
    /// Cycle notation, e.g. `(0 1 2)(3 4)`; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cyc in cycles {
            write!(f, "(")?;
            for (i, v) in cyc.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", v)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm[{}: {}]", self.degree(), self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_identity_law() {
        let p = Perm::translation(5, 2);
        let id = Perm::identity(5);
        assert_eq!(id.compose(&p).unwrap(), p);
        assert_eq!(p.compose(&id).unwrap(), p);
    }

    #[test]
    fn inverse_of_rotation() {
        let p = Perm::translation(5, 1);
        assert_eq!(p.inverse(), Perm::translation(5, 4));
        assert!(p.inverse().compose(&p).unwrap().is_identity());
    }

    #[test]
    fn compose_rotation_with_negation() {
        // (x ↦ x+1) ∘ (x ↦ −x) = x ↦ 1 − x on Z₅
        let add1 = Perm::translation(5, 1);
        let neg = Perm::negation(5);
        let got = add1.compose(&neg).unwrap();
        let want = Perm::from_images(vec![1, 0, 4, 3, 2]).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Perm::from_images(vec![0, 0, 2]).is_err());
        assert!(Perm::from_images(vec![0, 3]).is_err());
    }

    #[test]
    fn degree_mismatch_is_an_error() {
        let p = Perm::identity(4);
        let q = Perm::identity(5);
        assert!(p.compose(&q).is_err());
    }

    #[test]
    fn cycle_structure() {
        let p = Perm::from_images(vec![1, 2, 0, 4, 3, 5]).unwrap();
        assert_eq!(p.cycles(), vec![vec![0, 1, 2], vec![3, 4]]);
        assert_eq!(p.to_string(), "(0 1 2)(3 4)");
        assert!(!p.is_full_cycle());
        assert!(Perm::translation(6, 1).is_full_cycle());
        assert!(!Perm::translation(6, 2).is_full_cycle());
        assert!(!Perm::identity(3).is_full_cycle());
    }
}
