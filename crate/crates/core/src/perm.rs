//! Permutations of `0..degree`, composed left to right.

use std::fmt;

use serde::Serialize;

use crate::modular::lcm;

/// A permutation stored as its image list: `p.apply(i) = images[i]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Permutation(Vec<u32>);

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation((0..degree as u32).collect())
    }

    /// `None` unless `images` is a bijection of `0..images.len()`.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return None;
            }
        }
        Some(Permutation(images.into_iter().map(|i| i as u32).collect()))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&i| i as usize)
    }

    /// First `self`, then `other`: `i -> other(self(i))`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation(self.0.iter().map(|&i| other.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Permutation(inv)
    }

    pub fn pow(&self, k: u64) -> Permutation {
        let mut result = Permutation::identity(self.degree());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.then(&base);
            }
            base = base.then(&base);
            k >>= 1;
        }
        result
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        self.then(other) == other.then(self)
    }

    /// Cycles of length at least 2, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut i = self.apply(start);
            while i != start {
                seen[i] = true;
                cycle.push(i);
                i = self.apply(i);
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// Sorted cycle lengths including fixed points.
    pub fn cycle_type(&self) -> Vec<usize> {
        let moved: usize = self.cycles().iter().map(Vec::len).sum();
        let mut lens: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        lens.extend(std::iter::repeat_n(1, self.degree() - moved));
        lens.sort_unstable();
        lens
    }

    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1, |acc, c| lcm(acc, c.len() as u64))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Cycle notation, e.g. `(0 1)(2 5 3)`; `()` for the identity.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(usize::to_string).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn perm(images: &[usize]) -> Permutation {
        Permutation::from_images(images.to_vec()).unwrap()
    }

    #[test]
    fn composition_runs_left_to_right() {
        let p = perm(&[1, 2, 0]);
        let q = perm(&[1, 0, 2]);
        assert_eq!(p.then(&q), perm(&[0, 2, 1]));
        assert_eq!(q.then(&p), perm(&[2, 1, 0]));
        assert_eq!(p.to_string(), "(0 1 2)");
        assert_eq!(Permutation::identity(4).to_string(), "()");
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_images(vec![0, 0]).is_none());
        assert!(Permutation::from_images(vec![0, 2]).is_none());
    }

    #[test]
    fn order_and_cycle_type() {
        let p = perm(&[1, 0, 3, 4, 2, 5]);
        assert_eq!(p.order(), 6);
        assert_eq!(p.cycle_type(), vec![1, 2, 3]);
        assert!(p.pow(6).is_identity());
        assert!(!p.pow(3).is_identity());
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    proptest! {
        #[test]
        fn group_laws(p in arb_perm(9), q in arb_perm(9), r in arb_perm(9)) {
            prop_assert_eq!(p.then(&q).then(&r), p.then(&q.then(&r)));
            prop_assert!(p.then(&p.inverse()).is_identity());
            prop_assert_eq!(p.then(&q).inverse(), q.inverse().then(&p.inverse()));
            prop_assert!(p.pow(p.order()).is_identity());
            prop_assert_eq!(p.cycle_type().iter().sum::<usize>(), 9);
        }
    }
}
