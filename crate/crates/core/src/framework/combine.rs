use std::collections::BTreeSet;

use num_traits::{ToPrimitive, Zero};

use super::{trial_budget, Description};
use crate::numutil::{gen_uniform_trials, rat};
use crate::{CoinSource, Error, Nat, Result, Word};

/// A language whose slices can be counted and unranked, the input of the
/// union and product constructions.
pub trait WordStructure: Sync {
    /// Number of members of length `n`.
    fn census(&self, n: usize) -> Nat;

    fn contains(&self, w: &[usize]) -> bool;

    /// The member of length `n` with 1-based rank `r` among the length-`n`
    /// members in lexicographic order.
    fn unrank_slice(&self, n: usize, r: &Nat) -> Result<Word>;
}

/// An explicit finite set of words.
#[derive(Clone, Debug, Default)]
pub struct FiniteWords {
    words: BTreeSet<Word>,
}

impl FiniteWords {
    pub fn new(words: impl IntoIterator<Item = Word>) -> Self {
        FiniteWords {
            words: words.into_iter().collect(),
        }
    }

    fn slice(&self, n: usize) -> impl Iterator<Item = &Word> {
        self.words.iter().filter(move |w| w.len() == n)
    }
}

impl WordStructure for FiniteWords {
    fn census(&self, n: usize) -> Nat {
        Nat::from(self.slice(n).count())
    }

    fn contains(&self, w: &[usize]) -> bool {
        self.words.contains(w)
    }

    fn unrank_slice(&self, n: usize, r: &Nat) -> Result<Word> {
        let size = self.census(n);
        let idx = r
            .to_usize()
            .filter(|&i| i >= 1 && Nat::from(i) <= size)
            .ok_or_else(|| Error::RankOutOfRange { rank: r.clone(), size })?;
        Ok(self.slice(n).nth(idx - 1).cloned().expect("rank checked"))
    }
}

/// Retry budget of the rank draw in union and product: each draw lands in
/// range with probability above 1/2.
fn rank_draw_budget() -> Result<u64> {
    trial_budget(&rat(1, 1), &rat(1, 2), &rat(1, 1), &rat(1, 4))
}

/// How the concatenation `S.T` is graded by size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductMode {
    /// All splits `|s| + |t| = n`, each weighted by its pair count.
    Graded,
    /// Only the split `|s| = k`.
    Fixed(usize),
}

/// Description of the concatenation `S.T` by the pairs `(s, t)`, with
/// `d(q)` the number of factorizations of `q`.
///
/// The source generator draws one rank over all pairs and unranks both
/// factors, so it is exactly uniform regardless of the factor sizes.
pub struct Product<A, B> {
    pub left: A,
    pub right: B,
    pub mode: ProductMode,
}

impl<A: WordStructure, B: WordStructure> Product<A, B> {
    pub fn new(left: A, right: B, mode: ProductMode) -> Self {
        Product { left, right, mode }
    }

    fn splits(&self, n: usize) -> Vec<usize> {
        match self.mode {
            ProductMode::Graded => (0..=n).collect(),
            ProductMode::Fixed(k) if k <= n => vec![k],
            ProductMode::Fixed(_) => vec![],
        }
    }

    fn block(&self, n: usize, k: usize) -> (Nat, Nat) {
        (self.left.census(k), self.right.census(n - k))
    }

    pub fn census(&self, n: usize) -> Nat {
        self.splits(n)
            .into_iter()
            .map(|k| {
                let (a, b) = self.block(n, k);
                a * b
            })
            .sum()
    }

    /// The pair of 1-based rank `r` among all pairs of total size `n`,
    /// ordered by split and then by factor ranks.
    pub fn unrank_pair(&self, n: usize, r: &Nat) -> Result<(Word, Word)> {
        let mut rest = r - 1u32;
        for k in self.splits(n) {
            let (a, b) = self.block(n, k);
            let size = &a * &b;
            if rest < size {
                let i = &rest / &b + 1u32;
                let j = &rest % &b + 1u32;
                return Ok((self.left.unrank_slice(k, &i)?, self.right.unrank_slice(n - k, &j)?));
            }
            rest -= size;
        }
        Err(Error::RankOutOfRange {
            rank: r.clone(),
            size: self.census(n),
        })
    }
}

impl<A: WordStructure, B: WordStructure> Description for Product<A, B> {
    type Source = (Word, Word);
    type Target = Word;

    fn sample_source(&self, n: usize, src: &mut CoinSource) -> Result<Option<Self::Source>> {
        let total = self.census(n);
        if total.is_zero() {
            return Err(Error::EmptySlice(n));
        }
        match gen_uniform_trials(src, &total, rank_draw_budget()?)? {
            Some(r) => self.unrank_pair(n, &r).map(Some),
            None => Ok(None),
        }
    }

    fn project(&self, t: &Self::Source) -> Word {
        let mut w = t.0.clone();
        w.extend_from_slice(&t.1);
        w
    }

    fn ambiguity(&self, q: &Word) -> Result<Nat> {
        let n = q.len();
        let count = self
            .splits(n)
            .into_iter()
            .filter(|&k| self.left.contains(&q[..k]) && self.right.contains(&q[k..]))
            .count();
        Ok(Nat::from(count))
    }

    fn bound(&self, n: usize) -> u64 {
        self.splits(n).len().max(1) as u64
    }

    fn source_census(&self, n: usize) -> Option<Nat> {
        Some(self.census(n))
    }

    fn enumerate_source(&self, n: usize) -> Option<Vec<Self::Source>> {
        let total = self.census(n).to_u64()?;
        (1..=total).map(|r| self.unrank_pair(n, &Nat::from(r)).ok()).collect()
    }
}

/// Description of `S u T` by the disjoint union, `d = [s in S] + [s in T]`.
pub struct Union<A, B> {
    pub left: A,
    pub right: B,
}

impl<A: WordStructure, B: WordStructure> Union<A, B> {
    pub fn new(left: A, right: B) -> Self {
        Union { left, right }
    }

    pub fn census(&self, n: usize) -> Nat {
        self.left.census(n) + self.right.census(n)
    }

    fn route(&self, n: usize, r: &Nat) -> Result<(bool, Word)> {
        let cs = self.left.census(n);
        if r <= &cs {
            Ok((false, self.left.unrank_slice(n, r)?))
        } else {
            Ok((true, self.right.unrank_slice(n, &(r - &cs))?))
        }
    }
}

impl<A: WordStructure, B: WordStructure> Description for Union<A, B> {
    /// The flag is `true` for the copy coming from the right operand.
    type Source = (bool, Word);
    type Target = Word;

    fn sample_source(&self, n: usize, src: &mut CoinSource) -> Result<Option<Self::Source>> {
        let total = self.census(n);
        if total.is_zero() {
            return Err(Error::EmptySlice(n));
        }
        // r over bit_size(C_S + C_T) bits, routed by the threshold C_S.
        match gen_uniform_trials(src, &total, rank_draw_budget()?)? {
            Some(r) => self.route(n, &r).map(Some),
            None => Ok(None),
        }
    }

    fn project(&self, t: &Self::Source) -> Word {
        t.1.clone()
    }

    fn ambiguity(&self, s: &Word) -> Result<Nat> {
        Ok(Nat::from(self.left.contains(s) as u32 + self.right.contains(s) as u32))
    }

    fn bound(&self, _n: usize) -> u64 {
        2
    }

    fn source_census(&self, n: usize) -> Option<Nat> {
        Some(self.census(n))
    }

    fn enumerate_source(&self, n: usize) -> Option<Vec<Self::Source>> {
        let total = self.census(n).to_u64()?;
        (1..=total).map(|r| self.route(n, &Nat::from(r)).ok()).collect()
    }
}
