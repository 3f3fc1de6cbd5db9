//! Derivation trees: census, ranking and uniform generation.

use num_traits::Zero;

use super::CnfGrammar;
use crate::framework::{Measured, SampleReport};
use crate::numutil::{bit_size, ceil_log2, gen_uniform_trials};
use crate::{CoinSource, Count, Error, Nat, Rat, Result, Symbol, Word};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DerivationTree {
    Leaf {
        var: usize,
        sym: Symbol,
    },
    Node {
        var: usize,
        left: Box<DerivationTree>,
        right: Box<DerivationTree>,
    },
}

impl DerivationTree {
    pub fn root(&self) -> usize {
        match self {
            DerivationTree::Leaf { var, .. } | DerivationTree::Node { var, .. } => *var,
        }
    }

    /// Number of leaves.
    pub fn size(&self) -> usize {
        match self {
            DerivationTree::Leaf { .. } => 1,
            DerivationTree::Node { left, right, .. } => left.size() + right.size(),
        }
    }

    /// The derived word, leaves left to right.
    pub fn tree_yield(&self) -> Word {
        let mut out = Vec::with_capacity(self.size());
        self.push_yield(&mut out);
        out
    }

    fn push_yield(&self, out: &mut Word) {
        match self {
            DerivationTree::Leaf { sym, .. } => out.push(*sym),
            DerivationTree::Node { left, right, .. } => {
                left.push_yield(out);
                right.push_yield(out);
            }
        }
    }

    /// Every node matches a rule of `g`.
    pub fn is_valid(&self, g: &CnfGrammar) -> bool {
        match self {
            DerivationTree::Leaf { var, sym } => g.unary(*var).contains(sym),
            DerivationTree::Node { var, left, right } => {
                g.binary(*var).contains(&(left.root(), right.root())) && left.is_valid(g) && right.is_valid(g)
            }
        }
    }

    /// Parenthesised form `(A (B a) (C b))`.
    pub fn format(&self, g: &CnfGrammar) -> String {
        match self {
            DerivationTree::Leaf { var, sym } => {
                format!("({} {})", g.var_name(*var), g.terminals().name(*sym))
            }
            DerivationTree::Node { var, left, right } => {
                format!("({} {} {})", g.var_name(*var), left.format(g), right.format(g))
            }
        }
    }
}

impl Measured for DerivationTree {
    fn size(&self) -> usize {
        DerivationTree::size(self)
    }
}

/// `C_A(l)`, the number of derivation trees rooted at `A` with `l` leaves,
/// for every variable and `l <= n`.
#[derive(Clone, Debug)]
pub struct TreeCensus<C> {
    /// `counts[a][l]`; `l = 0` is always zero.
    counts: Vec<Vec<C>>,
}

impl<C: Count> TreeCensus<C> {
    /// `C_A(l) = sum_{A -> BC} sum_i C_B(i) C_C(l - i)`.
    pub fn new(g: &CnfGrammar, n: usize) -> Self {
        let vars = g.vars().len();
        let mut counts = vec![vec![C::zero(); n + 1]; vars];
        if n >= 1 {
            for (a, row) in counts.iter_mut().enumerate() {
                for _ in g.unary(a) {
                    row[1] += &C::one();
                }
            }
        }
        for l in 2..=n {
            for a in 0..vars {
                let mut acc = C::zero();
                for &(b, c) in g.binary(a) {
                    for i in 1..l {
                        let (x, y) = (&counts[b][i], &counts[c][l - i]);
                        if !x.is_zero() && !y.is_zero() {
                            acc += &(x.clone() * y.clone());
                        }
                    }
                }
                counts[a][l] = acc;
            }
        }
        TreeCensus { counts }
    }

    pub fn get(&self, a: usize, l: usize) -> &C {
        &self.counts[a][l]
    }

    pub fn max_len(&self) -> usize {
        self.counts.first().map_or(0, |r| r.len() - 1)
    }

    /// `b_A(l) = bit_size(C_A(l))`, `None` when the count is zero.
    pub fn bits(&self, a: usize, l: usize) -> Option<u64> {
        bit_size(&self.counts[a][l].to_nat()).ok()
    }
}

/// How the split `(A -> BC, k)` holding a rank is located.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SplitSearch {
    /// Alternating from both ends, `k = 1, l-1, 2, l-2, ...`.
    #[default]
    Boustrophedon,
    Linear,
}

/// The split holding rank `r` in `T_A^l`: the rule `(B, C)`, the left size
/// `k` and the residual rank within `T_B^k x T_C^(l-k)`.
pub fn locate_split(
    g: &CnfGrammar,
    census: &TreeCensus<Nat>,
    a: usize,
    l: usize,
    r: &Nat,
    search: SplitSearch,
) -> ((usize, usize), usize, Nat) {
    let block = |k: usize| -> Nat {
        g.binary(a)
            .iter()
            .map(|&(b, c)| census.get(b, k) * census.get(c, l - k))
            .sum()
    };
    let (k, offset) = match search {
        SplitSearch::Linear => {
            let mut before = Nat::zero();
            let mut found = None;
            for k in 1..l {
                let w = block(k);
                if r <= &(&before + &w) {
                    found = Some((k, r - &before));
                    break;
                }
                before += w;
            }
            found.expect("rank within C_A(l)")
        }
        SplitSearch::Boustrophedon => {
            let total = census.get(a, l);
            let (mut left, mut right) = (Nat::zero(), Nat::zero());
            let (mut lo, mut hi) = (1usize, l - 1);
            loop {
                assert!(lo <= hi, "rank within C_A(l)");
                let w = block(lo);
                if r <= &(&left + &w) {
                    break (lo, r - &left);
                }
                left += w;
                lo += 1;
                if lo > hi {
                    panic!("rank within C_A(l)");
                }
                let w = block(hi);
                // blocks lo..=hi hold the ranks (left, total - right]
                let floor = total - &right - &w;
                if r > &floor {
                    break (hi, r - floor);
                }
                right += w;
                hi -= 1;
            }
        }
    };
    let mut acc = Nat::zero();
    for &(b, c) in g.binary(a) {
        let w = census.get(b, k) * census.get(c, l - k);
        if offset <= &acc + &w {
            return ((b, c), k, offset - acc);
        }
        acc += w;
    }
    unreachable!("offset within the block")
}

/// The tree of 1-based rank `r` in `T_A^l`, ordered by split, rule, then
/// the ranks of the left and right subtrees.
pub fn unrank_tree(
    g: &CnfGrammar,
    census: &TreeCensus<Nat>,
    a: usize,
    l: usize,
    r: &Nat,
    search: SplitSearch,
) -> Result<DerivationTree> {
    let size = census.get(a, l);
    if r.is_zero() || r > size {
        return Err(Error::RankOutOfRange {
            rank: r.clone(),
            size: size.clone(),
        });
    }
    if l == 1 {
        let idx: usize = (r - 1u32).try_into().expect("small rank");
        return Ok(DerivationTree::Leaf {
            var: a,
            sym: g.unary(a)[idx],
        });
    }
    let ((b, c), k, offset) = locate_split(g, census, a, l, r, search);
    let right_size = census.get(c, l - k);
    let o = offset - 1u32;
    let i = &o / right_size + 1u32;
    let j = &o % right_size + 1u32;
    Ok(DerivationTree::Node {
        var: a,
        left: Box::new(unrank_tree(g, census, b, k, &i, search)?),
        right: Box::new(unrank_tree(g, census, c, l - k, &j, search)?),
    })
}

/// Inverse of [`unrank_tree`].
pub fn rank_tree(g: &CnfGrammar, census: &TreeCensus<Nat>, t: &DerivationTree) -> Nat {
    match t {
        DerivationTree::Leaf { var, sym } => {
            Nat::from(g.unary(*var).iter().position(|s| s == sym).expect("valid tree") + 1)
        }
        DerivationTree::Node { var, left, right } => {
            let l = t.size();
            let k = left.size();
            let (b, c) = (left.root(), right.root());
            let mut before = Nat::zero();
            for h in 1..k {
                for &(d, e) in g.binary(*var) {
                    before += census.get(d, h) * census.get(e, l - h);
                }
            }
            for &(d, e) in g.binary(*var) {
                if (d, e) == (b, c) {
                    break;
                }
                before += census.get(d, k) * census.get(e, l - k);
            }
            let i = rank_tree(g, census, left) - 1u32;
            let j = rank_tree(g, census, right);
            before + i * census.get(c, l - k) + j
        }
    }
}

/// `kappa = 3 + ceil(log n) + t`.
pub fn tree_kappa(n: usize, t: u64) -> u64 {
    3 + ceil_log2(&Rat::from_integer(n.max(1).into())) + t
}

fn check_slice(g: &CnfGrammar, census: &TreeCensus<Nat>, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("derivation trees have at least one leaf"));
    }
    if census.max_len() < n {
        return Err(Error::invalid(format!(
            "census computed up to {} only, {n} requested",
            census.max_len()
        )));
    }
    if census.get(g.start(), n).is_zero() {
        return Err(Error::EmptySlice(n));
    }
    Ok(())
}

/// Uniform tree in `T_S^n`: one rejection draw of a rank with `kappa`
/// trials, then the split walk. Failure is below `2^-kappa`, inside the
/// `(2n-1)/2^kappa` bound of the per-node scheme.
pub fn random_tree(
    g: &CnfGrammar,
    census: &TreeCensus<Nat>,
    n: usize,
    t: u64,
    src: &mut CoinSource,
) -> Result<SampleReport<DerivationTree>> {
    random_tree_with(g, census, n, tree_kappa(n, t), SplitSearch::default(), src)
}

pub fn random_tree_with(
    g: &CnfGrammar,
    census: &TreeCensus<Nat>,
    n: usize,
    kappa: u64,
    search: SplitSearch,
    src: &mut CoinSource,
) -> Result<SampleReport<DerivationTree>> {
    check_slice(g, census, n)?;
    let start = src.bits_consumed();
    let value = match gen_uniform_trials(src, census.get(g.start(), n), kappa)? {
        Some(r) => Some(unrank_tree(g, census, g.start(), n, &r, search)?),
        None => None,
    };
    Ok(SampleReport {
        value,
        trials_used: 1,
        bits_used: src.bits_consumed() - start,
    })
}

/// The per-node scheme: every call draws a fresh rank in `{1..C_A(l)}`
/// and recurses on both sides even after a failure. Kept for comparison;
/// conditioned on success it is uniform only when the success chances of
/// the visited counts agree.
pub fn random_tree_per_node(
    g: &CnfGrammar,
    census: &TreeCensus<Nat>,
    n: usize,
    kappa: u64,
    src: &mut CoinSource,
) -> Result<SampleReport<DerivationTree>> {
    fn go(
        g: &CnfGrammar,
        census: &TreeCensus<Nat>,
        a: usize,
        l: usize,
        kappa: u64,
        src: &mut CoinSource,
    ) -> Result<Option<DerivationTree>> {
        let Some(r) = gen_uniform_trials(src, census.get(a, l), kappa)? else {
            return Ok(None);
        };
        if l == 1 {
            let idx: usize = (r - 1u32).try_into().expect("small rank");
            return Ok(Some(DerivationTree::Leaf {
                var: a,
                sym: g.unary(a)[idx],
            }));
        }
        let ((b, c), k, _) = locate_split(g, census, a, l, &r, SplitSearch::Boustrophedon);
        let left = go(g, census, b, k, kappa, src)?;
        let right = go(g, census, c, l - k, kappa, src)?;
        Ok(left.zip(right).map(|(x, y)| DerivationTree::Node {
            var: a,
            left: Box::new(x),
            right: Box::new(y),
        }))
    }
    check_slice(g, census, n)?;
    let start = src.bits_consumed();
    let value = go(g, census, g.start(), n, kappa, src)?;
    Ok(SampleReport {
        value,
        trials_used: 1,
        bits_used: src.bits_consumed() - start,
    })
}

/// All of `T_A^l` in rank order.
pub fn all_trees(g: &CnfGrammar, census: &TreeCensus<Nat>, a: usize, l: usize) -> Vec<DerivationTree> {
    let total: u64 = census.get(a, l).try_into().expect("enumeration too large");
    (1..=total)
        .map(|r| unrank_tree(g, census, a, l, &Nat::from(r), SplitSearch::Linear).expect("in range"))
        .collect()
}
