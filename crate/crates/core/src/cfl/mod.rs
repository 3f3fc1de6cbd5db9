//! Context-free languages: Chomsky normal form, derivation-tree census and
//! sampling, multiplicity Earley parsing, and the ambiguous description of
//! a language by its derivation trees.

mod cnf;
mod earley;
mod grammar;
mod tree;

use std::sync::{Arc, Mutex};

use num_traits::ToPrimitive;

pub use cnf::CnfGrammar;
pub use earley::{earley_count, earley_table, EarleyTable, Item, State};
pub use grammar::{EpsilonPolicy, GSym, Grammar, Rule};
pub use tree::{
    all_trees, locate_split, random_tree, random_tree_per_node, random_tree_with, rank_tree, tree_kappa, unrank_tree,
    DerivationTree, SplitSearch, TreeCensus,
};

use crate::framework::Description;
use crate::{CoinSource, Error, Nat, Result, Word};

/// `D(n) = c_0 + c_1 n + c_2 n^2 + ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyBound(pub Vec<u64>);

impl PolyBound {
    pub fn constant(d: u64) -> Self {
        PolyBound(vec![d])
    }

    pub fn eval(&self, n: usize) -> u64 {
        self.0
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc.saturating_mul(n as u64).saturating_add(c))
    }

    /// Comma-separated coefficients, constant first: `"1,1"` is `1 + n`.
    pub fn parse(text: &str) -> Result<Self> {
        let coeffs = text
            .split(',')
            .map(|c| c.trim().parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::invalid(format!("bad bound `{text}`")))?;
        if coeffs.is_empty() {
            return Err(Error::invalid("empty bound"));
        }
        Ok(PolyBound(coeffs))
    }
}

/// The language of a CNF grammar described by its derivation trees:
/// `f` is the yield, `d` the Earley count, `D` the declared bound.
pub struct CflDescription {
    grammar: CnfGrammar,
    bound: PolyBound,
    census: Mutex<Option<Arc<TreeCensus<Nat>>>>,
}

impl CflDescription {
    pub fn new(grammar: CnfGrammar, bound: PolyBound) -> Self {
        CflDescription {
            grammar,
            bound,
            census: Mutex::new(None),
        }
    }

    pub fn grammar(&self) -> &CnfGrammar {
        &self.grammar
    }

    /// Tree census covering length `n`, grown geometrically.
    pub fn census(&self, n: usize) -> Arc<TreeCensus<Nat>> {
        let mut slot = self.census.lock().expect("census lock");
        match &*slot {
            Some(c) if c.max_len() >= n => c.clone(),
            old => {
                let len = n.max(old.as_ref().map_or(0, |c| 2 * c.max_len()));
                let fresh = Arc::new(TreeCensus::new(&self.grammar, len));
                *slot = Some(fresh.clone());
                fresh
            }
        }
    }

    /// Checks `d(x) <= D(n)` on every word of length `1..=max_n`.
    pub fn validate(&self, max_n: usize) -> Result<()> {
        for n in 1..=max_n {
            let bound = self.bound.eval(n);
            for x in self.grammar.terminals().words(n) {
                let d = earley_count(&self.grammar, &x);
                if d > Nat::from(bound) {
                    return Err(Error::AmbiguityExceeded {
                        found: d,
                        bound,
                        size: n,
                    });
                }
            }
        }
        Ok(())
    }
}

impl Description for CflDescription {
    type Source = DerivationTree;
    type Target = Word;

    fn sample_source(&self, n: usize, src: &mut CoinSource) -> Result<Option<DerivationTree>> {
        let census = self.census(n);
        Ok(random_tree(&self.grammar, &census, n, 0, src)?.value)
    }

    fn project(&self, t: &DerivationTree) -> Word {
        t.tree_yield()
    }

    fn ambiguity(&self, s: &Word) -> Result<Nat> {
        Ok(earley_count(&self.grammar, s))
    }

    fn bound(&self, n: usize) -> u64 {
        self.bound.eval(n)
    }

    fn source_census(&self, n: usize) -> Option<Nat> {
        if n == 0 {
            return Some(Nat::from(0u32));
        }
        Some(self.census(n).get(self.grammar.start(), n).clone())
    }

    fn enumerate_source(&self, n: usize) -> Option<Vec<DerivationTree>> {
        let census = self.census(n);
        let total = census.get(self.grammar.start(), n).to_u64()?;
        (total <= 1 << 16).then(|| all_trees(&self.grammar, &census, self.grammar.start(), n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::{check_description, estimate_census, exact_count, sample_described};
    use crate::numutil::{condition_on_success, exact_law, rat};
    use std::collections::BTreeSet;

    pub(crate) fn catalan() -> CnfGrammar {
        CnfGrammar::parse("var S\nterm a\nS -> S S | a\n").unwrap()
    }

    fn xy() -> CnfGrammar {
        CnfGrammar::parse("var S X Y\nterm a b\nS -> X Y\nX -> a\nY -> b\n").unwrap()
    }

    /// Concatenations of two nonempty palindromes over {a, b}.
    fn two_palindromes() -> CnfGrammar {
        let text = "var S P\nterm a b\nS -> P P\nP -> a P a | b P b | a a | b b | a | b\n";
        CnfGrammar::parse(text).unwrap()
    }

    /// Every binary tree shape: leaf B has three terminals, leaf C one.
    fn lopsided() -> CnfGrammar {
        CnfGrammar::parse("var S B C\nterm a b c\nS -> B B | C C\nB -> a | b | c\nC -> a\n").unwrap()
    }

    #[test]
    fn catalan_census() {
        let g = catalan();
        let c = TreeCensus::<Nat>::new(&g, 5);
        let got: Vec<Nat> = (1..=5).map(|n| c.get(g.start(), n).clone()).collect();
        assert_eq!(got, [1u32, 1, 2, 5, 14].map(Nat::from));
        let small = TreeCensus::<u64>::new(&g, 5);
        assert_eq!(*small.get(g.start(), 5), 14);
    }

    #[test]
    fn unambiguous_census() {
        let g = xy();
        let c = TreeCensus::<Nat>::new(&g, 4);
        assert_eq!(c.get(g.start(), 2), &Nat::from(1u32));
        assert_eq!(c.get(g.start(), 1), &Nat::from(0u32));
        assert_eq!(c.get(g.start(), 3), &Nat::from(0u32));
    }

    #[test]
    fn tree_yield_and_format() {
        let g = catalan();
        let leaf = DerivationTree::Leaf { var: 0, sym: 0 };
        assert_eq!(leaf.tree_yield(), vec![0]);
        let node = DerivationTree::Node {
            var: 0,
            left: Box::new(leaf.clone()),
            right: Box::new(leaf),
        };
        assert_eq!(node.tree_yield(), vec![0, 0]);
        assert_eq!(node.format(&g), "(S (S a) (S a))");
        assert!(node.is_valid(&g));
    }

    #[test]
    fn unrank_rank_roundtrip_and_search_agreement() {
        let g = two_palindromes();
        let c = TreeCensus::<Nat>::new(&g, 6);
        for l in 1..=6 {
            let total: u64 = c.get(g.start(), l).try_into().unwrap();
            for r in 1..=total {
                let r = Nat::from(r);
                let t = unrank_tree(&g, &c, g.start(), l, &r, SplitSearch::Boustrophedon).unwrap();
                let u = unrank_tree(&g, &c, g.start(), l, &r, SplitSearch::Linear).unwrap();
                assert_eq!(t, u);
                assert!(t.is_valid(&g));
                assert_eq!(t.size(), l);
                assert_eq!(rank_tree(&g, &c, &t), r);
            }
        }
    }

    #[test]
    fn catalan_trees_uniform_at_three() {
        let g = catalan();
        let c = TreeCensus::<Nat>::new(&g, 3);
        let law = exact_law(
            |src| {
                random_tree_with(&g, &c, 3, 2, SplitSearch::default(), src)
                    .unwrap()
                    .value
            },
            1 << 12,
        );
        let (cond, _) = condition_on_success(&law);
        assert_eq!(cond.len(), 2);
        assert!(cond.values().all(|p| *p == rat(1, 2)));
    }

    #[test]
    fn per_node_scheme_skews_lopsided_grammar() {
        let g = lopsided();
        let c = TreeCensus::<Nat>::new(&g, 2);
        assert_eq!(c.get(g.start(), 2), &Nat::from(10u32));
        let law = exact_law(
            |src| {
                random_tree_with(&g, &c, 2, 1, SplitSearch::default(), src)
                    .unwrap()
                    .value
            },
            1 << 14,
        );
        let (cond, _) = condition_on_success(&law);
        assert_eq!(cond.len(), 10);
        assert!(cond.values().all(|p| *p == rat(1, 10)));
        let law = exact_law(|src| random_tree_per_node(&g, &c, 2, 1, src).unwrap().value, 1 << 14);
        let (cond, _) = condition_on_success(&law);
        assert!(cond.values().any(|p| *p != rat(1, 10)));
    }

    #[test]
    fn leaf_slice_by_rank() {
        let g = lopsided();
        let c = TreeCensus::<Nat>::new(&g, 1);
        let trees = all_trees(&g, &c, 1, 1);
        assert_eq!(trees.len(), 3);
        assert_eq!(trees[2], DerivationTree::Leaf { var: 1, sym: 2 });
    }

    #[test]
    fn empty_slice_rejected() {
        let g = xy();
        let c = TreeCensus::<Nat>::new(&g, 3);
        let mut src = CoinSource::from_seed(3);
        assert_eq!(random_tree(&g, &c, 3, 0, &mut src).unwrap_err(), Error::EmptySlice(3));
    }

    #[test]
    fn earley_examples() {
        let g = catalan();
        assert_eq!(earley_count(&g, &[0, 0, 0]), Nat::from(2u32));
        assert_eq!(earley_count(&g, &[0, 0, 0, 0]), Nat::from(5u32));
        let c = TreeCensus::<Nat>::new(&g, 4);
        assert_eq!(&earley_count(&g, &[0; 4]), c.get(0, 4));
        let ab = CnfGrammar::new(
            vec!["S".into()],
            crate::alphabet::Alphabet::letters("ab"),
            0,
            &[(0, 0, 0)],
            &[(0, 0)],
        )
        .unwrap();
        assert_eq!(earley_count(&ab, &[0, 1]), Nat::from(0u32));
    }

    #[test]
    fn earley_matches_leftmost_derivations() {
        for g in [catalan(), xy(), two_palindromes(), lopsided()] {
            let general = g.to_grammar();
            for n in 1..=5 {
                for x in g.terminals().words(n) {
                    assert_eq!(earley_count(&g, &x), general.leftmost_derivations(&x).unwrap());
                }
            }
        }
    }

    #[test]
    fn earley_table_properties() {
        let g = two_palindromes();
        for x in g.terminals().words(5) {
            let t = earley_table(&g, &x);
            assert!(t.one_state_per_item());
            assert!(t.all_marked_below_diagonal());
        }
    }

    #[test]
    fn unambiguous_description_is_uniform() {
        let g = CnfGrammar::parse("var S A B\nterm a b\nS -> A B\nA -> a | b\nB -> a | b\n").unwrap();
        let desc = CflDescription::new(g, PolyBound::constant(1));
        assert_eq!(check_description(&desc, 2).unwrap(), Nat::from(4u32));
        let law = exact_law(|src| sample_described(&desc, 2, src).unwrap().value, 1 << 12);
        let (cond, _) = condition_on_success(&law);
        assert_eq!(cond.len(), 4);
        assert!(cond.values().all(|p| *p == rat(1, 4)));
    }

    #[test]
    fn catalan_guard() {
        let desc = CflDescription::new(catalan(), PolyBound::constant(2));
        desc.validate(3).unwrap();
        assert!(matches!(desc.validate(4), Err(Error::AmbiguityExceeded { .. })));
        let mut src = CoinSource::from_seed(1);
        assert!(matches!(
            sample_described(&desc, 4, &mut src),
            Err(Error::AmbiguityExceeded { .. })
        ));
    }

    #[test]
    fn palindrome_pairs_census() {
        let g = two_palindromes();
        let desc = CflDescription::new(g.clone(), PolyBound(vec![0, 1]));
        desc.validate(8).unwrap();
        let general = g.to_grammar();
        let eps = rat(1, 2);
        for n in [2usize, 5, 8] {
            let truth = g
                .terminals()
                .words(n)
                .into_iter()
                .filter(|x| general.generates(x).unwrap())
                .count();
            let mut src = CoinSource::from_seed(n as u64);
            let est = estimate_census(&desc, n, &eps, &mut src).unwrap().value.unwrap();
            let t = rat(truth as i64, 1);
            assert!(
                est >= &t * (rat(1, 1) - &eps) && est <= &t * (rat(1, 1) + &eps),
                "n={n}"
            );
        }
        let mut src = CoinSource::from_seed(5);
        let exact = exact_count(&desc, 3, &mut src, &Nat::from(1000u32)).unwrap().value;
        assert_eq!(exact, Some(Nat::from(6u32)));
        let members: BTreeSet<Word> = desc
            .enumerate_source(4)
            .unwrap()
            .iter()
            .map(|t| t.tree_yield())
            .collect();
        assert_eq!(members.len(), 14);
    }
}
