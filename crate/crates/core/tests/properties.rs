use std::collections::BTreeSet;

use ambigen::alphabet::Alphabet;
use ambigen::cfl::PolyBound;
use ambigen::cfl::{earley_count, earley_table, rank_tree, unrank_tree, CnfGrammar, SplitSearch, TreeCensus};
use ambigen::framework::{
    amplify_urg, check_description, mean_inverse_ambiguity, sample_described_with, DnfDescription, DnfFormula,
    FiniteWords, Product, ProductMode, Union,
};
use ambigen::numutil::{bit_size, condition_on_success, exact_law, gen_uniform, gen_uniform_trials};
use ambigen::pseudobool::{
    brute_permanent, eg_solve, fraction_parts, local_search, max_sat, msf_coefficient, Circuit, CircuitBuilder,
    Matrix01,
};
use ambigen::rankauto::{brute_power_sum, brute_rank_slice, lifted_power_sum, Nfa, QPoly};
use ambigen::regular::Dfa;
use ambigen::traces::{count_representatives, normal_form, swap_closure, IndepAlphabet, TraceDescription};
use ambigen::{CoinSource, Description, Error, Nat, Rat, Word};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rat(a: i64, b: i64) -> Rat {
    Rat::new(BigInt::from(a), BigInt::from(b))
}

fn arb_dfa(letters: &'static str) -> impl Strategy<Value = Dfa> {
    let k = letters.len();
    (1..=4usize).prop_flat_map(move |states| {
        (
            prop::collection::vec(prop::collection::vec(0..states, k), states),
            prop::collection::vec(any::<bool>(), states),
        )
            .prop_map(move |(delta, fin)| {
                let finals: Vec<usize> = (0..fin.len()).filter(|&q| fin[q]).collect();
                Dfa::new(Alphabet::letters(letters), delta, 0, &finals).unwrap()
            })
    })
}

/// Random two-letter automaton; the declared ambiguity is the maximum
/// path count seen on words of length at most 4.
fn arb_nfa() -> impl Strategy<Value = Nfa> {
    (1..=3usize).prop_flat_map(|dim| {
        (
            prop::collection::vec((0..dim, 0..2usize, 0..dim), 0..=6),
            prop::collection::vec(any::<bool>(), dim),
            prop::collection::vec(any::<bool>(), dim),
        )
            .prop_map(move |(edges, st, fi)| {
                let starts: Vec<usize> = (0..dim).filter(|&q| st[q]).collect();
                let finals: Vec<usize> = (0..dim).filter(|&q| fi[q]).collect();
                let sigma = Alphabet::letters("ab");
                let probe = Nfa::from_edges(sigma.clone(), dim, &starts, &finals, &edges, 1).unwrap();
                let d = (0..=4)
                    .flat_map(|n| sigma.words(n))
                    .map(|w| probe.path_count(&w))
                    .max()
                    .unwrap_or_default();
                let d = usize::try_from(d).unwrap_or(usize::MAX).max(1);
                Nfa::from_edges(sigma, dim, &starts, &finals, &edges, d).unwrap()
            })
    })
}

fn arb_grammar() -> impl Strategy<Value = CnfGrammar> {
    (1..=3usize).prop_flat_map(|vars| {
        (
            prop::collection::btree_set((0..vars, 0..vars, 0..vars), 0..=4),
            prop::collection::btree_set((0..vars, 0..2usize), 1..=3),
        )
            .prop_map(move |(bin, un)| {
                let names = (0..vars).map(|i| format!("V{i}")).collect();
                let bin: Vec<_> = bin.into_iter().collect();
                let un: Vec<_> = un.into_iter().collect();
                CnfGrammar::new(names, Alphabet::letters("ab"), 0, &bin, &un).unwrap()
            })
    })
}

fn arb_dnf() -> impl Strategy<Value = DnfDescription> {
    (1..=3usize).prop_flat_map(|n| {
        let lit = (1..=n as i64, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
        prop::collection::vec(prop::collection::vec(lit, 1..=2), 1..=3).prop_filter_map("contradictory", move |cs| {
            DnfFormula::new(n, &cs).ok().and_then(|f| DnfDescription::new(f).ok())
        })
    })
}

fn arb_words(letters: &'static str, max_len: usize) -> impl Strategy<Value = Vec<Word>> {
    let k = letters.len();
    prop::collection::vec(prop::collection::vec(0..k, 0..=max_len), 0..6)
}

/// Random circuit over `n` inputs. With `square_free` a product only joins
/// operands of disjoint support, so the polynomial has no squares.
fn build_circuit(n: usize, ops: &[(bool, usize, usize)], square_free: bool) -> Circuit {
    let mut b = CircuitBuilder::new(n);
    let mut nodes: Vec<(usize, u32)> = (0..n).map(|k| (b.input(k), 1 << k)).collect();
    nodes.push((b.constant(-1), 0));
    nodes.push((b.constant(1), 0));
    for &(is_mul, i, j) in ops {
        let (x, sx) = nodes[i % nodes.len()];
        let (y, sy) = nodes[j % nodes.len()];
        if is_mul {
            if square_free && sx & sy != 0 {
                continue;
            }
            nodes.push((b.mul(vec![x, y]), sx | sy));
        } else {
            nodes.push((b.add(vec![x, y]), sx | sy));
        }
    }
    let out = nodes.last().unwrap().0;
    b.finish(out)
}

fn arb_ops() -> impl Strategy<Value = Vec<(bool, usize, usize)>> {
    prop::collection::vec((any::<bool>(), 0..64usize, 0..64usize), 1..=10)
}

fn monomials(n: usize) -> Vec<Vec<u32>> {
    (0..1u32 << n).map(|m| (0..n).map(|i| m >> i & 1).collect()).collect()
}

// ---------------------------------------------------------------- numutil

#[test]
fn gen_uniform_exact_for_small_n() {
    for n in 1..=16u32 {
        for trials in 1..=3 {
            let law = exact_law(|src| gen_uniform_trials(src, &Nat::from(n), trials).unwrap(), 1 << 12);
            let (cond, _) = condition_on_success(&law);
            assert_eq!(cond.len(), n as usize);
            assert!(cond.values().all(|p| *p == rat(1, n as i64)), "N={n}");
        }
        for delta in [rat(1, 2), rat(1, 4), rat(1, 8)] {
            let law = exact_law(|src| gen_uniform(src, &Nat::from(n), &delta).unwrap(), 1 << 12);
            let (_, fail) = condition_on_success(&law);
            assert!(fail < delta, "N={n} delta={delta}");
        }
    }
}

proptest! {
    #[test]
    fn bit_size_brackets(n in 2u64..1 << 40) {
        let b = bit_size(&Nat::from(n)).unwrap() as u32;
        prop_assert!(1u128 << (b - 1) < n as u128 && n as u128 <= 1u128 << b);
    }

    #[test]
    fn seeded_draws_repeat(seed in any::<u64>(), widths in prop::collection::vec(0u64..70, 1..8)) {
        let run = || {
            let mut src = CoinSource::from_seed(seed);
            let draws: Vec<Nat> = widths.iter().map(|&w| src.draw_bits(w)).collect();
            (draws, src.bits_consumed())
        };
        prop_assert_eq!(run(), run());
    }
}

// ---------------------------------------------------------------- framework

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn described_sampler_is_uniform(d in arb_dnf()) {
        let n = d.formula().vars();
        let size = check_description(&d, n).unwrap();
        prop_assume!(size <= Nat::from(8u32) && d.bound(n) <= 4);
        let law = exact_law(|src| sample_described_with(&d, n, src, Some(1)).unwrap().value, 1 << 16);
        let (cond, _) = condition_on_success(&law);
        prop_assert_eq!(Nat::from(cond.len()), size.clone());
        let p = Rat::new(BigInt::one(), size.into());
        prop_assert!(cond.values().all(|q| *q == p));
    }

    #[test]
    fn mean_inverse_ambiguity_is_census_ratio(d in arb_dnf()) {
        let n = d.formula().vars();
        let cs = check_description(&d, n).unwrap();
        let ct = d.source_census(n).unwrap();
        let mean = mean_inverse_ambiguity(&d, n).unwrap();
        prop_assert_eq!(mean, Rat::new(cs.into(), ct.into()));
    }

    #[test]
    fn amplification_keeps_the_law(d in arb_dnf()) {
        let n = d.formula().vars();
        prop_assume!(n <= 2);
        let base = exact_law(|src| sample_described_with(&d, n, src, Some(1)).unwrap().value, 1 << 16);
        let amplified = exact_law(
            |src| {
                amplify_urg(|s| Ok(sample_described_with(&d, n, s, Some(1))?.value), &rat(1, 2), &rat(1, 4), src)
                    .unwrap()
                    .value
            },
            1 << 20,
        );
        prop_assert_eq!(condition_on_success(&base).0, condition_on_success(&amplified).0);
    }

    #[test]
    fn union_and_product_census(s in arb_words("ab", 3), t in arb_words("ab", 3)) {
        let count = |ws: &[Word], n: usize| ws.iter().collect::<BTreeSet<_>>().iter().filter(|w| w.len() == n).count();
        for n in 0..=3 {
            let u = Union::new(FiniteWords::new(s.clone()), FiniteWords::new(t.clone()));
            prop_assert_eq!(u.census(n), Nat::from(count(&s, n) + count(&t, n)));
            let both: Vec<Word> = s.iter().chain(&t).cloned().collect();
            if u.census(n) > Nat::zero() {
                prop_assert_eq!(check_description(&u, n).unwrap(), Nat::from(count(&both, n)));
            }
            let p = Product::new(FiniteWords::new(s.clone()), FiniteWords::new(t.clone()), ProductMode::Graded);
            let graded: usize = (0..=n).map(|k| count(&s, k) * count(&t, n - k)).sum();
            prop_assert_eq!(p.census(n), Nat::from(graded));
            if graded > 0 {
                let concat: Vec<Word> = s.iter().flat_map(|x| t.iter().map(move |y| [x.clone(), y.clone()].concat())).collect();
                prop_assert_eq!(check_description(&p, n).unwrap(), Nat::from(count(&concat, n)));
            }
        }
    }
}

// ---------------------------------------------------------------- regular

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dfa_rank_properties(a in arb_dfa("ab")) {
        for n in 0..=8 {
            prop_assert_eq!(a.count(n), Nat::from(a.slice_members(n).len()));
        }
        let mut prev = Nat::zero();
        let mut shorter = Nat::zero();
        for n in 0..=6 {
            for w in a.alphabet().words(n) {
                let r = a.rank(&w);
                prop_assert!(r >= prev, "rank not monotone");
                prev = r.clone();
                prop_assert_eq!(a.slice_rank(&w), &r - &shorter);
                if a.accepts(&w) {
                    prop_assert_eq!(a.unrank(&r).unwrap(), w);
                }
            }
            shorter += a.count(n);
        }
    }
}

// ---------------------------------------------------------------- rankauto

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kronecker_identities(a in arb_nfa()) {
        let d = a.ambiguity_bound();
        prop_assume!(d <= 3);
        let q = QPoly::build(d).unwrap();
        for n in 0..=4 {
            for k in 1..=3 {
                prop_assert_eq!(lifted_power_sum(&a, n, k), brute_power_sum(&a, n, k as u32));
            }
            let words = a.alphabet().words(n);
            let accepted = words.iter().filter(|w| !a.path_count(w).is_zero()).count();
            let via_q: Rat = words.iter().map(|w| q.eval(&Rat::from_integer(a.path_count(w).into()))).sum();
            prop_assert_eq!(via_q, rat(accepted as i64, 1));
            let ranker = a.slice_ranker(n, 1 << 12).unwrap();
            let mut prev = Nat::zero();
            for w in &words {
                let r = ranker.rank(w).unwrap();
                prop_assert_eq!(&r, &brute_rank_slice(&a, w));
                prop_assert!(r >= prev);
                if !a.path_count(w).is_zero() {
                    prop_assert_eq!(&ranker.unrank(&r).unwrap(), w);
                }
                prev = r;
            }
        }
    }

    #[test]
    fn lift_guard(a in arb_nfa()) {
        let d = a.ambiguity_bound() as u32;
        let lifted = (a.dim() as u64).checked_pow(d).unwrap_or(u64::MAX);
        prop_assume!(lifted > 1 && lifted <= 64);
        let refused = a.slice_ranker(2, lifted as usize - 1);
        prop_assert!(matches!(refused, Err(Error::SizeGuard(_))), "{:?}", refused.err());
        prop_assert!(a.slice_ranker(2, lifted as usize).is_ok());
    }
}

// ---------------------------------------------------------------- cfl

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn earley_agrees(g in arb_grammar()) {
        let lm = g.to_grammar();
        let census = TreeCensus::<Nat>::new(&g, 6);
        for n in 1..=6 {
            let mut total = Nat::zero();
            for x in g.terminals().words(n) {
                let c = earley_count(&g, &x);
                if n <= 4 {
                    prop_assert_eq!(&c, &lm.leftmost_derivations(&x).unwrap());
                    prop_assert!(earley_table(&g, &x).one_state_per_item());
                }
                total += c;
            }
            prop_assert_eq!(&total, census.get(g.start(), n));
        }
    }

    #[test]
    fn split_searches_agree(g in arb_grammar()) {
        let census = TreeCensus::<Nat>::new(&g, 5);
        for n in 1..=5 {
            let size = census.get(g.start(), n).clone();
            prop_assume!(size <= Nat::from(2000u32));
            let mut r = Nat::one();
            while r <= size {
                let a = unrank_tree(&g, &census, g.start(), n, &r, SplitSearch::Boustrophedon).unwrap();
                let b = unrank_tree(&g, &census, g.start(), n, &r, SplitSearch::Linear).unwrap();
                prop_assert_eq!(&a, &b);
                prop_assert_eq!(&rank_tree(&g, &census, &a), &r);
                r += 1u32;
            }
        }
    }
}

// ---------------------------------------------------------------- traces

fn indep(mask: u8) -> IndepAlphabet {
    let pairs: Vec<(usize, usize)> = [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, p)| p)
        .collect();
    IndepAlphabet::new(Alphabet::letters("abc"), &pairs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_is_a_class_invariant(x in prop::collection::vec(0..3usize, 0..=7), mask in 0u8..8) {
        let a = indep(mask);
        let nf = normal_form(&x, &a);
        let class = swap_closure(&x, &a, 1 << 16).unwrap();
        prop_assert_eq!(class.iter().next(), Some(&nf));
        for y in &class {
            prop_assert_eq!(&normal_form(y, &a), &nf);
        }
    }

    #[test]
    fn traces_partition_the_slice(l in arb_dfa("abc"), mask in 0u8..8) {
        let a = indep(mask);
        let desc = TraceDescription::new(l.clone(), a.clone(), PolyBound::constant(1)).unwrap();
        for n in 0..=5 {
            let mut total = Nat::zero();
            for t in desc.traces(n) {
                let c = count_representatives(&l, t.rep(), &a).unwrap();
                let brute = swap_closure(t.rep(), &a, 1 << 16).unwrap().iter().filter(|y| l.accepts(y)).count();
                prop_assert_eq!(&c, &Nat::from(brute));
                total += c;
            }
            prop_assert_eq!(total, l.count(n));
        }
    }
}

// ---------------------------------------------------------------- pseudobool

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn msf_coefficient_matches_expansion(n in 1..=6usize, ops in arb_ops()) {
        let c = build_circuit(n, &ops, true);
        let p = c.expand(false, 1 << 16).unwrap();
        prop_assert!(p.is_square_free());
        for m in monomials(n) {
            prop_assert_eq!(msf_coefficient(&c, &m), p.coeff(&m));
        }
    }

    #[test]
    fn msf_of_general_circuits(n in 1..=4usize, ops in arb_ops()) {
        let c = build_circuit(n, &ops, false);
        let q = c.expand(true, 1 << 16).unwrap();
        prop_assert_eq!(&q, &c.expand(false, 1 << 16).unwrap().msf());
        let folded = q.to_circuit();
        for m in monomials(n) {
            prop_assert_eq!(msf_coefficient(&folded, &m), q.coeff(&m));
        }
    }

    #[test]
    fn fraction_parts_recover_the_permanent(n in 1..=4usize, bits in any::<u32>()) {
        let rows = (0..n).map(|i| (0..n).map(|j| bits >> (i * n + j) & 1 == 1).collect()).collect();
        let a = Matrix01::new(rows).unwrap();
        let (_, frac, perm) = fraction_parts(&a).unwrap();
        let s = n * n;
        prop_assert_eq!(frac * Rat::from_integer(BigInt::one() << s), Rat::from_integer(perm.clone().into()));
        prop_assert_eq!(perm, brute_permanent(&a));
    }

    #[test]
    fn local_search_is_idempotent(
        n in 3..=8usize,
        raw in prop::collection::vec((0..8usize, 0..8usize, 0..8usize, any::<u8>()), 1..=8),
        h in 1..=2usize,
    ) {
        let clauses: Vec<Vec<i64>> = raw
            .iter()
            .map(|&(a, b, c, s)| {
                [a, b, c].iter().enumerate().map(|(i, &v)| {
                    let v = (v % n) as i64 + 1;
                    if s >> i & 1 == 1 { v } else { -v }
                }).collect()
            })
            .collect();
        let Ok(p) = max_sat(n, &clauses) else { return Ok(()) };
        let r = eg_solve(&p, h).unwrap();
        let again = local_search(&p, h, &r.result.assignment).unwrap();
        prop_assert_eq!(again.assignment, r.result.assignment);
    }
}
