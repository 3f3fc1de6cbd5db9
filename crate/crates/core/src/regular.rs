//! Deterministic finite automata: slice census, uniform sampling and
//! rank/unrank in length-then-lexicographic order.

use num_traits::{One, Zero};

use crate::alphabet::Alphabet;
use crate::framework::{Description, SampleReport, WordStructure};
use crate::numutil::{bit_size, ceil_log2, gen_uniform_trials};
use crate::text::lines;
use crate::{CoinSource, Count, Error, Nat, Rat, Result, Symbol, Word};

/// A complete DFA over an ordered alphabet. States are `0..states`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    delta: Vec<Vec<usize>>,
    start: usize,
    finals: Vec<bool>,
    independence: Vec<(Symbol, Symbol)>,
}

/// `C_q(l)`: number of words of length `l` accepted from state `q`, for
/// `l = 0..=n`.
#[derive(Clone, Debug)]
pub struct CensusTable<C> {
    rows: Vec<Vec<C>>,
}

impl<C: Count> CensusTable<C> {
    pub fn get(&self, q: usize, len: usize) -> &C {
        &self.rows[len][q]
    }

    /// Largest length covered.
    pub fn max_len(&self) -> usize {
        self.rows.len() - 1
    }

    /// `b_q(l)`, the bit size of `C_q(l)`; `None` when the count is 0.
    pub fn bits(&self, q: usize, len: usize) -> Option<u64> {
        let c = self.get(q, len).to_nat();
        (!c.is_zero()).then(|| bit_size(&c).expect("nonzero"))
    }

    fn push_row(&mut self, dfa: &Dfa) {
        let prev = self.rows.last().expect("row 0");
        let row = (0..dfa.states())
            .map(|q| {
                let mut acc = C::zero();
                for &p in &dfa.delta[q] {
                    acc += &prev[p];
                }
                acc
            })
            .collect();
        self.rows.push(row);
    }
}

impl Dfa {
    pub fn new(alphabet: Alphabet, delta: Vec<Vec<usize>>, start: usize, finals: &[usize]) -> Result<Self> {
        let states = delta.len();
        if states == 0 {
            return Err(Error::invalid("a DFA needs at least one state"));
        }
        for (q, row) in delta.iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(Error::invalid(format!(
                    "state {q} has {} transitions for {} symbols",
                    row.len(),
                    alphabet.len()
                )));
            }
            if let Some(&p) = row.iter().find(|&&p| p >= states) {
                return Err(Error::invalid(format!("transition to unknown state {p}")));
            }
        }
        if start >= states {
            return Err(Error::invalid(format!("unknown start state {start}")));
        }
        let mut fin = vec![false; states];
        for &f in finals {
            *fin.get_mut(f)
                .ok_or_else(|| Error::invalid(format!("unknown final state {f}")))? = true;
        }
        Ok(Dfa {
            alphabet,
            delta,
            start,
            finals: fin,
            independence: Vec::new(),
        })
    }

    /// The one-state automaton accepting every word.
    pub fn universal(alphabet: Alphabet) -> Self {
        let k = alphabet.len();
        Dfa::new(alphabet, vec![vec![0; k]], 0, &[0]).expect("well formed")
    }

    /// Attaches an independence relation (used by trace languages).
    pub fn with_independence(mut self, pairs: Vec<(Symbol, Symbol)>) -> Self {
        self.independence = pairs;
        self
    }

    /// Text format: `states k`, `alphabet a b ...`, `start i`,
    /// `finals i j ...`, one `trans q a q'` per edge, optional `indep a b`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut states: Option<usize> = None;
        let mut alphabet: Option<Alphabet> = None;
        let mut start = None;
        let mut finals = Vec::new();
        let mut trans = Vec::new();
        let mut indep = Vec::new();
        for line in lines(text) {
            match line.key() {
                "states" => {
                    line.expect_args(1)?;
                    states = Some(line.parse_at(1, "state count")?);
                }
                "alphabet" => {
                    let names = line.words[1..].iter().copied();
                    alphabet = Some(Alphabet::new(names).map_err(|e| line.err(e.to_string()))?);
                }
                "start" => {
                    line.expect_args(1)?;
                    start = Some((line.no, line.parse_at::<usize>(1, "start state")?));
                }
                "finals" => {
                    for i in 1..line.words.len() {
                        finals.push((line.no, line.parse_at::<usize>(i, "final state")?));
                    }
                }
                "trans" => {
                    line.expect_args(3)?;
                    let q: usize = line.parse_at(1, "state")?;
                    let p: usize = line.parse_at(3, "state")?;
                    trans.push((line.no, q, line.words[2].to_string(), p));
                }
                "indep" => {
                    line.expect_args(2)?;
                    indep.push((line.no, line.words[1].to_string(), line.words[2].to_string()));
                }
                other => return Err(line.err(format!("unknown directive `{other}`"))),
            }
        }
        let states = states.ok_or_else(|| Error::parse(0, "missing `states`"))?;
        let alphabet = alphabet.ok_or_else(|| Error::parse(0, "missing `alphabet`"))?;
        let (start_line, start) = start.ok_or_else(|| Error::parse(0, "missing `start`"))?;
        if start >= states {
            return Err(Error::parse(start_line, format!("unknown state {start}")));
        }
        let mut delta = vec![vec![None; alphabet.len()]; states];
        for (no, q, sym, p) in trans {
            let s = alphabet
                .symbol(&sym)
                .ok_or_else(|| Error::parse(no, format!("unknown symbol `{sym}`")))?;
            if q >= states || p >= states {
                return Err(Error::parse(no, format!("state out of range 0..{states}")));
            }
            if delta[q][s].replace(p).is_some() {
                return Err(Error::parse(no, format!("second transition for ({q}, {sym})")));
            }
        }
        let mut total = Vec::with_capacity(states);
        for (q, row) in delta.into_iter().enumerate() {
            let row: Option<Vec<usize>> = row.into_iter().collect();
            total.push(
                row.ok_or_else(|| Error::parse(0, format!("state {q} lacks a transition (the DFA must be total)")))?,
            );
        }
        let mut fin = Vec::new();
        for (no, f) in finals {
            if f >= states {
                return Err(Error::parse(no, format!("unknown state {f}")));
            }
            fin.push(f);
        }
        let mut pairs = Vec::new();
        for (no, a, b) in indep {
            let sa = alphabet
                .symbol(&a)
                .ok_or_else(|| Error::parse(no, format!("unknown symbol `{a}`")))?;
            let sb = alphabet
                .symbol(&b)
                .ok_or_else(|| Error::parse(no, format!("unknown symbol `{b}`")))?;
            if sa == sb {
                return Err(Error::parse(no, "independence must be irreflexive"));
            }
            pairs.push((sa, sb));
        }
        Ok(Dfa::new(alphabet, total, start, &fin)?.with_independence(pairs))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&self) -> usize {
        self.delta.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn step(&self, q: usize, s: Symbol) -> usize {
        self.delta[q][s]
    }

    pub fn independence(&self) -> &[(Symbol, Symbol)] {
        &self.independence
    }

    pub fn run(&self, from: usize, w: &[Symbol]) -> usize {
        w.iter().fold(from, |q, &s| self.step(q, s))
    }

    pub fn accepts(&self, w: &[Symbol]) -> bool {
        self.finals[self.run(self.start, w)]
    }

    /// Census table up to length `n`.
    pub fn census<C: Count>(&self, n: usize) -> CensusTable<C> {
        let row0 = self
            .finals
            .iter()
            .map(|&f| if f { C::one() } else { C::zero() })
            .collect();
        let mut table = CensusTable { rows: vec![row0] };
        for _ in 0..n {
            table.push_row(self);
        }
        table
    }

    /// `C_{q0}(n)`, the size of the length-`n` slice.
    pub fn count(&self, n: usize) -> Nat {
        self.census::<Nat>(n).get(self.start, n).clone()
    }

    /// Whether `L` is finite: no member has length in `|Q|..2|Q|`.
    pub fn is_finite(&self) -> bool {
        let k = self.states();
        let table = self.census::<Nat>(2 * k);
        (k..2 * k).all(|l| table.get(self.start, l).is_zero())
    }

    /// `|L|` for a finite language.
    pub fn size(&self) -> Option<Nat> {
        if !self.is_finite() {
            return None;
        }
        let k = self.states();
        let table = self.census::<Nat>(k);
        Some((0..k).map(|l| table.get(self.start, l).clone()).sum())
    }

    /// Uniform word of `L` of length `n`: one rejection draw of a slice
    /// rank with `kappa = t + ceil(log n)` trials, then the per-position
    /// prefix-sum walk. Failure is at most `1 / 2^kappa <= n / 2^kappa`.
    pub fn sample(&self, n: usize, t: u64, src: &mut CoinSource) -> Result<SampleReport<Word>> {
        let table = self.census::<Nat>(n);
        self.sample_with(&table, n, t, src)
    }

    pub fn sample_with(
        &self,
        table: &CensusTable<Nat>,
        n: usize,
        t: u64,
        src: &mut CoinSource,
    ) -> Result<SampleReport<Word>> {
        let kappa = t + ceil_log2(&Rat::from_integer(n.max(1).into()));
        self.sample_kappa(table, n, kappa, src)
    }

    /// [`sample`](Self::sample) with an explicit trial count.
    ///
    /// The walk reuses the residue of the single rank at every position
    /// instead of drawing afresh per state: fresh draws fail with a
    /// probability that depends on `C_q(l)`, which skews the law
    /// conditioned on success.
    pub fn sample_kappa(
        &self,
        table: &CensusTable<Nat>,
        n: usize,
        kappa: u64,
        src: &mut CoinSource,
    ) -> Result<SampleReport<Word>> {
        let size = table.get(self.start, n);
        if size.is_zero() {
            return Err(Error::EmptySlice(n));
        }
        let start_bits = src.bits_consumed();
        let value = match gen_uniform_trials(src, size, kappa)? {
            Some(r) => Some(self.unrank_slice_with(table, n, &r)?),
            None => None,
        };
        Ok(SampleReport {
            value,
            trials_used: 1,
            bits_used: src.bits_consumed() - start_bits,
        })
    }

    /// The paper-literal walk: a fresh rejection draw in `{1..C_q(l)}` at
    /// every position. Kept for comparison; its law conditioned on success
    /// is uniform only when all visited counts fail alike.
    pub fn sample_per_step(
        &self,
        table: &CensusTable<Nat>,
        n: usize,
        kappa: u64,
        src: &mut CoinSource,
    ) -> Result<SampleReport<Word>> {
        if table.get(self.start, n).is_zero() {
            return Err(Error::EmptySlice(n));
        }
        let start_bits = src.bits_consumed();
        let mut q = self.start;
        let mut word = Vec::with_capacity(n);
        let mut steps = 0;
        for len in (1..=n).rev() {
            steps += 1;
            let Some(r) = gen_uniform_trials(src, table.get(q, len), kappa)? else {
                return Ok(SampleReport {
                    value: None,
                    trials_used: steps,
                    bits_used: src.bits_consumed() - start_bits,
                });
            };
            let mut acc = Nat::zero();
            let s = (0..self.alphabet.len())
                .find(|&s| {
                    acc += table.get(self.step(q, s), len - 1);
                    acc >= r
                })
                .expect("r within C_q(len)");
            word.push(s);
            q = self.step(q, s);
        }
        Ok(SampleReport {
            value: Some(word),
            trials_used: steps,
            bits_used: src.bits_consumed() - start_bits,
        })
    }

    /// Rank of `w` among the length-`|w|` members, 1-based and reflexive:
    /// members `<= w` in lexicographic order.
    pub fn slice_rank(&self, w: &[Symbol]) -> Nat {
        let n = w.len();
        let table = self.census::<Nat>(n);
        self.slice_rank_with(&table, w)
    }

    fn slice_rank_with(&self, table: &CensusTable<Nat>, w: &[Symbol]) -> Nat {
        let n = w.len();
        let mut q = self.start;
        let mut r = Nat::zero();
        for (i, &c) in w.iter().enumerate() {
            for s in 0..c {
                r += table.get(self.step(q, s), n - i - 1);
            }
            q = self.step(q, c);
        }
        if self.finals[q] {
            r += 1u32;
        }
        r
    }

    /// `r_L(w)`: members shorter than `w` plus members of the same length
    /// lexicographically `<= w`. 1-based on members.
    pub fn rank(&self, w: &[Symbol]) -> Nat {
        let n = w.len();
        let table = self.census::<Nat>(n);
        let shorter: Nat = (0..n).map(|l| table.get(self.start, l).clone()).sum();
        shorter + self.slice_rank_with(&table, w)
    }

    /// The member of length `n` with slice rank `r`.
    pub fn unrank_slice_with(&self, table: &CensusTable<Nat>, n: usize, r: &Nat) -> Result<Word> {
        let size = table.get(self.start, n);
        if r.is_zero() || r > size {
            return Err(Error::RankOutOfRange {
                rank: r.clone(),
                size: size.clone(),
            });
        }
        let mut r = r.clone();
        let mut q = self.start;
        let mut word = Vec::with_capacity(n);
        for i in 0..n {
            let rest = n - i - 1;
            let mut chosen = None;
            for s in 0..self.alphabet.len() {
                let c = table.get(self.step(q, s), rest);
                if &r <= c {
                    chosen = Some(s);
                    break;
                }
                r -= c;
            }
            let s = chosen.expect("rank within slice");
            word.push(s);
            q = self.step(q, s);
        }
        Ok(word)
    }

    /// The member of `L` with rank `k`, `k >= 1`.
    pub fn unrank(&self, k: &Nat) -> Result<Word> {
        if k.is_zero() {
            return Err(Error::invalid("ranks start at 1"));
        }
        if let Some(size) = self.size() {
            if k > &size {
                return Err(Error::RankOutOfRange { rank: k.clone(), size });
            }
        }
        let mut table = self.census::<Nat>(0);
        let mut rest = k.clone();
        let mut len = 0;
        loop {
            let c = table.get(self.start, len).clone();
            if rest <= c {
                return self.unrank_slice_with(&table, len, &rest);
            }
            rest -= c;
            len += 1;
            table.push_row(self);
        }
    }

    /// Members of length `n` in lexicographic order (brute force).
    pub fn slice_members(&self, n: usize) -> Vec<Word> {
        self.alphabet.words(n).into_iter().filter(|w| self.accepts(w)).collect()
    }
}

impl WordStructure for Dfa {
    fn census(&self, n: usize) -> Nat {
        self.count(n)
    }

    fn contains(&self, w: &[usize]) -> bool {
        w.iter().all(|&s| s < self.alphabet.len()) && self.accepts(w)
    }

    fn unrank_slice(&self, n: usize, r: &Nat) -> Result<Word> {
        let table = self.census::<Nat>(n);
        self.unrank_slice_with(&table, n, r)
    }
}

/// The identity description of a regular language: `T = S = L`, `d = 1`,
/// driven by the per-state sampler with confidence `t`.
pub struct DfaWords<'a> {
    pub dfa: &'a Dfa,
    pub t: u64,
}

impl Description for DfaWords<'_> {
    type Source = Word;
    type Target = Word;

    fn sample_source(&self, n: usize, src: &mut CoinSource) -> Result<Option<Word>> {
        Ok(self.dfa.sample(n, self.t, src)?.value)
    }

    fn project(&self, t: &Word) -> Word {
        t.clone()
    }

    fn ambiguity(&self, s: &Word) -> Result<Nat> {
        Ok(if self.dfa.accepts(s) { Nat::one() } else { Nat::zero() })
    }

    fn bound(&self, _n: usize) -> u64 {
        1
    }

    fn source_census(&self, n: usize) -> Option<Nat> {
        Some(self.dfa.count(n))
    }

    fn enumerate_source(&self, n: usize) -> Option<Vec<Word>> {
        (n <= 16).then(|| self.dfa.slice_members(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numutil::{condition_on_success, exact_law, rat};

    pub(crate) fn ab_star() -> Dfa {
        // (ab)*: 0 -a-> 1 -b-> 0, everything else to the sink 2
        Dfa::new(
            Alphabet::letters("ab"),
            vec![vec![1, 2], vec![2, 0], vec![2, 2]],
            0,
            &[0],
        )
        .unwrap()
    }

    fn cd_star() -> Dfa {
        Dfa::new(
            Alphabet::letters("cd"),
            vec![vec![1, 2], vec![2, 1], vec![2, 2]],
            0,
            &[1],
        )
        .unwrap()
    }

    fn w(d: &Dfa, s: &str) -> Word {
        d.alphabet().parse_word(s).unwrap()
    }

    /// Members of length <= max_len in length-lex order.
    fn members_oracle(d: &Dfa, max_len: usize) -> Vec<Word> {
        (0..=max_len).flat_map(|n| d.slice_members(n)).collect()
    }

    #[test]
    fn census_examples() {
        assert_eq!(ab_star().count(4), Nat::from(1u32));
        assert_eq!(ab_star().count(3), Nat::zero());
        assert_eq!(Dfa::universal(Alphabet::letters("ab")).count(3), Nat::from(8u32));
        assert_eq!(cd_star().count(5), Nat::from(1u32));
    }

    #[test]
    fn generic_census_agrees() {
        let d = Dfa::universal(Alphabet::letters("abc"));
        let t64 = d.census::<u64>(10);
        let tbig = d.census::<Nat>(10);
        for l in 0..=10 {
            assert_eq!(Nat::from(*t64.get(0, l)), *tbig.get(0, l));
        }
        assert_eq!(*t64.get(0, 10), 59049);
        assert_eq!(t64.bits(0, 2), Some(4));
    }

    #[test]
    fn census_matches_brute_force() {
        for d in [ab_star(), cd_star()] {
            for n in 0..=10 {
                assert_eq!(d.count(n), Nat::from(d.slice_members(n).len()));
            }
        }
    }

    #[test]
    fn singleton_slice_sample() {
        let d = ab_star();
        let mut src = CoinSource::from_seed(7);
        let r = d.sample(2, 3, &mut src).unwrap();
        assert_eq!(r.value, Some(w(&d, "ab")));
    }

    #[test]
    fn empty_slice() {
        let d = ab_star();
        let mut src = CoinSource::from_seed(7);
        assert_eq!(d.sample(3, 3, &mut src).unwrap_err(), Error::EmptySlice(3));
    }

    #[test]
    fn all_words_uniform_by_enumeration() {
        let d = Dfa::universal(Alphabet::letters("ab"));
        let table = d.census::<Nat>(3);
        let law = exact_law(|src| d.sample_kappa(&table, 3, 2, src).unwrap().value, 1 << 12);
        let (cond, fail) = condition_on_success(&law);
        assert_eq!(fail, rat(0, 1));
        assert_eq!(cond.len(), 8);
        assert!(cond.values().all(|p| *p == rat(1, 8)));
    }

    /// After `a` three continuations remain, after `b` one: per-step draws
    /// fail only on the `a` branch.
    fn lopsided() -> Dfa {
        // 0 -a-> 1 (any symbol then accept), 0 -b-> 2 (only a), 3 final, 4 sink
        let delta = vec![
            vec![1, 2, 4],
            vec![3, 3, 3],
            vec![3, 4, 4],
            vec![4, 4, 4],
            vec![4, 4, 4],
        ];
        Dfa::new(Alphabet::letters("abc"), delta, 0, &[3]).unwrap()
    }

    #[test]
    fn rank_walk_uniform_where_per_step_is_not() {
        let d = lopsided();
        let table = d.census::<Nat>(2);
        assert_eq!(table.get(0, 2), &Nat::from(4u32));
        let law = exact_law(|src| d.sample_kappa(&table, 2, 1, src).unwrap().value, 1 << 12);
        let (cond, _) = condition_on_success(&law);
        assert_eq!(cond.len(), 4);
        assert!(cond.values().all(|p| *p == rat(1, 4)));
        let law = exact_law(|src| d.sample_per_step(&table, 2, 1, src).unwrap().value, 1 << 12);
        let (cond, _) = condition_on_success(&law);
        // a-words: (3/4)(3/4)(1/3) each, ba: 1/4
        assert_eq!(cond[&w(&d, "ba")], rat(4, 13));
    }

    #[test]
    fn rank_examples() {
        let all = Dfa::universal(Alphabet::letters("ab"));
        assert_eq!(all.rank(&[]), Nat::from(1u32));
        assert_eq!(all.rank(&w(&all, "b")), Nat::from(3u32));
        let cd = cd_star();
        assert_eq!(cd.rank(&w(&cd, "cdd")), Nat::from(3u32));
    }

    #[test]
    fn unrank_examples() {
        let all = Dfa::universal(Alphabet::letters("ab"));
        assert_eq!(all.unrank(&Nat::from(3u32)).unwrap(), w(&all, "b"));
        let cd = cd_star();
        assert_eq!(cd.unrank(&Nat::from(1u32)).unwrap(), w(&cd, "c"));
        let single = Dfa::new(
            Alphabet::letters("ab"),
            vec![vec![1, 3], vec![3, 2], vec![3, 3], vec![3, 3]],
            0,
            &[2],
        )
        .unwrap();
        assert_eq!(single.size(), Some(Nat::from(1u32)));
        assert!(matches!(
            single.unrank(&Nat::from(2u32)),
            Err(Error::RankOutOfRange { .. })
        ));
    }

    #[test]
    fn rank_matches_oracle_and_roundtrips() {
        for d in [ab_star(), cd_star(), Dfa::universal(Alphabet::letters("ab"))] {
            let members = members_oracle(&d, 6);
            for (i, m) in members.iter().enumerate() {
                assert_eq!(d.rank(m), Nat::from(i + 1));
                assert_eq!(&d.unrank(&Nat::from(i + 1)).unwrap(), m);
            }
        }
    }

    #[test]
    fn non_member_rank_counts_smaller_members() {
        let d = ab_star();
        // members up to length 2: ε, ab; "ba" sorts after "ab"
        assert_eq!(d.rank(&w(&d, "ba")), Nat::from(2u32));
        assert_eq!(d.rank(&w(&d, "aa")), Nat::from(1u32));
    }

    #[test]
    fn parse_format() {
        let text = "states 3\nalphabet a b\nstart 0\nfinals 0\n\
                    trans 0 a 1\ntrans 0 b 2\ntrans 1 a 2\ntrans 1 b 0\ntrans 2 a 2\ntrans 2 b 2\n";
        assert_eq!(Dfa::parse(text).unwrap(), ab_star());
        let bad = "states 1\nalphabet a\nstart 0\ntrans 0 z 0\n";
        assert!(matches!(Dfa::parse(bad), Err(Error::Parse { line: 4, .. })));
        let partial = "states 2\nalphabet a\nstart 0\ntrans 0 a 1\n";
        assert!(Dfa::parse(partial).is_err());
    }

    #[test]
    fn identity_description_is_unambiguous() {
        let d = ab_star();
        let desc = DfaWords { dfa: &d, t: 3 };
        assert_eq!(crate::framework::check_description(&desc, 4).unwrap(), Nat::one());
        let mut src = CoinSource::from_seed(3);
        let est = crate::framework::estimate_census(&desc, 4, &rat(1, 2), &mut src).unwrap();
        assert_eq!(est.value, Some(rat(1, 1)));
    }
}
