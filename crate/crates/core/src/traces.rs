//! Trace languages over an independence alphabet.
//!
//! Letter occurrences of a word `x` are partially ordered by dependence
//! (`i < j` with `x_i, x_j` dependent). Words equivalent to `x` are the
//! linearizations of that order, and since equal letters are dependent a
//! down-set is just a count of consumed occurrences per letter.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_traits::{One, Zero};

use crate::alphabet::Alphabet;
use crate::cfl::PolyBound;
use crate::framework::{estimate_census, sample_described, Description, Measured};
use crate::regular::Dfa;
use crate::{CoinSource, Error, Nat, Rat, Result, SampleReport, Symbol, Word};

/// Longest word the DP accepts.
pub const MAX_TRACE_LEN: usize = 256;
/// Most down-sets (times automaton states) kept in one layer.
pub const MAX_LAYER: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndepAlphabet {
    alphabet: Alphabet,
    indep: Vec<Vec<bool>>,
}

impl IndepAlphabet {
    /// Pairs are symmetrized; a pair `(a, a)` is an error.
    pub fn new(alphabet: Alphabet, pairs: &[(Symbol, Symbol)]) -> Result<Self> {
        let k = alphabet.len();
        let mut indep = vec![vec![false; k]; k];
        for &(a, b) in pairs {
            if a >= k || b >= k {
                return Err(Error::invalid("independence pair out of range"));
            }
            if a == b {
                return Err(Error::invalid("independence must be irreflexive"));
            }
            indep[a][b] = true;
            indep[b][a] = true;
        }
        Ok(IndepAlphabet { alphabet, indep })
    }

    /// The alphabet and `indep` lines of an automaton.
    pub fn of_dfa(dfa: &Dfa) -> Result<Self> {
        IndepAlphabet::new(dfa.alphabet().clone(), dfa.independence())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn independent(&self, a: Symbol, b: Symbol) -> bool {
        self.indep[a][b]
    }

    /// Whether `I` is transitive (then every class is a rearrangement of
    /// commuting blocks and `d = 1` is expected).
    pub fn is_transitive(&self) -> bool {
        let k = self.alphabet.len();
        (0..k).all(|a| {
            (0..k).all(|b| (0..k).all(|c| a == c || !self.indep[a][b] || !self.indep[b][c] || self.indep[a][c]))
        })
    }
}

/// A trace, held by its lexicographically least representative.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trace(Word);

impl Trace {
    pub fn of(x: &[Symbol], a: &IndepAlphabet) -> Self {
        Trace(normal_form(x, a))
    }

    pub fn rep(&self) -> &Word {
        &self.0
    }
}

impl Measured for Trace {
    fn size(&self) -> usize {
        self.0.len()
    }
}

/// Occurrence structure of `x`: which letter may be taken next from a
/// down-set.
struct Occurrences {
    /// Positions of each letter in `x`.
    at: Vec<Vec<usize>>,
    /// `before[p][b]`: occurrences of `b` strictly before position `p`.
    before: Vec<Vec<usize>>,
    dep: Vec<Vec<bool>>,
}

type DownSet = Vec<usize>;

impl Occurrences {
    fn new(x: &[Symbol], a: &IndepAlphabet) -> Result<Self> {
        let k = a.alphabet.len();
        if x.len() > MAX_TRACE_LEN {
            return Err(Error::SizeGuard(format!(
                "trace length {} above {MAX_TRACE_LEN}",
                x.len()
            )));
        }
        if x.iter().any(|&s| s >= k) {
            return Err(Error::invalid("symbol outside the alphabet"));
        }
        let mut at = vec![Vec::new(); k];
        let mut before = Vec::with_capacity(x.len());
        let mut seen = vec![0; k];
        for (p, &s) in x.iter().enumerate() {
            before.push(seen.clone());
            seen[s] += 1;
            at[s].push(p);
        }
        let dep = (0..k).map(|u| (0..k).map(|v| !a.indep[u][v]).collect()).collect();
        Ok(Occurrences { at, before, dep })
    }

    /// Can the next occurrence of `s` be appended to `down`?
    fn ready(&self, down: &DownSet, s: Symbol) -> bool {
        let Some(&p) = self.at[s].get(down[s]) else {
            return false;
        };
        (0..down.len()).all(|b| b == s || !self.dep[s][b] || self.before[p][b] <= down[b])
    }
}

fn guard(len: usize) -> Result<()> {
    if len > MAX_LAYER {
        return Err(Error::SizeGuard(format!(
            "more than {MAX_LAYER} down-sets in one layer"
        )));
    }
    Ok(())
}

/// The lexicographically least word equivalent to `x`. Taking the least
/// available letter at each step is safe since any available letter can
/// be completed to a linearization.
pub fn normal_form(x: &[Symbol], a: &IndepAlphabet) -> Word {
    let occ = Occurrences::new(x, a).expect("word within range");
    let mut down = vec![0; a.alphabet.len()];
    let mut out = Vec::with_capacity(x.len());
    while out.len() < x.len() {
        let s = (0..down.len())
            .find(|&s| occ.ready(&down, s))
            .expect("some letter is minimal");
        down[s] += 1;
        out.push(s);
    }
    out
}

pub fn equivalent(x: &[Symbol], y: &[Symbol], a: &IndepAlphabet) -> bool {
    x.len() == y.len() && normal_form(x, a) == normal_form(y, a)
}

/// `#[x]`, by counting paths through the lattice of down-sets.
pub fn class_size(x: &[Symbol], a: &IndepAlphabet) -> Result<Nat> {
    let occ = Occurrences::new(x, a)?;
    let mut layer: HashMap<DownSet, Nat> = HashMap::from([(vec![0; a.alphabet.len()], Nat::one())]);
    for _ in 0..x.len() {
        let mut next: HashMap<DownSet, Nat> = HashMap::new();
        for (down, w) in &layer {
            for s in 0..down.len() {
                if occ.ready(down, s) {
                    let mut d = down.clone();
                    d[s] += 1;
                    *next.entry(d).or_default() += w;
                }
            }
        }
        guard(next.len())?;
        layer = next;
    }
    Ok(layer.into_values().sum())
}

/// `#(L ∩ [x])`, jointly over down-sets and automaton states.
pub fn count_representatives(l: &Dfa, x: &[Symbol], a: &IndepAlphabet) -> Result<Nat> {
    if l.alphabet() != a.alphabet() {
        return Err(Error::invalid("automaton and independence alphabet differ"));
    }
    let occ = Occurrences::new(x, a)?;
    let mut layer: HashMap<(DownSet, usize), Nat> =
        HashMap::from([((vec![0; a.alphabet.len()], l.start()), Nat::one())]);
    for _ in 0..x.len() {
        let mut next: HashMap<(DownSet, usize), Nat> = HashMap::new();
        for ((down, q), w) in &layer {
            for s in 0..down.len() {
                if occ.ready(down, s) {
                    let mut d = down.clone();
                    d[s] += 1;
                    *next.entry((d, l.step(*q, s))).or_default() += w;
                }
            }
        }
        guard(next.len())?;
        layer = next;
    }
    Ok(layer
        .into_iter()
        .filter(|((_, q), _)| l.is_final(*q))
        .map(|(_, w)| w)
        .sum())
}

/// `[x]` by closing under swaps of adjacent independent letters.
pub fn swap_closure(x: &[Symbol], a: &IndepAlphabet, limit: usize) -> Result<BTreeSet<Word>> {
    let mut seen = BTreeSet::from([x.to_vec()]);
    let mut todo = VecDeque::from([x.to_vec()]);
    while let Some(w) = todo.pop_front() {
        for i in 1..w.len() {
            if a.independent(w[i - 1], w[i]) {
                let mut v = w.clone();
                v.swap(i - 1, i);
                if seen.insert(v.clone()) {
                    if seen.len() > limit {
                        return Err(Error::SizeGuard(format!("class larger than {limit}")));
                    }
                    todo.push_back(v);
                }
            }
        }
    }
    Ok(seen)
}

/// `[L]` described by `L` itself: words drawn from the automaton project
/// to their trace, and `d([x]) = #(L ∩ [x])`.
pub struct TraceDescription {
    dfa: Dfa,
    indep: IndepAlphabet,
    bound: PolyBound,
}

impl TraceDescription {
    pub fn new(dfa: Dfa, indep: IndepAlphabet, bound: PolyBound) -> Result<Self> {
        if dfa.alphabet() != indep.alphabet() {
            return Err(Error::invalid("automaton and independence alphabet differ"));
        }
        Ok(TraceDescription { dfa, indep, bound })
    }

    /// Independence taken from the automaton's `indep` lines.
    pub fn from_dfa(dfa: Dfa, bound: PolyBound) -> Result<Self> {
        let indep = IndepAlphabet::of_dfa(&dfa)?;
        TraceDescription::new(dfa, indep, bound)
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn indep(&self) -> &IndepAlphabet {
        &self.indep
    }

    /// `max_{x in L_n} #(L ∩ [x])`.
    pub fn max_ambiguity(&self, n: usize) -> Result<Nat> {
        let mut best = Nat::zero();
        for x in self.dfa.slice_members(n) {
            best = best.max(count_representatives(&self.dfa, &x, &self.indep)?);
        }
        Ok(best)
    }

    /// Checks the declared bound on every length up to `max_n`.
    pub fn validate(&self, max_n: usize) -> Result<()> {
        for n in 1..=max_n {
            let found = self.max_ambiguity(n)?;
            let bound = self.bound.eval(n);
            if found > Nat::from(bound) {
                return Err(Error::AmbiguityExceeded { found, bound, size: n });
            }
        }
        Ok(())
    }

    /// Distinct traces of size `n`, by enumeration.
    pub fn traces(&self, n: usize) -> BTreeSet<Trace> {
        self.dfa
            .slice_members(n)
            .iter()
            .map(|x| Trace::of(x, &self.indep))
            .collect()
    }
}

impl Description for TraceDescription {
    type Source = Word;
    type Target = Trace;

    fn sample_source(&self, n: usize, src: &mut CoinSource) -> Result<Option<Word>> {
        Ok(self.dfa.sample(n, 0, src)?.value)
    }

    fn project(&self, t: &Word) -> Trace {
        Trace::of(t, &self.indep)
    }

    fn ambiguity(&self, s: &Trace) -> Result<Nat> {
        count_representatives(&self.dfa, s.rep(), &self.indep)
    }

    fn bound(&self, n: usize) -> u64 {
        self.bound.eval(n)
    }

    fn source_census(&self, n: usize) -> Option<Nat> {
        Some(self.dfa.count(n))
    }

    fn enumerate_source(&self, n: usize) -> Option<Vec<Word>> {
        (n <= 16).then(|| self.dfa.slice_members(n))
    }
}

pub fn trace_sampler(desc: &TraceDescription, n: usize, src: &mut CoinSource) -> Result<SampleReport<Trace>> {
    sample_described(desc, n, src)
}

pub fn trace_census_estimate(
    desc: &TraceDescription,
    n: usize,
    epsilon: &Rat,
    src: &mut CoinSource,
) -> Result<SampleReport<Rat>> {
    estimate_census(desc, n, epsilon, src)
}
