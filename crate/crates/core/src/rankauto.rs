//! Slice ranking for nondeterministic automata of bounded ambiguity.
//!
//! With `q` the polynomial through `(0,0), (1,1), ..., (d,1)`, the number of
//! accepted words is `sum_w q(pathcount(w))` whenever every word has at most
//! `d` accepting paths. Sums of `pathcount^k` over all completions of a
//! prefix collapse to a single bilinear form in the `k`-th Kronecker powers
//! of the transition matrices, which gives ranks without enumeration.

use num_traits::{One, Zero};

use crate::alphabet::Alphabet;
use crate::framework::SampleReport;
use crate::numutil::{gen_uniform, nat_to_rat, rat};
use crate::regular::Dfa;
use crate::text::lines;
use crate::{CoinSource, Count, Error, Nat, Rat, Result, Symbol, Word};

/// Dense matrix over a count semiring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<C> {
    rows: usize,
    cols: usize,
    data: Vec<C>,
}

impl<C: Count> Matrix<C> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, C::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix shapes");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += &(a.clone() * b.clone());
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (o, b) in out.data.iter_mut().zip(&other.data) {
            *o += b;
        }
        out
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let v = a.clone() * other.get(k, l).clone();
                        out.set(i * other.rows + k, j * other.cols + l, v);
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &[C]) -> Vec<C> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![C::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let m = self.get(i, j);
                if !m.is_zero() {
                    *o += &(vi.clone() * m.clone());
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn right_mul(&self, v: &[C]) -> Vec<C> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = C::zero();
                for (j, vj) in v.iter().enumerate() {
                    acc += &(self.get(i, j).clone() * vj.clone());
                }
                acc
            })
            .collect()
    }
}

pub fn dot<C: Count>(a: &[C], b: &[C]) -> C {
    let mut acc = C::zero();
    for (x, y) in a.iter().zip(b) {
        acc += &(x.clone() * y.clone());
    }
    acc
}

pub fn kron_vec<C: Count>(a: &[C], b: &[C]) -> Vec<C> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x.clone() * y.clone()))
        .collect()
}

/// `q(x) = sum_k a_k x^k` with `q(0) = 0` and `q(1) = ... = q(d) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly {
    /// `coeffs[k-1] = a_k`.
    coeffs: Vec<Rat>,
}

impl QPoly {
    /// Lagrange interpolation through `(0,0), (1,1), ..., (d,1)`.
    pub fn build(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("the ambiguity bound must be at least 1"));
        }
        // full coefficient vector, index = power
        let mut total = vec![Rat::zero(); d + 1];
        for j in 1..=d {
            let mut basis = vec![Rat::one()];
            let mut denom = Rat::one();
            for m in 0..=d {
                if m == j {
                    continue;
                }
                // multiply basis by (x - m)
                let mut next = vec![Rat::zero(); basis.len() + 1];
                for (p, c) in basis.iter().enumerate() {
                    next[p + 1] += c;
                    next[p] -= c * rat(m as i64, 1);
                }
                basis = next;
                denom *= rat(j as i64 - m as i64, 1);
            }
            for (p, c) in basis.into_iter().enumerate() {
                total[p] += c / &denom;
            }
        }
        debug_assert!(total[0].is_zero());
        Ok(QPoly {
            coeffs: total.into_iter().skip(1).collect(),
        })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `a_k` for `k = 1..=d`.
    pub fn coeff(&self, k: usize) -> &Rat {
        &self.coeffs[k - 1]
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = (acc + c) * x;
        }
        acc
    }
}

/// Nondeterministic automaton given by per-symbol transition matrices with
/// natural multiplicities, initial row vector `pi`, final column `eta` and a
/// declared ambiguity bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Alphabet,
    matrices: Vec<Matrix<Nat>>,
    pi: Vec<Nat>,
    eta: Vec<Nat>,
    ambiguity: usize,
}

impl Nfa {
    pub fn new(
        alphabet: Alphabet,
        matrices: Vec<Matrix<Nat>>,
        pi: Vec<Nat>,
        eta: Vec<Nat>,
        ambiguity: usize,
    ) -> Result<Self> {
        let dim = pi.len();
        if eta.len() != dim {
            return Err(Error::invalid("pi and eta differ in length"));
        }
        if matrices.len() != alphabet.len() {
            return Err(Error::invalid("one matrix per symbol is required"));
        }
        if matrices.iter().any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::invalid(format!("transition matrices must be {dim}x{dim}")));
        }
        if ambiguity == 0 {
            return Err(Error::invalid("the ambiguity bound must be at least 1"));
        }
        Ok(Nfa {
            alphabet,
            matrices,
            pi,
            eta,
            ambiguity,
        })
    }

    /// Builds from an edge list `(from, symbol, to)`; repeated edges add up.
    pub fn from_edges(
        alphabet: Alphabet,
        dim: usize,
        starts: &[usize],
        finals: &[usize],
        edges: &[(usize, Symbol, usize)],
        ambiguity: usize,
    ) -> Result<Self> {
        let mut matrices = vec![Matrix::zeros(dim, dim); alphabet.len()];
        for &(p, s, q) in edges {
            if p >= dim || q >= dim || s >= alphabet.len() {
                return Err(Error::invalid(format!("edge ({p}, {s}, {q}) out of range")));
            }
            let v = matrices[s].get(p, q) + 1u32;
            matrices[s].set(p, q, v);
        }
        let mut pi = vec![Nat::zero(); dim];
        let mut eta = vec![Nat::zero(); dim];
        for &s in starts {
            *pi.get_mut(s)
                .ok_or_else(|| Error::invalid("start state out of range"))? = Nat::one();
        }
        for &f in finals {
            *eta.get_mut(f)
                .ok_or_else(|| Error::invalid("final state out of range"))? = Nat::one();
        }
        Nfa::new(alphabet, matrices, pi, eta, ambiguity)
    }

    pub fn from_dfa(dfa: &Dfa) -> Self {
        let dim = dfa.states();
        let mut edges = Vec::new();
        for q in 0..dim {
            for s in 0..dfa.alphabet().len() {
                edges.push((q, s, dfa.step(q, s)));
            }
        }
        let finals: Vec<usize> = (0..dim).filter(|&q| dfa.is_final(q)).collect();
        Nfa::from_edges(dfa.alphabet().clone(), dim, &[dfa.start()], &finals, &edges, 1).expect("a DFA is a valid NFA")
    }

    /// Text format: the DFA format with several `start` states allowed,
    /// repeated `trans` lines counted with multiplicity, and `ambiguity d`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dim = None;
        let mut alphabet = None;
        let mut starts = Vec::new();
        let mut finals = Vec::new();
        let mut edges = Vec::new();
        let mut ambiguity = None;
        let mut pending = Vec::new();
        for line in lines(text) {
            match line.key() {
                "states" => {
                    line.expect_args(1)?;
                    dim = Some(line.parse_at::<usize>(1, "state count")?);
                }
                "alphabet" => {
                    let names = line.words[1..].iter().copied();
                    alphabet = Some(Alphabet::new(names).map_err(|e| line.err(e.to_string()))?);
                }
                "start" => {
                    for i in 1..line.words.len() {
                        starts.push((line.no, line.parse_at::<usize>(i, "start state")?));
                    }
                }
                "finals" => {
                    for i in 1..line.words.len() {
                        finals.push((line.no, line.parse_at::<usize>(i, "final state")?));
                    }
                }
                "trans" => {
                    line.expect_args(3)?;
                    let p: usize = line.parse_at(1, "state")?;
                    let q: usize = line.parse_at(3, "state")?;
                    pending.push((line.no, p, line.words[2].to_string(), q));
                }
                "ambiguity" => {
                    line.expect_args(1)?;
                    let d: usize = line.parse_at(1, "ambiguity bound")?;
                    if d == 0 {
                        return Err(line.err("the ambiguity bound must be at least 1"));
                    }
                    ambiguity = Some(d);
                }
                other => return Err(line.err(format!("unknown directive `{other}`"))),
            }
        }
        let dim = dim.ok_or_else(|| Error::parse(0, "missing `states`"))?;
        let alphabet: Alphabet = alphabet.ok_or_else(|| Error::parse(0, "missing `alphabet`"))?;
        for (no, p, sym, q) in pending {
            let s = alphabet
                .symbol(&sym)
                .ok_or_else(|| Error::parse(no, format!("unknown symbol `{sym}`")))?;
            if p >= dim || q >= dim {
                return Err(Error::parse(no, format!("state out of range 0..{dim}")));
            }
            edges.push((p, s, q));
        }
        for &(no, s) in starts.iter().chain(&finals) {
            if s >= dim {
                return Err(Error::parse(no, format!("state {s} out of range 0..{dim}")));
            }
        }
        let starts: Vec<usize> = starts.into_iter().map(|(_, s)| s).collect();
        let finals: Vec<usize> = finals.into_iter().map(|(_, s)| s).collect();
        Nfa::from_edges(alphabet, dim, &starts, &finals, &edges, ambiguity.unwrap_or(1))
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.pi.len()
    }

    pub fn ambiguity_bound(&self) -> usize {
        self.ambiguity
    }

    pub fn matrix(&self, s: Symbol) -> &Matrix<Nat> {
        &self.matrices[s]
    }

    /// `pi M_{w_1} ... M_{w_n} eta`, the number of accepting paths on `w`.
    pub fn path_count(&self, w: &[Symbol]) -> Nat {
        let row = w.iter().fold(self.pi.clone(), |v, &s| self.matrices[s].left_mul(&v));
        dot(&row, &self.eta)
    }

    /// Checks the declared bound on every word up to `max_len` by brute force.
    pub fn validate_ambiguity(&self, max_len: usize) -> Result<()> {
        for n in 0..=max_len {
            for w in self.alphabet.words(n) {
                let c = self.path_count(&w);
                if c > Nat::from(self.ambiguity) {
                    return Err(Error::AmbiguityExceeded {
                        found: c,
                        bound: self.ambiguity as u64,
                        size: n,
                    });
                }
            }
        }
        Ok(())
    }

    /// Precomputes the lifts for ranking words of length `n`. Refuses when
    /// the lifted dimension `dim^d` exceeds `ceiling`.
    pub fn slice_ranker(&self, n: usize, ceiling: usize) -> Result<SliceRanker<'_>> {
        SliceRanker::new(self, n, ceiling)
    }

    /// `#{g in Sigma^n : g <= beta, g accepted}`, 1-based and reflexive.
    pub fn rank_slice(&self, beta: &[Symbol], ceiling: usize) -> Result<Nat> {
        self.slice_ranker(beta.len(), ceiling)?.rank(beta)
    }

    /// Rank over all lengths: accepted words shorter than `beta` plus the
    /// slice rank.
    pub fn rank(&self, beta: &[Symbol], ceiling: usize) -> Result<Nat> {
        let mut total = Nat::zero();
        for l in 0..beta.len() {
            total += self.slice_ranker(l, ceiling)?.census()?;
        }
        Ok(total + self.rank_slice(beta, ceiling)?)
    }
}

/// Kronecker lifts of one automaton for a fixed word length.
pub struct SliceRanker<'a> {
    nfa: &'a Nfa,
    n: usize,
    q: QPoly,
    lifts: Vec<Lift>,
}

struct Lift {
    /// `M_s^{(x)k}` per symbol.
    symbols: Vec<Matrix<Nat>>,
    pi: Vec<Nat>,
    /// `suffix[j] = (sum_s M_s^{(x)k})^j eta^{(x)k}`.
    suffix: Vec<Vec<Nat>>,
}

impl<'a> SliceRanker<'a> {
    fn new(nfa: &'a Nfa, n: usize, ceiling: usize) -> Result<Self> {
        let d = nfa.ambiguity;
        let lifted = nfa
            .dim()
            .checked_pow(d as u32)
            .filter(|&v| v <= ceiling)
            .ok_or_else(|| {
                Error::SizeGuard(format!(
                    "lifted dimension {}^{d} above the ceiling {ceiling}",
                    nfa.dim()
                ))
            })?;
        debug_assert!(lifted >= 1);
        let q = QPoly::build(d)?;
        let mut lifts = Vec::with_capacity(d);
        let mut symbols = nfa.matrices.clone();
        let mut pi = nfa.pi.clone();
        let mut eta = nfa.eta.clone();
        for k in 1..=d {
            if k > 1 {
                symbols = symbols
                    .iter()
                    .zip(&nfa.matrices)
                    .map(|(lifted, base)| lifted.kron(base))
                    .collect();
                pi = kron_vec(&pi, &nfa.pi);
                eta = kron_vec(&eta, &nfa.eta);
            }
            let dim = pi.len();
            let sum = symbols.iter().fold(Matrix::zeros(dim, dim), |acc, m| acc.add(m));
            let mut suffix = vec![eta.clone()];
            for j in 0..n {
                let next = sum.right_mul(&suffix[j]);
                suffix.push(next);
            }
            lifts.push(Lift {
                symbols: symbols.clone(),
                pi: pi.clone(),
                suffix,
            });
        }
        Ok(SliceRanker { nfa, n, q, lifts })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn combine(&self, sums: &[Nat]) -> Result<Nat> {
        let mut total = Rat::zero();
        for (k, s) in sums.iter().enumerate() {
            total += self.q.coeff(k + 1) * nat_to_rat(s);
        }
        if !total.is_integer() {
            return Err(Error::invalid(format!("non-integral rank {total}")));
        }
        total
            .to_integer()
            .to_biguint()
            .ok_or_else(|| Error::invalid("negative rank"))
    }

    /// `sum_k a_k sum_{g <= beta} pathcount(g)^k`.
    pub fn rank(&self, beta: &[Symbol]) -> Result<Nat> {
        if beta.len() != self.n {
            return Err(Error::invalid(format!(
                "word of length {} for a slice of length {}",
                beta.len(),
                self.n
            )));
        }
        let own = self.nfa.path_count(beta);
        if own > Nat::from(self.nfa.ambiguity) {
            return Err(Error::AmbiguityExceeded {
                found: own,
                bound: self.nfa.ambiguity as u64,
                size: self.n,
            });
        }
        let mut sums = Vec::with_capacity(self.lifts.len());
        for lift in &self.lifts {
            let mut prefix = lift.pi.clone();
            let mut acc = Nat::zero();
            for (i, &b) in beta.iter().enumerate() {
                let tail = &lift.suffix[self.n - i - 1];
                for c in 0..b {
                    acc += dot(&lift.symbols[c].left_mul(&prefix), tail);
                }
                prefix = lift.symbols[b].left_mul(&prefix);
            }
            acc += dot(&prefix, &lift.suffix[0]);
            sums.push(acc);
        }
        self.combine(&sums)
    }

    /// Number of accepted words of length `n`.
    pub fn census(&self) -> Result<Nat> {
        let sums: Vec<Nat> = self.lifts.iter().map(|l| dot(&l.pi, &l.suffix[self.n])).collect();
        self.combine(&sums)
    }

    /// Accepted word of slice rank `k` by per-position bisection.
    pub fn unrank(&self, k: &Nat) -> Result<Word> {
        let sigma = self.nfa.alphabet.len();
        unrank_by_bisection(|w| self.rank(w), self.n, sigma, k)
    }
}

/// The lexicographically least word `w` of length `n` with `rank(w) >= k`,
/// found by bisecting each position over the alphabet. `rank` must be the
/// reflexive slice rank of some language.
pub fn unrank_by_bisection(rank: impl Fn(&[Symbol]) -> Result<Nat>, n: usize, sigma: usize, k: &Nat) -> Result<Word> {
    if sigma == 0 {
        return Err(Error::invalid("empty alphabet"));
    }
    let top = sigma - 1;
    let mut word = vec![top; n];
    let total = rank(&word)?;
    if k.is_zero() || k > &total {
        return Err(Error::RankOutOfRange {
            rank: k.clone(),
            size: total,
        });
    }
    for i in 0..n {
        // smallest c with rank(prefix c top...) >= k
        let (mut lo, mut hi) = (0usize, top);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            word[i] = mid;
            if &rank(&word)? >= k {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        word[i] = lo;
    }
    Ok(word)
}

/// Uniform sampler from a rank function: draw `k` uniform in
/// `1..=census`, return the word of rank `k`.
pub fn rank_sampler(
    rank: impl Fn(&[Symbol]) -> Result<Nat>,
    census: &Nat,
    n: usize,
    sigma: usize,
    delta: &Rat,
    src: &mut CoinSource,
) -> Result<SampleReport<Word>> {
    if census.is_zero() {
        return Err(Error::EmptySlice(n));
    }
    let start = src.bits_consumed();
    let k = gen_uniform(src, census, delta)?;
    let value = match k {
        Some(k) => Some(unrank_by_bisection(rank, n, sigma, &k)?),
        None => None,
    };
    Ok(SampleReport {
        value,
        trials_used: 1,
        bits_used: src.bits_consumed() - start,
    })
}

/// Brute-force slice rank, for tests and the `--oracle` mode.
pub fn brute_rank_slice(nfa: &Nfa, beta: &[Symbol]) -> Nat {
    let count = nfa
        .alphabet
        .words(beta.len())
        .into_iter()
        .take_while(|g| g.as_slice() <= beta)
        .filter(|g| !nfa.path_count(g).is_zero())
        .count();
    Nat::from(count)
}

/// `sum_{w in Sigma^n} pathcount(w)^k` by enumeration.
pub fn brute_power_sum(nfa: &Nfa, n: usize, k: u32) -> Nat {
    nfa.alphabet
        .words(n)
        .iter()
        .map(|w| num_traits::pow(nfa.path_count(w), k as usize))
        .sum()
}

/// `sum_{w in Sigma^n} pathcount(w)^k` through the `k`-th lift.
pub fn lifted_power_sum(nfa: &Nfa, n: usize, k: usize) -> Nat {
    let mut symbols = nfa.matrices.clone();
    let mut pi = nfa.pi.clone();
    let mut eta = nfa.eta.clone();
    for _ in 1..k {
        symbols = symbols.iter().zip(&nfa.matrices).map(|(l, b)| l.kron(b)).collect();
        pi = kron_vec(&pi, &nfa.pi);
        eta = kron_vec(&eta, &nfa.eta);
    }
    let dim = pi.len();
    let sum = symbols.iter().fold(Matrix::zeros(dim, dim), |acc, m| acc.add(m));
    let mut v = eta;
    for _ in 0..n {
        v = sum.right_mul(&v);
    }
    dot(&pi, &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numutil::{condition_on_success, exact_law};

    pub(crate) fn two_paths_on_a() -> Nfa {
        // 0 -a-> 1 and 0 -a-> 2, both final
        Nfa::from_edges(Alphabet::letters("a"), 3, &[0], &[1, 2], &[(0, 0, 1), (0, 0, 2)], 2).unwrap()
    }

    /// Accepts words over {a,b} containing an `a`; paths guess which `a`
    /// is the last one among the last two positions, capped at ambiguity 2.
    fn guess_last_a() -> Nfa {
        // states: 0 scanning, 1 after a guessed a (must be at distance <= 1
        // from end), 2 final
        let e = [
            (0, 0, 0),
            (0, 1, 0),
            (0, 0, 2), // guess: this a is last symbol
            (0, 0, 1), // guess: one symbol follows
            (1, 0, 2),
            (1, 1, 2),
        ];
        Nfa::from_edges(Alphabet::letters("ab"), 3, &[0], &[2], &e, 2).unwrap()
    }

    #[test]
    fn q_examples() {
        assert_eq!(QPoly::build(1).unwrap().coeffs, vec![rat(1, 1)]);
        assert_eq!(QPoly::build(2).unwrap().coeffs, vec![rat(3, 2), rat(-1, 2)]);
        assert_eq!(QPoly::build(3).unwrap().coeffs, vec![rat(11, 6), rat(-1, 1), rat(1, 6)]);
        for d in 1..7 {
            let q = QPoly::build(d).unwrap();
            assert!(q.eval(&rat(0, 1)).is_zero());
            for x in 1..=d as i64 {
                assert_eq!(q.eval(&rat(x, 1)), rat(1, 1));
            }
        }
    }

    #[test]
    fn path_counts() {
        let a = two_paths_on_a();
        assert_eq!(a.path_count(&[0]), Nat::from(2u32));
        assert_eq!(a.path_count(&[]), Nat::zero());
        let g = guess_last_a();
        assert_eq!(g.path_count(&[0, 0]), Nat::from(2u32));
        assert_eq!(g.path_count(&[1, 1]), Nat::zero());
        g.validate_ambiguity(6).unwrap();
    }

    #[test]
    fn kronecker_identity() {
        let g = guess_last_a();
        for n in 0..=4 {
            for k in 1..=3 {
                assert_eq!(lifted_power_sum(&g, n, k), brute_power_sum(&g, n, k as u32));
            }
        }
    }

    #[test]
    fn rank_matches_brute_force() {
        let g = guess_last_a();
        for n in 1..=4 {
            let r = g.slice_ranker(n, 1 << 12).unwrap();
            for beta in g.alphabet().words(n) {
                assert_eq!(r.rank(&beta).unwrap(), brute_rank_slice(&g, &beta), "{beta:?}");
            }
        }
    }

    #[test]
    fn unrank_inverts_rank() {
        let g = guess_last_a();
        let r = g.slice_ranker(3, 1 << 12).unwrap();
        let census = r.census().unwrap();
        let members: Vec<Word> = g
            .alphabet()
            .words(3)
            .into_iter()
            .filter(|w| !g.path_count(w).is_zero())
            .collect();
        assert_eq!(census, Nat::from(members.len()));
        for (i, m) in members.iter().enumerate() {
            assert_eq!(&r.unrank(&Nat::from(i + 1)).unwrap(), m);
        }
    }

    #[test]
    fn ambiguity_violation_detected() {
        let a = Nfa::from_edges(Alphabet::letters("a"), 3, &[0], &[1, 2], &[(0, 0, 1), (0, 0, 2)], 1).unwrap();
        assert!(matches!(a.rank_slice(&[0], 100), Err(Error::AmbiguityExceeded { .. })));
        assert!(a.validate_ambiguity(2).is_err());
    }

    #[test]
    fn lift_ceiling() {
        let g = guess_last_a();
        assert!(matches!(g.slice_ranker(2, 8), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn sampler_uniform_on_three_words() {
        let g = guess_last_a();
        let r = g.slice_ranker(2, 1 << 12).unwrap();
        let census = r.census().unwrap();
        // length-2 members: aa, ab, ba
        assert_eq!(census, Nat::from(3u32));
        let law = exact_law(
            |src| {
                rank_sampler(|w| r.rank(w), &census, 2, 2, &rat(1, 4), src)
                    .unwrap()
                    .value
            },
            1 << 10,
        );
        let (cond, _) = condition_on_success(&law);
        assert_eq!(cond.len(), 3);
        assert!(cond.values().all(|p| *p == rat(1, 3)));
    }

    #[test]
    fn empty_slice_sampler() {
        let g = guess_last_a();
        let mut src = CoinSource::from_seed(1);
        let err = rank_sampler(|_| Ok(Nat::zero()), &Nat::zero(), 0, 2, &rat(1, 4), &mut src).unwrap_err();
        assert_eq!(err, Error::EmptySlice(0));
        drop(g);
    }

    #[test]
    fn parse_counts_multiplicity() {
        let text = "states 2\nalphabet a\nstart 0\nfinals 1\ntrans 0 a 1\ntrans 0 a 1\nambiguity 2\n";
        let n = Nfa::parse(text).unwrap();
        assert_eq!(n.path_count(&[0]), Nat::from(2u32));
        assert_eq!(n.ambiguity_bound(), 2);
        assert!(matches!(
            Nfa::parse("states 1\nalphabet a\ntrans 0 b 0\n"),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn generic_matrix_ops() {
        let mut m = Matrix::<u64>::zeros(2, 2);
        m.set(0, 1, 1);
        m.set(1, 0, 1);
        let sq = m.mul(&m);
        assert_eq!(sq, Matrix::identity(2));
        let k = m.kron(&Matrix::identity(2));
        assert_eq!(k.rows(), 4);
        assert_eq!(*k.get(0, 2), 1);
    }
}
