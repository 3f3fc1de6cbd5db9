//! Sampling and counting through ambiguous descriptions.
//!
//! A [`Description`] presents a structure `S` as the image of an easier
//! structure `T` under a size-preserving surjection `f`, together with the
//! ambiguity `d(s) = |f^-1(s)|` and a polynomial bound `D(n)` on it. Given a
//! uniform generator for `T`, the engine here yields a uniform generator for
//! `S`, a census estimator and a randomized exact counter.

mod budget;
mod combine;
mod dnf;

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::Zero;

pub use budget::trial_budget;
pub use combine::{FiniteWords, Product, ProductMode, Union, WordStructure};
pub use dnf::{DnfDescription, DnfFormula, Literal};

use crate::numutil::{bit_size, check_probability, lcm_upto, nat_to_rat, rat, round_rat};
use crate::{CoinSource, Error, Nat, Rat, Result};

/// Objects with a size; descriptions must preserve it.
pub trait Measured {
    fn size(&self) -> usize;
}

impl<T> Measured for Vec<T> {
    fn size(&self) -> usize {
        self.len()
    }
}

pub trait Description: Sync {
    /// Elements of the describing structure `T`.
    type Source: Clone + Debug;
    /// Elements of the described structure `S`.
    type Target: Clone + Debug + Ord + Measured;

    /// One run of a uniform generator for `T_n`; `None` is the failure
    /// outcome. Conditioned on success the draw must be exactly uniform.
    fn sample_source(&self, n: usize, src: &mut CoinSource) -> Result<Option<Self::Source>>;

    /// The surjection `f`.
    fn project(&self, t: &Self::Source) -> Self::Target;

    /// `d(s)`, the number of sources projecting to `s`.
    fn ambiguity(&self, s: &Self::Target) -> Result<Nat>;

    /// `D(n)`, an upper bound on `d` over `S_n`.
    fn bound(&self, n: usize) -> u64;

    /// `C_T(n)`, when it can be computed.
    fn source_census(&self, _n: usize) -> Option<Nat> {
        None
    }

    /// All of `T_n`, for exhaustive cross-checks on small sizes.
    fn enumerate_source(&self, _n: usize) -> Option<Vec<Self::Source>> {
        None
    }
}

/// Outcome of a randomized procedure with its resource use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleReport<T> {
    /// `None` is the failure outcome.
    pub value: Option<T>,
    /// Loop iterations performed.
    pub trials_used: u64,
    /// Random bits read.
    pub bits_used: u64,
}

impl<T> SampleReport<T> {
    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> SampleReport<U> {
        SampleReport {
            value: self.value.map(f),
            trials_used: self.trials_used,
            bits_used: self.bits_used,
        }
    }
}

/// Loop bound of the uniform generator: `alpha(1 - 3/(8D))^t < 1/4`.
pub fn sampler_budget(bound: u64) -> Result<u64> {
    trial_budget(&rat(4, 3), &rat(3, 8), &rat(1, bound as i64), &rat(1, 4))
}

/// Sample count of the census estimator for tolerance `epsilon`.
pub fn estimator_budget(bound: u64, epsilon: &Rat) -> Result<u64> {
    let e = epsilon / Rat::from_integer(BigInt::from(bound));
    trial_budget(&rat(8, 3), &rat(3, 4), &(&e * &e), &rat(1, 4))
}

fn checked_ambiguity<D: Description + ?Sized>(desc: &D, s: &D::Target, n: usize, bound: u64) -> Result<Nat> {
    let d = desc.ambiguity(s)?;
    if d.is_zero() {
        return Err(Error::invalid(format!("ambiguity 0 for projected element {s:?}")));
    }
    if d > Nat::from(bound) {
        return Err(Error::AmbiguityExceeded {
            found: d,
            bound,
            size: n,
        });
    }
    Ok(d)
}

fn check_nonempty<D: Description + ?Sized>(desc: &D, n: usize) -> Result<()> {
    if desc.source_census(n).is_some_and(|c| c.is_zero()) {
        return Err(Error::EmptySlice(n));
    }
    Ok(())
}

/// Uniform generator for `S_n` (rejection on `lcm{1..D(n)}/d(s)`).
pub fn sample_described<D: Description + ?Sized>(
    desc: &D,
    n: usize,
    src: &mut CoinSource,
) -> Result<SampleReport<D::Target>> {
    sample_described_with(desc, n, src, None)
}

/// [`sample_described`] with an explicit iteration count instead of the
/// computed one.
pub fn sample_described_with<D: Description + ?Sized>(
    desc: &D,
    n: usize,
    src: &mut CoinSource,
    trials: Option<u64>,
) -> Result<SampleReport<D::Target>> {
    check_nonempty(desc, n)?;
    let bound = desc.bound(n).max(1);
    let m = lcm_upto(bound);
    let width = bit_size(&m)?;
    let budget = match trials {
        Some(t) => t,
        None => sampler_budget(bound)?,
    };
    let start = src.bits_consumed();
    for i in 1..=budget {
        let Some(t) = desc.sample_source(n, src)? else {
            continue;
        };
        let s = desc.project(&t);
        if s.size() != n {
            return Err(Error::invalid(format!(
                "projection changed the size from {n} to {}",
                s.size()
            )));
        }
        let d = checked_ambiguity(desc, &s, n, bound)?;
        let r = src.draw_bits(width) + 1u32;
        if r <= &m / &d {
            return Ok(SampleReport {
                value: Some(s),
                trials_used: i,
                bits_used: src.bits_consumed() - start,
            });
        }
    }
    Ok(SampleReport {
        value: None,
        trials_used: budget,
        bits_used: src.bits_consumed() - start,
    })
}

/// Census estimator: `C_T(n)` times the sample mean of `1/d(f(t))`.
pub fn estimate_census<D: Description + ?Sized>(
    desc: &D,
    n: usize,
    epsilon: &Rat,
    src: &mut CoinSource,
) -> Result<SampleReport<Rat>> {
    estimate_census_with(desc, n, epsilon, src, None)
}

/// [`estimate_census`] with an explicit sample count.
pub fn estimate_census_with<D: Description + ?Sized>(
    desc: &D,
    n: usize,
    epsilon: &Rat,
    src: &mut CoinSource,
    trials: Option<u64>,
) -> Result<SampleReport<Rat>> {
    check_probability(epsilon, "epsilon")?;
    let census = desc
        .source_census(n)
        .ok_or_else(|| Error::invalid("census estimation needs the source census"))?;
    if census.is_zero() {
        return Err(Error::EmptySlice(n));
    }
    let bound = desc.bound(n).max(1);
    let budget = match trials {
        Some(t) => t,
        None => estimator_budget(bound, epsilon)?,
    };
    let start = src.bits_consumed();
    // Sum of 1/d kept over the common denominator lcm{1..D}.
    let m = lcm_upto(bound);
    let mut acc = Nat::zero();
    let mut hits = 0u64;
    for _ in 0..budget {
        if let Some(t) = desc.sample_source(n, src)? {
            let s = desc.project(&t);
            let d = checked_ambiguity(desc, &s, n, bound)?;
            acc += &m / d;
            hits += 1;
        }
    }
    let value =
        (hits > 0).then(|| nat_to_rat(&acc) * nat_to_rat(&census) / (nat_to_rat(&m) * Rat::from_integer(hits.into())));
    Ok(SampleReport {
        value,
        trials_used: budget,
        bits_used: src.bits_consumed() - start,
    })
}

/// Randomized exact counter: the estimate at `epsilon = 1/(3 C_T(n))`,
/// rounded. Refuses when `C_T(n)` exceeds `ceiling`.
pub fn exact_count<D: Description + ?Sized>(
    desc: &D,
    n: usize,
    src: &mut CoinSource,
    ceiling: &Nat,
) -> Result<SampleReport<Nat>> {
    exact_count_with(desc, n, src, ceiling, None)
}

pub fn exact_count_with<D: Description + ?Sized>(
    desc: &D,
    n: usize,
    src: &mut CoinSource,
    ceiling: &Nat,
    trials: Option<u64>,
) -> Result<SampleReport<Nat>> {
    let census = desc
        .source_census(n)
        .ok_or_else(|| Error::invalid("exact counting needs the source census"))?;
    if &census > ceiling {
        return Err(Error::CeilingExceeded {
            census,
            ceiling: ceiling.clone(),
        });
    }
    if census.is_zero() {
        return Err(Error::EmptySlice(n));
    }
    let epsilon = (nat_to_rat(&census) * rat(3, 1)).recip();
    let report = estimate_census_with(desc, n, &epsilon, src, trials)?;
    Ok(report.map(|v| round_rat(&v).to_biguint().unwrap_or_default()))
}

/// Smallest `k >= 1` with `delta^k <= target`.
pub fn amplify_attempts(delta: &Rat, target: &Rat) -> Result<u64> {
    check_probability(delta, "delta")?;
    check_probability(target, "target delta")?;
    let mut k = 1u64;
    let mut p = delta.clone();
    while &p > target {
        p *= delta;
        k += 1;
        if k > 1 << 20 {
            return Err(Error::SizeGuard("too many amplification attempts".into()));
        }
    }
    Ok(k)
}

/// Repeats a generator whose failure probability is below `delta` until it
/// succeeds, at most enough times to push failure below `target`. The law
/// of successful outputs is unchanged.
pub fn amplify_urg<T>(
    mut base: impl FnMut(&mut CoinSource) -> Result<Option<T>>,
    delta: &Rat,
    target: &Rat,
    src: &mut CoinSource,
) -> Result<SampleReport<T>> {
    let attempts = amplify_attempts(delta, target)?;
    let start = src.bits_consumed();
    for i in 1..=attempts {
        if let Some(v) = base(src)? {
            return Ok(SampleReport {
                value: Some(v),
                trials_used: i,
                bits_used: src.bits_consumed() - start,
            });
        }
    }
    Ok(SampleReport {
        value: None,
        trials_used: attempts,
        bits_used: src.bits_consumed() - start,
    })
}

/// Number of repeats of [`amplify_ras`] for an estimator correct with
/// probability above `1/2 + margin`.
pub fn median_repeats(margin: &Rat, target: &Rat) -> Result<u64> {
    if !(margin > &Rat::zero() && margin < &rat(1, 2)) {
        return Err(Error::invalid("the correctness margin must lie in (0, 1/2)"));
    }
    check_probability(target, "target delta")?;
    trial_budget(&rat(4, 3), &rat(3, 4), &(margin * margin), target)
}

/// Median of repeated estimates, boosting correctness from `1/2 + margin`
/// to `1 - target`.
pub fn amplify_ras(
    base: impl FnMut(&mut CoinSource) -> Result<Option<Rat>>,
    margin: &Rat,
    target: &Rat,
    src: &mut CoinSource,
) -> Result<SampleReport<Rat>> {
    let repeats = median_repeats(margin, target)?;
    amplify_ras_with(base, repeats, src)
}

pub fn amplify_ras_with(
    mut base: impl FnMut(&mut CoinSource) -> Result<Option<Rat>>,
    repeats: u64,
    src: &mut CoinSource,
) -> Result<SampleReport<Rat>> {
    let start = src.bits_consumed();
    let mut values = Vec::new();
    for _ in 0..repeats {
        if let Some(v) = base(src)? {
            values.push(v);
        }
    }
    Ok(SampleReport {
        value: median(values),
        trials_used: repeats,
        bits_used: src.bits_consumed() - start,
    })
}

/// Lower median; `None` for an empty list.
pub fn median<T: Ord>(mut values: Vec<T>) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    values.sort();
    let mid = (values.len() - 1) / 2;
    Some(values.swap_remove(mid))
}

/// Exhaustive consistency check of a description at size `n`: sizes are
/// preserved, `d` matches the preimage counts and the bound, and the source
/// census matches the enumeration. Returns `C_S(n)`.
pub fn check_description<D: Description + ?Sized>(desc: &D, n: usize) -> Result<Nat> {
    let sources = desc
        .enumerate_source(n)
        .ok_or_else(|| Error::invalid("description cannot enumerate its sources"))?;
    if let Some(c) = desc.source_census(n) {
        if c != Nat::from(sources.len()) {
            return Err(Error::invalid(format!(
                "source census {c} differs from {} enumerated sources",
                sources.len()
            )));
        }
    }
    let mut preimages: BTreeMap<D::Target, u64> = BTreeMap::new();
    for t in &sources {
        let s = desc.project(t);
        if s.size() != n {
            return Err(Error::invalid(format!("projection of {t:?} has size {}", s.size())));
        }
        *preimages.entry(s).or_default() += 1;
    }
    let bound = desc.bound(n);
    for (s, count) in &preimages {
        let d = desc.ambiguity(s)?;
        if d != Nat::from(*count) {
            return Err(Error::invalid(format!(
                "ambiguity of {s:?} is {d} but it has {count} preimages"
            )));
        }
        if d > Nat::from(bound) {
            return Err(Error::AmbiguityExceeded {
                found: d,
                bound,
                size: n,
            });
        }
    }
    Ok(Nat::from(preimages.len()))
}

/// Exact law of `1/d(f(t))` under uniform `t`, i.e. `C_S(n)/C_T(n)`.
pub fn mean_inverse_ambiguity<D: Description + ?Sized>(desc: &D, n: usize) -> Result<Rat> {
    let sources = desc
        .enumerate_source(n)
        .ok_or_else(|| Error::invalid("description cannot enumerate its sources"))?;
    if sources.is_empty() {
        return Err(Error::EmptySlice(n));
    }
    let mut sum = Rat::zero();
    for t in &sources {
        sum += nat_to_rat(&desc.ambiguity(&desc.project(t))?).recip();
    }
    Ok(sum / Rat::from_integer(BigInt::from(sources.len())))
}
