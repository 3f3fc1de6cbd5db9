//! Exact arithmetic helpers, the coin source and the base numeric procedures.

mod coin;

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use coin::{condition_on_success, exact_law, CoinSource};

use crate::{Error, Nat, Rat, Result};

/// Count type for census and multiplicity computations: a commutative
/// semiring of naturals. Fixed-width implementations overflow like the
/// underlying integer; [`Nat`] is exact.
pub trait Count:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Mul<Output = Self>
    + for<'a> AddAssign<&'a Self>
    + Send
    + Sync
{
    fn to_nat(&self) -> Nat;
}

impl Count for u64 {
    fn to_nat(&self) -> Nat {
        Nat::from(*self)
    }
}

impl Count for u128 {
    fn to_nat(&self) -> Nat {
        Nat::from(*self)
    }
}

impl Count for BigUint {
    fn to_nat(&self) -> Nat {
        self.clone()
    }
}

/// Scalar type circuits can be evaluated over: a commutative ring with the
/// constants `-1, 0, 1`.
pub trait Field: Clone + Debug + Zero + One + Neg<Output = Self> + Add<Output = Self> + Mul<Output = Self> {}

impl<T> Field for T where T: Clone + Debug + Zero + One + Neg<Output = T> + Add<Output = T> + Mul<Output = T> {}

/// `ceil(log2 n)`, the number of bits needed to index `{1..n}`.
pub fn bit_size(n: &Nat) -> Result<u64> {
    if n.is_zero() {
        return Err(Error::invalid("bit_size of 0"));
    }
    Ok((n - 1u32).bits())
}

/// `lcm{1..n}`.
pub fn lcm_upto(n: u64) -> Nat {
    (1..=n.max(1)).fold(Nat::one(), |acc, k| acc.lcm(&Nat::from(k)))
}

/// Number of rejection trials `ceil(log2(1/delta))`, at least 1.
pub fn trials_for(delta: &Rat) -> Result<u64> {
    check_probability(delta, "delta")?;
    Ok(ceil_log2(&delta.recip()).max(1))
}

pub(crate) fn check_probability(p: &Rat, name: &str) -> Result<()> {
    if !p.is_positive() || p >= &Rat::one() {
        return Err(Error::invalid(format!("{name} must lie in (0,1), got {p}")));
    }
    Ok(())
}

/// Smallest `t >= 0` with `2^t >= x`, for positive `x`.
pub fn ceil_log2(x: &Rat) -> u64 {
    assert!(x.is_positive());
    let num = x.numer().magnitude();
    let den = x.denom().magnitude();
    // Start from the bit-length estimate and correct by at most one step.
    let mut t = num.bits().saturating_sub(den.bits());
    while (den << t) < *num {
        t += 1;
    }
    while t > 0 && (den << (t - 1)) >= *num {
        t -= 1;
    }
    t
}

/// Uniform integer in `{1..n}` by rejection (Algorithm 1): at most
/// `trials_for(delta)` draws of `bit_size(n)` bits. `None` is the failure
/// outcome.
pub fn gen_uniform(src: &mut CoinSource, n: &Nat, delta: &Rat) -> Result<Option<Nat>> {
    let trials = trials_for(delta)?;
    gen_uniform_trials(src, n, trials)
}

/// [`gen_uniform`] with an explicit trial count.
pub fn gen_uniform_trials(src: &mut CoinSource, n: &Nat, trials: u64) -> Result<Option<Nat>> {
    let width = bit_size(n)?;
    for _ in 0..trials {
        let u = src.draw_bits(width) + 1u32;
        if &u <= n {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

pub(crate) fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn nat_to_rat(n: &Nat) -> Rat {
    Rat::from_integer(BigInt::from(n.clone()))
}

/// Nearest integer, halves rounded up.
pub(crate) fn round_rat(x: &Rat) -> BigInt {
    (x + rat(1, 2)).floor().to_integer()
}
