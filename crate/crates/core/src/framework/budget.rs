use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed};

use crate::{Error, Rat, Result};

const FIXED_BITS: u64 = 256;
const MAX_BUDGET: u64 = 1 << 40;

/// Smallest integer `t >= 1` with `alpha * (1 - beta*epsilon)^t < delta`.
///
/// This sizes every loop constant that the analysis only shows to exist.
/// The search is exact: powers are bracketed in fixed point and resolved
/// with rational arithmetic only when the bracket straddles the threshold.
pub fn trial_budget(alpha: &Rat, beta: &Rat, epsilon: &Rat, delta: &Rat) -> Result<u64> {
    if !alpha.is_positive() || !beta.is_positive() || !epsilon.is_positive() {
        return Err(Error::invalid("trial_budget needs alpha, beta, epsilon > 0"));
    }
    if !delta.is_positive() {
        return Err(Error::invalid("trial_budget needs delta > 0"));
    }
    let x = Rat::one() - beta * epsilon;
    if !x.is_positive() {
        return Err(Error::invalid("trial_budget needs epsilon < 1/beta"));
    }
    let target = delta / alpha;
    let probe = Probe::new(&x, &target);
    if probe.below(1) {
        return Ok(1);
    }
    let mut lo = 1u64;
    let mut hi = 2u64;
    while !probe.below(hi) {
        lo = hi;
        hi *= 2;
        if hi > MAX_BUDGET {
            return Err(Error::SizeGuard(format!(
                "trial budget above {MAX_BUDGET} for epsilon {epsilon}, delta {delta}"
            )));
        }
    }
    // invariant: !below(lo), below(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if probe.below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Decides `x^t < target` for `0 <= x < 1`.
struct Probe<'a> {
    x: &'a Rat,
    target: &'a Rat,
    lo: BigUint,
    hi: BigUint,
}

impl<'a> Probe<'a> {
    fn new(x: &'a Rat, target: &'a Rat) -> Self {
        let scaled = x * Rat::from_integer(BigInt::one() << FIXED_BITS);
        let lo = scaled.floor().to_integer().magnitude().clone();
        let hi = scaled.ceil().to_integer().magnitude().clone();
        Probe { x, target, lo, hi }
    }

    fn below(&self, t: u64) -> bool {
        let num = self.target.numer().magnitude();
        let den = self.target.denom().magnitude();
        let threshold = |v: &BigUint| v * den;
        let scaled_target = num << FIXED_BITS;
        // upper bound already below the target
        if threshold(&fixed_pow(&self.hi, t, true)) < scaled_target {
            return true;
        }
        // lower bound already at or above it
        if threshold(&fixed_pow(&self.lo, t, false)) >= scaled_target {
            return false;
        }
        let exact = num_traits::pow::Pow::pow(self.x, &BigUint::from(t));
        &exact < self.target
    }
}

fn fixed_pow(base: &BigUint, mut t: u64, round_up: bool) -> BigUint {
    let one = BigUint::one() << FIXED_BITS;
    let mul = |a: &BigUint, b: &BigUint| {
        let p = a * b;
        let q = &p >> FIXED_BITS;
        if round_up && (q.clone() << FIXED_BITS) != p {
            q + 1u32
        } else {
            q
        }
    };
    let mut acc = one;
    let mut sq = base.clone();
    while t > 0 {
        if t & 1 == 1 {
            acc = mul(&acc, &sq);
        }
        t >>= 1;
        if t > 0 {
            sq = mul(&sq, &sq);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numutil::rat;

    fn naive(alpha: &Rat, beta: &Rat, eps: &Rat, delta: &Rat) -> u64 {
        let x = Rat::one() - beta * eps;
        let mut v = alpha * &x;
        let mut t = 1;
        while &v >= delta {
            v *= &x;
            t += 1;
        }
        t
    }

    #[test]
    fn unambiguous_sampler_budget() {
        assert_eq!(trial_budget(&rat(4, 3), &rat(3, 8), &rat(1, 1), &rat(1, 4)).unwrap(), 4);
    }

    #[test]
    fn generous_delta_gives_one() {
        assert_eq!(
            trial_budget(&rat(1, 1), &rat(1, 2), &rat(1, 2), &rat(9, 10)).unwrap(),
            1
        );
    }

    #[test]
    fn matches_linear_scan() {
        for (a, b, e, d) in [
            ((8, 3), (3, 4), (1, 64), (1, 4)),
            ((4, 3), (3, 4), (1, 100), (1, 20)),
            ((1, 1), (9, 16), (1, 1), (1, 4)),
            ((4, 3), (3, 8), (1, 7), (1, 4)),
            ((1, 1), (1, 2), (1, 1), (1, 4)),
        ] {
            let args = (rat(a.0, a.1), rat(b.0, b.1), rat(e.0, e.1), rat(d.0, d.1));
            assert_eq!(
                trial_budget(&args.0, &args.1, &args.2, &args.3).unwrap(),
                naive(&args.0, &args.1, &args.2, &args.3)
            );
        }
    }

    #[test]
    fn logarithmic_in_inverse_delta() {
        let (a, b, e) = (rat(4, 3), rat(3, 8), rat(1, 3));
        let mut prev = trial_budget(&a, &b, &e, &rat(1, 2)).unwrap();
        for k in 2..40 {
            let next = trial_budget(&a, &b, &e, &rat(1, 1 << k)).unwrap();
            assert!(next >= prev && next <= prev + 10, "k={k}");
            prev = next;
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(trial_budget(&rat(1, 1), &rat(2, 1), &rat(1, 1), &rat(1, 4)).is_err());
        assert!(trial_budget(&rat(1, 1), &rat(1, 2), &rat(0, 1), &rat(1, 4)).is_err());
    }
}
