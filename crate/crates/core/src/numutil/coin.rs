use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::{Nat, Rat};

/// A replayable stream of unbiased bits, the only source of randomness in
/// the crate.
///
/// Draws are little-endian: the first bit read carries weight `2^0`. A
/// source is either a keyed ChaCha stream or an explicit finite tape; reading
/// past the end of a tape yields zeros and flags the source as overrun.
#[derive(Clone, Debug)]
pub struct CoinSource {
    inner: Inner,
    bits_consumed: u64,
}

#[derive(Clone, Debug)]
enum Inner {
    Stream {
        seed: u64,
        rng: Box<ChaCha8Rng>,
        word: u64,
        avail: u32,
    },
    Tape {
        bits: Vec<bool>,
        pos: usize,
        overrun: bool,
    },
}

impl CoinSource {
    pub fn from_seed(seed: u64) -> Self {
        CoinSource {
            inner: Inner::Stream {
                seed,
                rng: Box::new(ChaCha8Rng::seed_from_u64(seed)),
                word: 0,
                avail: 0,
            },
            bits_consumed: 0,
        }
    }

    pub fn from_tape(bits: impl Into<Vec<bool>>) -> Self {
        CoinSource {
            inner: Inner::Tape {
                bits: bits.into(),
                pos: 0,
                overrun: false,
            },
            bits_consumed: 0,
        }
    }

    /// Seed of a stream source, `None` for a tape.
    pub fn seed(&self) -> Option<u64> {
        match &self.inner {
            Inner::Stream { seed, .. } => Some(*seed),
            Inner::Tape { .. } => None,
        }
    }

    pub fn bits_consumed(&self) -> u64 {
        self.bits_consumed
    }

    /// True once a tape source has been asked for more bits than it holds.
    pub fn is_overrun(&self) -> bool {
        matches!(self.inner, Inner::Tape { overrun: true, .. })
    }

    pub fn next_bit(&mut self) -> bool {
        self.bits_consumed += 1;
        match &mut self.inner {
            Inner::Stream { rng, word, avail, .. } => {
                if *avail == 0 {
                    *word = rng.next_u64();
                    *avail = 64;
                }
                let bit = *word & 1 == 1;
                *word >>= 1;
                *avail -= 1;
                bit
            }
            Inner::Tape { bits, pos, overrun } => match bits.get(*pos) {
                Some(&b) => {
                    *pos += 1;
                    b
                }
                None => {
                    *overrun = true;
                    false
                }
            },
        }
    }

    /// The integer `sum_j 2^j R(i+j)` formed by the next `k` bits.
    pub fn draw_bits(&mut self, k: u64) -> Nat {
        if k <= 64 {
            return BigUint::from(self.draw_u64(k as u32));
        }
        let mut digits = vec![0u64; k.div_ceil(64) as usize];
        for j in 0..k {
            if self.next_bit() {
                digits[(j / 64) as usize] |= 1 << (j % 64);
            }
        }
        let mut out = BigUint::zero();
        for d in digits.iter().rev() {
            out <<= 64u32;
            out += BigUint::from(*d);
        }
        out
    }

    /// Same as [`draw_bits`](Self::draw_bits) for widths up to 64.
    pub fn draw_u64(&mut self, k: u32) -> u64 {
        assert!(k <= 64, "draw_u64 width {k} above 64");
        let mut out = 0u64;
        for j in 0..k {
            if self.next_bit() {
                out |= 1 << j;
            }
        }
        out
    }
}

/// Exact output law of a randomized procedure, obtained by enumerating every
/// random tape it can read.
///
/// The tape tree is explored adaptively: a prefix is extended only when the
/// procedure overran it, so each leaf is a tape that the procedure consumed
/// exactly, and its probability is `2^-len`. Panics after `max_leaves`
/// leaves.
pub fn exact_law<T, F>(mut run: F, max_leaves: usize) -> BTreeMap<T, Rat>
where
    T: Ord,
    F: FnMut(&mut CoinSource) -> T,
{
    let mut law: BTreeMap<T, Rat> = BTreeMap::new();
    let mut stack: Vec<Vec<bool>> = vec![Vec::new()];
    let mut leaves = 0usize;
    while let Some(prefix) = stack.pop() {
        let mut src = CoinSource::from_tape(prefix.clone());
        let out = run(&mut src);
        if src.is_overrun() {
            let mut zero = prefix.clone();
            zero.push(false);
            let mut one = prefix;
            one.push(true);
            stack.push(one);
            stack.push(zero);
            continue;
        }
        leaves += 1;
        assert!(leaves <= max_leaves, "tape enumeration exceeded {max_leaves} leaves");
        let weight = Rat::new(num_bigint::BigInt::one(), num_bigint::BigInt::one() << prefix.len());
        *law.entry(out).or_insert_with(Rat::zero) += weight;
    }
    law
}

/// Conditional law of the `Some` outcomes of `law`, and the mass of `None`.
pub fn condition_on_success<T: Ord + Clone>(law: &BTreeMap<Option<T>, Rat>) -> (BTreeMap<T, Rat>, Rat) {
    let fail = law.get(&None).cloned().unwrap_or_else(Rat::zero);
    let ok = Rat::one() - &fail;
    let cond = law
        .iter()
        .filter_map(|(k, p)| k.as_ref().map(|v| (v.clone(), p / &ok)))
        .collect();
    (cond, fail)
}
