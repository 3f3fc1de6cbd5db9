//! The permanent of a 0/1 matrix read off `msf(p_A)`, where
//! `p_A = prod_i sum_j a_ij x_j`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::circuit::{msf_coefficient, Circuit, CircuitBuilder};
use crate::text::lines;
use crate::{Error, Int, Nat, Rat, Result};

/// Largest order the permanent routines accept.
pub const PERM_MAX_N: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix01 {
    rows: Vec<Vec<bool>>,
}

impl Matrix01 {
    pub fn new(rows: Vec<Vec<bool>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("the matrix must be square and nonempty"));
        }
        Ok(Matrix01 { rows })
    }

    pub fn from_ints(rows: &[&[u8]]) -> Result<Self> {
        Matrix01::new(rows.iter().map(|r| r.iter().map(|&v| v != 0).collect()).collect())
    }

    pub fn identity(n: usize) -> Self {
        Matrix01 {
            rows: (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect(),
        }
    }

    pub fn ones(n: usize) -> Self {
        Matrix01 {
            rows: vec![vec![true; n]; n],
        }
    }

    /// One row per line, entries `0`/`1` separated by spaces or not.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut width = None;
        for line in lines(text) {
            let mut row = Vec::new();
            for ch in line.words.concat().chars() {
                match ch {
                    '0' => row.push(false),
                    '1' => row.push(true),
                    other => return Err(line.err(format!("entry `{other}` is not 0 or 1"))),
                }
            }
            if *width.get_or_insert(row.len()) != row.len() {
                return Err(line.err("rows differ in length"));
            }
            rows.push(row);
        }
        if rows.first().is_some_and(|r| r.len() != rows.len()) {
            return Err(Error::parse(
                0,
                format!("{} rows of length {}", rows.len(), rows[0].len()),
            ));
        }
        Matrix01::new(rows).map_err(|e| Error::parse(0, e.to_string()))
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i][j]
    }
}

impl fmt::Display for Matrix01 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// The size `O(n^2)` product-of-row-sums circuit for `p_A`.
pub fn perm_circuit(a: &Matrix01) -> Circuit {
    let n = a.n();
    let mut b = CircuitBuilder::new(n);
    let rows: Vec<usize> = (0..n)
        .map(|i| {
            let xs = (0..n).filter(|&j| a.get(i, j)).map(|j| b.input(j)).collect();
            b.add(xs)
        })
        .collect();
    let out = b.mul(rows);
    b.finish(out)
}

/// A sum-of-products circuit for `msf(p_A)`, by explicit (exponential)
/// expansion.
pub fn msf_perm_circuit(a: &Matrix01) -> Result<Circuit> {
    guard(a)?;
    Ok(perm_circuit(a).expand(true, 1 << a.n())?.to_circuit())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PermMethod {
    /// `[x_1 ... x_n] msf(p_A)`.
    Coefficient,
    /// The fractional part of `2^{s(n-1)} msf(p_A)(2^-s, ...)`, `s = n^2`.
    Fraction,
    BruteForce,
}

impl FromStr for PermMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coefficient" => Ok(PermMethod::Coefficient),
            "fraction" => Ok(PermMethod::Fraction),
            "bruteforce" | "brute-force" => Ok(PermMethod::BruteForce),
            other => Err(Error::invalid(format!("unknown permanent method `{other}`"))),
        }
    }
}

fn guard(a: &Matrix01) -> Result<()> {
    if a.n() > PERM_MAX_N {
        return Err(Error::SizeGuard(format!("matrix order {} above {PERM_MAX_N}", a.n())));
    }
    Ok(())
}

pub fn permanent(a: &Matrix01, method: PermMethod) -> Result<Nat> {
    guard(a)?;
    match method {
        PermMethod::BruteForce => Ok(brute_permanent(a)),
        PermMethod::Coefficient => {
            let c = msf_perm_circuit(a)?;
            let v = msf_coefficient(&c, &vec![1; a.n()]);
            Ok(v.to_biguint().expect("a permanent is nonnegative"))
        }
        PermMethod::Fraction => Ok(fraction_parts(a)?.2),
    }
}

/// `(floor, fractional part, perm)` of `2^{s(n-1)} msf(p_A)(2^-s, ...)`
/// with `s = n^2`; the floor is `2^{s(n-1)} q'_A(2^-s)` and
/// `perm = 2^s * frac`.
pub fn fraction_parts(a: &Matrix01) -> Result<(Int, Rat, Nat)> {
    let n = a.n();
    let s = n * n;
    let c = msf_perm_circuit(a)?;
    let point = vec![Rat::new(Int::one(), BigInt::one() << s); n];
    let v = c.eval(&point) * Rat::from_integer(BigInt::one() << (s * (n - 1)));
    let floor = v.numer().div_floor(v.denom());
    let frac = &v - Rat::from_integer(floor.clone());
    let scaled = &frac * Rat::from_integer(BigInt::one() << s);
    if !scaled.is_integer() || scaled.is_negative() {
        return Err(Error::invalid(format!(
            "2^s times the fractional part is {scaled}, not a natural"
        )));
    }
    let perm = scaled.to_integer().to_biguint().expect("nonnegative");
    Ok((floor, frac, perm))
}

/// Sum over permutations.
pub fn brute_permanent(a: &Matrix01) -> Nat {
    fn go(a: &Matrix01, i: usize, used: &mut [bool]) -> Nat {
        if i == a.n() {
            return Nat::one();
        }
        let mut total = Nat::zero();
        for j in 0..a.n() {
            if a.get(i, j) && !used[j] {
                used[j] = true;
                total += go(a, i + 1, used);
                used[j] = false;
            }
        }
        total
    }
    go(a, 0, &mut vec![false; a.n()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numutil::rat;

    const ALL: [PermMethod; 3] = [PermMethod::Coefficient, PermMethod::Fraction, PermMethod::BruteForce];

    fn cyclic() -> Matrix01 {
        Matrix01::from_ints(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]).unwrap()
    }

    /// Sum over all maps rows -> columns that happen to be bijective,
    /// written independently of the recursive enumeration.
    fn permanent_by_maps(a: &Matrix01) -> u64 {
        let n = a.n();
        let mut total = 0;
        for code in 0..n.pow(n as u32) {
            let cols: Vec<usize> = (0..n).map(|i| code / n.pow(i as u32) % n).collect();
            let mut seen = vec![false; n];
            if cols.iter().all(|&c| !std::mem::replace(&mut seen[c], true)) && (0..n).all(|i| a.get(i, cols[i])) {
                total += 1;
            }
        }
        total
    }

    #[test]
    fn circuit_shapes() {
        let id = perm_circuit(&Matrix01::identity(2));
        assert_eq!(id.to_string(), "vars 2\ng0 in 1\ng1 in 2\ng2 mul g0 g1\nout g2");
        let ones = perm_circuit(&Matrix01::ones(2));
        assert_eq!(ones.eval(&[rat(1, 1), rat(1, 1)]), rat(4, 1));
        assert!(ones.size() <= 2 * 2 + 2 + 1);
    }

    #[test]
    fn first_unit_vector() {
        for a in [Matrix01::ones(3), cyclic(), Matrix01::identity(3)] {
            let mut e1 = vec![rat(0, 1); 3];
            e1[0] = rat(1, 1);
            let expect = (0..3).all(|i| a.get(i, 0));
            assert_eq!(perm_circuit(&a).eval(&e1), rat(expect as i64, 1));
        }
    }

    #[test]
    fn examples() {
        for m in ALL {
            assert_eq!(permanent(&Matrix01::identity(3), m).unwrap(), Nat::one());
            assert_eq!(permanent(&Matrix01::ones(3), m).unwrap(), Nat::from(6u32));
            assert_eq!(permanent(&cyclic(), m).unwrap(), Nat::from(2u32));
        }
    }

    #[test]
    fn methods_agree_exhaustively_up_to_three() {
        for n in 1..=3usize {
            for code in 0u32..(1 << (n * n)) {
                let rows = (0..n)
                    .map(|i| (0..n).map(|j| code >> (i * n + j) & 1 == 1).collect())
                    .collect();
                let a = Matrix01::new(rows).unwrap();
                let expect = Nat::from(permanent_by_maps(&a));
                for m in ALL {
                    assert_eq!(permanent(&a, m).unwrap(), expect, "{a}");
                }
            }
        }
    }

    #[test]
    fn fraction_floor_is_integer() {
        let a = Matrix01::ones(4);
        let (floor, frac, perm) = fraction_parts(&a).unwrap();
        assert!(frac >= rat(0, 1) && frac < rat(1, 1));
        assert_eq!(perm, Nat::from(24u32));
        assert!(floor.is_positive());
    }

    #[test]
    fn substitution_identity() {
        // msf(p_A)(2^-s, ...) = msf(p_A[x_i -> x_i1 ... x_is])(1/2, ...)
        let a = cyclic();
        let (n, s) = (3, 3);
        let mut b = CircuitBuilder::new(n * s);
        let rows: Vec<usize> = (0..n)
            .map(|i| {
                let terms = (0..n)
                    .filter(|&j| a.get(i, j))
                    .map(|j| {
                        let q = (0..s).map(|t| b.input(j * s + t)).collect();
                        b.mul(q)
                    })
                    .collect();
                b.add(terms)
            })
            .collect();
        let out = b.mul(rows);
        let tilde = b.finish(out).expand(true, 1 << 12).unwrap();
        let lhs = msf_perm_circuit(&a).unwrap().eval(&vec![rat(1, 8); n]);
        assert_eq!(tilde.eval(&vec![rat(1, 2); n * s]), lhs);
    }

    #[test]
    fn guard_and_parse() {
        assert!(matches!(
            permanent(&Matrix01::ones(PERM_MAX_N + 1), PermMethod::BruteForce),
            Err(Error::SizeGuard(_))
        ));
        assert_eq!(Matrix01::parse("110\n0 1 1\n1 0 1\n").unwrap(), cyclic());
        assert!(matches!(Matrix01::parse("11\n12\n"), Err(Error::Parse { line: 2, .. })));
        assert!(Matrix01::parse("11\n11\n11\n").is_err());
        assert_eq!("fraction".parse::<PermMethod>().unwrap(), PermMethod::Fraction);
    }
}
