//! Exact integer and rational arithmetic.
//!
//! - [`Rat`]: reduced arbitrary-precision fraction
//! - [`ext_gcd`], [`mod_inverse`]: Bezout data and modular inverses
//! - [`HJChain`], [`hj_expand`], [`hj_evaluate`]: Hirzebruch-Jung ("minus")
//!   continued fractions `n/q = b1 - 1/(b2 - 1/(... - 1/bk))`
//! - [`linalg`]: small dense exact solver

pub mod linalg;
mod rat;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub use rat::{ParseRatError, Rat};

/// Shorthand for building a `BigInt` from a machine integer.
pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Returns `(g, x, y)` with `g = gcd(a, b) > 0` and `g = a*x + b*y`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> Result<(BigInt, BigInt, BigInt)> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::GcdOfZeros);
    }
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        Ok((-old_r, -old_s, -old_t))
    } else {
        Ok((old_r, old_s, old_t))
    }
}

/// Inverse of `a` modulo `n`, in `[1, n-1]`.
pub fn mod_inverse(a: &BigInt, n: &BigInt) -> Result<BigInt> {
    if n < &int(2) {
        return Err(Error::BadModulus(n.to_string()));
    }
    let (g, x, _) = ext_gcd(&a.mod_floor(n), n).map_err(|_| Error::NotInvertible {
        value: a.to_string(),
        modulus: n.to_string(),
    })?;
    if !g.is_one() {
        return Err(Error::NotInvertible {
            value: a.to_string(),
            modulus: n.to_string(),
        });
    }
    Ok(x.mod_floor(n))
}

/// Entries `b_i >= 2` of a Hirzebruch-Jung chain; `b_i` is `-(F_i^2)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HJChain(Vec<BigInt>);

impl HJChain {
    pub fn new(entries: Vec<BigInt>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidChain("chain is empty".into()));
        }
        if let Some(bad) = entries.iter().find(|b| **b < int(2)) {
            return Err(Error::InvalidChain(format!("entry {bad} is below 2")));
        }
        Ok(HJChain(entries))
    }

    pub fn from_small(entries: &[i64]) -> Result<Self> {
        Self::new(entries.iter().copied().map(BigInt::from).collect())
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Self {
        HJChain(self.0.iter().rev().cloned().collect())
    }
}

impl fmt::Display for HJChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for HJChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Expands `n/q` (with `n >= 2`, `0 < q < n`, `gcd(n, q) = 1`) as a minus
/// continued fraction.
pub fn hj_expand(n: &BigInt, q: &BigInt) -> Result<HJChain> {
    if n < &int(2) || !q.is_positive() || q >= n {
        return Err(Error::InvalidChain(format!(
            "need n >= 2 and 0 < q < n, got n = {n}, q = {q}"
        )));
    }
    if !n.gcd(q).is_one() {
        return Err(Error::InvalidChain(format!("gcd({n}, {q}) must be 1")));
    }
    let (mut n, mut q) = (n.clone(), q.clone());
    let mut entries = Vec::new();
    while !q.is_zero() {
        let b = n.div_ceil(&q);
        let next = &b * &q - &n;
        n = std::mem::replace(&mut q, next);
        entries.push(b);
    }
    HJChain::new(entries)
}

/// Inverse of [`hj_expand`]: folds the chain from the right.
pub fn hj_evaluate(chain: &HJChain) -> (BigInt, BigInt) {
    let mut iter = chain.entries().iter().rev();
    let last = iter.next().expect("chain is nonempty");
    let (mut n, mut q) = (last.clone(), BigInt::one());
    for b in iter {
        let next = b * &n - &q;
        q = std::mem::replace(&mut n, next);
    }
    (n, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(a: i64, b: i64) -> (i64, i64, i64) {
        let (g, x, y) = ext_gcd(&int(a), &int(b)).unwrap();
        (
            g.try_into().unwrap(),
            x.try_into().unwrap(),
            y.try_into().unwrap(),
        )
    }

    #[test]
    fn ext_gcd_examples() {
        assert_eq!(triple(5, 2), (1, 1, -2));
        assert_eq!(triple(6, 4), (2, 1, -1));
        assert_eq!(triple(7, 0), (7, 1, 0));
        assert_eq!(ext_gcd(&int(0), &int(0)), Err(Error::GcdOfZeros));
    }

    #[test]
    fn ext_gcd_signs() {
        for a in -30i64..=30 {
            for b in -30i64..=30 {
                if a == 0 && b == 0 {
                    continue;
                }
                let (g, x, y) = triple(a, b);
                assert!(g > 0);
                assert_eq!(g, num_integer::gcd(a, b));
                assert_eq!(a * x + b * y, g);
            }
        }
    }

    fn brute_inverse(a: i64, n: i64) -> Option<i64> {
        (1..n).find(|x| (a * x).rem_euclid(n) == 1)
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(&int(2), &int(3)).unwrap(), int(2));
        assert_eq!(mod_inverse(&int(3), &int(7)).unwrap(), int(5));
        for n in 2..20 {
            assert_eq!(mod_inverse(&int(1), &int(n)).unwrap(), int(1));
        }
        assert_eq!(brute_inverse(2, 3), Some(2));
        assert_eq!(brute_inverse(3, 7), Some(5));
    }

    #[test]
    fn mod_inverse_rejects() {
        assert!(matches!(
            mod_inverse(&int(4), &int(6)),
            Err(Error::NotInvertible { .. })
        ));
        assert!(matches!(
            mod_inverse(&int(1), &int(1)),
            Err(Error::BadModulus(_))
        ));
        // negative residues are reduced first
        assert_eq!(mod_inverse(&int(-3), &int(2)).unwrap(), int(1));
    }

    #[test]
    fn mod_inverse_exhaustive_to_500() {
        for n in 2..=500i64 {
            for a in 1..n {
                match mod_inverse(&int(a), &int(n)) {
                    Ok(x) => {
                        let x: i64 = x.try_into().unwrap();
                        assert!((1..n).contains(&x));
                        assert_eq!((a * x) % n, 1);
                        assert_eq!(Some(x), brute_inverse(a, n));
                    }
                    Err(_) => assert_ne!(num_integer::gcd(a, n), 1),
                }
            }
        }
    }

    fn chain(entries: &[i64]) -> HJChain {
        HJChain::from_small(entries).unwrap()
    }

    #[test]
    fn hj_expand_examples() {
        assert_eq!(hj_expand(&int(8), &int(5)).unwrap(), chain(&[2, 3, 2]));
        assert_eq!(hj_expand(&int(3), &int(1)).unwrap(), chain(&[3]));
        for n in 2..15 {
            let expected = vec![2; (n - 1) as usize];
            assert_eq!(hj_expand(&int(n), &int(n - 1)).unwrap(), chain(&expected));
        }
    }

    #[test]
    fn hj_expand_errors() {
        assert!(hj_expand(&int(6), &int(2)).is_err());
        assert!(hj_expand(&int(5), &int(0)).is_err());
        assert!(hj_expand(&int(5), &int(5)).is_err());
        assert!(hj_expand(&int(1), &int(0)).is_err());
    }

    #[test]
    fn hj_evaluate_examples() {
        assert_eq!(hj_evaluate(&chain(&[2, 5, 2])), (int(16), int(9)));
        assert_eq!(hj_evaluate(&chain(&[3])), (int(3), int(1)));
        assert_eq!(hj_evaluate(&chain(&[2, 3, 2])), (int(8), int(5)));
    }

    #[test]
    fn chain_rejects_small_entries() {
        assert!(HJChain::from_small(&[2, 1, 3]).is_err());
        assert!(HJChain::from_small(&[]).is_err());
    }
}
