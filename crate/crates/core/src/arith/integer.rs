//! Integer helpers: extended Euclid, modular inverses, factorization.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Returns `(g, x, y)` with `a*x + b*y = g` and `g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
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
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `m`, in `[1, m-1]`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Result<BigInt> {
    if *m <= BigInt::one() {
        return Err(Error::Precondition(format!("modulus {m} must exceed 1")));
    }
    let (g, x, _) = ext_gcd(&a.mod_floor(m), m);
    if !g.is_one() {
        return Err(Error::Precondition(format!("{a} is not invertible modulo {m}")));
    }
    Ok(x.mod_floor(m))
}

pub fn is_coprime(a: &BigInt, b: &BigInt) -> bool {
    a.gcd(b).is_one()
}

/// Trial-division factorization; `n = 1` yields an empty list.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Splits `d > 0` as `k^2 * f` with `f` squarefree.
pub fn square_free_split(d: &BigInt) -> (BigInt, BigInt) {
    let mut k = BigInt::one();
    let mut rest = d.clone();
    let mut p = BigInt::from(2u32);
    while &p * &p <= rest {
        let sq = &p * &p;
        while (&rest % &sq).is_zero() {
            rest /= &sq;
            k *= &p;
        }
        p += 1u32;
    }
    (k, rest)
}

/// `floor(n / d)` for `d > 0`.
pub fn floor_div(n: &BigInt, d: &BigInt) -> BigInt {
    n.div_floor(d)
}
