//! Exact integers, rationals, p-adic valuations, modular arithmetic and
//! Chinese remaindering.
//!
//! Rationals are `num_rational::BigRational`, which keeps `gcd(num, den) = 1`
//! and `den > 0` after every operation. Primes are plain `u64` values below
//! 2^31 so that residues and their products fit in native words.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rat = BigRational;

/// Largest prime accepted anywhere in the crate (exclusive).
pub const PRIME_LIMIT: u64 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime {0} exceeds the supported bound 2^31")]
    PrimeTooLarge(u64),
    #[error("inconsistent congruences: {0} and {1}")]
    Inconsistent(String, String),
    #[error("modulus must be positive, got {0}")]
    BadModulus(String),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("{0} is not invertible modulo {1}")]
    NotInvertible(String, u64),
}

/// A p-adic valuation: an integer, or `Inf` for zero.
///
/// `Fin(_) < Inf`, so `min` over valuations behaves as expected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Val {
    Fin(i64),
    Inf,
}

impl Val {
    pub fn finite(self) -> Option<i64> {
        match self {
            Val::Fin(v) => Some(v),
            Val::Inf => None,
        }
    }

    pub fn is_inf(self) -> bool {
        self == Val::Inf
    }
}

impl std::ops::Add for Val {
    type Output = Val;
    fn add(self, rhs: Val) -> Val {
        match (self, rhs) {
            (Val::Fin(a), Val::Fin(b)) => Val::Fin(a + b),
            _ => Val::Inf,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Fin(v) => write!(f, "{v}"),
            Val::Inf => write!(f, "+inf"),
        }
    }
}

// ---------------------------------------------------------------------------
// Primes

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod_u128(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128 % m as u128;
    let mut base = b as u128 % m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m as u128;
        }
        base = base * base % m as u128;
        e >>= 1;
    }
    acc as u64
}

/// Validates that `p` is a prime below [`PRIME_LIMIT`].
pub fn check_prime(p: u64) -> Result<u64, ArithError> {
    if p >= PRIME_LIMIT {
        return Err(ArithError::PrimeTooLarge(p));
    }
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    Ok(p)
}

/// All primes `<= n` by a plain sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u64))
        .collect()
}

pub fn next_prime(n: u64) -> u64 {
    let mut k = n + 1;
    while !is_prime(k) {
        k += 1;
    }
    k
}

// ---------------------------------------------------------------------------
// Valuations

pub fn valuation_int(n: &BigInt, p: u64) -> Val {
    if n.is_zero() {
        return Val::Inf;
    }
    let p = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            break;
        }
        m = q;
        v += 1;
    }
    Val::Fin(v)
}

/// `v_p(x)`: the exponent of `p` in `x`, `Inf` for zero.
pub fn valuation(x: &Rat, p: u64) -> Result<Val, ArithError> {
    check_prime(p)?;
    Ok(valuation_unchecked(x, p))
}

/// [`valuation`] without the primality check, for inner loops that already
/// validated `p`.
pub fn valuation_unchecked(x: &Rat, p: u64) -> Val {
    if x.is_zero() {
        return Val::Inf;
    }
    let vn = valuation_int(x.numer(), p).finite().unwrap();
    let vd = valuation_int(x.denom(), p).finite().unwrap();
    Val::Fin(vn - vd)
}

pub fn is_p_integral(x: &Rat, p: u64) -> bool {
    !(x.denom() % BigInt::from(p)).is_zero()
}

/// Reduction of a p-integral rational modulo `p`, `None` when `p` divides
/// the denominator.
pub fn rat_mod(x: &Rat, p: u64) -> Option<u64> {
    let den = mod_big(x.denom(), p);
    if den == 0 {
        return None;
    }
    let num = mod_big(x.numer(), p);
    Some(mul_mod(num, inv_mod(den, p)?, p))
}

/// Reduction of a p-integral rational modulo `m` (any modulus coprime to its
/// denominator).
pub fn rat_mod_big(x: &Rat, m: &BigInt) -> Option<BigInt> {
    let den = x.denom().mod_floor(m);
    let inv = inv_mod_big(&den, m)?;
    Some((x.numer() * inv).mod_floor(m))
}

pub fn mod_big(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

// ---------------------------------------------------------------------------
// Machine-word modular arithmetic (moduli < 2^31 keep products in u64)

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(b: u64, e: u64, m: u64) -> u64 {
    pow_mod_u128(b, e, m)
}

pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd(a as i128 % m as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

pub fn inv_mod_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Legendre symbol `(a | p)` for an odd prime `p`: 0, 1 or -1.
pub fn legendre(a: i64, p: u64) -> i32 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

// ---------------------------------------------------------------------------
// Congruences

/// The residue class `residue mod modulus`, normalized to `0 <= residue < modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Congruence {
    #[serde(with = "bigint_string")]
    pub residue: BigInt,
    #[serde(with = "bigint_string")]
    pub modulus: BigInt,
}

impl Congruence {
    pub fn new(residue: impl Into<BigInt>, modulus: impl Into<BigInt>) -> Result<Self, ArithError> {
        let modulus = modulus.into();
        if !modulus.is_positive() {
            return Err(ArithError::BadModulus(modulus.to_string()));
        }
        let residue = residue.into().mod_floor(&modulus);
        Ok(Congruence { residue, modulus })
    }

    /// The trivial class `0 mod 1`.
    pub fn everything() -> Self {
        Congruence { residue: BigInt::zero(), modulus: BigInt::one() }
    }

    pub fn contains(&self, n: &BigInt) -> bool {
        n.mod_floor(&self.modulus) == self.residue
    }

    /// The `k`-th non-negative member.
    pub fn member(&self, k: u64) -> BigInt {
        &self.residue + &self.modulus * BigInt::from(k)
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.residue, self.modulus)
    }
}

/// Combines congruences into one. Moduli need not be coprime as long as the
/// residues agree on every overlap; the result has modulus equal to the lcm
/// (the product when pairwise coprime).
pub fn crt(congruences: &[Congruence]) -> Result<Congruence, ArithError> {
    let mut acc = Congruence::everything();
    for c in congruences {
        acc = crt_pair(&acc, c)?;
    }
    Ok(acc)
}

fn crt_pair(a: &Congruence, b: &Congruence) -> Result<Congruence, ArithError> {
    let g = a.modulus.gcd(&b.modulus);
    let diff = &b.residue - &a.residue;
    if !(&diff % &g).is_zero() {
        return Err(ArithError::Inconsistent(a.to_string(), b.to_string()));
    }
    let m1 = &a.modulus / &g;
    let m2 = &b.modulus / &g;
    let lcm = &a.modulus * &m2;
    // x = a.r + a.m * k with a.m * k = diff (mod b.m)  <=>  m1 * k = diff/g (mod m2)
    let k = if m2.is_one() {
        BigInt::zero()
    } else {
        let inv = inv_mod_big(&m1, &m2).expect("m1 and m2 are coprime");
        ((&diff / &g) * inv).mod_floor(&m2)
    };
    Congruence::new(&a.residue + &a.modulus * k, lcm)
}

// ---------------------------------------------------------------------------
// Rational parsing and reconstruction

/// Parses `"a"`, `"-a"`, `"a/b"` or `"-a/b"`.
pub fn parse_rat(s: &str) -> Result<Rat, ArithError> {
    let s = s.trim();
    let err = || ArithError::Parse(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| err())?;
    let den = BigInt::from_str(den).map_err(|_| err())?;
    if den.is_zero() || den.is_negative() {
        return Err(err());
    }
    Ok(Rat::new(num, den))
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Finds `a/b` with `|a|, |b| <= sqrt(m/2)` and `a = b * x (mod m)`.
pub fn rational_reconstruct(x: &BigInt, m: &BigInt) -> Option<Rat> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), x.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rat::new(r1, t1))
}

// ---------------------------------------------------------------------------
// Integer factorization (trial division + Pollard-Brent)

/// Prime factorization of `|n|`. Factors that resist Pollard-Brent within the
/// iteration budget come back in `unfactored`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntFactorization {
    pub primes: Vec<(BigUint, u32)>,
    pub unfactored: Vec<BigUint>,
}

pub fn factor_integer(n: &BigInt) -> IntFactorization {
    let mut out = IntFactorization::default();
    let mut n = n.magnitude().clone();
    if n.is_zero() {
        return out;
    }
    let mut found: Vec<BigUint> = Vec::new();
    let mut p = 2u64;
    while p < 10_000 {
        let bp = BigUint::from(p);
        if &bp * &bp > n {
            break;
        }
        while (&n % &bp).is_zero() {
            n /= &bp;
            found.push(bp.clone());
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            found.push(m);
            continue;
        }
        match pollard_brent(&m, 1 << 18) {
            Some(d) => {
                stack.push(&m / &d);
                stack.push(d);
            }
            None => out.unfactored.push(m),
        }
    }
    found.sort();
    for f in found {
        match out.primes.last_mut() {
            Some((q, e)) if *q == f => *e += 1,
            _ => out.primes.push((f, 1)),
        }
    }
    out
}

/// Miller-Rabin with fixed bases; deterministic below 3.3e24.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut r = 0;
    while d.is_even() {
        d >>= 1;
        r += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..r {
            x = &x * &x % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint, budget: u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let one = BigUint::one();
    for c in 1u32..20 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = one.clone();
        let mut g = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut steps = 0u64;
        while g == one && steps < budget {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..std::cmp::min(128, r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = q * diff % n;
                }
                g = q.gcd(n);
                k += 128;
            }
            steps += r;
            r *= 2;
        }
        if g == *n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if g != one && g != *n {
            return Some(g);
        }
    }
    None
}

/// Distinct prime divisors of `n` that fit in `u64`, plus whatever could not
/// be factored.
pub fn prime_divisors(n: &BigInt) -> (Vec<u64>, Vec<BigUint>) {
    let f = factor_integer(n);
    let mut small = Vec::new();
    let mut rest = f.unfactored;
    for (q, _) in f.primes {
        match q.to_u64() {
            Some(v) => small.push(v),
            None => rest.push(q),
        }
    }
    (small, rest)
}

pub(crate) mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(&s).map_err(serde::de::Error::custom)
    }
}

pub(crate) mod rat_string {
    use super::Rat;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }
}
