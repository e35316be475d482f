//! Shared fixtures and independent oracles for the integration tests. Nothing
//! here calls into the library's number theory: symbols, shapes and
//! generators are computed from first principles with plain integers.
#![allow(dead_code)]

use std::path::PathBuf;

use galspec::arith::Rat;
use galspec::family::Family;
use galspec::poly::{Poly, Var};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

pub fn manifest_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../manifests").join(format!("{name}.json"))
}

pub fn manifest(name: &str) -> Family {
    Family::load(manifest_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn q(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn qq(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

pub fn is_prime_naive(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn odd_primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(3)..=hi).filter(|&n| is_prime_naive(n)).collect()
}

/// Legendre symbol by Euler's criterion.
pub fn euler(a: i64, p: u64) -> i32 {
    let r = a.rem_euclid(p as i64) as u128;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p as u128 - 1) / 2, p as u128) == 1 {
        1
    } else {
        -1
    }
}

/// v_p of a nonzero integer.
pub fn vp(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    while (&n % &pb).is_zero() {
        n /= &pb;
        k += 1;
    }
    k
}

/// Unit part of n at p, reduced mod p.
fn unit_mod(n: &BigInt, p: u64) -> i64 {
    let pb = BigInt::from(p);
    let mut n = n.clone();
    while (&n % &pb).is_zero() {
        n /= &pb;
    }
    (n % &pb).to_i64().unwrap().rem_euclid(p as i64)
}

/// (e, f) factors of X^2 - t0 over ℚ_p, p odd, t0 a nonzero integer.
pub fn x2_shape(t0: i64, p: u64) -> Vec<(usize, usize)> {
    let t = BigInt::from(t0);
    if vp(&t, p) % 2 == 1 {
        return vec![(2, 1)];
    }
    match euler(unit_mod(&t, p), p) {
        1 => vec![(1, 1), (1, 1)],
        _ => vec![(1, 2)],
    }
}

/// (e, f) factors of X^3 - t0 over ℚ_p, p ∤ 6, t0 a nonzero integer.
pub fn x3_shape(t0: i64, p: u64) -> Vec<(usize, usize)> {
    let t = BigInt::from(t0);
    if !vp(&t, p).is_multiple_of(3) {
        return vec![(3, 1)];
    }
    if p % 3 == 2 {
        return vec![(1, 2), (1, 1)];
    }
    let u = unit_mod(&t, p) as u128;
    if pow_mod(u, (p as u128 - 1) / 3, p as u128) == 1 {
        vec![(1, 1), (1, 1), (1, 1)]
    } else {
        vec![(1, 3)]
    }
}

/// Expanded inertia partition from (e, f) pairs.
pub fn expand(shape: &[(usize, usize)]) -> Vec<usize> {
    let mut v: Vec<usize> = shape.iter().flat_map(|&(e, f)| std::iter::repeat_n(e, f)).collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

pub fn sorted_shape(mut s: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    s.sort_unstable_by(|a, b| b.cmp(a));
    s
}

fn int_poly(c: &[BigInt]) -> Poly<Rat> {
    Poly::new(Var::X, c.iter().map(|x| Rat::from_integer(x.clone())).collect())
}

fn mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// A product of Schönemann polynomials φ_i^{e_i} + p·c_i + p²·r_i(X) with
/// pairwise distinct irreducible φ̄_i mod p and p ∤ c_i. Each factor is
/// irreducible over ℚ_p with ramification e_i and residue degree deg φ_i, and
/// its ring of integers is generated by a root, so the shape and the
/// discriminant valuation are known in advance.
#[derive(Clone, Debug)]
pub struct TameInstance {
    pub p: u64,
    pub poly: Poly<Rat>,
    pub expected: Vec<(usize, usize)>,
}

/// Spec of one factor: residue-field degree (1 or 2), ramification e, shift
/// a selecting φ, constant c, and perturbation coefficients.
#[derive(Clone, Debug)]
struct FactorSpec {
    f: usize,
    e: usize,
    a: u64,
    c: u64,
    r: Vec<i64>,
}

fn least_nonresidue(p: u64) -> u64 {
    (2..p).find(|&n| euler(n as i64, p) == -1).unwrap()
}

fn build_instance(p: u64, specs: &[FactorSpec]) -> Option<TameInstance> {
    let mut poly = vec![BigInt::from(1)];
    let mut expected = Vec::new();
    let mut phis: Vec<(usize, u64)> = Vec::new();
    let nr = least_nonresidue(p) as i64;
    for s in specs {
        if (s.e as u64).is_multiple_of(p) || phis.contains(&(s.f, s.a % p)) {
            return None;
        }
        phis.push((s.f, s.a % p));
        let a = (s.a % p) as i64;
        // φ = X - a, or (X - a)^2 - nr which is irreducible mod p.
        let phi: Vec<BigInt> = match s.f {
            1 => vec![BigInt::from(-a), BigInt::from(1)],
            _ => vec![BigInt::from(a * a - nr), BigInt::from(-2 * a), BigInt::from(1)],
        };
        let mut g = vec![BigInt::from(1)];
        for _ in 0..s.e {
            g = mul(&g, &phi);
        }
        let pb = BigInt::from(p);
        g[0] += &pb * BigInt::from(s.c % (p - 1) + 1);
        let top = g.len() - 1;
        for (k, &x) in s.r.iter().enumerate().take(top) {
            g[k] += &pb * &pb * BigInt::from(x);
        }
        poly = mul(&poly, &g);
        expected.push((s.e, s.f));
    }
    Some(TameInstance { p, poly: int_poly(&poly), expected: sorted_shape(expected) })
}

pub fn tame_instance() -> impl Strategy<Value = TameInstance> {
    let primes: Vec<u64> = odd_primes(3, 97);
    let factor = (1usize..=2, 1usize..=4, 0u64..97, 0u64..1000, proptest::collection::vec(-3i64..=3, 0..6))
        .prop_map(|(f, e, a, c, r)| FactorSpec { f, e, a, c, r });
    (proptest::sample::select(primes), proptest::collection::vec(factor, 1..=3)).prop_filter_map(
        "degree at most 6, tame, distinct residues",
        |(p, mut specs)| {
            let mut total = 0;
            specs.retain(|s| {
                total += s.e * s.f;
                total <= 6
            });
            if specs.is_empty() {
                return None;
            }
            build_instance(p, &specs)
        },
    )
}

/// Least non-negative representative of `x` mod m for an integer rational.
pub fn int_of(x: &Rat) -> BigInt {
    assert!(x.is_integer());
    x.to_integer()
}

pub fn abs_i64(x: &Rat) -> i64 {
    int_of(x).abs().to_i64().unwrap()
}

fn trim(mut a: Vec<i128>) -> Vec<i128> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: i128, p: i128) -> i128 {
    pow_mod(a.rem_euclid(p) as u128, (p - 2) as u128, p as u128) as i128
}

fn gcd_mod(mut a: Vec<i128>, mut b: Vec<i128>, p: i128) -> Vec<i128> {
    while !b.is_empty() {
        let inv = inv_mod(*b.last().unwrap(), p);
        while a.len() >= b.len() {
            let c = a.last().unwrap() * inv % p;
            let shift = a.len() - b.len();
            for (i, x) in b.iter().enumerate() {
                a[i + shift] = (a[i + shift] - c * x).rem_euclid(p);
            }
            a = trim(a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

/// Squarefree over ℚ, decided by squarefreeness modulo one of a few large
/// primes that keep the degree; a polynomial with a repeated root over ℚ is
/// never squarefree mod p.
pub fn squarefree_over_q(coeffs: &[Rat]) -> bool {
    [1_000_003i128, 1_000_033, 1_000_037].iter().any(|&p| {
        let mut f = Vec::new();
        for c in coeffs {
            let n = (c.numer() % BigInt::from(p)).to_i64().unwrap() as i128;
            let d = (c.denom() % BigInt::from(p)).to_i64().unwrap() as i128;
            if d == 0 {
                return false;
            }
            f.push((n * inv_mod(d, p)).rem_euclid(p));
        }
        let f = trim(f);
        if f.len() != coeffs.len() {
            return false;
        }
        let df: Vec<i128> = f.iter().enumerate().skip(1).map(|(i, x)| (x * i as i128) % p).collect();
        gcd_mod(f, trim(df), p).len() == 1
    })
}

/// Determinant by fraction-free Bareiss elimination.
fn det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Resultant of f and f' for a monic integer polynomial, up to sign.
pub fn disc_abs(f: &[BigInt]) -> BigInt {
    let n = f.len() - 1;
    let df: Vec<BigInt> = f.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    let size = 2 * n - 1;
    let mut m = vec![vec![BigInt::zero(); size]; size];
    for r in 0..n - 1 {
        for (j, c) in f.iter().rev().enumerate() {
            m[r][r + j] = c.clone();
        }
    }
    for r in 0..n {
        for (j, c) in df.iter().rev().enumerate() {
            m[n - 1 + r][r + j] = c.clone();
        }
    }
    let d = det(m);
    if d < BigInt::zero() {
        -d
    } else {
        d
    }
}

/// Evaluates an integer polynomial at r mod p with plain integer arithmetic.
pub fn eval_mod(coeffs: &[Rat], r: u64, p: u64) -> u64 {
    let mut acc: i128 = 0;
    for c in coeffs.iter().rev() {
        let c = galspec::arith::rat_mod(c, p).unwrap() as i128;
        acc = (acc * r as i128 + c).rem_euclid(p as i128);
    }
    acc as u64
}
