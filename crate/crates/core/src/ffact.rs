//! Polynomials over finite fields and their factorization: squarefree
//! decomposition, distinct-degree and Cantor–Zassenhaus equal-degree
//! splitting.
//!
//! Fields are context objects implementing [`FiniteField`]; `FPoly<F>`
//! carries its field. [`PrimeField`] is 𝔽_p, [`ExtField`] is 𝔽_p[z]/(φ).

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use thiserror::Error;

use crate::arith::{inv_mod, rat_mod, Rat};
use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FfError {
    #[error("zero polynomial")]
    Zero,
    #[error("polynomial is not squarefree mod {0}")]
    NotSquarefree(u64),
    #[error("extension modulus is not irreducible")]
    Reducible,
    #[error("coefficient is not {0}-integral")]
    NotIntegral(u64),
}

pub trait FiniteField: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn characteristic(&self) -> u64;
    /// Degree over the prime field.
    fn degree(&self) -> usize;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_u64(&self, n: u64) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> Self::Elem;

    /// Field size q.
    fn size(&self) -> BigUint {
        BigUint::from(self.characteristic()).pow(self.degree() as u32)
    }

    fn pow(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// The unique p-th root, `a^(q/p)`.
    fn pth_root(&self, a: &Self::Elem) -> Self::Elem {
        let e = self.size() / BigUint::from(self.characteristic());
        self.pow(a, &e)
    }
}

/// 𝔽_p for a prime p < 2^31.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        debug_assert!(crate::arith::is_prime(p));
        PrimeField { p }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

impl FiniteField for PrimeField {
    type Elem = u64;

    fn characteristic(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> usize {
        1
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_u64(&self, n: u64) -> u64 {
        n % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        inv_mod(*a, self.p)
    }
    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn pth_root(&self, a: &u64) -> u64 {
        *a
    }
}

/// 𝔽_p[z]/(φ) for a monic irreducible φ over 𝔽_p.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtField {
    base: PrimeField,
    modulus: Arc<FpPoly>,
}

impl ExtField {
    pub fn new(modulus: FpPoly) -> Result<Self, FfError> {
        let m = modulus.monic();
        if m.deg() < 1 || !is_irreducible(&m) {
            return Err(FfError::Reducible);
        }
        Ok(ExtField { base: *m.field(), modulus: Arc::new(m) })
    }

    pub fn modulus(&self) -> &FpPoly {
        &self.modulus
    }

    /// Embeds a polynomial in z.
    pub fn embed(&self, a: &FpPoly) -> FpPoly {
        a.rem(&self.modulus)
    }

    /// The class of z.
    pub fn generator(&self) -> FpPoly {
        self.embed(&FpPoly::x(self.base))
    }
}

impl FiniteField for ExtField {
    type Elem = FpPoly;

    fn characteristic(&self) -> u64 {
        self.base.p
    }
    fn degree(&self) -> usize {
        self.modulus.deg() as usize
    }
    fn zero(&self) -> FpPoly {
        FpPoly::zero(self.base)
    }
    fn one(&self) -> FpPoly {
        FpPoly::one(self.base)
    }
    fn from_u64(&self, n: u64) -> FpPoly {
        FpPoly::constant(self.base, n % self.base.p)
    }
    fn is_zero(&self, a: &FpPoly) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        a.add(b)
    }
    fn sub(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        a.sub(b)
    }
    fn mul(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        a.mul(b).rem(&self.modulus)
    }
    fn neg(&self, a: &FpPoly) -> FpPoly {
        a.neg()
    }
    fn inv(&self, a: &FpPoly) -> Option<FpPoly> {
        if a.is_zero() {
            return None;
        }
        let (g, s, _) = a.xgcd(&self.modulus);
        if g.deg() != 0 {
            return None;
        }
        Some(s.scale(&self.base.inv(&g.lc()).unwrap()).rem(&self.modulus))
    }
    fn random<G: Rng + ?Sized>(&self, rng: &mut G) -> FpPoly {
        let c = (0..self.degree()).map(|_| self.base.random(rng)).collect();
        FpPoly::new(self.base, c)
    }
}

/// Dense polynomial over a finite field, lowest degree first.
#[derive(Clone, Debug)]
pub struct FPoly<F: FiniteField> {
    field: F,
    c: Vec<F::Elem>,
}

pub type FpPoly = FPoly<PrimeField>;

impl<F: FiniteField> PartialEq for FPoly<F> {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c
    }
}

impl<F: FiniteField> FPoly<F> {
    pub fn new(field: F, c: Vec<F::Elem>) -> Self {
        let mut p = FPoly { field, c };
        while p.c.last().is_some_and(|x| p.field.is_zero(x)) {
            p.c.pop();
        }
        p
    }

    pub fn zero(field: F) -> Self {
        FPoly { field, c: Vec::new() }
    }

    pub fn one(field: F) -> Self {
        let one = field.one();
        FPoly::new(field, vec![one])
    }

    pub fn constant(field: F, a: F::Elem) -> Self {
        FPoly::new(field, vec![a])
    }

    pub fn x(field: F) -> Self {
        let (z, o) = (field.zero(), field.one());
        FPoly::new(field, vec![z, o])
    }

    /// `X - a`.
    pub fn linear(field: F, a: &F::Elem) -> Self {
        let (na, o) = (field.neg(a), field.one());
        FPoly::new(field, vec![na, o])
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> F::Elem {
        self.c.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn deg(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == self.field.one()
    }

    pub fn lc(&self) -> F::Elem {
        self.c.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| self.field.add(&self.coeff(i), &o.coeff(i))).collect();
        FPoly::new(self.field.clone(), c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| self.field.sub(&self.coeff(i), &o.coeff(i))).collect();
        FPoly::new(self.field.clone(), c)
    }

    pub fn neg(&self) -> Self {
        FPoly::new(self.field.clone(), self.c.iter().map(|a| self.field.neg(a)).collect())
    }

    pub fn scale(&self, a: &F::Elem) -> Self {
        FPoly::new(self.field.clone(), self.c.iter().map(|x| self.field.mul(x, a)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return FPoly::zero(self.field.clone());
        }
        let f = &self.field;
        let mut out = vec![f.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        FPoly::new(f.clone(), out)
    }

    pub fn monic(&self) -> Self {
        match self.field.inv(&self.lc()) {
            Some(i) => self.scale(&i),
            None => self.clone(),
        }
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == self.field.one()
    }

    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let c = self.c.iter().enumerate().skip(1).map(|(i, a)| f.mul(a, &f.from_u64(i as u64))).collect();
        FPoly::new(f.clone(), c)
    }

    pub fn eval(&self, x: &F::Elem) -> F::Elem {
        let f = &self.field;
        self.c.iter().rev().fold(f.zero(), |acc, a| f.add(&f.mul(&acc, x), a))
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let f = &self.field;
        let dd = d.c.len() - 1;
        if self.c.len() <= dd {
            return (FPoly::zero(f.clone()), self.clone());
        }
        let inv = f.inv(&d.lc()).expect("leading coefficient invertible");
        let mut r = self.c.clone();
        let mut q = vec![f.zero(); r.len() - dd];
        while r.len() > dd {
            let k = r.len() - 1 - dd;
            let qk = f.mul(r.last().unwrap(), &inv);
            if !f.is_zero(&qk) {
                for (i, dc) in d.c.iter().enumerate() {
                    r[k + i] = f.sub(&r[k + i], &f.mul(&qk, dc));
                }
            }
            q[k] = qk;
            r.pop();
        }
        (FPoly::new(f.clone(), q), FPoly::new(f.clone(), r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "inexact division");
        q
    }

    /// Monic gcd (zero iff both inputs are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s·self + t·o = g` (g not normalized).
    pub fn xgcd(&self, o: &Self) -> (Self, Self, Self) {
        let f = self.field.clone();
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (FPoly::one(f.clone()), FPoly::zero(f.clone()));
        let (mut t0, mut t1) = (FPoly::zero(f.clone()), FPoly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s2 = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t2);
        }
        (r0, s0, t0)
    }

    pub fn mul_mod(&self, o: &Self, m: &Self) -> Self {
        self.mul(o).rem(m)
    }

    pub fn pow_mod(&self, e: &BigUint, m: &Self) -> Self {
        let mut acc = FPoly::one(self.field.clone()).rem(m);
        let base = self.rem(m);
        for i in (0..e.bits()).rev() {
            acc = acc.mul_mod(&acc, m);
            if e.bit(i) {
                acc = acc.mul_mod(&base, m);
            }
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        self.deg() <= 0 || self.gcd(&self.derivative()).deg() == 0
    }
}

impl FpPoly {
    pub fn from_u64s(p: u64, c: &[u64]) -> Self {
        let f = PrimeField::new(p);
        FPoly::new(f, c.iter().map(|&x| x % p).collect())
    }

    pub fn from_i64s(p: u64, c: &[i64]) -> Self {
        let f = PrimeField::new(p);
        FPoly::new(f, c.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
    }

    /// Reduction mod p of a polynomial over ℚ with p-integral coefficients.
    pub fn from_rat(f: &Poly<Rat>, p: u64) -> Result<Self, FfError> {
        let c = f
            .coeffs()
            .iter()
            .map(|a| rat_mod(a, p).ok_or(FfError::NotIntegral(p)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FPoly::new(PrimeField::new(p), c))
    }

    pub fn p(&self) -> u64 {
        self.field.p
    }
}

impl<F: FiniteField> fmt::Display for FPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return f.write_str("0");
        }
        let mut terms = Vec::new();
        for (i, a) in self.c.iter().enumerate().rev() {
            if self.field.is_zero(a) {
                continue;
            }
            let cs = format!("{a:?}");
            let one = *a == self.field.one();
            terms.push(match (i, one) {
                (0, _) => cs,
                (1, true) => "X".to_string(),
                (1, false) => format!("{cs}*X"),
                (_, true) => format!("X^{i}"),
                (_, false) => format!("{cs}*X^{i}"),
            });
        }
        f.write_str(&terms.join(" + "))
    }
}

/// Complete factorization into monic irreducibles.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization<F: FiniteField> {
    pub unit: F::Elem,
    pub factors: Vec<(FPoly<F>, usize)>,
}

impl<F: FiniteField> Factorization<F> {
    pub fn product(&self, field: &F) -> FPoly<F> {
        let mut acc = FPoly::constant(field.clone(), self.unit.clone());
        for (g, m) in &self.factors {
            for _ in 0..*m {
                acc = acc.mul(g);
            }
        }
        acc
    }

    /// Degrees with multiplicity, descending.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> =
            self.factors.iter().flat_map(|(g, m)| std::iter::repeat_n(g.deg() as usize, *m)).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }
}

pub type FactorizationModP = Factorization<PrimeField>;

/// Squarefree decomposition: monic, pairwise coprime `(g_i, i)` with
/// `f = lc · Π g_i^i`.
pub fn squarefree_decomposition<F: FiniteField>(f: &FPoly<F>) -> Vec<(FPoly<F>, usize)> {
    let mut out = Vec::new();
    if f.deg() <= 0 {
        return out;
    }
    let fm = f.monic();
    let field = f.field.clone();
    let p = field.characteristic() as usize;
    let mut c = fm.gcd(&fm.derivative());
    let mut w = fm.div_exact(&c);
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div_exact(&y);
        if z.deg() > 0 {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w);
    }
    if c.deg() > 0 {
        let root_coeffs = (0..=(c.deg() as usize / p)).map(|j| field.pth_root(&c.coeff(j * p))).collect();
        let root = FPoly::new(field, root_coeffs);
        for (g, m) in squarefree_decomposition(&root) {
            out.push((g, m * p));
        }
    }
    out.sort_by_key(|(g, m)| (*m, g.deg()));
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// `(g_d, d)` where g_d is the product of all irreducible factors of degree d.
pub fn distinct_degree<F: FiniteField>(f: &FPoly<F>) -> Vec<(FPoly<F>, usize)> {
    let field = f.field.clone();
    let q = field.size();
    let x = FPoly::x(field);
    let mut rest = f.monic();
    let mut h = x.rem(&rest);
    let mut out = Vec::new();
    let mut d = 1;
    while rest.deg() >= 2 * d as isize {
        h = h.pow_mod(&q, &rest);
        let g = rest.gcd(&h.sub(&x));
        if g.deg() > 0 {
            rest = rest.div_exact(&g);
            h = h.rem(&rest);
            out.push((g, d));
        }
        d += 1;
    }
    if rest.deg() > 0 {
        let dd = rest.deg() as usize;
        out.push((rest, dd));
    }
    out
}

/// Splits a monic squarefree product of degree-d irreducibles.
pub fn equal_degree<F: FiniteField, G: Rng + ?Sized>(f: &FPoly<F>, d: usize, rng: &mut G) -> Vec<FPoly<F>> {
    let n = f.deg() as usize;
    if n == d {
        return vec![f.monic()];
    }
    let field = f.field.clone();
    let q = field.size();
    let p = field.characteristic();
    loop {
        let a = FPoly::new(field.clone(), (0..n).map(|_| field.random(rng)).collect());
        if a.deg() < 1 {
            continue;
        }
        let g0 = f.gcd(&a);
        let candidate = if g0.deg() > 0 {
            g0
        } else if p == 2 {
            // trace map a + a^2 + ... + a^(2^(k·d - 1))
            let k = field.degree() * d;
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..k {
                t = t.mul_mod(&t, f);
                acc = acc.add(&t);
            }
            f.gcd(&acc)
        } else {
            let e = (q.pow(d as u32) - BigUint::one()) >> 1;
            let b = a.pow_mod(&e, f).sub(&FPoly::one(field.clone()));
            f.gcd(&b)
        };
        if candidate.deg() > 0 && candidate.deg() < f.deg() {
            let other = f.div_exact(&candidate);
            let mut out = equal_degree(&candidate, d, rng);
            out.extend(equal_degree(&other, d, rng));
            return out;
        }
    }
}

/// Complete factorization of a nonzero polynomial.
pub fn factor<F: FiniteField, G: Rng + ?Sized>(f: &FPoly<F>, rng: &mut G) -> Result<Factorization<F>, FfError> {
    if f.is_zero() {
        return Err(FfError::Zero);
    }
    let mut factors = Vec::new();
    for (g, m) in squarefree_decomposition(f) {
        for (h, d) in distinct_degree(&g) {
            for irr in equal_degree(&h, d, rng) {
                factors.push((irr, m));
            }
        }
    }
    factors.sort_by(|a, b| (a.0.deg(), a.1).cmp(&(b.0.deg(), b.1)).then_with(|| format!("{}", a.0).cmp(&format!("{}", b.0))));
    Ok(Factorization { unit: f.lc(), factors })
}

/// `factor` specialized to prime fields.
pub fn factor_mod_p<G: Rng + ?Sized>(f: &FpPoly, rng: &mut G) -> Result<FactorizationModP, FfError> {
    factor(f, rng)
}

/// Degrees of the irreducible factors of a squarefree polynomial, descending.
pub fn degree_sequence<F: FiniteField>(f: &FPoly<F>) -> Result<Vec<usize>, FfError> {
    if f.is_zero() {
        return Err(FfError::Zero);
    }
    if !f.is_squarefree() {
        return Err(FfError::NotSquarefree(f.field.characteristic()));
    }
    let mut out = Vec::new();
    for (g, d) in distinct_degree(f) {
        out.extend(std::iter::repeat_n(d, g.deg() as usize / d));
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    Ok(out)
}

pub fn is_irreducible<F: FiniteField>(f: &FPoly<F>) -> bool {
    f.deg() >= 1 && degree_sequence(f).is_ok_and(|d| d.len() == 1)
}

/// Distinct roots in the field.
pub fn roots<F: FiniteField, G: Rng + ?Sized>(f: &FPoly<F>, rng: &mut G) -> Vec<F::Elem> {
    if f.deg() < 1 {
        return Vec::new();
    }
    let field = f.field.clone();
    let fm = f.monic();
    let x = FPoly::x(field.clone());
    let xq = x.pow_mod(&field.size(), &fm);
    let g = fm.gcd(&xq.sub(&x));
    if g.deg() < 1 {
        return Vec::new();
    }
    equal_degree(&g, 1, rng).into_iter().map(|l| field.neg(&l.coeff(0))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    /// Roots by exhaustive scan.
    fn scan_roots(f: &FpPoly) -> Vec<u64> {
        (0..f.p()).filter(|x| f.eval(x) == 0).collect()
    }

    /// Number of irreducible factors of each degree from gcd(f, X^(p^d) - X)
    /// counts, independent of the DDF loop.
    fn frobenius_gcd_degrees(f: &FpPoly) -> Vec<usize> {
        let p = BigUint::from(f.p());
        let x = FpPoly::x(*f.field());
        let n = f.deg() as usize;
        let mut counts = vec![0usize; n + 1];
        for d in 1..=n {
            let xd = x.pow_mod(&p.pow(d as u32), f);
            let g = f.gcd(&xd.sub(&x));
            // deg g = sum over e | d of e * N_e
            let mut rest = g.deg() as usize;
            for e in 1..d {
                if d % e == 0 {
                    rest -= e * counts[e];
                }
            }
            counts[d] = rest / d;
        }
        let mut out = Vec::new();
        for d in (1..=n).rev() {
            out.extend(std::iter::repeat_n(d, counts[d]));
        }
        out
    }

    #[test]
    fn x2_plus_1() {
        let f5 = FpPoly::from_i64s(5, &[1, 0, 1]);
        let fac = factor_mod_p(&f5, &mut rng()).unwrap();
        let lin: Vec<u64> = fac.factors.iter().map(|(g, _)| g.coeff(0)).collect();
        assert_eq!(fac.factors.len(), 2);
        assert!(lin.contains(&3) && lin.contains(&2)); // X+3 = X-2, X+2 = X-3
        let f3 = FpPoly::from_i64s(3, &[1, 0, 1]);
        assert_eq!(factor_mod_p(&f3, &mut rng()).unwrap().factors.len(), 1);
    }

    #[test]
    fn degree_sequence_examples() {
        // X^3 - 2 mod 5: the scan finds exactly one root, leaving an irreducible quadratic.
        let f = FpPoly::from_i64s(5, &[-2, 0, 0, 1]);
        assert_eq!(scan_roots(&f), vec![3]);
        assert_eq!(frobenius_gcd_degrees(&f), vec![2, 1]);
        assert_eq!(degree_sequence(&f).unwrap(), vec![2, 1]);

        let g = FpPoly::from_i64s(7, &[-2, 0, 1]);
        assert_eq!(degree_sequence(&g).unwrap(), vec![1, 1]);

        let h = FpPoly::from_i64s(3, &[-1, 1]).mul(&FpPoly::from_i64s(3, &[-2, 1])).mul(&FpPoly::from_i64s(3, &[1, 0, 1]));
        assert_eq!(degree_sequence(&h).unwrap(), vec![2, 1, 1]);

        let sq = FpPoly::from_i64s(3, &[1, 2, 1]);
        assert_eq!(degree_sequence(&sq), Err(FfError::NotSquarefree(3)));
    }

    #[test]
    fn inseparable_part() {
        // (X^3 + 1)^2 (X + 2) over F_3 is (X+1)^6 (X+2)
        let a = FpPoly::from_i64s(3, &[1, 0, 0, 1]);
        let f = a.mul(&a).mul(&FpPoly::from_i64s(3, &[2, 1]));
        let dec = squarefree_decomposition(&f);
        assert_eq!(dec, vec![(FpPoly::from_i64s(3, &[2, 1]), 1), (FpPoly::from_i64s(3, &[1, 1]), 6)]);
        let fac = factor_mod_p(&f, &mut rng()).unwrap();
        assert_eq!(fac.product(f.field()), f);
    }

    #[test]
    fn extension_field_roots() {
        // F_9 = F_3[z]/(z^2 + 1); X^2 + 1 splits there.
        let k = ExtField::new(FpPoly::from_i64s(3, &[1, 0, 1])).unwrap();
        let one = k.one();
        let f = FPoly::new(k.clone(), vec![one.clone(), k.zero(), one]);
        let r = roots(&f, &mut rng());
        assert_eq!(r.len(), 2);
        for x in &r {
            assert!(k.is_zero(&f.eval(x)));
        }
        assert_eq!(degree_sequence(&f).unwrap(), vec![1, 1]);
        assert!(ExtField::new(FpPoly::from_i64s(5, &[1, 0, 1])).is_err());
    }

    #[test]
    fn characteristic_two_splitting() {
        let k = ExtField::new(FpPoly::from_i64s(2, &[1, 1, 1])).unwrap(); // F_4
        let z = k.generator();
        // (X - z)(X - z - 1)(X - 1)
        let f = FPoly::linear(k.clone(), &z)
            .mul(&FPoly::linear(k.clone(), &k.add(&z, &k.one())))
            .mul(&FPoly::linear(k.clone(), &k.one()));
        let fac = factor(&f, &mut rng()).unwrap();
        assert_eq!(fac.degrees(), vec![1, 1, 1]);
        assert_eq!(fac.product(&k), f);
    }

    #[test]
    fn seeded_reproducible() {
        let f = FpPoly::from_i64s(101, &[3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 1]);
        let a = factor_mod_p(&f, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = factor_mod_p(&f, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(a, b);
    }

    const SMALL_PRIMES: [u64; 25] =
        [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

    proptest! {
        #[test]
        fn factorization_reproduces_input(pi in 0usize..25, c in proptest::collection::vec(0u64..1000, 2..10), seed in any::<u64>()) {
            let p = SMALL_PRIMES[pi];
            let f = FpPoly::from_u64s(p, &c);
            prop_assume!(f.deg() >= 1);
            let fac = factor_mod_p(&f, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            prop_assert_eq!(fac.product(f.field()), f.clone());
            for (g, _) in &fac.factors {
                prop_assert!(g.is_monic());
                prop_assert!(is_irreducible(g));
            }
            if f.is_squarefree() {
                let ds = degree_sequence(&f).unwrap();
                prop_assert_eq!(ds.iter().sum::<usize>(), f.deg() as usize);
                prop_assert_eq!(&ds, &frobenius_gcd_degrees(&f.monic()));
                prop_assert_eq!(ds, fac.degrees());
            }
            if p <= 50 {
                let mut r = roots(&f, &mut ChaCha8Rng::seed_from_u64(seed));
                r.sort_unstable();
                prop_assert_eq!(r, scan_roots(&f));
            }
        }
    }
}
