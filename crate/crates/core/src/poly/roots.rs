use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{primitive_int, root_multiplicity, squarefree_part_q, Poly, Ring};
use crate::arith::{next_prime, Rat};
use crate::ffact::{self, FpPoly, PrimeField};

/// Rational roots with multiplicity, sorted ascending.
///
/// Roots of the squarefree part are found mod a prime where it stays
/// squarefree, lifted p-adically past the size bound for `lc·root`, then
/// verified exactly.
pub fn rational_roots(f: &Poly<Rat>) -> Vec<(Rat, usize)> {
    if f.deg() < 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut g = squarefree_part_q(f);
    if Ring::is_zero(&g.coeff(0)) {
        out.push(<Rat as Ring>::zero());
        g = g.div_rem(&Poly::var_poly(g.var())).0;
    }
    if g.deg() >= 1 {
        let (_, h) = primitive_int(&g);
        let ints: Vec<BigInt> = h.coeffs().iter().map(|c| c.to_integer()).collect();
        out.extend(integer_poly_roots(&ints));
    }
    out.sort();
    out.into_iter().map(|r| {
        let m = root_multiplicity(f, &r);
        (r, m)
    }).collect()
}

fn eval_int(c: &[BigInt], x: &BigInt) -> BigInt {
    c.iter().rev().fold(BigInt::from(0), |acc, a| acc * x + a)
}

/// Rational roots of a squarefree primitive integer polynomial with nonzero
/// constant term.
fn integer_poly_roots(c: &[BigInt]) -> Vec<Rat> {
    let lc = c.last().unwrap().clone();
    let a0 = c[0].clone();
    let bound = (lc.abs() * a0.abs()) * 2 + 1;
    let deriv: Vec<BigInt> = c.iter().enumerate().skip(1).map(|(i, a)| a * BigInt::from(i)).collect();

    let mut p = 1000;
    let fp = loop {
        p = next_prime(p);
        if num_traits::Zero::is_zero(&(&lc % BigInt::from(p))) {
            continue;
        }
        let red = FpPoly::new(
            PrimeField::new(p),
            c.iter().map(|a| a.mod_floor(&BigInt::from(p)).to_u64().unwrap()).collect(),
        );
        if red.is_squarefree() {
            break red;
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(p);
    let mut found = Vec::new();
    for r in ffact::roots(&fp, &mut rng) {
        // Newton lifting: r <- r - f(r)/f'(r) mod p^(2^k)
        let mut m = BigInt::from(p);
        let mut x = BigInt::from(r);
        while m < bound {
            m = &m * &m;
            let fx = eval_int(c, &x);
            let dx = eval_int(&deriv, &x);
            let inv = crate::arith::inv_mod_big(&dx.mod_floor(&m), &m).expect("simple root lifts");
            x = (x - fx * inv).mod_floor(&m);
        }
        let mut y = (&lc * &x).mod_floor(&m);
        if &y * 2 > m {
            y -= &m;
        }
        let cand = Rat::new(y, lc.clone());
        let num = cand.numer().clone();
        let den = cand.denom().clone();
        // exact check of den^n f(num/den) = 0
        let n = c.len() - 1;
        let mut acc = BigInt::from(0);
        let mut dpow = BigInt::from(1);
        let mut terms = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            terms.push(dpow.clone());
            dpow *= &den;
        }
        let mut npow = BigInt::from(1);
        for (i, a) in c.iter().enumerate() {
            acc += a * &npow * &terms[n - i];
            npow *= &num;
        }
        if Ring::is_zero(&acc) {
            found.push(cand);
        }
    }
    found
}
