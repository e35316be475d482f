//! Integer polynomials: contents, primitive parts and gcds over ℤ[s] and
//! ℤ[s][t]. Bivariate gcd and squarefree computations over ℚ(s) go
//! through here to avoid normalizing rationals on every operation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;

use super::{BiPoly, Poly, Ring, Var};
use crate::arith::Rat;

impl Ring for BigInt {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_int(n: i64) -> Self {
        BigInt::from(n)
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negate(&self) -> Self {
        -self
    }
    fn exact_div(&self, o: &Self) -> Option<Self> {
        if num_traits::Zero::is_zero(o) {
            return None;
        }
        let (q, r) = self.div_rem(o);
        num_traits::Zero::is_zero(&r).then_some(q)
    }
}

pub type ZPoly = Poly<BigInt>;
pub type ZBi = Poly<Poly<BigInt>>;

/// `f = c · z` with z a primitive integer polynomial, positive leading coefficient.
pub fn to_z(f: &Poly<Rat>) -> (Rat, ZPoly) {
    let (c, g) = super::primitive_int(f);
    (c, g.map(|a| a.to_integer()))
}

pub fn from_z(f: &ZPoly) -> Poly<Rat> {
    f.map(|a| Rat::from_integer(a.clone()))
}

/// Integer multiple of `f` with coprime integer coefficients and positive
/// leading coefficient.
pub fn bi_to_z(f: &BiPoly) -> ZBi {
    let c = super::integer_content_bi(f).recip();
    f.map(|a| a.map(|x| (x * &c).to_integer()))
}

pub fn bi_from_z(f: &ZBi) -> BiPoly {
    f.map(from_z)
}

pub fn int_content(f: &ZPoly) -> BigInt {
    f.coeffs().iter().fold(BigInt::from(0), |g, c| g.gcd(c))
}

/// Divides out the integer content and makes the leading coefficient positive.
pub fn pp_z(f: &ZPoly) -> ZPoly {
    if f.is_poly_zero() {
        return f.clone();
    }
    let mut c = int_content(f);
    if f.lc().is_negative() {
        c = -c;
    }
    f.map(|a| a / &c)
}

/// Primitive gcd over ℤ (content ignored), positive leading coefficient.
pub fn gcd_z(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let var = if a.var() == Var::Free { b.var() } else { a.var() };
    if a.is_poly_zero() {
        return pp_z(b).with_var(var);
    }
    if b.is_poly_zero() {
        return pp_z(a).with_var(var);
    }
    let (mut x, mut y) = (pp_z(a), pp_z(b));
    if x.deg() < y.deg() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_poly_zero() {
        if y.deg() == 0 {
            return Poly::constant(var, BigInt::from(1));
        }
        let r = x.pseudo_rem(&y);
        x = y;
        y = pp_z(&r);
    }
    x.with_var(var)
}

/// gcd in ℤ[s] of the coefficients, primitive with positive leading coefficient.
pub fn content_zs(f: &ZBi) -> ZPoly {
    let mut g = Poly::zero_in(Var::Free);
    for c in f.coeffs() {
        g = gcd_z(&g, c);
        if g.deg() == 0 {
            break;
        }
    }
    g
}

fn int_content_bi(f: &ZBi) -> BigInt {
    f.coeffs().iter().fold(BigInt::from(0), |g, c| g.gcd(&int_content(c)))
}

/// Primitive part in ℤ[s][t]: no polynomial or integer content, positive
/// leading coefficient.
pub fn pp_zs(f: &ZBi) -> ZBi {
    if f.is_poly_zero() {
        return f.clone();
    }
    let c = content_zs(f);
    let g = if c.deg() > 0 { f.map(|a| a.div_exact(&c).expect("content divides")) } else { f.clone() };
    let mut k = int_content_bi(&g);
    if g.lc().lc().is_negative() {
        k = -k;
    }
    g.map(|a| a.map(|x| x / &k))
}

/// gcd over ℚ(s), returned primitive in ℤ[s][t].
pub fn gcd_zs(a: &ZBi, b: &ZBi) -> ZBi {
    let var = if a.var() == Var::Free { b.var() } else { a.var() };
    if a.is_poly_zero() {
        return pp_zs(b).with_var(var);
    }
    if b.is_poly_zero() {
        return pp_zs(a).with_var(var);
    }
    let (mut x, mut y) = (pp_zs(a), pp_zs(b));
    if x.deg() < y.deg() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_poly_zero() {
        if y.deg() == 0 {
            return Poly::constant(var, Poly::constant(Var::Free, BigInt::from(1)));
        }
        let r = x.pseudo_rem(&y);
        x = y;
        y = pp_zs(&r);
    }
    x.with_var(var)
}

/// Squarefree part over ℚ(s), primitive in ℤ[s][t].
pub fn squarefree_zs(f: &ZBi) -> ZBi {
    let pf = pp_zs(f);
    if pf.deg() <= 0 {
        return Poly::constant(f.var(), Poly::constant(Var::Free, BigInt::from(1)));
    }
    let g = gcd_zs(&pf, &pf.derivative());
    pp_zs(&pf.div_exact(&g).expect("gcd divides in Z[s][t]"))
}
