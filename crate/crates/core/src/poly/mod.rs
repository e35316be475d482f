//! Dense univariate polynomials over an exact coefficient ring, nested to
//! get bivariate and trivariate polynomials.
//!
//! `Poly<Rat>` is a polynomial over ℚ, `Poly<Poly<Rat>>` one over ℚ[s] (or
//! ℚ[t]), and [`TriPoly`] wraps `Poly<Poly<Poly<Rat>>>` for f(s,t,X).
//! Every polynomial carries a [`Var`] tag; constants built through the
//! generic [`Ring`] interface are tagged [`Var::Free`] and adopt the tag of
//! whatever they are combined with.

mod newton;
mod parse;
mod roots;
mod tri;
pub mod zring;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::Rat;

pub use newton::{newton_polygon, newton_polygon_of, NewtonPolygon, Segment};
pub use parse::{parse_expr, parse_poly_in, parse_ratfunc_s, Expr, MPoly};
pub use roots::rational_roots;
pub use tri::{eval_inner, eval_outer, swap_bi, BiPoly, RatFunc, TriPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomials in different variables ({0} and {1})")]
    MixedVariables(Var, Var),
    #[error("polynomial has degree 0")]
    DegreeZero,
    #[error("zero polynomial")]
    Zero,
    #[error("variable X cannot be specialized")]
    CannotBindX,
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("{0}")]
    Shape(String),
}

/// Variable tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    S,
    T,
    X,
    U,
    Y,
    Tau,
    Free,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Var::S => "s",
            Var::T => "t",
            Var::X => "X",
            Var::U => "u",
            Var::Y => "Y",
            Var::Tau => "tau",
            Var::Free => "_",
        })
    }
}

fn join_var(a: Var, b: Var) -> Var {
    if a == Var::Free {
        b
    } else {
        a
    }
}

/// An exact commutative ring with (partial) exact division.
pub trait Ring: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negate(&self) -> Self;
    /// `self / o` when the quotient exists in the ring.
    fn exact_div(&self, o: &Self) -> Option<Self>;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn power(&self, mut e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.times(&base);
            }
        }
        acc
    }
}

/// Rings in which every nonzero element is invertible.
pub trait Field: Ring {
    fn inv(&self) -> Option<Self>;
}

impl Ring for Rat {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_int(n: i64) -> Self {
        Rat::from_integer(BigInt::from(n))
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
            None
        } else {
            Some(self / o)
        }
    }
}

impl Field for Rat {
    fn inv(&self) -> Option<Self> {
        if num_traits::Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Dense polynomial, coefficients lowest degree first, no trailing zeros.
#[derive(Clone, Debug)]
pub struct Poly<R> {
    var: Var,
    coeffs: Vec<R>,
}

impl<R: Ring> PartialEq for Poly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
            && (self.coeffs.len() <= 1
                || self.var == other.var
                || self.var == Var::Free
                || other.var == Var::Free)
    }
}

impl<R: Ring> Poly<R> {
    pub fn new(var: Var, coeffs: Vec<R>) -> Self {
        let mut p = Poly { var, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn zero_in(var: Var) -> Self {
        Poly { var, coeffs: Vec::new() }
    }

    pub fn constant(var: Var, c: R) -> Self {
        Poly::new(var, vec![c])
    }

    pub fn monomial(var: Var, c: R, k: usize) -> Self {
        let mut coeffs = vec![R::zero(); k];
        coeffs.push(c);
        Poly::new(var, coeffs)
    }

    /// The polynomial `var` itself.
    pub fn var_poly(var: Var) -> Self {
        Poly::monomial(var, R::one(), 1)
    }

    /// `var - c`.
    pub fn linear_root(var: Var, c: R) -> Self {
        Poly::new(var, vec![c.negate(), R::one()])
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree, with -1 for the zero polynomial.
    pub fn deg(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_poly_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn coeff(&self, i: usize) -> R {
        self.coeffs.get(i).cloned().unwrap_or_else(R::zero)
    }

    pub fn lc(&self) -> R {
        self.coeffs.last().cloned().unwrap_or_else(R::zero)
    }

    pub fn constant_term(&self) -> R {
        self.coeff(0)
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_one()
    }

    /// Order of vanishing at 0 (`None` for the zero polynomial).
    pub fn low_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &R) -> Self {
        Poly::new(self.var, self.coeffs.iter().map(|a| a.times(c)).collect())
    }

    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_poly_zero() {
            return self.clone();
        }
        let mut coeffs = vec![R::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { var: self.var, coeffs }
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.times(&R::from_int(i as i64)))
            .collect();
        Poly::new(self.var, coeffs)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &R) -> R {
        let mut acc = R::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.times(x).plus(c);
        }
        acc
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Poly<S> {
        Poly::new(self.var, self.coeffs.iter().map(f).collect())
    }

    /// `self(g)`, substituting a polynomial for the variable.
    pub fn compose(&self, g: &Poly<R>) -> Poly<R> {
        let mut acc = Poly::zero_in(g.var);
        for c in self.coeffs.iter().rev() {
            acc = acc.times(g).plus(&Poly::constant(g.var, c.clone()));
        }
        acc.with_var(join_var(g.var, self.var))
    }

    /// `self(X + c)`.
    pub fn taylor_shift(&self, c: &R) -> Poly<R> {
        let n = self.coeffs.len();
        let mut a = self.coeffs.clone();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = a[j + 1].times(c);
                a[j] = a[j].plus(&t);
            }
        }
        Poly::new(self.var, a)
    }

    /// Pseudo-remainder: `lc(d)^(deg a - deg d + 1) * a mod d`.
    pub fn pseudo_rem(&self, d: &Poly<R>) -> Poly<R> {
        assert!(!d.is_poly_zero(), "pseudo-division by zero");
        let dd = d.coeffs.len() - 1;
        if self.deg() < dd as isize {
            return self.clone();
        }
        let lcd = d.lc();
        let mut r = self.coeffs.clone();
        let mut steps = r.len() - dd;
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let lr = r.last().unwrap().clone();
            for c in r.iter_mut() {
                *c = c.times(&lcd);
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] = r[k + i].minus(&lr.times(dc));
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
            steps -= 1;
        }
        let mut out = Poly::new(self.var, r);
        if steps > 0 {
            out = out.scale(&lcd.power(steps as u32));
        }
        out
    }

    /// Exact quotient `self / d`, `None` unless `d` divides `self`.
    pub fn div_exact(&self, d: &Poly<R>) -> Option<Poly<R>> {
        if d.is_poly_zero() {
            return None;
        }
        if self.is_poly_zero() {
            return Some(Poly::zero_in(join_var(self.var, d.var)));
        }
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() - 1 < dd {
            return None;
        }
        let lcd = d.lc();
        let mut r = self.coeffs.clone();
        let mut q = vec![R::zero(); r.len() - dd];
        while r.len() > dd {
            let k = r.len() - 1 - dd;
            let lr = r.last().unwrap().clone();
            if lr.is_zero() {
                r.pop();
                continue;
            }
            let qk = lr.exact_div(&lcd)?;
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] = r[k + i].minus(&qk.times(dc));
            }
            q[k] = qk;
            r.pop();
        }
        if r.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Poly::new(join_var(self.var, d.var), q))
    }

    fn check_same_var(&self, o: &Poly<R>) -> Result<Var, PolyError> {
        if self.is_constant() || o.is_constant() {
            return Ok(join_var(self.var, o.var));
        }
        if self.var != o.var && self.var != Var::Free && o.var != Var::Free {
            return Err(PolyError::MixedVariables(self.var, o.var));
        }
        Ok(join_var(self.var, o.var))
    }
}

impl<R: Field> Poly<R> {
    pub fn div_rem(&self, d: &Poly<R>) -> (Poly<R>, Poly<R>) {
        assert!(!d.is_poly_zero(), "division by zero polynomial");
        let var = join_var(self.var, d.var);
        let dd = d.coeffs.len() - 1;
        if self.deg() < dd as isize {
            return (Poly::zero_in(var), self.clone());
        }
        let inv = d.lc().inv().unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![R::zero(); r.len() - dd];
        while r.len() > dd {
            let k = r.len() - 1 - dd;
            let qk = r.last().unwrap().times(&inv);
            if !qk.is_zero() {
                for (i, dc) in d.coeffs.iter().enumerate() {
                    r[k + i] = r[k + i].minus(&qk.times(dc));
                }
            }
            q[k] = qk;
            r.pop();
        }
        (Poly::new(var, q), Poly::new(var, r))
    }

    pub fn rem(&self, d: &Poly<R>) -> Poly<R> {
        self.div_rem(d).1
    }

    pub fn monic(&self) -> Poly<R> {
        match self.lc().inv() {
            Some(i) => self.scale(&i),
            None => self.clone(),
        }
    }
}

impl<R: Ring> fmt::Display for Poly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = c.to_string();
            let atomic = !cs.contains(['+', ' ']) && !cs[1..].contains('-');
            let (neg, body) = match cs.strip_prefix('-') {
                Some(rest) if atomic => (true, rest.to_string()),
                _ => (false, cs.clone()),
            };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let body = if atomic { body } else { format!("({body})") };
            match i {
                0 => f.write_str(&body)?,
                _ => {
                    if body != "1" {
                        write!(f, "{body}*")?;
                    }
                    write!(f, "{}", self.var)?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl<R: Ring> Ring for Poly<R> {
    fn zero() -> Self {
        Poly::zero_in(Var::Free)
    }
    fn one() -> Self {
        Poly::constant(Var::Free, R::one())
    }
    fn from_int(n: i64) -> Self {
        Poly::constant(Var::Free, R::from_int(n))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn plus(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).plus(&o.coeff(i))).collect();
        Poly::new(join_var(self.var, o.var), coeffs)
    }
    fn minus(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).minus(&o.coeff(i))).collect();
        Poly::new(join_var(self.var, o.var), coeffs)
    }
    fn times(&self, o: &Self) -> Self {
        let var = join_var(self.var, o.var);
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Poly::zero_in(var);
        }
        let mut out = vec![R::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        Poly::new(var, out)
    }
    fn negate(&self) -> Self {
        Poly::new(self.var, self.coeffs.iter().map(|c| c.negate()).collect())
    }
    fn exact_div(&self, o: &Self) -> Option<Self> {
        self.div_exact(o)
    }
}

// ---------------------------------------------------------------------------
// Resultants and discriminants

/// `Res(f, g)` by the subresultant pseudo-remainder sequence.
pub fn resultant<R: Ring>(f: &Poly<R>, g: &Poly<R>) -> Result<R, PolyError> {
    f.check_same_var(g)?;
    Ok(subresultant(f, g))
}

fn subresultant<R: Ring>(f: &Poly<R>, g: &Poly<R>) -> R {
    if f.is_poly_zero() || g.is_poly_zero() {
        return R::zero();
    }
    let (mut a, mut b) = (f.clone(), g.clone());
    let mut sign = false;
    if a.deg() < b.deg() {
        std::mem::swap(&mut a, &mut b);
        if a.deg() % 2 == 1 && b.deg() % 2 == 1 {
            sign = !sign;
        }
    }
    if b.deg() == 0 {
        let r = b.lc().power(a.deg() as u32);
        return if sign { r.negate() } else { r };
    }
    let mut gg = R::one();
    let mut h = R::one();
    loop {
        let delta = (a.deg() - b.deg()) as u32;
        if a.deg() % 2 == 1 && b.deg() % 2 == 1 {
            sign = !sign;
        }
        let r = a.pseudo_rem(&b);
        a = b;
        if r.is_poly_zero() {
            return R::zero();
        }
        let divisor = gg.times(&h.power(delta));
        b = Poly::new(
            r.var,
            r.coeffs.iter().map(|c| c.exact_div(&divisor).expect("subresultant division")).collect(),
        );
        gg = a.lc();
        h = if delta == 0 {
            h
        } else {
            gg.power(delta).exact_div(&h.power(delta - 1)).expect("subresultant h update")
        };
        if b.deg() == 0 {
            let da = a.deg() as u32;
            let num = b.lc().power(da);
            let res = if da <= 1 {
                num.times(&h.power(1 - da))
            } else {
                num.exact_div(&h.power(da - 1)).expect("subresultant final division")
            };
            return if sign { res.negate() } else { res };
        }
    }
}

/// `disc(f) = (-1)^(n(n-1)/2) Res(f, f') / lc(f)`.
pub fn discriminant<R: Ring>(f: &Poly<R>) -> Result<R, PolyError> {
    let n = match f.degree() {
        None => return Err(PolyError::Zero),
        Some(0) => return Err(PolyError::DegreeZero),
        Some(n) => n,
    };
    if n == 1 {
        return Ok(R::one());
    }
    let r = subresultant(f, &f.derivative());
    let d = r.exact_div(&f.lc()).ok_or_else(|| PolyError::Shape("leading coefficient does not divide Res(f, f')".into()))?;
    Ok(if (n * (n - 1) / 2) % 2 == 1 { d.negate() } else { d })
}

// ---------------------------------------------------------------------------
// Integer content and gcds over ℚ and ℚ(s)

/// Splits `f` over ℚ as `c * g` with `g` a primitive integer polynomial with
/// positive leading coefficient.
pub fn primitive_int(f: &Poly<Rat>) -> (Rat, Poly<Rat>) {
    if f.is_poly_zero() {
        return (Rat::zero(), f.clone());
    }
    let mut den = BigInt::from(1);
    for c in &f.coeffs {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = f.coeffs.iter().map(|c| (c * Rat::from_integer(den.clone())).to_integer()).collect();
    let mut g = BigInt::from(0);
    for c in &ints {
        g = g.gcd(c);
    }
    if f.lc().is_negative() {
        g = -g;
    }
    let content = Rat::new(g.clone(), den);
    let coeffs = ints.into_iter().map(|c| Rat::from_integer(c / &g)).collect();
    (content, Poly::new(f.var, coeffs))
}

/// Monic gcd over ℚ via a primitive remainder sequence over ℤ.
pub fn gcd_q(a: &Poly<Rat>, b: &Poly<Rat>) -> Poly<Rat> {
    let var = join_var(a.var, b.var);
    if a.is_poly_zero() && b.is_poly_zero() {
        return Poly::zero_in(var);
    }
    zring::from_z(&zring::gcd_z(&zring::to_z(a).1, &zring::to_z(b).1)).monic().with_var(var)
}

/// Squarefree part over ℚ, monic.
pub fn squarefree_part_q(f: &Poly<Rat>) -> Poly<Rat> {
    if f.deg() <= 0 {
        return Poly::constant(f.var, Rat::one());
    }
    let g = gcd_q(f, &f.derivative());
    f.monic().div_rem(&g).0
}

pub fn is_squarefree_q(f: &Poly<Rat>) -> bool {
    f.deg() <= 0 || gcd_q(f, &f.derivative()).deg() == 0
}

/// Multiplicity of `r` as a root of `f` (0 if not a root).
pub fn root_multiplicity(f: &Poly<Rat>, r: &Rat) -> usize {
    let mut g = f.clone();
    let mut m = 0;
    while !g.is_poly_zero() && g.eval(r).is_zero() {
        g = g.div_rem(&Poly::linear_root(g.var, r.clone())).0;
        m += 1;
    }
    m
}

/// Content of a polynomial over ℚ[s] (coefficients in s): monic gcd of its
/// coefficients.
pub fn content_s(f: &BiPoly) -> Poly<Rat> {
    if f.is_poly_zero() {
        return Poly::zero_in(Var::S);
    }
    zring::from_z(&zring::content_zs(&zring::bi_to_z(f))).monic().with_var(Var::S)
}

/// Primitive part with respect to ℚ[s]-content, scaled to coprime integer
/// coefficients with positive leading coefficient.
pub fn primitive_part_s(f: &BiPoly) -> BiPoly {
    if f.is_poly_zero() {
        return f.clone();
    }
    zring::bi_from_z(&zring::pp_zs(&zring::bi_to_z(f)))
}

/// Positive rational c such that f / c has coprime integer coefficients,
/// signed so that the leading coefficient of the result is positive.
pub fn integer_content_bi(f: &BiPoly) -> Rat {
    let mut den = BigInt::from(1);
    let mut num = BigInt::from(0);
    for c in f.coeffs.iter().flat_map(|a| a.coeffs.iter()) {
        den = den.lcm(c.denom());
        num = num.gcd(c.numer());
    }
    if num == BigInt::from(0) {
        return Rat::one();
    }
    let c = Rat::new(num, den);
    if f.lc().lc().is_negative() {
        -c
    } else {
        c
    }
}

/// gcd over ℚ(s) of two polynomials with ℚ[s] coefficients, returned
/// primitive.
pub fn gcd_over_qs(a: &BiPoly, b: &BiPoly) -> BiPoly {
    let var = join_var(a.var, b.var);
    zring::bi_from_z(&zring::gcd_zs(&zring::bi_to_z(a), &zring::bi_to_z(b))).with_var(var)
}

/// Squarefree part over ℚ(s), primitive in ℚ[s][var].
pub fn squarefree_part_qs(f: &BiPoly) -> BiPoly {
    zring::bi_from_z(&zring::squarefree_zs(&zring::bi_to_z(f))).with_var(f.var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    pub(crate) fn qpoly(var: Var, c: &[i64]) -> Poly<Rat> {
        Poly::new(var, c.iter().map(|&x| rat(x)).collect())
    }

    /// Sylvester determinant by fraction-free elimination; degrees <= 4 only.
    fn sylvester_resultant(f: &Poly<Rat>, g: &Poly<Rat>) -> Rat {
        let (m, n) = (f.deg() as usize, g.deg() as usize);
        let size = m + n;
        let mut mat = vec![vec![rat(0); size]; size];
        for i in 0..n {
            for (j, c) in f.coeffs().iter().rev().enumerate() {
                mat[i][i + j] = c.clone();
            }
        }
        for i in 0..m {
            for (j, c) in g.coeffs().iter().rev().enumerate() {
                mat[n + i][i + j] = c.clone();
            }
        }
        let mut det = rat(1);
        for col in 0..size {
            let Some(piv) = (col..size).find(|&r| !mat[r][col].is_zero()) else {
                return rat(0);
            };
            if piv != col {
                mat.swap(piv, col);
                det = -det;
            }
            let p = mat[col][col].clone();
            det *= &p;
            for r in col + 1..size {
                let factor = &mat[r][col] / &p;
                for c in col..size {
                    let sub = &factor * &mat[col][c];
                    mat[r][c] -= sub;
                }
            }
        }
        det
    }

    #[test]
    fn resultant_examples() {
        let x = Var::X;
        assert_eq!(resultant(&qpoly(x, &[-2, 1]), &qpoly(x, &[-3, 1])).unwrap(), rat(-1));
        assert_eq!(resultant(&qpoly(x, &[-1, 0, 1]), &qpoly(x, &[-1, 1])).unwrap(), rat(0));
        // (x^2+1, x^2-2): product of (a - b) over roots = ((i)^2-2)((-i)^2-2) = 9
        assert_eq!(resultant(&qpoly(x, &[1, 0, 1]), &qpoly(x, &[-2, 0, 1])).unwrap(), rat(9));
        assert_eq!(sylvester_resultant(&qpoly(x, &[1, 0, 1]), &qpoly(x, &[-2, 0, 1])), rat(9));
    }

    #[test]
    fn mixed_variables_rejected() {
        let e = resultant(&qpoly(Var::X, &[0, 1]), &qpoly(Var::T, &[0, 1]));
        assert_eq!(e, Err(PolyError::MixedVariables(Var::X, Var::T)));
    }

    #[test]
    fn discriminant_examples() {
        let t = Poly::<Rat>::var_poly(Var::T);
        // X^2 - t over Q[t]: 4t
        let f: Poly<Poly<Rat>> = Poly::new(Var::X, vec![t.negate(), Poly::zero(), Poly::one()]);
        assert_eq!(discriminant(&f).unwrap(), t.scale(&rat(4)));
        // X^3 - t: -27 t^2
        let f3: Poly<Poly<Rat>> = Poly::new(Var::X, vec![t.negate(), Poly::zero(), Poly::zero(), Poly::one()]);
        assert_eq!(discriminant(&f3).unwrap(), t.times(&t).scale(&rat(-27)));
        assert_eq!(discriminant(&qpoly(Var::X, &[5])), Err(PolyError::DegreeZero));
    }

    #[test]
    fn shift_and_compose() {
        let f = qpoly(Var::X, &[1, 2, 3]);
        let shifted = f.taylor_shift(&rat(2));
        assert_eq!(shifted, f.compose(&qpoly(Var::X, &[2, 1])));
        assert_eq!(shifted.eval(&rat(0)), f.eval(&rat(2)));
    }

    #[test]
    fn gcd_and_radical() {
        let a = qpoly(Var::X, &[-1, 0, 1]).times(&qpoly(Var::X, &[3, 1]));
        let b = qpoly(Var::X, &[-1, 1]).times(&qpoly(Var::X, &[5, 1]));
        assert_eq!(gcd_q(&a, &b), qpoly(Var::X, &[-1, 1]));
        let sq = a.times(&a).times(&b);
        assert_eq!(squarefree_part_q(&sq).deg(), 4);
        assert_eq!(root_multiplicity(&sq, &rat(1)), 3);
    }

    fn small_poly(max_deg: usize) -> impl Strategy<Value = Poly<Rat>> {
        proptest::collection::vec(-6i64..=6, 1..=max_deg + 1)
            .prop_map(|c| qpoly(Var::X, &c))
            .prop_filter("nonzero", |p| p.deg() >= 1)
    }

    proptest! {
        #[test]
        fn resultant_antisymmetry(f in small_poly(4), g in small_poly(4)) {
            let (m, n) = (f.deg(), g.deg());
            let r1 = resultant(&f, &g).unwrap();
            let r2 = resultant(&g, &f).unwrap();
            let expect = if (m * n) % 2 == 1 { -r2 } else { r2 };
            prop_assert_eq!(r1.clone(), expect);
            prop_assert_eq!(r1, sylvester_resultant(&f, &g));
        }

        #[test]
        fn discriminant_of_product(f in small_poly(3), g in small_poly(3)) {
            let fg = f.times(&g);
            let dfg = discriminant(&fg).unwrap();
            let lhs = !dfg.is_zero();
            let rhs = !discriminant(&f).unwrap().is_zero()
                && !discriminant(&g).unwrap().is_zero()
                && !resultant(&f, &g).unwrap().is_zero();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
