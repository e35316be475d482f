use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;

use super::{gcd_q, parse_expr, Poly, PolyError, Ring, Var};
use crate::arith::Rat;

/// Polynomial over ℚ[inner] in an outer variable.
pub type BiPoly = Poly<Poly<Rat>>;

/// Reduced quotient of polynomials in s with monic denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFunc {
    num: Poly<Rat>,
    den: Poly<Rat>,
}

impl RatFunc {
    pub fn new(num: Poly<Rat>, den: Poly<Rat>) -> Result<Self, PolyError> {
        if den.is_poly_zero() {
            return Err(PolyError::Zero);
        }
        let g = gcd_q(&num, &den);
        let (mut n, mut d) = (num.div_rem(&g).0, den.div_rem(&g).0);
        let lc = d.lc();
        n = n.scale(&lc.recip()).with_var(Var::S);
        d = d.scale(&lc.recip()).with_var(Var::S);
        Ok(RatFunc { num: n, den: d })
    }

    pub fn from_poly(p: Poly<Rat>) -> Self {
        RatFunc { num: p.with_var(Var::S), den: Poly::constant(Var::S, Rat::one()) }
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc::from_poly(Poly::constant(Var::S, c))
    }

    pub fn parse(src: &str) -> Result<Self, PolyError> {
        super::parse_ratfunc_s(src)
    }

    pub fn num(&self) -> &Poly<Rat> {
        &self.num
    }

    pub fn den(&self) -> &Poly<Rat> {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.deg() == 0
    }

    /// Value at `s0`, `None` at a pole.
    pub fn eval(&self, s0: &Rat) -> Option<Rat> {
        let d = self.den.eval(s0);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(s0) / d)
        }
    }

    /// The linear polynomial `den(s)·t - num(s)` vanishing at this point.
    pub fn linear_in_t(&self) -> BiPoly {
        Poly::new(Var::T, vec![self.num.negate(), self.den.clone()])
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Evaluates the inner variable of a bivariate polynomial.
pub fn eval_inner(f: &BiPoly, x: &Rat) -> Poly<Rat> {
    f.map(|c| c.eval(x))
}

/// Evaluates the outer variable, leaving a polynomial in the inner one.
pub fn eval_outer(f: &BiPoly, x: &Rat) -> Poly<Rat> {
    let mut acc = Poly::zero();
    for c in f.coeffs().iter().rev() {
        acc = acc.scale(x).plus(c);
    }
    acc
}

/// Swaps the two variables of a bivariate polynomial.
pub fn swap_bi(f: &BiPoly) -> BiPoly {
    let inner_var = f.coeffs().iter().map(|c| c.var()).find(|v| *v != Var::Free).unwrap_or(Var::Free);
    let deg_inner = f.coeffs().iter().map(|c| c.coeffs().len()).max().unwrap_or(0);
    let rows = (0..deg_inner)
        .map(|j| Poly::new(f.var(), f.coeffs().iter().map(|c| c.coeff(j)).collect()))
        .collect();
    Poly::new(inner_var, rows)
}

/// f(s,t,X) as a polynomial in X over ℚ[s][t], or a chart of it.
#[derive(Clone, Debug, PartialEq)]
pub struct TriPoly {
    vars: [Var; 3],
    p: Poly<Poly<Poly<Rat>>>,
}

impl TriPoly {
    pub fn new(vars: [Var; 3], p: Poly<Poly<Poly<Rat>>>) -> Self {
        let p = Poly::new(
            vars[0],
            p.into_coeffs()
                .into_iter()
                .map(|c| Poly::new(vars[1], c.into_coeffs().into_iter().map(|d| d.with_var(vars[2])).collect()))
                .collect(),
        );
        TriPoly { vars, p }
    }

    /// Parses a polynomial in `s, t, X`.
    pub fn parse(src: &str) -> Result<Self, PolyError> {
        Self::parse_in(src, [Var::X, Var::T, Var::S])
    }

    pub fn parse_in(src: &str, vars: [Var; 3]) -> Result<Self, PolyError> {
        let m = parse_expr(src)?.into_poly()?;
        Ok(TriPoly::new(vars, m.to_tripoly(vars)?))
    }

    pub fn vars(&self) -> [Var; 3] {
        self.vars
    }

    pub fn inner(&self) -> &Poly<Poly<Poly<Rat>>> {
        &self.p
    }

    /// Degree in the outer variable (X).
    pub fn deg_outer(&self) -> usize {
        self.p.degree().unwrap_or(0)
    }

    /// Degree in the middle variable (t).
    pub fn deg_mid(&self) -> usize {
        self.p.coeffs().iter().map(|c| c.degree().unwrap_or(0)).max().unwrap_or(0)
    }

    /// Degree in the innermost variable (s).
    pub fn deg_inner(&self) -> usize {
        self.p
            .coeffs()
            .iter()
            .flat_map(|c| c.coeffs().iter())
            .map(|d| d.degree().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        let lc = self.p.lc();
        lc.deg() == 0 && lc.lc().deg() == 0 && lc.lc().lc().is_one()
    }

    /// The coefficient of X^j as a polynomial in t over ℚ[s].
    pub fn coeff(&self, j: usize) -> BiPoly {
        self.p.coeff(j)
    }

    /// Binds s and/or t. Binding X is rejected.
    pub fn specialize(&self, bindings: &[(Var, Rat)]) -> Result<TriPoly, PolyError> {
        let mut mid = None;
        let mut inner = None;
        for (v, x) in bindings {
            if *v == self.vars[0] {
                return Err(PolyError::CannotBindX);
            } else if *v == self.vars[1] {
                mid = Some(x.clone());
            } else if *v == self.vars[2] {
                inner = Some(x.clone());
            } else {
                return Err(PolyError::Shape(format!("variable {v} does not occur")));
            }
        }
        let vars = self.vars;
        let p = self.p.map(|c: &BiPoly| {
            let c = match &inner {
                Some(s0) => c.map(|d| Poly::constant(vars[2], d.eval(s0))),
                None => c.clone(),
            };
            match &mid {
                Some(t0) => Poly::constant(vars[1], eval_outer(&c, t0).with_var(vars[2])),
                None => c,
            }
        });
        Ok(TriPoly::new(vars, p))
    }

    /// f(s0, t, X) as a polynomial in X over ℚ[t].
    pub fn at_inner(&self, s0: &Rat) -> BiPoly {
        self.p.map(|c| eval_inner(c, s0))
    }

    /// f(s0, t0, X).
    pub fn at(&self, s0: &Rat, t0: &Rat) -> Poly<Rat> {
        self.p.map(|c| eval_inner(c, s0).eval(t0))
    }

    /// f(s, t0, X) as a polynomial in X over ℚ[s].
    pub fn at_mid(&self, t0: &Rat) -> BiPoly {
        self.p.map(|c| eval_outer(c, t0).with_var(self.vars[2]))
    }

    /// disc_X f as a polynomial in t over ℚ[s].
    ///
    /// Computed over ℤ[s][t] after clearing denominators:
    /// disc(L·f) = L^(2n-2)·disc(f).
    pub fn discriminant(&self) -> Result<BiPoly, PolyError> {
        let mut l = BigInt::from(1);
        for c in self.p.coeffs().iter().flat_map(|a| a.coeffs()).flat_map(|b| b.coeffs()) {
            l = l.lcm(c.denom());
        }
        let lr = Rat::from_integer(l.clone());
        let pz = self.p.map(|a| a.map(|b| b.map(|c| (c * &lr).to_integer())));
        let dz = super::discriminant(&pz)?;
        let n = self.deg_outer() as u32;
        let scale = Rat::from_integer(num_traits::Pow::pow(&l, 2 * n.max(1) - 2)).recip();
        Ok(dz.map(|a| a.map(|c| Rat::from_integer(c.clone()) * &scale)))
    }

    /// Chart at t = ∞: g(s,u,Y) = u^(k·n) f(s, 1/u, Y/u^k) with the least
    /// k making g polynomial. Returns `(g, k)`; g is monic in Y.
    pub fn infinity_chart(&self) -> (TriPoly, usize) {
        let n = self.deg_outer();
        let mut k = 0usize;
        for j in 0..n {
            let d = self.p.coeff(j).degree().unwrap_or(0);
            k = k.max(d.div_ceil(n - j));
        }
        let mut coeffs = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let a = self.p.coeff(j);
            let shift = k * (n - j);
            let mut rows = vec![Poly::zero_in(self.vars[2]); shift + 1];
            for (i, c) in a.coeffs().iter().enumerate() {
                rows[shift - i] = c.clone();
            }
            coeffs.push(Poly::new(Var::U, rows));
        }
        (TriPoly::new([Var::Y, Var::U, self.vars[2]], Poly::new(Var::Y, coeffs)), k)
    }

    pub fn to_poly_string(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for TriPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.p.coeffs().iter().enumerate().rev() {
            for (j, d) in c.coeffs().iter().enumerate().rev() {
                for (l, a) in d.coeffs().iter().enumerate().rev() {
                    if a.is_zero() {
                        continue;
                    }
                    let neg = a < &Rat::zero();
                    let mag = if neg { -a.clone() } else { a.clone() };
                    if first {
                        if neg {
                            f.write_str("-")?;
                        }
                    } else {
                        f.write_str(if neg { " - " } else { " + " })?;
                    }
                    first = false;
                    let mut parts = Vec::new();
                    for (e, v) in [(l, self.vars[2]), (j, self.vars[1]), (i, self.vars[0])] {
                        match e {
                            0 => {}
                            1 => parts.push(v.to_string()),
                            _ => parts.push(format!("{v}^{e}")),
                        }
                    }
                    let mono = parts.join("*");
                    if mono.is_empty() {
                        write!(f, "{mag}")?;
                    } else if mag.is_one() {
                        f.write_str(&mono)?;
                    } else if mag.is_integer() {
                        write!(f, "{mag}*{mono}")?;
                    } else {
                        write!(f, "({mag})*{mono}")?;
                    }
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
