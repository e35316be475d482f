//! Text syntax for polynomials: `+ - * / ^`, parentheses, integer literals
//! and the single-letter variables `s t X u Y`. Juxtaposition multiplies,
//! so `2sX^6` and `tX^2(X - 1)` parse as written.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Poly, PolyError, RatFunc, Var};
use crate::arith::Rat;

const VARS: [Var; 5] = [Var::S, Var::T, Var::X, Var::U, Var::Y];

fn var_index(v: Var) -> Option<usize> {
    VARS.iter().position(|&w| w == v)
}

type Mono = [u32; 5];

/// Sparse polynomial in `s t X u Y` over ℚ.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct MPoly {
    terms: BTreeMap<Mono, Rat>,
}

impl MPoly {
    fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0; 5], c);
        }
        MPoly { terms }
    }

    fn variable(v: Var) -> Self {
        let mut m = [0; 5];
        m[var_index(v).unwrap()] = 1;
        MPoly { terms: BTreeMap::from([(m, Rat::one())]) }
    }

    fn add(&self, o: &MPoly, sign: i64) -> MPoly {
        let mut terms = self.terms.clone();
        for (m, c) in &o.terms {
            let e = terms.entry(*m).or_insert_with(Rat::zero);
            *e += c * Rat::from_integer(BigInt::from(sign));
            if e.is_zero() {
                terms.remove(m);
            }
        }
        MPoly { terms }
    }

    fn mul(&self, o: &MPoly) -> MPoly {
        let mut out = MPoly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let mut m = *ma;
                for i in 0..5 {
                    m[i] += mb[i];
                }
                let e = out.terms.entry(m).or_insert_with(Rat::zero);
                *e += ca * cb;
                if e.is_zero() {
                    out.terms.remove(&m);
                }
            }
        }
        out
    }

    fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&[0; 5]).cloned(),
            _ => None,
        }
    }

    /// Variables that actually occur.
    pub fn vars(&self) -> Vec<Var> {
        VARS.iter()
            .enumerate()
            .filter(|(i, _)| self.terms.keys().any(|m| m[*i] > 0))
            .map(|(_, v)| *v)
            .collect()
    }

    fn check_vars(&self, allowed: &[Var]) -> Result<(), PolyError> {
        for v in self.vars() {
            if !allowed.contains(&v) {
                return Err(PolyError::Shape(format!("unexpected variable {v}")));
            }
        }
        Ok(())
    }

    /// Univariate view in `v`.
    pub fn to_poly(&self, v: Var) -> Result<Poly<Rat>, PolyError> {
        self.check_vars(&[v])?;
        let i = var_index(v).unwrap();
        let deg = self.terms.keys().map(|m| m[i] as usize).max().unwrap_or(0);
        let mut c = vec![Rat::zero(); deg + 1];
        for (m, a) in &self.terms {
            c[m[i] as usize] += a;
        }
        Ok(Poly::new(v, c))
    }

    /// Bivariate view: outer variable over inner variable.
    pub fn to_bipoly(&self, outer: Var, inner: Var) -> Result<Poly<Poly<Rat>>, PolyError> {
        self.check_vars(&[outer, inner])?;
        let (io, ii) = (var_index(outer).unwrap(), var_index(inner).unwrap());
        let deg = self.terms.keys().map(|m| m[io] as usize).max().unwrap_or(0);
        let mut rows: Vec<Vec<Rat>> = vec![Vec::new(); deg + 1];
        for (m, a) in &self.terms {
            let row = &mut rows[m[io] as usize];
            let j = m[ii] as usize;
            if row.len() <= j {
                row.resize(j + 1, Rat::zero());
            }
            row[j] += a;
        }
        Ok(Poly::new(outer, rows.into_iter().map(|r| Poly::new(inner, r)).collect()))
    }

    /// Trivariate view in `[outer, mid, inner]`.
    pub fn to_tripoly(&self, vars: [Var; 3]) -> Result<Poly<Poly<Poly<Rat>>>, PolyError> {
        self.check_vars(&vars)?;
        let io = var_index(vars[0]).unwrap();
        let deg = self.terms.keys().map(|m| m[io] as usize).max().unwrap_or(0);
        let mut slices = vec![MPoly::default(); deg + 1];
        for (m, a) in &self.terms {
            let mut m2 = *m;
            m2[io] = 0;
            slices[m[io] as usize].terms.insert(m2, a.clone());
        }
        let coeffs = slices
            .iter()
            .map(|sl| sl.to_bipoly(vars[1], vars[2]))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::new(vars[0], coeffs))
    }
}

/// A parsed expression: a quotient of two sparse polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub num: MPoly,
    pub den: MPoly,
}

impl Expr {
    fn from_poly(num: MPoly) -> Self {
        Expr { num, den: MPoly::constant(Rat::one()) }
    }

    fn normalize(mut self) -> Self {
        if let Some(c) = self.den.as_constant() {
            if !c.is_one() {
                self.num = self.num.mul(&MPoly::constant(c.recip()));
                self.den = MPoly::constant(Rat::one());
            }
        }
        self
    }

    fn add(&self, o: &Expr, sign: i64) -> Expr {
        if self.den == o.den {
            return Expr { num: self.num.add(&o.num, sign), den: self.den.clone() };
        }
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den), sign);
        Expr { num, den: self.den.mul(&o.den) }.normalize()
    }

    fn mul(&self, o: &Expr) -> Expr {
        Expr { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }.normalize()
    }

    fn div(&self, o: &Expr) -> Result<Expr, String> {
        if o.num.terms.is_empty() {
            return Err("division by zero".into());
        }
        Ok(Expr { num: self.num.mul(&o.den), den: self.den.mul(&o.num) }.normalize())
    }

    fn pow(&self, e: u32) -> Expr {
        let mut acc = Expr::from_poly(MPoly::constant(Rat::one()));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// The expression as a polynomial (its denominator must be constant).
    pub fn into_poly(self) -> Result<MPoly, PolyError> {
        match self.den.as_constant() {
            Some(c) => Ok(self.num.mul(&MPoly::constant(c.recip()))),
            None => Err(PolyError::Shape("expected a polynomial, found a rational function".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(Var),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().map(|x| x.1).collect();
                out.push((pos, Tok::Num(digits.parse().unwrap())));
            }
            's' => {
                out.push((pos, Tok::Var(Var::S)));
                i += 1;
            }
            't' => {
                out.push((pos, Tok::Var(Var::T)));
                i += 1;
            }
            'X' => {
                out.push((pos, Tok::Var(Var::X)));
                i += 1;
            }
            'u' => {
                out.push((pos, Tok::Var(Var::U)));
                i += 1;
            }
            'Y' => {
                out.push((pos, Tok::Var(Var::Y)));
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                out.push((pos, Tok::Op(c)));
                i += 1;
            }
            _ => return Err(PolyError::Parse { pos, msg: format!("unexpected character {c:?}") }),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, PolyError> {
        let mut acc = if self.eat('-') {
            Expr::from_poly(MPoly::default()).add(&self.term()?, -1)
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?, 1);
            } else if self.eat('-') {
                acc = acc.add(&self.term()?, -1);
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_primary(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Var(_)) | Some(Tok::Op('(')))
    }

    fn term(&mut self) -> Result<Expr, PolyError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.factor()?);
            } else if self.eat('/') {
                let d = self.factor()?;
                acc = match acc.div(&d) {
                    Ok(q) => q,
                    Err(m) => return self.err(m),
                };
            } else if self.starts_primary() {
                acc = acc.mul(&self.factor()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, PolyError> {
        if self.eat('-') {
            let f = self.factor()?;
            return Ok(Expr::from_poly(MPoly::default()).add(&f, -1));
        }
        let base = self.primary()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.at += 1;
                    let e: u32 = match u32::try_from(&n) {
                        Ok(e) if e <= 1000 => e,
                        _ => return self.err("exponent too large"),
                    };
                    return Ok(base.pow(e));
                }
                _ => return self.err("expected a non-negative integer exponent"),
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, PolyError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.at += 1;
                Ok(Expr::from_poly(MPoly::constant(Rat::from_integer(n))))
            }
            Some(Tok::Var(v)) => {
                self.at += 1;
                Ok(Expr::from_poly(MPoly::variable(v)))
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses an expression in `s t X u Y`.
pub fn parse_expr(src: &str) -> Result<Expr, PolyError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(PolyError::Parse { pos: 0, msg: "empty expression".into() });
    }
    let mut p = Parser { toks, at: 0, end: src.len() };
    let e = p.expr()?;
    if p.at != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Parses a univariate polynomial in `v`.
pub fn parse_poly_in(src: &str, v: Var) -> Result<Poly<Rat>, PolyError> {
    parse_expr(src)?.into_poly()?.to_poly(v)
}

/// Parses a rational function in `s`.
pub fn parse_ratfunc_s(src: &str) -> Result<RatFunc, PolyError> {
    let e = parse_expr(src)?;
    let num = e.num.to_poly(Var::S)?;
    let den = e.den.to_poly(Var::S)?;
    RatFunc::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    #[test]
    fn implicit_multiplication() {
        let e = parse_expr("2sX^6 - tX^2(X - 1)").unwrap().into_poly().unwrap();
        let f = e.to_tripoly([Var::X, Var::T, Var::S]).unwrap();
        assert_eq!(f.degree(), Some(6));
        assert_eq!(f.coeff(6).coeff(0).coeff(1), rat(2));
        assert_eq!(f.coeff(3).coeff(1).coeff(0), rat(-1));
        assert_eq!(f.coeff(2).coeff(1).coeff(0), rat(1));
    }

    #[test]
    fn precedence_and_signs() {
        let p = parse_poly_in("-X^2 + 3*X - -2", Var::X).unwrap();
        assert_eq!(p.coeffs(), &[rat(2), rat(3), rat(-1)]);
        let q = parse_poly_in("(X+1)^3/2", Var::X).unwrap();
        assert_eq!(q.coeffs(), &[ratio(1, 2), ratio(3, 2), ratio(3, 2), ratio(1, 2)]);
        assert_eq!(parse_poly_in("2^3", Var::X).unwrap().coeff(0), rat(8));
    }

    #[test]
    fn rational_function() {
        let r = parse_ratfunc_s("(s^2 - 1)/(2s - 2)").unwrap();
        assert_eq!(r.num().coeffs(), &[ratio(1, 2), ratio(1, 2)]);
        assert_eq!(r.den().coeffs(), &[rat(1)]);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_expr("X +"), Err(PolyError::Parse { .. })));
        assert!(matches!(parse_expr("X ? 2"), Err(PolyError::Parse { pos: 2, .. })));
        assert!(matches!(parse_expr("(X"), Err(PolyError::Parse { .. })));
        assert!(parse_poly_in("X + t", Var::X).is_err());
        assert!(parse_expr("1/(s-s)").is_err());
    }
}
