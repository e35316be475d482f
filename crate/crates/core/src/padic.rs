//! Shape of the factorization of a polynomial over ℚ_p: the multiset of
//! (ramification index, residue degree) of its irreducible p-adic factors.
//!
//! The method works with exact rationals throughout. For each irreducible
//! factor φ̄ of f mod p with multiplicity m, f is expanded φ-adically, the
//! principal part of the Newton polygon is read off, and each side's
//! residual polynomial is factored over 𝔽_p[z]/(φ̄). A repeated residual
//! root of a slope-h side with e = 1 is handled by moving the key to
//! φ − c·p^h and looking at the steeper part only.

use num_rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{check_prime, is_p_integral, valuation_unchecked, ArithError, Rat, Val};
use crate::ffact::{factor, factor_mod_p, ExtField, FPoly, FiniteField, FpPoly};
use crate::poly::{discriminant, newton_polygon, Poly, Ring, Segment};

pub const MAX_DEPTH: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial has degree 0")]
    Constant,
    #[error("coefficients are not {0}-integral")]
    NotIntegral(u64),
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("wild ramification (e = {e} divisible by p = {p})")]
    Unsupported { p: u64, e: usize },
    #[error("shape undetermined: {0}")]
    Diagnostic(String),
}

/// Multiset of (e, f) over ℚ_p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicShape {
    pub p: u64,
    /// Sorted by descending e, then descending f.
    pub factors: Vec<(usize, usize)>,
    pub tame: bool,
}

impl PadicShape {
    pub fn new(p: u64, mut factors: Vec<(usize, usize)>) -> Self {
        factors.sort_unstable_by(|a, b| b.cmp(a));
        let tame = factors.iter().all(|(e, _)| !(*e as u64).is_multiple_of(p));
        PadicShape { p, factors, tame }
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().map(|(e, f)| e * f).sum()
    }

    /// f copies of e for each factor, descending: the cycle type of an
    /// inertia generator acting on the roots.
    pub fn expanded(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.factors.iter().flat_map(|&(e, f)| std::iter::repeat_n(e, f)).collect();
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// Σ (e - 1)·f, the valuation of the local discriminant when tame.
    pub fn different_exponent(&self) -> usize {
        self.factors.iter().map(|(e, f)| (e - 1) * f).sum()
    }

    pub fn is_unramified(&self) -> bool {
        self.factors.iter().all(|(e, _)| *e == 1)
    }
}

impl std::fmt::Display for PadicShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|(e, g)| format!("({e},{g})")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn poly_valuation(a: &Poly<Rat>, p: u64) -> Val {
    a.coeffs().iter().map(|c| valuation_unchecked(c, p)).min().unwrap_or(Val::Inf)
}

fn pow_p(p: u64, k: i64) -> Rat {
    let base = Rat::from_integer(p.into());
    if k >= 0 {
        base.power(k as u32)
    } else {
        base.power((-k) as u32).recip()
    }
}

fn lift(a: &FpPoly) -> Poly<Rat> {
    Poly::new(crate::poly::Var::X, a.coeffs().iter().map(|&c| Rat::from_integer(c.into())).collect())
}

struct Ctx {
    p: u64,
    rng: ChaCha8Rng,
}

/// p-adic factorization shape of a monic, squarefree, p-integral polynomial.
pub fn padic_shape(f: &Poly<Rat>, p: u64) -> Result<PadicShape, PadicError> {
    check_prime(p)?;
    let n = f.degree().ok_or(PadicError::Constant)?;
    if n == 0 {
        return Err(PadicError::Constant);
    }
    if !f.is_monic() {
        return Err(PadicError::NotMonic);
    }
    if !f.coeffs().iter().all(|c| is_p_integral(c, p)) {
        return Err(PadicError::NotIntegral(p));
    }
    if discriminant(f).map_err(|e| PadicError::Diagnostic(e.to_string()))?.is_zero() {
        return Err(PadicError::NotSquarefree);
    }
    let f = f.clone().with_var(crate::poly::Var::X);
    let mut ctx = Ctx { p, rng: ChaCha8Rng::seed_from_u64(p) };
    let fbar = FpPoly::from_rat(&f, p).map_err(|_| PadicError::NotIntegral(p))?;
    let fac = factor_mod_p(&fbar, &mut ctx.rng).map_err(|e| PadicError::Diagnostic(e.to_string()))?;
    let mut out = Vec::new();
    for (phibar, m) in &fac.factors {
        let d = phibar.deg() as usize;
        if *m == 1 {
            out.push((1, d));
        } else {
            out.extend(analyze(&f, &lift(phibar), *m, Ratio::from_integer(0), &mut ctx, 0)?);
        }
    }
    let shape = PadicShape::new(p, out);
    if shape.degree() != n {
        return Err(PadicError::Diagnostic(format!("degrees sum to {} not {n}", shape.degree())));
    }
    debug_assert!(index_parity_holds(&shape, &f), "discriminant valuation below local bound for {f} at {p}");
    Ok(shape)
}

fn index_parity_holds(shape: &PadicShape, f: &Poly<Rat>) -> bool {
    match discriminant(f).map(|d| valuation_unchecked(&d, shape.p)) {
        Ok(Val::Fin(v)) => {
            let diff = v - shape.different_exponent() as i64;
            diff >= 0 && diff % 2 == 0
        }
        _ => false,
    }
}

/// Roots in the φ̄-cluster of `f` with v(φ(θ)) > `bound`.
fn analyze(
    f: &Poly<Rat>,
    phi: &Poly<Rat>,
    m: usize,
    bound: Ratio<i64>,
    ctx: &mut Ctx,
    depth: usize,
) -> Result<Vec<(usize, usize)>, PadicError> {
    if depth > MAX_DEPTH {
        return Err(PadicError::Diagnostic(format!("recursion depth {MAX_DEPTH} exceeded")));
    }
    let p = ctx.p;
    let dphi = phi.deg() as usize;
    let mut expansion = Vec::with_capacity(m + 1);
    let mut rest = f.clone();
    for _ in 0..=m {
        let (q, r) = rest.div_rem(phi);
        expansion.push(r);
        rest = q;
    }
    if expansion[0].is_zero() {
        // φ divides f exactly: one unramified factor, then the cofactor.
        let g = f.div_rem(phi).0;
        let mut out = vec![(1, dphi)];
        if m > 1 {
            out.extend(analyze(&g, phi, m - 1, bound, ctx, depth)?);
        }
        return Ok(out);
    }
    let vals: Vec<Val> = expansion.iter().map(|a| poly_valuation(a, p)).collect();
    if vals[m] != Val::Fin(0) {
        return Err(PadicError::Diagnostic("principal part does not end at the multiplicity".into()));
    }
    let np = newton_polygon(&vals).map_err(|e| PadicError::Diagnostic(e.to_string()))?;
    let field = ExtField::new(FpPoly::from_rat(phi, p).map_err(|_| PadicError::NotIntegral(p))?)
        .map_err(|e| PadicError::Diagnostic(e.to_string()))?;
    let mut out = Vec::new();
    for seg in &np.segments {
        let slope = -seg.slope();
        if slope <= bound {
            continue;
        }
        let e = seg.ramification();
        let h = *slope.numer();
        let res = residual_polynomial(seg, &expansion, &vals, &field, p)?;
        let fac = factor(&res, &mut ctx.rng).map_err(|e| PadicError::Diagnostic(e.to_string()))?;
        for (psi, mu) in &fac.factors {
            let dpsi = psi.deg() as usize;
            if *mu == 1 {
                if (e as u64).is_multiple_of(p) {
                    return Err(PadicError::Unsupported { p, e });
                }
                out.push((e, dphi * dpsi));
            } else if e == 1 && dpsi == 1 {
                let c = lift(&field.neg(&psi.coeff(0)));
                let phi2 = phi.minus(&c.scale(&pow_p(p, h)));
                let sub = analyze(f, &phi2, m, slope, ctx, depth + 1)?;
                let got: usize = sub.iter().map(|(e, f)| e * f).sum();
                if got != mu * dphi {
                    return Err(PadicError::Diagnostic(format!("refinement recovered degree {got}, expected {}", mu * dphi)));
                }
                out.extend(sub);
            } else {
                return Err(PadicError::Diagnostic(format!(
                    "repeated residual factor of degree {dpsi} on a side with e = {e} needs a higher-order key"
                )));
            }
        }
    }
    Ok(out)
}

fn residual_polynomial(
    seg: &Segment,
    expansion: &[Poly<Rat>],
    vals: &[Val],
    field: &ExtField,
    p: u64,
) -> Result<FPoly<ExtField>, PadicError> {
    let e = seg.ramification();
    let h = -*seg.slope().numer();
    let d = seg.degree();
    let (s, vs) = seg.start;
    let mut coeffs = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let j = s + k * e;
        let target = vs - (k as i64) * h;
        if vals[j] == Val::Fin(target) {
            let unit = expansion[j].scale(&pow_p(p, -target));
            let red = FpPoly::from_rat(&unit, p).map_err(|_| PadicError::NotIntegral(p))?;
            coeffs.push(field.embed(&red));
        } else {
            coeffs.push(field.zero());
        }
    }
    Ok(FPoly::new(field.clone(), coeffs))
}

/// True iff v_p(disc f) = Σ (e - 1)·f. This holds when ℤ[θ] is maximal at p;
/// otherwise the left side exceeds the right by twice the index valuation.
pub fn disc_valuation_check(shape: &PadicShape, f: &Poly<Rat>, p: u64) -> bool {
    match discriminant(f) {
        Ok(d) => valuation_unchecked(&d, p) == Val::Fin(shape.different_exponent() as i64),
        Err(_) => false,
    }
}
