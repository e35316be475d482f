//! One-parameter families f(s,t,X) with declared group and branch-point
//! data. Declarations are checked against the polynomial when a manifest is
//! loaded; per-s0 checks cover degeneration and local ramification.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{Rat, Val};
use crate::permgrp::{generate, CycleType, Perm, PermError, PermGroup, DEFAULT_CAP};
use crate::poly::zring::{bi_to_z, from_z, ZBi};
use crate::poly::{
    discriminant, eval_inner, gcd_q, newton_polygon, parse_expr, primitive_int, primitive_part_s, rational_roots,
    resultant, root_multiplicity, squarefree_part_q, squarefree_part_qs, BiPoly, Poly, PolyError, RatFunc, Ring,
    TriPoly, Var,
};

/// Recursion limit for the τ-adic expansion.
const PUISEUX_DEPTH: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("malformed manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("f is not squarefree as a polynomial in X")]
    NotSquarefree,
    #[error("s0 = {s0} is degenerate: {}", reasons.join("; "))]
    Degenerate { s0: Rat, reasons: Vec<String> },
    #[error("no branch point with index {0}")]
    NoBranch(usize),
    #[error("branch point {0} has no rational value at s0 = {1}")]
    Pole(usize, Rat),
    #[error("branch {branch}: declared cycle type {declared} but the local expansion gives {observed}")]
    ManifestInconsistent { branch: usize, declared: CycleType, observed: CycleType },
    #[error("local expansion undetermined: {0}")]
    Undetermined(String),
}

// ---------------------------------------------------------------------------
// Manifest file format

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestFile {
    pub name: String,
    pub poly: String,
    #[serde(default)]
    pub group_generators: Vec<String>,
    #[serde(default)]
    pub branch_points: Vec<BranchPointFile>,
    #[serde(default)]
    pub infinity_transformed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BranchPointFile {
    pub location: String,
    pub e: usize,
    pub inertia_generator: String,
    #[serde(default)]
    pub decomposition_generators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residue_subextension: Option<String>,
}

// ---------------------------------------------------------------------------
// Validated family

#[derive(Clone, Debug, PartialEq)]
pub enum Location {
    Finite(RatFunc),
    Infinity,
}

impl Location {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Location::Infinity)
    }

    /// Specialized value; `None` at ∞ or at a pole.
    pub fn at(&self, s0: &Rat) -> Option<Rat> {
        match self {
            Location::Finite(m) => m.eval(s0),
            Location::Infinity => None,
        }
    }
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Location::Finite(m) => write!(f, "{m}"),
            Location::Infinity => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BranchPoint {
    pub location: Location,
    pub e: usize,
    pub inertia_generator: Perm,
    pub decomposition: PermGroup,
    /// ρ as a polynomial in X over ℚ[s].
    pub residue_subextension: Option<BiPoly>,
}

impl BranchPoint {
    pub fn inertia_group(&self) -> PermGroup {
        generate(std::slice::from_ref(&self.inertia_generator), self.inertia_generator.degree(), DEFAULT_CAP)
            .expect("cyclic group is small")
    }
}

/// An s-polynomial whose roots mark degenerate specializations.
#[derive(Clone, Debug, Serialize)]
pub struct SCondition {
    pub label: String,
    /// Primitive with integer coefficients.
    #[serde(serialize_with = "ser_display")]
    pub poly: Poly<Rat>,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug)]
struct Symbolic {
    /// Squarefree part of disc_X f over ℚ(s), primitive.
    radical: BiPoly,
    /// Radical with the declared rational branch points divided out.
    residual: BiPoly,
    conditions: Vec<SCondition>,
}

#[derive(Debug)]
pub struct Family {
    name: String,
    f: TriPoly,
    group: Option<PermGroup>,
    branches: Vec<BranchPoint>,
    infinity_transformed: bool,
    disc: BiPoly,
    chart: (TriPoly, usize),
    symbolic: OnceLock<Symbolic>,
}

fn manifest_err(msg: impl Into<String>) -> FamilyError {
    FamilyError::Manifest(msg.into())
}

impl Family {
    pub fn load(path: impl AsRef<Path>) -> Result<Family, FamilyError> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path).map_err(|e| manifest_err(format!("{}: {e}", path.display())))?;
        Family::from_json(&src)
    }

    pub fn from_json(src: &str) -> Result<Family, FamilyError> {
        let file: ManifestFile = serde_json::from_str(src).map_err(|e| manifest_err(e.to_string()))?;
        Family::from_manifest(&file)
    }

    pub fn from_manifest(m: &ManifestFile) -> Result<Family, FamilyError> {
        let f = TriPoly::parse(&m.poly)?;
        let n = f.deg_outer();
        if n == 0 {
            return Err(manifest_err("polynomial has degree 0 in X"));
        }
        if !f.is_monic() {
            return Err(manifest_err("polynomial is not monic in X"));
        }
        let disc = f.discriminant()?;
        if disc.is_poly_zero() {
            return Err(FamilyError::NotSquarefree);
        }
        let group = if m.group_generators.is_empty() {
            None
        } else {
            let gens = m.group_generators.iter().map(|g| Perm::parse(g, n)).collect::<Result<Vec<_>, _>>()?;
            Some(generate(&gens, n, DEFAULT_CAP)?)
        };
        let chart = f.infinity_chart();
        let mut branches = Vec::new();
        for (i, b) in m.branch_points.iter().enumerate() {
            let bp = load_branch(b, n, group.as_ref()).map_err(|e| manifest_err(format!("branch point {i}: {e}")))?;
            match &bp.location {
                Location::Finite(r) => {
                    if !disc_vanishes_at(&disc, r) {
                        return Err(manifest_err(format!("branch point {i} (t = {r}) is not a root of disc_X f")));
                    }
                }
                Location::Infinity => {
                    if !chart_disc_at_zero(&chart.0).is_poly_zero() {
                        return Err(manifest_err(format!("branch point {i} (t = inf): disc of the chart at u = 0 does not vanish")));
                    }
                }
            }
            if branches.iter().any(|o: &BranchPoint| o.location == bp.location) {
                return Err(manifest_err(format!("branch point {i} declared twice")));
            }
            branches.push(bp);
        }
        Ok(Family {
            name: m.name.clone(),
            f,
            group,
            branches,
            infinity_transformed: m.infinity_transformed,
            disc,
            chart,
            symbolic: OnceLock::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn poly(&self) -> &TriPoly {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.f.deg_outer()
    }

    pub fn group(&self) -> Option<&PermGroup> {
        self.group.as_ref()
    }

    /// |G| if declared, else n! as a stand-in for S_n.
    pub fn group_order(&self) -> u128 {
        match &self.group {
            Some(g) => g.order() as u128,
            None => (1..=self.degree() as u128).product(),
        }
    }

    pub fn branches(&self) -> &[BranchPoint] {
        &self.branches
    }

    pub fn branch(&self, i: usize) -> Result<&BranchPoint, FamilyError> {
        self.branches.get(i).ok_or(FamilyError::NoBranch(i))
    }

    pub fn infinity_branch(&self) -> Option<usize> {
        self.branches.iter().position(|b| b.location.is_infinity())
    }

    pub fn infinity_transformed(&self) -> bool {
        self.infinity_transformed
    }

    /// disc_X f as a polynomial in t over ℚ[s].
    pub fn discriminant(&self) -> &BiPoly {
        &self.disc
    }

    /// The chart g(s,u,Y) = u^(kn) f(s, 1/u, Y/u^k) and k.
    pub fn chart(&self) -> &(TriPoly, usize) {
        &self.chart
    }

    fn symbolic(&self) -> &Symbolic {
        self.symbolic.get_or_init(|| self.compute_symbolic())
    }

    fn compute_symbolic(&self) -> Symbolic {
        let radical = squarefree_part_qs(&self.disc);
        let mut residual = radical.clone();
        for b in &self.branches {
            if let Location::Finite(m) = &b.location {
                residual = residual.div_exact(&m.linear_in_t()).expect("declared branch point divides the radical");
            }
        }
        let residual = primitive_part_s(&residual);
        let conditions = s_conditions(&self.f, &self.disc, &self.branches, &residual);
        Symbolic { radical, residual, conditions }
    }

    /// Squarefree part of the discriminant over ℚ(s), primitive in ℤ[s][t].
    pub fn radical(&self) -> &BiPoly {
        &self.symbolic().radical
    }

    /// The part of the branch locus not accounted for by declared rational
    /// branch points, left unfactored.
    pub fn residual(&self) -> &BiPoly {
        &self.symbolic().residual
    }

    /// Fixed list of primitive integral s-polynomials whose roots are the
    /// degenerate values of s (over ℚ, and mod p for good p).
    pub fn s_conditions(&self) -> &[SCondition] {
        &self.symbolic().conditions
    }

    pub fn symbolic_locus(&self) -> SymbolicLocus {
        SymbolicLocus {
            rational: self
                .branches
                .iter()
                .filter_map(|b| match &b.location {
                    Location::Finite(m) => Some(m.to_string()),
                    Location::Infinity => None,
                })
                .collect(),
            residual: poly_string(self.residual()),
            infinity: self.infinity_branch().is_some() || chart_disc_at_zero(&self.chart.0).is_poly_zero(),
        }
    }

    /// f(s0, t, X) as a polynomial in X over ℚ[t].
    pub fn at(&self, s0: &Rat) -> BiPoly {
        self.f.at_inner(s0)
    }

    /// Checks that s0 is a non-degenerate specialization.
    pub fn nondegenerate_check(&self, s0: &Rat) -> Nondegeneracy {
        let mut reasons = Vec::new();
        let f0 = self.f.at_inner(s0);
        let deg_t = f0.coeffs().iter().map(|c| c.deg()).max().unwrap_or(-1);
        if deg_t != self.f.deg_mid() as isize {
            reasons.push(format!("t-degree drops from {} to {}", self.f.deg_mid(), deg_t.max(0)));
        }
        let d0 = eval_inner(&self.disc, s0);
        if d0.is_poly_zero() {
            reasons.push("discriminant vanishes identically (f(s0,t,X) not squarefree)".into());
        } else if d0.deg() != self.disc.deg() {
            reasons.push(format!("discriminant t-degree drops from {} to {}", self.disc.deg(), d0.deg()));
        }
        for (i, b) in self.branches.iter().enumerate() {
            if let Location::Finite(m) = &b.location {
                if m.den().eval(s0).is_zero() {
                    reasons.push(format!("branch point {i} (t = {m}) has a pole"));
                }
            }
        }
        let finite: Vec<(usize, &RatFunc)> = self
            .branches
            .iter()
            .enumerate()
            .filter_map(|(i, b)| match &b.location {
                Location::Finite(m) => Some((i, m)),
                Location::Infinity => None,
            })
            .collect();
        for (x, &(i, mi)) in finite.iter().enumerate() {
            for &(j, mj) in &finite[x + 1..] {
                let w = mi.num().times(mj.den()).minus(&mj.num().times(mi.den()));
                if w.eval(s0).is_zero() {
                    reasons.push(format!("branch points {i} and {j} collide"));
                }
            }
        }
        let res = self.residual();
        if res.deg() > 0 {
            if res.lc().eval(s0).is_zero() {
                reasons.push("a non-rational branch point moves to infinity".into());
            }
            if res.deg() > 1 {
                let r0 = eval_inner(res, s0);
                if r0.deg() == res.deg() && !crate::poly::is_squarefree_q(&r0) {
                    reasons.push("non-rational branch points collide".into());
                }
            }
            for &(i, m) in &finite {
                if let Some(a) = m.eval(s0) {
                    if eval_inner(res, s0).eval(&a).is_zero() {
                        reasons.push(format!("branch point {i} meets a non-rational branch point"));
                    }
                }
            }
        }
        Nondegeneracy { s0: s0.clone(), ok: reasons.is_empty(), reasons }
    }

    /// Branch locus of f(s0, t, X), labelled against the declared points.
    pub fn branch_locus(&self, s0: &Rat) -> Result<BranchLocus, FamilyError> {
        let mut locus = branch_locus(&self.f, s0)?;
        for pt in &mut locus.finite {
            pt.declared = self.branches.iter().position(|b| b.location.at(s0).as_ref() == Some(&pt.t));
        }
        locus.infinity_declared = self.infinity_branch();
        Ok(locus)
    }

    /// f(s0, m + τ, X) for a finite branch point, or the chart g(s0, τ, Y) at ∞.
    pub fn local_poly(&self, i: usize, s0: &Rat) -> Result<BiPoly, FamilyError> {
        let b = self.branch(i)?;
        Ok(match &b.location {
            Location::Infinity => self.chart.0.at_inner(s0),
            Location::Finite(m) => {
                let a = m.eval(s0).ok_or_else(|| FamilyError::Pole(i, s0.clone()))?;
                self.f.at_inner(s0).map(|c| c.taylor_shift(&a))
            }
        })
    }

    /// Places over t → m_i(s0) read off τ-adic Newton polygons; the
    /// expanded ramification indices must match the declared cycle type.
    pub fn inertia_order_probe(&self, i: usize, s0: &Rat) -> Result<InertiaProbe, FamilyError> {
        let nd = self.nondegenerate_check(s0);
        if !nd.ok {
            return Err(FamilyError::Degenerate { s0: s0.clone(), reasons: nd.reasons });
        }
        let local = self.local_poly(i, s0)?;
        let places = tau_adic_places(&local)?;
        let observed = expand_places(&places);
        let declared = self.branch(i)?.inertia_generator.cycle_type();
        if observed != declared {
            return Err(FamilyError::ManifestInconsistent { branch: i, declared, observed });
        }
        Ok(InertiaProbe { branch: i, s0: s0.clone(), places, cycle_type: observed })
    }
}

fn load_branch(b: &BranchPointFile, n: usize, group: Option<&PermGroup>) -> Result<BranchPoint, FamilyError> {
    let location = match b.location.trim() {
        "inf" | "infinity" | "∞" => Location::Infinity,
        s => Location::Finite(RatFunc::parse(s)?),
    };
    let tau = Perm::parse(&b.inertia_generator, n)?;
    if tau.order() != b.e {
        return Err(manifest_err(format!("inertia generator {tau} has order {}, declared e = {}", tau.order(), b.e)));
    }
    let mut gens = b.decomposition_generators.iter().map(|g| Perm::parse(g, n)).collect::<Result<Vec<_>, _>>()?;
    if gens.is_empty() {
        gens.push(tau.clone());
    }
    let decomposition = generate(&gens, n, DEFAULT_CAP)?;
    if !decomposition.contains(&tau) {
        return Err(manifest_err("inertia generator is not in the decomposition group"));
    }
    let inertia = generate(std::slice::from_ref(&tau), n, DEFAULT_CAP)?;
    if !inertia.is_normal_in(&decomposition) {
        return Err(manifest_err("inertia group is not normal in the decomposition group"));
    }
    if let Some(g) = group {
        if !decomposition.is_subgroup_of(g) {
            return Err(manifest_err("decomposition group is not contained in G"));
        }
    }
    let residue_subextension = match &b.residue_subextension {
        None => None,
        Some(src) => {
            let rho = parse_expr(src)?.into_poly()?.to_bipoly(Var::X, Var::S)?;
            if rho.deg() < 1 || !rho.lc().is_one() {
                return Err(manifest_err("residue subextension must be monic in X"));
            }
            if squarefree_part_qs(&rho).deg() != rho.deg() {
                return Err(manifest_err("residue subextension is not squarefree"));
            }
            let quotient = decomposition.order() / b.e;
            if !quotient.is_multiple_of(rho.deg() as usize) {
                return Err(manifest_err(format!("deg ρ = {} does not divide |D|/e = {quotient}", rho.deg())));
            }
            Some(rho)
        }
    };
    Ok(BranchPoint { location, e: b.e, inertia_generator: tau, decomposition, residue_subextension })
}

/// den^deg · D(s, num/den) == 0.
fn disc_vanishes_at(disc: &BiPoly, m: &RatFunc) -> bool {
    let deg = disc.degree().unwrap_or(0);
    let mut acc = Poly::zero_in(Var::S);
    for (j, c) in disc.coeffs().iter().enumerate() {
        let term = c.times(&m.num().power(j as u32)).times(&m.den().power((deg - j) as u32));
        acc = acc.plus(&term);
    }
    acc.is_poly_zero()
}

/// disc_Y g(s, 0, Y) as a polynomial in s.
fn chart_disc_at_zero(g: &TriPoly) -> Poly<Rat> {
    let g0: BiPoly = g.inner().map(|c| c.coeff(0));
    discriminant(&g0).unwrap_or_else(|_| Poly::zero_in(Var::S))
}

/// Primitive integral squarefree part: same roots over ℚ̄ and, by Gauss's
/// lemma, the same roots mod every prime.
fn prim_s(p: &Poly<Rat>) -> Poly<Rat> {
    let p = if p.deg() > 0 { squarefree_part_q(p) } else { p.clone() };
    primitive_int(&p).1.with_var(Var::S)
}

fn z_resultant(a: &BiPoly, b: &BiPoly) -> Poly<Rat> {
    let (za, zb): (ZBi, ZBi) = (bi_to_z(a), bi_to_z(b));
    from_z(&resultant(&za, &zb).expect("same variable"))
}

fn z_discriminant(a: &BiPoly) -> Poly<Rat> {
    from_z(&discriminant(&bi_to_z(a)).expect("positive degree"))
}

fn s_conditions(f: &TriPoly, disc: &BiPoly, branches: &[BranchPoint], residual: &BiPoly) -> Vec<SCondition> {
    let mut out = Vec::new();
    let mut push = |label: String, p: Poly<Rat>| {
        if !p.is_poly_zero() {
            out.push(SCondition { label, poly: prim_s(&p) });
        }
    };
    let top = f.deg_mid();
    let lead_t = (0..=f.deg_outer()).map(|j| f.coeff(j).coeff(top)).find(|c| !c.is_poly_zero());
    if let Some(c) = lead_t {
        push("t-leading coefficient of f".into(), c);
    }
    push("t-leading coefficient of disc_X f".into(), disc.lc());
    let finite: Vec<(usize, &RatFunc)> = branches
        .iter()
        .enumerate()
        .filter_map(|(i, b)| match &b.location {
            Location::Finite(m) => Some((i, m)),
            Location::Infinity => None,
        })
        .collect();
    for &(i, m) in &finite {
        push(format!("denominator of branch point {i}"), m.den().clone());
    }
    for (x, &(i, mi)) in finite.iter().enumerate() {
        for &(j, mj) in &finite[x + 1..] {
            push(format!("collision of branch points {i} and {j}"), mi.num().times(mj.den()).minus(&mj.num().times(mi.den())));
        }
    }
    if residual.deg() > 0 {
        push("leading coefficient of the residual locus".into(), residual.lc());
        if residual.deg() > 1 {
            push("discriminant of the residual locus".into(), z_discriminant(residual));
        }
        for &(i, m) in &finite {
            push(format!("branch point {i} against the residual locus"), z_resultant(residual, &m.linear_in_t()));
        }
    }
    out
}

fn poly_string(p: &BiPoly) -> String {
    let mut parts = Vec::new();
    for (j, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_poly_zero() {
            continue;
        }
        let mono = match j {
            0 => String::new(),
            1 => format!("*{}", p.var()),
            _ => format!("*{}^{j}", p.var()),
        };
        parts.push(format!("({c}){mono}"));
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Clone, Debug, Serialize)]
pub struct Nondegeneracy {
    #[serde(with = "crate::arith::rat_string")]
    pub s0: Rat,
    pub ok: bool,
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolicLocus {
    pub rational: Vec<String>,
    pub residual: String,
    pub infinity: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LocusPoint {
    #[serde(with = "crate::arith::rat_string")]
    pub t: Rat,
    /// Multiplicity as a root of disc_X f(s0, t, X).
    pub disc_multiplicity: usize,
    pub declared: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchLocus {
    #[serde(with = "crate::arith::rat_string")]
    pub s0: Rat,
    pub finite: Vec<LocusPoint>,
    /// Remaining squarefree factor of the discriminant, monic.
    #[serde(serialize_with = "ser_display")]
    pub residual: Poly<Rat>,
    pub infinity: bool,
    pub infinity_places: Vec<LocalPlace>,
    pub infinity_declared: Option<usize>,
}

/// `residual_degree` places over ℚ̄ each with ramification index `e`; the
/// residual polynomial that indexes them is not factored over ℚ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LocalPlace {
    pub e: usize,
    pub residual_degree: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct InertiaProbe {
    pub branch: usize,
    #[serde(with = "crate::arith::rat_string")]
    pub s0: Rat,
    pub places: Vec<LocalPlace>,
    pub cycle_type: CycleType,
}

pub fn expand_places(places: &[LocalPlace]) -> CycleType {
    CycleType::new(places.iter().flat_map(|p| std::iter::repeat_n(p.e, p.residual_degree)).collect())
}

/// Branch locus of f(s0, t, X): rational roots of the discriminant in t,
/// the unfactored remainder, and whether t = ∞ ramifies.
pub fn branch_locus(f: &TriPoly, s0: &Rat) -> Result<BranchLocus, FamilyError> {
    let f0 = f.at_inner(s0);
    let d0 = discriminant(&f0)?;
    if d0.is_poly_zero() {
        return Err(FamilyError::NotSquarefree);
    }
    let roots = rational_roots(&d0);
    let mut residual = squarefree_part_q(&d0);
    let mut finite = Vec::new();
    for (t, m) in roots {
        residual = residual.div_rem(&Poly::linear_root(residual.var(), t.clone())).0;
        finite.push(LocusPoint { t, disc_multiplicity: m, declared: None });
    }
    finite.sort_by(|a, b| a.t.cmp(&b.t));
    let (chart, _) = f.infinity_chart();
    let g0 = chart.at_inner(s0);
    let (infinity, infinity_places) = match tau_adic_places(&g0) {
        Ok(places) => (places.iter().any(|p| p.e > 1), places),
        Err(_) => (eval_inner(&chart.discriminant()?, s0).coeff(0).is_zero(), Vec::new()),
    };
    Ok(BranchLocus { s0: s0.clone(), finite, residual, infinity, infinity_places, infinity_declared: None })
}

// ---------------------------------------------------------------------------
// τ-adic expansion

fn rpow(x: &Rat, k: i64) -> Rat {
    if k >= 0 {
        x.power(k as u32)
    } else {
        x.power((-k) as u32).recip()
    }
}

fn tau_val(c: &Poly<Rat>) -> Val {
    match c.low_order() {
        Some(k) => Val::Fin(k as i64),
        None => Val::Inf,
    }
}

/// Places of ℚ̄((τ))[X]/F over τ = 0, for F monic in X with coefficients in
/// ℚ[τ] and squarefree over ℚ(τ).
///
/// Newton–Puiseux with rational substitutions τ = ξ^v σ^q,
/// X = σ^m (ξ^u + X₁) at each repeated rational edge root ξ; each simple
/// edge root closes a cycle whose length is the product of the edge
/// denominators on its path. Repeated irrational edge roots are reported
/// as undetermined.
pub fn tau_adic_places(f: &BiPoly) -> Result<Vec<LocalPlace>, FamilyError> {
    let n = f.degree().ok_or(FamilyError::NotSquarefree)?;
    let mut acc: BTreeMap<usize, usize> = BTreeMap::new();
    puiseux(f, 1, false, 0, &mut acc)?;
    let total: usize = acc.iter().map(|(e, d)| e * d).sum();
    if total != n {
        return Err(FamilyError::Undetermined(format!("places account for degree {total} of {n}")));
    }
    let mut out: Vec<LocalPlace> = acc.into_iter().map(|(e, residual_degree)| LocalPlace { e, residual_degree }).collect();
    out.sort_by(|a, b| b.cmp(a));
    Ok(out)
}

fn puiseux(f: &BiPoly, q_acc: usize, positive_only: bool, depth: usize, acc: &mut BTreeMap<usize, usize>) -> Result<(), FamilyError> {
    if depth > PUISEUX_DEPTH {
        return Err(FamilyError::Undetermined("expansion too deep".into()));
    }
    let zeros = f.coeffs().iter().take_while(|c| c.is_poly_zero()).count();
    if zeros > 1 {
        return Err(FamilyError::NotSquarefree);
    }
    let f = if zeros == 1 {
        *acc.entry(q_acc).or_default() += 1;
        Poly::new(f.var(), f.coeffs()[1..].to_vec())
    } else {
        f.clone()
    };
    if f.deg() < 1 {
        return Ok(());
    }
    let vals: Vec<Val> = f.coeffs().iter().map(tau_val).collect();
    let polygon = newton_polygon(&vals)?;
    for seg in &polygon.segments {
        let lambda = -seg.slope();
        if positive_only && *lambda.numer() <= 0 {
            continue;
        }
        let (m, q) = (*lambda.numer(), *lambda.denom());
        let steps = seg.length() / q as usize;
        let (i0, v0) = seg.start;
        let phi = Poly::new(
            Var::Free,
            (0..=steps)
                .map(|k| {
                    let i = i0 + k * q as usize;
                    let target = v0 - k as i64 * m;
                    if target < 0 {
                        Rat::zero()
                    } else {
                        f.coeff(i).coeff(target as usize)
                    }
                })
                .collect(),
        );
        let rad = squarefree_part_q(&phi);
        let g = gcd_q(&phi, &phi.derivative());
        let simple = rad.div_rem(&gcd_q(&rad, &g)).0;
        let multiple = rad.div_rem(&simple).0;
        if simple.deg() > 0 {
            *acc.entry(q_acc * q as usize).or_default() += simple.deg() as usize;
        }
        if multiple.deg() > 0 {
            let roots = rational_roots(&multiple);
            if roots.len() != multiple.deg() as usize {
                return Err(FamilyError::Undetermined(format!("repeated irrational edge roots of {phi}")));
            }
            let ext = q.extended_gcd(&m);
            // ext.x·q + ext.y·m = 1, so u = x, v = -y gives u·q - v·m = 1.
            let (u, v) = (ext.x, -ext.y);
            for (xi, _) in roots {
                let r = root_multiplicity(&phi, &xi);
                debug_assert!(r > 1);
                let f1 = substitute(&f, &xi, m, q, u, v);
                puiseux(&f1, q_acc * q as usize, true, depth + 1, acc)?;
            }
        }
    }
    Ok(())
}

/// F(ξ^v σ^q, σ^m (ξ^u + X₁)) / σ^k with k the least σ-order.
fn substitute(f: &BiPoly, xi: &Rat, m: i64, q: i64, u: i64, v: i64) -> BiPoly {
    let inner = Var::T;
    let base: BiPoly = Poly::new(Var::X, vec![Poly::constant(inner, rpow(xi, u)), Poly::constant(inner, Rat::one())]);
    let xv = rpow(xi, v);
    let mut acc: BiPoly = Poly::zero_in(Var::X);
    let mut pw: BiPoly = Poly::constant(Var::X, Poly::constant(inner, Rat::one()));
    for (i, a) in f.coeffs().iter().enumerate() {
        let mut coeffs = vec![Rat::zero(); 1];
        for (j, c) in a.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = q as usize * j + m as usize * i;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, Rat::zero());
            }
            coeffs[e] = c.times(&xv.power(j as u32));
        }
        let b = Poly::new(inner, coeffs);
        if !b.is_poly_zero() {
            acc = acc.plus(&pw.map(|c| c.times(&b)));
        }
        pw = pw.times(&base);
    }
    let k = acc.coeffs().iter().filter_map(|c| c.low_order()).min().unwrap_or(0);
    acc.map(|c| {
        if c.is_poly_zero() {
            c.clone()
        } else {
            Poly::new(inner, c.coeffs()[k..].to_vec())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    pub(crate) fn x2mt() -> Family {
        Family::from_json(
            r#"{"name":"x2mt","poly":"X^2 - t","group_generators":["(1 2)"],
            "branch_points":[{"location":"0","e":2,"inertia_generator":"(1 2)"},
                             {"location":"inf","e":2,"inertia_generator":"(1 2)"}]}"#,
        )
        .unwrap()
    }

    fn bi(src: &str) -> BiPoly {
        parse_expr(src).unwrap().into_poly().unwrap().to_bipoly(Var::X, Var::T).unwrap()
    }

    #[test]
    fn puiseux_simple_edges() {
        let p = tau_adic_places(&bi("X^2 - t")).unwrap();
        assert_eq!(expand_places(&p), CycleType::new(vec![2]));
        let p = tau_adic_places(&bi("X^3 - t")).unwrap();
        assert_eq!(expand_places(&p), CycleType::new(vec![3]));
        let p = tau_adic_places(&bi("X^3 - t^2*X")).unwrap();
        assert_eq!(expand_places(&p), CycleType::new(vec![1, 1, 1]));
    }

    #[test]
    fn puiseux_recursion() {
        // X^2 = t ± t^(3/2): two cycles of length 2.
        let p = tau_adic_places(&bi("(X^2 - t)^2 - t^3")).unwrap();
        assert_eq!(expand_places(&p), CycleType::new(vec![2, 2]));
        // X^2 = t ± t^2: again two cycles of length 2.
        let p = tau_adic_places(&bi("(X^2 - t)^2 - t^4")).unwrap();
        assert_eq!(expand_places(&p), CycleType::new(vec![2, 2]));
        // (X - t)^2 - t^3: X = t ± t^(3/2), one cycle of length 2.
        let p = tau_adic_places(&bi("(X - t)^2 - t^3")).unwrap();
        assert_eq!(expand_places(&p), CycleType::new(vec![2]));
    }

    #[test]
    fn x2mt_locus_and_probe() {
        let fam = x2mt();
        let locus = fam.branch_locus(&rat(0)).unwrap();
        assert_eq!(locus.finite.len(), 1);
        assert_eq!(locus.finite[0].t, rat(0));
        assert_eq!(locus.finite[0].declared, Some(0));
        assert!(locus.infinity);
        let probe = fam.inertia_order_probe(0, &rat(3)).unwrap();
        assert_eq!(probe.cycle_type, CycleType::new(vec![2]));
        assert!(fam.nondegenerate_check(&rat(5)).ok);
    }

    #[test]
    fn rejects_bad_declarations() {
        let bad_root = r#"{"name":"x","poly":"X^2 - t","branch_points":[{"location":"1","e":2,"inertia_generator":"(1 2)"}]}"#;
        assert!(matches!(Family::from_json(bad_root), Err(FamilyError::Manifest(_))));
        let bad_order = r#"{"name":"x","poly":"X^2 - t","branch_points":[{"location":"0","e":3,"inertia_generator":"(1 2)"}]}"#;
        assert!(matches!(Family::from_json(bad_order), Err(FamilyError::Manifest(_))));
        let not_sf = r#"{"name":"x","poly":"X^2 - 2*t*X + t^2","branch_points":[]}"#;
        assert_eq!(Family::from_json(not_sf).unwrap_err(), FamilyError::NotSquarefree);
        let mismatch = r#"{"name":"x","poly":"X^2 - t","branch_points":[{"location":"0","e":1,"inertia_generator":"()"}]}"#;
        let fam = Family::from_json(mismatch).unwrap();
        assert!(matches!(fam.inertia_order_probe(0, &rat(0)), Err(FamilyError::ManifestInconsistent { .. })));
    }

    #[test]
    fn collision_detected() {
        let fam = Family::from_json(
            r#"{"name":"c","poly":"X^2 - (t - s)*(t - 2*s)","group_generators":["(1 2)"],
            "branch_points":[{"location":"s","e":2,"inertia_generator":"(1 2)"},
                             {"location":"2*s","e":2,"inertia_generator":"(1 2)"}]}"#,
        )
        .unwrap();
        let nd = fam.nondegenerate_check(&rat(0));
        assert!(!nd.ok);
        assert!(nd.reasons.iter().any(|r| r.contains("collide")));
        assert!(fam.nondegenerate_check(&rat(3)).ok);
    }
}
