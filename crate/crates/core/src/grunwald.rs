//! Searching for specializations (s0, t0) with prescribed local behaviour at
//! finitely many primes, and verifying them from scratch.
//!
//! A search fixes s0 first, by residue scans on the Frobenius of the residue
//! subextension ρ(s0, X), then t0 by exact-valuation prescriptions for the
//! ramified conditions and residue scans for the unramified ones. Both sides
//! are assembled by CRT into arithmetic progressions. Verification recomputes
//! everything with p-adic and mod-p factorization and never trusts the search.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{self, check_prime, crt, rat_mod, rat_mod_big, ArithError, Congruence, Rat};
use crate::beckmann::{self, bad_residue_bound, intersection_multiplicity, BeckmannError, BranchValue};
use crate::family::{BranchPoint, Family, FamilyError, Location};
use crate::ffact::{degree_sequence, FpPoly};
use crate::padic::{padic_shape, PadicShape};
use crate::par::Exec;
use crate::permgrp::{ef_multiset, generate, power_cycle_type, CycleType, Perm, PermError, PermGroup, DEFAULT_CAP};
use crate::poly::{eval_inner, is_squarefree_q, BiPoly, RatFunc, Var};

/// Upper bound on progression members tried when looking for a witness.
const WITNESS_SCAN: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrunwaldError {
    #[error("malformed condition {0:?}: {1}")]
    Malformed(String, String),
    #[error("invalid condition at p = {p}: {msg}")]
    Invalid { p: u64, msg: String },
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Beckmann(#[from] BeckmannError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("no residue mod {p} satisfies the condition (excluded residues {excluded:?})")]
    NoResidueFound { p: u64, excluded: Vec<u64> },
    #[error("cycle type {target} is not attained mod {p}; scan: {}", scan.join("; "))]
    TargetNotFound { p: u64, target: CycleType, scan: Vec<String> },
    #[error("no admissible member among the first {0} of the progression")]
    NoWitness(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConditionKind {
    /// Unramified with Frobenius of the given cycle type.
    Unramified { target: CycleType },
    /// Inertia ⟨τ_i^d⟩ at branch point i, Frobenius of order `frob` in Gal(ρ_i).
    Ramified { branch: usize, location: String, d: usize, frob: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalCondition {
    pub p: u64,
    #[serde(flatten)]
    pub kind: ConditionKind,
}

impl fmt::Display for LocalCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ConditionKind::Unramified { target } => write!(f, "p={},unram,type={}", self.p, target),
            ConditionKind::Ramified { location, d, frob, .. } => {
                write!(f, "p={},branch={},d={},frob={}", self.p, location, d, frob)
            }
        }
    }
}

fn find_branch(family: &Family, name: &str) -> Option<usize> {
    if name == "inf" || name == "infinity" {
        return family.infinity_branch();
    }
    let m = RatFunc::parse(name).ok()?;
    family.branches().iter().position(|b| b.location == Location::Finite(m.clone()))
}

impl LocalCondition {
    /// Parses `p=7,branch=inf,d=1,frob=2` or `p=13,unram,type=3,3,1`.
    /// Everything after `type=` is the cycle type.
    pub fn parse(src: &str, family: &Family) -> Result<Self, GrunwaldError> {
        let bad = |msg: &str| GrunwaldError::Malformed(src.to_string(), msg.to_string());
        let (head, ty) = match src.find("type=") {
            Some(i) => (&src[..i], Some(src[i + 5..].trim())),
            None => (src, None),
        };
        let (mut p, mut branch, mut d, mut frob, mut unram) = (None, None, None, None, false);
        for part in head.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let num = |v: &str| v.trim().parse::<u64>().map_err(|_| bad("expected a non-negative integer"));
            match part.split_once('=') {
                Some(("p", v)) => p = Some(num(v)?),
                Some(("branch", v)) => branch = Some(v.trim()),
                Some(("d", v)) => d = Some(num(v)? as usize),
                Some(("frob", v)) => frob = Some(num(v)? as usize),
                None if part == "unram" => unram = true,
                None if part == "ram" => {}
                _ => return Err(bad(&format!("unknown field {part:?}"))),
            }
        }
        let p = p.ok_or_else(|| bad("missing p="))?;
        let kind = match (unram, branch) {
            (true, Some(_)) => return Err(bad("a condition cannot be both unram and ramified at a branch point")),
            (true, None) | (false, None) if ty.is_some() => {
                if d.is_some() || frob.is_some() {
                    return Err(bad("d= and frob= only apply to ramified conditions"));
                }
                let target = CycleType::parse(ty.unwrap_or_default())?;
                ConditionKind::Unramified { target }
            }
            (false, Some(name)) => {
                if ty.is_some() {
                    return Err(bad("type= only applies to unramified conditions"));
                }
                let i = find_branch(family, name).ok_or_else(|| bad(&format!("no declared branch point {name:?}")))?;
                let location = family.branches()[i].location.to_string();
                ConditionKind::Ramified { branch: i, location, d: d.unwrap_or(1), frob: frob.unwrap_or(1) }
            }
            _ => return Err(bad("expected branch=... or unram,type=...")),
        };
        Ok(LocalCondition { p, kind })
    }

    pub fn parse_all(srcs: &[impl AsRef<str>], family: &Family) -> Result<Vec<Self>, GrunwaldError> {
        srcs.iter().map(|s| LocalCondition::parse(s.as_ref(), family)).collect()
    }

    pub fn unramified(p: u64, target: CycleType) -> Self {
        LocalCondition { p, kind: ConditionKind::Unramified { target } }
    }

    pub fn ramified(family: &Family, p: u64, branch: usize, d: usize, frob: usize) -> Result<Self, GrunwaldError> {
        let location = family.branch(branch)?.location.to_string();
        Ok(LocalCondition { p, kind: ConditionKind::Ramified { branch, location, d, frob } })
    }
}

/// Order of y·I in D/I.
fn quotient_order(y: &Perm, inertia: &PermGroup) -> usize {
    let mut k = 1;
    let mut z = y.clone();
    while !inertia.contains(&z) {
        z = z.then(y);
        k += 1;
    }
    k
}

/// The (e, f) shapes ef_multiset(⟨τ^d⟩, ⟨τ^d, y⟩) over all y in D whose
/// image in D/I has order `frob`.
pub fn candidate_shapes(b: &BranchPoint, d: usize, frob: usize) -> Result<Vec<Vec<(usize, usize)>>, PermError> {
    let n = b.inertia_generator.degree();
    let inertia = b.inertia_group();
    let td = b.inertia_generator.pow(d as i64);
    let a = generate(std::slice::from_ref(&td), n, DEFAULT_CAP)?;
    let mut shapes = BTreeSet::new();
    for y in b.decomposition.elements() {
        if quotient_order(y, &inertia) == frob {
            let bgrp = generate(&[td.clone(), y.clone()], n, DEFAULT_CAP)?;
            shapes.insert(ef_multiset(&a, &bgrp)?);
        }
    }
    Ok(shapes.into_iter().collect())
}

/// Checks a condition list against the family; returns advisory notes.
pub fn validate(family: &Family, conds: &[LocalCondition]) -> Result<Vec<String>, GrunwaldError> {
    let mut notes = Vec::new();
    let mut seen = BTreeSet::new();
    let m = bad_residue_bound(family);
    for c in conds {
        let p = c.p;
        check_prime(p)?;
        let invalid = |msg: String| GrunwaldError::Invalid { p, msg };
        if p == 2 {
            return Err(invalid("conditions at 2 are not supported".into()));
        }
        if !seen.insert(p) {
            return Err(invalid("more than one condition at this prime".into()));
        }
        if family.group_order().is_multiple_of(p as u128) {
            notes.push(format!("p = {p} divides |G|; accepted because the condition is tame"));
        }
        if (p as usize) <= 2 * m {
            notes.push(format!("p = {p} is at most 2m = {}; a good residue for s0 is not guaranteed", 2 * m));
        }
        match &c.kind {
            ConditionKind::Unramified { target } => {
                if target.degree() != family.degree() {
                    return Err(invalid(format!("cycle type {target} has degree {}, not {}", target.degree(), family.degree())));
                }
                if let Some(g) = family.group() {
                    if !g.cycle_type_counts().contains_key(target) {
                        return Err(invalid(format!("cycle type {target} does not occur in G")));
                    }
                }
            }
            ConditionKind::Ramified { branch, d, frob, .. } => {
                let b = family.branch(*branch)?;
                if *d == 0 || b.e % d != 0 {
                    return Err(invalid(format!("d = {d} does not divide e = {}", b.e)));
                }
                let order = b.e / d;
                if (order as u64).is_multiple_of(p) {
                    return Err(invalid(format!("inertia of order {order} is wild at p = {p}")));
                }
                if *frob == 0 {
                    return Err(invalid("frob must be at least 1".into()));
                }
                if *frob != 1 && b.residue_subextension.is_none() {
                    return Err(invalid("a nontrivial Frobenius needs a declared residue subextension".into()));
                }
                if candidate_shapes(b, *d, *frob)?.is_empty() {
                    return Err(invalid(format!("no element of D has order {frob} modulo inertia")));
                }
                if d.gcd(&order) > 1 {
                    notes.push(format!("p = {p}: gcd(d, e/d) > 1, decomposition data verified through inertia only"));
                }
            }
        }
    }
    Ok(notes)
}

/// Signal that a residue is unusable for a Frobenius read-off.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("skipped: {0}")]
pub struct Skip(pub String);

/// Cycle type of Frobenius on the roots of ρ(s0, X) mod p.
pub fn frobenius_in_residue_field(rho: &BiPoly, s0: &Rat, p: u64) -> Result<CycleType, Skip> {
    let r0 = eval_inner(rho, s0).with_var(Var::X);
    let fp = FpPoly::from_rat(&r0, p).map_err(|_| Skip(format!("ρ(s0, X) is not {p}-integral")))?;
    if fp.deg() != r0.deg() {
        return Err(Skip("leading coefficient vanishes mod p".into()));
    }
    degree_sequence(&fp).map(CycleType::new).map_err(|_| Skip(format!("ρ(s0, X) is not squarefree mod {p}")))
}

fn residue_rat(r: u64) -> Rat {
    Rat::from_integer(BigInt::from(r))
}

/// Degree sequence of f(s0, t0, X) mod p when squarefree.
fn degrees_mod_p(family: &Family, s0: &Rat, t0: &Rat, p: u64) -> Result<CycleType, String> {
    let g = family.poly().at(s0, t0).with_var(Var::X);
    let fp = FpPoly::from_rat(&g, p).map_err(|_| format!("not {p}-integral"))?;
    degree_sequence(&fp).map(CycleType::new).map_err(|_| format!("not squarefree mod {p}"))
}

/// First t-residue mod p giving the target Frobenius, with a scan log.
fn unramified_residue(family: &Family, s0: &Rat, target: &CycleType, p: u64) -> (Option<u64>, Vec<String>) {
    let mut log = Vec::new();
    for r in 0..p {
        match degrees_mod_p(family, s0, &residue_rat(r), p) {
            Ok(ct) if &ct == target => return (Some(r), log),
            Ok(ct) => log.push(format!("{r}: {ct}")),
            Err(e) => log.push(format!("{r}: {e}")),
        }
    }
    (None, log)
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueChoice {
    pub p: u64,
    pub residue: u64,
    pub excluded: Vec<u64>,
    pub frobenius: Option<CycleType>,
}

#[derive(Clone, Debug, Serialize)]
pub struct S0Search {
    pub progression: Congruence,
    #[serde(with = "crate::arith::rat_string")]
    pub witness: Rat,
    pub choices: Vec<ResidueChoice>,
}

/// Least non-negative member of `prog` accepted by `ok`.
fn least_member(prog: &Congruence, ok: impl Fn(&BigInt) -> bool) -> Result<BigInt, GrunwaldError> {
    (0..WITNESS_SCAN).map(|k| prog.member(k)).find(|x| ok(x)).ok_or(GrunwaldError::NoWitness(WITNESS_SCAN))
}

/// Residue classes for s0, one per conditioned prime, joined by CRT.
pub fn search_s0(family: &Family, conds: &[LocalCondition]) -> Result<S0Search, GrunwaldError> {
    validate(family, conds)?;
    let mut choices = Vec::new();
    for c in conds {
        let p = c.p;
        let excluded = beckmann::bad_s_residues_unchecked(family, p);
        let mut found = None;
        for r in (0..p).filter(|r| !excluded.contains(r)) {
            let s = residue_rat(r);
            match &c.kind {
                ConditionKind::Ramified { branch, frob, .. } => match &family.branches()[*branch].residue_subextension {
                    Some(rho) => {
                        if let Ok(ct) = frobenius_in_residue_field(rho, &s, p) {
                            if ct.order() == *frob {
                                found = Some((r, Some(ct)));
                            }
                        }
                    }
                    None => found = Some((r, None)),
                },
                ConditionKind::Unramified { target } => {
                    if unramified_residue(family, &s, target, p).0.is_some() {
                        found = Some((r, None));
                    }
                }
            }
            if found.is_some() {
                break;
            }
        }
        let (residue, frobenius) =
            found.ok_or_else(|| GrunwaldError::NoResidueFound { p, excluded: excluded.iter().copied().collect() })?;
        choices.push(ResidueChoice { p, residue, excluded: excluded.into_iter().collect(), frobenius });
    }
    let parts = choices.iter().map(|c| Congruence::new(c.residue, c.p)).collect::<Result<Vec<_>, _>>()?;
    let progression = crt(&parts)?;
    let w = least_member(&progression, |x| family.nondegenerate_check(&Rat::from_integer(x.clone())).ok)?;
    Ok(S0Search { progression, witness: Rat::from_integer(w), choices })
}

/// t0 values N/D with N in a residue class and D fixed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct T0Progression {
    pub numerator: Congruence,
    #[serde(with = "crate::arith::bigint_string")]
    pub denominator: BigInt,
}

impl T0Progression {
    pub fn member(&self, k: u64) -> Rat {
        Rat::new(self.numerator.member(k), self.denominator.clone())
    }
}

impl fmt::Display for T0Progression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator == BigInt::from(1) {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "N/{} with N = {}", self.denominator, self.numerator)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct T0Search {
    pub progression: T0Progression,
    #[serde(with = "crate::arith::rat_string")]
    pub witness: Rat,
    pub scans: BTreeMap<u64, Vec<String>>,
}

/// Whether t0 avoids the branch locus of f(s0, t, X).
fn is_regular_value(family: &Family, s0: &Rat, t0: &Rat) -> bool {
    is_squarefree_q(&family.poly().at(s0, t0))
}

/// Prescriptions for t0 = N/D at fixed s0: D is the product of p^d over the
/// conditions at ∞, so v_p(t0) = -d there; a finite branch point m needs
/// v_p(t0 - m) = d exactly; unramified primes fix N mod p.
pub fn search_t0(family: &Family, s0: &Rat, conds: &[LocalCondition]) -> Result<T0Search, GrunwaldError> {
    validate(family, conds)?;
    let mut den = BigInt::from(1);
    for c in conds {
        if let ConditionKind::Ramified { branch, d, .. } = &c.kind {
            if family.branches()[*branch].location.is_infinity() {
                den *= BigInt::from(c.p).pow(*d as u32);
            }
        }
    }
    let den_q = Rat::from_integer(den.clone());
    let mut parts = Vec::new();
    let mut scans = BTreeMap::new();
    for c in conds {
        let p = c.p;
        match &c.kind {
            ConditionKind::Ramified { branch, d, .. } => match &family.branches()[*branch].location {
                Location::Infinity => parts.push(Congruence::new(1, p)?),
                Location::Finite(m) => {
                    let a = m.eval(s0).ok_or_else(|| FamilyError::Pole(*branch, s0.clone()))?;
                    let pd = BigInt::from(p).pow(*d as u32);
                    let modulus = &pd * BigInt::from(p);
                    let target = &den_q * a + Rat::from_integer(pd);
                    let r = rat_mod_big(&target, &modulus).ok_or_else(|| GrunwaldError::Invalid {
                        p,
                        msg: format!("branch point {} is not {p}-integral at s0 = {s0}", c),
                    })?;
                    parts.push(Congruence::new(r, modulus)?);
                }
            },
            ConditionKind::Unramified { target } => {
                let (r, log) = unramified_residue(family, s0, target, p);
                let r = r.ok_or_else(|| GrunwaldError::TargetNotFound { p, target: target.clone(), scan: log.clone() })?;
                scans.insert(p, log);
                let dmod = arith::mod_big(&den, p);
                parts.push(Congruence::new(BigInt::from(dmod) * BigInt::from(r), p)?);
            }
        }
    }
    let numerator = crt(&parts)?;
    let progression = T0Progression { numerator, denominator: den };
    let n = least_member(&progression.numerator, |x| {
        let t = Rat::new(x.clone(), progression.denominator.clone());
        is_regular_value(family, s0, &t)
    })?;
    let witness = Rat::new(n, progression.denominator.clone());
    Ok(T0Search { progression, witness, scans })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Predicted {
    Ramified { multiplicity: usize, class: CycleType, frobenius_order: usize, candidate_shapes: Vec<Vec<(usize, usize)>> },
    Unramified { target: CycleType },
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionRecord {
    pub p: u64,
    pub condition: String,
    pub predicted: Predicted,
    pub multiplicity: Option<i64>,
    pub frobenius: Option<CycleType>,
    pub shape: Option<PadicShape>,
    pub degrees: Option<CycleType>,
    pub inertia_only: bool,
    pub pass: bool,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupIdentification {
    pub samples: usize,
    pub counts: BTreeMap<CycleType, usize>,
    /// Observed types that do not occur in G.
    pub outside_support: Vec<CycleType>,
    /// Non-identity types of G never observed.
    pub unobserved: Vec<CycleType>,
    /// False when the manifest declares no group and only degrees are checked.
    pub frequency_test: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MemberCheck {
    #[serde(with = "crate::arith::rat_string")]
    pub s0: Rat,
    #[serde(with = "crate::arith::rat_string")]
    pub t0: Rat,
    pub pass: bool,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecializationReport {
    pub name: String,
    #[serde(with = "crate::arith::rat_string")]
    pub s0: Rat,
    #[serde(with = "crate::arith::rat_string")]
    pub t0: Rat,
    pub s0_progression: Option<Congruence>,
    pub t0_progression: Option<T0Progression>,
    pub conditions: Vec<String>,
    pub notes: Vec<String>,
    pub records: Vec<ConditionRecord>,
    pub group_id: GroupIdentification,
    pub further_members: Vec<MemberCheck>,
    pub pass: bool,
}

impl SpecializationReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> =
            self.records.iter().flat_map(|r| r.failures.iter().map(move |f| format!("p = {}: {f}", r.p))).collect();
        if !self.group_id.pass {
            out.push(format!(
                "group identification failed (outside support {:?}, unobserved {:?})",
                self.group_id.outside_support.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                self.group_id.unobserved.iter().map(|c| c.to_string()).collect::<Vec<_>>()
            ));
        }
        for m in self.further_members.iter().filter(|m| !m.pass) {
            out.push(format!("member (s0, t0) = ({}, {}) failed: {}", m.s0, m.t0, m.failures.join("; ")));
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Auxiliary primes for group identification; 0 disables it.
    pub id_samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { id_samples: 300 }
    }
}

fn verify_ramified(family: &Family, s0: &Rat, t0: &Rat, p: u64, branch: usize, d: usize, frob: usize) -> ConditionRecord {
    let b = &family.branches()[branch];
    let class = power_cycle_type(&b.inertia_generator, d as i64);
    let order = b.e / d;
    let inertia_only = d.gcd(&order) > 1;
    let candidates = candidate_shapes(b, d, frob).unwrap_or_default();
    let mut failures = Vec::new();

    let value = match &b.location {
        Location::Infinity => Some(BranchValue::Infinity),
        Location::Finite(m) => m.eval(s0).map(BranchValue::Rational),
    };
    let multiplicity = match value {
        None => {
            failures.push("branch point has a pole at s0".into());
            None
        }
        Some(v) => match intersection_multiplicity(t0, &v, p) {
            Ok(k) => Some(k),
            Err(e) => {
                failures.push(e.to_string());
                None
            }
        },
    };
    if let Some(k) = multiplicity {
        if k != d as i64 {
            failures.push(format!("intersection multiplicity {k}, expected {d}"));
        }
    }

    let frobenius = match &b.residue_subextension {
        Some(rho) => match frobenius_in_residue_field(rho, s0, p) {
            Ok(ct) => {
                if ct.order() != frob {
                    failures.push(format!("residue Frobenius {ct} has order {}, expected {frob}", ct.order()));
                }
                Some(ct)
            }
            Err(e) => {
                failures.push(format!("residue Frobenius: {e}"));
                None
            }
        },
        None => {
            if frob != 1 {
                failures.push("no residue subextension declared".into());
            }
            None
        }
    };

    let model = beckmann::integral_model(family, s0, t0, p);
    let shape = match padic_shape(&model, p) {
        Ok(sh) => {
            if CycleType::new(sh.expanded()) != class {
                failures.push(format!("shape {sh} does not expand to the inertia class {class}"));
            }
            if !inertia_only && !candidates.contains(&sh.factors) {
                failures.push(format!("shape {sh} matches no decomposition model"));
            }
            Some(sh)
        }
        Err(e) => {
            failures.push(format!("p-adic factorization: {e}"));
            None
        }
    };
    ConditionRecord {
        p,
        condition: String::new(),
        predicted: Predicted::Ramified { multiplicity: d, class, frobenius_order: frob, candidate_shapes: candidates },
        multiplicity,
        frobenius,
        shape,
        degrees: None,
        inertia_only,
        pass: failures.is_empty(),
        failures,
    }
}

fn verify_unramified(family: &Family, s0: &Rat, t0: &Rat, p: u64, target: &CycleType) -> ConditionRecord {
    let mut failures = Vec::new();
    let degrees = match degrees_mod_p(family, s0, t0, p) {
        Ok(ct) => {
            if &ct != target {
                failures.push(format!("Frobenius cycle type {ct}, expected {target}"));
            }
            Some(ct)
        }
        Err(e) => {
            failures.push(format!("f(s0, t0, X) is {e}"));
            None
        }
    };
    ConditionRecord {
        p,
        condition: String::new(),
        predicted: Predicted::Unramified { target: target.clone() },
        multiplicity: None,
        frobenius: None,
        shape: None,
        degrees,
        inertia_only: false,
        pass: failures.is_empty(),
        failures,
    }
}

/// Frobenius cycle types of f(s0, t0, X) at the first `samples` odd primes
/// (outside `skip`) where it reduces to a squarefree polynomial.
pub fn sample_frobenius(family: &Family, s0: &Rat, t0: &Rat, samples: usize, skip: &[u64]) -> Vec<CycleType> {
    let g = family.poly().at(s0, t0).with_var(Var::X);
    let mut out = Vec::with_capacity(samples);
    let mut q = 2;
    while out.len() < samples {
        q = arith::next_prime(q);
        if skip.contains(&q) {
            continue;
        }
        if let Ok(fp) = FpPoly::from_rat(&g, q) {
            if let Ok(ds) = degree_sequence(&fp) {
                out.push(CycleType::new(ds));
            }
        }
    }
    out
}

/// Compares sampled cycle types with the cycle types of G. Every observed
/// type must occur in G and every non-identity type of G must be observed.
pub fn identify_group(group: Option<&PermGroup>, degree: usize, observed: &[CycleType]) -> GroupIdentification {
    let mut counts = BTreeMap::new();
    for c in observed {
        *counts.entry(c.clone()).or_insert(0) += 1;
    }
    let (outside_support, unobserved, frequency_test) = match group {
        Some(g) => {
            let types = g.cycle_type_counts();
            let outside: Vec<CycleType> = counts.keys().filter(|c| !types.contains_key(c)).cloned().collect();
            let missing: Vec<CycleType> = types.keys().filter(|c| !c.is_identity() && !counts.contains_key(c)).cloned().collect();
            (outside, missing, true)
        }
        None => (counts.keys().filter(|c| c.degree() != degree).cloned().collect(), Vec::new(), false),
    };
    let pass = outside_support.is_empty() && unobserved.is_empty();
    GroupIdentification { samples: observed.len(), counts, outside_support, unobserved, frequency_test, pass }
}

/// Recomputes the local behaviour of the specialization at (s0, t0) at every
/// conditioned prime. Mismatches produce a failed report, not an error.
pub fn verify(
    family: &Family,
    s0: &Rat,
    t0: &Rat,
    conds: &[LocalCondition],
    opts: VerifyOptions,
) -> Result<SpecializationReport, GrunwaldError> {
    let mut notes = validate(family, conds)?;
    let nd = family.nondegenerate_check(s0);
    if !nd.ok {
        notes.push(format!("s0 = {s0} is degenerate: {}", nd.reasons.join("; ")));
    }
    let regular = is_regular_value(family, s0, t0);
    if !regular {
        notes.push(format!("t0 = {t0} is a branch point of f(s0, t, X)"));
    }
    let mut records = Vec::new();
    for c in conds {
        let mut rec = if !regular {
            ConditionRecord {
                p: c.p,
                condition: String::new(),
                predicted: match &c.kind {
                    ConditionKind::Unramified { target } => Predicted::Unramified { target: target.clone() },
                    ConditionKind::Ramified { branch, d, frob, .. } => Predicted::Ramified {
                        multiplicity: *d,
                        class: power_cycle_type(&family.branches()[*branch].inertia_generator, *d as i64),
                        frobenius_order: *frob,
                        candidate_shapes: Vec::new(),
                    },
                },
                multiplicity: None,
                frobenius: None,
                shape: None,
                degrees: None,
                inertia_only: false,
                pass: false,
                failures: vec!["t0 is a branch point".into()],
            }
        } else {
            match &c.kind {
                ConditionKind::Ramified { branch, d, frob, .. } => verify_ramified(family, s0, t0, c.p, *branch, *d, *frob),
                ConditionKind::Unramified { target } => verify_unramified(family, s0, t0, c.p, target),
            }
        };
        rec.condition = c.to_string();
        records.push(rec);
    }
    let group_id = if opts.id_samples > 0 && regular {
        let skip: Vec<u64> = conds.iter().map(|c| c.p).collect();
        identify_group(family.group(), family.degree(), &sample_frobenius(family, s0, t0, opts.id_samples, &skip))
    } else {
        identify_group(None, family.degree(), &[])
    };
    let pass = nd.ok && regular && records.iter().all(|r| r.pass) && group_id.pass;
    Ok(SpecializationReport {
        name: family.name().to_string(),
        s0: s0.clone(),
        t0: t0.clone(),
        s0_progression: None,
        t0_progression: None,
        conditions: conds.iter().map(|c| c.to_string()).collect(),
        notes,
        records,
        group_id,
        further_members: Vec::new(),
        pass,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub seed: u64,
    /// Random further progression members verified after the witness.
    pub further_members: usize,
    pub id_samples: usize,
    pub exec: Exec,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { seed: 0, further_members: 5, id_samples: 300, exec: Exec::Auto }
    }
}

/// Draws random members: s0 from its progression, then t0 from the
/// progression recomputed at that s0.
pub fn sample_members(
    family: &Family,
    s0_prog: &Congruence,
    conds: &[LocalCondition],
    count: usize,
    seed: u64,
) -> Result<Vec<(Rat, Rat)>, GrunwaldError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count {
        tries += 1;
        if tries > 100 * count.max(1) {
            return Err(GrunwaldError::NoWitness(tries as u64));
        }
        let s0 = Rat::from_integer(s0_prog.member(rng.gen_range(0..1000)));
        if !family.nondegenerate_check(&s0).ok {
            continue;
        }
        let ts = search_t0(family, &s0, conds)?;
        let t0 = ts.progression.member(rng.gen_range(0..1000));
        if is_regular_value(family, &s0, &t0) {
            out.push((s0, t0));
        }
    }
    Ok(out)
}

/// Searches for (s0, t0) meeting all conditions, verifies the witness and a
/// sample of further progression members.
pub fn search(family: &Family, conds: &[LocalCondition], opts: SearchOptions) -> Result<SpecializationReport, GrunwaldError> {
    let ss = search_s0(family, conds)?;
    let ts = search_t0(family, &ss.witness, conds)?;
    let mut report = thin_set_retry(family, &ss.witness, &ts, conds, opts.id_samples)?;
    let members = sample_members(family, &ss.progression, conds, opts.further_members, opts.seed)?;
    report.further_members = opts.exec.map(&members, |(s0, t0)| match verify(family, s0, t0, conds, VerifyOptions { id_samples: 0 }) {
        Ok(r) => MemberCheck { s0: s0.clone(), t0: t0.clone(), pass: r.pass, failures: r.failures() },
        Err(e) => MemberCheck { s0: s0.clone(), t0: t0.clone(), pass: false, failures: vec![e.to_string()] },
    });
    report.s0_progression = Some(ss.progression);
    report.t0_progression = Some(ts.progression);
    report.pass = report.pass && report.further_members.iter().all(|m| m.pass);
    Ok(report)
}

/// Candidates tried along the t0 progression before giving up on a witness
/// whose specialization keeps the full group.
const THIN_SET_RETRIES: u64 = 32;

/// Verifies the least t0 of the progression. If group identification fails
/// while every local condition holds, t0 lies in the thin set where the
/// group drops (e.g. t0 a square for X^2 - t), so later members are tried.
fn thin_set_retry(
    family: &Family,
    s0: &Rat,
    ts: &T0Search,
    conds: &[LocalCondition],
    id_samples: usize,
) -> Result<SpecializationReport, GrunwaldError> {
    let opts = VerifyOptions { id_samples };
    let first = verify(family, s0, &ts.witness, conds, opts)?;
    if first.group_id.pass || !first.records.iter().all(|r| r.pass) {
        return Ok(first);
    }
    let step = Rat::new(ts.progression.numerator.modulus.clone(), ts.progression.denominator.clone());
    let mut skipped = vec![ts.witness.to_string()];
    let mut t0 = ts.witness.clone();
    for _ in 0..THIN_SET_RETRIES {
        t0 = &t0 + &step;
        if !is_regular_value(family, s0, &t0) {
            continue;
        }
        let mut r = verify(family, s0, &t0, conds, opts)?;
        if r.group_id.pass {
            r.notes.push(format!("group identification failed at t0 = {}; advanced along the progression", skipped.join(", ")));
            return Ok(r);
        }
        skipped.push(t0.to_string());
    }
    Ok(first)
}

/// s0-residue helper shared with the census: is s0 in a bad class mod p?
pub fn s0_is_obstructed(family: &Family, s0: &Rat, p: u64) -> bool {
    match rat_mod(s0, p) {
        Some(r) => beckmann::bad_s_residues_unchecked(family, p).contains(&r),
        None => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{legendre, rat};

    fn x2mt() -> Family {
        Family::from_json(
            r#"{"name":"x2mt","poly":"X^2 - t","group_generators":["(1 2)"],
            "branch_points":[{"location":"0","e":2,"inertia_generator":"(1 2)"},
                             {"location":"inf","e":2,"inertia_generator":"(1 2)"}]}"#,
        )
        .unwrap()
    }

    fn rho() -> BiPoly {
        let f = crate::poly::TriPoly::parse("X^2 - (s^2 - 4*s)").unwrap();
        f.at_mid(&rat(0))
    }

    #[test]
    fn frobenius_examples() {
        let r = rho();
        assert_eq!(frobenius_in_residue_field(&r, &rat(2), 7).unwrap(), CycleType::new(vec![2]));
        assert_eq!(frobenius_in_residue_field(&r, &rat(1), 7).unwrap(), CycleType::new(vec![1, 1]));
        for p in [3, 5, 7, 11] {
            assert!(frobenius_in_residue_field(&r, &rat(0), p).is_err());
        }
    }

    #[test]
    fn parse_conditions() {
        let fam = x2mt();
        let c = LocalCondition::parse("p=13,unram,type=1,1", &fam).unwrap();
        assert_eq!(c.kind, ConditionKind::Unramified { target: CycleType::new(vec![1, 1]) });
        let c = LocalCondition::parse("p=3,branch=0,d=1", &fam).unwrap();
        assert!(matches!(c.kind, ConditionKind::Ramified { branch: 0, d: 1, frob: 1, .. }));
        assert_eq!(c.to_string(), "p=3,branch=0,d=1,frob=1");
        let c = LocalCondition::parse("p=5,branch=inf", &fam).unwrap();
        assert!(matches!(c.kind, ConditionKind::Ramified { branch: 1, .. }));
        assert!(LocalCondition::parse("p=3,branch=7", &fam).is_err());
        assert!(LocalCondition::parse("branch=0", &fam).is_err());
        assert!(LocalCondition::parse("p=3,unram,branch=0", &fam).is_err());
        let bad = [
            "p=2,unram,type=2",
            "p=3,unram,type=3",
            "p=3,branch=0,d=3",
            "p=3,branch=0,frob=2",
        ];
        for src in bad {
            let c = LocalCondition::parse(src, &fam).unwrap();
            assert!(validate(&fam, &[c]).is_err(), "{src}");
        }
        let dup = LocalCondition::parse_all(&["p=3,branch=0", "p=3,unram,type=2"], &fam).unwrap();
        assert!(validate(&fam, &dup).is_err());
    }

    #[test]
    fn quadratic_search_end_to_end() {
        let fam = x2mt();
        let conds = LocalCondition::parse_all(&["p=3,branch=0,d=1", "p=7,unram,type=1,1", "p=11,unram,type=2"], &fam).unwrap();
        let report = search(&fam, &conds, SearchOptions { further_members: 5, ..Default::default() }).unwrap();
        assert!(report.pass, "{:?}", report.failures());
        let t0 = report.t0.to_integer();
        let t = i64::try_from(t0).unwrap();
        assert_eq!(t % 3, 0);
        assert_ne!(t % 9, 0);
        assert_eq!(legendre(t, 7), 1);
        assert_eq!(legendre(t, 11), -1);
        assert_eq!(report.t0_progression.unwrap().numerator.modulus, BigInt::from(693));
        let shapes: Vec<_> = report.records.iter().map(|r| (r.shape.clone().map(|s| s.factors), r.degrees.clone())).collect();
        assert_eq!(shapes[0].0, Some(vec![(2, 1)]));
        assert_eq!(shapes[1].1, Some(CycleType::new(vec![1, 1])));
        assert_eq!(shapes[2].1, Some(CycleType::new(vec![2])));
    }

    #[test]
    fn empty_conditions() {
        let fam = x2mt();
        let ss = search_s0(&fam, &[]).unwrap();
        assert_eq!(ss.progression, Congruence::everything());
        let ts = search_t0(&fam, &ss.witness, &[]).unwrap();
        assert_eq!(ts.witness, rat(1));
    }

    #[test]
    fn verify_reports_mismatch() {
        let fam = x2mt();
        let conds = LocalCondition::parse_all(&["p=3,branch=0,d=1"], &fam).unwrap();
        let r = verify(&fam, &rat(0), &rat(9), &conds, VerifyOptions::default()).unwrap();
        assert!(!r.pass);
        assert_eq!(r.records[0].multiplicity, Some(2));
        assert!(r.records[0].failures[0].contains("multiplicity 2"));
        let r = verify(&fam, &rat(0), &rat(0), &conds, VerifyOptions::default()).unwrap();
        assert!(!r.pass && r.notes.iter().any(|n| n.contains("branch point")));
    }
}
