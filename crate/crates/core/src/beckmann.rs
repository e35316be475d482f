//! Predicting ramification of specializations: intersection multiplicities
//! with branch points, the primes and s-residues where the prediction is not
//! guaranteed, and the predicted inertia class τ^I.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{check_prime, prime_divisors, valuation_unchecked, ArithError, Rat, Val};
use crate::family::{Family, FamilyError, Location};
use crate::ffact::{roots, FpPoly};
use crate::permgrp::{power_cycle_type, CycleType};
use crate::poly::{discriminant, primitive_int, rational_roots, squarefree_part_q, Poly, Ring, Var};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeckmannError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("t0 = {0} is a branch point")]
    AtBranchPoint(Rat),
    #[error("{0} is in the global exceptional set of the family")]
    GlobalExceptional(u64),
    #[error("p = {0} is a bad prime at this s0")]
    BadPrime(u64),
    #[error("s0 is in a bad residue class mod {0}")]
    BadResidue(u64),
    #[error("t0 meets {count} branch points at p = {p}")]
    Contradiction { p: u64, count: usize },
    #[error("t0 meets the branch point {which} at p = {p}, which has no declared inertia data")]
    UndeclaredBranch { p: u64, which: String },
    #[error("t0 meets branch point {found} at p = {p}, not branch point {expected}")]
    OtherBranch { p: u64, expected: usize, found: usize },
}

/// A branch point as seen from a specialization.
#[derive(Clone, Debug, PartialEq)]
pub enum BranchValue {
    Rational(Rat),
    /// Integral minimal (or defining) polynomial of algebraic branch points.
    MinPoly(Poly<Rat>),
    Infinity,
}

/// I_p(t0, b): v_p(t0 - b), v_p(g(t0)), or -v_p(t0) at ∞. Negative values
/// mean t0 does not meet b.
pub fn intersection_multiplicity(t0: &Rat, branch: &BranchValue, p: u64) -> Result<i64, BeckmannError> {
    check_prime(p)?;
    let v = match branch {
        BranchValue::Rational(a) => {
            if t0 == a {
                return Err(BeckmannError::AtBranchPoint(t0.clone()));
            }
            valuation_unchecked(&(t0 - a), p)
        }
        BranchValue::MinPoly(g) => {
            let y = g.eval(t0);
            if y.is_zero() {
                return Err(BeckmannError::AtBranchPoint(t0.clone()));
            }
            valuation_unchecked(&y, p)
        }
        BranchValue::Infinity => match valuation_unchecked(t0, p) {
            Val::Inf => return Ok(0),
            Val::Fin(k) => return Ok(-k),
        },
    };
    Ok(v.finite().expect("nonzero"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BadReason {
    DividesGroupOrder,
    VerticalRamification,
    BranchCollision,
    NonIntegralBranchPoint,
    DiscriminantInseparable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub reason: BadReason,
    pub label: String,
    #[serde(serialize_with = "ser_bigint")]
    pub value: BigInt,
}

fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BadPrimeReport {
    pub p: u64,
    pub reasons: BTreeSet<BadReason>,
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BadPrimes {
    #[serde(with = "crate::arith::rat_string")]
    pub s0: Rat,
    pub primes: Vec<BadPrimeReport>,
    /// Witnesses with a cofactor that could not be factored; every prime
    /// dividing one of these is treated as bad by [`BadPrimes::is_bad`].
    pub unfactored: Vec<Witness>,
}

impl BadPrimes {
    pub fn is_bad(&self, p: u64) -> bool {
        self.primes.binary_search_by_key(&p, |r| r.p).is_ok()
            || self.unfactored.iter().any(|w| (&w.value % BigInt::from(p)).is_zero())
    }

    pub fn list(&self) -> Vec<u64> {
        self.primes.iter().map(|r| r.p).collect()
    }
}

#[derive(Default)]
struct Collector {
    by_prime: BTreeMap<u64, BadPrimeReport>,
    unfactored: Vec<Witness>,
}

impl Collector {
    fn add(&mut self, reason: BadReason, label: impl Into<String>, value: BigInt) {
        if value.is_zero() {
            return;
        }
        let label = label.into();
        let (small, rest) = prime_divisors(&value);
        let w = Witness { reason, label, value };
        for p in small {
            let r = self.by_prime.entry(p).or_insert_with(|| BadPrimeReport { p, reasons: BTreeSet::new(), witnesses: Vec::new() });
            r.reasons.insert(reason);
            r.witnesses.push(w.clone());
        }
        if !rest.is_empty() {
            self.unfactored.push(w);
        }
    }
}

fn int(x: &Rat) -> BigInt {
    debug_assert!(x.is_integer());
    x.to_integer()
}

/// Data of one specialization s ↦ s0 used for predictions: the branch
/// points of f(s0, t, X) and its bad primes.
#[derive(Debug)]
pub struct Specialization<'a> {
    family: &'a Family,
    s0: Rat,
    /// Declared branch points at s0, by index.
    declared: Vec<BranchValue>,
    /// Rational roots of the discriminant not matching a declared point.
    undeclared: Vec<Rat>,
    /// Squarefree remainder of the discriminant, primitive integral; degree 0 if none.
    residual: Poly<Rat>,
    bad: BadPrimes,
}

impl<'a> Specialization<'a> {
    pub fn new(family: &'a Family, s0: &Rat) -> Result<Self, BeckmannError> {
        let nd = family.nondegenerate_check(s0);
        if !nd.ok {
            return Err(FamilyError::Degenerate { s0: s0.clone(), reasons: nd.reasons }.into());
        }
        let f0 = family.at(s0);
        let mut col = Collector::default();

        let order = BigInt::from(family.group_order());
        col.add(BadReason::DividesGroupOrder, "group order", order);

        let mut den = BigInt::from(1);
        for c in f0.coeffs().iter().flat_map(|a| a.coeffs()) {
            den = den.lcm(c.denom());
        }
        col.add(BadReason::VerticalRamification, "denominator of f(s0, t, X)", den.clone());

        // Δ for the integral model den·... : work with the primitive part and
        // record the content separately.
        let delta = discriminant(&f0).map_err(FamilyError::from)?;
        let (content, dprim) = primitive_int(&delta);
        col.add(BadReason::VerticalRamification, "content of disc_X f(s0, t, X)", content.numer().abs());
        col.add(BadReason::DiscriminantInseparable, "t-leading coefficient of disc_X f(s0, t, X)", int(&dprim.lc()));

        let mut rational: Vec<Rat> = rational_roots(&dprim).into_iter().map(|(r, _)| r).collect();
        rational.sort();
        let mut residual = primitive_int(&squarefree_part_q(&dprim)).1;
        for r in &rational {
            residual = residual.div_rem(&Poly::linear_root(residual.var(), r.clone())).0;
        }
        let residual = primitive_int(&residual).1.with_var(Var::T);

        for (i, a) in rational.iter().enumerate() {
            col.add(BadReason::NonIntegralBranchPoint, format!("denominator of branch point t = {a}"), a.denom().clone());
            for b in &rational[i + 1..] {
                let w = a.numer() * b.denom() - b.numer() * a.denom();
                col.add(BadReason::BranchCollision, format!("branch points t = {a} and t = {b}"), w);
            }
            if residual.deg() > 0 {
                let d = residual.deg() as u32;
                let w = residual.eval(a) * Rat::from_integer(a.denom().clone()).power(d);
                col.add(BadReason::BranchCollision, format!("branch point t = {a} against the residual locus"), int(&w));
            }
        }
        if residual.deg() > 0 {
            col.add(BadReason::NonIntegralBranchPoint, "leading coefficient of the residual locus", int(&residual.lc()));
            if residual.deg() > 1 {
                let d = discriminant(&residual).map_err(FamilyError::from)?;
                col.add(BadReason::BranchCollision, "discriminant of the residual locus", int(&d));
            }
        }

        let declared: Vec<BranchValue> = family
            .branches()
            .iter()
            .map(|b| match &b.location {
                Location::Infinity => BranchValue::Infinity,
                Location::Finite(m) => BranchValue::Rational(m.eval(s0).expect("non-degenerate s0 has no poles")),
            })
            .collect();
        let undeclared = rational
            .into_iter()
            .filter(|r| !declared.iter().any(|d| d == &BranchValue::Rational(r.clone())))
            .collect();
        let bad = BadPrimes { s0: s0.clone(), primes: col.by_prime.into_values().collect(), unfactored: col.unfactored };
        Ok(Specialization { family, s0: s0.clone(), declared, undeclared, residual, bad })
    }

    pub fn family(&self) -> &Family {
        self.family
    }

    pub fn s0(&self) -> &Rat {
        &self.s0
    }

    pub fn bad_primes(&self) -> &BadPrimes {
        &self.bad
    }

    /// Value of declared branch point `i` at s0.
    pub fn branch_value(&self, i: usize) -> Option<&BranchValue> {
        self.declared.get(i)
    }

    /// Whether t0 is a root of disc_X f(s0, t, X).
    pub fn is_branch_point(&self, t0: &Rat) -> bool {
        self.declared.iter().any(|d| d == &BranchValue::Rational(t0.clone()))
            || self.undeclared.contains(t0)
            || (self.residual.deg() > 0 && self.residual.eval(t0).is_zero())
    }

    /// I_p(t0, ·) against every branch point; only positive entries are kept.
    fn meetings(&self, t0: &Rat, p: u64) -> Result<Vec<(Option<usize>, String, i64)>, BeckmannError> {
        if self.is_branch_point(t0) {
            return Err(BeckmannError::AtBranchPoint(t0.clone()));
        }
        let mut out = Vec::new();
        for (i, b) in self.declared.iter().enumerate() {
            let m = intersection_multiplicity(t0, b, p)?;
            if m > 0 {
                out.push((Some(i), self.family.branches()[i].location.to_string(), m));
            }
        }
        for a in &self.undeclared {
            let m = intersection_multiplicity(t0, &BranchValue::Rational(a.clone()), p)?;
            if m > 0 {
                out.push((None, format!("t = {a}"), m));
            }
        }
        if self.residual.deg() > 0 && !matches!(valuation_unchecked(t0, p), Val::Fin(k) if k < 0) {
            let m = intersection_multiplicity(t0, &BranchValue::MinPoly(self.residual.clone()), p)?;
            if m > 0 {
                out.push((None, format!("root of {}", self.residual), m));
            }
        }
        Ok(out)
    }

    /// Errors when p is a bad prime at s0 or s0 lies in a bad residue class mod p.
    pub fn check_good(&self, p: u64) -> Result<(), BeckmannError> {
        if self.bad.is_bad(p) {
            return Err(BeckmannError::BadPrime(p));
        }
        if bad_s_residues_unchecked(self.family, p).iter().any(|r| crate::arith::rat_mod(&self.s0, p) == Some(*r)) {
            return Err(BeckmannError::BadResidue(p));
        }
        Ok(())
    }

    /// Inertia at p of the specialization at t0, from the unique branch
    /// point t0 meets p-adically.
    pub fn predict(&self, t0: &Rat, p: u64) -> Result<Prediction, BeckmannError> {
        check_prime(p)?;
        self.check_good(p)?;
        self.predict_at_good_prime(t0, p)
    }

    /// [`predict`](Self::predict) without the goodness check, for callers
    /// that have already screened p.
    pub fn predict_at_good_prime(&self, t0: &Rat, p: u64) -> Result<Prediction, BeckmannError> {
        let meet = self.meetings(t0, p)?;
        match meet.len() {
            0 => Ok(Prediction::Unramified { p, degree: self.family.degree() }),
            1 => {
                let (idx, which, m) = &meet[0];
                let i = idx.ok_or_else(|| BeckmannError::UndeclaredBranch { p, which: which.clone() })?;
                Ok(Prediction::Ramified(self.inertia(i, *m, p)))
            }
            count => Err(BeckmannError::Contradiction { p, count }),
        }
    }

    /// As [`predict`](Self::predict), insisting that the branch met is `i`.
    pub fn predict_branch(&self, i: usize, t0: &Rat, p: u64) -> Result<Prediction, BeckmannError> {
        self.family.branch(i)?;
        match self.predict(t0, p)? {
            Prediction::Ramified(r) if r.branch != i => Err(BeckmannError::OtherBranch { p, expected: i, found: r.branch }),
            other => Ok(other),
        }
    }

    fn inertia(&self, i: usize, multiplicity: i64, p: u64) -> InertiaPrediction {
        let b = &self.family.branches()[i];
        let class = power_cycle_type(&b.inertia_generator, multiplicity);
        let order = b.e / b.e.gcd(&(multiplicity as usize));
        InertiaPrediction { p, branch: i, multiplicity, class, order }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InertiaPrediction {
    pub p: u64,
    pub branch: usize,
    pub multiplicity: i64,
    pub class: CycleType,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Prediction {
    Ramified(InertiaPrediction),
    Unramified { p: u64, degree: usize },
}

impl Prediction {
    pub fn class(&self) -> CycleType {
        match self {
            Prediction::Ramified(r) => r.class.clone(),
            Prediction::Unramified { degree, .. } => CycleType::new(vec![1; *degree]),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Prediction::Ramified(r) => r.order,
            Prediction::Unramified { .. } => 1,
        }
    }
}

/// Bad primes of the specialization at s0.
pub fn bad_primes(family: &Family, s0: &Rat) -> Result<BadPrimes, BeckmannError> {
    Ok(Specialization::new(family, s0)?.bad)
}

/// Inertia prediction for branch `i` at (s0, t0) and p.
pub fn predict_inertia(family: &Family, i: usize, s0: &Rat, t0: &Rat, p: u64) -> Result<Prediction, BeckmannError> {
    Specialization::new(family, s0)?.predict_branch(i, t0, p)
}

/// Primes excluded for every s0: divisors of the group order, of the
/// denominators of f, and of the integer content of disc_X f.
pub fn is_globally_exceptional(family: &Family, p: u64) -> bool {
    let pb = BigInt::from(p);
    if family.group_order().is_multiple_of(p as u128) {
        return true;
    }
    let f = family.poly();
    for j in 0..=f.deg_outer() {
        for c in f.coeff(j).coeffs() {
            if c.coeffs().iter().any(|x| (x.denom() % &pb).is_zero()) {
                return true;
            }
        }
    }
    let c = crate::poly::integer_content_bi(family.discriminant());
    (c.numer() % &pb).is_zero()
}

/// The sum of the degrees of the family's s-conditions: an upper bound on
/// the number of bad residues mod any good p.
pub fn bad_residue_bound(family: &Family) -> usize {
    family.s_conditions().iter().map(|c| c.poly.degree().unwrap_or(0)).sum()
}

/// Residues r mod p such that s0 ≡ r may make p bad for the specialization.
pub fn bad_s_residues(family: &Family, p: u64) -> Result<BTreeSet<u64>, BeckmannError> {
    check_prime(p)?;
    if is_globally_exceptional(family, p) {
        return Err(BeckmannError::GlobalExceptional(p));
    }
    Ok(bad_s_residues_unchecked(family, p))
}

/// Roots mod p of the family's s-conditions, with the labels that vanish.
pub fn bad_s_residue_witnesses(family: &Family, p: u64) -> BTreeMap<u64, Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(p);
    let mut out: BTreeMap<u64, Vec<String>> = BTreeMap::new();
    for c in family.s_conditions() {
        let Ok(fp) = FpPoly::from_rat(&c.poly, p) else { continue };
        if fp.is_zero() {
            continue;
        }
        for r in roots(&fp, &mut rng) {
            out.entry(r).or_default().push(c.label.clone());
        }
    }
    out
}

pub(crate) fn bad_s_residues_unchecked(family: &Family, p: u64) -> BTreeSet<u64> {
    bad_s_residue_witnesses(family, p).into_keys().collect()
}

/// A monic p-integral polynomial whose p-adic factorization realizes the
/// specialization at (s0, t0): the chart g(s0, 1/t0, Y) when t0 is not
/// p-integral, otherwise f(s0, t0, X), rescaled by X ↦ X/p^k if needed.
pub fn integral_model(family: &Family, s0: &Rat, t0: &Rat, p: u64) -> Poly<Rat> {
    let g = match valuation_unchecked(t0, p) {
        Val::Fin(v) if v < 0 => family.chart().0.at(s0, &t0.recip()),
        _ => family.poly().at(s0, t0),
    };
    make_p_integral(&g.with_var(Var::X), p)
}

pub fn make_p_integral(g: &Poly<Rat>, p: u64) -> Poly<Rat> {
    let n = g.degree().unwrap_or(0);
    let mut k = 0i64;
    for (j, c) in g.coeffs().iter().enumerate().take(n) {
        if let Val::Fin(v) = valuation_unchecked(c, p) {
            if v < 0 {
                let need = (-v + (n - j) as i64 - 1) / (n - j) as i64;
                k = k.max(need);
            }
        }
    }
    if k == 0 {
        return g.clone();
    }
    let pk = Rat::from_integer(BigInt::from(p).pow(k as u32));
    let coeffs = g.coeffs().iter().enumerate().map(|(j, c)| c * pk.power((n - j) as u32)).collect();
    Poly::new(g.var(), coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};
    use crate::poly::parse_poly_in;

    fn load(src: &str) -> Family {
        Family::from_json(src).unwrap()
    }

    fn x2mt() -> Family {
        load(
            r#"{"name":"x2mt","poly":"X^2 - t","group_generators":["(1 2)"],
            "branch_points":[{"location":"0","e":2,"inertia_generator":"(1 2)"},
                             {"location":"inf","e":2,"inertia_generator":"(1 2)"}]}"#,
        )
    }

    fn x3mt() -> Family {
        load(
            r#"{"name":"x3mt","poly":"X^3 - t","group_generators":["(1 2 3)","(1 2)"],
            "branch_points":[{"location":"0","e":3,"inertia_generator":"(1 2 3)","decomposition_generators":["(1 2 3)","(1 2)"]},
                             {"location":"inf","e":3,"inertia_generator":"(1 3 2)","decomposition_generators":["(1 2 3)","(1 2)"]}]}"#,
        )
    }

    #[test]
    fn multiplicity_examples() {
        let zero = BranchValue::Rational(rat(0));
        assert_eq!(intersection_multiplicity(&rat(12), &zero, 3).unwrap(), 1);
        assert_eq!(intersection_multiplicity(&rat(9), &zero, 3).unwrap(), 2);
        let g = BranchValue::MinPoly(parse_poly_in("t^2 - 2", Var::T).unwrap());
        assert_eq!(intersection_multiplicity(&ratio(7, 4), &g, 5).unwrap(), 0);
        assert!(matches!(intersection_multiplicity(&rat(0), &zero, 3), Err(BeckmannError::AtBranchPoint(_))));
        assert_eq!(intersection_multiplicity(&ratio(1, 25), &BranchValue::Infinity, 5).unwrap(), 2);
    }

    #[test]
    fn bad_primes_small_families() {
        assert_eq!(bad_primes(&x2mt(), &rat(0)).unwrap().list(), vec![2]);
        let b = bad_primes(&x3mt(), &rat(0)).unwrap();
        assert_eq!(b.list(), vec![2, 3]);
        assert!(b.primes[1].reasons.contains(&BadReason::DividesGroupOrder));
    }

    #[test]
    fn predictions_x2mt() {
        let fam = x2mt();
        let sp = Specialization::new(&fam, &rat(0)).unwrap();
        let p = sp.predict(&rat(12), 3).unwrap();
        assert_eq!((p.class(), p.order()), (CycleType::new(vec![2]), 2));
        let p = sp.predict(&rat(9), 3).unwrap();
        assert_eq!((p.class(), p.order()), (CycleType::new(vec![1, 1]), 1));
        let p = sp.predict(&rat(10), 3).unwrap();
        assert!(matches!(p, Prediction::Unramified { .. }));
        let p = sp.predict(&ratio(1, 3), 3).unwrap();
        assert!(matches!(p, Prediction::Ramified(InertiaPrediction { branch: 1, .. })));
        assert!(matches!(sp.predict(&rat(12), 2), Err(BeckmannError::BadPrime(2))));
    }

    #[test]
    fn bad_residues_examples() {
        let fam = load(
            r#"{"name":"x2mts","poly":"X^2 - (t - s)","group_generators":["(1 2)"],
            "branch_points":[{"location":"s","e":2,"inertia_generator":"(1 2)"}]}"#,
        );
        assert!(bad_s_residues(&fam, 5).unwrap().is_empty());
        let fam = load(
            r#"{"name":"c","poly":"X^2 - (t - s)*(t - 2*s)","group_generators":["(1 2)"],
            "branch_points":[{"location":"s","e":2,"inertia_generator":"(1 2)"},
                             {"location":"2*s","e":2,"inertia_generator":"(1 2)"}]}"#,
        );
        assert_eq!(bad_s_residues(&fam, 7).unwrap(), BTreeSet::from([0]));
        assert_eq!(bad_s_residues(&fam, 2), Err(BeckmannError::GlobalExceptional(2)));
    }

    #[test]
    fn integral_model_rescales() {
        let g = parse_poly_in("X^2 - 1/9", Var::X).unwrap();
        assert_eq!(make_p_integral(&g, 3), parse_poly_in("X^2 - 1", Var::X).unwrap());
        let g = parse_poly_in("X^3 + 1/3*X + 1", Var::X).unwrap();
        assert_eq!(make_p_integral(&g, 3), parse_poly_in("X^3 + 3*X + 27", Var::X).unwrap());
    }
}
