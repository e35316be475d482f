//! Bulk runs: Frobenius sampling against the declared group, and the census
//! comparing predicted inertia with p-adic factorization over a grid.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{is_prime, primes_up_to, Rat};
use crate::beckmann::{integral_model, BeckmannError, Specialization};
use crate::family::{Family, FamilyError};
use crate::ffact::{degree_sequence, FpPoly};
use crate::padic::padic_shape;
use crate::par::Exec;
use crate::permgrp::CycleType;
use crate::poly::{is_squarefree_q, Var};

/// Sampling window for identify: primes in this range, t0 in 1..=T_GRID.
pub const ID_PRIME_RANGE: (u64, u64) = (1000, 20000);
pub const T_GRID: i64 = 32;

#[derive(Clone, Debug, Serialize)]
pub struct TypeStat {
    pub cycle_type: CycleType,
    /// Fraction of G with this cycle type; absent without a declared group.
    pub expected_fraction: Option<f64>,
    pub expected_count: Option<f64>,
    pub observed: usize,
    pub empirical_fraction: f64,
    pub relative_error: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject,
    /// No group declared: only the degrees of the sampled types are checked.
    SupportOnly,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentifyReport {
    pub name: String,
    #[serde(with = "crate::arith::rat_string")]
    pub s0: Rat,
    pub seed: u64,
    pub samples: usize,
    pub stats: Vec<TypeStat>,
    pub outside_support: Vec<CycleType>,
    /// Types of G expected at least `MIN_EXPECTED_OBSERVED` times but never seen.
    pub unobserved: Vec<CycleType>,
    /// Types expected at least `MIN_EXPECTED_FREQUENCY` times whose relative
    /// error exceeds `MAX_RELATIVE_ERROR`.
    pub frequency_outliers: Vec<CycleType>,
    pub verdict: Verdict,
}

pub const MIN_EXPECTED_OBSERVED: f64 = 5.0;
pub const MIN_EXPECTED_FREQUENCY: f64 = 20.0;
pub const MAX_RELATIVE_ERROR: f64 = 0.5;

impl IdentifyReport {
    pub fn stat(&self, c: &CycleType) -> Option<&TypeStat> {
        self.stats.iter().find(|s| &s.cycle_type == c)
    }
}

fn frobenius_type(family: &Family, s0: &Rat, t0: &Rat, q: u64) -> Option<CycleType> {
    let g = family.poly().at(s0, t0).with_var(Var::X);
    let fp = FpPoly::from_rat(&g, q).ok()?;
    degree_sequence(&fp).ok().map(CycleType::new)
}

/// Samples Frobenius cycle types at random (prime, t0) pairs and compares
/// them with the cycle-type distribution of the declared group.
pub fn identify(family: &Family, s0: &Rat, samples: usize, seed: u64, exec: Exec) -> Result<IdentifyReport, FamilyError> {
    let nd = family.nondegenerate_check(s0);
    if !nd.ok {
        return Err(FamilyError::Degenerate { s0: s0.clone(), reasons: nd.reasons });
    }
    let primes: Vec<u64> = (ID_PRIME_RANGE.0..=ID_PRIME_RANGE.1).filter(|&q| is_prime(q)).collect();
    let grid: Vec<Rat> = (1..=T_GRID)
        .map(|t| Rat::from_integer(t.into()))
        .filter(|t| is_squarefree_q(&family.poly().at(s0, t)))
        .collect();
    if grid.is_empty() {
        return Err(FamilyError::Undetermined("every t0 in the sampling grid is a branch point".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut observed = Vec::with_capacity(samples);
    // Draw candidates in batches so the outcome does not depend on the
    // execution mode: rejected pairs are skipped in draw order.
    while observed.len() < samples {
        let batch: Vec<(u64, Rat)> = (0..samples.max(16))
            .map(|_| (primes[rng.gen_range(0..primes.len())], grid[rng.gen_range(0..grid.len())].clone()))
            .collect();
        let types = exec.map(&batch, |(q, t0)| frobenius_type(family, s0, t0, *q));
        observed.extend(types.into_iter().flatten().take(samples - observed.len()));
    }
    Ok(compare_with_group(family, s0, seed, &observed))
}

fn compare_with_group(family: &Family, s0: &Rat, seed: u64, observed: &[CycleType]) -> IdentifyReport {
    let n = observed.len();
    let mut counts: BTreeMap<CycleType, usize> = BTreeMap::new();
    for c in observed {
        *counts.entry(c.clone()).or_insert(0) += 1;
    }
    let fingerprint: Option<BTreeMap<CycleType, Ratio<usize>>> = family.group().map(|g| g.fingerprint());
    let mut keys: Vec<CycleType> = counts.keys().cloned().collect();
    if let Some(fp) = &fingerprint {
        keys.extend(fp.keys().cloned());
    }
    keys.sort();
    keys.dedup();
    let mut stats = Vec::new();
    let (mut outside, mut unobserved, mut outliers) = (Vec::new(), Vec::new(), Vec::new());
    for c in keys {
        let obs = counts.get(&c).copied().unwrap_or(0);
        let emp = obs as f64 / n.max(1) as f64;
        let frac = fingerprint.as_ref().map(|fp| fp.get(&c).map_or(0.0, |r| *r.numer() as f64 / *r.denom() as f64));
        let expected = frac.map(|f| f * n as f64);
        let rel = frac.filter(|&f| f > 0.0).map(|f| (emp - f).abs() / f);
        match (frac, expected) {
            (Some(f), _) if f == 0.0 && obs > 0 => outside.push(c.clone()),
            (Some(_), Some(e)) => {
                if obs == 0 && e >= MIN_EXPECTED_OBSERVED {
                    unobserved.push(c.clone());
                }
                if e >= MIN_EXPECTED_FREQUENCY && rel.unwrap_or(0.0) > MAX_RELATIVE_ERROR {
                    outliers.push(c.clone());
                }
            }
            _ => {
                if c.degree() != family.degree() {
                    outside.push(c.clone());
                }
            }
        }
        stats.push(TypeStat {
            cycle_type: c,
            expected_fraction: frac,
            expected_count: expected,
            observed: obs,
            empirical_fraction: emp,
            relative_error: rel,
        });
    }
    let verdict = if !outside.is_empty() || !unobserved.is_empty() || !outliers.is_empty() {
        Verdict::Reject
    } else if fingerprint.is_none() {
        Verdict::SupportOnly
    } else {
        Verdict::Accept
    };
    IdentifyReport {
        name: family.name().to_string(),
        s0: s0.clone(),
        seed,
        samples: n,
        stats,
        outside_support: outside,
        unobserved,
        frequency_outliers: outliers,
        verdict,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CensusRow {
    #[serde(with = "crate::arith::rat_string")]
    pub s0: Rat,
    #[serde(with = "crate::arith::rat_string")]
    pub t0: Rat,
    pub p: u64,
    pub predicted_order: usize,
    pub predicted_class: String,
    pub observed_shape: String,
    #[serde(rename = "match")]
    pub matched: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Census {
    pub name: String,
    #[serde(with = "crate::arith::rat_string")]
    pub s0: Rat,
    /// Primes up to the bound that are bad at s0, excluded from the rows.
    pub bad_primes: Vec<u64>,
    pub skipped_branch_points: Vec<i64>,
    pub rows: Vec<CensusRow>,
}

impl Census {
    pub fn matched(&self) -> usize {
        self.rows.iter().filter(|r| r.matched).count()
    }

    pub fn match_rate(&self) -> f64 {
        if self.rows.is_empty() {
            1.0
        } else {
            self.matched() as f64 / self.rows.len() as f64
        }
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn census_row(sp: &Specialization<'_>, t0: &Rat, p: u64) -> CensusRow {
    let (predicted_order, predicted_class) = match sp.predict_at_good_prime(t0, p) {
        Ok(pr) => (pr.order(), Some(pr.class())),
        Err(_) => (0, None),
    };
    let observed = padic_shape(&integral_model(sp.family(), sp.s0(), t0, p), p);
    let matched = match (&predicted_class, &observed) {
        (Some(c), Ok(sh)) => &CycleType::new(sh.expanded()) == c,
        _ => false,
    };
    CensusRow {
        s0: sp.s0().clone(),
        t0: t0.clone(),
        p,
        predicted_order,
        predicted_class: predicted_class.map_or_else(|| "none".to_string(), |c| c.to_string()),
        observed_shape: match observed {
            Ok(sh) => sh.to_string(),
            Err(e) => format!("error: {e}"),
        },
        matched,
    }
}

/// Predicted against observed inertia for every integer t0 in `t_range`
/// and every good prime p ≤ `p_max`.
pub fn census(
    family: &Family,
    s0: &Rat,
    t_range: std::ops::RangeInclusive<i64>,
    p_max: u64,
    exec: Exec,
) -> Result<Census, BeckmannError> {
    let sp = Specialization::new(family, s0)?;
    let (good, bad): (Vec<u64>, Vec<u64>) = primes_up_to(p_max).into_iter().partition(|&p| sp.check_good(p).is_ok());
    let (ts, skipped): (Vec<i64>, Vec<i64>) =
        t_range.partition(|&t| !sp.is_branch_point(&Rat::from_integer(t.into())));
    let jobs: Vec<(Rat, u64)> =
        ts.iter().flat_map(|&t| good.iter().map(move |&p| (Rat::from_integer(t.into()), p))).collect();
    let mut rows = exec.map(&jobs, |(t0, p)| census_row(&sp, t0, *p));
    rows.sort();
    Ok(Census { name: family.name().to_string(), s0: s0.clone(), bad_primes: bad, skipped_branch_points: skipped, rows })
}
