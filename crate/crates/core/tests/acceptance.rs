//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero only for
//! failures not listed in `KNOWN_FAILURES`.

mod common;

use std::time::{Duration, Instant};

use common::{disc_abs, eval_mod, euler, expand, manifest, odd_primes, q, qq, tame_instance, vp, x2_shape, x3_shape};
use galspec::arith::Rat;
use galspec::beckmann::{bad_residue_bound, bad_s_residue_witnesses, bad_s_residues, integral_model, is_globally_exceptional, Specialization};
use galspec::grunwald::{search, LocalCondition, SearchOptions};
use galspec::padic::padic_shape;
use galspec::par::Exec;
use galspec::permgrp::{ef_multiset, generate, subgroups_with_orbit_lengths, CycleType, DEFAULT_CAP};
use galspec::survey::{census, identify, Verdict};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::test_runner::{Config, TestCaseError, TestError, TestRunner};

/// Criteria expected to fail, with the sub-checks that must still hold.
const KNOWN_FAILURES: &[u32] = &[7];

struct Outcome {
    pass: bool,
    /// For a known failure: whether everything except the expected part held.
    remainder_ok: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, remainder_ok: pass, detail }
    }
}

fn nontrivial() -> Vec<(usize, usize)> {
    vec![(2, 1), (2, 1), (1, 2), (1, 1)]
}

fn trivial() -> Vec<(usize, usize)> {
    vec![(2, 1), (2, 1), (1, 1), (1, 1), (1, 1)]
}

fn flagship_shapes() -> Outcome {
    let fam = manifest("psl32");
    let mut mismatches = Vec::new();
    let mut counts = Vec::new();
    for s0 in [1i64, 2, 3, 5] {
        let sp = Specialization::new(&fam, &q(s0)).unwrap();
        let (mut used, mut minus) = (0, 0);
        for p in odd_primes(5, 400) {
            if sp.check_good(p).is_err() {
                continue;
            }
            // u0 = p in the chart u = 1/t.
            let t0 = qq(1, p as i64);
            let shape = padic_shape(&integral_model(&fam, &q(s0), &t0, p), p).unwrap();
            let symbol = euler(s0 * s0 - 4 * s0, p);
            let want = if symbol == -1 { nontrivial() } else { trivial() };
            if shape.factors != want {
                mismatches.push(format!("s0={s0} p={p}: {shape}"));
            }
            used += 1;
            minus += (symbol == -1) as usize;
        }
        counts.push((s0, used, minus));
    }
    let enough = counts.iter().all(|&(_, used, minus)| used >= 20 && minus > 0 && minus < used);
    Outcome::new(
        enough && mismatches.is_empty(),
        format!("(s0, primes, nonresidues) = {counts:?}, mismatches {mismatches:?}"),
    )
}

fn decomposition_group() -> Outcome {
    let fam = manifest("psl32");
    let g = fam.group().unwrap();
    let classes = subgroups_with_orbit_lengths(g, &CycleType::parse("2,2,2,1").unwrap()).unwrap();
    let v4: Vec<_> = classes
        .iter()
        .filter(|c| c.order() == 4 && c.representative.elements().iter().all(|x| x.pow(2).is_identity()))
        .collect();
    if v4.is_empty() {
        return Outcome::new(false, format!("no elementary abelian class among {} classes", classes.len()));
    }
    let d = &v4[0].representative;
    let shapes: Vec<Vec<(usize, usize)>> = d
        .elements()
        .iter()
        .filter(|x| !x.is_identity())
        .map(|x| ef_multiset(&generate(std::slice::from_ref(x), 7, DEFAULT_CAP).unwrap(), d).unwrap())
        .collect();
    let ok = shapes.iter().all(|s| *s == nontrivial());
    Outcome::new(ok, format!("{} class(es) of order 4, class size {}, shapes {:?}", v4.len(), v4[0].class_size, shapes[0]))
}

fn beckmann_census() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (name, oracle) in [("x2mt", x2_shape as fn(i64, u64) -> Vec<(usize, usize)>), ("x3mt", x3_shape)] {
        let fam = manifest(name);
        let c = census(&fam, &q(0), -500..=500, 97, Exec::Auto).unwrap();
        let good = odd_primes(3, 97).len() + 1 - c.bad_primes.len();
        let expected_rows = (1001 - c.skipped_branch_points.len()) * good;
        let oracle_mismatch = c
            .rows
            .iter()
            .filter(|r| {
                let t = r.t0.to_integer().to_i64().unwrap();
                let want: Vec<String> = expand(&oracle(t, r.p)).iter().map(|x| x.to_string()).collect();
                r.predicted_class != want.join(",")
            })
            .count();
        ok &= c.matched() == c.rows.len() && c.rows.len() == expected_rows && oracle_mismatch == 0;
        details.push(format!(
            "{name}: {}/{} rows match, oracle disagreements {oracle_mismatch}, bad primes {:?}",
            c.matched(),
            c.rows.len(),
            c.bad_primes
        ));
    }
    Outcome::new(ok, details.join("; "))
}

fn quadratic_oracle(t: &Rat) -> bool {
    let t = t.to_integer();
    let small = |p: i64| (&t % BigInt::from(p)).to_i64().unwrap();
    vp(&t, 3) == 1 && euler(small(7), 7) == 1 && euler(small(11), 11) == -1
}

fn grunwald_c2() -> Outcome {
    let fam = manifest("x2mt");
    let conds = LocalCondition::parse_all(&["p=3,branch=0,d=1", "p=7,unram,type=1,1", "p=11,unram,type=2"], &fam).unwrap();
    let r = match search(&fam, &conds, SearchOptions::default()) {
        Ok(r) => r,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let witness_ok = r.t0.is_integer() && quadratic_oracle(&r.t0);
    let members_ok = r.further_members.len() >= 5 && r.further_members.iter().all(|m| m.pass && quadratic_oracle(&m.t0));
    let members: Vec<String> = r.further_members.iter().map(|m| m.t0.to_string()).collect();
    Outcome::new(
        r.pass && witness_ok && members_ok,
        format!("t0 = {} (oracle {}), members {:?} (oracle {})", r.t0, witness_ok, members, members_ok),
    )
}

fn residue_bound() -> Outcome {
    let fam = manifest("psl32");
    let m = bad_residue_bound(&fam);
    let all: Vec<u64> = odd_primes(5, 10_000).into_iter().filter(|&p| !is_globally_exceptional(&fam, p)).collect();
    let picked: Vec<u64> = (0..50).map(|i| all[i * (all.len() - 1) / 49]).collect();
    let mut worst = (0, 0);
    let mut problems = Vec::new();
    for &p in &picked {
        let res = bad_s_residues(&fam, p).unwrap();
        if res.len() > m {
            problems.push(format!("p={p}: {} residues", res.len()));
        }
        if res.len() > worst.1 {
            worst = (p, res.len());
        }
        let witnesses = bad_s_residue_witnesses(&fam, p);
        for (r, labels) in &witnesses {
            for label in labels {
                let c = fam.s_conditions().iter().find(|c| &c.label == label).unwrap();
                if eval_mod(c.poly.coeffs(), *r, p) != 0 {
                    problems.push(format!("p={p}: {label} does not vanish at {r}"));
                }
            }
        }
        if witnesses.keys().copied().collect::<std::collections::BTreeSet<_>>() != res {
            problems.push(format!("p={p}: witness keys differ from residues"));
        }
        if p < 500 {
            for r in (0..p).filter(|r| !res.contains(r)) {
                if fam.s_conditions().iter().any(|c| eval_mod(c.poly.coeffs(), r, p) == 0) {
                    problems.push(format!("p={p}: missed residue {r}"));
                }
            }
        }
    }
    let stable = bad_residue_bound(&fam) == m;
    Outcome::new(
        problems.is_empty() && stable && picked[0] == all[0] && *picked.last().unwrap() == *all.last().unwrap(),
        format!("m = {m}, 50 primes {}..{}, largest count {} at p = {}, problems {problems:?}", picked[0], picked[49], worst.1, worst.0),
    )
}

fn tame_triangle() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 500, failure_persistence: None, ..Config::default() });
    let result = runner.run(&tame_instance(), |inst| {
        let shape = padic_shape(&inst.poly, inst.p).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let deg = inst.poly.degree().unwrap();
        if shape.degree() != deg {
            return Err(TestCaseError::fail(format!("Σef = {} but degree {deg}", shape.degree())));
        }
        let coeffs: Vec<BigInt> = inst.poly.coeffs().iter().map(|c| c.to_integer()).collect();
        let v = vp(&disc_abs(&coeffs), inst.p) as usize;
        if v != shape.different_exponent() {
            return Err(TestCaseError::fail(format!("v_p(disc) = {v} but Σ(e-1)f = {}", shape.different_exponent())));
        }
        if shape.factors != inst.expected {
            return Err(TestCaseError::fail(format!("shape {shape}, constructed {:?}", inst.expected)));
        }
        Ok(())
    });
    match result {
        Ok(()) => Outcome::new(true, "500 generated instances, degree ≤ 6, p ≤ 97".into()),
        Err(TestError::Fail(why, inst)) => Outcome::new(false, format!("minimal counterexample p = {}, f = {}: {why}", inst.p, inst.poly)),
        Err(TestError::Abort(why)) => Outcome::new(false, format!("aborted: {why}")),
    }
}

fn fingerprint() -> Outcome {
    let fam = manifest("psl32");
    let r = identify(&fam, &q(1), 300, 0, Exec::Auto).unwrap();
    let expected = [("1,1,1,1,1,1,1", 1.0 / 168.0), ("2,2,1,1,1", 1.0 / 8.0), ("3,3,1", 1.0 / 3.0), ("4,2,1", 1.0 / 4.0), ("7", 2.0 / 7.0)];
    let mut lines = Vec::new();
    let mut all_observed = true;
    let mut within = true;
    let mut others_within = true;
    for (ty, frac) in expected {
        let c = CycleType::parse(ty).unwrap();
        let observed = r.stat(&c).map_or(0, |s| s.observed);
        let emp = observed as f64 / r.samples as f64;
        let rel = (emp - frac).abs() / frac;
        all_observed &= observed > 0;
        within &= rel <= 0.5;
        if ty != "1,1,1,1,1,1,1" {
            others_within &= rel <= 0.5;
        }
        lines.push(format!("{ty}: {observed} (expected {:.2}, rel err {:.2})", frac * r.samples as f64, rel));
    }
    let support_ok = r.outside_support.is_empty();
    let control = identify(&manifest("s7_control"), &q(1), 300, 0, Exec::Auto).unwrap();
    let rejected = control.verdict == Verdict::Reject;
    let pass = all_observed && within && support_ok && rejected;
    Outcome {
        pass,
        remainder_ok: all_observed && others_within && support_ok && rejected && r.verdict == Verdict::Accept,
        detail: format!("{}; PSL verdict {:?}; S7 control {:?}", lines.join(", "), r.verdict, control.verdict),
    }
}

/// Number, name, check and time limit.
type Criterion = (u32, &'static str, fn() -> Outcome, Option<Duration>);

fn main() {
    let criteria: [Criterion; 7] = [
        (1, "flagship shapes at infinity", flagship_shapes, Some(Duration::from_secs(60))),
        (2, "Klein four decomposition group", decomposition_group, None),
        (3, "Beckmann census", beckmann_census, Some(Duration::from_secs(120))),
        (4, "Grunwald search for X^2 - t", grunwald_c2, None),
        (5, "bad residue bound", residue_bound, None),
        (6, "tame shape and discriminant", tame_triangle, None),
        (7, "Frobenius fingerprint", fingerprint, None),
    ];
    let mut unexpected = Vec::new();
    for (n, name, f, limit) in criteria {
        let start = Instant::now();
        let mut o = f();
        let took = start.elapsed();
        if let Some(limit) = limit {
            if took > limit {
                o.detail.push_str(&format!("; over the {}s limit", limit.as_secs()));
                o.pass = false;
                o.remainder_ok = false;
            }
        }
        println!("criterion {n}: {} {name} [{:.1}s] {}", if o.pass { "PASS" } else { "FAIL" }, took.as_secs_f64(), o.detail);
        if !o.pass {
            if KNOWN_FAILURES.contains(&n) && o.remainder_ok {
                println!("criterion {n}: known failure, all other sub-checks hold");
            } else {
                unexpected.push(n);
            }
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
