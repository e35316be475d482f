//! End-to-end searches checked against independently computed symbols.

mod common;

use common::{euler, manifest, q, squarefree_over_q, vp, x2_shape, x3_shape};
use galspec::arith::Rat;
use galspec::grunwald::{
    search, search_s0, search_t0, verify, GrunwaldError, LocalCondition, SearchOptions, VerifyOptions,
};
use galspec::par::Exec;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

fn int(x: &Rat) -> i64 {
    assert!(x.is_integer());
    x.to_integer().to_i64().unwrap()
}

fn conds(fam: &galspec::family::Family, srcs: &[&str]) -> Vec<LocalCondition> {
    LocalCondition::parse_all(srcs, fam).unwrap()
}

fn quadratic_oracle(t: i64) -> bool {
    vp(&BigInt::from(t), 3) == 1 && euler(t, 7) == 1 && euler(t, 11) == -1
}

#[test]
fn quadratic_three_conditions() {
    let fam = manifest("x2mt");
    let cs = conds(&fam, &["p=3,branch=0,d=1", "p=7,unram,type=1,1", "p=11,unram,type=2"]);
    let r = search(&fam, &cs, SearchOptions::default()).unwrap();
    assert!(r.pass, "{:?}", r.failures());
    let t0 = int(&r.t0);
    assert!(quadratic_oracle(t0), "t0 = {t0}");
    let prog = r.t0_progression.clone().unwrap();
    assert_eq!(prog.numerator.modulus, BigInt::from(3 * 3 * 7 * 11));
    assert!(t0 >= 0 && BigInt::from(t0) < prog.numerator.modulus);
    assert_eq!(r.further_members.len(), 5);
    for m in &r.further_members {
        assert!(m.pass);
        assert!(quadratic_oracle(int(&m.t0)));
    }
    for k in 0..200 {
        let t = int(&prog.member(k));
        assert!(quadratic_oracle(t), "member {t}");
        assert_eq!(x2_shape(t, 3), vec![(2, 1)]);
    }
}

#[test]
fn trivial_inertia_condition() {
    let fam = manifest("x2mt");
    let cs = conds(&fam, &["p=5,branch=0,d=2"]);
    let r = search(&fam, &cs, SearchOptions::default()).unwrap();
    assert!(r.pass, "{:?}", r.failures());
    let t0 = int(&r.t0);
    assert_eq!(vp(&BigInt::from(t0), 5), 2);
    // 25 is the least member but a square; the search must step past it.
    assert_ne!(t0, 25);
    assert!(r.notes.iter().any(|n| n.contains("t0 = 25")), "{:?}", r.notes);
}

#[test]
fn psl_residue_frobenius() {
    let fam = manifest("psl32");
    let nontrivial = search(&fam, &conds(&fam, &["p=7,branch=inf,d=1,frob=2"]), SearchOptions::default()).unwrap();
    assert!(nontrivial.pass, "{:?}", nontrivial.failures());
    assert_eq!(nontrivial.s0_progression.as_ref().unwrap().to_string(), "2 mod 7");
    assert_eq!(nontrivial.records[0].shape.as_ref().unwrap().factors, vec![(2, 1), (2, 1), (1, 2), (1, 1)]);

    let trivial = search(&fam, &conds(&fam, &["p=7,branch=inf,d=1,frob=1"]), SearchOptions::default()).unwrap();
    assert!(trivial.pass, "{:?}", trivial.failures());
    assert_eq!(trivial.s0_progression.as_ref().unwrap().to_string(), "1 mod 7");
    assert_eq!(trivial.records[0].shape.as_ref().unwrap().factors, vec![(2, 1), (2, 1), (1, 1), (1, 1), (1, 1)]);
}

#[test]
fn psl_two_primes_crt() {
    let fam = manifest("psl32");
    let cs = conds(&fam, &["p=7,branch=inf,frob=2", "p=11,branch=inf,frob=1"]);
    let r = search(&fam, &cs, SearchOptions { further_members: 6, ..Default::default() }).unwrap();
    assert!(r.pass, "{:?}", r.failures());
    let prog = r.s0_progression.clone().unwrap();
    assert_eq!(prog.modulus, BigInt::from(77));
    let legendre_ok = |s: i64| euler(s * s - 4 * s, 7) == -1 && euler(s * s - 4 * s, 11) == 1;
    assert!(legendre_ok(int(&r.s0)));
    for k in 0..50 {
        let s = prog.member(k).to_i64().unwrap();
        assert!(legendre_ok(s), "s0 = {s}");
    }
    for m in &r.further_members {
        assert!(m.pass, "{:?}", m.failures);
        assert!(legendre_ok(int(&m.s0)));
        let u = Rat::from_integer(BigInt::from(1)) / &m.t0;
        assert_eq!(vp(&u.numer().clone(), 7), 1);
        assert_eq!(vp(&u.numer().clone(), 11), 1);
    }
}

#[test]
fn psl_mixed_conditions() {
    let fam = manifest("psl32");
    let cs = conds(&fam, &["p=7,branch=inf,d=1,frob=2", "p=13,unram,type=3,3,1", "p=17,unram,type=7"]);
    let r = search(&fam, &cs, SearchOptions::default()).unwrap();
    assert!(r.pass, "{:?}", r.failures());
    assert!(r.group_id.pass);
    assert_eq!(r.group_id.samples, 300);
}

#[test]
fn constant_residue_extension() {
    // ρ = X^2 + X + 1 does not depend on s: its Frobenius is fixed by p mod 3.
    let fam = manifest("x3mt");
    let r = search(&fam, &conds(&fam, &["p=5,branch=0,frob=2"]), SearchOptions::default()).unwrap();
    assert!(r.pass, "{:?}", r.failures());
    assert_eq!(x3_shape(int(&r.t0), 5), vec![(3, 1)]);
    let err = search_s0(&fam, &conds(&fam, &["p=5,branch=0,frob=1"])).unwrap_err();
    assert!(matches!(err, GrunwaldError::NoResidueFound { p: 5, .. }));
    let r = search(&fam, &conds(&fam, &["p=7,branch=0,frob=1"]), SearchOptions::default()).unwrap();
    assert!(r.pass, "{:?}", r.failures());
}

#[test]
fn unattainable_target_is_reported() {
    // Mod 3, X^3 - t is never squarefree; no unramified class is reachable.
    let fam = manifest("x3mt");
    let cs = conds(&fam, &["p=3,unram,type=3"]);
    assert!(search_t0(&fam, &q(0), &cs).is_err());
}

#[test]
fn verify_detects_wrong_witness() {
    let fam = manifest("psl32");
    let cs = conds(&fam, &["p=7,branch=inf,d=1,frob=2"]);
    // s0 = 1 has trivial residue Frobenius at 7.
    let r = verify(&fam, &q(1), &Rat::new(1.into(), 7.into()), &cs, VerifyOptions { id_samples: 0 }).unwrap();
    assert!(!r.pass);
    assert!(r.records[0].failures.iter().any(|f| f.contains("order 1")), "{:?}", r.records[0].failures);
    // t0 = 1/49 has the wrong multiplicity.
    let r = verify(&fam, &q(2), &Rat::new(1.into(), 49.into()), &cs, VerifyOptions { id_samples: 0 }).unwrap();
    assert!(!r.pass);
    assert_eq!(r.records[0].multiplicity, Some(2));
}

#[test]
fn reports_are_deterministic() {
    let fam = manifest("psl32");
    let cs = conds(&fam, &["p=7,branch=inf,d=1,frob=2", "p=13,unram,type=3,3,1"]);
    let a = search(&fam, &cs, SearchOptions { seed: 3, exec: Exec::Sequential, ..Default::default() }).unwrap();
    let b = search(&fam, &cs, SearchOptions { seed: 3, exec: Exec::Parallel, ..Default::default() }).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn empty_conditions() {
    let fam = manifest("psl32");
    let ss = search_s0(&fam, &[]).unwrap();
    assert_eq!(ss.progression.modulus, BigInt::from(1));
    assert_eq!(ss.witness, q(1));
    let ts = search_t0(&fam, &ss.witness, &[]).unwrap();
    let t0 = int(&ts.witness);
    // The least integer off the branch locus of f(1, t, X).
    let least = (0..).find(|&t| squarefree_over_q(fam.poly().at(&q(1), &q(t)).coeffs())).unwrap();
    assert_eq!(t0, least);
}
