//! One test per acceptance criterion. Each prints a PASS/FAIL line.
//! Run with `cargo test --test acceptance -- --nocapture` to see them.

use fraclie_core::selftest::{
    criteria, CriterionResult, ISC_TOL, KERNEL_ABS_TOL, LEMMA2_TOL, POWER_RULE_REL_TOL, SEQUENTIAL_TOL,
    STEPPER_FINEST_REL, STEPPER_LADDER, STEPPER_MIN_REDUCTION,
};
use fraclie_core::catalog::{COINCIDENCE_TOL, EQUIVALENCE_TOL};
use fraclie_core::verify::{CROSS_CHECK_TOL, EXACT_TOL, QUADRATURE_TOL};

fn run(id: &str) -> CriterionResult {
    let c = criteria().into_iter().find(|c| c.id == id).expect("criterion exists");
    let r = c.run();
    println!("{}", r.line());
    if let (Some(m), Some(t)) = (r.measured, r.tolerance) {
        println!("       measured {m:.3e}, tolerance {t:.1e}, {:.2} s", r.seconds);
    }
    r
}

fn check(id: &str) {
    let r = run(id);
    assert!(r.passed, "{}", r.line());
}

#[test]
fn tolerances_are_pinned() {
    assert_eq!(POWER_RULE_REL_TOL, 1e-6);
    assert_eq!(KERNEL_ABS_TOL, 1e-8);
    assert_eq!(EXACT_TOL, 1e-8);
    assert_eq!(QUADRATURE_TOL, 1e-5);
    assert_eq!(CROSS_CHECK_TOL, 1e-6);
    assert_eq!(LEMMA2_TOL, 1e-10);
    assert_eq!(ISC_TOL, 1e-8);
    assert_eq!(EQUIVALENCE_TOL, 1e-10);
    assert_eq!(SEQUENTIAL_TOL, 1e-8);
    assert_eq!(COINCIDENCE_TOL, 1e-10);
    assert_eq!(STEPPER_MIN_REDUCTION, 1.5);
    assert_eq!(STEPPER_FINEST_REL, 1e-2);
    assert_eq!(STEPPER_LADDER, [25, 50, 100, 200]);
}

#[test]
fn criterion_01_tables() {
    check("1");
}

#[test]
fn criterion_02_power_rule() {
    check("2");
}

#[test]
fn criterion_03_residuals() {
    check("3");
}

#[test]
fn criterion_04_lemma2() {
    check("4");
}

#[test]
fn criterion_05_invariance() {
    check("5");
}

#[test]
fn criterion_06_equivalences() {
    check("6");
}

#[test]
fn criterion_07_sequential() {
    check("7");
}

#[test]
fn criterion_08_coincidence() {
    check("8");
}

/// The prescribed example has no real solution at alpha = 1/2, so this
/// criterion cannot pass as stated.
#[test]
fn criterion_09_time_stepper() {
    check("9");
}

#[test]
fn criterion_09s_time_stepper_alpha_one_third() {
    check("9s");
}

#[test]
fn criterion_10_discrepancy_note() {
    check("10");
}
