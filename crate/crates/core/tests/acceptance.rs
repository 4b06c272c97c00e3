//! The nine acceptance criteria, one test each. Every test writes its
//! pass/fail line straight to stderr so it shows up in captured runs.

use std::io::Write;

use systematic_k::cli::selftest::run_criterion;

fn check(id: usize) {
    let outcome = run_criterion(id);
    let _ = writeln!(std::io::stderr(), "{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn criterion_1_lower_triangular_identities() {
    check(1);
}

#[test]
fn criterion_2_polynomial_windows_match_the_oracle() {
    check(2);
}

#[test]
fn criterion_3_strongly_systematic_suite() {
    check(3);
}

#[test]
fn criterion_4_counterexamples() {
    check(4);
}

#[test]
fn criterion_5_hom_vanishing() {
    check(5);
}

#[test]
fn criterion_6_semidirect_decomposition() {
    check(6);
}

#[test]
fn criterion_7_toric_cones() {
    check(7);
}

#[test]
fn criterion_8_filtered_graded_agreement() {
    check(8);
}

#[test]
fn criterion_9_oracle_self_consistency() {
    check(9);
}
