//! Acceptance suite: one test per criterion, each printing its pass/fail
//! line (visible with `--nocapture`) and asserting the verdict and budget.

use ladders::acceptance::*;

fn assert_criterion(outcome: CriterionOutcome) {
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}: {}", outcome.name, outcome.detail);
}

#[test]
fn acceptance_01_pi_laws() {
    assert_criterion(criterion_01_pi_laws());
}

#[test]
fn acceptance_02_breadth_equivalence() {
    assert_criterion(criterion_02_breadth_equivalence());
}

#[test]
fn acceptance_03_extension_forward() {
    assert_criterion(criterion_03_extension_forward());
}

#[test]
fn acceptance_04_extension_reverse() {
    assert_criterion(criterion_04_extension_reverse());
}

#[test]
fn acceptance_05_axiom_equivalence() {
    assert_criterion(criterion_05_axiom_equivalence());
}

#[test]
fn acceptance_06_closed_forms() {
    assert_criterion(criterion_06_closed_forms());
}

#[test]
fn acceptance_07_builder() {
    assert_criterion(criterion_07_builder());
}

#[test]
fn acceptance_08_nonmax_witness() {
    assert_criterion(criterion_08_nonmax_witness());
}

#[test]
fn acceptance_09_breadth_marker() {
    assert_criterion(criterion_09_breadth_marker());
}

#[test]
fn acceptance_10_club_build() {
    assert_criterion(criterion_10_club_build());
}

#[test]
fn acceptance_11_diamond_build() {
    assert_criterion(criterion_11_diamond_build());
}

#[test]
fn acceptance_12_cohen_families() {
    assert_criterion(criterion_12_cohen_families());
}
