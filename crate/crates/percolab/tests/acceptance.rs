//! The acceptance gate: one test per criterion, printing a pass/fail line,
//! plus the byte-determinism rerun of the whole report.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use percolab::verify::{render_report, run_all, CheckOutcome};

const SEED: u64 = 0xC0FFEE;

fn suite() -> &'static [CheckOutcome] {
    use std::sync::OnceLock;
    static SUITE: OnceLock<Vec<CheckOutcome>> = OnceLock::new();
    SUITE.get_or_init(|| {
        let outcomes = run_all(SEED);
        for o in &outcomes {
            println!("{}", o.line());
        }
        outcomes
    })
}

fn assert_criterion(id: usize) {
    let o = suite()
        .iter()
        .find(|o| o.id == id)
        .expect("criterion exists");
    assert!(o.passed, "{}", o.line());
    assert!(
        o.elapsed <= o.budget,
        "criterion {} exceeded its runtime budget: {:?} > {:?}",
        id,
        o.elapsed,
        o.budget
    );
}

#[test]
fn criterion_01_crossing_self_duality() {
    assert_criterion(1);
}

#[test]
fn criterion_02_pc_recovery() {
    assert_criterion(2);
}

#[test]
fn criterion_03_fk_self_dual() {
    assert_criterion(3);
}

#[test]
fn criterion_04_subcritical_decay() {
    assert_criterion(4);
}

#[test]
fn criterion_05_coupling_equivalence() {
    assert_criterion(5);
}

#[test]
fn criterion_06_mcmc_vs_oracle() {
    assert_criterion(6);
}

#[test]
fn criterion_07_parafermionic_vanishing() {
    assert_criterion(7);
}

#[test]
fn criterion_08_connective_constant() {
    assert_criterion(8);
}

#[test]
fn criterion_09_sharpness_identities() {
    assert_criterion(9);
}

#[test]
fn criterion_10_dynamical_stationarity() {
    assert_criterion(10);
}

#[test]
fn criterion_11_determinism() {
    assert_criterion(11);
    // The full report itself is byte-identical on a rerun with the seed.
    let again = run_all(SEED);
    assert_eq!(render_report(suite()), render_report(&again));
}
