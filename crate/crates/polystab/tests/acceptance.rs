//! The full verification suite, one test per criterion. Each test prints its
//! pass/fail summary line (visible with `--nocapture`) and asserts it.

use polystab::acceptance::{run_criterion, AcceptanceConfig};

fn run(id: usize) {
    let outcome = run_criterion(id, &AcceptanceConfig::full());
    println!("{}", outcome.summary_line());
    assert!(outcome.passed, "{}", outcome.summary_line());
    // Stated runtime budgets for the sweeps that have one.
    let budget = match id {
        1 => Some(5.0),
        2 => Some(10.0),
        4 => Some(60.0),
        _ => None,
    };
    if let Some(limit) = budget {
        assert!(
            outcome.seconds < limit,
            "criterion {id} took {:.2}s (budget {limit}s)",
            outcome.seconds
        );
    }
}

#[test]
fn criterion_01_spectral_identities() {
    run(1);
}

#[test]
fn criterion_02_eigenvalue_closed_form() {
    run(2);
}

#[test]
fn criterion_03_circulant_eigenbasis() {
    run(3);
}

#[test]
fn criterion_04_lemma_conditions() {
    run(4);
}

#[test]
fn criterion_05_hessian_closed_forms() {
    run(5);
}

#[test]
fn criterion_06_flip_suite() {
    run(6);
}

#[test]
fn criterion_07_deficit_bookkeeping() {
    run(7);
}

#[test]
fn criterion_08_radial_bonnesen_bound() {
    run(8);
}

#[test]
fn criterion_09_empirical_stability_theorem() {
    run(9);
}

#[test]
fn criterion_10_sharpness_scaling() {
    run(10);
}
