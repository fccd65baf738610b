use moshlab::faddeyeva;
use moshlab::validate::{check, check_with, Level, CHECK_NAMES};
use num_complex::Complex64;

#[test]
fn cheap_checks_pass() {
    for id in [1, 3, 4, 5, 8] {
        let c = check(id, Level::Quick);
        assert_eq!(c.name, CHECK_NAMES[id as usize - 1]);
        assert!(c.passed, "{c:#?}");
    }
}

#[test]
fn perturbed_faddeyeva_is_caught() {
    let bad = |z: Complex64| faddeyeva(z).map(|w| w * 1.001);
    let c = check_with(1, Level::Quick, &bad);
    assert!(!c.passed);
    assert!(c.measurements.iter().all(|m| m.value.is_some()));
    assert!(c.measurements.iter().any(|m| m.value.unwrap() > 1e-4));
}

#[test]
fn perturbation_report_keeps_the_single_power_form_apart() {
    let c = check(8, Level::Quick);
    let m = c.measurements.iter().find(|m| m.label.contains("single-power")).unwrap();
    assert!(m.passed && m.label.contains("quadrature"));
}

#[test]
fn unknown_check_fails_cleanly() {
    let c = check(42, Level::Quick);
    assert!(!c.passed && c.name == "unknown");
    assert_eq!("full".parse::<Level>().unwrap(), Level::Full);
    assert!("medium".parse::<Level>().is_err());
}

#[test]
#[ignore = "unattainable: the N = 10 Tonks density has 6 maxima at t_N/2, not 10"]
fn tonks_check_in_full() {
    assert!(check(9, Level::Full).passed);
}
