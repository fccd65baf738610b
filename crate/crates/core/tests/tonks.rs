use std::f64::consts::PI;

use moshlab::oracle::{box_grid, box_spectrum, grid_propagate, slater_marginal, GridWave, BOX_GRID_STEP};
use moshlab::presets;
use moshlab::tonks::{peak_count, DEFAULT_PEAK_THRESHOLD};
use moshlab::validate::tonks_slice;
use moshlab::{BoxScenario, TgScenario};
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn single_particle_reduces_to_the_trap_state() {
    let tg = TgScenario::new(1, 15.0, 0.3, 0.02).unwrap();
    let b = BoxScenario::new(15.0, 1, 0.3, 0.02).unwrap();
    for i in 0..50 {
        let (x, t) = (-20.0 + i as f64, 0.5 + 0.7 * i as f64);
        assert_eq!(tg.density(x, t).unwrap(), b.density(x, t).unwrap());
    }
    assert!((tg.t_n() - b.bifurcation_time()).abs() < 1e-15);
}

#[test]
fn bifurcation_time_matches_the_top_mode() {
    let tg = presets::tonks_release();
    assert_eq!(tg.particles, 10);
    assert!((tg.t_n() - tg.mode(10).bifurcation_time()).abs() < 1e-12);
}

#[test]
fn density_integrates_to_n() {
    let tg = presets::tonks_release();
    for t in [0.5 * tg.t_n(), 2.0 * tg.t_n()] {
        let r = tg.norm(t).unwrap();
        assert!((r.value - 10.0).abs() < 1e-7, "t = {t}: {}", r.value);
    }
}

#[test]
fn short_times_recover_the_ground_state_profile() {
    let tg = TgScenario::new(4, 10.0, 0.0, 0.0).unwrap();
    let t = 1e-4 * tg.t_n();
    for i in 1..40 {
        let x = 10.0 * i as f64 / 40.0;
        let exact: f64 = (1..=4).map(|n| 0.2 * (n as f64 * PI * x / 10.0).sin().powi(2)).sum();
        assert!((tg.density(x, t).unwrap() - exact).abs() < 1e-3, "x = {x}");
    }
}

#[test]
fn ten_maxima_early_on() {
    let tg = presets::tonks_release();
    let slice = tonks_slice(&tg, 0.1 * tg.t_n()).unwrap();
    assert_eq!(peak_count(&slice, DEFAULT_PEAK_THRESHOLD).unwrap(), 10);
}

#[test]
#[ignore = "the exact density has 6 maxima at t_N/2 (confirmed by grid propagation); 10 survive only to about 0.2 t_N"]
fn ten_maxima_at_half_the_bifurcation_time() {
    let tg = presets::tonks_release();
    let slice = tonks_slice(&tg, 0.5 * tg.t_n()).unwrap();
    assert_eq!(peak_count(&slice, DEFAULT_PEAK_THRESHOLD).unwrap(), 10);
}

#[test]
fn maxima_at_half_the_bifurcation_time_agree_with_grid_propagation() {
    let tg = presets::tonks_release();
    let t = 0.5 * tg.t_n();
    // The top mode spreads furthest, so its grid holds every mode.
    let (x_min, dx, n) = box_grid(&tg.mode(tg.particles), t, BOX_GRID_STEP);
    let waves: Vec<GridWave> = (1..=tg.particles)
        .map(|k| {
            let initial = GridWave::from_spectrum(x_min, dx, n, |p| box_spectrum(&tg.mode(k), p)).unwrap();
            grid_propagate(&initial, tg.f, t, 8, None).unwrap()
        })
        .collect();
    let wave = &waves[0];
    let c = tg.mode(1).classical_center(t);
    let half = 0.5 * tg.l + tg.mode(tg.particles).k_n() * t + 10.0;
    let j0 = ((c - half - x_min) / dx).floor() as usize;
    let j1 = ((c + half - x_min) / dx).ceil() as usize;
    let grid_slice: Vec<f64> = (j0..=j1).map(|j| waves.iter().map(|w| w.values[j].norm_sqr()).sum()).collect();
    let exact: Vec<f64> = (j0..=j1).map(|j| tg.density(wave.x(j), t).unwrap()).collect();
    let worst = exact.iter().zip(&grid_slice).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst:e}");
    let count = peak_count(&exact, DEFAULT_PEAK_THRESHOLD).unwrap();
    assert_eq!(count, peak_count(&grid_slice, DEFAULT_PEAK_THRESHOLD).unwrap());
    assert_eq!(count, peak_count(&tonks_slice(&tg, t).unwrap(), DEFAULT_PEAK_THRESHOLD).unwrap());
}

#[test]
fn fewer_maxima_after_the_bifurcation_time() {
    let tg = presets::tonks_release();
    let slice = tonks_slice(&tg, 2.0 * tg.t_n()).unwrap();
    assert!(peak_count(&slice, DEFAULT_PEAK_THRESHOLD).unwrap() < 10);
}

fn slater_check(particles: u32, dx: f64, points: usize) {
    let tg = TgScenario::new(particles, 10.0, 0.0, 0.0).unwrap();
    let t = 0.5 * tg.t_n();
    let top = tg.mode(particles);
    let c = top.classical_center(t);
    let cloud = 0.5 * tg.l + top.k_n() * t;
    let reach = cloud + 10.0 * top.spread(t) + 300.0;
    let m = (2.0 * reach / dx).ceil() as usize;
    let xs: Vec<f64> = (0..m).map(|j| c - reach + j as f64 * dx).collect();
    let orbitals: Vec<Vec<Complex64>> =
        (1..=particles).map(|n| xs.iter().map(|&x| tg.mode(n).psi(x, t).unwrap()).collect()).collect();
    for p in 0..points {
        let x = c - cloud + 2.0 * cloud * p as f64 / (points - 1) as f64;
        let i = ((x - xs[0]) / dx).round() as usize;
        let d = tg.density(xs[i], t).unwrap();
        if d > 1e-2 {
            let s = slater_marginal(&orbitals, dx, i).unwrap();
            assert!((s - d).abs() < 1e-3 * d, "N = {particles}, x = {}: {s} vs {d}", xs[i]);
        }
    }
}

#[test]
fn mode_sum_matches_the_slater_marginal_for_two_particles() {
    slater_check(2, 0.1, 21);
}

#[test]
fn mode_sum_matches_the_slater_marginal_for_three_particles() {
    slater_check(3, 0.4, 7);
}

#[test]
fn late_envelope_follows_the_momentum_distribution() {
    // At 10 t_N the density approaches (1/t) n((x − c)/t), with n(p) the
    // momentum distribution of the trapped gas and c the dropped centre.
    let tg = presets::tonks_release();
    let free = TgScenario { f: 0.0, ..tg };
    let t = 10.0 * tg.t_n();
    let c = 0.5 * tg.l - 0.5 * tg.f * t * t;
    let ballistic = |x: f64| {
        let p = (x - c) / t;
        (1..=tg.particles).map(|n| box_spectrum(&free.mode(n), p).norm_sqr()).sum::<f64>() / (2.0 * PI * t)
    };
    let reach = 1.2 * tg.mode(tg.particles).k_n() * t;
    let top = ballistic(c);
    for i in 0..=40 {
        let x = c - reach + 2.0 * reach * i as f64 / 40.0;
        let b = ballistic(x);
        if b > 0.1 * top {
            let d = tg.density(x, t).unwrap();
            assert!((d - b).abs() < 0.05 * b, "x - c = {}: {d} vs {b}", x - c);
            let unforced = free.density(x + 0.5 * tg.f * t * t, t).unwrap();
            assert!((d - unforced).abs() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn density_is_the_sum_of_mode_densities(n in 1u32..6, x in -30.0..40.0f64, t in 0.1..20.0f64) {
        let tg = TgScenario::new(n, 10.0, 0.1, 0.01).unwrap();
        let sum: f64 = (1..=n).map(|k| tg.mode(k).density(x, t).unwrap()).sum();
        prop_assert!((tg.density(x, t).unwrap() - sum).abs() <= 1e-15 * sum.max(1.0));
        prop_assert!(tg.density(x, t).unwrap() >= 0.0);
    }
}
