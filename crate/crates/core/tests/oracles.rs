use std::f64::consts::PI;

use moshlab::oracle::{
    box_spectrum, default_window, fresnel_route_psi, grid_propagate, perturbation_matrix_element, quadrature_psi,
    slater_marginal, GridWave,
};
use moshlab::{BoxScenario, Error, ShutterScenario};
use num_complex::Complex64;

/// Gaussian of width `sigma` centred at the origin with momentum `k0`.
fn gaussian(x: f64, sigma: f64, k0: f64) -> Complex64 {
    let a = (2.0 * PI * sigma * sigma).powf(-0.25);
    Complex64::from_polar(a * (-x * x / (4.0 * sigma * sigma)).exp(), k0 * x)
}

/// Freely spread Gaussian, `σ_t = σ|1 + it/(2σ²)|`.
fn spread_density(x: f64, sigma: f64, k0: f64, t: f64) -> f64 {
    let s2 = sigma * sigma * (1.0 + (t / (2.0 * sigma * sigma)).powi(2));
    let y = x - k0 * t;
    (-y * y / (2.0 * s2)).exp() / (2.0 * PI * s2).sqrt()
}

#[test]
fn grid_spreads_a_free_gaussian_exactly() {
    let (sigma, k0, t) = (1.0, 0.5, 6.0);
    let wave = GridWave::sample(-64.0, 0.125, 1024, |x| gaussian(x, sigma, k0)).unwrap();
    let out = grid_propagate(&wave, 0.0, t, 4, None).unwrap();
    assert!((out.norm() - 1.0).abs() < 1e-12);
    let worst = (0..out.len())
        .map(|j| (out.values[j].norm_sqr() - spread_density(out.x(j), sigma, k0, t)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-9, "{worst:e}");
}

#[test]
fn grid_drops_a_gaussian_under_a_force() {
    let (sigma, f, t) = (1.5, 0.2, 5.0);
    let wave = GridWave::sample(-64.0, 0.125, 1024, |x| gaussian(x, sigma, 0.0)).unwrap();
    let out = grid_propagate(&wave, f, t, 16, None).unwrap();
    let mean: f64 = (0..out.len()).map(|j| out.x(j) * out.values[j].norm_sqr()).sum::<f64>() * out.dx;
    assert!((mean + 0.5 * f * t * t).abs() < 1e-9, "{mean}");
    let worst = (0..out.len())
        .map(|j| (out.values[j].norm_sqr() - spread_density(out.x(j) + 0.5 * f * t * t, sigma, 0.0, t)).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-9, "{worst:e}");
}

#[test]
fn grid_reports_boundary_contamination() {
    let wave = GridWave::sample(-16.0, 0.125, 256, |x| gaussian(x, 1.0, 3.0)).unwrap();
    match grid_propagate(&wave, 0.0, 10.0, 10, None) {
        Err(Error::BoundaryContamination { edge_density }) => assert!(edge_density > 1e-10),
        other => panic!("expected boundary contamination, got {other:?}"),
    }
    assert!(grid_propagate(&wave, 0.0, -1.0, 10, None).is_err());
    assert!(grid_propagate(&wave, 0.0, 1.0, 0, None).is_err());
}

#[test]
fn sampled_trap_state_matches_its_spectrum() {
    // A band-limited state and its point samples agree away from the kinks.
    let b = BoxScenario::new(10.0, 2, 0.3, 0.0).unwrap();
    let (x_min, dx, n) = (-22.0, 0.02, 2048);
    let wave = GridWave::from_spectrum(x_min, dx, n, |k| box_spectrum(&b, k)).unwrap();
    assert!((wave.norm() - 1.0).abs() < 1e-4);
    for j in (0..n).step_by(37) {
        let x = wave.x(j);
        if (x - 0.0).abs() > 1.0 && (x - 10.0).abs() > 1.0 {
            let exact = Complex64::from_polar(b.eigenstate(x), b.q * x);
            assert!((wave.values[j] - exact).norm() < 1e-3, "x = {x}");
        }
    }
}

#[test]
fn fresnel_route_limits() {
    let s = ShutterScenario::new(1.5, 0.0).unwrap();
    let t = 2.0;
    // Deep in the illuminated region the plane wave is recovered.
    let x = s.front(t) - 200.0;
    assert!((fresnel_route_psi(&s, x, t).unwrap().norm_sqr() - 1.0).abs() < 1e-2);
    // Far in the shadow the density dies away as 1/(2π²u₀²).
    let x = s.front(t) + 200.0;
    let u = s.u0_of(x, t);
    let d = fresnel_route_psi(&s, x, t).unwrap().norm_sqr();
    assert!((d * 2.0 * PI * PI * u * u - 1.0).abs() < 1e-2, "{d}");
    assert!((fresnel_route_psi(&s, s.front(t), t).unwrap().norm_sqr() - 0.25).abs() < 1e-14);
    assert!(fresnel_route_psi(&s, 0.0, 0.0).is_err());
}

#[test]
fn quadrature_and_fresnel_routes_agree() {
    for (p, f, t) in [(1.0, 0.0, 1.0), (3.0, 0.5, 2.0), (-1.0, -0.2, 4.0)] {
        let s = ShutterScenario::new(p, f).unwrap();
        for du in [-3.0, -0.5, 0.0, 0.7, 2.5] {
            let x = s.x_of_u0(du, t);
            let a = fresnel_route_psi(&s, x, t).unwrap();
            let q = quadrature_psi(&s, x, t, default_window(&s, x, t)).unwrap();
            assert!((a - q.value).norm() < 1e-8, "p = {p}, f = {f}, u0 = {du}: {a} vs {}", q.value);
        }
    }
}

#[test]
fn perturbation_matrix_element_examples() {
    // ⟨φ₂|x|φ₁⟩ = −16L/(9π²), E₁ − E₂ = −3π²/(2L²)
    let l = 2.0;
    let x12 = -16.0 * l / (9.0 * PI * PI);
    let de = -3.0 * PI * PI / (2.0 * l * l);
    assert!((perturbation_matrix_element(1, 2, l, 0.7).unwrap() - 0.7 * x12 / de).abs() < 1e-13);
    assert!(perturbation_matrix_element(2, 4, l, 1.0).unwrap().abs() < 1e-14);
    assert!(perturbation_matrix_element(3, 3, l, 1.0).is_err());
    assert!(perturbation_matrix_element(0, 3, l, 1.0).is_err());
}

#[test]
fn slater_marginal_of_orthonormal_orbitals() {
    // Two box states sampled on [0, L]: the marginal equals |φ₁|² + |φ₂|².
    let (l, m) = (1.0, 400);
    let dx = l / m as f64;
    let orb = |n: f64| -> Vec<Complex64> {
        (0..m).map(|j| Complex64::new((2.0 / l).sqrt() * (n * PI * (j as f64 + 0.5) * dx).sin(), 0.0)).collect()
    };
    let orbitals = vec![orb(1.0), orb(2.0)];
    for i in [13, 100, 257] {
        let sum = orbitals[0][i].norm_sqr() + orbitals[1][i].norm_sqr();
        assert!((slater_marginal(&orbitals, dx, i).unwrap() - sum).abs() < 1e-10);
    }
    assert_eq!(slater_marginal(&orbitals[..1], dx, 7).unwrap(), orbitals[0][7].norm_sqr());
    assert!(slater_marginal(&[], dx, 0).is_err());
    assert!(slater_marginal(&orbitals, dx, m).is_err());
}
