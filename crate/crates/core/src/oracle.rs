//! Independent reference computations used by the tests and by `validate`.
//!
//! None of these share a numerical route with the function they check: the
//! Fresnel form uses the real Fresnel integrals, the quadrature integrates
//! the linear-potential propagator directly, and the grid propagator is a
//! split-operator FFT solver.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use log::warn;
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::boxtrap::BoxScenario;
use crate::error::{invalid, Error, Result};
use crate::quad::{integrate_panels, integrate_real, QuadratureReport, Tolerance};
use crate::shutter::{fringe_width, ShutterScenario};
use crate::specfun::{fresnel, ComplexValue};

/// Shutter wave function through the Fresnel integrals,
/// `ψ = (2i)^{−1/2} e^{iΦ} [(1+i)/2 + C(u₀) + iS(u₀)]`.
pub fn fresnel_route_psi(s: &ShutterScenario, x: f64, t: f64) -> Result<ComplexValue> {
    if !(t > 0.0) {
        return invalid("fresnel_route_psi needs t > 0");
    }
    let (p, f) = (s.p, s.f);
    let u0 = s.u0_of(x, t);
    let (c, sn) = fresnel(u0)?;
    let phase = p * x - f * t * x - 0.5 * p * p * t + 0.5 * p * f * t * t - f * f * t * t * t / 6.0;
    // (2i)^{-1/2} = e^{-iπ/4}/√2
    let pref = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, phase - PI / 4.0);
    Ok(pref * Complex64::new(0.5 + c, 0.5 + sn))
}

/// Stationary point `x′* = x − (p − ft/2)t` of the propagator integral.
pub fn stationary_point(s: &ShutterScenario, x: f64, t: f64) -> f64 {
    x - (s.p - 0.5 * s.f * t) * t
}

/// Default truncation for [`quadrature_psi`]: 15 Fresnel zones beyond the
/// stationary point (or beyond the shutter if the point is in the shadow).
pub fn default_window(s: &ShutterScenario, x: f64, t: f64) -> f64 {
    (-stationary_point(s, x, t)).max(0.0) + 15.0 * (PI * t).sqrt()
}

/// `∫_{−∞}^{a} e^{iθ(x)} dx` for `θ = c(x − x*)²/2`, `a < x*`, by the
/// integration-by-parts series truncated at its smallest term.
/// Returns `(value without the factor e^{iθ(a)}, error bound)`.
fn gaussian_phase_tail(c: f64, g: f64) -> (Complex64, f64) {
    // Σ α_k c^k g^{−(2k+1)}, α₀ = −i, α_{k+1} = −i(2k+1)α_k
    let mut alpha = Complex64::new(0.0, -1.0);
    let mut term = alpha / g;
    let mut sum = term;
    let ratio = c / (g * g);
    for k in 0..200 {
        alpha *= Complex64::new(0.0, -(2 * k + 1) as f64);
        let next = alpha * ratio.powi(k + 1) / g;
        if next.norm() >= term.norm() {
            return (sum, term.norm());
        }
        term = next;
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    (sum, term.norm())
}

/// Shutter wave function by direct quadrature of the propagator integral
/// `ψ(x,t) = ∫_{−∞}^{0} K(x, x′, t) e^{ipx′} dx′`, with
/// `K = (2πit)^{−1/2} exp(i[(x−x′)²/2t − f(x+x′)t/2 − f²t³/24])`.
///
/// `[−window, 0]` is integrated adaptively on panels of one `2π` phase
/// change each; the rest of the half-line is added analytically.
pub fn quadrature_psi(s: &ShutterScenario, x: f64, t: f64, window: f64) -> Result<QuadratureReport> {
    if !(t > 0.0) || !(window > 0.0) {
        return invalid("quadrature_psi needs t > 0 and window > 0");
    }
    let (p, f) = (s.p, s.f);
    let xs = stationary_point(s, x, t);
    let a = -window;
    let zone = (PI * t).sqrt();
    if a > xs - 10.0 * zone {
        return invalid(format!(
            "window {window} ends less than 10 Fresnel zones ({zone}) before the stationary point {xs}"
        ));
    }
    // Θ(x′) = Θ(x*) + (x′ − x*)²/(2t)
    let theta_star = (x - xs).powi(2) / (2.0 * t) - f * (x + xs) * t / 2.0 - f * f * t * t * t / 24.0 + p * xs;
    let pref = (Complex64::new(0.0, 2.0 * PI * t)).sqrt().inv() * Complex64::from_polar(1.0, theta_star);

    let mut breaks = vec![a, 0.0];
    let zones = ((xs - a).powi(2) / (4.0 * PI * t)).ceil() as usize + 1;
    for k in 0..=zones {
        let d = (4.0 * PI * t * k as f64).sqrt();
        for b in [xs - d, xs + d] {
            if b > a && b < 0.0 {
                breaks.push(b);
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let inv_2t = 0.5 / t;
    let scale = (2.0 * PI * t).sqrt();
    let tol = Tolerance::new(1e-12 * scale, 1e-12);
    let core = integrate_panels(|y| Complex64::from_polar(1.0, (y - xs).powi(2) * inv_2t), &breaks, tol)?;

    let g = (a - xs) / t;
    let (tail, tail_err) = gaussian_phase_tail(1.0 / t, g);
    let tail = tail * Complex64::from_polar(1.0, (a - xs).powi(2) * inv_2t);

    let m = pref.norm();
    Ok(QuadratureReport {
        value: pref * (core.value + tail),
        est_error: m * (core.est_error + tail_err),
        evaluations: core.evaluations,
    })
}

/// Cooperative cancellation flag shared between a caller and a long computation.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

/// A wave function sampled at `x_j = x_min + j·dx`, `j = 0..n`, on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWave {
    pub x_min: f64,
    pub dx: f64,
    pub values: Vec<Complex64>,
}

impl GridWave {
    fn check(x_min: f64, dx: f64, n: usize) -> Result<()> {
        if !(dx > 0.0) || !x_min.is_finite() || n < 2 {
            return invalid("grid wave needs dx > 0, finite x_min and at least two points");
        }
        Ok(())
    }

    /// Point samples of `psi`.
    pub fn sample(x_min: f64, dx: f64, n: usize, psi: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::check(x_min, dx, n)?;
        let values = (0..n).map(|j| psi(x_min + j as f64 * dx)).collect();
        Ok(GridWave { x_min, dx, values })
    }

    /// Band-limited, periodised state with Fourier transform
    /// `spectrum(k) = ∫ ψ(x) e^{−ikx} dx` at the grid wavenumbers.
    pub fn from_spectrum(x_min: f64, dx: f64, n: usize, spectrum: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::check(x_min, dx, n)?;
        let length = n as f64 * dx;
        let mut buf: Vec<Complex64> = (0..n)
            .map(|m| {
                let k = wavenumber(m, n, dx);
                spectrum(k) * Complex64::from_polar(1.0 / length, k * x_min)
            })
            .collect();
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        Ok(GridWave { x_min, dx, values: buf })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx
    }

    /// Largest density within the outer `1/64` of the grid at either end.
    pub fn edge_density(&self) -> f64 {
        let n = self.len();
        let band = (n / 64).max(1);
        self.values[..band]
            .iter()
            .chain(&self.values[n - band..])
            .map(|v| v.norm_sqr())
            .fold(0.0, f64::max)
    }
}

fn wavenumber(m: usize, n: usize, dx: f64) -> f64 {
    let m = if m < n.div_ceil(2) { m as f64 } else { m as f64 - n as f64 };
    2.0 * PI * m / (n as f64 * dx)
}

/// Edge density above which [`grid_propagate`] gives up.
pub const EDGE_DENSITY_LIMIT: f64 = 1e-10;

/// Strang split-operator propagation under `H = p²/2 + f x` for time `t` in
/// `steps` equal steps. For a linear potential the splitting is exact up to
/// a global phase, so `steps` only controls how often the boundary is checked.
pub fn grid_propagate(
    initial: &GridWave,
    f: f64,
    t: f64,
    steps: usize,
    cancel: Option<&CancelToken>,
) -> Result<GridWave> {
    if !(t >= 0.0) || steps == 0 {
        return invalid("grid_propagate needs t ≥ 0 and at least one step");
    }
    let n = initial.len();
    let dt = t / steps as f64;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let kinetic: Vec<Complex64> = (0..n)
        .map(|m| {
            let k = wavenumber(m, n, initial.dx);
            Complex64::from_polar(1.0 / n as f64, -0.5 * k * k * dt)
        })
        .collect();
    let half_kick: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, -0.5 * f * initial.x(j) * dt))
        .collect();

    let mut wave = initial.clone();
    let mut scratch = vec![Complex64::new(0.0, 0.0); fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len())];
    for _ in 0..steps {
        if cancel.is_some_and(CancelToken::is_cancelled) {
            return Err(Error::Cancelled);
        }
        let v = &mut wave.values;
        if f != 0.0 {
            v.iter_mut().zip(&half_kick).for_each(|(a, b)| *a *= b);
        }
        fwd.process_with_scratch(v, &mut scratch);
        v.iter_mut().zip(&kinetic).for_each(|(a, b)| *a *= b);
        inv.process_with_scratch(v, &mut scratch);
        if f != 0.0 {
            v.iter_mut().zip(&half_kick).for_each(|(a, b)| *a *= b);
        }
        let edge = wave.edge_density();
        if edge > EDGE_DENSITY_LIMIT {
            return Err(Error::BoundaryContamination { edge_density: edge });
        }
    }
    Ok(wave)
}

/// Default grid spacing for released trap states; resolves wavenumbers up
/// to 60. The band-limit error in the density falls off as `dx²` and is
/// about `2e-8` at this spacing for `L = 20`, `n = 3`.
pub const BOX_GRID_STEP: f64 = 0.05;

/// A power-of-two grid of spacing `dx` holding trap state `b` for all times
/// up to `t_max`: it covers the classical path plus ten cloud sizes plus the
/// distance at which the `1/x⁴` density tail falls below `1e-12`.
pub fn box_grid(b: &BoxScenario, t_max: f64, dx: f64) -> (f64, f64, usize) {
    let kn = b.k_n();
    let tail = (4.0 * kn * kn * t_max.powi(3) / (PI * b.l * 1e-12)).powf(0.25);
    let reach = tail + 10.0 * b.spread(t_max);
    let end = b.classical_center(t_max) - 0.5 * b.l;
    let lo = end.min(0.0) - reach;
    let hi = (end + b.l).max(b.l) + reach;
    let n = ((hi - lo) / dx).ceil() as usize;
    (lo, dx, n.next_power_of_two())
}

/// Trap state `b` propagated on the grid to each of `times` (ascending).
pub fn box_grid_states(
    b: &BoxScenario,
    times: &[f64],
    dx: f64,
    cancel: Option<&CancelToken>,
) -> Result<Vec<GridWave>> {
    if !(dx > 0.0) {
        return invalid("box_grid_states needs dx > 0");
    }
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let (x_min, dx, n) = box_grid(b, t_max, dx);
    let mut wave = GridWave::from_spectrum(x_min, dx, n, |k| box_spectrum(b, k))?;
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        if t < now {
            return invalid("box_grid_states needs ascending times");
        }
        wave = grid_propagate(&wave, b.f, t - now, 8, cancel)?;
        now = t;
        out.push(wave.clone());
    }
    Ok(out)
}

/// Fourier transform `∫ φ(x) e^{−ikx} dx` of the kicked trap eigenstate
/// `√(2/L) sin(nπx/L) e^{iqx}` on `[0, L]`.
pub fn box_spectrum(b: &BoxScenario, k: f64) -> Complex64 {
    let l = b.l;
    let kappa = k - b.q;
    let e = |a: f64| {
        let h = 0.5 * a * l;
        let sinc = if h.abs() < 1e-8 { 1.0 - h * h / 6.0 } else { h.sin() / h };
        Complex64::from_polar(l * sinc, h)
    };
    let kn = b.k_n();
    Complex64::new(0.0, -0.5 * (2.0 / l).sqrt()) * (e(kn - kappa) - e(-kn - kappa))
}

/// `f⟨φ_k|x|φ_n⟩/(E_n − E_k)` with the matrix element computed by quadrature.
pub fn perturbation_matrix_element(n: u32, k: u32, l: f64, f: f64) -> Result<f64> {
    if n == k || n == 0 || k == 0 {
        return invalid("perturbation_matrix_element needs distinct n, k ≥ 1");
    }
    let (kn, kk) = (n as f64 * PI / l, k as f64 * PI / l);
    let panels = 4 * (n + k) as usize;
    let breaks: Vec<f64> = (0..=panels).map(|i| l * i as f64 / panels as f64).collect();
    let r = integrate_real(
        |x| (2.0 / l) * (kk * x).sin() * x * (kn * x).sin(),
        &breaks,
        Tolerance::new(1e-15 * l, 1e-15),
    )?;
    let de = 0.5 * (kn * kn - kk * kk);
    Ok(f * r.value / de)
}

/// Wigner function of the shutter state by direct numerical transform
/// `W(x,p) = (1/π) ∫ ψ*(x+y) ψ(x−y) e^{2ipy} dy`.
///
/// The beam is multiplied by a raised-cosine window around the classical
/// front of half-width `window` (default: 50 fringe widths) whose edges
/// taper over 10 fringe widths.
pub fn wigner_direct(p0: f64, f: f64, t: f64, x: f64, p: f64, window: Option<f64>) -> Result<f64> {
    if !(t > 0.0) {
        return invalid("wigner_direct needs t > 0");
    }
    let s = ShutterScenario::new(p0, f)?;
    let width = fringe_width(t);
    let half = window.unwrap_or(50.0 * width);
    let taper = (10.0 * width).min(0.5 * half);
    let center = s.front(t);
    if (x - center).abs() > half - taper - 2.0 * width {
        warn!("wigner_direct: x = {x} lies within two fringe widths of the window edge");
    }
    let win = |z: f64| {
        let d = (z - center).abs();
        if d <= half - taper {
            1.0
        } else if d >= half {
            0.0
        } else {
            0.5 * (1.0 + (PI * (d - half + taper) / taper).cos())
        }
    };
    let y_max = half - (x - center).abs();
    if y_max <= 0.0 {
        return Ok(0.0);
    }
    // Oscillation rate of the integrand: 2p from the kernel plus the
    // local wavenumber of either factor.
    let rate = 2.0 * p.abs() + 2.0 * (p0.abs() + f.abs() * t + (y_max + (x - center).abs()) / t) + 1.0;
    let panels = ((2.0 * y_max * rate / (2.0 * PI)).ceil() as usize).max(8);
    let breaks: Vec<f64> = (0..=panels).map(|i| -y_max + 2.0 * y_max * i as f64 / panels as f64).collect();
    let mut failure = None;
    let r = integrate_panels(
        |y| {
            let wa = win(x + y);
            let wb = win(x - y);
            if wa == 0.0 || wb == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            match (s.psi_linear(x + y, t), s.psi_linear(x - y, t)) {
                (Ok(a), Ok(b)) => a.conj() * b * Complex64::from_polar(wa * wb, 2.0 * p * y),
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        &breaks,
        Tolerance::new(1e-6, 1e-8),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r.value.re / PI)
}

/// Brute-force one-body density of the normalised Slater determinant of
/// `orbitals` at lattice index `i`: `ρ(x_i) = N Σ_{j₂…j_N} |Ψ(x_i, x_{j₂}, …)|² dx^{N−1}`,
/// with `Ψ = det[φ_a(x_b)]/√N!`. Supports up to three orbitals.
pub fn slater_marginal(orbitals: &[Vec<Complex64>], dx: f64, i: usize) -> Result<f64> {
    let n = orbitals.len();
    let m = orbitals.first().map_or(0, Vec::len);
    if n == 0 || n > 3 || orbitals.iter().any(|o| o.len() != m) || i >= m {
        return invalid("slater_marginal supports 1 to 3 orbitals of equal length");
    }
    let o = orbitals;
    let sum = match n {
        1 => o[0][i].norm_sqr(),
        2 => {
            let mut acc = 0.0;
            for j in 0..m {
                acc += (o[0][i] * o[1][j] - o[1][i] * o[0][j]).norm_sqr();
            }
            acc * dx / 2.0
        }
        _ => {
            let mut acc = 0.0;
            for j in 0..m {
                for k in 0..m {
                    let det = o[0][i] * (o[1][j] * o[2][k] - o[2][j] * o[1][k])
                        - o[1][i] * (o[0][j] * o[2][k] - o[2][j] * o[0][k])
                        + o[2][i] * (o[0][j] * o[1][k] - o[1][j] * o[0][k]);
                    acc += det.norm_sqr();
                }
            }
            acc * dx * dx / 6.0
        }
    };
    Ok(n as f64 * sum)
}
