//! Hard-wall trap eigenstates released into a linear potential, optionally
//! with a momentum kick.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::{FieldFrame, FrameValues, GridSpec, Quantity, ScenarioEcho};
use crate::quad::{integrate_real, QuadratureReport, Tolerance};
use crate::specfun::{moshinsky_split, ComplexValue, MoshinskyArgs};

/// Neglected density beyond the integration reach of the moment integrals.
const TAIL_NEGLECT: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxScenario {
    /// Trap length; the trap occupies `[0, L]`.
    pub l: f64,
    /// Quantum number, ≥ 1.
    pub n: u32,
    /// Kick momentum applied at release.
    pub q: f64,
    /// Force constant; `V = f x`.
    pub f: f64,
}

/// Momenta `p_± = q ± nπ/L − ft/2` of the two outgoing branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchMomentum {
    pub p_plus: f64,
    pub p_minus: f64,
}

impl BoxScenario {
    pub fn new(l: f64, n: u32, q: f64, f: f64) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return invalid(format!("trap length must be positive, got {l}"));
        }
        if n == 0 {
            return invalid("quantum number must be at least 1");
        }
        if !q.is_finite() || !f.is_finite() {
            return invalid("kick and force must be finite");
        }
        Ok(BoxScenario { l, n, q, f })
    }

    pub fn echo(&self) -> ScenarioEcho {
        ScenarioEcho::Box { l: self.l, n: self.n, q: self.q, f: self.f }
    }

    /// Wavenumber `nπ/L` of the eigenstate.
    pub fn k_n(&self) -> f64 {
        self.n as f64 * PI / self.l
    }

    pub fn energy(&self) -> f64 {
        0.5 * self.k_n() * self.k_n()
    }

    pub fn branch_momentum(&self, t: f64) -> BranchMomentum {
        let base = self.q - 0.5 * self.f * t;
        BranchMomentum { p_plus: base + self.k_n(), p_minus: base - self.k_n() }
    }

    /// `√(2/L) sin(nπx/L)` inside the trap, zero outside.
    pub fn eigenstate(&self, x: f64) -> f64 {
        if (0.0..=self.l).contains(&x) {
            (2.0 / self.l).sqrt() * (self.k_n() * x).sin()
        } else {
            0.0
        }
    }

    /// Semiclassical bifurcation time `L²/(2nπ)`.
    pub fn bifurcation_time(&self) -> f64 {
        self.l * self.l / (2.0 * PI * self.n as f64)
    }

    /// Classical centre of mass `L/2 + qt − ft²/2`.
    pub fn classical_center(&self, t: f64) -> f64 {
        0.5 * self.l + self.q * t - 0.5 * self.f * t * t
    }

    /// Spatial scale of the released cloud, `max(L, nπt/L)`.
    pub fn spread(&self, t: f64) -> f64 {
        self.l.max(self.k_n() * t)
    }

    /// Released wave function, sum of four Moshinsky terms:
    ///
    /// `ψ = √(2/L)/(2i) e^{−i(ftx/2 + f²t³/24)} Σ_α α [e^{ip_αL} M(x−L, p_α, t) − M(x, p_α, t)]`.
    pub fn psi(&self, x: f64, t: f64) -> Result<ComplexValue> {
        if !(t > 0.0) {
            return invalid(format!("released state needs t > 0, got {t}"));
        }
        let BranchMomentum { p_plus, p_minus } = self.branch_momentum(t);
        let l = self.l;
        let mut sum = Complex64::new(0.0, 0.0);
        for (alpha, p) in [(1.0, p_plus), (-1.0, p_minus)] {
            let right = moshinsky_split(MoshinskyArgs { x: x - l, k: p, tau: t })?;
            let left_args = MoshinskyArgs { x, k: p, tau: t };
            let left = moshinsky_split(left_args)?;
            let mut pair = Complex64::from_polar(1.0, p * l) * right.diffracted - left.diffracted;
            // The plane waves of the two edges are identical and cancel
            // except inside the classical strip pt ≤ x < pt + L.
            if right.illuminated && !left.illuminated {
                pair += left.plane(left_args);
            } else if left.illuminated && !right.illuminated {
                pair -= left.plane(left_args);
            }
            sum += alpha * pair;
        }
        let f = self.f;
        let phase = -(0.5 * f * t * x + f * f * t * t * t / 24.0);
        let pref = Complex64::new(0.0, -0.5 * (2.0 / l).sqrt()) * Complex64::from_polar(1.0, phase);
        Ok(pref * sum)
    }

    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        if t == 0.0 {
            let e = self.eigenstate(x);
            return Ok(e * e);
        }
        Ok(self.psi(x, t)?.norm_sqr())
    }

    /// Far from the cloud the density decays as `A/(x − c)⁴` with
    /// `A = 4k_n²t³/(πL)`, the free flight of the `1/k²` momentum tail.
    fn tail_amplitude(&self, t: f64) -> f64 {
        4.0 * self.k_n() * self.k_n() * t.powi(3) / (PI * self.l)
    }

    /// `∫ (x − c)^power |ψ|² dx` about the classical centre `c`.
    ///
    /// The core `c ± 10σ` is split into panels of a fraction of a fringe, the
    /// outer region out to the radius where the neglected `1/x⁴` tail drops
    /// below `1e-11` into panels of two tail-oscillation periods `2πt/L`.
    fn integrate_moment(&self, t: f64, power: i32) -> Result<QuadratureReport<f64>> {
        let center = self.classical_center(t);
        let sigma = self.spread(t);
        let core = 10.0 * sigma;
        let amp = self.tail_amplitude(t);
        let reach = core.max((amp / (3.0 * TAIL_NEGLECT)).cbrt());
        let core_panels = ((40.0 * self.n as f64 * sigma / self.l).ceil() as usize).max(20);
        let outer_width = 4.0 * PI * t / self.l;
        let outer_panels = (((reach - core) / outer_width).ceil() as usize).min(20_000);

        let mut breaks = Vec::with_capacity(2 * outer_panels + core_panels + 1);
        for i in (1..=outer_panels).rev() {
            breaks.push(center - core - (reach - core) * i as f64 / outer_panels as f64);
        }
        for i in 0..=core_panels {
            breaks.push(center - core + 2.0 * core * i as f64 / core_panels as f64);
        }
        for i in 1..=outer_panels {
            breaks.push(center + core + (reach - core) * i as f64 / outer_panels as f64);
        }

        let mut failure = None;
        let report = integrate_real(
            |x| match self.density(x, t) {
                Ok(d) => d * (x - center).powi(power),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            &breaks,
            Tolerance::new(TAIL_NEGLECT * sigma.powi(power), 1e-12),
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        let neglected = 2.0 * amp * reach.powi(power - 3) / (3 - power) as f64;
        Ok(QuadratureReport { est_error: report.est_error + neglected, ..report })
    }

    /// `∫|ψ|² dx` by adaptive quadrature.
    pub fn norm(&self, t: f64) -> Result<QuadratureReport<f64>> {
        if t == 0.0 {
            return Ok(QuadratureReport { value: 1.0, est_error: 0.0, evaluations: 0 });
        }
        self.integrate_moment(t, 0)
    }

    /// `⟨x(t)⟩` by adaptive quadrature.
    pub fn mean_position(&self, t: f64) -> Result<QuadratureReport<f64>> {
        if t == 0.0 {
            return Ok(QuadratureReport { value: 0.5 * self.l, est_error: 0.0, evaluations: 0 });
        }
        let r = self.integrate_moment(t, 1)?;
        Ok(QuadratureReport { value: r.value + self.classical_center(t), ..r })
    }

    /// First-order admixture coefficients `(k, C_nk)` for `k = 1..=k_max`, `k ≠ n`.
    pub fn perturbation_coefficients(&self, k_max: u32) -> Result<Vec<(u32, f64)>> {
        if k_max < self.n {
            return invalid(format!("k_max = {k_max} is below n = {}", self.n));
        }
        Ok((1..=k_max)
            .filter(|&k| k != self.n)
            .map(|k| (k, perturbation_coefficient(self.n, k, self.l, self.f)))
            .collect())
    }

    pub fn density_map(&self, grid: &GridSpec) -> Result<FieldFrame> {
        let values = grid.sample(|x, t| self.density(x, t))?;
        FieldFrame::new(*grid, Quantity::Density, self.echo(), FrameValues::Real(values))
    }
}

/// `⟨φ_k|x|φ_n⟩ = (4Lnk/π²)((−1)^{n+k} − 1)/(n² − k²)²` for `k ≠ n`.
pub fn position_matrix_element(n: u32, k: u32, l: f64) -> f64 {
    if (n + k).is_multiple_of(2) {
        return 0.0;
    }
    let (n, k) = (n as f64, k as f64);
    let d = n * n - k * k;
    -8.0 * l * n * k / (PI * PI * d * d)
}

/// `C_nk = f⟨φ_k|x|φ_n⟩/(E_n − E_k) = 8fL³nk((−1)^{n+k} − 1)/(π⁴(n² − k²)³)`.
pub fn perturbation_coefficient(n: u32, k: u32, l: f64, f: f64) -> f64 {
    if (n + k).is_multiple_of(2) {
        return 0.0;
    }
    let (nf, kf) = (n as f64, k as f64);
    let d = nf * nf - kf * kf;
    -16.0 * f * l * l * l * nf * kf / (PI.powi(4) * d * d * d)
}

/// The same coefficient with a single power of `k² − n²` in the denominator,
/// as it is sometimes quoted; kept for comparison reports only.
pub fn perturbation_coefficient_single_power(n: u32, k: u32, l: f64, f: f64) -> f64 {
    if (n + k).is_multiple_of(2) {
        return 0.0;
    }
    let (nf, kf) = (n as f64, k as f64);
    -16.0 * f * l * l * l * nf * kf / (PI.powi(4) * (kf * kf - nf * nf))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenstate_values() {
        let b1 = BoxScenario::new(4.0, 1, 0.0, 0.0).unwrap();
        assert!((b1.eigenstate(2.0) - (0.5f64).sqrt()).abs() < 1e-15);
        let b2 = BoxScenario::new(4.0, 2, 0.0, 0.0).unwrap();
        assert!(b2.eigenstate(2.0).abs() < 1e-15);
        assert_eq!(b2.eigenstate(-0.1), 0.0);
    }

    #[test]
    fn branch_momenta_split_by_twice_k_n() {
        let b = BoxScenario::new(80.0, 7, 0.3, 0.01).unwrap();
        for t in [0.0, 5.0, 500.0] {
            let m = b.branch_momentum(t);
            assert!((m.p_plus - m.p_minus - 2.0 * 7.0 * PI / 80.0).abs() < 1e-14);
        }
    }

    #[test]
    fn bifurcation_time_scales_as_inverse_n() {
        let t1 = BoxScenario::new(80.0, 1, 0.0, 0.0).unwrap().bifurcation_time();
        let t10 = BoxScenario::new(80.0, 10, 0.0, 0.0).unwrap().bifurcation_time();
        assert!((t1 / t10 - 10.0).abs() < 1e-12);
    }

    #[test]
    fn short_time_limit_is_the_eigenstate() {
        let b = BoxScenario::new(10.0, 3, 0.0, 0.0).unwrap();
        let t = 1e-4 * b.bifurcation_time();
        for x in [1.0, 2.5, 5.0, 8.2] {
            let e = b.eigenstate(x);
            assert!((b.density(x, t).unwrap() - e * e).abs() < 1e-3);
        }
    }

    #[test]
    fn parity_zeros_and_linearity() {
        assert_eq!(perturbation_coefficient(1, 3, 80.0, 0.01), 0.0);
        let c1 = perturbation_coefficient(1, 2, 80.0, 0.01);
        let c2 = perturbation_coefficient(1, 2, 80.0, 0.02);
        assert!((c2 - 2.0 * c1).abs() <= 1e-15 * c2.abs());
        let b = BoxScenario::new(80.0, 2, 0.0, 0.01).unwrap();
        assert!(b.perturbation_coefficients(1).is_err());
        let cs = b.perturbation_coefficients(5).unwrap();
        assert_eq!(cs.iter().map(|c| c.0).collect::<Vec<_>>(), vec![1, 3, 4, 5]);
    }
}
