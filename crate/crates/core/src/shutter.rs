//! Cut-off plane wave `e^{ipx} Θ(−x)` released at `t = 0` into the linear
//! potential `V = f x` (internal units).
//!
//! The density depends on `(x, t)` only through
//! `u₀ = √(t/π)(p − ft/2) − x/√(πt)`, so all fringe diagnostics reduce to the
//! universal profile `P(u₀)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::{Axis, FieldFrame, FrameValues, GridSpec, Quantity, ScenarioEcho};
use crate::specfun::{faddeyeva, moshinsky, ComplexValue, MoshinskyArgs};

/// `u₀` of the first density maximum behind the front.
pub const U_MAX: f64 = 1.2172;
/// `u₀` of the first density minimum behind the front.
pub const U_MIN: f64 = 1.8725;
/// Coefficient of the main-fringe width `Δx = 0.85 √(πt)`.
pub const FRINGE_WIDTH_COEFF: f64 = 0.85;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShutterScenario {
    /// Initial momentum.
    pub p: f64,
    /// Force constant; `V = f x`.
    pub f: f64,
}

impl ShutterScenario {
    pub fn new(p: f64, f: f64) -> Result<Self> {
        if !p.is_finite() || !f.is_finite() {
            return invalid("shutter scenario parameters must be finite");
        }
        Ok(ShutterScenario { p, f })
    }

    pub fn echo(&self) -> ScenarioEcho {
        ScenarioEcho::Shutter { p: self.p, f: self.f }
    }

    /// Classical front `x_cl(t) = pt − ft²/2`.
    pub fn front(&self, t: f64) -> f64 {
        self.p * t - 0.5 * self.f * t * t
    }

    /// Time at which the classical front turns around, if it does.
    pub fn turning_time(&self) -> Option<f64> {
        (self.p * self.f > 0.0).then(|| self.p / self.f)
    }

    pub fn u0_of(&self, x: f64, t: f64) -> f64 {
        (t / PI).sqrt() * (self.p - 0.5 * self.f * t) - x / (PI * t).sqrt()
    }

    /// Position at which `u₀` takes the value `u` at time `t`.
    pub fn x_of_u0(&self, u: f64, t: f64) -> f64 {
        self.front(t) - (PI * t).sqrt() * u
    }

    /// Wave function `ψ = e^{−i(f²t³/6 + ftx)} M(x + ft²/2, p, t)`.
    pub fn psi_linear(&self, x: f64, t: f64) -> Result<ComplexValue> {
        if !(t > 0.0) {
            return invalid(format!("psi_linear needs t > 0, got {t}"));
        }
        let f = self.f;
        let m = moshinsky(MoshinskyArgs { x: x + 0.5 * f * t * t, k: self.p, tau: t })?;
        if f == 0.0 {
            return Ok(m);
        }
        let phase = -(f * f * t * t * t / 6.0 + f * t * x);
        Ok(Complex64::from_polar(1.0, phase) * m)
    }

    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.psi_linear(x, t)?.norm_sqr())
    }

    /// `Θ(pt − ft²/2 − x)`.
    pub fn classical_density(&self, x: f64, t: f64) -> f64 {
        if x < self.front(t) {
            1.0
        } else {
            0.0
        }
    }

    /// Positions `(x_max, x_min)` of the first fringe maximum and minimum.
    pub fn fringe_trajectories(&self, t: f64) -> (f64, f64) {
        (self.x_of_u0(U_MAX, t), self.x_of_u0(U_MIN, t))
    }

    /// Visibility `(P_max − P_min)/(P_max + P_min)` of the first fringe at time `t`.
    pub fn visibility(&self, t: f64) -> Result<f64> {
        let (x_max, x_min) = self.fringe_trajectories(t);
        let p_max = self.density(x_max, t)?;
        let p_min = self.density(x_min, t)?;
        Ok((p_max - p_min) / (p_max + p_min))
    }

    pub fn density_map(&self, grid: &GridSpec) -> Result<FieldFrame> {
        let values = grid.sample(|x, t| self.density(x, t))?;
        FieldFrame::new(*grid, Quantity::Density, self.echo(), FrameValues::Real(values))
    }

    pub fn amplitude_map(&self, grid: &GridSpec) -> Result<FieldFrame> {
        let values = grid.sample(|x, t| self.psi_linear(x, t))?;
        FieldFrame::new(*grid, Quantity::Amplitude, self.echo(), FrameValues::Complex(values))
    }

    pub fn classical_density_map(&self, grid: &GridSpec) -> Result<FieldFrame> {
        let values = grid.sample(|x, t| Ok(self.classical_density(x, t)))?;
        FieldFrame::new(*grid, Quantity::ClassicalDensity, self.echo(), FrameValues::Real(values))
    }

    /// Density time series at a fixed detector position.
    pub fn detector_signal(&self, x_det: f64, t: Axis) -> Result<FieldFrame> {
        let grid = GridSpec::xt(Axis::single(x_det), t)?;
        self.density_map(&grid)
    }
}

/// Width `0.85 √(πt)` of the main fringe.
pub fn fringe_width(t: f64) -> f64 {
    FRINGE_WIDTH_COEFF * (PI * t).sqrt()
}

/// Universal density profile `P(u₀) = ¼ |w(−(√π/2)(1+i) u₀)|²`.
pub fn universal_density(u0: f64) -> Result<f64> {
    let s = 0.5 * PI.sqrt() * u0;
    Ok(0.25 * faddeyeva(Complex64::new(-s, -s))?.norm_sqr())
}

/// Golden-section search for an extremum of [`universal_density`] in `[lo, hi]`.
/// Returns `(u₀, P(u₀))`.
pub fn refine_extremum(lo: f64, hi: f64, maximize: bool) -> Result<(f64, f64)> {
    let sign = if maximize { -1.0 } else { 1.0 };
    let g = |u: f64| universal_density(u).map(|p| sign * p);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    while b - a > 1e-10 {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d)?;
        }
    }
    let u = 0.5 * (a + b);
    Ok((u, universal_density(u)?))
}

/// First maximum and minimum of the universal profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeExtrema {
    pub u_max: f64,
    pub p_max: f64,
    pub u_min: f64,
    pub p_min: f64,
}

impl FringeExtrema {
    pub fn visibility(&self) -> f64 {
        (self.p_max - self.p_min) / (self.p_max + self.p_min)
    }
}

/// Numerically refined first fringe extrema.
pub fn universal_extrema() -> Result<FringeExtrema> {
    let (u_max, p_max) = refine_extremum(0.9, 1.5, true)?;
    let (u_min, p_min) = refine_extremum(1.55, 2.1, false)?;
    Ok(FringeExtrema { u_max, p_max, u_min, p_min })
}

fn bisect_unit_density(mut lo: f64, mut hi: f64) -> Result<f64> {
    let f_lo = universal_density(lo)? - 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = universal_density(mid)? - 1.0;
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The two `u₀` values bracketing the main fringe where the quantum density
/// crosses the classical value 1.
pub fn main_fringe_crossings() -> Result<(f64, f64)> {
    let ext = universal_extrema()?;
    Ok((bisect_unit_density(0.0, ext.u_max)?, bisect_unit_density(ext.u_max, ext.u_min)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u0_examples() {
        let s = ShutterScenario::new(1.3, 0.4).unwrap();
        assert!(s.u0_of(s.front(2.5), 2.5).abs() < 1e-15);
        let free = ShutterScenario::new(1.0, 0.0).unwrap();
        assert!((free.u0_of(0.0, PI) - 1.0).abs() < 1e-15);
        let (x_max, _) = s.fringe_trajectories(3.0);
        assert!((s.u0_of(x_max, 3.0) - U_MAX).abs() < 1e-12);
    }

    #[test]
    fn front_density_is_one_quarter() {
        let s = ShutterScenario::new(2.0, -0.7).unwrap();
        for t in [0.01, 1.0, 37.0] {
            let d = s.density(s.front(t), t).unwrap();
            assert!((d - 0.25).abs() < 1e-14, "{d}");
        }
    }

    #[test]
    fn free_case_is_the_moshinsky_function() {
        let s = ShutterScenario::new(0.8, 0.0).unwrap();
        let m = moshinsky(MoshinskyArgs { x: -1.3, k: 0.8, tau: 2.0 }).unwrap();
        assert_eq!(s.psi_linear(-1.3, 2.0).unwrap(), m);
    }

    #[test]
    fn extrema_and_visibility() {
        let e = universal_extrema().unwrap();
        assert!((e.u_max - 1.2172).abs() < 1e-3 && (e.p_max - 1.370).abs() < 1e-3);
        assert!((e.u_min - 1.8725).abs() < 1e-3 && (e.p_min - 0.778).abs() < 1e-3);
        assert!((e.visibility() - 0.2756).abs() < 1e-3);
        let s = ShutterScenario::new(1.0, 0.3).unwrap();
        let v1 = s.visibility(1.0).unwrap();
        assert!((v1 - s.visibility(10.0).unwrap()).abs() < 1e-6);
        assert!((v1 - ShutterScenario::new(1.0, 0.0).unwrap().visibility(1.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn fringe_width_formula_and_crossings() {
        assert!((fringe_width(1.0) - 1.5066).abs() < 1e-4);
        assert!((fringe_width(4.0) / fringe_width(1.0) - 2.0).abs() < 1e-15);
        let (a, b) = main_fringe_crossings().unwrap();
        assert!(((b - a) / FRINGE_WIDTH_COEFF - 1.0).abs() < 0.02, "{a} {b}");
    }

    #[test]
    fn classical_density_is_a_step() {
        let s = ShutterScenario::new(1.0, 0.1).unwrap();
        let t = 2.0;
        assert_eq!(s.classical_density(s.front(t) - 1e-9, t), 1.0);
        assert_eq!(s.classical_density(s.front(t) + 1e-9, t), 0.0);
    }

    #[test]
    fn rejects_non_positive_time() {
        let s = ShutterScenario::new(1.0, 0.1).unwrap();
        assert!(s.psi_linear(0.0, 0.0).is_err());
    }
}
