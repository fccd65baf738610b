//! Wigner function of the released cut-off plane wave.
//!
//! For a linear potential the Wigner function is carried rigidly along the
//! classical flow, so the evolved function is the initial one evaluated at the
//! pulled-back phase-space point `x₀ = x − pt − ft²/2`, `p_i = p + ft`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::{FieldFrame, FrameValues, GridSpec, Quantity, ScenarioEcho, SecondAxis};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerPoint {
    pub x: f64,
    pub p: f64,
    pub p0: f64,
    pub f: f64,
    pub t: f64,
}

/// `W₀ = sin(−2x(p₀−p)) / (π(p₀−p)) Θ(−x)`; at `p = p₀` the limit `−2x/π`.
pub fn wigner_initial(x: f64, p: f64, p0: f64) -> f64 {
    if x >= 0.0 {
        return 0.0;
    }
    let dp = p0 - p;
    if dp.abs() < 1e-12 * p0.abs().max(1.0) {
        return -2.0 * x / PI;
    }
    (-2.0 * x * dp).sin() / (PI * dp)
}

/// Evolved Wigner function, zero outside the classically reachable region
/// `x < pt + ft²/2`.
pub fn wigner_evolved(pt: WignerPoint) -> f64 {
    let WignerPoint { x, p, p0, f, t } = pt;
    let x0 = x - p * t - 0.5 * f * t * t;
    wigner_initial(x0, p + f * t, p0)
}

/// Classical limit: a delta on the shell `p = p₀ − ft` times the step
/// behind the classical front.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalWigner {
    pub on_shell: bool,
    /// Weight of the delta function, 0 or 1.
    pub weight: u8,
}

pub fn wigner_classical(x: f64, p: f64, p0: f64, f: f64, t: f64) -> ClassicalWigner {
    let on_shell = (p - (p0 - f * t)).abs() <= 1e-9;
    let front = p0 * t - 0.5 * f * t * t;
    ClassicalWigner { on_shell, weight: u8::from(on_shell && x < front) }
}

/// Wigner function sampled on an `(x, p)` grid at time `t ≥ 0`.
pub fn wigner_map(p0: f64, f: f64, t: f64, grid: &GridSpec) -> Result<FieldFrame> {
    if grid.y_kind != SecondAxis::Momentum {
        return invalid("wigner_map needs an (x, p) grid");
    }
    if !(t >= 0.0) || !p0.is_finite() || !f.is_finite() {
        return invalid("wigner_map needs finite p0, f and t ≥ 0");
    }
    let values = grid.sample(|x, p| Ok(wigner_evolved(WignerPoint { x, p, p0, f, t })))?;
    FieldFrame::new(*grid, Quantity::Wigner, ScenarioEcho::Wigner { p0, f, t }, FrameValues::Real(values))
}
