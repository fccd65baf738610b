//! Tonks–Girardeau gas released from a hard-wall trap. Through the Fermi–Bose
//! map the density is the sum of the `N` lowest released single-particle
//! densities.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boxtrap::BoxScenario;
use crate::error::{invalid, Result};
use crate::grid::{FieldFrame, FrameValues, GridSpec, Quantity, ScenarioEcho};
use crate::quad::QuadratureReport;

/// Default fraction of the slice maximum below which peaks are ignored.
pub const DEFAULT_PEAK_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TgScenario {
    /// Particle number `N ≥ 1`.
    pub particles: u32,
    pub l: f64,
    pub q: f64,
    pub f: f64,
}

impl TgScenario {
    pub fn new(particles: u32, l: f64, q: f64, f: f64) -> Result<Self> {
        if particles == 0 {
            return invalid("particle number must be at least 1");
        }
        BoxScenario::new(l, 1, q, f)?;
        Ok(TgScenario { particles, l, q, f })
    }

    pub fn echo(&self) -> ScenarioEcho {
        ScenarioEcho::Tonks { l: self.l, particles: self.particles, q: self.q, f: self.f }
    }

    /// Single-particle mode `n` (1-based).
    pub fn mode(&self, n: u32) -> BoxScenario {
        BoxScenario { l: self.l, n, q: self.q, f: self.f }
    }

    /// `t_N = L²/(2Nπ)`.
    pub fn t_n(&self) -> f64 {
        self.l * self.l / (2.0 * PI * self.particles as f64)
    }

    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        (1..=self.particles).map(|n| self.mode(n).density(x, t)).sum()
    }

    /// `∫ρ dx`, summed over modes (each integrated adaptively, in parallel).
    pub fn norm(&self, t: f64) -> Result<QuadratureReport<f64>> {
        let parts: Vec<QuadratureReport<f64>> =
            (1..=self.particles).into_par_iter().map(|n| self.mode(n).norm(t)).collect::<Result<_>>()?;
        Ok(parts.iter().fold(QuadratureReport { value: 0.0, est_error: 0.0, evaluations: 0 }, |a, r| {
            QuadratureReport {
                value: a.value + r.value,
                est_error: a.est_error + r.est_error,
                evaluations: a.evaluations + r.evaluations,
            }
        }))
    }

    pub fn density_map(&self, grid: &GridSpec) -> Result<FieldFrame> {
        let values = grid.sample(|x, t| self.density(x, t))?;
        FieldFrame::new(*grid, Quantity::Density, self.echo(), FrameValues::Real(values))
    }
}

/// Number of interior local maxima of `slice` above `threshold·max(slice)`.
/// Runs of equal samples count once; endpoints never count.
pub fn peak_count(slice: &[f64], threshold: f64) -> Result<usize> {
    if slice.is_empty() {
        return invalid("peak_count needs a non-empty slice");
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return invalid(format!("threshold fraction must lie in (0, 1), got {threshold}"));
    }
    let level = threshold * slice.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut count = 0;
    let mut i = 1;
    while i + 1 < slice.len() {
        // Extend across a plateau.
        let mut j = i;
        while j + 1 < slice.len() && slice[j + 1] == slice[i] {
            j += 1;
        }
        if j + 1 < slice.len() && slice[i] > slice[i - 1] && slice[i] > slice[j + 1] && slice[i] > level {
            count += 1;
        }
        i = j + 1;
    }
    Ok(count)
}
