//! Sampling lattices and sampled fields.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Upper bound on the number of grid points in one frame.
pub const MAX_GRID_POINTS: usize = 100_000_000;

/// Uniformly spaced samples `min, …, max` (endpoints included).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() {
            return invalid("axis bounds must be finite");
        }
        if n == 0 {
            return invalid("axis needs at least one sample");
        }
        if min > max || (n > 1 && min == max) {
            return invalid(format!("axis range [{min}, {max}] is not ordered"));
        }
        Ok(Axis { min, max, n })
    }

    pub fn single(value: f64) -> Self {
        Axis { min: value, max: value, n: 1 }
    }

    pub fn step(&self) -> f64 {
        if self.n > 1 {
            (self.max - self.min) / (self.n - 1) as f64
        } else {
            0.0
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.n == 1 {
            return self.min;
        }
        if i + 1 == self.n {
            return self.max;
        }
        self.min + (self.max - self.min) * (i as f64 / (self.n - 1) as f64)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.value(i)).collect()
    }
}

/// Meaning of the second grid axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondAxis {
    Time,
    Momentum,
}

/// Rectangular lattice over `x` and either `t` or `p`. Points are stored
/// with `x` varying fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x: Axis,
    pub y: Axis,
    pub y_kind: SecondAxis,
}

impl GridSpec {
    /// `(x, t)` lattice; evolution grids require `t_min > 0`.
    pub fn xt(x: Axis, t: Axis) -> Result<Self> {
        if !(t.min > 0.0) {
            return invalid(format!("time axis must start after t = 0, got {}", t.min));
        }
        Self::checked(GridSpec { x, y: t, y_kind: SecondAxis::Time })
    }

    /// `(x, p)` lattice.
    pub fn xp(x: Axis, p: Axis) -> Result<Self> {
        Self::checked(GridSpec { x, y: p, y_kind: SecondAxis::Momentum })
    }

    fn checked(g: GridSpec) -> Result<Self> {
        match g.x.n.checked_mul(g.y.n) {
            Some(n) if n <= MAX_GRID_POINTS => Ok(g),
            _ => invalid(format!("grid of {} x {} points exceeds the {MAX_GRID_POINTS} limit", g.x.n, g.y.n)),
        }
    }

    pub fn len(&self) -> usize {
        self.x.n * self.y.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(x, y)` coordinates of flat index `k`.
    pub fn point(&self, k: usize) -> (f64, f64) {
        (self.x.value(k % self.x.n), self.y.value(k / self.x.n))
    }

    /// Evaluates `f` at every point in parallel; the result is index-ordered.
    pub fn sample<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(f64, f64) -> Result<T> + Sync,
    {
        let xs = self.x.values();
        let nx = self.x.n;
        (0..self.len())
            .into_par_iter()
            .map(|k| f(xs[k % nx], self.y.value(k / nx)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Density,
    Amplitude,
    ClassicalDensity,
    Wigner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameValues {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl FrameValues {
    pub fn len(&self) -> usize {
        match self {
            FrameValues::Real(v) => v.len(),
            FrameValues::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Scenario echoed into frame metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioEcho {
    Shutter { p: f64, f: f64 },
    Wigner { p0: f64, f: f64, t: f64 },
    Box { l: f64, n: u32, q: f64, f: f64 },
    Tonks { l: f64, particles: u32, q: f64, f: f64 },
}

/// A field sampled on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldFrame {
    pub grid: GridSpec,
    pub quantity: Quantity,
    pub scenario: ScenarioEcho,
    pub values: FrameValues,
}

impl FieldFrame {
    pub fn new(grid: GridSpec, quantity: Quantity, scenario: ScenarioEcho, values: FrameValues) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!("{} values for a grid of {} points", values.len(), grid.len()));
        }
        let finite = match &values {
            FrameValues::Real(v) => v.iter().all(|x| x.is_finite()),
            FrameValues::Complex(v) => v.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
        };
        if !finite {
            return invalid("frame contains non-finite values");
        }
        Ok(FieldFrame { grid, quantity, scenario, values })
    }

    /// Real values, or `None` for amplitude frames.
    pub fn real(&self) -> Option<&[f64]> {
        match &self.values {
            FrameValues::Real(v) => Some(v),
            FrameValues::Complex(_) => None,
        }
    }

    /// Values at fixed second-axis index `j`, ordered by `x`.
    pub fn row(&self, j: usize) -> Option<&[f64]> {
        let nx = self.grid.x.n;
        self.real().map(|v| &v[j * nx..(j + 1) * nx])
    }
}
