//! Globally adaptive Gauss–Kronrod (10/21) quadrature for complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Result of a numerical integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureReport<T = Complex64> {
    pub value: T,
    /// Estimated absolute error; always ≥ 0.
    pub est_error: f64,
    /// Number of integrand evaluations.
    pub evaluations: usize,
}

impl QuadratureReport<Complex64> {
    /// Real part of the value, keeping the error estimate.
    pub fn re(self) -> QuadratureReport<f64> {
        QuadratureReport { value: self.value.re, est_error: self.est_error, evaluations: self.evaluations }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_evaluations: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel, max_evaluations: 2_000_000 }
    }

    pub fn with_budget(mut self, max_evaluations: usize) -> Self {
        self.max_evaluations = max_evaluations;
        self
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed Kronrod nodes `XGK[1], XGK[3], …`.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    /// Rounding-error floor of the rule on this panel.
    floor: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut abs_sum = fc.norm() * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut fv = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = (f1, f2);
        kronrod += (f1 + f2) * WGK[j];
        abs_sum += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = (fc - mean).norm() * WGK[10];
    for j in 0..10 {
        asc += ((fv[j].0 - mean).norm() + (fv[j].1 - mean).norm()) * WGK[j];
    }
    let h = half.abs();
    let asc = asc * h;
    let abs_sum = abs_sum * h;
    let mut err = ((kronrod - gauss) * half).norm();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * abs_sum;
    err = err.max(floor);
    (kronrod * half, err, floor)
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, starting from the given
/// panels and bisecting the panel with the largest error estimate until the
/// total estimate is below `max(tol.abs, tol.rel·|I|)`.
pub fn integrate_panels<F>(mut f: F, breaks: &[f64], tol: Tolerance) -> Result<QuadratureReport>
where
    F: FnMut(f64) -> Complex64,
{
    if breaks.len() < 2 {
        return invalid("integration needs at least two break points");
    }
    if breaks.iter().any(|b| !b.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut heap = BinaryHeap::with_capacity(2 * breaks.len());
    let mut evaluations = 0usize;
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        let (value, error, floor) = gk21(&mut f, w[0], w[1]);
        evaluations += 21;
        total += value;
        total_err += error;
        heap.push(Segment { a: w[0], b: w[1], value, error, floor });
    }
    loop {
        let target = tol.abs.max(tol.rel * total.norm());
        if total_err <= target {
            break;
        }
        if evaluations + 42 > tol.max_evaluations {
            return Err(Error::NoConvergence { evaluations, est_error: total_err });
        }
        if heap.peek().is_some_and(|s| s.error <= s.floor) {
            // Only rounding error is left; the estimate is the attainable accuracy.
            break;
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel can no longer be split in floating point.
            return Err(Error::NoConvergence { evaluations, est_error: total_err });
        }
        let (v1, e1, r1) = gk21(&mut f, worst.a, mid);
        let (v2, e2, r2) = gk21(&mut f, mid, worst.b);
        evaluations += 42;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1, floor: r1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2, floor: r2 });
    }
    // Re-sum to shed the drift of the incremental updates.
    let value = heap.iter().map(|s| s.value).sum();
    let est_error = heap.iter().map(|s| s.error).sum::<f64>().max(0.0);
    Ok(QuadratureReport { value, est_error, evaluations })
}

/// Real-valued convenience wrapper around [`integrate_panels`].
pub fn integrate_real<F>(mut f: F, breaks: &[f64], tol: Tolerance) -> Result<QuadratureReport<f64>>
where
    F: FnMut(f64) -> f64,
{
    integrate_panels(|x| Complex64::new(f(x), 0.0), breaks, tol).map(QuadratureReport::re)
}

/// Integral over the whole real line of a function concentrated in
/// `[center − half_width, center + half_width]`.
///
/// The core interval is split into `panels` pieces; each tail is mapped to
/// `(0, 1)` by `x = edge ± half_width·s/(1 − s)`, which handles algebraic decay.
pub fn integrate_real_line<F>(
    mut f: F,
    center: f64,
    half_width: f64,
    panels: usize,
    tol: Tolerance,
) -> Result<QuadratureReport<f64>>
where
    F: FnMut(f64) -> f64,
{
    if !(half_width > 0.0) || panels == 0 {
        return invalid("integrate_real_line: half_width and panels must be positive");
    }
    let lo = center - half_width;
    let hi = center + half_width;
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| lo + (hi - lo) * i as f64 / panels as f64)
        .collect();
    let core = integrate_real(&mut f, &breaks, tol)?;
    let tail_tol = Tolerance { abs: tol.abs * 0.25, ..tol };
    let tail = |sign: f64, edge: f64, f: &mut F| {
        integrate_real(
            |s| {
                if s >= 1.0 {
                    return 0.0;
                }
                let one_minus = 1.0 - s;
                let x = edge + sign * half_width * s / one_minus;
                f(x) * half_width / (one_minus * one_minus)
            },
            &[0.0, 0.5, 0.9, 1.0],
            tail_tol,
        )
    };
    let right = tail(1.0, hi, &mut f)?;
    let left = tail(-1.0, lo, &mut f)?;
    Ok(QuadratureReport {
        value: core.value + left.value + right.value,
        est_error: core.est_error + left.est_error + right.est_error,
        evaluations: core.evaluations + left.evaluations + right.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate_real(|x| x.powi(7) - 3.0 * x * x, &[0.0, 2.0], Tolerance::new(1e-14, 0.0)).unwrap();
        assert!((r.value - (32.0 - 8.0)).abs() < 1e-12);
        assert!(r.est_error < 1e-11);
        assert_eq!(r.evaluations, 21);
    }

    #[test]
    fn oscillatory_complex() {
        // ∫₀^{10π} e^{ix} dx = 0 · … exactly (e^{10πi} − 1)/i = 0
        let r = integrate_panels(|x| Complex64::from_polar(1.0, x), &[0.0, 10.0 * PI], Tolerance::new(1e-12, 0.0)).unwrap();
        assert!(r.value.norm() < 1e-11);
        assert!(r.est_error <= 1e-12);
    }

    #[test]
    fn whole_line_lorentzian() {
        let r = integrate_real_line(|x| 1.0 / (1.0 + x * x), 0.0, 5.0, 4, Tolerance::new(1e-12, 0.0)).unwrap();
        assert!((r.value - PI).abs() < 1e-11, "{}", r.value);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = integrate_real(|x| (1.0 / x).sin(), &[1e-8, 1.0], Tolerance::new(1e-14, 0.0).with_budget(500));
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }
}
