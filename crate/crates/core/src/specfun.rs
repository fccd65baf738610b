//! Complex special functions: the Faddeyeva function `w(z)`, Fresnel
//! integrals and the Moshinsky function.
//!
//! `w` is evaluated in the closed upper half-plane by one of two routes:
//!
//! * the Maclaurin series `w(z) = Σ (iz)^n / Γ(n/2 + 1)` for `|z| < 6`,
//!   summed in double-double arithmetic because its terms grow like
//!   `exp(|z|²)` before they decay;
//! * the Laplace continued fraction
//!   `w(z) = (i/√π) / (z − ½/(z − 1/(z − 3/2/(z − …))))` for `|z| ≥ 6` and
//!   for the part of the annulus `3 ≤ |z| < 6` away from the real axis, where
//!   it converges in a few dozen steps.
//!
//! The lower half-plane always goes through `w(z) = 2 exp(−z²) − w(−z)`.
//!
//! The Fresnel integrals are computed without reference to `w`: a real
//! double-double power series below `|u| = 4.5` and the auxiliary-function
//! asymptotic expansion above it.

use std::f64::consts::{FRAC_2_SQRT_PI, FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::{two_prod, Dd, DdComplex};
use crate::error::{invalid, Error, Result};

/// Complex amplitude type used throughout the crate.
pub type ComplexValue = Complex64;

const TWO_OVER_SQRT_PI: Dd = Dd::new(FRAC_2_SQRT_PI, 1.533_545_961_316_588e-17);
const HALF_PI_DD: Dd = Dd::new(FRAC_PI_2, 6.123_233_995_736_766e-17);
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Series/continued-fraction boundary.
const CF_RADIUS: f64 = 6.0;
/// Inner radius of the off-axis continued-fraction wedge.
const CF_WEDGE_RADIUS: f64 = 3.0;
const CF_MAX_TERMS: usize = 400;
const SERIES_MAX_TERMS: f64 = 1000.0;
/// Beyond this radius three asymptotic terms are exact to rounding.
const ASYMPTOTIC_RADIUS: f64 = 1e4;

const FRESNEL_SERIES_LIMIT: f64 = 4.5;

/// Faddeyeva function `w(z) = exp(−z²) erfc(−iz)`.
///
/// Relative error is below `1e-13` in the closed upper half-plane. In the
/// lower half-plane the value inherits the absolute error of
/// `2 exp(−z²)`; when that factor is not representable an
/// [`Error::Overflow`] is returned.
pub fn faddeyeva(z: ComplexValue) -> Result<ComplexValue> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite);
    }
    if z.im >= 0.0 {
        return Ok(w_upper(z));
    }
    let e = exp_neg_square(z)?;
    Ok(2.0 * e - w_upper(-z))
}

/// `exp(−z²)`, with overflow reported rather than returned as infinity.
pub fn exp_neg_square(z: ComplexValue) -> Result<ComplexValue> {
    // Re(−z²) = (y − x)(y + x) avoids overflowing the squares.
    let log_modulus = (z.im - z.re) * (z.im + z.re);
    // Headroom for the factor 2 in the reflection identity.
    if log_modulus > f64::MAX.ln() - std::f64::consts::LN_2 {
        return Err(Error::Overflow { re: z.re, im: z.im });
    }
    let phase = -2.0 * z.re * z.im;
    Ok(Complex64::from_polar(log_modulus.exp(), phase))
}

fn w_upper(z: ComplexValue) -> ComplexValue {
    let r = z.norm();
    if r >= ASYMPTOTIC_RADIUS {
        // w ~ (i/√π) z⁻¹ (1 + 1/(2z²) + 3/(4z⁴))
        let u = z.inv();
        let u2 = u * u;
        return Complex64::new(0.0, FRAC_1_SQRT_PI) * u * (1.0 + 0.5 * u2 * (1.0 + 1.5 * u2));
    }
    let use_cf = r >= CF_RADIUS || (r >= CF_WEDGE_RADIUS && z.im >= 0.5 * z.re.abs());
    if use_cf {
        if let Some(w) = w_continued_fraction(z) {
            return w;
        }
    }
    w_series(z)
}

/// Maclaurin series split into even and odd powers:
/// `w = Σ v^m/m! + (2i/√π) z Σ v^m/(3/2)_m` with `v = −z²`.
fn w_series(z: ComplexValue) -> ComplexValue {
    let (x, y) = (z.re, z.im);
    let x2 = Dd::from_prod(x, x);
    let y2 = Dd::from_prod(y, y);
    let v = DdComplex::new(y2 - x2, Dd::from_prod(-2.0 * x, y));
    let v_abs = v.re.abs_approx().hypot(v.im.abs_approx());
    let z_abs = z.norm();

    let mut even = DdComplex::ONE;
    let mut odd = DdComplex::ONE;
    let mut even_sum = even;
    let mut odd_sum = odd;
    let mut m = 1.0_f64;
    loop {
        even = even.mul(v).div_f64(m);
        odd = odd.mul(v).div_f64(m + 0.5);
        even_sum = even_sum.add(even);
        odd_sum = odd_sum.add(odd);
        // |w| > 0.09 on |z| ≤ 6 in the closed upper half-plane.
        if m > v_abs && even.l1_approx() + z_abs * odd.l1_approx() < 1e-20 {
            break;
        }
        // Guards the loop against arguments far outside the series region.
        if m > SERIES_MAX_TERMS {
            break;
        }
        m += 1.0;
    }

    let iz = DdComplex::new(Dd::from(-y), Dd::from(x));
    let odd_part = iz.mul(odd_sum).scale(TWO_OVER_SQRT_PI);
    let w = even_sum.add(odd_part);
    Complex64::new(w.re.to_f64(), w.im.to_f64())
}

/// Modified Lentz evaluation of the Laplace continued fraction. Returns
/// `None` if it has not settled within [`CF_MAX_TERMS`].
fn w_continued_fraction(z: ComplexValue) -> Option<ComplexValue> {
    const TINY: f64 = 1e-300;
    let tiny = Complex64::new(TINY, 0.0);
    let mut f = if z == Complex64::new(0.0, 0.0) { tiny } else { z };
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..=CF_MAX_TERMS {
        let a = -0.5 * k as f64;
        d = z + a * d;
        if d == Complex64::new(0.0, 0.0) {
            d = tiny;
        }
        c = z + a / c;
        if c == Complex64::new(0.0, 0.0) {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-15 {
            return Some(Complex64::new(0.0, FRAC_1_SQRT_PI) / f);
        }
    }
    None
}

/// Complementary error function of complex argument, `erfc(z) = exp(−z²) w(iz)`.
pub fn erfc_complex(z: ComplexValue) -> Result<ComplexValue> {
    let w = faddeyeva(Complex64::new(-z.im, z.re))?;
    // exp(−z²) overflow is only possible when w(iz) underflows, which happens
    // far in the right half-plane where erfc(z) → 0 anyway.
    match exp_neg_square(z) {
        Ok(e) => Ok(e * w),
        Err(Error::Overflow { .. }) if z.re > 0.0 => Ok(Complex64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

/// Fresnel integrals `(C(u), S(u))` with `C(u) = ∫₀ᵘ cos(πs²/2) ds` and
/// `S(u) = ∫₀ᵘ sin(πs²/2) ds`. Absolute error below `1e-14`.
pub fn fresnel(u: f64) -> Result<(f64, f64)> {
    if !u.is_finite() {
        return Err(Error::NonFinite);
    }
    let a = u.abs();
    let (c, s) = if a < FRESNEL_SERIES_LIMIT {
        fresnel_series(a)
    } else {
        fresnel_asymptotic(a)
    };
    Ok(if u < 0.0 { (-c, -s) } else { (c, s) })
}

/// `C + iS = x Σ (iv)^k / (k! (2k+1))` with `v = πx²/2`.
fn fresnel_series(x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 0.0);
    }
    let v = Dd::from_prod(x, x) * HALF_PI_DD;
    let v_abs = v.to_f64();
    let mut term = Dd::ONE;
    let mut c = Dd::ONE;
    let mut s = Dd::ZERO;
    let mut k = 1usize;
    loop {
        term = (term * v).div_f64(k as f64);
        let contrib = term.div_f64((2 * k + 1) as f64);
        match k % 4 {
            0 => c = c + contrib,
            1 => s = s + contrib,
            2 => c = c - contrib,
            _ => s = s - contrib,
        }
        if k as f64 > v_abs && contrib.abs_approx() < 1e-19 {
            break;
        }
        k += 1;
    }
    ((c.mul_f64(x)).to_f64(), (s.mul_f64(x)).to_f64())
}

/// `C = ½ + f sin(πx²/2) − g cos(πx²/2)`, `S = ½ − f cos(πx²/2) − g sin(πx²/2)`
/// with the auxiliary functions summed to their smallest term.
fn fresnel_asymptotic(x: f64) -> (f64, f64) {
    let (sin, cos) = sin_cos_half_pi_square(x);
    if x > 1e16 {
        // f < 1e-17 here.
        return (0.5, 0.5);
    }
    let big = PI * x * x;
    let inv_big2 = 1.0 / (big * big);

    // f ~ (1/(πx)) Σ (−1)^m (4m−1)!! / (πx²)^{2m}
    let mut f_sum = 1.0;
    let mut term = 1.0_f64;
    let mut m = 1.0_f64;
    loop {
        let next = term * (4.0 * m - 3.0) * (4.0 * m - 1.0) * inv_big2;
        if next >= term || next < 1e-18 {
            break;
        }
        term = next;
        f_sum += if (m as u64) % 2 == 1 { -term } else { term };
        m += 1.0;
    }
    // g ~ (1/(π²x³)) Σ (−1)^m (4m+1)!! / (πx²)^{2m}
    let mut g_sum = 1.0;
    let mut term = 1.0_f64;
    let mut m = 1.0_f64;
    loop {
        let next = term * (4.0 * m - 1.0) * (4.0 * m + 1.0) * inv_big2;
        if next >= term || next < 1e-18 {
            break;
        }
        term = next;
        g_sum += if (m as u64) % 2 == 1 { -term } else { term };
        m += 1.0;
    }
    let f = f_sum / (PI * x);
    let g = g_sum / (PI * PI * x * x * x);
    (0.5 + f * sin - g * cos, 0.5 - f * cos - g * sin)
}

/// `(sin(πx²/2), cos(πx²/2))` with `x²` reduced modulo 4 exactly.
pub(crate) fn sin_cos_half_pi_square(x: f64) -> (f64, f64) {
    let (hi, lo) = two_prod(x, x);
    let r = (hi % 4.0 + lo % 4.0) % 4.0;
    (FRAC_PI_2 * r).sin_cos()
}

/// Arguments of the Moshinsky function in `ħ = m = 1` units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoshinskyArgs {
    /// Position.
    pub x: f64,
    /// Wavenumber of the incident plane wave.
    pub k: f64,
    /// Time `ħt/m`; must be positive.
    pub tau: f64,
}

/// Moshinsky function `M(x, k, τ) = ½ exp(ix²/2τ) w(−z)`,
/// `z = ((1+i)/2) √τ (k − x/τ)`.
///
/// This is the free evolution of the cut-off plane wave `exp(ikx) Θ(−x)`.
pub fn moshinsky(args: MoshinskyArgs) -> Result<ComplexValue> {
    let parts = moshinsky_split(args)?;
    Ok(match parts.illuminated {
        true => parts.plane(args) + parts.diffracted,
        false => parts.diffracted,
    })
}

/// `M` split into the geometric plane wave, present only on the illuminated
/// side `x < kτ`, and the diffracted remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoshinskySplit {
    pub illuminated: bool,
    pub diffracted: ComplexValue,
}

impl MoshinskySplit {
    /// The plane wave `exp(i(kx − k²τ/2))`.
    pub fn plane(&self, args: MoshinskyArgs) -> ComplexValue {
        Complex64::from_polar(1.0, args.k * (args.x - 0.5 * args.k * args.tau))
    }
}

/// Splitting off the plane wave lets callers cancel geometric parts exactly;
/// it also avoids the large phases `x²/2τ` and `−2s²` cancelling numerically
/// on the illuminated side, where `w(−z) = 2e^{−z²} − w(z)`.
pub fn moshinsky_split(args: MoshinskyArgs) -> Result<MoshinskySplit> {
    let MoshinskyArgs { x, k, tau } = args;
    if !(tau > 0.0) {
        return invalid(format!("moshinsky: tau must be positive, got {tau}"));
    }
    if !x.is_finite() || !k.is_finite() || !tau.is_finite() {
        return Err(Error::NonFinite);
    }
    let s = 0.5 * tau.sqrt() * (k - x / tau);
    let chirp = Complex64::from_polar(0.5, x * x / (2.0 * tau));
    if s <= 0.0 {
        return Ok(MoshinskySplit { illuminated: false, diffracted: chirp * faddeyeva(Complex64::new(-s, -s))? });
    }
    Ok(MoshinskySplit { illuminated: true, diffracted: -chirp * faddeyeva(Complex64::new(s, s))? })
}
