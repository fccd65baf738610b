//! Figure scenarios, converted to internal units for rubidium at a 1 µm
//! length scale.

use crate::boxtrap::BoxScenario;
use crate::shutter::ShutterScenario;
use crate::tonks::TgScenario;
use crate::units::{MassPreset, PhysicalConstants, QuantityKind, UnitSystem};

pub const LENGTH_SCALE: f64 = 1e-6;

pub fn rb_units() -> UnitSystem {
    UnitSystem::new(MassPreset::Rb.kg(), LENGTH_SCALE).expect("positive constants")
}

fn velocity_cm_s(v: f64) -> f64 {
    rb_units().to_internal(v * 1e-2, QuantityKind::Velocity)
}

fn acceleration_cm_s2(a: f64) -> f64 {
    rb_units().to_internal(a * 1e-2, QuantityKind::Acceleration)
}

fn micrometres(l: f64) -> f64 {
    rb_units().to_internal(l * 1e-6, QuantityKind::Length)
}

/// Fountain: `p/m = 1 cm/s`, `a = 0.1 g`.
pub fn fountain() -> ShutterScenario {
    let g_cm = PhysicalConstants::SI.gravity_g * 100.0;
    ShutterScenario { p: velocity_cm_s(1.0), f: acceleration_cm_s2(0.1 * g_cm) }
}

/// Detector signal: `p/m = 10 cm/s`, `a = 0.05 cm/s²`, detector at 5 mm.
/// Returns the scenario and the detector position.
pub fn detector() -> (ShutterScenario, f64) {
    let s = ShutterScenario { p: velocity_cm_s(10.0), f: acceleration_cm_s2(0.05) };
    (s, micrometres(5000.0))
}

/// Wigner fountain `p₀/m = 1 cm/s`, `a = 100 cm/s²` at its turning point
/// (10 ms). Returns `(p₀, f, t)`.
pub fn wigner_fountain() -> (f64, f64, f64) {
    let p0 = velocity_cm_s(1.0);
    let f = acceleration_cm_s2(100.0);
    (p0, f, p0 / f)
}

/// `n = 10` eigenstate of an 80 µm trap falling at `a = 0.49 cm/s²`.
pub fn box_release() -> BoxScenario {
    BoxScenario { l: micrometres(80.0), n: 10, q: 0.0, f: acceleration_cm_s2(0.49) }
}

/// Ten-atom Tonks–Girardeau gas in the same trap and field as [`box_release`].
pub fn tonks_release() -> TgScenario {
    let b = box_release();
    TgScenario { particles: 10, l: b.l, q: 0.0, f: b.f }
}
