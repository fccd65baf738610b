//! SI ↔ internal units. Internally `ħ = m = 1` and lengths are measured in a
//! per-scenario length scale `ℓ`; the time unit is then `mℓ²/ħ`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Atomic mass constant in kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// J·s
    pub hbar: f64,
    /// m/s²; the conventional round value 9.8.
    pub gravity_g: f64,
    /// kg
    pub mass_rb87: f64,
}

impl PhysicalConstants {
    pub const SI: PhysicalConstants = PhysicalConstants {
        hbar: 1.054_571_817e-34,
        gravity_g: 9.8,
        mass_rb87: 86.909_180_527 * ATOMIC_MASS_UNIT,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::SI
    }
}

/// Atomic mass presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassPreset {
    /// ⁸⁷Rb, 86.909 u.
    Rb87,
    /// Rubidium at its standard atomic weight, 85.4678 u.
    Rb,
}

impl MassPreset {
    pub fn kg(self) -> f64 {
        match self {
            MassPreset::Rb87 => PhysicalConstants::SI.mass_rb87,
            MassPreset::Rb => 85.4678 * ATOMIC_MASS_UNIT,
        }
    }
}

impl FromStr for MassPreset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rb87" | "rb-87" => Ok(MassPreset::Rb87),
            "rb" => Ok(MassPreset::Rb),
            _ => invalid(format!("unknown mass preset `{s}` (expected rb or rb87)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantityKind {
    Length,
    Time,
    Velocity,
    Acceleration,
    Momentum,
    Force,
}

impl QuantityKind {
    pub const ALL: [QuantityKind; 6] = [
        QuantityKind::Length,
        QuantityKind::Time,
        QuantityKind::Velocity,
        QuantityKind::Acceleration,
        QuantityKind::Momentum,
        QuantityKind::Force,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QuantityKind::Length => "length",
            QuantityKind::Time => "time",
            QuantityKind::Velocity => "velocity",
            QuantityKind::Acceleration => "acceleration",
            QuantityKind::Momentum => "momentum",
            QuantityKind::Force => "force",
        }
    }
}

impl fmt::Display for QuantityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QuantityKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        QuantityKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown quantity kind `{s}`")))
    }
}

/// Scales converting internal numbers to SI: `SI = internal × scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    /// m per internal length unit.
    pub length_scale: f64,
    /// s per internal time unit.
    pub time_scale: f64,
    /// kg per internal mass unit (the particle mass).
    pub mass_scale: f64,
}

impl UnitSystem {
    /// Unit system with the given particle mass (kg) and length scale (m).
    pub fn new(mass: f64, length_scale: f64) -> Result<Self> {
        Self::with_hbar(mass, length_scale, PhysicalConstants::SI.hbar)
    }

    /// As [`UnitSystem::new`] with an explicit value of ħ in J·s.
    pub fn with_hbar(mass: f64, length_scale: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("length_scale", length_scale), ("hbar", hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("{name} must be positive and finite, got {v}"));
            }
        }
        Ok(UnitSystem {
            length_scale,
            time_scale: mass * length_scale * length_scale / hbar,
            mass_scale: mass,
        })
    }

    pub fn hbar(&self) -> f64 {
        self.mass_scale * self.length_scale * self.length_scale / self.time_scale
    }

    pub fn energy_scale(&self) -> f64 {
        self.mass_scale * self.length_scale * self.length_scale / (self.time_scale * self.time_scale)
    }

    /// SI value of one internal unit of `kind`.
    pub fn scale(&self, kind: QuantityKind) -> f64 {
        let (l, t, m) = (self.length_scale, self.time_scale, self.mass_scale);
        match kind {
            QuantityKind::Length => l,
            QuantityKind::Time => t,
            QuantityKind::Velocity => l / t,
            QuantityKind::Acceleration => l / (t * t),
            QuantityKind::Momentum => m * l / t,
            QuantityKind::Force => m * l / (t * t),
        }
    }

    pub fn to_internal(&self, value: f64, kind: QuantityKind) -> f64 {
        value / self.scale(kind)
    }

    pub fn from_internal(&self, value: f64, kind: QuantityKind) -> f64 {
        value * self.scale(kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rb87_time_scale_at_one_micron() {
        let m = MassPreset::Rb87.kg();
        let u = UnitSystem::new(m, 1e-6).unwrap();
        let hand = 1.443_160_895e-25 * 1e-12 / 1.054_571_817e-34;
        assert!((u.time_scale / hand - 1.0).abs() < 1e-8);
        assert!((u.time_scale / 1.3686e-3 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn unit_scaling_with_unit_hbar() {
        let u = UnitSystem::with_hbar(1.0, 1.0, 1.0).unwrap();
        assert_eq!(u.time_scale, 1.0);
        assert_eq!(u.hbar(), 1.0);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(UnitSystem::new(0.0, 1e-6).is_err());
        assert!(UnitSystem::new(1e-25, -1.0).is_err());
        assert!(UnitSystem::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn conversions() {
        let u = UnitSystem::new(MassPreset::Rb87.kg(), 1e-6).unwrap();
        let v = u.to_internal(0.01, QuantityKind::Velocity);
        assert!((v - 0.01 * u.time_scale / u.length_scale).abs() <= 1e-15 * v);
        let g = PhysicalConstants::SI.gravity_g;
        let a = u.to_internal(0.1 * g, QuantityKind::Acceleration);
        let want = 0.98 * u.time_scale * u.time_scale / u.length_scale;
        assert!((a / want - 1.0).abs() < 1e-14);

        let u80 = UnitSystem::new(MassPreset::Rb87.kg(), 80e-6).unwrap();
        let t = u80.to_internal(0.137, QuantityKind::Time);
        assert!(t.is_finite() && t > 0.0);
        let back = u80.from_internal(t, QuantityKind::Time);
        assert!((back - 0.137).abs() <= 1e-14 * 0.137);
    }

    #[test]
    fn internal_hbar_and_mass_are_one() {
        let u = UnitSystem::new(MassPreset::Rb.kg(), 3e-6).unwrap();
        assert!((u.hbar() / PhysicalConstants::SI.hbar - 1.0).abs() < 1e-15);
        // Momentum of one internal unit is ħ/ℓ; mass unit is the particle mass.
        let p = u.scale(QuantityKind::Momentum);
        assert!((p * u.length_scale / PhysicalConstants::SI.hbar - 1.0).abs() < 1e-15);
        assert_eq!(u.mass_scale, MassPreset::Rb.kg());
        let e = u.energy_scale();
        assert!((e * u.time_scale / PhysicalConstants::SI.hbar - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kind_parsing() {
        for k in QuantityKind::ALL {
            assert_eq!(k.name().parse::<QuantityKind>().unwrap(), k);
        }
        assert!("energy".parse::<QuantityKind>().is_err());
        assert_eq!("Rb87".parse::<MassPreset>().unwrap(), MassPreset::Rb87);
        assert!("cs".parse::<MassPreset>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn round_trip_identity(
            exponent in -10.0f64..10.0,
            sign in prop::bool::ANY,
            kind in prop::sample::select(QuantityKind::ALL.to_vec()),
            length in prop::sample::select(vec![1e-6, 80e-6, 1.0]),
        ) {
            let u = UnitSystem::new(MassPreset::Rb.kg(), length).unwrap();
            let v = if sign { 10f64.powf(exponent) } else { -10f64.powf(exponent) };
            let back = u.from_internal(u.to_internal(v, kind), kind);
            prop_assert!((back - v).abs() <= 1e-14 * v.abs());
        }
    }
}
