//! Run configuration: a flat TOML file and/or command-line flags, with the
//! figure scenarios as defaults. Flags override the file, the file overrides
//! the defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use moshlab::presets::LENGTH_SCALE;
use moshlab::{Axis, MassPreset, PhysicalConstants, QuantityKind, UnitSystem};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Mass preset: rb (85.4678 u) or rb87
    #[arg(long)]
    pub mass: Option<String>,
    /// Explicit particle mass in kg (overrides the preset)
    #[arg(long)]
    pub mass_kg: Option<f64>,
    /// Initial velocity p/m in cm/s (shutter, wigner)
    #[arg(long, allow_negative_numbers = true)]
    pub p_over_m_cm_s: Option<f64>,
    /// Kick velocity q/m in cm/s (box, tonks)
    #[arg(long, allow_negative_numbers = true)]
    pub q_over_m_cm_s: Option<f64>,
    /// Acceleration f/m in units of g
    #[arg(long, allow_negative_numbers = true)]
    pub a_over_g: Option<f64>,
    /// Acceleration f/m in cm/s²
    #[arg(long, allow_negative_numbers = true)]
    pub a_cm_s2: Option<f64>,
    /// Trap length in µm
    #[arg(long = "L-um")]
    #[serde(rename = "L_um")]
    pub l_um: Option<f64>,
    /// Quantum number of the released trap state
    #[arg(long = "n")]
    pub n: Option<u32>,
    /// Particle number of the Tonks gas
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub particles: Option<u32>,
    /// Detector position in mm
    #[arg(long, allow_negative_numbers = true)]
    pub x_det_mm: Option<f64>,
    /// Time of the Wigner snapshot in ms
    #[arg(long)]
    pub t_ms: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x_min_um: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x_max_um: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub t_min_ms: Option<f64>,
    #[arg(long)]
    pub t_max_ms: Option<f64>,
    #[arg(long)]
    pub nt: Option<usize>,
    /// Lower momentum bound of the Wigner map, as p/m in cm/s
    #[arg(long, allow_negative_numbers = true)]
    pub p_min_cm_s: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p_max_cm_s: Option<f64>,
    #[arg(long)]
    pub np: Option<usize>,
    /// csv (with a JSON sidecar) or json
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads (MOSHLAB_THREADS applies when this is unset)
    #[arg(long)]
    pub threads: Option<usize>,
}

macro_rules! overlay {
    ($top:expr, $base:expr; $($field:ident),*; $($pair:ident),*) => {
        Params { $($field: $top.$field.or($base.$field),)* $($pair: $top.$pair,)* }
    };
}

impl Params {
    /// `self` where set, otherwise `base`. The two spellings of the
    /// acceleration travel together, as do the two ways to give the mass.
    pub fn over(self, base: Params) -> Params {
        let top = if self.a_over_g.is_some() || self.a_cm_s2.is_some() {
            self
        } else {
            Params { a_over_g: base.a_over_g, a_cm_s2: base.a_cm_s2, ..self }
        };
        let top = if top.mass.is_some() || top.mass_kg.is_some() {
            top
        } else {
            Params { mass: base.mass.clone(), mass_kg: base.mass_kg, ..top }
        };
        overlay!(top, base; p_over_m_cm_s, q_over_m_cm_s, l_um, n, particles, x_det_mm, t_ms, x_min_um,
            x_max_um, nx, t_min_ms, t_max_ms, nt, p_min_cm_s, p_max_cm_s, np, format, output, threads;
            mass, mass_kg, a_over_g, a_cm_s2)
    }

    pub fn from_file(path: &Path) -> Result<Params, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Shutter,
    Detector,
    Wigner,
    Box,
    Tonks,
}

impl Kind {
    /// Figure parameters used when neither file nor flags set a value.
    pub fn defaults(self) -> Params {
        let base = Params { mass: Some("rb".into()), format: Some("csv".into()), ..Params::default() };
        match self {
            Kind::Shutter => Params {
                p_over_m_cm_s: Some(1.0),
                a_over_g: Some(0.1),
                x_min_um: Some(-60.0),
                x_max_um: Some(70.0),
                nx: Some(261),
                t_min_ms: Some(0.1),
                t_max_ms: Some(20.0),
                nt: Some(200),
                output: Some("shutter_density.csv".into()),
                ..base
            },
            Kind::Detector => Params {
                p_over_m_cm_s: Some(10.0),
                a_cm_s2: Some(0.05),
                x_det_mm: Some(5.0),
                t_min_ms: Some(45.0),
                t_max_ms: Some(60.0),
                nt: Some(3001),
                output: Some("detector.csv".into()),
                ..base
            },
            Kind::Wigner => Params {
                p_over_m_cm_s: Some(1.0),
                a_cm_s2: Some(100.0),
                t_ms: Some(10.0),
                x_min_um: Some(0.0),
                x_max_um: Some(70.0),
                nx: Some(281),
                p_min_cm_s: Some(-0.15),
                p_max_cm_s: Some(0.15),
                np: Some(241),
                output: Some("wigner_map.csv".into()),
                ..base
            },
            Kind::Box | Kind::Tonks => Params {
                q_over_m_cm_s: Some(0.0),
                a_cm_s2: Some(0.49),
                l_um: Some(80.0),
                n: Some(10),
                particles: Some(10),
                x_min_um: Some(-400.0),
                x_max_um: Some(200.0),
                nx: Some(601),
                t_min_ms: Some(1.0),
                t_max_ms: Some(300.0),
                nt: Some(300),
                output: Some(if self == Kind::Box { "box_density.csv" } else { "tonks_density.csv" }.into()),
                ..base
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Config(format!("unknown output format `{s}` (expected csv or json)"))),
        }
    }
}

/// One physical input, echoed in SI and internal units.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Echo {
    pub name: &'static str,
    pub si: f64,
    pub unit: &'static str,
    pub internal: f64,
}

/// A fully specified run: unit system plus accessors converting the SI
/// inputs to internal units.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: Params,
    pub units: UnitSystem,
    pub format: Format,
    pub output: PathBuf,
    pub echo: Vec<Echo>,
}

fn need<T: Copy>(v: Option<T>, key: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing `{key}`")))
}

fn positive(v: f64, key: &str) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("`{key}` must be positive, got {v}")))
    }
}

fn finite(v: f64, key: &str) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("`{key}` must be finite")))
    }
}

impl Resolved {
    pub fn new(params: Params) -> Result<Self, CliError> {
        let mass = match (params.mass_kg, params.mass.as_deref()) {
            (Some(kg), _) => positive(kg, "mass_kg")?,
            (None, Some(name)) => MassPreset::from_str(name).map_err(|e| CliError::Config(e.to_string()))?.kg(),
            (None, None) => return Err(CliError::Config("missing `mass` or `mass_kg`".into())),
        };
        let units = UnitSystem::new(mass, LENGTH_SCALE).map_err(|e| CliError::Config(e.to_string()))?;
        let format = params.format.as_deref().unwrap_or("csv").parse()?;
        let output = params.output.clone().ok_or_else(|| CliError::Config("missing `output`".into()))?;
        if params.a_over_g.is_some() && params.a_cm_s2.is_some() {
            return Err(CliError::Config("set only one of `a_over_g` and `a_cm_s2`".into()));
        }
        let mut r = Resolved { params, units, format, output, echo: Vec::new() };
        r.echo.push(Echo { name: "mass", si: mass, unit: "kg", internal: 1.0 });
        Ok(r)
    }

    fn convert(&mut self, name: &'static str, si: f64, unit: &'static str, kind: QuantityKind) -> f64 {
        let internal = self.units.to_internal(si, kind);
        self.echo.push(Echo { name, si, unit, internal });
        internal
    }

    pub fn velocity(&mut self, name: &'static str, cm_s: Option<f64>) -> Result<f64, CliError> {
        let v = finite(need(cm_s, &format!("{name}_cm_s"))?, name)?;
        Ok(self.convert(name, v * 1e-2, "m/s", QuantityKind::Velocity))
    }

    /// Force constant `f` of `V = f x` (acceleration `f/m` towards −x).
    pub fn force(&mut self) -> Result<f64, CliError> {
        let a = match (self.params.a_over_g, self.params.a_cm_s2) {
            (Some(g), None) => g * PhysicalConstants::SI.gravity_g,
            (None, Some(a)) => a * 1e-2,
            (None, None) => 0.0,
            (Some(_), Some(_)) => unreachable!("rejected in Resolved::new"),
        };
        let a = finite(a, "acceleration")?;
        Ok(self.convert("acceleration", a, "m/s^2", QuantityKind::Acceleration))
    }

    pub fn trap_length(&mut self) -> Result<f64, CliError> {
        let l = positive(need(self.params.l_um, "L_um")?, "L_um")?;
        Ok(self.convert("trap_length", l * 1e-6, "m", QuantityKind::Length))
    }

    pub fn detector(&mut self) -> Result<f64, CliError> {
        let x = finite(need(self.params.x_det_mm, "x_det_mm")?, "x_det_mm")?;
        Ok(self.convert("detector_position", x * 1e-3, "m", QuantityKind::Length))
    }

    pub fn snapshot_time(&mut self) -> Result<f64, CliError> {
        let t = positive(need(self.params.t_ms, "t_ms")?, "t_ms")?;
        Ok(self.convert("time", t * 1e-3, "s", QuantityKind::Time))
    }

    pub fn count(&mut self, name: &'static str, v: Option<u32>) -> Result<u32, CliError> {
        match need(v, name)? {
            0 => Err(CliError::Config(format!("`{name}` must be at least 1"))),
            n => {
                self.echo.push(Echo { name, si: n.into(), unit: "1", internal: n.into() });
                Ok(n)
            }
        }
    }

    fn axis(&self, min: Option<f64>, max: Option<f64>, n: Option<usize>, keys: [&str; 3], scale: f64) -> Result<Axis, CliError> {
        let (min, max, n) = (need(min, keys[0])?, need(max, keys[1])?, need(n, keys[2])?);
        let axis = if n == 1 { Ok(Axis::single(min)) } else { Axis::new(min, max, n) };
        let axis = axis.map_err(|e| CliError::Config(format!("{}/{}/{}: {e}", keys[0], keys[1], keys[2])))?;
        Ok(Axis { min: axis.min * scale, max: axis.max * scale, n: axis.n })
    }

    /// Position axis in internal units.
    pub fn x_axis(&self) -> Result<Axis, CliError> {
        let s = 1e-6 / self.units.scale(QuantityKind::Length);
        self.axis(self.params.x_min_um, self.params.x_max_um, self.params.nx, ["x_min_um", "x_max_um", "nx"], s)
    }

    pub fn t_axis(&self) -> Result<Axis, CliError> {
        let s = 1e-3 / self.units.scale(QuantityKind::Time);
        let a = self.axis(self.params.t_min_ms, self.params.t_max_ms, self.params.nt, ["t_min_ms", "t_max_ms", "nt"], s)?;
        if a.min <= 0.0 {
            return Err(CliError::Config("`t_min_ms` must be positive".into()));
        }
        Ok(a)
    }

    /// Momentum axis (given as velocity) in internal units.
    pub fn p_axis(&self) -> Result<Axis, CliError> {
        let s = 1e-2 / self.units.scale(QuantityKind::Velocity);
        self.axis(self.params.p_min_cm_s, self.params.p_max_cm_s, self.params.np, ["p_min_cm_s", "p_max_cm_s", "np"], s)
    }

    pub fn si(&self, value: f64, kind: QuantityKind) -> f64 {
        self.units.from_internal(value, kind)
    }
}
