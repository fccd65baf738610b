//! Exact transient dynamics of matter waves released from a shutter or a
//! hard-wall trap into a linear potential, with independent numerical
//! oracles for every closed form.
//!
//! All physics is computed in internal units with `ħ = m = 1`; see [`units`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boxtrap;
mod dd;
pub mod error;
pub mod grid;
pub mod oracle;
pub mod presets;
pub mod quad;
pub mod shutter;
pub mod specfun;
pub mod tonks;
pub mod units;
pub mod validate;
pub mod wigner;

pub use boxtrap::{BoxScenario, BranchMomentum};
pub use error::{Error, Result};
pub use grid::{Axis, FieldFrame, FrameValues, GridSpec, Quantity, ScenarioEcho, SecondAxis};
pub use quad::QuadratureReport;
pub use shutter::ShutterScenario;
pub use specfun::{faddeyeva, fresnel, moshinsky, moshinsky_split, ComplexValue, MoshinskyArgs, MoshinskySplit};
pub use tonks::{peak_count, TgScenario};
pub use units::{MassPreset, PhysicalConstants, QuantityKind, UnitSystem};
pub use wigner::{wigner_classical, wigner_evolved, wigner_initial, wigner_map, WignerPoint};
