use std::path::Path;

use moshlab::validate::{self, Level};
use moshlab::{
    faddeyeva, wigner_map, Axis, BoxScenario, FieldFrame, GridSpec, QuantityKind, ShutterScenario, TgScenario,
    PhysicalConstants,
};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{Format, Kind, Params, Resolved};
use crate::output::{sibling, to_json, write_file, Table};
use crate::CliError;

const WIGNER_NOTE: &str = "w_value is exactly 0 in the classically excluded region x > p t / m - a t^2 / 2, \
     where the evolved initial function vanishes; no numerical noise is written there.";

fn axis_json(r: &Resolved, axis: &Axis, kind: QuantityKind, unit: &str) -> Value {
    json!({
        "n": axis.n,
        "min_si": r.si(axis.min, kind),
        "max_si": r.si(axis.max, kind),
        "min_internal": axis.min,
        "max_internal": axis.max,
        "unit": unit,
    })
}

fn metadata(command: &str, r: &Resolved, grid: Value, columns: &[&str], value_unit: &str) -> Value {
    let u = &r.units;
    json!({
        "program": "moshlab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "unit_system": {
            "hbar_J_s": PhysicalConstants::SI.hbar,
            "mass_kg": u.mass_scale,
            "length_m": u.length_scale,
            "time_s": u.time_scale,
            "velocity_m_s": u.scale(QuantityKind::Velocity),
            "acceleration_m_s2": u.scale(QuantityKind::Acceleration),
            "momentum_kg_m_s": u.scale(QuantityKind::Momentum),
            "convention": "internal units set hbar = m = 1 with lengths in micrometres",
        },
        "scenario": r.echo,
        "grid": grid,
        "columns": columns,
        "value_unit": value_unit,
    })
}

/// `(x, t)` frame as rows `x_si, t_si, value·scale`, `x` fastest.
fn xt_rows(r: &Resolved, frame: &FieldFrame, scale: f64) -> Vec<[f64; 3]> {
    let values = frame.real().expect("density frames are real");
    (0..frame.grid.len())
        .map(|k| {
            let (x, t) = frame.grid.point(k);
            [r.si(x, QuantityKind::Length), r.si(t, QuantityKind::Time), values[k] * scale]
        })
        .collect()
}

fn emit(r: &Resolved, mut meta: Value, table: &Table, extra: Option<(&str, &Table)>) -> Result<(), CliError> {
    match r.format {
        Format::Csv => {
            write_file(&r.output, &table.csv())?;
            if let Some((suffix, aux)) = extra {
                let path = sibling(&r.output, suffix, "csv");
                write_file(&path, &aux.csv())?;
                meta["auxiliary_csv"] = json!(path.file_name().map(|n| n.to_string_lossy().into_owned()));
            }
            write_file(&sibling(&r.output, "", "json"), &to_json(&meta))?;
        }
        Format::Json => {
            meta["data"] = table.json();
            if let Some((suffix, aux)) = extra {
                meta[suffix.trim_start_matches('_')] = aux.json();
            }
            write_file(&r.output, &to_json(&meta))?;
        }
    }
    Ok(())
}

pub fn export(kind: Kind, params: Params) -> Result<(), CliError> {
    let mut r = Resolved::new(params)?;
    match kind {
        Kind::Shutter => {
            let p = r.velocity("p_over_m", r.params.p_over_m_cm_s)?;
            let f = r.force()?;
            let s = ShutterScenario::new(p, f)?;
            let grid = GridSpec::xt(r.x_axis()?, r.t_axis()?)?;
            let frame = s.density_map(&grid)?;
            let columns = ["x_si", "t_si", "density"];
            let grid_json = json!({
                "x": axis_json(&r, &grid.x, QuantityKind::Length, "m"),
                "t": axis_json(&r, &grid.y, QuantityKind::Time, "s"),
            });
            let meta = metadata("shutter-density", &r, grid_json, &columns, "relative to the incident beam");
            emit(&r, meta, &Table { columns, rows: xt_rows(&r, &frame, 1.0) }, None)
        }
        Kind::Detector => {
            let p = r.velocity("p_over_m", r.params.p_over_m_cm_s)?;
            let f = r.force()?;
            let x_det = r.detector()?;
            let s = ShutterScenario::new(p, f)?;
            let t_axis = r.t_axis()?;
            let frame = s.detector_signal(x_det, t_axis)?;
            let values = frame.real().expect("density frames are real");
            let rows = (0..t_axis.n)
                .map(|j| {
                    let t = t_axis.value(j);
                    [r.si(t, QuantityKind::Time), values[j], s.classical_density(x_det, t)]
                })
                .collect();
            let columns = ["t_si", "density", "classical_density"];
            let grid_json = json!({ "t": axis_json(&r, &t_axis, QuantityKind::Time, "s") });
            let meta = metadata("detector", &r, grid_json, &columns, "relative to the incident beam");
            emit(&r, meta, &Table { columns, rows }, None)
        }
        Kind::Wigner => {
            let p0 = r.velocity("p_over_m", r.params.p_over_m_cm_s)?;
            let f = r.force()?;
            let t = r.snapshot_time()?;
            let grid = GridSpec::xp(r.x_axis()?, r.p_axis()?)?;
            let frame = wigner_map(p0, f, t, &grid)?;
            let values = frame.real().expect("Wigner frames are real");
            // W has units of 1/(length · momentum).
            let w_scale = 1.0 / (r.units.scale(QuantityKind::Length) * r.units.scale(QuantityKind::Momentum));
            let rows = (0..grid.len())
                .map(|k| {
                    let (x, p) = grid.point(k);
                    [r.si(x, QuantityKind::Length), r.si(p, QuantityKind::Momentum), values[k] * w_scale]
                })
                .collect();
            let columns = ["x_si", "p_si", "w_value"];
            let grid_json = json!({
                "x": axis_json(&r, &grid.x, QuantityKind::Length, "m"),
                "p": axis_json(&r, &grid.y, QuantityKind::Momentum, "kg m/s"),
            });
            let mut meta = metadata("wigner-map", &r, grid_json, &columns, "1/(J s)");
            meta["excluded_region"] = json!(WIGNER_NOTE);
            emit(&r, meta, &Table { columns, rows }, None)
        }
        Kind::Box => {
            let q = r.velocity("q_over_m", r.params.q_over_m_cm_s)?;
            let f = r.force()?;
            let l = r.trap_length()?;
            let n = r.count("n", r.params.n)?;
            let b = BoxScenario::new(l, n, q, f)?;
            let grid = GridSpec::xt(r.x_axis()?, r.t_axis()?)?;
            let frame = b.density_map(&grid)?;
            let density_scale = 1.0 / r.units.scale(QuantityKind::Length);
            let t_n = r.si(b.bifurcation_time(), QuantityKind::Time);
            let trajectory = Table {
                columns: ["t_si", "mean_x_si", "t_n_si"],
                rows: grid
                    .y
                    .values()
                    .into_iter()
                    .map(|t| [r.si(t, QuantityKind::Time), r.si(b.classical_center(t), QuantityKind::Length), t_n])
                    .collect(),
            };
            let columns = ["x_si", "t_si", "density"];
            let grid_json = json!({
                "x": axis_json(&r, &grid.x, QuantityKind::Length, "m"),
                "t": axis_json(&r, &grid.y, QuantityKind::Time, "s"),
            });
            let mut meta = metadata("box-density", &r, grid_json, &columns, "1/m");
            meta["bifurcation_time_s"] = json!(t_n);
            emit(&r, meta, &Table { columns, rows: xt_rows(&r, &frame, density_scale) }, Some(("_trajectory", &trajectory)))
        }
        Kind::Tonks => {
            let q = r.velocity("q_over_m", r.params.q_over_m_cm_s)?;
            let f = r.force()?;
            let l = r.trap_length()?;
            let particles = r.count("N", r.params.particles)?;
            let tg = TgScenario::new(particles, l, q, f)?;
            let grid = GridSpec::xt(r.x_axis()?, r.t_axis()?)?;
            let frame = tg.density_map(&grid)?;
            let density_scale = 1.0 / r.units.scale(QuantityKind::Length);
            let columns = ["x_si", "t_si", "density"];
            let grid_json = json!({
                "x": axis_json(&r, &grid.x, QuantityKind::Length, "m"),
                "t": axis_json(&r, &grid.y, QuantityKind::Time, "s"),
            });
            let mut meta = metadata("tonks-density", &r, grid_json, &columns, "1/m");
            meta["bifurcation_time_s"] = json!(r.si(tg.t_n(), QuantityKind::Time));
            emit(&r, meta, &Table { columns, rows: xt_rows(&r, &frame, density_scale) }, None)
        }
    }
}

pub fn validate(level: Level, report: &Path, perturb_w: Option<f64>) -> Result<(), CliError> {
    let result = match perturb_w {
        Some(eps) => {
            let w = move |z: Complex64| faddeyeva(z).map(|w| w * (1.0 + eps));
            validate::run_with(level, &w)
        }
        None => validate::run(level),
    };
    for c in &result.checks {
        println!("{} {}. {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.name);
        for m in &c.measurements {
            let detail = match (m.value, m.tolerance) {
                (Some(v), Some(t)) => format!(" = {v:.3e} (tolerance {t:.1e})"),
                _ => String::new(),
            };
            println!("    [{}] {}{detail}", if m.passed { "ok" } else { "x" }, m.label);
        }
    }
    let doc = json!({
        "program": "moshlab",
        "version": env!("CARGO_PKG_VERSION"),
        "perturb_w": perturb_w,
        "report": result,
    });
    write_file(report, &to_json(&doc))?;
    if result.passed {
        Ok(())
    } else {
        Err(CliError::ValidationFailed)
    }
}
