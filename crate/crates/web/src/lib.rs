//! Browser bindings: the same config dialect as the command line, evaluated
//! in-page through wasm. Three entry points — a single design point, a
//! one-dimensional-or-more sweep, and the builtin material registry — each
//! taking TOML in and handing JSON back so the page stays plain JavaScript.
//!
//! The JSON-producing functions are ordinary Rust and are tested on the
//! host; the `#[wasm_bindgen]` wrappers only adapt errors for JS.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use m2o::config::parse_file;
use m2o::explore::{point_cells, point_columns, run_sweep, Axis, SweepSpec};
use m2o::materials::builtin_db;
use m2o::table::Cell;
use m2o::transducer::{StageKind, TransductionPoint};
use m2o::{Error, Result};

#[wasm_bindgen]
pub fn eval_point(config: &str) -> std::result::Result<String, JsError> {
    Ok(point_json(config)?)
}

#[wasm_bindgen]
pub fn eval_sweep(config: &str) -> std::result::Result<String, JsError> {
    Ok(sweep_json(config)?)
}

#[wasm_bindgen]
pub fn materials() -> String {
    materials_json()
}

/// One stage of the conversion chain, flattened for display.
#[derive(Serialize)]
struct StageView {
    kind: &'static str,
    omega_low_rad_s: f64,
    t_base_k: f64,
    eta_ext: f64,
    n_added: f64,
    n_added_as_printed: f64,
    n_added_physical: f64,
    delta_t_k: f64,
    converged: bool,
    pump_photons: f64,
    g_rad_s: f64,
}

#[derive(Serialize)]
struct PointView {
    scheme: &'static str,
    eta_total: f64,
    n_total: f64,
    flags: String,
    runaway: bool,
    stages: Vec<StageView>,
    columns: Vec<String>,
    values: Vec<serde_json::Value>,
    defaults_applied: Vec<String>,
}

fn stage_views(point: &TransductionPoint) -> Vec<StageView> {
    point
        .stages
        .iter()
        .map(|s| StageView {
            kind: match s.kind {
                StageKind::ElectroOptic => "electro-optic",
                StageKind::KineticInductance => "kinetic-inductance",
            },
            omega_low_rad_s: s.omega_low,
            t_base_k: s.t_base,
            eta_ext: s.eta_ext,
            n_added: s.n_added,
            n_added_as_printed: s.n_added_printed,
            n_added_physical: s.n_added_physical,
            delta_t_k: s.thermal.delta_t,
            converged: s.thermal.converged,
            pump_photons: s.pump_photons,
            g_rad_s: s.g,
        })
        .collect()
}

fn cell_value(cell: &Cell) -> serde_json::Value {
    match cell {
        Cell::Num(x) => serde_json::Number::from_f64(*x)
            .map(serde_json::Value::Number)
            .unwrap_or_else(|| serde_json::Value::String(x.to_string())),
        Cell::Text(s) => serde_json::Value::String(s.clone()),
    }
}

/// Evaluate the config's design point; returns a JSON object with the
/// stage breakdown and the same columns/values the CLI record carries.
pub fn point_json(config: &str) -> Result<String> {
    let parsed = parse_file(config, std::path::Path::new("."))?;
    let run = parsed.run;
    let db = builtin_db();
    let point = run.evaluate(&db)?;
    let view = PointView {
        scheme: match run.scheme {
            m2o::transducer::Scheme::SingleStep => "single_step",
            m2o::transducer::Scheme::TwoStep => "two_step",
        },
        eta_total: point.eta_total,
        n_total: point.n_total,
        flags: point.flags.to_string(),
        runaway: point.flags.runaway,
        stages: stage_views(&point),
        columns: point_columns(run.scheme).iter().map(|c| c.to_string()).collect(),
        values: point_cells(&point).iter().map(cell_value).collect(),
        defaults_applied: run.defaults_applied.clone(),
    };
    serde_json::to_string(&view).map_err(|e| Error::Config(format!("serializing result: {e}")))
}

#[derive(Serialize)]
struct SweepView {
    axes: Vec<Axis>,
    columns: Vec<String>,
    rows: Vec<Vec<serde_json::Value>>,
}

/// Run the config's `[sweep]` section; returns `{axes, columns, rows}`.
pub fn sweep_json(config: &str) -> Result<String> {
    let parsed = parse_file(config, std::path::Path::new("."))?;
    let raw = parsed
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("config has no [sweep] section".into()))?;
    let spec = SweepSpec::resolve(raw, &parsed.run)?;
    let table = run_sweep(&parsed.run, &spec, &builtin_db())?;
    let view = SweepView {
        axes: spec.axes.clone(),
        columns: table.columns().to_vec(),
        rows: table
            .rows()
            .iter()
            .map(|r| r.iter().map(cell_value).collect())
            .collect(),
    };
    serde_json::to_string(&view).map_err(|e| Error::Config(format!("serializing result: {e}")))
}

#[derive(Serialize)]
struct MaterialView {
    name: String,
    provenance: String,
    components: Vec<&'static str>,
    dialect_toml: String,
}

/// The builtin material registry as JSON, with each entry's database
/// dialect alongside for display.
pub fn materials_json() -> String {
    let db = builtin_db();
    let views: Vec<MaterialView> = db
        .iter()
        .map(|m| {
            let mut components = Vec::new();
            if m.superconductor.is_some() {
                components.push("superconductor");
            }
            if m.thermal.is_some() {
                components.push("thermal");
            }
            if m.optical.is_some() {
                components.push("optical");
            }
            MaterialView {
                name: m.name.clone(),
                provenance: m.provenance.to_string(),
                components,
                dialect_toml: m.to_toml(),
            }
        })
        .collect();
    serde_json::to_string(&views).expect("builtin registry serializes")
}

/// Needed by the canvas plot: sensible tick values between `lo` and `hi`.
#[wasm_bindgen]
pub fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    if !(lo > 0.0) || !(hi > lo) {
        return vec![];
    }
    // Integer decades, parsed rather than accumulated so the ticks land on
    // exact decimal values; the epsilon keeps boundary decades included.
    let k0 = (lo.log10() - 1e-9).ceil() as i32;
    let k1 = (hi.log10() + 1e-9).floor() as i32;
    (k0..=k1)
        .map(|k| format!("1e{k}").parse::<f64>().expect("decade literal"))
        .collect()
}
