//! Run configuration: the TOML dialect every command reads.
//!
//! A config file describes one design point — scheme, frequencies, geometry,
//! temperatures, model switches, material selection, output format — plus
//! optional `[sweep]` / `[optimize]` sections that the corresponding
//! commands interpret (see [`crate::explore`]). All quantities accept either
//! bare numbers in base SI units or suffixed strings (`"8GHz"`, `"300um"`,
//! `"10mK"`; see [`crate::units`]). Frequencies are written as ordinary
//! frequencies and converted to angular exactly once, when the frequency
//! plan is built.
//!
//! Every field is optional: gaps are filled from the benchmark defaults and
//! each filled gap is recorded in [`RunConfig::defaults_applied`], which the
//! tool echoes into output sidecars so a result file always states what it
//! was computed from. An empty file is therefore a valid config describing
//! the default single-step device.
//!
//! ```toml
//! scheme = "two_step"
//!
//! [frequencies]
//! f_mu = "8GHz"
//! f_i = "600GHz"      # required when scheme = "two_step"
//! f_po = "200THz"
//!
//! [geometry]          # electro-optic strip; also the mixer strip unless
//! w = "1um"           # [geometry_ki] overrides it
//! L = "300um"
//! t = "20nm"
//!
//! [temperatures]
//! T1 = "10mK"
//! T2 = "1K"           # defaults to T1
//!
//! [model]
//! xi = 1.0            # or: xi_table = "overlap.csv"  (f_Hz, xi rows)
//! occupancy_branch = "as_printed"          # or "physical"
//! intermediate_dielectric_loss = false
//!
//! [materials]
//! film = "NbN"
//! host = "LiNbO3"
//! db = "extra_materials.toml"   # overlay on the builtin database
//!
//! [output]
//! format = "csv"      # or "json"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explore::{RawOptimizeSpec, RawSweepSpec};
use crate::materials::laws::parse_two_column_csv;
use crate::materials::MaterialDb;
use crate::rates::{FrequencyPlan, Geometry};
use crate::thermal::SolverOptions;
use crate::transducer::{
    single_step_point, two_step_point, MaterialSet, ModelOptions, OccupancyBranch, Scheme,
    TransductionPoint,
};
use crate::units::{parse_frequency_hz, parse_length_m, parse_temperature_k};

/// Output serialization of result records.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// A quantity as written in TOML: a bare number (base SI unit) or a
/// suffixed string.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Qty {
    Num(f64),
    Str(String),
}

impl Qty {
    pub fn frequency_hz(&self, field: &str) -> Result<f64> {
        let v = match self {
            Qty::Num(x) => *x,
            Qty::Str(s) => parse_frequency_hz(s)
                .map_err(|e| Error::Config(format!("{field}: {e}")))?,
        };
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Config(format!(
                "{field}: frequency must be positive and finite, got {v} Hz"
            )));
        }
        Ok(v)
    }

    pub fn length_m(&self, field: &str) -> Result<f64> {
        let v = match self {
            Qty::Num(x) => *x,
            Qty::Str(s) => {
                parse_length_m(s).map_err(|e| Error::Config(format!("{field}: {e}")))?
            }
        };
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Config(format!(
                "{field}: length must be positive and finite, got {v} m"
            )));
        }
        Ok(v)
    }

    pub fn temperature_k(&self, field: &str) -> Result<f64> {
        let v = match self {
            Qty::Num(x) => *x,
            Qty::Str(s) => {
                parse_temperature_k(s).map_err(|e| Error::Config(format!("{field}: {e}")))?
            }
        };
        if v < 0.0 || !v.is_finite() {
            return Err(Error::Config(format!(
                "{field}: temperature must be non-negative and finite, got {v} K"
            )));
        }
        Ok(v)
    }

    pub fn bare(&self, field: &str) -> Result<f64> {
        match self {
            Qty::Num(x) if x.is_finite() => Ok(*x),
            Qty::Num(x) => Err(Error::Config(format!("{field}: must be finite, got {x}"))),
            Qty::Str(s) => Err(Error::Config(format!(
                "{field}: expected a plain number, got `{s}`"
            ))),
        }
    }
}

/// Mode-overlap factor: a constant, or a table of (frequency Hz, xi) rows
/// interpolated linearly in frequency and held constant beyond its ends.
/// The table form models overlap that degrades toward low intermediate
/// frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XiSpec {
    Const(f64),
    Table { path: String, points: Vec<[f64; 2]> },
}

impl XiSpec {
    fn validate(&self) -> Result<()> {
        match self {
            XiSpec::Const(xi) => validate_xi(*xi, "model.xi"),
            XiSpec::Table { path, points } => {
                if points.len() < 2 {
                    return Err(Error::Config(format!(
                        "xi table {path} needs at least two rows"
                    )));
                }
                for pair in points.windows(2) {
                    if !(pair[1][0] > pair[0][0]) {
                        return Err(Error::Config(format!(
                            "xi table {path}: frequencies must increase strictly"
                        )));
                    }
                }
                for [f, xi] in points {
                    if !(*f > 0.0) {
                        return Err(Error::Config(format!(
                            "xi table {path}: frequencies must be positive, got {f}"
                        )));
                    }
                    validate_xi(*xi, &format!("xi table {path}"))?;
                }
                Ok(())
            }
        }
    }

    /// Overlap at the electro-optic stage's low-mode angular frequency.
    pub fn eval_at(&self, omega_low: f64) -> Result<f64> {
        match self {
            XiSpec::Const(xi) => Ok(*xi),
            XiSpec::Table { points, .. } => {
                let f = omega_low / std::f64::consts::TAU;
                let n = points.len();
                if f <= points[0][0] {
                    return Ok(points[0][1]);
                }
                if f >= points[n - 1][0] {
                    return Ok(points[n - 1][1]);
                }
                let seg = points
                    .windows(2)
                    .position(|w| f <= w[1][0])
                    .unwrap_or(n - 2);
                let [f0, x0] = points[seg];
                let [f1, x1] = points[seg + 1];
                Ok(x0 + (x1 - x0) * (f - f0) / (f1 - f0))
            }
        }
    }
}

fn validate_xi(xi: f64, field: &str) -> Result<()> {
    if !(xi > 0.0) || xi > 1.0 {
        return Err(Error::Config(format!(
            "{field}: mode overlap must be in (0, 1], got {xi}"
        )));
    }
    Ok(())
}

/// A fully resolved run configuration. Frequencies are stored in Hz and
/// turned angular by [`RunConfig::frequency_plan`]. Scalar fields come
/// before the nested structs so the whole thing serializes as a TOML
/// provenance block without reordering.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scheme: Scheme,
    pub f_mu_hz: f64,
    /// Intermediate-mode frequency; present exactly when the scheme is
    /// two-step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_i_hz: Option<f64>,
    pub f_po_hz: f64,
    pub t1_k: f64,
    pub t2_k: f64,
    pub occupancy_branch: OccupancyBranch,
    pub intermediate_dielectric_loss: bool,
    pub film: String,
    pub host: String,
    /// Material overlay file, already joined with the config's directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub db_path: Option<PathBuf>,
    pub format: OutputFormat,
    /// One line per default that filled a gap in the file, for provenance.
    pub defaults_applied: Vec<String>,
    pub xi: XiSpec,
    /// Electro-optic strip.
    pub geometry: Geometry,
    /// Kinetic-inductance strip (two-step); defaults to `geometry`.
    pub geometry_ki: Geometry,
    pub solver: SolverOptions,
}

impl RunConfig {
    /// The all-defaults config: the single-step benchmark device.
    pub fn defaults() -> RunConfig {
        parse_file("", Path::new("."))
            .expect("empty config must resolve")
            .run
    }

    /// Build the angular-frequency plan for the configured scheme.
    pub fn frequency_plan(&self) -> Result<FrequencyPlan> {
        let tau = std::f64::consts::TAU;
        match (self.scheme, self.f_i_hz) {
            (Scheme::SingleStep, None) => {
                FrequencyPlan::single_step(tau * self.f_mu_hz, tau * self.f_po_hz)
            }
            (Scheme::TwoStep, Some(f_i)) => {
                FrequencyPlan::two_step(tau * self.f_mu_hz, tau * f_i, tau * self.f_po_hz)
            }
            (Scheme::TwoStep, None) => Err(Error::Config(
                "frequencies.f_i is required when scheme = \"two_step\"".into(),
            )),
            (Scheme::SingleStep, Some(_)) => Err(Error::Config(
                "frequencies.f_i is set but scheme = \"single_step\" has no intermediate mode"
                    .into(),
            )),
        }
    }

    /// Model switches with the overlap factor resolved at the given
    /// low-mode angular frequency.
    pub fn model_options_at(&self, omega_low: f64) -> Result<ModelOptions> {
        Ok(ModelOptions {
            xi: self.xi.eval_at(omega_low)?,
            occupancy_branch: self.occupancy_branch,
            intermediate_dielectric_loss: self.intermediate_dielectric_loss,
            solver: self.solver,
        })
    }

    /// Pull the configured film/host pair out of a database.
    pub fn material_set(&self, db: &MaterialDb) -> Result<MaterialSet> {
        MaterialSet::from_db(db, &self.film, &self.host)
    }

    /// Evaluate the configured design point.
    pub fn evaluate(&self, db: &MaterialDb) -> Result<TransductionPoint> {
        let freqs = self.frequency_plan()?;
        let opts = self.model_options_at(freqs.omega_eo_low())?;
        let mats = self.material_set(db)?;
        match self.scheme {
            Scheme::SingleStep => {
                single_step_point(&self.geometry, &freqs, self.t1_k, &mats, &opts)
            }
            Scheme::TwoStep => two_step_point(
                &self.geometry_ki,
                &self.geometry,
                &freqs,
                self.t1_k,
                self.t2_k,
                &mats,
                &opts,
            ),
        }
    }

    /// Set one parameter by its sweep path (values in base SI units). The
    /// recognized paths are the sweepable scalars:
    /// `geometry.w|L|t`, `geometry_ki.w|L|t`, `frequencies.f_mu|f_i|f_po`
    /// (Hz), `temperatures.T1|T2` (K), and `model.xi`.
    pub fn set_path(&mut self, path: &str, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::Sweep(format!(
                "cannot set {path} to non-finite value {value}"
            )));
        }
        let positive = |what: &str| -> Result<f64> {
            if value > 0.0 {
                Ok(value)
            } else {
                Err(Error::Sweep(format!("{what} must be positive, got {value}")))
            }
        };
        match path {
            "geometry.w" => self.geometry.w = positive(path)?,
            "geometry.L" | "geometry.l" => self.geometry.l = positive(path)?,
            "geometry.t" => self.geometry.t = positive(path)?,
            "geometry_ki.w" => self.geometry_ki.w = positive(path)?,
            "geometry_ki.L" | "geometry_ki.l" => self.geometry_ki.l = positive(path)?,
            "geometry_ki.t" => self.geometry_ki.t = positive(path)?,
            "frequencies.f_mu" => self.f_mu_hz = positive(path)?,
            "frequencies.f_i" => {
                if self.scheme != Scheme::TwoStep {
                    return Err(Error::Sweep(
                        "frequencies.f_i only applies to scheme = \"two_step\"".into(),
                    ));
                }
                self.f_i_hz = Some(positive(path)?);
            }
            "frequencies.f_po" => self.f_po_hz = positive(path)?,
            "temperatures.T1" => {
                if value < 0.0 {
                    return Err(Error::Sweep(format!("{path} cannot be negative")));
                }
                self.t1_k = value;
            }
            "temperatures.T2" => {
                if value < 0.0 {
                    return Err(Error::Sweep(format!("{path} cannot be negative")));
                }
                self.t2_k = value;
            }
            "model.xi" => {
                validate_xi(value, path).map_err(|e| Error::Sweep(e.to_string()))?;
                self.xi = XiSpec::Const(value);
            }
            other => {
                return Err(Error::Sweep(format!(
                    "unknown parameter path `{other}` (expected one of geometry.w, geometry.L, \
                     geometry.t, geometry_ki.w, geometry_ki.L, geometry_ki.t, frequencies.f_mu, \
                     frequencies.f_i, frequencies.f_po, temperatures.T1, temperatures.T2, \
                     model.xi)"
                )));
            }
        }
        Ok(())
    }

    /// Resolve a quantity written for the given path into base SI units.
    pub fn qty_for_path(path: &str, qty: &Qty) -> Result<f64> {
        match path.split('.').next() {
            Some("geometry") | Some("geometry_ki") => qty.length_m(path),
            Some("frequencies") => qty.frequency_hz(path),
            Some("temperatures") => qty.temperature_k(path),
            _ => qty.bare(path).map_err(|e| Error::Sweep(e.to_string())),
        }
    }
}

/// A parsed config file: the resolved run config plus any raw `[sweep]` /
/// `[optimize]` sections for the commands that use them.
#[derive(Debug, Clone)]
pub struct ParsedFile {
    pub run: RunConfig,
    pub sweep: Option<RawSweepSpec>,
    pub optimize: Option<RawOptimizeSpec>,
}

// ---------------------------------------------------------------------
// The raw (serde) dialect. Unknown keys are rejected everywhere so a typo
// cannot silently fall back to a default.

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    scheme: Option<Scheme>,
    frequencies: Option<RawFrequencies>,
    geometry: Option<RawGeometry>,
    geometry_ki: Option<RawGeometry>,
    temperatures: Option<RawTemperatures>,
    model: Option<RawModel>,
    materials: Option<RawMaterials>,
    output: Option<RawOutput>,
    solver: Option<RawSolver>,
    sweep: Option<RawSweepSpec>,
    optimize: Option<RawOptimizeSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrequencies {
    f_mu: Option<Qty>,
    f_i: Option<Qty>,
    f_po: Option<Qty>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    w: Option<Qty>,
    #[serde(rename = "L", alias = "l")]
    l: Option<Qty>,
    t: Option<Qty>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTemperatures {
    #[serde(rename = "T1")]
    t1: Option<Qty>,
    #[serde(rename = "T2")]
    t2: Option<Qty>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    xi: Option<f64>,
    xi_table: Option<String>,
    occupancy_branch: Option<OccupancyBranch>,
    intermediate_dielectric_loss: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMaterials {
    film: Option<String>,
    host: Option<String>,
    db: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    format: Option<OutputFormat>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    #[serde(rename = "tol_K")]
    tol_k: Option<f64>,
    max_iter: Option<u32>,
    scan_points: Option<usize>,
}

/// Parse and resolve a config file. `base_dir` anchors relative paths
/// (material overlay, xi table) — pass the config file's directory.
pub fn parse_file(text: &str, base_dir: &Path) -> Result<ParsedFile> {
    let raw: RawFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let mut defaults = Vec::new();
    let mut noted = |name: &str, value: String| -> String {
        defaults.push(format!("{name} = {value}"));
        value
    };

    let scheme = match raw.scheme {
        Some(s) => s,
        None => {
            noted("scheme", "single_step".into());
            Scheme::SingleStep
        }
    };

    let rf = raw.frequencies.unwrap_or_default();
    let f_mu_hz = match &rf.f_mu {
        Some(q) => q.frequency_hz("frequencies.f_mu")?,
        None => {
            noted("frequencies.f_mu", "8 GHz".into());
            8e9
        }
    };
    let f_po_hz = match &rf.f_po {
        Some(q) => q.frequency_hz("frequencies.f_po")?,
        None => {
            noted("frequencies.f_po", "200 THz".into());
            200e12
        }
    };
    let f_i_hz = rf
        .f_i
        .as_ref()
        .map(|q| q.frequency_hz("frequencies.f_i"))
        .transpose()?;

    let rg = raw.geometry.unwrap_or_default();
    let w = match &rg.w {
        Some(q) => q.length_m("geometry.w")?,
        None => {
            noted("geometry.w", "1 um".into());
            1e-6
        }
    };
    let l = match &rg.l {
        Some(q) => q.length_m("geometry.L")?,
        None => {
            noted("geometry.L", "300 um".into());
            300e-6
        }
    };
    let t = match &rg.t {
        Some(q) => q.length_m("geometry.t")?,
        None => {
            noted("geometry.t", "20 nm".into());
            20e-9
        }
    };
    let geometry = Geometry::new(w, l, t)?;

    let geometry_ki = match raw.geometry_ki {
        None => {
            if scheme == Scheme::TwoStep {
                noted("geometry_ki", "same as geometry".into());
            }
            geometry
        }
        Some(rk) => {
            // Partial overrides inherit the electro-optic strip's fields.
            let w = rk.w.as_ref().map(|q| q.length_m("geometry_ki.w")).transpose()?;
            let l = rk.l.as_ref().map(|q| q.length_m("geometry_ki.L")).transpose()?;
            let t = rk.t.as_ref().map(|q| q.length_m("geometry_ki.t")).transpose()?;
            Geometry::new(
                w.unwrap_or(geometry.w),
                l.unwrap_or(geometry.l),
                t.unwrap_or(geometry.t),
            )?
        }
    };

    let rt = raw.temperatures.unwrap_or_default();
    let t1_k = match &rt.t1 {
        Some(q) => q.temperature_k("temperatures.T1")?,
        None => {
            noted("temperatures.T1", "10 mK".into());
            0.01
        }
    };
    let t2_k = match &rt.t2 {
        Some(q) => q.temperature_k("temperatures.T2")?,
        None => {
            if scheme == Scheme::TwoStep {
                noted("temperatures.T2", "same as T1".into());
            }
            t1_k
        }
    };

    let rm = raw.model.unwrap_or_default();
    let xi = match (rm.xi, &rm.xi_table) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "model.xi and model.xi_table are mutually exclusive".into(),
            ));
        }
        (Some(x), None) => XiSpec::Const(x),
        (None, Some(rel)) => {
            let path = base_dir.join(rel);
            let text = std::fs::read_to_string(&path).map_err(|e| {
                Error::Config(format!("cannot read xi table {}: {e}", path.display()))
            })?;
            XiSpec::Table {
                path: rel.clone(),
                points: parse_two_column_csv(rel, &text)?,
            }
        }
        (None, None) => {
            noted("model.xi", "1".into());
            XiSpec::Const(1.0)
        }
    };
    xi.validate()?;
    let occupancy_branch = match rm.occupancy_branch {
        Some(b) => b,
        None => {
            noted("model.occupancy_branch", "as_printed".into());
            OccupancyBranch::AsPrinted
        }
    };
    let intermediate_dielectric_loss = rm.intermediate_dielectric_loss.unwrap_or(false);

    let rs = raw.solver.unwrap_or_default();
    let mut solver = SolverOptions::default();
    if let Some(tol) = rs.tol_k {
        if !(tol > 0.0) {
            return Err(Error::Config(format!(
                "solver.tol_K must be positive, got {tol}"
            )));
        }
        solver.tol = tol;
    }
    if let Some(n) = rs.max_iter {
        solver.max_iter = n;
    }
    if let Some(n) = rs.scan_points {
        if n < 2 {
            return Err(Error::Config(format!(
                "solver.scan_points must be at least 2, got {n}"
            )));
        }
        solver.scan_points = n;
    }

    let rmat = raw.materials.unwrap_or_default();
    let film = rmat.film.unwrap_or_else(|| noted("materials.film", "NbN".into()));
    let host = rmat
        .host
        .unwrap_or_else(|| noted("materials.host", "LiNbO3".into()));
    let db_path = rmat.db.map(|rel| base_dir.join(rel));

    let format = raw
        .output
        .unwrap_or_default()
        .format
        .unwrap_or_default();

    let run = RunConfig {
        scheme,
        f_mu_hz,
        f_i_hz,
        f_po_hz,
        t1_k,
        t2_k,
        occupancy_branch,
        intermediate_dielectric_loss,
        film,
        host,
        db_path,
        format,
        defaults_applied: defaults,
        xi,
        geometry,
        geometry_ki,
        solver,
    };
    // Fail on scheme/frequency mismatches now, not at evaluation time.
    run.frequency_plan()?;
    Ok(ParsedFile {
        run,
        sweep: raw.sweep,
        optimize: raw.optimize,
    })
}
