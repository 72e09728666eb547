//! Parameter exploration on top of single-point evaluation: grid sweeps,
//! the canned figure datasets, and a deterministic geometry optimizer.
//!
//! All three walk a cartesian grid of parameter values, evaluate the design
//! point at each node, and collect rows into a [`ResultTable`]. Rows are
//! ordered with the **last axis fastest** (row-major in axis order), grids
//! are generated from exact endpoints, and parallel evaluation preserves
//! ordering, so the same spec always produces byte-identical output.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Qty, RunConfig};
use crate::error::{Error, Result};
use crate::materials::MaterialDb;
use crate::table::{format_f64, Cell, ResultTable};
use crate::transducer::{
    open_loop_dt_eo, open_loop_dt_ki, single_step_point, two_step_point, MaterialSet, Scheme,
    TransductionPoint,
};

/// Spacing of grid points along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Linear,
    Log,
}

/// One sweep axis: a parameter path and a grid over it (base SI units).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub path: String,
    pub grid: GridKind,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    /// Grid values, endpoints exact. A one-point axis is the pinned value.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        if n == 1 {
            return vec![self.min];
        }
        let mut vals: Vec<f64> = match self.grid {
            GridKind::Linear => (0..n)
                .map(|i| self.min + (self.max - self.min) * i as f64 / (n - 1) as f64)
                .collect(),
            GridKind::Log => {
                let (a, b) = (self.min.ln(), self.max.ln());
                (0..n)
                    .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                    .collect()
            }
        };
        vals[0] = self.min;
        vals[n - 1] = self.max;
        vals
    }

    fn validate(&self, run: &RunConfig) -> Result<()> {
        let p = &self.path;
        if self.count == 0 {
            return Err(Error::Sweep(format!("{p}: count must be at least 1")));
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::Sweep(format!("{p}: bounds must be finite")));
        }
        if self.count == 1 {
            if self.min != self.max {
                return Err(Error::Sweep(format!(
                    "{p}: count = 1 pins the axis and requires min == max"
                )));
            }
        } else if !(self.min < self.max) {
            return Err(Error::Sweep(format!(
                "{p}: min must be strictly below max, got {} and {}",
                format_f64(self.min),
                format_f64(self.max)
            )));
        }
        if self.grid == GridKind::Log && !(self.min > 0.0) {
            return Err(Error::Sweep(format!(
                "{p}: log grids need a positive lower bound, got {}",
                format_f64(self.min)
            )));
        }
        // Probe the path on a copy so unknown names and scheme mismatches
        // surface before any evaluation. A zero linear lower bound is legal
        // for temperatures, so probe with a value the path accepts.
        let probe = if self.min > 0.0 { self.min } else { self.max };
        run.clone().set_path(p, probe)?;
        Ok(())
    }
}

/// Output column name for a sweep axis.
pub fn axis_column(path: &str) -> Result<&'static str> {
    Ok(match path {
        "geometry.w" => "w_m",
        "geometry.L" | "geometry.l" => "L_m",
        "geometry.t" => "t_m",
        "geometry_ki.w" => "w_ki_m",
        "geometry_ki.L" | "geometry_ki.l" => "L_ki_m",
        "geometry_ki.t" => "t_ki_m",
        "frequencies.f_mu" => "f_mu_Hz",
        "frequencies.f_i" => "f_i_Hz",
        "frequencies.f_po" => "f_po_Hz",
        "temperatures.T1" => "T1_K",
        "temperatures.T2" => "T2_K",
        "model.xi" => "xi",
        other => {
            return Err(Error::Sweep(format!(
                "no output column for parameter path `{other}`"
            )));
        }
    })
}

/// Raw `[sweep]` section: one `[[sweep.axes]]` entry per axis, each with
/// `path`, `grid`, `min`, `max`, `count`. Quantities take unit suffixes.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweepSpec {
    #[serde(rename = "axes", alias = "axis")]
    pub axes: Vec<RawAxis>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAxis {
    pub path: String,
    pub grid: GridKind,
    pub min: Qty,
    pub max: Qty,
    pub count: usize,
}

/// A resolved, validated sweep: every axis named, bounded, and probed
/// against the run config it will modify.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
}

impl SweepSpec {
    pub fn resolve(raw: &RawSweepSpec, run: &RunConfig) -> Result<SweepSpec> {
        if raw.axes.is_empty() {
            return Err(Error::Sweep("a sweep needs at least one axis".into()));
        }
        let mut axes = Vec::with_capacity(raw.axes.len());
        for ra in &raw.axes {
            let axis = Axis {
                path: ra.path.clone(),
                grid: ra.grid,
                min: RunConfig::qty_for_path(&ra.path, &ra.min)?,
                max: RunConfig::qty_for_path(&ra.path, &ra.max)?,
                count: ra.count,
            };
            axis_column(&axis.path)?;
            axis.validate(run)?;
            axes.push(axis);
        }
        for i in 1..axes.len() {
            if axes[..i].iter().any(|a| a.path == axes[i].path) {
                return Err(Error::Sweep(format!(
                    "parameter path `{}` appears on two axes",
                    axes[i].path
                )));
            }
        }
        let spec = SweepSpec { axes };
        spec.total_points()?;
        Ok(spec)
    }

    pub fn total_points(&self) -> Result<usize> {
        let mut total = 1usize;
        for a in &self.axes {
            total = total.checked_mul(a.count).ok_or_else(|| {
                Error::Sweep("sweep grid size overflows".into())
            })?;
        }
        if total > 100_000_000 {
            return Err(Error::Sweep(format!(
                "sweep asks for {total} points; cap is 100000000"
            )));
        }
        Ok(total)
    }
}

// ---------------------------------------------------------------------
// Point rows: the value columns shared by `point`, sweeps, and the
// optimizer's best-row output.

/// Value columns for a scheme, in row order. Single-step rows carry the
/// end-to-end efficiency and added occupancy plus the stage's temperature
/// rise and pump level; two-step rows add the per-stage breakdown
/// (mixer stage first, electro-optic stage second).
pub fn point_columns(scheme: Scheme) -> Vec<&'static str> {
    match scheme {
        Scheme::SingleStep => vec!["eta1", "n_mu1", "dT_eo_K", "npump_eo", "flags"],
        Scheme::TwoStep => vec![
            "eta2", "n_mu2", "eta_ki", "eta_eo", "n_mu_ki", "n_i_eo", "dT_ki_K", "dT_eo_K",
            "npump_ki", "npump_eo", "flags",
        ],
    }
}

/// Cells matching [`point_columns`] for an evaluated point.
pub fn point_cells(p: &TransductionPoint) -> Vec<Cell> {
    let flags = Cell::Text(p.flags.to_string());
    match p.scheme {
        Scheme::SingleStep => {
            let eo = &p.stages[0];
            vec![
                Cell::Num(p.eta_total),
                Cell::Num(p.n_total),
                Cell::Num(eo.thermal.delta_t),
                Cell::Num(eo.pump_photons),
                flags,
            ]
        }
        Scheme::TwoStep => {
            let (ki, eo) = (&p.stages[0], &p.stages[1]);
            vec![
                Cell::Num(p.eta_total),
                Cell::Num(p.n_total),
                Cell::Num(ki.eta_ext),
                Cell::Num(eo.eta_ext),
                Cell::Num(ki.n_added),
                Cell::Num(eo.n_added),
                Cell::Num(ki.thermal.delta_t),
                Cell::Num(eo.thermal.delta_t),
                Cell::Num(ki.pump_photons),
                Cell::Num(eo.pump_photons),
                flags,
            ]
        }
    }
}

fn eval_config(cfg: &RunConfig, mats: &MaterialSet) -> Result<TransductionPoint> {
    let plan = cfg.frequency_plan()?;
    let opts = cfg.model_options_at(plan.omega_eo_low())?;
    match cfg.scheme {
        Scheme::SingleStep => single_step_point(&cfg.geometry, &plan, cfg.t1_k, mats, &opts),
        Scheme::TwoStep => two_step_point(
            &cfg.geometry_ki,
            &cfg.geometry,
            &plan,
            cfg.t1_k,
            cfg.t2_k,
            mats,
            &opts,
        ),
    }
}

/// Walk the cartesian grid (last axis fastest), evaluate each node, and map
/// it to a row. Parallel but order-preserving.
fn grid_rows<F>(
    run: &RunConfig,
    axes: &[Axis],
    mats: &MaterialSet,
    row_fn: F,
) -> Result<Vec<Vec<Cell>>>
where
    F: Fn(&[f64], &RunConfig, &TransductionPoint) -> Result<Vec<Cell>> + Sync,
{
    let values: Vec<Vec<f64>> = axes.iter().map(Axis::values).collect();
    let total: usize = values.iter().map(Vec::len).product();
    (0..total)
        .into_par_iter()
        .map(|k| {
            let mut coords = vec![0.0; axes.len()];
            let mut rem = k;
            for (j, vals) in values.iter().enumerate().rev() {
                coords[j] = vals[rem % vals.len()];
                rem /= vals.len();
            }
            let mut cfg = run.clone();
            for (axis, &v) in axes.iter().zip(&coords) {
                cfg.set_path(&axis.path, v)?;
            }
            let at = || {
                axes.iter()
                    .zip(&coords)
                    .map(|(a, &v)| format!("{} = {}", a.path, format_f64(v)))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let point = eval_config(&cfg, mats)
                .map_err(|e| Error::Sweep(format!("at {}: {e}", at())))?;
            row_fn(&coords, &cfg, &point)
        })
        .collect()
}

/// Run a sweep: axis columns (in axis order) followed by the scheme's value
/// columns, one row per grid node.
pub fn run_sweep(run: &RunConfig, spec: &SweepSpec, db: &MaterialDb) -> Result<ResultTable> {
    let mats = run.material_set(db)?;
    let mut columns: Vec<&'static str> = Vec::new();
    for a in &spec.axes {
        columns.push(axis_column(&a.path)?);
    }
    columns.extend(point_columns(run.scheme));
    let mut table = ResultTable::new(columns)?;
    let rows = grid_rows(run, &spec.axes, &mats, |coords, _cfg, point| {
        let mut row: Vec<Cell> = coords.iter().map(|&v| Cell::Num(v)).collect();
        row.extend(point_cells(point));
        Ok(row)
    })?;
    for row in rows {
        table.push_row(row)?;
    }
    Ok(table)
}

// ---------------------------------------------------------------------
// Canned figure datasets.

/// The datasets the `figure` command can reproduce. Each id pins a base
/// config, a grid, and output columns; the pairs (`1c`/`1d`, `2c`/`2d`,
/// `3e`/`3f`) plot different columns of the same dataset and therefore
/// emit identical tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FigureId {
    Fig1c,
    Fig1d,
    Fig2c,
    Fig2d,
    Fig3e,
    Fig3f,
    FigIii,
    FigIv,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::Fig1c,
        FigureId::Fig1d,
        FigureId::Fig2c,
        FigureId::Fig2d,
        FigureId::Fig3e,
        FigureId::Fig3f,
        FigureId::FigIii,
        FigureId::FigIv,
    ];

    fn tag(self) -> &'static str {
        match self {
            FigureId::Fig1c => "1c",
            FigureId::Fig1d => "1d",
            FigureId::Fig2c => "2c",
            FigureId::Fig2d => "2d",
            FigureId::Fig3e => "3e",
            FigureId::Fig3f => "3f",
            FigureId::FigIii => "III",
            FigureId::FigIv => "IV",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            FigureId::Fig1c => "single-step efficiency over the (w, L) plane at 10 mK",
            FigureId::Fig1d => "single-step added occupancy over the (w, L) plane at 10 mK",
            FigureId::Fig2c => "two-step efficiency over the electro-optic (w, L) plane",
            FigureId::Fig2d => "two-step added occupancy over the electro-optic (w, L) plane",
            FigureId::Fig3e => "two-step efficiency vs intermediate frequency at 10 mK and 1 K",
            FigureId::Fig3f => "two-step occupancy vs intermediate frequency at 10 mK and 1 K",
            FigureId::FigIii => "electro-optic stage temperature rise over the (w, L) plane",
            FigureId::FigIv => "mixer stage temperature rise over the (w, L) plane",
        }
    }
}

impl std::fmt::Display for FigureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "fig{}", self.tag())
    }
}

impl std::str::FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<FigureId> {
        let norm = s.trim().to_ascii_lowercase();
        let norm = norm.strip_prefix("fig").unwrap_or(&norm);
        for id in FigureId::ALL {
            if norm == id.tag().to_ascii_lowercase() {
                return Ok(id);
            }
        }
        let known: Vec<String> = FigureId::ALL.iter().map(|i| i.to_string()).collect();
        Err(Error::Config(format!(
            "unknown figure `{s}` (expected one of {})",
            known.join(", ")
        )))
    }
}

/// A figure's pinned recipe: base config, grid, and column names.
#[derive(Debug, Clone)]
pub struct FigureSpec {
    pub id: FigureId,
    pub run: RunConfig,
    pub axes: Vec<Axis>,
    pub columns: Vec<&'static str>,
}

fn figure_base(id: FigureId) -> RunConfig {
    let mut run = RunConfig::defaults();
    match id {
        FigureId::Fig1c | FigureId::Fig1d => {}
        _ => {
            run.scheme = Scheme::TwoStep;
            run.f_i_hz = Some(600e9);
        }
    }
    run.defaults_applied = vec![format!("figure preset {id}")];
    run
}

fn wl_axes(target: &str, count: usize) -> Vec<Axis> {
    vec![
        Axis {
            path: format!("{target}.w"),
            grid: GridKind::Log,
            min: 0.2e-6,
            max: 20e-6,
            count,
        },
        Axis {
            path: format!("{target}.L"),
            grid: GridKind::Log,
            min: 10e-6,
            max: 1e-2,
            count,
        },
    ]
}

/// The frozen recipe for a figure id.
pub fn figure_spec(id: FigureId) -> FigureSpec {
    let run = figure_base(id);
    let (axes, columns) = match id {
        FigureId::Fig1c | FigureId::Fig1d => (
            wl_axes("geometry", 60),
            vec!["w_m", "L_m", "eta1", "n_mu1", "flags"],
        ),
        FigureId::Fig2c | FigureId::Fig2d => (
            wl_axes("geometry", 60),
            vec!["w_m", "L_m", "eta2", "n_mu2", "flags"],
        ),
        FigureId::Fig3e | FigureId::Fig3f => (
            vec![
                Axis {
                    path: "temperatures.T2".into(),
                    grid: GridKind::Linear,
                    min: 0.01,
                    max: 1.0,
                    count: 2,
                },
                Axis {
                    path: "frequencies.f_i".into(),
                    grid: GridKind::Log,
                    min: 10e9,
                    max: 1e12,
                    count: 60,
                },
            ],
            vec!["omega_i_rad_s", "T2_K", "eta2", "n_mu2", "flags"],
        ),
        FigureId::FigIii => (
            wl_axes("geometry", 24),
            vec!["w_m", "L_m", "dT_eo_K", "dT_eo_open_K", "flags"],
        ),
        FigureId::FigIv => (
            wl_axes("geometry_ki", 24),
            vec!["w_m", "L_m", "dT_ki_K", "dT_ki_open_K", "flags"],
        ),
    };
    FigureSpec { id, run, axes, columns }
}

/// Compute a figure's dataset.
pub fn figure_table(id: FigureId, db: &MaterialDb) -> Result<ResultTable> {
    let spec = figure_spec(id);
    let mats = spec.run.material_set(db)?;
    let rows = match id {
        FigureId::Fig1c | FigureId::Fig1d | FigureId::Fig2c | FigureId::Fig2d => {
            grid_rows(&spec.run, &spec.axes, &mats, |coords, _cfg, p| {
                Ok(vec![
                    Cell::Num(coords[0]),
                    Cell::Num(coords[1]),
                    Cell::Num(p.eta_total),
                    Cell::Num(p.n_total),
                    Cell::Text(p.flags.to_string()),
                ])
            })?
        }
        FigureId::Fig3e | FigureId::Fig3f => {
            grid_rows(&spec.run, &spec.axes, &mats, |coords, _cfg, p| {
                Ok(vec![
                    Cell::Num(std::f64::consts::TAU * coords[1]),
                    Cell::Num(coords[0]),
                    Cell::Num(p.eta_total),
                    Cell::Num(p.n_total),
                    Cell::Text(p.flags.to_string()),
                ])
            })?
        }
        FigureId::FigIii => grid_rows(&spec.run, &spec.axes, &mats, |coords, cfg, p| {
            let plan = cfg.frequency_plan()?;
            let opts = cfg.model_options_at(plan.omega_eo_low())?;
            let open = open_loop_dt_eo(&cfg.geometry, &plan, cfg.t2_k, &mats, &opts)?;
            Ok(vec![
                Cell::Num(coords[0]),
                Cell::Num(coords[1]),
                Cell::Num(p.stages[1].thermal.delta_t),
                Cell::Num(open),
                Cell::Text(p.flags.to_string()),
            ])
        })?,
        FigureId::FigIv => grid_rows(&spec.run, &spec.axes, &mats, |coords, cfg, p| {
            let plan = cfg.frequency_plan()?;
            let opts = cfg.model_options_at(plan.omega_eo_low())?;
            let open = open_loop_dt_ki(&cfg.geometry_ki, &plan, cfg.t1_k, &mats, &opts)?;
            Ok(vec![
                Cell::Num(coords[0]),
                Cell::Num(coords[1]),
                Cell::Num(p.stages[0].thermal.delta_t),
                Cell::Num(open),
                Cell::Text(p.flags.to_string()),
            ])
        })?,
    };
    let mut table = ResultTable::new(spec.columns)?;
    for row in rows {
        table.push_row(row)?;
    }
    Ok(table)
}

// ---------------------------------------------------------------------
// Geometry optimization.

/// Raw `[optimize]` section. Bounds are two-element arrays; `n_max` (the
/// ceiling on total added occupancy) is required. `f_i` bounds add a third
/// axis and need a two-step scheme.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOptimizeSpec {
    pub w: Option<[Qty; 2]>,
    #[serde(rename = "L", alias = "l")]
    pub l: Option<[Qty; 2]>,
    pub f_i: Option<[Qty; 2]>,
    pub n_max: Option<f64>,
    pub grid: Option<usize>,
    pub rounds: Option<usize>,
    pub budget: Option<usize>,
}

/// Resolved optimizer settings. The search keeps both strips on the shared
/// candidate footprint (w, L): a two-step device is co-fabricated, and for
/// a single-step device the mixer strip is unused anyway.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeSpec {
    pub w_bounds: (f64, f64),
    pub l_bounds: (f64, f64),
    pub f_i_bounds: Option<(f64, f64)>,
    pub n_max: f64,
    pub grid: usize,
    pub rounds: usize,
    pub budget: Option<usize>,
}

impl OptimizeSpec {
    pub fn resolve(raw: &RawOptimizeSpec, run: &RunConfig) -> Result<OptimizeSpec> {
        let n_max = raw.n_max.ok_or_else(|| {
            Error::Config("optimize.n_max (added-occupancy ceiling) is required".into())
        })?;
        if !(n_max > 0.0) || !n_max.is_finite() {
            return Err(Error::Config(format!(
                "optimize.n_max must be positive and finite, got {n_max}"
            )));
        }
        let bounds = |field: &str, raw: &Option<[Qty; 2]>, default: (f64, f64)| -> Result<(f64, f64)> {
            let Some([lo, hi]) = raw else {
                return Ok(default);
            };
            let lo = lo.length_m(field)?;
            let hi = hi.length_m(field)?;
            if lo > hi {
                return Err(Error::Config(format!(
                    "{field}: lower bound {} exceeds upper bound {}",
                    format_f64(lo),
                    format_f64(hi)
                )));
            }
            Ok((lo, hi))
        };
        let w_bounds = bounds("optimize.w", &raw.w, (0.2e-6, 20e-6))?;
        let l_bounds = bounds("optimize.L", &raw.l, (10e-6, 1e-2))?;
        let f_i_bounds = match &raw.f_i {
            None => None,
            Some([lo, hi]) => {
                if run.scheme != Scheme::TwoStep {
                    return Err(Error::Config(
                        "optimize.f_i needs scheme = \"two_step\"".into(),
                    ));
                }
                let lo = lo.frequency_hz("optimize.f_i")?;
                let hi = hi.frequency_hz("optimize.f_i")?;
                if lo > hi {
                    return Err(Error::Config(
                        "optimize.f_i: lower bound exceeds upper bound".into(),
                    ));
                }
                Some((lo, hi))
            }
        };
        let grid = raw.grid.unwrap_or(9);
        if grid < 2 {
            return Err(Error::Config(format!(
                "optimize.grid must be at least 2, got {grid}"
            )));
        }
        let rounds = raw.rounds.unwrap_or(3);
        if rounds < 1 {
            return Err(Error::Config("optimize.rounds must be at least 1".into()));
        }
        if raw.budget == Some(0) {
            return Err(Error::Config("optimize.budget must be at least 1".into()));
        }
        Ok(OptimizeSpec {
            w_bounds,
            l_bounds,
            f_i_bounds,
            n_max,
            grid,
            rounds,
            budget: raw.budget,
        })
    }
}

/// The best design the search found, with its full evaluated point.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub w: f64,
    pub l: f64,
    pub f_i_hz: Option<f64>,
    pub point: TransductionPoint,
}

/// One refinement round's bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTrace {
    pub round: usize,
    pub w_bounds: (f64, f64),
    pub l_bounds: (f64, f64),
    pub f_i_bounds: Option<(f64, f64)>,
    pub evaluated: usize,
    pub best_eta: Option<f64>,
    pub best_w: Option<f64>,
    pub best_l: Option<f64>,
    pub best_f_i_hz: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct OptimizeOutcome {
    /// None when no candidate satisfied the feasibility rules.
    pub best: Option<Candidate>,
    pub evaluations: usize,
    pub budget_exhausted: bool,
    pub trace: Vec<RoundTrace>,
}

impl OptimizeOutcome {
    /// One-row table for the winning design: its coordinates followed by
    /// the usual point columns.
    pub fn best_table(&self) -> Result<ResultTable> {
        let best = self.best.as_ref().ok_or_else(|| {
            Error::Infeasible("no design satisfied the noise ceiling".into())
        })?;
        let mut columns = vec!["w_m", "L_m"];
        if best.f_i_hz.is_some() {
            columns.push("f_i_Hz");
        }
        columns.extend(point_columns(best.point.scheme));
        let mut table = ResultTable::new(columns)?;
        let mut row = vec![Cell::Num(best.w), Cell::Num(best.l)];
        if let Some(f) = best.f_i_hz {
            row.push(Cell::Num(f));
        }
        row.extend(point_cells(&best.point));
        table.push_row(row)?;
        Ok(table)
    }

    /// Per-round search trace as a table (for sidecars and verbose output).
    pub fn trace_table(&self) -> Result<ResultTable> {
        let with_f_i = self.trace.iter().any(|r| r.f_i_bounds.is_some());
        let mut columns = vec!["round", "w_lo_m", "w_hi_m", "L_lo_m", "L_hi_m"];
        if with_f_i {
            columns.extend(["f_i_lo_Hz", "f_i_hi_Hz"]);
        }
        columns.extend(["evaluated", "best_eta", "best_w_m", "best_L_m"]);
        if with_f_i {
            columns.push("best_f_i_Hz");
        }
        let mut table = ResultTable::new(columns)?;
        for r in &self.trace {
            let opt = |v: Option<f64>| v.map(Cell::Num).unwrap_or(Cell::Text(String::new()));
            let mut row = vec![
                Cell::Num(r.round as f64),
                Cell::Num(r.w_bounds.0),
                Cell::Num(r.w_bounds.1),
                Cell::Num(r.l_bounds.0),
                Cell::Num(r.l_bounds.1),
            ];
            if with_f_i {
                let (lo, hi) = r.f_i_bounds.unwrap_or((f64::NAN, f64::NAN));
                row.push(Cell::Num(lo));
                row.push(Cell::Num(hi));
            }
            row.push(Cell::Num(r.evaluated as f64));
            row.push(opt(r.best_eta));
            row.push(opt(r.best_w));
            row.push(opt(r.best_l));
            if with_f_i {
                row.push(opt(r.best_f_i_hz));
            }
            table.push_row(row)?;
        }
        Ok(table)
    }
}

fn log_grid(bounds: (f64, f64), n: usize) -> Vec<f64> {
    if bounds.0 == bounds.1 {
        return vec![bounds.0];
    }
    Axis {
        path: String::new(),
        grid: GridKind::Log,
        min: bounds.0,
        max: bounds.1,
        count: n,
    }
    .values()
}

/// Shrink bounds to one grid step either side of the best value, clamped
/// to the current bounds. Pinned axes stay pinned.
fn refine(bounds: (f64, f64), grid: usize, best: f64) -> (f64, f64) {
    if bounds.0 == bounds.1 {
        return bounds;
    }
    let step = (bounds.1.ln() - bounds.0.ln()) / (grid - 1) as f64;
    let lo = (best.ln() - step).exp().max(bounds.0);
    let hi = (best.ln() + step).exp().min(bounds.1);
    (lo, hi)
}

/// Maximize end-to-end efficiency over the strip footprint (and optionally
/// the intermediate frequency) subject to a noise ceiling, by successive
/// grid refinement: evaluate a log-spaced grid, shrink the box one grid
/// step around the winner, repeat. Deterministic for a given spec; a
/// budget caps total evaluations.
///
/// Feasible means: the point evaluated cleanly, did not run away, is not
/// below optical cutoff, did not saturate the occupancy cap, and its total
/// added occupancy is at most `n_max`. Candidates that fail to evaluate
/// (e.g. a film driven normal) are treated as infeasible rather than
/// aborting the search.
pub fn optimize_geometry(
    run: &RunConfig,
    spec: &OptimizeSpec,
    db: &MaterialDb,
) -> Result<OptimizeOutcome> {
    let mats = run.material_set(db)?;
    let mut w_bounds = spec.w_bounds;
    let mut l_bounds = spec.l_bounds;
    let mut f_i_bounds = spec.f_i_bounds;
    let mut best: Option<Candidate> = None;
    let mut evaluations = 0usize;
    let mut budget_exhausted = false;
    let mut trace = Vec::new();

    'rounds: for round in 1..=spec.rounds {
        let ws = log_grid(w_bounds, spec.grid);
        let ls = log_grid(l_bounds, spec.grid);
        let fs: Vec<Option<f64>> = match f_i_bounds {
            Some(b) => log_grid(b, spec.grid).into_iter().map(Some).collect(),
            None => vec![None],
        };
        let mut candidates: Vec<(f64, f64, Option<f64>)> = Vec::new();
        for &w in &ws {
            for &l in &ls {
                for &f in &fs {
                    candidates.push((w, l, f));
                }
            }
        }
        if let Some(budget) = spec.budget {
            let remaining = budget - evaluations;
            if candidates.len() > remaining {
                candidates.truncate(remaining);
                budget_exhausted = true;
            }
        }
        let evaluated = candidates.len();
        evaluations += evaluated;

        let points: Vec<Option<TransductionPoint>> = candidates
            .par_iter()
            .map(|&(w, l, f)| {
                let mut cfg = run.clone();
                cfg.set_path("geometry.w", w).ok()?;
                cfg.set_path("geometry.L", l).ok()?;
                cfg.set_path("geometry_ki.w", w).ok()?;
                cfg.set_path("geometry_ki.L", l).ok()?;
                if let Some(f) = f {
                    cfg.set_path("frequencies.f_i", f).ok()?;
                }
                eval_config(&cfg, &mats).ok()
            })
            .collect();

        for (&(w, l, f), point) in candidates.iter().zip(points) {
            let Some(point) = point else { continue };
            let feasible = !point.flags.runaway
                && !point.flags.cutoff
                && !point.flags.saturated
                && point.n_total <= spec.n_max;
            if !feasible {
                continue;
            }
            if best.as_ref().is_none_or(|b| point.eta_total > b.point.eta_total) {
                best = Some(Candidate { w, l, f_i_hz: f, point });
            }
        }

        trace.push(RoundTrace {
            round,
            w_bounds,
            l_bounds,
            f_i_bounds,
            evaluated,
            best_eta: best.as_ref().map(|b| b.point.eta_total),
            best_w: best.as_ref().map(|b| b.w),
            best_l: best.as_ref().map(|b| b.l),
            best_f_i_hz: best.as_ref().and_then(|b| b.f_i_hz),
        });

        let Some(b) = &best else {
            // Nothing feasible on the coarse grid; refining has no anchor.
            break 'rounds;
        };
        if budget_exhausted || Some(evaluations) == spec.budget {
            budget_exhausted = true;
            break 'rounds;
        }
        w_bounds = refine(w_bounds, spec.grid, b.w);
        l_bounds = refine(l_bounds, spec.grid, b.l);
        if let (Some(bounds), Some(f)) = (f_i_bounds, b.f_i_hz) {
            f_i_bounds = Some(refine(bounds, spec.grid, f));
        }
    }

    Ok(OptimizeOutcome {
        best,
        evaluations,
        budget_exhausted,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_file;
    use crate::materials::builtin_db;
    use std::path::Path;
    use std::str::FromStr;

    fn two_step_run() -> RunConfig {
        let mut run = RunConfig::defaults();
        run.scheme = Scheme::TwoStep;
        run.f_i_hz = Some(600e9);
        run
    }

    #[test]
    fn axis_values_hit_endpoints_exactly() {
        let lin = Axis {
            path: "temperatures.T2".into(),
            grid: GridKind::Linear,
            min: 0.01,
            max: 1.0,
            count: 2,
        };
        assert_eq!(lin.values(), vec![0.01, 1.0]);

        let log = Axis {
            path: "geometry.w".into(),
            grid: GridKind::Log,
            min: 0.2e-6,
            max: 20e-6,
            count: 60,
        };
        let vals = log.values();
        assert_eq!(vals.len(), 60);
        assert_eq!(vals[0], 0.2e-6);
        assert_eq!(vals[59], 20e-6);
        assert!(vals.windows(2).all(|p| p[0] < p[1]));
        // Log spacing: constant ratio between neighbours.
        let r0 = vals[1] / vals[0];
        let r1 = vals[31] / vals[30];
        assert!((r0 / r1 - 1.0).abs() < 1e-12);

        let pinned = Axis {
            path: "geometry.L".into(),
            grid: GridKind::Log,
            min: 3e-4,
            max: 3e-4,
            count: 1,
        };
        assert_eq!(pinned.values(), vec![3e-4]);
    }

    #[test]
    fn sweep_spec_rejects_bad_axes_before_evaluating() {
        let run = RunConfig::defaults();
        let resolve = |text: &str| -> Result<SweepSpec> {
            let parsed = parse_file(text, Path::new(".")).unwrap();
            SweepSpec::resolve(&parsed.sweep.unwrap(), &run)
        };
        let ok = resolve(
            "[sweep]\n[[sweep.axes]]\npath = \"geometry.w\"\ngrid = \"log\"\nmin = \"0.5um\"\nmax = \"2um\"\ncount = 3",
        )
        .unwrap();
        assert_eq!(ok.total_points().unwrap(), 3);

        for bad in [
            // unknown path
            "[sweep]\n[[sweep.axes]]\npath = \"geometry.q\"\ngrid = \"log\"\nmin = 1e-6\nmax = 2e-6\ncount = 3",
            // min above max
            "[sweep]\n[[sweep.axes]]\npath = \"geometry.w\"\ngrid = \"log\"\nmin = 2e-6\nmax = 1e-6\ncount = 3",
            // log grid from zero
            "[sweep]\n[[sweep.axes]]\npath = \"temperatures.T2\"\ngrid = \"log\"\nmin = 0\nmax = 1\ncount = 3",
            // zero count
            "[sweep]\n[[sweep.axes]]\npath = \"geometry.w\"\ngrid = \"log\"\nmin = 1e-6\nmax = 2e-6\ncount = 0",
            // intermediate frequency on a single-step run
            "[sweep]\n[[sweep.axes]]\npath = \"frequencies.f_i\"\ngrid = \"log\"\nmin = \"10GHz\"\nmax = \"1THz\"\ncount = 3",
            // duplicated axis
            "[sweep]\n[[sweep.axes]]\npath = \"geometry.w\"\ngrid = \"log\"\nmin = 1e-6\nmax = 2e-6\ncount = 3\n[[sweep.axes]]\npath = \"geometry.w\"\ngrid = \"log\"\nmin = 1e-6\nmax = 2e-6\ncount = 3",
        ] {
            assert!(resolve(bad).is_err(), "should reject: {bad}");
        }
    }

    #[test]
    fn sweep_rows_run_last_axis_fastest() {
        let run = two_step_run();
        let spec = SweepSpec {
            axes: vec![
                Axis {
                    path: "temperatures.T2".into(),
                    grid: GridKind::Linear,
                    min: 0.01,
                    max: 1.0,
                    count: 2,
                },
                Axis {
                    path: "frequencies.f_i".into(),
                    grid: GridKind::Log,
                    min: 100e9,
                    max: 1000e9,
                    count: 3,
                },
            ],
        };
        let table = run_sweep(&run, &spec, &builtin_db()).unwrap();
        assert_eq!(table.columns()[..2], ["T2_K".to_string(), "f_i_Hz".to_string()]);
        assert_eq!(table.rows().len(), 6);
        let col = |r: usize, c: usize| table.rows()[r][c].as_f64().unwrap();
        let f_vals = spec.axes[1].values();
        for (r, expect_t2) in [(0, 0.01), (1, 0.01), (2, 0.01), (3, 1.0), (4, 1.0), (5, 1.0)] {
            assert_eq!(col(r, 0), expect_t2);
            assert_eq!(col(r, 1), f_vals[r % 3]);
        }
        // Value columns follow the two-step layout.
        assert_eq!(table.columns().len(), 2 + point_columns(Scheme::TwoStep).len());
        for r in 0..6 {
            let eta = col(r, 2);
            assert!(eta > 0.0 && eta <= 1.0, "eta2 out of range: {eta}");
        }
    }

    #[test]
    fn degenerate_sweep_matches_direct_evaluation() {
        let run = two_step_run();
        let spec = SweepSpec {
            axes: vec![Axis {
                path: "geometry.w".into(),
                grid: GridKind::Linear,
                min: 1e-6,
                max: 1e-6,
                count: 1,
            }],
        };
        let table = run_sweep(&run, &spec, &builtin_db()).unwrap();
        assert_eq!(table.rows().len(), 1);
        let direct = run.evaluate(&builtin_db()).unwrap();
        let row = &table.rows()[0];
        assert_eq!(row[0].as_f64().unwrap(), 1e-6);
        assert_eq!(row[1].as_f64().unwrap(), direct.eta_total);
        assert_eq!(row[2].as_f64().unwrap(), direct.n_total);
    }

    #[test]
    fn figure_ids_parse_and_print() {
        for id in FigureId::ALL {
            assert_eq!(FigureId::from_str(&id.to_string()).unwrap(), id);
            assert_eq!(FigureId::from_str(id.tag()).unwrap(), id);
        }
        assert_eq!(FigureId::from_str("FIG2C").unwrap(), FigureId::Fig2c);
        assert_eq!(FigureId::from_str("iii").unwrap(), FigureId::FigIii);
        assert!(FigureId::from_str("fig9z").is_err());
    }

    #[test]
    fn figure_recipes_are_frozen() {
        // These recipes are a compatibility surface: plots regenerated from
        // them must not drift between releases.
        let wl = |spec: &FigureSpec, target: &str, count: usize| {
            assert_eq!(spec.axes.len(), 2);
            assert_eq!(spec.axes[0].path, format!("{target}.w"));
            assert_eq!(
                (spec.axes[0].min, spec.axes[0].max, spec.axes[0].count),
                (0.2e-6, 20e-6, count)
            );
            assert_eq!(spec.axes[1].path, format!("{target}.L"));
            assert_eq!(
                (spec.axes[1].min, spec.axes[1].max, spec.axes[1].count),
                (10e-6, 1e-2, count)
            );
            assert!(spec.axes.iter().all(|a| a.grid == GridKind::Log));
        };

        for id in [FigureId::Fig1c, FigureId::Fig1d] {
            let s = figure_spec(id);
            assert_eq!(s.run.scheme, Scheme::SingleStep);
            assert_eq!(s.run.t1_k, 0.01);
            wl(&s, "geometry", 60);
            assert_eq!(s.columns, ["w_m", "L_m", "eta1", "n_mu1", "flags"]);
        }
        for id in [FigureId::Fig2c, FigureId::Fig2d] {
            let s = figure_spec(id);
            assert_eq!(s.run.scheme, Scheme::TwoStep);
            assert_eq!(s.run.f_i_hz, Some(600e9));
            assert_eq!((s.run.t1_k, s.run.t2_k), (0.01, 0.01));
            // Mixer strip stays at the benchmark footprint while the
            // electro-optic strip sweeps.
            assert_eq!(s.run.geometry_ki.w, 1e-6);
            assert_eq!(s.run.geometry_ki.l, 300e-6);
            wl(&s, "geometry", 60);
            assert_eq!(s.columns, ["w_m", "L_m", "eta2", "n_mu2", "flags"]);
        }
        for id in [FigureId::Fig3e, FigureId::Fig3f] {
            let s = figure_spec(id);
            assert_eq!(s.run.scheme, Scheme::TwoStep);
            assert_eq!(s.axes[0].path, "temperatures.T2");
            assert_eq!(s.axes[0].grid, GridKind::Linear);
            assert_eq!((s.axes[0].min, s.axes[0].max, s.axes[0].count), (0.01, 1.0, 2));
            assert_eq!(s.axes[1].path, "frequencies.f_i");
            assert_eq!(s.axes[1].grid, GridKind::Log);
            assert_eq!((s.axes[1].min, s.axes[1].max, s.axes[1].count), (10e9, 1e12, 60));
            assert_eq!(s.columns, ["omega_i_rad_s", "T2_K", "eta2", "n_mu2", "flags"]);
        }
        let s = figure_spec(FigureId::FigIii);
        wl(&s, "geometry", 24);
        assert_eq!(s.columns, ["w_m", "L_m", "dT_eo_K", "dT_eo_open_K", "flags"]);
        let s = figure_spec(FigureId::FigIv);
        wl(&s, "geometry_ki", 24);
        assert_eq!(s.columns, ["w_m", "L_m", "dT_ki_K", "dT_ki_open_K", "flags"]);
    }

    #[test]
    fn intermediate_frequency_figure_dataset() {
        let table = figure_table(FigureId::Fig3e, &builtin_db()).unwrap();
        assert_eq!(table.rows().len(), 120);
        assert_eq!(
            table.columns(),
            ["omega_i_rad_s", "T2_K", "eta2", "n_mu2", "flags"]
        );
        let cold: Vec<&Vec<Cell>> = table
            .rows()
            .iter()
            .filter(|r| r[1].as_f64() == Some(0.01))
            .collect();
        assert_eq!(cold.len(), 60);
        // First column is angular frequency of the axis value.
        let f_axis = figure_spec(FigureId::Fig3e).axes[1].values();
        for (row, f) in cold.iter().zip(&f_axis) {
            assert_eq!(row[0].as_f64().unwrap(), std::f64::consts::TAU * f);
        }
        for row in table.rows() {
            let eta = row[2].as_f64().unwrap();
            assert!(eta.is_finite() && eta >= 0.0 && eta <= 1.0);
            assert!(row[4].as_text().is_some());
        }
        // The 3e and 3f recipes share one dataset.
        let twin = figure_table(FigureId::Fig3f, &builtin_db()).unwrap();
        assert_eq!(table.to_csv(), twin.to_csv());
    }

    #[test]
    fn optimizer_is_deterministic_and_refines() {
        let run = RunConfig::defaults();
        let spec = OptimizeSpec {
            w_bounds: (0.5e-6, 5e-6),
            l_bounds: (1e-4, 1e-3),
            f_i_bounds: None,
            n_max: 10.0,
            grid: 5,
            rounds: 2,
            budget: None,
        };
        let a = optimize_geometry(&run, &spec, &builtin_db()).unwrap();
        let b = optimize_geometry(&run, &spec, &builtin_db()).unwrap();
        assert_eq!(a.trace, b.trace);
        let (ba, bb) = (a.best.as_ref().unwrap(), b.best.as_ref().unwrap());
        assert_eq!((ba.w, ba.l, ba.point.eta_total), (bb.w, bb.l, bb.point.eta_total));
        assert_eq!(a.evaluations, 50);
        // Refinement never loses ground.
        assert!(a.trace[1].best_eta.unwrap() >= a.trace[0].best_eta.unwrap());
        // Best beats the first round's corners by construction.
        assert!(ba.point.n_total <= 10.0);
        let table = a.best_table().unwrap();
        assert_eq!(table.rows().len(), 1);
        assert_eq!(table.columns()[..2], ["w_m".to_string(), "L_m".to_string()]);
    }

    #[test]
    fn optimizer_budget_and_infeasibility() {
        let run = RunConfig::defaults();
        let mut spec = OptimizeSpec {
            w_bounds: (0.5e-6, 5e-6),
            l_bounds: (1e-4, 1e-3),
            f_i_bounds: None,
            n_max: 10.0,
            grid: 3,
            rounds: 3,
            budget: Some(7),
        };
        let out = optimize_geometry(&run, &spec, &builtin_db()).unwrap();
        assert!(out.evaluations <= 7);
        assert!(out.budget_exhausted);

        // An impossible ceiling finds nothing and says so.
        spec.budget = None;
        spec.n_max = 1e-30;
        let out = optimize_geometry(&run, &spec, &builtin_db()).unwrap();
        assert!(out.best.is_none());
        assert_eq!(out.trace.len(), 1, "no anchor to refine around");
        assert!(out.best_table().is_err());
        let trace = out.trace_table().unwrap();
        assert_eq!(trace.rows().len(), 1);
    }

    #[test]
    fn optimizer_pinned_axes_reduce_to_direct_evaluation() {
        let run = two_step_run();
        let spec = OptimizeSpec {
            w_bounds: (1e-6, 1e-6),
            l_bounds: (300e-6, 300e-6),
            f_i_bounds: Some((600e9, 600e9)),
            n_max: 1.0,
            grid: 9,
            rounds: 3,
            budget: None,
        };
        let out = optimize_geometry(&run, &spec, &builtin_db()).unwrap();
        assert_eq!(out.evaluations, 3, "one candidate per round");
        let best = out.best.unwrap();
        let direct = run.evaluate(&builtin_db()).unwrap();
        assert_eq!(best.point.eta_total, direct.eta_total);
        assert_eq!(best.point.n_total, direct.n_total);
    }

    #[test]
    fn optimize_section_parses_through_the_config_dialect() {
        let text = r#"
scheme = "two_step"
[frequencies]
f_i = "600GHz"
[optimize]
w = ["0.5um", "5um"]
L = ["100um", "1mm"]
f_i = ["300GHz", "900GHz"]
n_max = 1e-3
grid = 5
rounds = 2
budget = 60
"#;
        let parsed = parse_file(text, Path::new(".")).unwrap();
        let spec = OptimizeSpec::resolve(&parsed.optimize.unwrap(), &parsed.run).unwrap();
        assert_eq!(spec.w_bounds, (0.5e-6, 5e-6));
        assert_eq!(spec.l_bounds, (1e-4, 1e-3));
        assert_eq!(spec.f_i_bounds, Some((300e9, 900e9)));
        assert_eq!((spec.grid, spec.rounds, spec.budget), (5, 2, Some(60)));

        // Defaults fill the bounds; the ceiling stays mandatory.
        let parsed = parse_file("[optimize]\nn_max = 1e-3", Path::new(".")).unwrap();
        let spec = OptimizeSpec::resolve(&parsed.optimize.unwrap(), &parsed.run).unwrap();
        assert_eq!(spec.w_bounds, (0.2e-6, 20e-6));
        assert_eq!(spec.l_bounds, (10e-6, 1e-2));
        assert_eq!((spec.grid, spec.rounds), (9, 3));
        let parsed = parse_file("[optimize]\ngrid = 5", Path::new(".")).unwrap();
        assert!(OptimizeSpec::resolve(&parsed.optimize.unwrap(), &parsed.run).is_err());
        // Intermediate-frequency bounds need a two-step scheme.
        let parsed = parse_file(
            "[optimize]\nn_max = 1e-3\nf_i = [\"1GHz\", \"2GHz\"]",
            Path::new("."),
        )
        .unwrap();
        assert!(OptimizeSpec::resolve(&parsed.optimize.unwrap(), &parsed.run).is_err());
    }
}
