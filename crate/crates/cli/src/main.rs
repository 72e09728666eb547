//! `m2o` — command-line front end for the transduction simulator.
//!
//! Subcommands map one-to-one onto the library's layers: `point` evaluates
//! a single design, `sweep` runs the `[sweep]` section of a config,
//! `figure` reproduces a canned dataset, `optimize` runs the `[optimize]`
//! geometry search, and `materials` inspects the material registry.
//!
//! Exit codes: 0 on success, 1 on config/validation errors, 2 on a
//! physical diagnostic (thermal runaway at a requested point, or an
//! optimization with no feasible design) — the record is still written.

mod materials_cmd;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use m2o::config::{parse_file, OutputFormat, ParsedFile, RunConfig};
use m2o::explore::{
    figure_spec, figure_table, optimize_geometry, point_cells, point_columns, run_sweep, Axis,
    FigureId, OptimizeSpec, RoundTrace, SweepSpec,
};
use m2o::materials::{builtin_db, load_material_db, MaterialDb};
use m2o::table::{format_f64, ResultTable};
use m2o::transducer::{occupancy_composition, OccupancyBranch, StageKind, TransductionPoint};
use m2o::{Error, Result};

#[derive(Parser)]
#[command(
    name = "m2o",
    version,
    about = "Microwave-to-optical transduction: efficiency and noise of superconducting electro-optic converters",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one design point and emit its record
    Point(RunArgs),
    /// Run the [sweep] section of a config over a parameter grid
    Sweep(RunArgs),
    /// Reproduce a canned dataset (fig1c, fig1d, fig2c, fig2d, fig3e, fig3f, figIII, figIV)
    Figure(FigureArgs),
    /// Search strip geometry for best efficiency under a noise ceiling
    Optimize(RunArgs),
    /// Inspect or validate the material database
    Materials(MaterialsArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Run config (TOML); omitted means the benchmark defaults
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct FigureArgs {
    /// Figure id (e.g. fig2c, 3e, figIII)
    id: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Material overlay TOML; overrides the config's `materials.db` and the
    /// M2O_MATERIALS environment variable
    #[arg(long, value_name = "FILE")]
    materials: Option<PathBuf>,
    /// Output serialization (default: the config's `output.format`, csv)
    #[arg(long, value_enum, value_name = "FORMAT")]
    format: Option<FormatArg>,
    /// Write data to FILE and provenance to FILE.meta.toml (default: stdout,
    /// no sidecar)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Worker threads for grid evaluation (default: all cores)
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// Hot/cold weighting of the reported added occupancy
    #[arg(long, value_enum, value_name = "BRANCH")]
    occupancy_branch: Option<BranchArg>,
    /// Diagnostics on stderr, including both occupancy branches at once
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Args)]
struct MaterialsArgs {
    #[command(subcommand)]
    action: MaterialsCmd,
}

#[derive(Subcommand)]
enum MaterialsCmd {
    /// One line per registered material, with provenance
    List {
        /// Material overlay TOML (also honors M2O_MATERIALS)
        #[arg(long, value_name = "FILE")]
        materials: Option<PathBuf>,
    },
    /// Full parameter report for one material
    Show {
        /// Material name, e.g. LiNbO3
        name: String,
        #[arg(long, value_name = "FILE")]
        materials: Option<PathBuf>,
    },
    /// Check every material's invariants and law evaluability (1 mK – 10 K)
    Validate {
        #[arg(long, value_name = "FILE")]
        materials: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    #[value(name = "csv")]
    Csv,
    #[value(name = "json")]
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> OutputFormat {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BranchArg {
    #[value(name = "as_printed")]
    AsPrinted,
    #[value(name = "physical")]
    Physical,
}

impl From<BranchArg> for OccupancyBranch {
    fn from(b: BranchArg) -> OccupancyBranch {
        match b {
            BranchArg::AsPrinted => OccupancyBranch::AsPrinted,
            BranchArg::Physical => OccupancyBranch::Physical,
        }
    }
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`m2o figure ... | head`) instead of
    // panicking mid-print, like any other line-oriented unix tool.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too; only real usage errors
            // should exit 1 (clap's own code 2 is reserved for runaway).
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Point(args) => cmd_point(args),
        Cmd::Sweep(args) => cmd_sweep(args),
        Cmd::Figure(args) => cmd_figure(args),
        Cmd::Optimize(args) => cmd_optimize(args),
        Cmd::Materials(args) => match args.action {
            MaterialsCmd::List { materials } => materials_cmd::list(&load_db(materials.as_deref(), None)?.0),
            MaterialsCmd::Show { name, materials } => {
                materials_cmd::show(&load_db(materials.as_deref(), None)?.0, &name)
            }
            MaterialsCmd::Validate { materials } => {
                materials_cmd::validate(&load_db(materials.as_deref(), None)?.0)
            }
        },
    }
}

// ---------------------------------------------------------------------
// Shared loading.

struct Loaded {
    run: RunConfig,
    parsed: ParsedFile,
    db: MaterialDb,
    db_source: String,
}

fn load(config: &Option<PathBuf>, common: &CommonArgs) -> Result<Loaded> {
    if let Some(n) = common.jobs {
        // Zero keeps rayon's automatic sizing.
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let (text, base_dir) = match config {
        None => (String::new(), PathBuf::from(".")),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
            (text, dir.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(".")))
        }
    };
    let parsed = parse_file(&text, &base_dir)?;
    let mut run = parsed.run.clone();
    if let Some(b) = common.occupancy_branch {
        run.occupancy_branch = b.into();
    }
    if let Some(f) = common.format {
        run.format = f.into();
    }
    let (db, db_source) = load_db(common.materials.as_deref(), run.db_path.as_deref())?;
    Ok(Loaded { run, parsed, db, db_source })
}

/// Material registry resolution: `--materials` flag, then the config's
/// `materials.db`, then `$M2O_MATERIALS`, then builtins only.
fn load_db(flag: Option<&Path>, from_config: Option<&Path>) -> Result<(MaterialDb, String)> {
    let path = flag
        .map(Path::to_path_buf)
        .or_else(|| from_config.map(Path::to_path_buf))
        .or_else(|| std::env::var_os("M2O_MATERIALS").map(PathBuf::from));
    let Some(path) = path else {
        return Ok((builtin_db(), "builtin".into()));
    };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::MaterialDb {
        entry: path.display().to_string(),
        reason: format!("cannot read overlay: {e}"),
    })?;
    let base_dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path.display().to_string();
    let db = load_material_db(Some(&text), &name, base_dir)?;
    Ok((db, format!("builtin + overlay {name}")))
}

// ---------------------------------------------------------------------
// Output plumbing.

#[derive(Serialize)]
struct Meta<'a> {
    command: String,
    tool: ToolMeta,
    materials: MaterialsMeta,
    run: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<&'a SweepSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    figure: Option<FigureMeta>,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimize: Option<OptimizeMeta<'a>>,
}

#[derive(Serialize)]
struct ToolMeta {
    name: &'static str,
    version: &'static str,
}

#[derive(Serialize)]
struct MaterialsMeta {
    source: String,
    film: String,
    host: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    load_notes: Vec<String>,
}

#[derive(Serialize)]
struct FigureMeta {
    id: String,
    description: &'static str,
    axes: Vec<Axis>,
}

#[derive(Serialize)]
struct OptimizeMeta<'a> {
    evaluations: usize,
    budget_exhausted: bool,
    feasible: bool,
    spec: &'a OptimizeSpec,
    trace: &'a [RoundTrace],
}

impl<'a> Meta<'a> {
    fn new(command: impl Into<String>, loaded: &'a Loaded) -> Meta<'a> {
        Meta {
            command: command.into(),
            tool: ToolMeta {
                name: "m2o",
                version: env!("CARGO_PKG_VERSION"),
            },
            materials: MaterialsMeta {
                source: loaded.db_source.clone(),
                film: loaded.run.film.clone(),
                host: loaded.run.host.clone(),
                load_notes: loaded.db.load_notes.clone(),
            },
            run: &loaded.run,
            sweep: None,
            figure: None,
            optimize: None,
        }
    }
}

/// Write the table (csv or jsonl) to `--out` or stdout; alongside a file,
/// drop the provenance sidecar `<out>.meta.toml`.
fn emit(table: &ResultTable, format: OutputFormat, out: &Option<PathBuf>, meta: &Meta) -> Result<()> {
    let body = match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => table.to_jsonl(),
    };
    match out {
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
        }
        Some(path) => {
            std::fs::write(path, &body).map_err(|e| io_at(path, e))?;
            let meta_path = PathBuf::from(format!("{}.meta.toml", path.display()));
            let text = toml::to_string(meta)
                .map_err(|e| Error::Config(format!("serializing provenance sidecar: {e}")))?;
            std::fs::write(&meta_path, text).map_err(|e| io_at(&meta_path, e))?;
        }
    }
    Ok(())
}

fn io_at(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::other(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------
// Subcommands.

fn cmd_point(args: RunArgs) -> Result<u8> {
    let loaded = load(&args.config, &args.common)?;
    let point = loaded.run.evaluate(&loaded.db)?;
    let mut table = ResultTable::new(point_columns(loaded.run.scheme))?;
    table.push_row(point_cells(&point))?;
    let meta = Meta::new("point", &loaded);
    emit(&table, loaded.run.format, &args.common.out, &meta)?;
    if args.common.verbose {
        print_point_report(&point, &loaded)?;
    }
    if point.flags.runaway {
        eprintln!(
            "warning: thermal runaway — no stable operating temperature below the cap; \
             record written with values at the capped rise"
        );
        return Ok(2);
    }
    Ok(0)
}

/// Stage-by-stage stderr report; always shows both occupancy weightings so
/// the branch ambiguity stays visible.
fn print_point_report(point: &TransductionPoint, loaded: &Loaded) -> Result<()> {
    let run = &loaded.run;
    eprintln!("# resolved run");
    eprintln!(
        "scheme = {}; film = {}; host = {}; materials = {}",
        match run.scheme {
            m2o::transducer::Scheme::SingleStep => "single_step",
            m2o::transducer::Scheme::TwoStep => "two_step",
        },
        run.film,
        run.host,
        loaded.db_source
    );
    for line in &run.defaults_applied {
        eprintln!("default: {line}");
    }
    for stage in &point.stages {
        let kind = match stage.kind {
            StageKind::ElectroOptic => "electro-optic",
            StageKind::KineticInductance => "kinetic-inductance",
        };
        eprintln!(
            "stage {kind}: eta_ext = {}, dT = {} K (converged: {}), npump = {}, g = {} rad/s",
            format_f64(stage.eta_ext),
            format_f64(stage.thermal.delta_t),
            stage.thermal.converged,
            format_f64(stage.pump_photons),
            format_f64(stage.g),
        );
        eprintln!(
            "  n_added as_printed = {}, physical = {}",
            format_f64(stage.n_added_printed),
            format_f64(stage.n_added_physical),
        );
    }
    let etas: Vec<f64> = point.stages.iter().map(|s| s.eta_ext).collect();
    let printed: Vec<f64> = point.stages.iter().map(|s| s.n_added_printed).collect();
    let physical: Vec<f64> = point.stages.iter().map(|s| s.n_added_physical).collect();
    let (n_printed, _) = occupancy_composition(&printed, &etas)?;
    let (n_physical, _) = occupancy_composition(&physical, &etas)?;
    eprintln!(
        "total: eta = {}, n[as_printed] = {}, n[physical] = {}",
        format_f64(point.eta_total),
        format_f64(n_printed),
        format_f64(n_physical),
    );
    let flags = point.flags.to_string();
    eprintln!("flags: {}", if flags.is_empty() { "(none)" } else { &flags });
    Ok(())
}

fn cmd_sweep(args: RunArgs) -> Result<u8> {
    let loaded = load(&args.config, &args.common)?;
    let raw = loaded.parsed.sweep.as_ref().ok_or_else(|| {
        Error::Config("sweep needs a [sweep] section in the config (--config FILE)".into())
    })?;
    let spec = SweepSpec::resolve(raw, &loaded.run)?;
    if args.common.verbose {
        eprintln!(
            "sweep: {} axes, {} points",
            spec.axes.len(),
            spec.total_points()?
        );
    }
    let table = run_sweep(&loaded.run, &spec, &loaded.db)?;
    let mut meta = Meta::new("sweep", &loaded);
    meta.sweep = Some(&spec);
    emit(&table, loaded.run.format, &args.common.out, &meta)?;
    if args.common.verbose {
        eprintln!("sweep: wrote {} rows", table.rows().len());
    }
    Ok(0)
}

fn cmd_figure(args: FigureArgs) -> Result<u8> {
    if args.common.occupancy_branch.is_some() {
        return Err(Error::Config(
            "figure recipes pin the occupancy branch; --occupancy-branch does not apply".into(),
        ));
    }
    let id: FigureId = args.id.parse()?;
    let spec = figure_spec(id);
    // Figures have a pinned run config; only thread count, format, and
    // output location come from the command line.
    let (db, db_source) = load_db(args.common.materials.as_deref(), None)?;
    let loaded = Loaded {
        run: spec.run.clone(),
        parsed: ParsedFile {
            run: spec.run.clone(),
            sweep: None,
            optimize: None,
        },
        db,
        db_source,
    };
    if let Some(n) = args.common.jobs {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let format = args.common.format.map(Into::into).unwrap_or(loaded.run.format);
    if args.common.verbose {
        eprintln!("figure {id}: {}", id.description());
    }
    let table = figure_table(id, &loaded.db)?;
    let mut meta = Meta::new(format!("figure {id}"), &loaded);
    meta.figure = Some(FigureMeta {
        id: id.to_string(),
        description: id.description(),
        axes: spec.axes.clone(),
    });
    emit(&table, format, &args.common.out, &meta)?;
    if args.common.verbose {
        eprintln!("figure {id}: wrote {} rows", table.rows().len());
    }
    Ok(0)
}

fn cmd_optimize(args: RunArgs) -> Result<u8> {
    let loaded = load(&args.config, &args.common)?;
    let raw = loaded.parsed.optimize.as_ref().ok_or_else(|| {
        Error::Config("optimize needs an [optimize] section in the config (--config FILE)".into())
    })?;
    let spec = OptimizeSpec::resolve(raw, &loaded.run)?;
    let outcome = optimize_geometry(&loaded.run, &spec, &loaded.db)?;
    if args.common.verbose {
        eprint!("{}", outcome.trace_table()?.to_csv());
    }
    let mut meta = Meta::new("optimize", &loaded);
    let opt_meta = OptimizeMeta {
        evaluations: outcome.evaluations,
        budget_exhausted: outcome.budget_exhausted,
        feasible: outcome.best.is_some(),
        spec: &spec,
        trace: &outcome.trace,
    };
    meta.optimize = Some(opt_meta);
    match &outcome.best {
        Some(best) => {
            let table = outcome.best_table()?;
            emit(&table, loaded.run.format, &args.common.out, &meta)?;
            if args.common.verbose {
                eprintln!(
                    "best: w = {} m, L = {} m, eta = {}, n = {} ({} evaluations)",
                    format_f64(best.w),
                    format_f64(best.l),
                    format_f64(best.point.eta_total),
                    format_f64(best.point.n_total),
                    outcome.evaluations,
                );
            }
            Ok(0)
        }
        None => {
            // Header-only table: the search ran, nothing met the ceiling.
            let mut columns = vec!["w_m", "L_m"];
            if spec.f_i_bounds.is_some() {
                columns.push("f_i_Hz");
            }
            columns.extend(point_columns(loaded.run.scheme));
            let table = ResultTable::new(columns)?;
            emit(&table, loaded.run.format, &args.common.out, &meta)?;
            eprintln!(
                "warning: no design met n_max = {} in {} evaluations; empty record written",
                format_f64(spec.n_max),
                outcome.evaluations,
            );
            Ok(2)
        }
    }
}
