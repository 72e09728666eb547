//! Acceptance gate: ten release criteria, one test per criterion, each
//! printing a PASS line with the measured numbers (visible with
//! `cargo test --test acceptance -- --nocapture`). These pin the model's
//! headline results, its trend structure, and the tool's reproducibility;
//! a red test here means the release claim itself is broken.

use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use m2o::config::parse_file;
use m2o::constants::{C_LIGHT, HBAR, K_B};
use m2o::explore::{figure_table, FigureId};
use m2o::materials::{bose_einstein, builtin_db, sc_conductivity};
use m2o::rates::{
    cooperativity_eo, cooperativity_ki, eo_coupling, microwave_loss_rates, optical_cutoff_width,
    optical_loss_rates, pump_photons_eo, pump_photons_ki, FrequencyPlan, Geometry, LossBudget,
};
use m2o::table::ResultTable;
use m2o::thermal::{solve_self_consistent_dt, SolverOptions};
use m2o::transducer::{external_efficiency, occupancy_composition, MaterialSet, OccupancyBranch};
use m2o::Result;

const RED_DOT: &str = r#"
scheme = "two_step"

[frequencies]
f_i = "600 GHz"

[temperatures]
T1 = "10 mK"
T2 = "10 mK"
"#;

fn red_dot_run() -> m2o::config::RunConfig {
    parse_file(RED_DOT, Path::new(".")).unwrap().run
}

fn col(table: &ResultTable, name: &str) -> usize {
    table
        .columns()
        .iter()
        .position(|c| c == name)
        .unwrap_or_else(|| panic!("column {name} missing from {:?}", table.columns()))
}

fn num(table: &ResultTable, row: usize, idx: usize) -> f64 {
    table.rows()[row][idx].as_f64().expect("numeric cell")
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

#[test]
fn criterion_01_red_dot_reproduction() {
    let started = Instant::now();
    let point = red_dot_run().evaluate(&builtin_db()).unwrap();
    let elapsed = started.elapsed();
    let (eta, n) = (point.eta_total, point.n_total);
    assert!((0.85..=0.99).contains(&eta), "eta2 = {eta}");
    assert!((1e-10..=1e-6).contains(&n), "n_mu2 = {n}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("ACCEPTANCE 1 PASS: red dot eta2 = {eta:.4}, n_mu2 = {n:.3e}, {elapsed:?}");
}

#[test]
fn criterion_02_one_kelvin_operation() {
    let started = Instant::now();
    let db = builtin_db();
    let mut run = red_dot_run();
    run.set_path("temperatures.T2", 1.0).unwrap();
    let mut worst_eta = f64::INFINITY;
    let mut worst_n = 0f64;
    for f_i in logspace(300e9, 1e12, 10) {
        run.set_path("frequencies.f_i", f_i).unwrap();
        let p = run.evaluate(&db).unwrap();
        assert!(p.eta_total > 0.85, "eta2 = {} at f_i = {f_i}", p.eta_total);
        assert!(p.n_total < 1e-3, "n_mu2 = {} at f_i = {f_i}", p.n_total);
        worst_eta = worst_eta.min(p.eta_total);
        worst_n = worst_n.max(p.n_total);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 2 PASS: T2 = 1 K grid worst eta2 = {worst_eta:.4}, worst n_mu2 = {worst_n:.3e}, {elapsed:?}"
    );
}

#[test]
fn criterion_03_two_step_noise_dominance() {
    let db = builtin_db();
    let n2 = red_dot_run().evaluate(&db).unwrap().n_total;
    let single = parse_file(
        "scheme = \"single_step\"\n\n[temperatures]\nT1 = \"10 mK\"\nT2 = \"10 mK\"\n",
        Path::new("."),
    )
    .unwrap()
    .run;
    let n1 = single.evaluate(&db).unwrap().n_total;
    let ratio = n2 / n1;
    assert!(
        ratio <= 1e-3,
        "n_mu2/n_mu1 = {ratio:e} (n2 = {n2:e}, n1 = {n1:e})"
    );
    println!("ACCEPTANCE 3 PASS: n_mu2/n_mu1 = {ratio:.3e} at matched geometry and 10 mK");
}

#[test]
fn criterion_04_mixer_heating_negligible() {
    let db = builtin_db();
    let eo = figure_table(FigureId::FigIii, &db).unwrap();
    let ki = figure_table(FigureId::FigIv, &db).unwrap();
    assert_eq!(eo.rows().len(), ki.rows().len());
    let (eo_open, eo_closed, eo_flags) = (col(&eo, "dT_eo_open_K"), col(&eo, "dT_eo_K"), col(&eo, "flags"));
    let (ki_open, ki_closed, ki_flags) = (col(&ki, "dT_ki_open_K"), col(&ki, "dT_ki_K"), col(&ki, "flags"));
    let mut cells = 0usize;
    let mut worst: f64 = 0.0;
    let mut worst_closed: f64 = 0.0;
    for i in 0..eo.rows().len() {
        let runaway = |t: &ResultTable, f: usize| {
            t.rows()[i][f].as_text().unwrap_or("").contains("runaway")
        };
        if runaway(&eo, eo_flags) || runaway(&ki, ki_flags) {
            continue;
        }
        // The strip geometry at row i is identical across the two tables;
        // each applies it to its own stage. Open-loop rises carry the
        // scaling comparison without the solver's tolerance floor.
        let ratio = num(&ki, i, ki_open) / num(&eo, i, eo_open);
        assert!(ratio < 1e-2, "open-loop dT_KI/dT_EO = {ratio:e} at row {i}");
        worst = worst.max(ratio);
        // Where the equilibrium rise is well above the solver tolerance the
        // closed-loop ratio must tell the same story.
        let dt_eo = num(&eo, i, eo_closed);
        if dt_eo > 1e-3 {
            let closed = num(&ki, i, ki_closed) / dt_eo;
            assert!(closed < 1e-2, "closed-loop dT_KI/dT_EO = {closed:e} at row {i}");
            worst_closed = worst_closed.max(closed);
        }
        cells += 1;
    }
    assert!(cells > 100, "only {cells} non-runaway cells on the grid");
    println!(
        "ACCEPTANCE 4 PASS: {cells} non-runaway cells, worst open-loop ratio {worst:.3e}, worst closed-loop {worst_closed:.3e}"
    );
}

#[test]
fn criterion_05_geometry_trend_suite() {
    let db = builtin_db();
    let single = "scheme = \"single_step\"\n\n[temperatures]\nT1 = \"10 mK\"\nT2 = \"10 mK\"\n";
    let base = parse_file(single, Path::new(".")).unwrap().run;

    // (a) eta1 over L at w = 1 um has an interior maximum.
    let ls = logspace(10e-6, 1e-2, 30);
    let mut etas = Vec::new();
    let mut run = base.clone();
    for &l in &ls {
        run.set_path("geometry.L", l).unwrap();
        etas.push(run.evaluate(&db).unwrap().eta_total);
    }
    let (argmax, &peak) = etas
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    assert!(
        argmax > 0 && argmax < ls.len() - 1,
        "maximum sits at the boundary: index {argmax} of {}",
        ls.len()
    );
    assert!(peak > etas[0] && peak > *etas.last().unwrap());

    // (b) n_mu1 is non-increasing as w shrinks toward the cutoff line.
    //
    // The claim is about the approach to cutoff, not the whole width axis.
    // Holding matched cooperativity takes pump power that grows like w^4, so
    // wide strips at this length sit beyond a thermal-bistability ridge: the
    // cold solution branch vanishes near w ~ 1.5 um (multi-root cells, then
    // near-cap roots and runaway above ~1.9 um), and the smallest steady
    // state jumps branches there. Below the ridge the trend is clean, so the
    // walk covers the final octave above cutoff, w in [1.02, 2] * w_cut.
    let plan = base.frequency_plan().unwrap();
    let w_cut = optical_cutoff_width(2.3, plan.omega_po);
    let mut run = base.clone();
    let mut prev = f64::INFINITY;
    let mut ws: Vec<f64> = logspace(w_cut * 1.02, w_cut * 2.0, 16);
    ws.reverse(); // walk from wide strips down toward cutoff
    for &w in &ws {
        run.set_path("geometry.w", w).unwrap();
        let p = run.evaluate(&db).unwrap();
        assert!(
            p.stages[0].thermal.converged && !p.flags.runaway,
            "no steady state at w = {w}"
        );
        let n = p.n_total;
        assert!(
            n <= prev * (1.0 + 1e-6),
            "n_mu1 rose from {prev} to {n} as w shrank to {w}"
        );
        prev = n;
    }

    // (c) the cutoff flag fires exactly below w_cut = 2 pi c / (n omega_po).
    assert!((w_cut - 2.0 * std::f64::consts::PI * C_LIGHT / (2.3 * plan.omega_po)).abs() < 1e-18);
    let mut run = base;
    for (scale, expect) in [(0.8, true), (0.95, true), (0.999, true), (1.001, false), (1.05, false), (1.2, false)] {
        run.set_path("geometry.w", w_cut * scale).unwrap();
        let p = run.evaluate(&db).unwrap();
        assert_eq!(
            p.flags.cutoff, expect,
            "cutoff flag at w = {scale} * w_cut should be {expect}"
        );
    }
    println!(
        "ACCEPTANCE 5 PASS: eta1(L) peak interior at L = {:.3e} m, n_mu1 monotone toward cutoff, flag flips at w_cut = {w_cut:.3e} m"
    , ls[argmax]);
}

/// Electro-optic stage heating rhs built from the public rate functions:
/// everything temperature-dependent is evaluated at the trial temperature.
struct StageRhs {
    geom: Geometry,
    plan: FrequencyPlan,
    mats: MaterialSet,
    g: f64,
    kappa_o: LossBudget,
    t_base: f64,
}

impl StageRhs {
    fn new(w: f64, l: f64, t: f64, t_base: f64, db: &m2o::materials::MaterialDb) -> Result<StageRhs> {
        let geom = Geometry::new(w, l, t)?;
        let plan = FrequencyPlan::single_step(
            2.0 * std::f64::consts::PI * 8e9,
            2.0 * std::f64::consts::PI * 200e12,
        )?;
        let mats = MaterialSet::from_db(db, "NbN", "LiNbO3")?;
        let g = eo_coupling(&plan, &geom, &mats.host_optical, 1.0)?;
        let kappa_o = optical_loss_rates(mats.host_optical.alpha_optical, mats.host_optical.n_g, l);
        Ok(StageRhs { geom, plan, mats, g, kappa_o, t_base })
    }

    fn rise(&self, dt: f64) -> Result<f64> {
        let t = self.t_base + dt;
        let sigma = sc_conductivity(&self.mats.superconductor, self.plan.omega_mu, t)?;
        let kappa_mu = microwave_loss_rates(self.plan.omega_mu, &self.geom, &sigma, 0.0);
        let n_p = pump_photons_eo(self.g, kappa_mu.kappa_tot, self.kappa_o.kappa_tot)?;
        let g_th = self.mats.host_thermal.g_th.eval(t)?;
        Ok(n_p * HBAR * self.plan.omega_po * self.kappa_o.kappa_int / (g_th * self.geom.l))
    }
}

#[test]
fn criterion_06_solver_matches_brute_force() {
    let db = builtin_db();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0006);
    let opts = SolverOptions::default();
    let scan_n = 1_000_000usize;
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    let mut worst_steps = 0.0f64;
    let mut worst_residual = 0.0f64;
    while accepted < 100 {
        attempts += 1;
        assert!(attempts < 1000, "only {accepted} feasible stages in {attempts} draws");
        let w = 10f64.powf(rng.random_range(-6.3..-5.3));
        let l = 10f64.powf(rng.random_range(-4.3..-2.7));
        let t = 10f64.powf(rng.random_range(-8.0..-7.4));
        let t_base = 10f64.powf(rng.random_range(-2.0..-0.1));
        let Ok(stage) = StageRhs::new(w, l, t, t_base, &db) else {
            continue;
        };
        let cap = 0.9 * stage.mats.superconductor.tc - t_base;
        let Ok(sol) = solve_self_consistent_dt(|dt| stage.rise(dt), t_base, cap, &opts) else {
            continue;
        };
        if !sol.converged || sol.runaway {
            continue;
        }
        // Brute force: march the fixed-point residual upward from zero and
        // take the first crossing — that is the smallest root by
        // construction, the same object the solver must report.
        let step = cap / scan_n as f64;
        let mut root = None;
        for k in 1..=scan_n {
            let x = cap * k as f64 / scan_n as f64;
            if x - stage.rise(x).unwrap() > 0.0 {
                root = Some(x);
                break;
            }
        }
        let root = root.expect("converged solve implies a crossing below the cap");
        let distance = (sol.delta_t - root).abs();
        assert!(
            distance <= 2.0 * step,
            "solver dt = {} vs scan root = {root} ({} steps apart, t_base = {t_base})",
            sol.delta_t,
            distance / step
        );
        let residual = (stage.rise(sol.delta_t).unwrap() - sol.delta_t).abs();
        assert!(residual <= 1e-6, "residual {residual} K at t_base = {t_base}");
        worst_steps = worst_steps.max(distance / step);
        worst_residual = worst_residual.max(residual);
        accepted += 1;
    }
    println!(
        "ACCEPTANCE 6 PASS: 100 stages ({attempts} draws), worst |dt - scan| = {worst_steps:.2} steps, worst residual = {worst_residual:.2e} K"
    );
}

#[test]
fn criterion_07_identity_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0007);

    // Unit-cooperativity round trip, both stage flavors.
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let g = 10f64.powf(rng.random_range(0.0..7.0));
        let ka = 10f64.powf(rng.random_range(2.0..9.0));
        let kb = 10f64.powf(rng.random_range(2.0..9.0));
        let np = pump_photons_eo(g, ka, kb).unwrap();
        let c = cooperativity_eo(g, np, ka, kb);
        worst = worst.max((c - 1.0).abs());
        let np = pump_photons_ki(g, ka, kb).unwrap();
        let c = cooperativity_ki(g, np, ka, kb);
        worst = worst.max((c - 1.0).abs());
    }
    assert!(worst <= 1e-10, "worst |C - 1| = {worst:e}");

    // Efficiency bounded to [0, 1]; composed occupancy non-negative.
    for _ in 0..10_000 {
        let mut budget = || {
            LossBudget::new(
                10f64.powf(rng.random_range(-3.0..9.0)),
                10f64.powf(rng.random_range(-3.0..9.0)),
            )
        };
        let (a, b) = (budget(), budget());
        let eta = external_efficiency(&a, &b).unwrap();
        assert!((0.0..=1.0).contains(&eta), "eta = {eta}");
        let n1 = bose_einstein(10f64.powf(rng.random_range(9.0..13.0)), rng.random_range(0.0..2.0)).unwrap();
        let n2 = bose_einstein(10f64.powf(rng.random_range(9.0..13.0)), rng.random_range(0.0..2.0)).unwrap();
        let (n, saturated) = occupancy_composition(&[n1, n2], &[eta.max(1e-6), eta.max(1e-6)]).unwrap();
        assert!(n >= 0.0 && (n.is_finite() || saturated), "n = {n}");
    }

    // Loss-budget additivity is exact, not approximate.
    for _ in 0..10_000 {
        let int = 10f64.powf(rng.random_range(-3.0..9.0));
        let ext = 10f64.powf(rng.random_range(-3.0..9.0));
        let b = LossBudget::new(int, ext);
        assert_eq!(b.kappa_tot.to_bits(), (int + ext).to_bits());
    }
    println!("ACCEPTANCE 7 PASS: C = 1 round trip worst {worst:.2e}; eta/n bounds on 1e4 draws; additivity exact");
}

#[test]
fn criterion_08_occupancy_against_high_precision_oracle() {
    // Oracle: 1/expm1(hbar*omega/(kB*T)) at 50 significant digits, with
    // omega chosen so hbar*omega/(kB*T) spans [1e-6, 700] at T = 0.1 K.
    let oracle: [(f64, f64); 25] = [
        (13092.033920720642, 999999.5000000833899192),
        (30588.12621488756, 428009.82756150221105),
        (71465.86015615736, 183192.3404995929732544),
        (166972.27976565756, 78407.92766998525046166),
        (390112.73563659674, 33559.11681262572827835),
        (911456.361016702, 14363.3625895427139654),
        (2129519.552039657, 6147.381543067447122434),
        (4975392.916738967, 2630.856818924161133829),
        (11624469.309157733, 1125.747954435604896939),
        (27159319.672006372, 481.5458970982181081917),
        (63454823.22062922, 205.8209522266879375634),
        (148255355.3840126, 87.80826914309380238426),
        (346382659.1024874, 37.29865206795978236998),
        (809285750.360478, 15.682420722545083659),
        (1890808932.0451202, 6.436069725252818042765),
        (4417671281.01432, 2.491626121208425652814),
        (10321412817.7352, 0.8334614427369847125324),
        (24114868621.38101, 0.1883655306905120081422),
        (56341791467.4659, 0.01370624227569125116146),
        (131636523325.23611, 0.00004298493619876409632915),
        (307554549151.34143, 6.275820640926288433928e-11),
        (718568056298.3328, 1.456655221932140947062e-24),
        (1678856817293.5215, 2.033537440952373321999e-56),
        (3922468008795.9746, 7.624889947729543833649e-131),
        (9164422435301.059, 9.860662560713408490424e-305),
    ];
    let t = 0.1;
    let mut worst = 0.0f64;
    for (omega, expected) in oracle {
        let n = bose_einstein(omega, t).unwrap();
        let rel = ((n - expected) / expected).abs();
        let x = HBAR * omega / (K_B * t);
        assert!(rel <= 1e-10, "rel error {rel:e} at x = {x:.3e}");
        worst = worst.max(rel);
    }
    println!("ACCEPTANCE 8 PASS: 25 oracle points over x in [1e-6, 700], worst relative error {worst:.2e}");
}

#[test]
fn criterion_09_figure_determinism_and_throughput() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let started = Instant::now();
    let run_a = std::process::Command::new(env!("CARGO_BIN_EXE_m2o"))
        .env_remove("M2O_MATERIALS")
        .args(["figure", "fig2c", "--out", a.to_str().unwrap()])
        .output()
        .unwrap();
    let elapsed = started.elapsed();
    let run_b = std::process::Command::new(env!("CARGO_BIN_EXE_m2o"))
        .env_remove("M2O_MATERIALS")
        .args(["figure", "fig2c", "--out", b.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(run_a.status.success() && run_b.status.success());
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b, "repeated fig2c runs must be byte-identical");
    let table = ResultTable::from_csv(std::str::from_utf8(&bytes_a).unwrap()).unwrap();
    assert_eq!(table.rows().len(), 3600, "60x60 grid");
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "60x60 two-step sweep took {elapsed:?}"
    );
    println!(
        "ACCEPTANCE 9 PASS: fig2c byte-identical across runs, 3600 cells in {elapsed:?}"
    );
}

#[test]
fn criterion_10_occupancy_branch_toggle() {
    let db = builtin_db();
    let mut run = red_dot_run();
    run.occupancy_branch = OccupancyBranch::AsPrinted;
    let printed = run.evaluate(&db).unwrap().n_total;
    run.occupancy_branch = OccupancyBranch::Physical;
    let physical = run.evaluate(&db).unwrap().n_total;
    assert!(printed.is_finite() && printed > 0.0, "as_printed n = {printed}");
    assert!(physical.is_finite() && physical > 0.0, "physical n = {physical}");

    // Verbose mode must surface both numbers side by side.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("red.toml");
    std::fs::write(&cfg, RED_DOT).unwrap();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_m2o"))
        .env_remove("M2O_MATERIALS")
        .args(["point", "--config", cfg.to_str().unwrap(), "--verbose"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    let total = err
        .lines()
        .find(|l| l.starts_with("total:"))
        .expect("verbose total line");
    assert!(
        total.contains("n[as_printed]") && total.contains("n[physical]"),
        "verbose line: {total}"
    );
    println!(
        "ACCEPTANCE 10 PASS: as_printed n = {printed:.3e}, physical n = {physical:.3e}, both in verbose output"
    );
}
