//! `m2o materials {list, show, validate}` — registry inspection.

use m2o::materials::{sc_conductivity, MaterialDb, SigmaModel, SuperconductorParams, TempLaw};
use m2o::table::format_f64;
use m2o::Result;

pub fn list(db: &MaterialDb) -> Result<u8> {
    for m in db.iter() {
        let mut parts = Vec::new();
        if m.superconductor.is_some() {
            parts.push("superconductor");
        }
        if m.thermal.is_some() {
            parts.push("thermal");
        }
        if m.optical.is_some() {
            parts.push("optical");
        }
        println!("{}: {} [{}]", m.name, parts.join(", "), m.provenance);
    }
    Ok(0)
}

pub fn show(db: &MaterialDb, name: &str) -> Result<u8> {
    let m = db.get(name)?;
    println!("material {} [{}]", m.name, m.provenance);
    if let Some(sc) = &m.superconductor {
        println!("superconductor:");
        println!("  Tc = {} K", format_f64(sc.tc));
        println!(
            "  gap0 = {} J ({} kB Tc)",
            format_f64(sc.gap0),
            format_f64(sc.gap0 / (m2o::constants::K_B * sc.tc))
        );
        println!("  N0 = {} 1/(J m^3)", format_f64(sc.n0));
        println!("  rho_n = {} Ohm m", format_f64(sc.rho_n));
        match &sc.sigma_model {
            SigmaModel::Analytic => println!("  sigma model: analytic low-frequency BCS"),
            SigmaModel::Table(tab) => {
                let (t_lo, t_hi) = tab.t_range();
                let (w_lo, w_hi) = tab.omega_range();
                println!(
                    "  sigma model: table, T in [{}, {}] K, omega in [{}, {}] rad/s",
                    format_f64(t_lo),
                    format_f64(t_hi),
                    format_f64(w_lo),
                    format_f64(w_hi)
                );
            }
        }
    }
    if let Some(op) = &m.optical {
        println!("optical:");
        println!("  chi2 = {} ({} m/V)", in_pm_per_v(op.chi2), format_f64(op.chi2));
        println!("  d33 = {} ({} m/V)", in_pm_per_v(op.d33), format_f64(op.d33));
        println!(
            "  n_optical = {}, n_g = {}, n_subthz = {}",
            format_f64(op.n_optical),
            format_f64(op.n_g),
            format_f64(op.n_subthz)
        );
        println!("  alpha_optical = {} 1/m", format_f64(op.alpha_optical));
        println!(
            "  alpha_subthz: {} to {} 1/m, ramp up to {} Hz",
            format_f64(op.alpha_subthz.alpha_min),
            format_f64(op.alpha_subthz.alpha_max),
            format_f64(op.alpha_subthz.f_max)
        );
    }
    if let Some(th) = &m.thermal {
        println!("thermal:");
        println!("  g_th = {} W/(m K)", law_summary(&th.g_th));
        println!("  c_th = {} J/(kg K)", law_summary(&th.c_th));
        println!("  density = {} kg/m^3", format_f64(th.density));
    }
    println!();
    println!("# database dialect");
    print!("{}", m.to_toml());
    Ok(0)
}

/// Tensor elements are conventionally quoted in pm/V; print a clean integer
/// when the value is one (e.g. "233 pm/V", "27 pm/V").
fn in_pm_per_v(v: f64) -> String {
    let pm = v * 1e12;
    let rounded = pm.round();
    if rounded != 0.0 && ((pm - rounded) / rounded).abs() < 1e-9 {
        format!("{} pm/V", rounded as i64)
    } else {
        format!("{} pm/V", format_f64(pm))
    }
}

fn law_summary(law: &TempLaw) -> String {
    match law {
        TempLaw::PowerLaw { coeff, exponent } => {
            format!("{} * T^{}", format_f64(*coeff), format_f64(*exponent))
        }
        TempLaw::Polynomial { terms } => {
            let parts: Vec<String> = terms
                .iter()
                .map(|[c, p]| format!("{} * T^{}", format_f64(*c), format_f64(*p)))
                .collect();
            parts.join(" + ")
        }
        TempLaw::Anchors { points } => format!(
            "log-log anchors, {} points over [{}, {}] K",
            points.len(),
            format_f64(points[0][0]),
            format_f64(points[points.len() - 1][0])
        ),
        TempLaw::Table { path, points } => format!(
            "table `{path}`, {} points over [{}, {}] K",
            points.len(),
            format_f64(points[0][0]),
            format_f64(points[points.len() - 1][0])
        ),
    }
}

/// Beyond the structural checks done at load time, probe every law and
/// conductivity model across the cryogenic operating range so a database
/// that parses but cannot be evaluated fails here, naming the entry.
pub fn validate(db: &MaterialDb) -> Result<u8> {
    let mut failures: Vec<String> = Vec::new();
    for m in db.iter() {
        let mut checks = 0usize;
        if let Err(e) = m.validate() {
            failures.push(e.to_string());
            continue;
        }
        checks += 1;
        if let Some(th) = &m.thermal {
            for (label, law) in [("g_th", &th.g_th), ("c_th", &th.c_th)] {
                match probe_law(law) {
                    Ok(n) => checks += n,
                    Err(msg) => failures.push(format!("{}: {label}: {msg}", m.name)),
                }
            }
        }
        if let Some(sc) = &m.superconductor {
            match probe_sigma(sc) {
                Ok(n) => checks += n,
                Err(msg) => failures.push(format!("{}: conductivity: {msg}", m.name)),
            }
        }
        if let Some(op) = &m.optical {
            // Half the ramp ceiling is always inside the ramp's own domain.
            let omega = std::f64::consts::PI * op.alpha_subthz.f_max;
            match op.alpha(omega) {
                Ok(a) if a.is_finite() && a > 0.0 => checks += 1,
                Ok(a) => failures.push(format!(
                    "{}: alpha_subthz: non-positive absorption {a} at mid-ramp",
                    m.name
                )),
                Err(e) => failures.push(format!("{}: alpha_subthz: {e}", m.name)),
            }
        }
        if failures.iter().all(|f| !f.starts_with(&m.name)) {
            println!("{}: ok ({} checks)", m.name, checks);
        }
    }
    if failures.is_empty() {
        println!("all {} materials valid", db.len());
        Ok(0)
    } else {
        for f in &failures {
            eprintln!("FAIL {f}");
        }
        eprintln!("{} of {} materials failed validation", failures.len(), db.len());
        Ok(1)
    }
}

/// Evaluate a temperature law over a 50-point log grid from 1 mK to 10 K;
/// every value must be finite and positive.
fn probe_law(law: &TempLaw) -> std::result::Result<usize, String> {
    let (lo, hi) = (1e-3f64, 10.0f64);
    let n = 50;
    for i in 0..n {
        let t = lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
        match law.eval(t) {
            Ok(v) if v.is_finite() && v > 0.0 => {}
            Ok(v) => return Err(format!("non-positive value {v} at T = {t} K")),
            Err(e) => return Err(format!("not evaluable at T = {t} K: {e}")),
        }
    }
    Ok(n)
}

/// Probe the conductivity model at representative points of its own domain.
fn probe_sigma(sc: &SuperconductorParams) -> std::result::Result<usize, String> {
    let probes: Vec<(f64, f64)> = match &sc.sigma_model {
        SigmaModel::Analytic => {
            let omega = 2.0 * std::f64::consts::PI * 8e9;
            vec![
                (omega, 0.01 * sc.tc),
                (omega, 0.5 * sc.tc),
                (omega, 0.9 * sc.tc),
            ]
        }
        SigmaModel::Table(tab) => {
            let (t_lo, t_hi) = tab.t_range();
            let (w_lo, w_hi) = tab.omega_range();
            let t_mid = 0.5 * (t_lo + t_hi);
            let w_mid = 0.5 * (w_lo + w_hi);
            vec![(w_lo, t_lo), (w_mid, t_mid), (w_hi, t_hi)]
        }
    };
    let n = probes.len();
    for (omega, t) in probes {
        let sigma = sc_conductivity(sc, omega, t).map_err(|e| {
            format!("at omega = {omega} rad/s, T = {t} K: {e}")
        })?;
        if !(sigma.sigma1 >= 0.0 && sigma.sigma1.is_finite()) {
            return Err(format!("sigma1 = {} at T = {t} K", sigma.sigma1));
        }
        if !(sigma.sigma2 > 0.0 && sigma.sigma2.is_finite()) {
            return Err(format!("sigma2 = {} at T = {t} K", sigma.sigma2));
        }
    }
    Ok(n)
}
