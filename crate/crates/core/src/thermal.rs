//! Pump heating and the self-consistent operating temperature.
//!
//! Absorbed pump power raises the strip temperature above its bath; the
//! hotter strip is lossier, which demands more pump, which heats further.
//! The equilibrium is the fixed point of
//!
//!   dT = rhs(dT) = n_pump(T) hbar omega_pump kappa_abs(T) / (g_th(T) L),
//!   T = T_base + dT,
//!
//! where every factor on the right is evaluated at the elevated
//! temperature. The solver scans a fixed bracket [0, 0.9 Tc - T_base] on a
//! coarse grid to classify the fixed-point structure (no root: thermal
//! runaway; several roots: bistability), then bisects the first upward
//! crossing - the smallest root, which is the state reached when the pump
//! ramps up from a cold start.

use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::materials::{TempLaw, ThermalMaterialParams};
use crate::rates::Geometry;

/// Knobs of the fixed-point solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Convergence threshold on the residual |dT - rhs(dT)|, kelvin.
    pub tol: f64,
    /// Bisection iteration cap.
    pub max_iter: u32,
    /// Classification scan resolution over the bracket.
    pub scan_points: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-6,
            max_iter: 200,
            scan_points: 1000,
        }
    }
}

/// Outcome of a self-consistent solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalSolution {
    /// Temperature rise above the bath, K. When `runaway` is set this is
    /// the bracket cap, not an equilibrium.
    pub delta_t: f64,
    /// Bath temperature, K.
    pub t_base: f64,
    /// Residual |dT - rhs(dT)| at the reported point, K.
    pub residual: f64,
    /// Residual fell at or below tolerance.
    pub converged: bool,
    /// Bisection iterations spent.
    pub iterations: u32,
    /// No equilibrium below the cap: heating outruns conduction everywhere.
    pub runaway: bool,
    /// The scan saw more than one fixed point (bistable operating curve);
    /// the reported solution is the smallest root.
    pub multi_root: bool,
    /// Bracket that was bisected (or the full scan range on runaway).
    pub bracket: (f64, f64),
}

/// Everything needed to evaluate open-loop heating of one stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatingInputs {
    /// Circulating pump photon number.
    pub pump_photons: f64,
    /// Pump angular frequency, rad/s.
    pub omega_pump: f64,
    /// Absorption rate of pump photons, rad/s: only absorbed photons heat.
    pub kappa_pump_abs: f64,
    /// Thermal conductance law of the host, W/(m K).
    pub g_th_law: TempLaw,
    /// Strip length, m.
    pub l: f64,
    /// Heat capacity of the heated strip volume, J/K.
    pub c_th: f64,
    /// Thermal time constant C_th / (g_th L), s.
    pub tau_th: f64,
}

impl HeatingInputs {
    /// Assemble inputs from a host material and geometry, evaluating the
    /// temperature-dependent capacity and conductance at `t_eval`.
    pub fn from_material(
        pump_photons: f64,
        omega_pump: f64,
        kappa_pump_abs: f64,
        host: &ThermalMaterialParams,
        geom: &Geometry,
        t_eval: f64,
    ) -> Result<HeatingInputs> {
        geom.validate()?;
        let c_specific = host.c_th.eval(t_eval)?;
        let c_th = host.density * c_specific * geom.volume();
        let g_th = host.g_th.eval(t_eval)?;
        Ok(HeatingInputs {
            pump_photons,
            omega_pump,
            kappa_pump_abs,
            g_th_law: host.g_th.clone(),
            l: geom.l,
            c_th,
            tau_th: c_th / (g_th * geom.l),
        })
    }
}

/// Open-loop steady-state temperature rise with the conductance law
/// evaluated at `t_eval`: the caller chooses whether that is the bath
/// temperature (scaling estimate) or the elevated temperature (one step of
/// a fixed-point iteration).
pub fn steady_state_dt(h: &HeatingInputs, t_eval: f64) -> Result<f64> {
    if h.pump_photons < 0.0 || h.kappa_pump_abs < 0.0 {
        return Err(Error::Domain(
            "pump photon number and absorption rate must be non-negative".into(),
        ));
    }
    let g_th = h.g_th_law.eval(t_eval)?;
    Ok(h.pump_photons * HBAR * h.omega_pump * h.kappa_pump_abs / (g_th * h.l))
}

/// Exponential approach to the steady state: dT(t) = dT_ss (1 - e^(-t/tau)).
pub fn transient_heating(h: &HeatingInputs, t_eval: f64, time: f64) -> Result<f64> {
    if time < 0.0 {
        return Err(Error::Domain(format!("time must be non-negative, got {time} s")));
    }
    let ss = steady_state_dt(h, t_eval)?;
    Ok(-ss * (-time / h.tau_th).exp_m1())
}

/// Find the smallest fixed point of `rhs` over dT in [0, cap].
///
/// `rhs(dT)` must return the open-loop temperature rise with every
/// temperature-dependent factor evaluated at T_base + dT; it is
/// non-negative by construction. The scan classifies the curve
/// (runaway / single root / bistable), bisection then polishes the first
/// upward crossing until the residual meets tolerance.
pub fn solve_self_consistent_dt<F>(
    rhs: F,
    t_base: f64,
    cap: f64,
    opts: &SolverOptions,
) -> Result<ThermalSolution>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(cap > 0.0) || !cap.is_finite() {
        return Err(Error::Solver {
            at_t: t_base,
            reason: format!("bracket cap must be positive, got {cap} K (bath too close to 0.9 Tc)"),
        });
    }
    let n = opts.scan_points.max(2);
    let f = |dt: f64| -> Result<f64> {
        let r = rhs(dt)?;
        if r < 0.0 || !r.is_finite() {
            return Err(Error::Solver {
                at_t: t_base + dt,
                reason: format!("heating model returned a non-physical rise {r} K"),
            });
        }
        Ok(dt - r)
    };

    // Classification scan: count sign changes of f, remember the first
    // upward (non-positive to positive) crossing. f(0) = -rhs(0) <= 0
    // always, so the first crossing is necessarily upward.
    let f0 = f(0.0)?;
    let root_at_zero = f0 == 0.0;
    let mut was_nonpositive = f0 <= 0.0;
    let mut x_prev = 0.0;
    let mut sign_changes = 0u32;
    let mut first_bracket: Option<(f64, f64)> = None;
    for k in 1..=n {
        let x = cap * k as f64 / n as f64;
        let fx = f(x)?;
        let is_nonpositive = fx <= 0.0;
        if is_nonpositive != was_nonpositive {
            sign_changes += 1;
            if first_bracket.is_none() && !is_nonpositive {
                first_bracket = Some((x_prev, x));
            }
        }
        was_nonpositive = is_nonpositive;
        x_prev = x;
    }
    let multi_root = sign_changes >= 2;

    if root_at_zero {
        // rhs(0) == 0: no heating at all; dT = 0 is exact.
        return Ok(ThermalSolution {
            delta_t: 0.0,
            t_base,
            residual: 0.0,
            converged: true,
            iterations: 0,
            runaway: false,
            multi_root,
            bracket: (0.0, 0.0),
        });
    }

    let Some((mut lo, mut hi)) = first_bracket else {
        // f < 0 across the whole bracket: heating exceeds equilibrium
        // everywhere below the cap.
        let residual = f(cap)?.abs();
        return Ok(ThermalSolution {
            delta_t: cap,
            t_base,
            residual,
            converged: false,
            iterations: 0,
            runaway: true,
            multi_root,
            bracket: (0.0, cap),
        });
    };
    let bracket = (lo, hi);

    let mut iterations = 0;
    let mut mid = 0.5 * (lo + hi);
    let mut residual = f64::INFINITY;
    while iterations < opts.max_iter.max(1) {
        mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        residual = fm.abs();
        iterations += 1;
        if residual <= opts.tol {
            break;
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= cap * 1e-18 {
            break; // interval exhausted at f64 resolution
        }
    }

    Ok(ThermalSolution {
        delta_t: mid,
        t_base,
        residual,
        converged: residual <= opts.tol,
        iterations,
        runaway: false,
        multi_root,
        bracket,
    })
}
