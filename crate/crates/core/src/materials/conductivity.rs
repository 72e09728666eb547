//! Complex conductivity of a superconducting film.
//!
//! In the low-frequency, low-temperature window (hbar omega < 2 gap,
//! T < Tc) the dissipative and reactive parts of the conductivity reduce
//! to closed forms in terms of the modified Bessel function K0:
//!
//!   sigma1 / sigma_n = (4 gap / hbar omega) e^(-gap/kB T) sinh(y) K0(y)
//!   sigma2 / sigma_n = (pi gap / hbar omega) tanh(gap / 2 kB T)
//!
//! with y = hbar omega / 2 kB T and sigma_n = 1/rho_n the normal-state
//! conductivity. The gap is treated as temperature-independent (its BCS
//! temperature dependence is weak below ~Tc/2, and the solver caps
//! evaluation at 0.9 Tc).
//!
//! At millikelvin temperatures e^(-gap/kB T) underflows; sigma1 is floored
//! at 1e-30 S/m so downstream loss-rate ratios stay finite and positive
//! without injecting spurious dissipation.
//!
//! A measured table can replace the analytic model per material: a CSV
//! with header `T_K,omega_rad_s,sigma1_S_m,sigma2_S_m` on a rectangular
//! (T, omega) grid, interpolated bilinearly in log-log space and erroring
//! outside its range.

use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::special::bessel_k0e;

use super::SuperconductorParams;

/// Dissipative floor for sigma1, S/m. Keeps internal quality factors
/// finite when the quasiparticle population underflows.
pub const SIGMA1_FLOOR: f64 = 1e-30;

/// Complex conductivity evaluated at one (omega, T) point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexConductivity {
    /// Dissipative part, S/m.
    pub sigma1: f64,
    /// Reactive (kinetic-inductance) part, S/m.
    pub sigma2: f64,
    /// Angular frequency the values refer to, rad/s.
    pub omega: f64,
    /// Temperature the values refer to, K.
    pub t: f64,
}

impl ComplexConductivity {
    /// Loss tangent sigma1/sigma2 of the superconducting sheet.
    pub fn ratio(&self) -> f64 {
        self.sigma1 / self.sigma2
    }
}

/// Conductivity evaluation strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SigmaModel {
    /// Closed-form low-frequency expressions above.
    Analytic,
    /// Interpolation on a measured (T, omega) grid.
    Table(SigmaTable),
}

/// Evaluate the complex conductivity of `sc` at angular frequency `omega`
/// (rad/s) and temperature `t` (K).
pub fn sc_conductivity(
    sc: &SuperconductorParams,
    omega: f64,
    t: f64,
) -> Result<ComplexConductivity> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "conductivity needs a positive frequency, got omega = {omega} rad/s"
        )));
    }
    if t < 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!(
            "conductivity needs a non-negative temperature, got T = {t} K"
        )));
    }
    if t >= sc.tc {
        return Err(Error::NormalState { t, tc: sc.tc });
    }
    match &sc.sigma_model {
        SigmaModel::Analytic => analytic(sc, omega, t),
        SigmaModel::Table(table) => table.lookup(omega, t),
    }
}

fn analytic(sc: &SuperconductorParams, omega: f64, t: f64) -> Result<ComplexConductivity> {
    let gap = sc.gap0;
    let photon_energy = HBAR * omega;
    if photon_energy >= 2.0 * gap {
        return Err(Error::PairBreaking {
            photon_energy,
            two_gap: 2.0 * gap,
        });
    }
    let sigma_n = sc.sigma_n();

    // T = 0 limits: tanh(inf) = 1, quasiparticle term underflows to the floor.
    let (sigma1, sigma2) = if t == 0.0 {
        (SIGMA1_FLOOR, sigma_n * std::f64::consts::PI * gap / photon_energy)
    } else {
        let y = photon_energy / (2.0 * K_B * t);
        let exponent = -gap / (K_B * t);
        let sigma2 = sigma_n * std::f64::consts::PI * gap / photon_energy
            * (gap / (2.0 * K_B * t)).tanh();
        // e^(-gap/kBT) sinh(y) K0(y) = e^(-gap/kBT) (1 - e^(-2y))/2 * K0e(y):
        // the scaled Bessel form keeps every factor bounded, so the product
        // cannot overflow even at y ~ 1e5; it cleanly underflows instead.
        let sigma1 = if exponent < -745.0 {
            SIGMA1_FLOOR
        } else {
            let raw = sigma_n * 4.0 * gap / photon_energy
                * exponent.exp()
                * 0.5
                * (1.0 - (-2.0 * y).exp())
                * bessel_k0e(y);
            raw.max(SIGMA1_FLOOR)
        };
        (sigma1, sigma2)
    };

    Ok(ComplexConductivity {
        sigma1,
        sigma2,
        omega,
        t,
    })
}

/// Measured conductivity on a rectangular (T, omega) grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaTable {
    /// Source path, kept for provenance.
    pub path: Option<String>,
    t_grid: Vec<f64>,
    omega_grid: Vec<f64>,
    /// Row-major [t][omega].
    sigma1: Vec<f64>,
    sigma2: Vec<f64>,
}

impl SigmaTable {
    /// Parse the `T_K,omega_rad_s,sigma1_S_m,sigma2_S_m` CSV format.
    /// Rows must be grouped by strictly increasing T, each group listing
    /// the same strictly increasing omega grid.
    pub fn from_csv(path: Option<&str>, text: &str) -> Result<SigmaTable> {
        let label = path.unwrap_or("<inline>");
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| {
            Error::TableRange(format!("{label}: empty conductivity table"))
        })?;
        let expect = "T_K,omega_rad_s,sigma1_S_m,sigma2_S_m";
        if header.trim() != expect {
            return Err(Error::TableRange(format!(
                "{label}: header must be `{expect}`, got `{}`",
                header.trim()
            )));
        }

        let mut rows: Vec<[f64; 4]> = Vec::new();
        for (i, line) in lines {
            let mut vals = [0.0; 4];
            let mut fields = line.split(',');
            for v in vals.iter_mut() {
                let field = fields.next().ok_or_else(|| {
                    Error::TableRange(format!("{label}: line {}: expected 4 columns", i + 1))
                })?;
                *v = field.trim().parse().map_err(|_| {
                    Error::TableRange(format!(
                        "{label}: line {}: bad number `{}`",
                        i + 1,
                        field.trim()
                    ))
                })?;
            }
            if fields.next().is_some() {
                return Err(Error::TableRange(format!(
                    "{label}: line {}: expected exactly 4 columns",
                    i + 1
                )));
            }
            rows.push(vals);
        }
        if rows.is_empty() {
            return Err(Error::TableRange(format!("{label}: table has no data rows")));
        }

        // Split into T blocks and check rectangularity.
        let mut t_grid: Vec<f64> = Vec::new();
        let mut omega_grid: Vec<f64> = Vec::new();
        let mut sigma1 = Vec::new();
        let mut sigma2 = Vec::new();
        let mut block_omegas: Vec<f64> = Vec::new();

        let flush = |t: f64,
                         omegas: &mut Vec<f64>,
                         t_grid: &mut Vec<f64>,
                         omega_grid: &mut Vec<f64>|
         -> Result<()> {
            if omegas.is_empty() {
                return Ok(());
            }
            if omega_grid.is_empty() {
                *omega_grid = omegas.clone();
            } else if omega_grid != omegas {
                return Err(Error::TableRange(format!(
                    "{label}: omega grid at T = {t} K differs from the first block \
                     (table must be rectangular)"
                )));
            }
            omegas.clear();
            t_grid.push(t);
            Ok(())
        };

        let mut current_t = rows[0][0];
        for row in &rows {
            let [t, omega, s1, s2] = *row;
            if !(s1 > 0.0) || !(s2 > 0.0) {
                return Err(Error::TableRange(format!(
                    "{label}: sigma values must be positive at T = {t} K, omega = {omega}"
                )));
            }
            if t != current_t {
                if t < current_t {
                    return Err(Error::TableRange(format!(
                        "{label}: temperatures must be strictly increasing, got {t} after {current_t}"
                    )));
                }
                flush(current_t, &mut block_omegas, &mut t_grid, &mut omega_grid)?;
                current_t = t;
            }
            if let Some(&last) = block_omegas.last() {
                if omega <= last {
                    return Err(Error::TableRange(format!(
                        "{label}: omega must be strictly increasing within a T block, \
                         got {omega} after {last} at T = {t} K"
                    )));
                }
            }
            block_omegas.push(omega);
            sigma1.push(s1);
            sigma2.push(s2);
        }
        flush(current_t, &mut block_omegas, &mut t_grid, &mut omega_grid)?;

        if t_grid.len() < 2 || omega_grid.len() < 2 {
            return Err(Error::TableRange(format!(
                "{label}: need at least a 2x2 grid, got {}x{}",
                t_grid.len(),
                omega_grid.len()
            )));
        }
        if sigma1.len() != t_grid.len() * omega_grid.len() {
            return Err(Error::TableRange(format!(
                "{label}: ragged table: {} values for a {}x{} grid",
                sigma1.len(),
                t_grid.len(),
                omega_grid.len()
            )));
        }

        Ok(SigmaTable {
            path: path.map(str::to_string),
            t_grid,
            omega_grid,
            sigma1,
            sigma2,
        })
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.t_grid[0], *self.t_grid.last().unwrap())
    }

    pub fn omega_range(&self) -> (f64, f64) {
        (self.omega_grid[0], *self.omega_grid.last().unwrap())
    }

    /// Bilinear log-log interpolation; exact at grid nodes; queries outside
    /// the grid are range errors rather than extrapolations.
    pub fn lookup(&self, omega: f64, t: f64) -> Result<ComplexConductivity> {
        let label = self.path.as_deref().unwrap_or("<inline>");
        let (t_lo, t_hi) = self.t_range();
        let (w_lo, w_hi) = self.omega_range();
        if t < t_lo || t > t_hi {
            return Err(Error::TableRange(format!(
                "{label}: T = {t} K outside table range [{t_lo}, {t_hi}] K"
            )));
        }
        if omega < w_lo || omega > w_hi {
            return Err(Error::TableRange(format!(
                "{label}: omega = {omega} rad/s outside table range [{w_lo}, {w_hi}] rad/s"
            )));
        }

        let ti = bracket(&self.t_grid, t);
        let wi = bracket(&self.omega_grid, omega);
        let nw = self.omega_grid.len();
        let at = |i: usize, j: usize, v: &[f64]| v[i * nw + j];

        // Exact node hits return stored values verbatim.
        let t_exact = self.t_grid[ti] == t || self.t_grid[ti + 1] == t;
        let w_exact = self.omega_grid[wi] == omega || self.omega_grid[wi + 1] == omega;
        if t_exact && w_exact {
            let i = if self.t_grid[ti] == t { ti } else { ti + 1 };
            let j = if self.omega_grid[wi] == omega { wi } else { wi + 1 };
            return Ok(ComplexConductivity {
                sigma1: at(i, j, &self.sigma1),
                sigma2: at(i, j, &self.sigma2),
                omega,
                t,
            });
        }

        let ft = frac_log(self.t_grid[ti], self.t_grid[ti + 1], t);
        let fw = frac_log(self.omega_grid[wi], self.omega_grid[wi + 1], omega);
        let interp = |v: &[f64]| -> f64 {
            let ll = at(ti, wi, v).ln();
            let lh = at(ti, wi + 1, v).ln();
            let hl = at(ti + 1, wi, v).ln();
            let hh = at(ti + 1, wi + 1, v).ln();
            let lo = ll + (lh - ll) * fw;
            let hi = hl + (hh - hl) * fw;
            (lo + (hi - lo) * ft).exp()
        };

        Ok(ComplexConductivity {
            sigma1: interp(&self.sigma1),
            sigma2: interp(&self.sigma2),
            omega,
            t,
        })
    }
}

/// Index of the grid cell [i, i+1] containing x (grid strictly increasing,
/// x already range-checked).
fn bracket(grid: &[f64], x: f64) -> usize {
    match grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(grid.len() - 2),
        Err(i) => i.saturating_sub(1).min(grid.len() - 2),
    }
}

fn frac_log(lo: f64, hi: f64, x: f64) -> f64 {
    (x / lo).ln() / (hi / lo).ln()
}
