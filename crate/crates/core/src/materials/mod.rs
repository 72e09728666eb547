//! Material parameter types, thermal occupancy, and the material registry.

pub mod conductivity;
pub mod db;
pub mod laws;

use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};

pub use conductivity::{sc_conductivity, ComplexConductivity, SigmaModel, SigmaTable};
pub use db::{builtin_db, load_material_db, Material, MaterialDb, Provenance};
pub use laws::TempLaw;

/// BCS weak-coupling ratio: gap0 = 1.76 kB Tc when no explicit gap is given.
pub const BCS_GAP_RATIO: f64 = 1.76;

/// Superconducting film parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperconductorParams {
    pub name: String,
    /// Critical temperature, K.
    pub tc: f64,
    /// Zero-temperature gap, J.
    pub gap0: f64,
    /// Single-spin density of states at the Fermi level, 1/(J m^3).
    pub n0: f64,
    /// Normal-state resistivity, Ohm m.
    pub rho_n: f64,
    /// How the complex conductivity is evaluated.
    pub sigma_model: SigmaModel,
}

impl SuperconductorParams {
    /// Build with the weak-coupling BCS default gap0 = 1.76 kB Tc.
    pub fn with_bcs_gap(name: &str, tc: f64, n0: f64, rho_n: f64) -> SuperconductorParams {
        SuperconductorParams {
            name: name.to_string(),
            tc,
            gap0: BCS_GAP_RATIO * K_B * tc,
            n0,
            rho_n,
            sigma_model: SigmaModel::Analytic,
        }
    }

    /// Normal-state conductivity 1/rho_n, S/m.
    pub fn sigma_n(&self) -> f64 {
        1.0 / self.rho_n
    }

    pub fn validate(&self) -> Result<()> {
        for (label, v) in [
            ("Tc", self.tc),
            ("gap0", self.gap0),
            ("N0", self.n0),
            ("rho_n", self.rho_n),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::MaterialDb {
                    entry: self.name.clone(),
                    reason: format!("superconductor field {label} must be positive, got {v}"),
                });
            }
        }
        Ok(())
    }
}

/// Thermal transport and storage laws for a host or film material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalMaterialParams {
    pub name: String,
    /// Thermal conductance law g_th(T), W/(m K): heat flow out of a strip
    /// of length L is g_th(T) * L * dT in the radial-flow model.
    pub g_th: TempLaw,
    /// Specific heat law c_th(T), J/(kg K).
    pub c_th: TempLaw,
    /// Mass density, kg/m^3.
    pub density: f64,
}

impl ThermalMaterialParams {
    pub fn validate(&self) -> Result<()> {
        let entry = |reason: String| Error::MaterialDb {
            entry: self.name.clone(),
            reason,
        };
        self.g_th.validate().map_err(|e| entry(format!("g_th: {e}")))?;
        self.c_th.validate().map_err(|e| entry(format!("c_th: {e}")))?;
        if !(self.density > 0.0) {
            return Err(entry(format!("density must be positive, got {}", self.density)));
        }
        Ok(())
    }
}

/// Frequency band of an electromagnetic mode, used to pick band-resolved
/// optical constants. Everything below the split (10 THz) is treated with
/// the sub-THz dielectric response; the optical band covers the telecom
/// pump/signal near 200 THz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Band {
    SubThz,
    Optical,
}

impl Band {
    pub fn of_angular(omega: f64) -> Band {
        const SPLIT: f64 = 2.0 * std::f64::consts::PI * 10e12;
        if omega < SPLIT {
            Band::SubThz
        } else {
            Band::Optical
        }
    }
}

/// Linear-in-frequency dielectric absorption ramp for the sub-THz band:
/// alpha rises from `alpha_min` toward `alpha_max` at `f_max` (Hz),
/// defined on (0, f_max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubThzAbsorption {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub f_max: f64,
}

impl SubThzAbsorption {
    /// Absorption coefficient (1/m) at angular frequency `omega`.
    pub fn alpha(&self, omega: f64) -> Result<f64> {
        let f = omega / (2.0 * std::f64::consts::PI);
        if !(f > 0.0) {
            return Err(Error::Domain(format!(
                "sub-THz absorption needs a positive frequency, got {f} Hz"
            )));
        }
        if f > self.f_max {
            return Err(Error::TableRange(format!(
                "sub-THz absorption ramp is defined up to {} Hz, queried at {} Hz",
                self.f_max, f
            )));
        }
        Ok(self.alpha_min + (self.alpha_max - self.alpha_min) * f / self.f_max)
    }
}

/// Band-resolved optical/dielectric parameters of the electro-optic host.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpticalMaterialParams {
    pub name: String,
    /// Effective second-order susceptibility for the Pockels interaction, m/V.
    pub chi2: f64,
    /// Underlying tensor element d33 for reference, m/V.
    pub d33: f64,
    /// Refractive index in the optical band.
    pub n_optical: f64,
    /// Group index in the optical band.
    pub n_g: f64,
    /// Refractive index in the sub-THz band.
    pub n_subthz: f64,
    /// Propagation loss in the optical band, 1/m.
    pub alpha_optical: f64,
    /// Dielectric absorption ramp in the sub-THz band.
    pub alpha_subthz: SubThzAbsorption,
}

impl OpticalMaterialParams {
    pub fn n(&self, band: Band) -> f64 {
        match band {
            Band::SubThz => self.n_subthz,
            Band::Optical => self.n_optical,
        }
    }

    /// Relative permittivity n^2 for the given band (non-magnetic medium).
    pub fn eps(&self, band: Band) -> f64 {
        let n = self.n(band);
        n * n
    }

    /// Propagation loss at angular frequency `omega`: the flat optical-band
    /// value, or the sub-THz ramp below the band split.
    pub fn alpha(&self, omega: f64) -> Result<f64> {
        match Band::of_angular(omega) {
            Band::Optical => Ok(self.alpha_optical),
            Band::SubThz => self.alpha_subthz.alpha(omega),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let entry = |reason: String| Error::MaterialDb {
            entry: self.name.clone(),
            reason,
        };
        for (label, v) in [
            ("chi2", self.chi2),
            ("d33", self.d33),
            ("n_optical", self.n_optical),
            ("n_g", self.n_g),
            ("n_subthz", self.n_subthz),
            ("alpha_optical", self.alpha_optical),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(entry(format!("optical field {label} must be positive, got {v}")));
            }
        }
        let r = &self.alpha_subthz;
        if !(r.alpha_min > 0.0) || !(r.alpha_max >= r.alpha_min) || !(r.f_max > 0.0) {
            return Err(entry(format!(
                "sub-THz absorption ramp is malformed: {r:?}"
            )));
        }
        Ok(())
    }
}

/// Bose-Einstein occupancy of a mode at angular frequency `omega` (rad/s)
/// and temperature `t` (K).
///
/// T = 0 returns exactly 0. For x = hbar omega / kB T the implementation
/// branches to avoid catastrophic cancellation and overflow: a Laurent
/// series 1/x - 1/2 + x/12 for x < 1e-6, zero for x > 700 (occupancy below
/// 1e-304), and 1/expm1(x) otherwise.
pub fn bose_einstein(omega: f64, t: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "Bose-Einstein occupancy needs a positive frequency, got omega = {omega} rad/s"
        )));
    }
    if t < 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!(
            "Bose-Einstein occupancy needs a non-negative temperature, got T = {t} K"
        )));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega / (K_B * t);
    Ok(bose_from_ratio(x))
}

/// Occupancy as a function of x = hbar omega / kB T directly.
pub(crate) fn bose_from_ratio(x: f64) -> f64 {
    if x > 700.0 {
        0.0
    } else if x < 1e-6 {
        1.0 / x - 0.5 + x / 12.0
    } else {
        1.0 / x.exp_m1()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn rel(a: f64, b: f64) -> f64 {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    }

    // mpmath (dps=50) reference: 1/(e^x - 1) over the full supported range,
    // including both branch boundaries.
    const BOSE_REFERENCE: &[(f64, f64)] = &[
        (1e-6, 999999.5000000834),
        (1e-3, 999.500083333332),
        (1e-2, 99.50083333194445),
        (0.1, 9.50833194477505),
        (0.5, 1.5414940825367982),
        (1.0, 0.5819767068693265),
        (2.0, 0.15651764274966565),
        (5.0, 0.006783654906304231),
        (10.0, 4.5401991009687765e-05),
        (20.0, 2.061153626686912e-09),
        (38.394, 2.1168869313949796e-17),
        (50.0, 1.9287498479639178e-22),
        (100.0, 3.720075976020836e-44),
        (300.0, 5.148200222412013e-131),
        (700.0, 9.85967654375977e-305),
    ];

    #[test]
    fn occupancy_matches_reference() {
        for &(x, want) in BOSE_REFERENCE {
            let got = bose_from_ratio(x);
            assert!(
                rel(got, want) < 1e-10,
                "bose(x={x}): got {got}, want {want}"
            );
        }
    }

    #[test]
    fn physical_points_match_reference() {
        // 8 GHz microwave mode at 10 mK and 1 K; 600 GHz mode at 1 K.
        let n = bose_einstein(TAU * 8e9, 0.010).unwrap();
        assert!(rel(n, 2.1170042876512077e-17) < 1e-10);
        let n = bose_einstein(TAU * 8e9, 1.0).unwrap();
        assert!(rel(n, 2.1364940146878637) < 1e-10);
        let n = bose_einstein(TAU * 600e9, 1.0).unwrap();
        assert!(rel(n, 3.120982282384426e-13) < 1e-10);
    }

    #[test]
    fn zero_temperature_is_exactly_zero() {
        assert_eq!(bose_einstein(TAU * 8e9, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn deep_quantum_regime_underflows_to_zero() {
        // x > 700
        assert_eq!(bose_einstein(TAU * 600e9, 1e-3).unwrap(), 0.0);
    }

    #[test]
    fn series_branch_joins_smoothly() {
        // At the cut both formulas agree to machine precision.
        let x: f64 = 1e-6;
        let series = 1.0 / x - 0.5 + x / 12.0;
        let direct = 1.0 / x.exp_m1();
        assert!(rel(series, direct) < 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(bose_einstein(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(bose_einstein(-1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(bose_einstein(1.0, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn band_split() {
        assert_eq!(Band::of_angular(TAU * 600e9), Band::SubThz);
        assert_eq!(Band::of_angular(TAU * 1.2e12), Band::SubThz);
        assert_eq!(Band::of_angular(TAU * 200e12), Band::Optical);
    }

    #[test]
    fn subthz_absorption_ramp() {
        let ramp = SubThzAbsorption {
            alpha_min: 200.0,
            alpha_max: 500.0,
            f_max: 1.2e12,
        };
        assert!(rel(ramp.alpha(TAU * 600e9).unwrap(), 350.0) < 1e-12);
        assert!(rel(ramp.alpha(TAU * 1.2e12).unwrap(), 500.0) < 1e-12);
        assert!(matches!(ramp.alpha(TAU * 1.3e12), Err(Error::TableRange(_))));
        assert!(matches!(ramp.alpha(0.0), Err(Error::Domain(_))));
    }
}
