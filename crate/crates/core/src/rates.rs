//! Mode geometry, frequency plans, loss budgets, and coupling rates.
//!
//! The converter is a strip of cross-section w x w (transverse mode size
//! set by the width) and length L; all participating modes share that
//! volume V = w^2 L. Two parametric interactions are modeled:
//!
//! * an electro-optic (Pockels) three-wave interaction between a
//!   low-frequency mode, an optical pump, and an optical signal, with
//!   vacuum coupling rate
//!     g_eo = sqrt(hbar w_low w_po w_o / (8 eps0 e_low e_po e_o))
//!            * chi2 * xi / (V_low V_po V_o)^(1/6),
//! * a kinetic-inductance four-wave interaction in the superconducting
//!   film between the microwave mode, a sub-THz pump, and the sub-THz
//!   signal, with
//!     g_ki = (3/32) hbar w_pi sqrt(w_mu w_i) / (L_k I_*^2),
//!   where L_k is the film's kinetic inductance and I_* its nonlinearity
//!   current scale.

use serde::{Deserialize, Serialize};

use crate::constants::{C_LIGHT, EPS0, HBAR};
use crate::error::{Error, Result};
use crate::materials::{Band, ComplexConductivity, OpticalMaterialParams, SuperconductorParams};

/// Converter strip geometry, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Strip width (and transverse mode size).
    pub w: f64,
    /// Strip length.
    pub l: f64,
    /// Superconducting film thickness.
    pub t: f64,
}

impl Geometry {
    pub fn new(w: f64, l: f64, t: f64) -> Result<Geometry> {
        let g = Geometry { w, l, t };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (label, v) in [("w", self.w), ("L", self.l), ("t", self.t)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!(
                    "geometry {label} must be positive and finite, got {v} m"
                )));
            }
        }
        Ok(())
    }

    /// Shared mode volume w^2 L.
    pub fn volume(&self) -> f64 {
        self.w * self.w * self.l
    }

    /// The radial heat-flow picture behind the thermal model assumes a
    /// long, thin strip; below L = 10 w it degrades and results should be
    /// read with care.
    pub fn radial_flow_degraded(&self) -> bool {
        self.l < 10.0 * self.w
    }
}

/// Width below which the optical mode at `omega_po` is no longer guided:
/// w < 2 pi c / (n omega_po), i.e. the width drops under the in-medium
/// wavelength.
pub fn optical_cutoff_width(n_optical: f64, omega_po: f64) -> f64 {
    2.0 * std::f64::consts::PI * C_LIGHT / (n_optical * omega_po)
}

/// Mode frequencies of a conversion chain, all angular (rad/s).
///
/// Single-step: microwave mu mixes with the optical pump po to the optical
/// signal o = po + mu. Two-step: mu first converts to an intermediate
/// sub-THz mode i = mu + 2 pi_pump (four-wave, two pump photons at omega_pi),
/// then i mixes electro-optically to o = po + i.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyPlan {
    pub omega_mu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_i: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_pi: Option<f64>,
    pub omega_po: f64,
    pub omega_o: f64,
}

const REL_TOL: f64 = 1e-12;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

impl FrequencyPlan {
    /// Direct microwave-to-optical plan: omega_o = omega_po + omega_mu.
    pub fn single_step(omega_mu: f64, omega_po: f64) -> Result<FrequencyPlan> {
        let plan = FrequencyPlan {
            omega_mu,
            omega_i: None,
            omega_pi: None,
            omega_po,
            omega_o: omega_po + omega_mu,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// THz-mediated plan: the sub-THz pump sits at (omega_i - omega_mu)/2
    /// so that omega_i = omega_mu + 2 omega_pi, and omega_o = omega_po + omega_i.
    pub fn two_step(omega_mu: f64, omega_i: f64, omega_po: f64) -> Result<FrequencyPlan> {
        if !(omega_i > omega_mu) {
            return Err(Error::Config(format!(
                "two-step plan needs omega_i > omega_mu, got {omega_i} <= {omega_mu} rad/s"
            )));
        }
        let plan = FrequencyPlan {
            omega_mu,
            omega_i: Some(omega_i),
            omega_pi: Some(0.5 * (omega_i - omega_mu)),
            omega_po,
            omega_o: omega_po + omega_i,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn is_two_step(&self) -> bool {
        self.omega_i.is_some()
    }

    /// The low-frequency side of the electro-optic interaction: the
    /// intermediate mode when present, the microwave mode otherwise.
    pub fn omega_eo_low(&self) -> f64 {
        self.omega_i.unwrap_or(self.omega_mu)
    }

    /// Check positivity, ordering, and the energy-conservation relations
    /// to within a relative 1e-12.
    pub fn validate(&self) -> Result<()> {
        let mut named = vec![("omega_mu", self.omega_mu), ("omega_po", self.omega_po), ("omega_o", self.omega_o)];
        if let Some(w) = self.omega_i {
            named.push(("omega_i", w));
        }
        if let Some(w) = self.omega_pi {
            named.push(("omega_pi", w));
        }
        for (label, v) in named {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!(
                    "{label} must be positive and finite, got {v} rad/s"
                )));
            }
        }
        match (self.omega_i, self.omega_pi) {
            (None, None) => {
                if !rel_close(self.omega_o, self.omega_po + self.omega_mu, REL_TOL) {
                    return Err(Error::Config(format!(
                        "single-step energy conservation violated: omega_o = {} but omega_po + omega_mu = {}",
                        self.omega_o,
                        self.omega_po + self.omega_mu
                    )));
                }
            }
            (Some(omega_i), Some(omega_pi)) => {
                if !rel_close(omega_i, self.omega_mu + 2.0 * omega_pi, REL_TOL) {
                    return Err(Error::Config(format!(
                        "four-wave energy conservation violated: omega_i = {omega_i} but omega_mu + 2 omega_pi = {}",
                        self.omega_mu + 2.0 * omega_pi
                    )));
                }
                if !rel_close(self.omega_o, self.omega_po + omega_i, REL_TOL) {
                    return Err(Error::Config(format!(
                        "two-step energy conservation violated: omega_o = {} but omega_po + omega_i = {}",
                        self.omega_o,
                        self.omega_po + omega_i
                    )));
                }
                if !(self.omega_mu < omega_i && omega_i < self.omega_po) {
                    return Err(Error::Config(format!(
                        "two-step ordering violated: need omega_mu < omega_i < omega_po, got {} / {omega_i} / {}",
                        self.omega_mu, self.omega_po
                    )));
                }
            }
            _ => {
                return Err(Error::Config(
                    "omega_i and omega_pi must be given together".into(),
                ))
            }
        }
        Ok(())
    }
}

/// Internal and external loss rates of one mode, rad/s. The total is the
/// exact sum of the parts by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBudget {
    pub kappa_int: f64,
    pub kappa_ext: f64,
    pub kappa_tot: f64,
}

impl LossBudget {
    pub fn new(kappa_int: f64, kappa_ext: f64) -> LossBudget {
        LossBudget {
            kappa_int,
            kappa_ext,
            kappa_tot: kappa_int + kappa_ext,
        }
    }

    /// External coupling fraction kappa_ext / kappa_tot.
    pub fn ext_fraction(&self) -> f64 {
        self.kappa_ext / self.kappa_tot
    }
}

/// Loss budget of a superconducting microwave or sub-THz mode: internal
/// loss from the film's loss tangent, kappa_int = omega sigma1/sigma2, and
/// external coupling from the aspect-ratio law kappa_ext = omega (w/L)^2.
///
/// `extra_int` adds any further internal loss channel (e.g. sub-THz
/// dielectric absorption) on top of the film loss.
pub fn microwave_loss_rates(
    omega: f64,
    geom: &Geometry,
    sigma: &ComplexConductivity,
    extra_int: f64,
) -> LossBudget {
    let ratio = geom.w / geom.l;
    LossBudget::new(
        omega * sigma.ratio() + extra_int,
        omega * ratio * ratio,
    )
}

/// Loss budget of a traveling optical mode over length L: internal
/// propagation/absorption loss alpha*c and external (end-coupling) rate
/// c/(n_g L).
pub fn optical_loss_rates(alpha: f64, n_g: f64, l: f64) -> LossBudget {
    LossBudget::new(alpha * C_LIGHT, C_LIGHT / (n_g * l))
}

/// Vacuum electro-optic coupling rate for the plan's low-frequency mode,
/// optical pump, and optical signal. `xi` is the mode-overlap factor
/// (1 for perfect overlap).
pub fn eo_coupling(
    freqs: &FrequencyPlan,
    geom: &Geometry,
    opt: &OpticalMaterialParams,
    xi: f64,
) -> Result<f64> {
    if !(xi > 0.0) || xi > 1.0 {
        return Err(Error::Config(format!(
            "mode overlap xi must be in (0, 1], got {xi}"
        )));
    }
    geom.validate()?;
    let omega_low = freqs.omega_eo_low();
    let eps_low = opt.eps(Band::of_angular(omega_low));
    let eps_po = opt.eps(Band::of_angular(freqs.omega_po));
    let eps_o = opt.eps(Band::of_angular(freqs.omega_o));
    let v = geom.volume();
    // All three modes share the strip volume; the general form is the
    // sixth root of the volume product.
    let v_eff = (v * v * v).powf(1.0 / 6.0);
    let radicand =
        HBAR * omega_low * freqs.omega_po * freqs.omega_o / (8.0 * EPS0 * eps_low * eps_po * eps_o);
    Ok(radicand.sqrt() * opt.chi2 * xi / v_eff)
}

/// Kinetic-inductance parameters of the superconducting strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KineticInductorParams {
    /// Nonlinearity current scale I_*, A.
    pub i_star: f64,
    /// Kinetic inductance L_k, H.
    pub l_k: f64,
}

/// I_* = sqrt(pi N0 gap0^3 / (hbar rho_n)) w t and
/// L_k = (hbar rho_n / pi gap0) L / (w t).
///
/// Note the product L_k I_*^2 = N0 gap0^2 L w t that controls the
/// four-wave coupling strength: it scales with the full film volume.
pub fn ki_params(geom: &Geometry, sc: &SuperconductorParams) -> Result<KineticInductorParams> {
    geom.validate()?;
    sc.validate()?;
    let i_star =
        (std::f64::consts::PI * sc.n0 * sc.gap0.powi(3) / (HBAR * sc.rho_n)).sqrt() * geom.w * geom.t;
    let l_k = HBAR * sc.rho_n / (std::f64::consts::PI * sc.gap0) * geom.l / (geom.w * geom.t);
    Ok(KineticInductorParams { i_star, l_k })
}

/// Four-wave kinetic-inductance coupling rate between the microwave and
/// intermediate modes, pumped at omega_pi.
pub fn ki_coupling(freqs: &FrequencyPlan, kip: &KineticInductorParams) -> Result<f64> {
    let (Some(omega_i), Some(omega_pi)) = (freqs.omega_i, freqs.omega_pi) else {
        return Err(Error::Config(
            "kinetic-inductance coupling needs a two-step frequency plan".into(),
        ));
    };
    Ok(3.0 / 32.0 * HBAR * omega_pi * (freqs.omega_mu * omega_i).sqrt()
        / (kip.l_k * kip.i_star * kip.i_star))
}

/// Electro-optic cooperativity 4 g^2 n_pump / (kappa_a kappa_b): linear in
/// the pump photon number (three-wave process).
pub fn cooperativity_eo(g: f64, n_pump: f64, kappa_a: f64, kappa_b: f64) -> f64 {
    4.0 * g * g * n_pump / (kappa_a * kappa_b)
}

/// Kinetic-inductance cooperativity 4 g^2 n_pump^2 / (kappa_mu kappa_i):
/// quadratic in the pump photon number (four-wave process).
pub fn cooperativity_ki(g: f64, n_pump: f64, kappa_mu: f64, kappa_i: f64) -> f64 {
    4.0 * g * g * n_pump * n_pump / (kappa_mu * kappa_i)
}

/// Pump photon number that reaches unit electro-optic cooperativity.
pub fn pump_photons_eo(g: f64, kappa_low: f64, kappa_o: f64) -> Result<f64> {
    if !(g > 0.0) {
        return Err(Error::Infeasible(format!(
            "electro-optic coupling rate must be positive to reach unit cooperativity, got g = {g}"
        )));
    }
    Ok(kappa_low * kappa_o / (4.0 * g * g))
}

/// Pump photon number that reaches unit kinetic-inductance cooperativity.
pub fn pump_photons_ki(g: f64, kappa_mu: f64, kappa_i: f64) -> Result<f64> {
    if !(g > 0.0) {
        return Err(Error::Infeasible(format!(
            "kinetic-inductance coupling rate must be positive to reach unit cooperativity, got g = {g}"
        )));
    }
    Ok((kappa_mu * kappa_i).sqrt() / (2.0 * g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::K_B;
    use crate::materials::{sc_conductivity, SigmaModel, SubThzAbsorption};
    use std::f64::consts::TAU;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn red_dot_geometry() -> Geometry {
        Geometry { w: 1e-6, l: 300e-6, t: 20e-9 }
    }

    fn nbn() -> SuperconductorParams {
        SuperconductorParams {
            name: "NbN".into(),
            tc: 13.0,
            gap0: 2.1 * K_B * 13.0,
            n0: 2.4e47,
            rho_n: 2.0e-6,
            sigma_model: SigmaModel::Analytic,
        }
    }

    fn linbo3(chi2: f64) -> OpticalMaterialParams {
        OpticalMaterialParams {
            name: "LiNbO3".into(),
            chi2,
            d33: 2.7e-11,
            n_optical: 2.3,
            n_g: 2.3,
            n_subthz: 4.95,
            alpha_optical: 84.0,
            alpha_subthz: SubThzAbsorption {
                alpha_min: 200.0,
                alpha_max: 500.0,
                f_max: 1.2e12,
            },
        }
    }

    #[test]
    fn external_microwave_rates_match_reference() {
        let geom = red_dot_geometry();
        let sigma = sc_conductivity(&nbn(), TAU * 8e9, 0.01).unwrap();
        let b = microwave_loss_rates(TAU * 8e9, &geom, &sigma, 0.0);
        assert!(rel(b.kappa_ext, 558505.3606381855) < 1e-12);

        let sigma = sc_conductivity(&nbn(), TAU * 600e9, 0.01).unwrap();
        let b = microwave_loss_rates(TAU * 600e9, &geom, &sigma, 0.0);
        assert!(rel(b.kappa_ext, 41887902.04786391) < 1e-12);
    }

    #[test]
    fn internal_microwave_rate_is_omega_times_loss_tangent() {
        let geom = red_dot_geometry();
        let sigma = sc_conductivity(&nbn(), TAU * 8e9, 4.0).unwrap();
        let b = microwave_loss_rates(TAU * 8e9, &geom, &sigma, 0.0);
        let want = TAU * 8e9 * sigma.sigma1 / sigma.sigma2;
        assert!(rel(b.kappa_int, want) < 1e-14);
        assert_eq!(b.kappa_tot, b.kappa_int + b.kappa_ext);
    }

    #[test]
    fn optical_rates_match_reference() {
        let b = optical_loss_rates(84.0, 2.3, 300e-6);
        assert!(rel(b.kappa_int, 25182566472.0) < 1e-12);
        assert!(rel(b.kappa_ext, 434481823188.4058) < 1e-12);
    }

    #[test]
    fn eo_coupling_matches_reference() {
        let geom = red_dot_geometry();
        // Single-step: low mode is the 8 GHz microwave.
        let plan = FrequencyPlan::single_step(TAU * 8e9, TAU * 200e12).unwrap();
        let g = eo_coupling(&plan, &geom, &linbo3(2.33e-10), 1.0).unwrap();
        assert!(rel(g, 176606.4749247518) < 1e-12, "got {g}");
        let g = eo_coupling(&plan, &geom, &linbo3(5.4e-11), 1.0).unwrap();
        assert!(rel(g, 40930.25599114419) < 1e-12);

        // Two-step: low mode is the 600 GHz intermediate.
        let plan = FrequencyPlan::two_step(TAU * 8e9, TAU * 600e9, TAU * 200e12).unwrap();
        let g = eo_coupling(&plan, &geom, &linbo3(2.33e-10), 1.0).unwrap();
        assert!(rel(g, 1531718.7708509052) < 1e-12);
        let g = eo_coupling(&plan, &geom, &linbo3(5.4e-11), 1.0).unwrap();
        assert!(rel(g, 354990.61642038147) < 1e-12);
    }

    #[test]
    fn eo_coupling_scales_inversely_with_sqrt_volume() {
        let plan = FrequencyPlan::single_step(TAU * 8e9, TAU * 200e12).unwrap();
        let opt = linbo3(2.33e-10);
        let g1 = eo_coupling(&plan, &red_dot_geometry(), &opt, 1.0).unwrap();
        // 8x the volume: w doubled, L doubled -> g drops by sqrt(8)
        let big = Geometry { w: 2e-6, l: 600e-6, t: 20e-9 };
        let g2 = eo_coupling(&plan, &big, &opt, 1.0).unwrap();
        assert!(rel(g1 / g2, 8.0_f64.sqrt()) < 1e-12);
        // and xi scales linearly
        let g3 = eo_coupling(&plan, &red_dot_geometry(), &opt, 0.5).unwrap();
        assert!(rel(g3, 0.5 * g1) < 1e-14);
    }

    #[test]
    fn ki_params_match_reference() {
        let p = ki_params(&red_dot_geometry(), &nbn()).unwrap();
        assert!(rel(p.i_star, 0.008750369035346754) < 1e-12);
        assert!(rel(p.l_k, 2.6717856510044646e-09) < 1e-12);
        // The L_k I_*^2 product equals N0 gap0^2 V_film exactly.
        let product = p.l_k * p.i_star * p.i_star;
        assert!(rel(product, 2.0457584397741504e-13) < 1e-12);
        let gap = 2.1 * K_B * 13.0;
        let identity = 2.4e47 * gap * gap * 300e-6 * 1e-6 * 20e-9;
        assert!(rel(product, identity) < 1e-12);
    }

    #[test]
    fn ki_coupling_matches_reference() {
        let plan = FrequencyPlan::two_step(TAU * 8e9, TAU * 600e9, TAU * 200e12).unwrap();
        // The plan puts the pump at (600 - 8)/2 = 296 GHz.
        assert!(rel(plan.omega_pi.unwrap(), TAU * 296e9) < 1e-14);
        let p = ki_params(&red_dot_geometry(), &nbn()).unwrap();
        let g = ki_coupling(&plan, &p).unwrap();
        assert!(rel(g, 39.12597311207104) < 1e-12);
    }

    #[test]
    fn ki_coupling_requires_two_step_plan() {
        let plan = FrequencyPlan::single_step(TAU * 8e9, TAU * 200e12).unwrap();
        let p = ki_params(&red_dot_geometry(), &nbn()).unwrap();
        assert!(matches!(ki_coupling(&plan, &p), Err(Error::Config(_))));
    }

    #[test]
    fn unit_cooperativity_round_trip() {
        let g = 1531718.7708509052;
        let (ka, kb) = (4.19e7, 4.6e11);
        let n = pump_photons_eo(g, ka, kb).unwrap();
        assert!(rel(cooperativity_eo(g, n, ka, kb), 1.0) < 1e-12);
        let g = 39.12597311207104;
        let n = pump_photons_ki(g, 5.6e5, 4.2e7).unwrap();
        assert!(rel(cooperativity_ki(g, n, 5.6e5, 4.2e7), 1.0) < 1e-12);
    }

    #[test]
    fn zero_coupling_is_infeasible() {
        assert!(matches!(pump_photons_eo(0.0, 1.0, 1.0), Err(Error::Infeasible(_))));
        assert!(matches!(pump_photons_ki(-1.0, 1.0, 1.0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn frequency_plan_invariants() {
        let plan = FrequencyPlan::two_step(TAU * 8e9, TAU * 600e9, TAU * 200e12).unwrap();
        assert!(rel(plan.omega_o, TAU * 200.6e12) < 1e-12);
        plan.validate().unwrap();

        // omega_i must exceed omega_mu
        assert!(FrequencyPlan::two_step(TAU * 8e9, TAU * 8e9, TAU * 200e12).is_err());
        // ordering: omega_i < omega_po
        assert!(FrequencyPlan::two_step(TAU * 8e9, TAU * 300e12, TAU * 200e12).is_err());
        // tampered plans fail validation
        let mut bad = plan;
        bad.omega_o *= 1.0 + 1e-6;
        assert!(bad.validate().is_err());
        let mut bad = plan;
        bad.omega_pi = Some(bad.omega_pi.unwrap() * 1.001);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn geometry_flags() {
        let g = Geometry { w: 1e-6, l: 5e-6, t: 2e-8 };
        assert!(g.radial_flow_degraded());
        assert!(!red_dot_geometry().radial_flow_degraded());
        // Cutoff for n = 2.3 at 200 THz sits at 651.7 nm.
        let w_c = optical_cutoff_width(2.3, TAU * 200e12);
        assert!(rel(w_c, 6.517227347826087e-7) < 1e-12);
        assert!(Geometry { w: 0.999 * w_c, l: 3e-4, t: 2e-8 }.w < w_c);
        assert!(Geometry { w: -1.0, l: 3e-4, t: 2e-8 }.validate().is_err());
    }

    #[test]
    fn loss_budget_additivity_is_exact() {
        // bitwise, not approximately
        let b = LossBudget::new(0.1, 0.2);
        assert_eq!(b.kappa_tot, 0.1 + 0.2);
        let b = LossBudget::new(3.7e12, 1.1e-7);
        assert_eq!(b.kappa_tot, 3.7e12 + 1.1e-7);
    }
}
