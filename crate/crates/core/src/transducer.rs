//! Full transduction-point assembly.
//!
//! A *stage* converts between two modes under the unit-cooperativity pump
//! condition: its pump power heats the chip, the raised temperature feeds
//! back into the loss rates and hence into the required pump, and the
//! self-consistent fixed point (solved in [`crate::thermal`]) fixes the
//! operating temperature. From the converged loss budgets the stage gets an
//! external efficiency and an added thermal occupancy.
//!
//! Two device schemes are assembled from stages:
//!
//! * single-step: one electro-optic stage converting the microwave mode
//!   directly to the optical sideband;
//! * two-step: a kinetic-inductance mixing stage lifts the microwave signal
//!   to a sub-THz intermediate mode, and an electro-optic stage converts
//!   that intermediate mode to the optical band.
//!
//! The payoff of the second scheme is thermal: the electro-optic pump is
//! strong and unavoidably heats the device, but a sub-THz intermediate mode
//! tolerates a warm bath (its Bose occupancy at a kelvin is still tiny),
//! while the dilution-fridge-cold microwave stage needs only the weak
//! kinetic-inductance pump.

use serde::{Deserialize, Serialize};

use crate::constants::{C_LIGHT, HBAR};
use crate::error::{Error, Result};
use crate::materials::{
    bose_einstein, sc_conductivity, MaterialDb, OpticalMaterialParams, SuperconductorParams,
    ThermalMaterialParams,
};
use crate::rates::{
    eo_coupling, ki_coupling, ki_params, microwave_loss_rates, optical_cutoff_width,
    optical_loss_rates, pump_photons_eo, pump_photons_ki, FrequencyPlan, Geometry, LossBudget,
};
use crate::thermal::{solve_self_consistent_dt, SolverOptions, ThermalSolution};

/// Occupancy values above this are reported as the cap itself with the
/// `saturated` flag set, keeping sweep outputs finite and NaN-free.
pub const OCCUPANCY_CAP: f64 = 1e30;

/// Which cryostat/medium weighting the added-occupancy formula uses.
///
/// The added noise of a stage is a mixture of two baths: the pump-heated
/// medium at `T_base + dT` and the cryostat at `T_base`, weighted by the
/// external and internal fractions of the low-mode loss budget. The source
/// formulas as printed weight the *heated* bath by the external fraction;
/// the physical convention for absorptive coupling suggests the opposite
/// (internal loss couples the mode to the hot medium). Both readings are
/// computed for every stage; this switch selects which one populates
/// `n_added` and the composed totals. The default follows the printed
/// weighting, which is what the published benchmark values correspond to.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccupancyBranch {
    #[default]
    AsPrinted,
    Physical,
}

/// Conversion scheme of an assembled point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    SingleStep,
    TwoStep,
}

/// Which conversion stage a [`StageResult`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageKind {
    /// chi^(2) three-wave mixing to the optical band.
    ElectroOptic,
    /// Kinetic-inductance four-wave mixing between microwave and sub-THz.
    KineticInductance,
}

/// The materials a transduction point is built from: the superconducting
/// film (loss tangent, kinetic inductance) and the electro-optic host
/// (optical constants plus the thermal laws that set how pump heat leaves
/// the chip).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialSet {
    pub superconductor: SuperconductorParams,
    pub host_optical: OpticalMaterialParams,
    pub host_thermal: ThermalMaterialParams,
}

impl MaterialSet {
    /// Pull a film and a host out of a material database. The film entry
    /// must carry superconductor parameters; the host entry must carry both
    /// optical and thermal parameters.
    pub fn from_db(db: &MaterialDb, film: &str, host: &str) -> Result<MaterialSet> {
        let film_entry = db.get(film)?;
        let host_entry = db.get(host)?;
        let superconductor = film_entry.superconductor.clone().ok_or_else(|| {
            Error::MaterialDb {
                entry: film.to_string(),
                reason: "selected as the film but has no superconductor section".into(),
            }
        })?;
        let host_optical = host_entry.optical.clone().ok_or_else(|| Error::MaterialDb {
            entry: host.to_string(),
            reason: "selected as the host but has no optical section".into(),
        })?;
        let host_thermal = host_entry.thermal.clone().ok_or_else(|| Error::MaterialDb {
            entry: host.to_string(),
            reason: "selected as the host but has no thermal section".into(),
        })?;
        Ok(MaterialSet {
            superconductor,
            host_optical,
            host_thermal,
        })
    }
}

/// Model switches shared by every point evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelOptions {
    /// Mode-overlap factor in (0, 1]; 1 means perfect spatial overlap.
    pub xi: f64,
    /// Bath-weighting convention for the added occupancy.
    pub occupancy_branch: OccupancyBranch,
    /// Add the host's sub-THz dielectric absorption to the intermediate
    /// mode's internal loss (off by default: the baseline model assigns
    /// intermediate-mode loss to the superconducting film alone).
    pub intermediate_dielectric_loss: bool,
    /// Thermal fixed-point solver controls.
    pub solver: SolverOptions,
}

impl Default for ModelOptions {
    fn default() -> ModelOptions {
        ModelOptions {
            xi: 1.0,
            occupancy_branch: OccupancyBranch::default(),
            intermediate_dielectric_loss: false,
            solver: SolverOptions::default(),
        }
    }
}

/// Diagnostics attached to a point. All are advisory: a flagged point still
/// carries finite numbers (runaway points are evaluated at the bracket cap).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    /// Some stage had no self-consistent operating temperature below the
    /// bracket cap; its values are reported at the cap and are not physical.
    pub runaway: bool,
    /// Some stage's heating equation had multiple fixed points; the cold
    /// branch is reported.
    pub multi_root: bool,
    /// The strip is narrower than the optical pump's cutoff width, so the
    /// guided optical mode assumed by the model does not exist.
    pub cutoff: bool,
    /// A mode overlap below 1 was requested (xi < 1).
    pub overlap_degraded: bool,
    /// Strip length is under 10x its width, outside the radial heat-flow
    /// regime the thermal conductance law assumes.
    pub radial_degraded: bool,
    /// The composed occupancy overflowed [`OCCUPANCY_CAP`] (a preceding
    /// stage had zero efficiency) and was clamped.
    pub saturated: bool,
}

impl Flags {
    pub fn any(&self) -> bool {
        self.runaway
            || self.multi_root
            || self.cutoff
            || self.overlap_degraded
            || self.radial_degraded
            || self.saturated
    }

    /// The set tokens, for the flat-file flags column.
    pub fn tokens(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (on, name) in [
            (self.runaway, "runaway"),
            (self.multi_root, "multi_root"),
            (self.cutoff, "cutoff"),
            (self.overlap_degraded, "overlap_degraded"),
            (self.radial_degraded, "radial_degraded"),
            (self.saturated, "saturated"),
        ] {
            if on {
                out.push(name);
            }
        }
        out
    }

    /// Parse the `+`-joined token form produced by [`Flags::to_string`].
    pub fn from_tokens(s: &str) -> Result<Flags> {
        let mut f = Flags::default();
        for tok in s.split('+').filter(|t| !t.is_empty()) {
            match tok {
                "runaway" => f.runaway = true,
                "multi_root" => f.multi_root = true,
                "cutoff" => f.cutoff = true,
                "overlap_degraded" => f.overlap_degraded = true,
                "radial_degraded" => f.radial_degraded = true,
                "saturated" => f.saturated = true,
                other => {
                    return Err(Error::Domain(format!("unknown diagnostic flag `{other}`")));
                }
            }
        }
        Ok(f)
    }

    fn merge(&mut self, other: Flags) {
        self.runaway |= other.runaway;
        self.multi_root |= other.multi_root;
        self.cutoff |= other.cutoff;
        self.overlap_degraded |= other.overlap_degraded;
        self.radial_degraded |= other.radial_degraded;
        self.saturated |= other.saturated;
    }
}

impl std::fmt::Display for Flags {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.tokens().join("+"))
    }
}

/// One converged conversion stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageResult {
    pub kind: StageKind,
    /// Angular frequency of the stage's low (input) mode, rad/s; the added
    /// occupancy refers to this mode.
    pub omega_low: f64,
    /// Cryostat temperature this stage runs at, K.
    pub t_base: f64,
    /// Loss budget of the low mode at the converged temperature.
    pub loss_low: LossBudget,
    /// Loss budget of the high (output) mode.
    pub loss_high: LossBudget,
    /// Vacuum coupling rate, rad/s.
    pub g: f64,
    /// Pump photon number that holds the stage at unit cooperativity.
    pub pump_photons: f64,
    /// Self-consistent heating solution.
    pub thermal: ThermalSolution,
    /// External efficiency of the stage, in [0, 1].
    pub eta_ext: f64,
    /// Added thermal occupancy per the selected bath weighting.
    pub n_added: f64,
    /// Added occupancy under the printed weighting (hot bath times the
    /// external fraction), always reported.
    pub n_added_printed: f64,
    /// Added occupancy under the physical weighting (hot bath times the
    /// internal fraction), always reported.
    pub n_added_physical: f64,
}

/// A fully assembled design point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransductionPoint {
    pub scheme: Scheme,
    /// Electro-optic strip geometry.
    pub geometry: Geometry,
    /// Kinetic-inductance strip geometry (two-step only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry_ki: Option<Geometry>,
    pub freqs: FrequencyPlan,
    /// Cryostat temperatures (stage 1, stage 2), K. Equal for single-step.
    pub t_bases: (f64, f64),
    /// Stage results in signal order (microwave end first).
    pub stages: Vec<StageResult>,
    /// Product of the stage external efficiencies.
    pub eta_total: f64,
    /// Added occupancies of all stages referred back to the input mode.
    pub n_total: f64,
    pub flags: Flags,
}

/// External conversion efficiency across a mode pair: the product of the
/// outcoupled fractions of both loss budgets.
pub fn external_efficiency(loss_a: &LossBudget, loss_b: &LossBudget) -> Result<f64> {
    if !(loss_a.kappa_tot > 0.0) || !(loss_b.kappa_tot > 0.0) {
        return Err(Error::Domain(format!(
            "external efficiency needs positive total loss rates, got {} and {}",
            loss_a.kappa_tot, loss_b.kappa_tot
        )));
    }
    Ok(loss_a.ext_fraction() * loss_b.ext_fraction())
}

/// Refer each stage's added occupancy back to the input: stage k's noise is
/// divided by the efficiencies of the stages before it, and the results
/// sum. A single stage passes through unchanged. Returns the total and a
/// saturation flag raised when a zero upstream efficiency pushed the total
/// over [`OCCUPANCY_CAP`] (the total is then clamped to the cap).
pub fn occupancy_composition(occupancies: &[f64], efficiencies: &[f64]) -> Result<(f64, bool)> {
    if occupancies.len() != efficiencies.len() {
        return Err(Error::Domain(format!(
            "occupancy composition got {} occupancies but {} efficiencies",
            occupancies.len(),
            efficiencies.len()
        )));
    }
    for &n in occupancies {
        if n < 0.0 || n.is_nan() {
            return Err(Error::Domain(format!(
                "stage occupancies must be non-negative, got {n}"
            )));
        }
    }
    for &eta in efficiencies {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Domain(format!(
                "stage efficiencies must lie in [0, 1], got {eta}"
            )));
        }
    }
    let mut total = 0.0f64;
    let mut upstream = 1.0f64;
    for (&n, &eta) in occupancies.iter().zip(efficiencies) {
        if n > 0.0 {
            // 0/0 is avoided by the n > 0 guard: a downstream stage that
            // adds nothing contributes nothing regardless of upstream loss.
            total += n / upstream;
        }
        upstream *= eta;
    }
    if total > OCCUPANCY_CAP || !total.is_finite() {
        Ok((OCCUPANCY_CAP, true))
    } else {
        Ok((total, false))
    }
}

/// Shared context for an electro-optic stage: everything that does not
/// change with temperature, precomputed once per point.
struct EoStage<'a> {
    geom: &'a Geometry,
    mats: &'a MaterialSet,
    omega_low: f64,
    omega_po: f64,
    g: f64,
    kappa_opt: LossBudget,
    /// Temperature-independent dielectric add-on to the low mode's
    /// internal loss (zero unless the intermediate-loss switch is on).
    extra_low_int: f64,
}

impl<'a> EoStage<'a> {
    fn new(
        geom: &'a Geometry,
        freqs: &FrequencyPlan,
        mats: &'a MaterialSet,
        opts: &ModelOptions,
    ) -> Result<EoStage<'a>> {
        let g = eo_coupling(freqs, geom, &mats.host_optical, opts.xi)?;
        let kappa_opt =
            optical_loss_rates(mats.host_optical.alpha_optical, mats.host_optical.n_g, geom.l);
        let omega_low = freqs.omega_eo_low();
        // The dielectric channel models the intermediate sub-THz mode only;
        // a single-step device's microwave mode keeps the film-loss model.
        let extra_low_int = if opts.intermediate_dielectric_loss && freqs.is_two_step() {
            mats.host_optical.alpha(omega_low)? * C_LIGHT
        } else {
            0.0
        };
        Ok(EoStage {
            geom,
            mats,
            omega_low,
            omega_po: freqs.omega_po,
            g,
            kappa_opt,
            extra_low_int,
        })
    }

    fn kappa_low(&self, t: f64) -> Result<LossBudget> {
        let sigma = sc_conductivity(&self.mats.superconductor, self.omega_low, t)?;
        Ok(microwave_loss_rates(
            self.omega_low,
            self.geom,
            &sigma,
            self.extra_low_int,
        ))
    }

    fn pump_photons(&self, t: f64) -> Result<f64> {
        let kappa_low = self.kappa_low(t)?;
        pump_photons_eo(self.g, kappa_low.kappa_tot, self.kappa_opt.kappa_tot)
    }

    /// Steady-state temperature rise the stage would cause with the chip
    /// sitting at absolute temperature `t`: the unit-cooperativity optical
    /// pump's absorbed power over the radial thermal conductance.
    fn rise_at(&self, t: f64) -> Result<f64> {
        let n_pump = self.pump_photons(t)?;
        let g_th = self.mats.host_thermal.g_th.eval(t)?;
        Ok(n_pump * HBAR * self.omega_po * self.kappa_opt.kappa_int / (g_th * self.geom.l))
    }

    fn solve(&self, t_base: f64, opts: &ModelOptions) -> Result<ThermalSolution> {
        let cap = 0.9 * self.mats.superconductor.tc - t_base;
        solve_self_consistent_dt(|dt| self.rise_at(t_base + dt), t_base, cap, &opts.solver)
    }

    fn finish(&self, t_base: f64, thermal: ThermalSolution, opts: &ModelOptions) -> Result<StageResult> {
        let t_final = t_base + thermal.delta_t;
        let loss_low = self.kappa_low(t_final)?;
        let pump_photons = pump_photons_eo(self.g, loss_low.kappa_tot, self.kappa_opt.kappa_tot)?;
        stage_result(
            StageKind::ElectroOptic,
            self.omega_low,
            t_base,
            loss_low,
            self.kappa_opt,
            self.g,
            pump_photons,
            thermal,
            opts,
        )
    }
}

/// Shared context for a kinetic-inductance stage.
struct KiStage<'a> {
    geom: &'a Geometry,
    mats: &'a MaterialSet,
    omega_mu: f64,
    omega_i: f64,
    omega_pi: f64,
    g: f64,
    extra_i_int: f64,
}

impl<'a> KiStage<'a> {
    fn new(
        geom: &'a Geometry,
        freqs: &FrequencyPlan,
        mats: &'a MaterialSet,
        opts: &ModelOptions,
    ) -> Result<KiStage<'a>> {
        let kip = ki_params(geom, &mats.superconductor)?;
        let g = ki_coupling(freqs, &kip)?;
        let (Some(omega_i), Some(omega_pi)) = (freqs.omega_i, freqs.omega_pi) else {
            return Err(Error::Config(
                "kinetic-inductance stage needs a two-step frequency plan".into(),
            ));
        };
        let extra_i_int = if opts.intermediate_dielectric_loss {
            mats.host_optical.alpha(omega_i)? * C_LIGHT
        } else {
            0.0
        };
        Ok(KiStage {
            geom,
            mats,
            omega_mu: freqs.omega_mu,
            omega_i,
            omega_pi,
            g,
            extra_i_int,
        })
    }

    fn kappa_mu(&self, t: f64) -> Result<LossBudget> {
        let sigma = sc_conductivity(&self.mats.superconductor, self.omega_mu, t)?;
        Ok(microwave_loss_rates(self.omega_mu, self.geom, &sigma, 0.0))
    }

    fn kappa_i(&self, t: f64) -> Result<LossBudget> {
        let sigma = sc_conductivity(&self.mats.superconductor, self.omega_i, t)?;
        Ok(microwave_loss_rates(
            self.omega_i,
            self.geom,
            &sigma,
            self.extra_i_int,
        ))
    }

    fn pump_photons(&self, t: f64) -> Result<f64> {
        let km = self.kappa_mu(t)?;
        let ki = self.kappa_i(t)?;
        pump_photons_ki(self.g, km.kappa_tot, ki.kappa_tot)
    }

    /// Steady-state rise from the sub-THz pump: its photons are absorbed
    /// through the film's loss tangent at the pump frequency.
    fn rise_at(&self, t: f64) -> Result<f64> {
        let n_pump = self.pump_photons(t)?;
        let sigma_pump = sc_conductivity(&self.mats.superconductor, self.omega_pi, t)?;
        let kappa_pump_abs = self.omega_pi * sigma_pump.ratio();
        let g_th = self.mats.host_thermal.g_th.eval(t)?;
        Ok(n_pump * HBAR * self.omega_pi * kappa_pump_abs / (g_th * self.geom.l))
    }

    fn solve(&self, t_base: f64, opts: &ModelOptions) -> Result<ThermalSolution> {
        let cap = 0.9 * self.mats.superconductor.tc - t_base;
        solve_self_consistent_dt(|dt| self.rise_at(t_base + dt), t_base, cap, &opts.solver)
    }

    fn finish(&self, t_base: f64, thermal: ThermalSolution, opts: &ModelOptions) -> Result<StageResult> {
        let t_final = t_base + thermal.delta_t;
        let loss_low = self.kappa_mu(t_final)?;
        let loss_high = self.kappa_i(t_final)?;
        let pump_photons = pump_photons_ki(self.g, loss_low.kappa_tot, loss_high.kappa_tot)?;
        stage_result(
            StageKind::KineticInductance,
            self.omega_mu,
            t_base,
            loss_low,
            loss_high,
            self.g,
            pump_photons,
            thermal,
            opts,
        )
    }
}

/// Assemble a stage record: efficiency from the final budgets, occupancy
/// from the two baths. The heated medium sits at the converged temperature
/// and the cryostat at the base; which one the external fraction weights
/// is the branch switch (both readings are stored).
#[allow(clippy::too_many_arguments)]
fn stage_result(
    kind: StageKind,
    omega_low: f64,
    t_base: f64,
    loss_low: LossBudget,
    loss_high: LossBudget,
    g: f64,
    pump_photons: f64,
    thermal: ThermalSolution,
    opts: &ModelOptions,
) -> Result<StageResult> {
    let eta_ext = external_efficiency(&loss_low, &loss_high)?;
    let nb_hot = bose_einstein(omega_low, t_base + thermal.delta_t)?;
    let nb_cold = bose_einstein(omega_low, t_base)?;
    let ext_frac = loss_low.ext_fraction();
    let int_frac = loss_low.kappa_int / loss_low.kappa_tot;
    let n_added_printed = nb_hot * ext_frac + nb_cold * int_frac;
    let n_added_physical = nb_hot * int_frac + nb_cold * ext_frac;
    let n_added = match opts.occupancy_branch {
        OccupancyBranch::AsPrinted => n_added_printed,
        OccupancyBranch::Physical => n_added_physical,
    };
    Ok(StageResult {
        kind,
        omega_low,
        t_base,
        loss_low,
        loss_high,
        g,
        pump_photons,
        thermal,
        eta_ext,
        n_added,
        n_added_printed,
        n_added_physical,
    })
}

fn point_flags(
    stages: &[StageResult],
    geoms: &[&Geometry],
    geom_eo: &Geometry,
    mats: &MaterialSet,
    freqs: &FrequencyPlan,
    opts: &ModelOptions,
    saturated: bool,
) -> Flags {
    let mut flags = Flags {
        overlap_degraded: opts.xi < 1.0,
        cutoff: geom_eo.w < optical_cutoff_width(mats.host_optical.n_optical, freqs.omega_po),
        saturated,
        ..Flags::default()
    };
    for s in stages {
        flags.merge(Flags {
            runaway: s.thermal.runaway,
            multi_root: s.thermal.multi_root,
            ..Flags::default()
        });
    }
    for g in geoms {
        flags.radial_degraded |= g.radial_flow_degraded();
    }
    flags
}

/// Evaluate a single-step electro-optic converter at cryostat temperature
/// `t1`. Runaway is not an error: the point comes back flagged, evaluated
/// at the bracket cap.
pub fn single_step_point(
    geom: &Geometry,
    freqs: &FrequencyPlan,
    t1: f64,
    mats: &MaterialSet,
    opts: &ModelOptions,
) -> Result<TransductionPoint> {
    if freqs.is_two_step() {
        return Err(Error::Config(
            "single-step evaluation got a two-step frequency plan".into(),
        ));
    }
    freqs.validate()?;
    geom.validate()?;
    let stage = EoStage::new(geom, freqs, mats, opts)?;
    let thermal = stage.solve(t1, opts)?;
    let result = stage.finish(t1, thermal, opts)?;
    let eta_total = result.eta_ext;
    let (n_total, saturated) = occupancy_composition(&[result.n_added], &[result.eta_ext])?;
    let stages = vec![result];
    let flags = point_flags(&stages, &[geom], geom, mats, freqs, opts, saturated);
    Ok(TransductionPoint {
        scheme: Scheme::SingleStep,
        geometry: *geom,
        geometry_ki: None,
        freqs: freqs.clone(),
        t_bases: (t1, t1),
        stages,
        eta_total,
        n_total,
        flags,
    })
}

/// Evaluate a two-step converter: the kinetic-inductance stage at cryostat
/// temperature `t1`, the electro-optic stage at `t2`. The composed noise
/// refers every stage back to the microwave input.
pub fn two_step_point(
    geom_ki: &Geometry,
    geom_eo: &Geometry,
    freqs: &FrequencyPlan,
    t1: f64,
    t2: f64,
    mats: &MaterialSet,
    opts: &ModelOptions,
) -> Result<TransductionPoint> {
    if !freqs.is_two_step() {
        return Err(Error::Config(
            "two-step evaluation needs a frequency plan with an intermediate mode".into(),
        ));
    }
    freqs.validate()?;
    geom_ki.validate()?;
    geom_eo.validate()?;
    let ki = KiStage::new(geom_ki, freqs, mats, opts)?;
    let eo = EoStage::new(geom_eo, freqs, mats, opts)?;
    let ki_thermal = ki.solve(t1, opts)?;
    let eo_thermal = eo.solve(t2, opts)?;
    let s1 = ki.finish(t1, ki_thermal, opts)?;
    let s2 = eo.finish(t2, eo_thermal, opts)?;
    let eta_total = s1.eta_ext * s2.eta_ext;
    let (n_total, saturated) = occupancy_composition(
        &[s1.n_added, s2.n_added],
        &[s1.eta_ext, s2.eta_ext],
    )?;
    let stages = vec![s1, s2];
    let flags = point_flags(
        &stages,
        &[geom_ki, geom_eo],
        geom_eo,
        mats,
        freqs,
        opts,
        saturated,
    );
    Ok(TransductionPoint {
        scheme: Scheme::TwoStep,
        geometry: *geom_eo,
        geometry_ki: Some(*geom_ki),
        freqs: freqs.clone(),
        t_bases: (t1, t2),
        stages,
        eta_total,
        n_total,
        flags,
    })
}

/// Open-loop temperature rise of the electro-optic stage: the heating
/// equation's right side evaluated at the bath temperature itself, with no
/// self-consistency. Matches the closed-loop solution whenever the loss
/// laws are temperature-independent; used for scaling surfaces and as a
/// solver cross-check.
pub fn open_loop_dt_eo(
    geom: &Geometry,
    freqs: &FrequencyPlan,
    t_base: f64,
    mats: &MaterialSet,
    opts: &ModelOptions,
) -> Result<f64> {
    EoStage::new(geom, freqs, mats, opts)?.rise_at(t_base)
}

/// Open-loop temperature rise of the kinetic-inductance stage at the bath
/// temperature; see [`open_loop_dt_eo`].
pub fn open_loop_dt_ki(
    geom: &Geometry,
    freqs: &FrequencyPlan,
    t_base: f64,
    mats: &MaterialSet,
    opts: &ModelOptions,
) -> Result<f64> {
    KiStage::new(geom, freqs, mats, opts)?.rise_at(t_base)
}
