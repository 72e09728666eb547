//! Material registry: compiled-in defaults plus user overlays.
//!
//! Three materials ship builtin: the electro-optic host (LiNbO3), the
//! cladding/substrate oxide (SiO2), and the superconducting film (NbN).
//! A user database is a TOML document with one `[materials.<name>]` table
//! per entry, holding any of three component tables: `superconductor`,
//! `thermal`, `optical`. Overlay entries merge per component: a component
//! present in the file replaces the builtin one, components left out are
//! inherited, and entirely new materials are appended. Each material
//! records where its components came from.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::K_B;
use crate::error::{Error, Result};

use super::conductivity::{SigmaModel, SigmaTable};
use super::laws::TempLaw;
use super::{
    OpticalMaterialParams, SubThzAbsorption, SuperconductorParams, ThermalMaterialParams,
    BCS_GAP_RATIO,
};

/// Where a material's data came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Builtin,
    /// Loaded from a user database (the string names the source).
    File(String),
    /// Builtin entry with some components replaced from a user database.
    Mixed { builtin: Vec<String>, file: String },
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::Builtin => write!(f, "builtin"),
            Provenance::File(s) => write!(f, "file:{s}"),
            Provenance::Mixed { builtin, file } => {
                write!(f, "file:{file} (builtin: {})", builtin.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    pub provenance: Provenance,
    pub superconductor: Option<SuperconductorParams>,
    pub thermal: Option<ThermalMaterialParams>,
    pub optical: Option<OpticalMaterialParams>,
}

impl Material {
    pub fn validate(&self) -> Result<()> {
        if self.superconductor.is_none() && self.thermal.is_none() && self.optical.is_none() {
            return Err(Error::MaterialDb {
                entry: self.name.clone(),
                reason: "material defines no components".into(),
            });
        }
        if let Some(sc) = &self.superconductor {
            sc.validate()?;
        }
        if let Some(th) = &self.thermal {
            th.validate()?;
        }
        if let Some(op) = &self.optical {
            op.validate()?;
        }
        Ok(())
    }

    /// Render the entry in the database dialect (used by `materials show`).
    pub fn to_toml(&self) -> String {
        let raw = RawMaterial::from_material(self);
        let mut outer = BTreeMap::new();
        let mut mats = BTreeMap::new();
        mats.insert(self.name.clone(), raw);
        outer.insert("materials".to_string(), mats);
        toml::to_string_pretty(&outer).expect("material serialization cannot fail")
    }
}

/// Ordered material registry. Builtins come first, user entries after, in
/// document order; lookups are by exact name.
#[derive(Debug, Clone)]
pub struct MaterialDb {
    materials: Vec<Material>,
    /// Human-readable notes about defaults filled during loading (for
    /// provenance sidecars).
    pub load_notes: Vec<String>,
}

impl MaterialDb {
    pub fn get(&self, name: &str) -> Result<&Material> {
        self.materials
            .iter()
            .find(|m| m.name == name)
            .ok_or_else(|| Error::UnknownMaterial(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Material> {
        self.materials.iter()
    }

    pub fn names(&self) -> Vec<&str> {
        self.materials.iter().map(|m| m.name.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.materials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.materials.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        for m in &self.materials {
            m.validate()?;
        }
        Ok(())
    }

    fn upsert(&mut self, incoming: Material, source: &str) {
        if let Some(existing) = self.materials.iter_mut().find(|m| m.name == incoming.name) {
            let mut kept_builtin = Vec::new();
            let was_builtin = existing.provenance == Provenance::Builtin;
            if let Some(sc) = incoming.superconductor {
                existing.superconductor = Some(sc);
            } else if existing.superconductor.is_some() {
                kept_builtin.push("superconductor".to_string());
            }
            if let Some(th) = incoming.thermal {
                existing.thermal = Some(th);
            } else if existing.thermal.is_some() {
                kept_builtin.push("thermal".to_string());
            }
            if let Some(op) = incoming.optical {
                existing.optical = Some(op);
            } else if existing.optical.is_some() {
                kept_builtin.push("optical".to_string());
            }
            existing.provenance = if was_builtin && !kept_builtin.is_empty() {
                Provenance::Mixed {
                    builtin: kept_builtin,
                    file: source.to_string(),
                }
            } else {
                Provenance::File(source.to_string())
            };
        } else {
            self.materials.push(incoming);
        }
    }
}

/// The compiled-in registry: LiNbO3, SiO2, NbN.
pub fn builtin_db() -> MaterialDb {
    let linbo3 = Material {
        name: "LiNbO3".into(),
        provenance: Provenance::Builtin,
        superconductor: None,
        thermal: Some(ThermalMaterialParams {
            name: "LiNbO3".into(),
            // Phonon-dominated transport and storage, both ~T^3.
            g_th: TempLaw::PowerLaw { coeff: 4.0, exponent: 3.0 },
            c_th: TempLaw::PowerLaw { coeff: 2.705e-4, exponent: 3.0 },
            density: 4628.0,
        }),
        optical: Some(OpticalMaterialParams {
            name: "LiNbO3".into(),
            // Effective chi^(2) of the r33 Pockels response in a poled
            // waveguide; the bare d33 tensor element is kept alongside for
            // reference.
            chi2: 2.33e-10,
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
        }),
    };

    let sio2 = Material {
        name: "SiO2".into(),
        provenance: Provenance::Builtin,
        superconductor: None,
        thermal: Some(ThermalMaterialParams {
            name: "SiO2".into(),
            // Amorphous oxide: anchors at 10 mK and 1 K; log-log
            // interpolation makes these g_th ~ T and c_th ~ sqrt(T).
            g_th: TempLaw::from_anchors(0.01, 1e-4, 1.0, 1e-2),
            c_th: TempLaw::from_anchors(0.01, 1e-5, 1.0, 1e-4),
            density: 2200.0,
        }),
        optical: None,
    };

    let nbn = Material {
        name: "NbN".into(),
        provenance: Provenance::Builtin,
        superconductor: Some(SuperconductorParams {
            name: "NbN".into(),
            tc: 13.0,
            // Strong-coupling gap: 2.1 kB Tc rather than the weak-coupling
            // 1.76 default. This puts the pair-breaking edge at 1.138 THz,
            // just above the top of the sub-THz operating range.
            gap0: 2.1 * K_B * 13.0,
            n0: 2.4e47,
            rho_n: 2.0e-6,
            sigma_model: SigmaModel::Analytic,
        }),
        thermal: Some(ThermalMaterialParams {
            name: "NbN".into(),
            g_th: TempLaw::Anchors {
                points: vec![[0.01, 0.005], [1.0, 5.0]],
            },
            c_th: TempLaw::Polynomial {
                terms: vec![[0.0283, 1.0], [0.0012, 3.0]],
            },
            density: 8470.0,
        }),
        optical: None,
    };

    MaterialDb {
        materials: vec![linbo3, sio2, nbn],
        load_notes: Vec::new(),
    }
}

/// Build the registry from an optional user database document.
///
/// `source` is the TOML text (None or empty means builtins only) and
/// `source_name` labels it in provenance output. `base_dir` anchors any
/// relative table paths referenced by the document.
pub fn load_material_db(
    source: Option<&str>,
    source_name: &str,
    base_dir: &Path,
) -> Result<MaterialDb> {
    let mut db = builtin_db();
    let Some(text) = source else {
        return Ok(db);
    };
    if text.trim().is_empty() {
        return Ok(db);
    }

    let doc: toml::Table = text
        .parse()
        .map_err(|e| Error::MaterialDb {
            entry: source_name.to_string(),
            reason: format!("not valid TOML: {e}"),
        })?;

    for key in doc.keys() {
        if key != "materials" {
            return Err(Error::MaterialDb {
                entry: source_name.to_string(),
                reason: format!("unexpected top-level key `{key}` (only `materials` is allowed)"),
            });
        }
    }
    let Some(mats) = doc.get("materials") else {
        return Ok(db);
    };
    let mats = mats.as_table().ok_or_else(|| Error::MaterialDb {
        entry: source_name.to_string(),
        reason: "`materials` must be a table of material entries".into(),
    })?;

    for (name, value) in mats {
        let raw: RawMaterial =
            value
                .clone()
                .try_into()
                .map_err(|e: toml::de::Error| Error::MaterialDb {
                    entry: name.clone(),
                    reason: e.to_string(),
                })?;
        let material = raw.into_material(name, source_name, base_dir, &mut db.load_notes)?;
        material.validate()?;
        db.upsert(material, source_name);
    }

    db.validate()?;
    Ok(db)
}

// ---------------------------------------------------------------------
// Raw document shapes (the on-disk dialect).

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMaterial {
    #[serde(skip_serializing_if = "Option::is_none")]
    superconductor: Option<RawSuperconductor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    thermal: Option<RawThermal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    optical: Option<RawOptical>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSuperconductor {
    #[serde(rename = "Tc_K")]
    tc_k: f64,
    /// Gap as a multiple of kB Tc; mutually exclusive with `gap0_J`.
    #[serde(rename = "gap0_over_kB_Tc", skip_serializing_if = "Option::is_none")]
    gap0_over_kb_tc: Option<f64>,
    #[serde(rename = "gap0_J", skip_serializing_if = "Option::is_none")]
    gap0_j: Option<f64>,
    #[serde(rename = "N0_per_J_m3")]
    n0_per_j_m3: f64,
    rho_n_ohm_m: f64,
    /// Path to a measured conductivity table; absent means analytic.
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_table: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThermal {
    density_kg_m3: f64,
    g_th: RawLaw,
    c_th: RawLaw,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawLaw {
    PowerLaw { coeff: f64, exponent: f64 },
    Polynomial { terms: Vec<[f64; 2]> },
    Anchors { points: Vec<[f64; 2]> },
    Table { path: String },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptical {
    #[serde(rename = "chi2_m_V")]
    chi2_m_v: f64,
    #[serde(rename = "d33_m_V", skip_serializing_if = "Option::is_none")]
    d33_m_v: Option<f64>,
    n_optical: f64,
    n_g: f64,
    n_subthz: f64,
    alpha_optical_per_m: f64,
    alpha_subthz: RawRamp,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRamp {
    alpha_min_per_m: f64,
    alpha_max_per_m: f64,
    #[serde(rename = "f_max_Hz")]
    f_max_hz: f64,
}

impl RawMaterial {
    fn into_material(
        self,
        name: &str,
        source_name: &str,
        base_dir: &Path,
        notes: &mut Vec<String>,
    ) -> Result<Material> {
        let superconductor = match self.superconductor {
            None => None,
            Some(raw) => {
                let gap0 = match (raw.gap0_over_kb_tc, raw.gap0_j) {
                    (Some(_), Some(_)) => {
                        return Err(Error::MaterialDb {
                            entry: name.to_string(),
                            reason: "give either gap0_over_kB_Tc or gap0_J, not both".into(),
                        })
                    }
                    (Some(r), None) => r * K_B * raw.tc_k,
                    (None, Some(j)) => j,
                    (None, None) => {
                        notes.push(format!(
                            "materials.{name}.superconductor.gap0: defaulted to {BCS_GAP_RATIO}*kB*Tc"
                        ));
                        BCS_GAP_RATIO * K_B * raw.tc_k
                    }
                };
                let sigma_model = match raw.sigma_table {
                    None => SigmaModel::Analytic,
                    Some(rel_path) => {
                        let full = base_dir.join(&rel_path);
                        let text = std::fs::read_to_string(&full).map_err(|e| {
                            Error::MaterialDb {
                                entry: name.to_string(),
                                reason: format!(
                                    "cannot read sigma table `{}`: {e}",
                                    full.display()
                                ),
                            }
                        })?;
                        SigmaModel::Table(SigmaTable::from_csv(Some(&rel_path), &text)?)
                    }
                };
                Some(SuperconductorParams {
                    name: name.to_string(),
                    tc: raw.tc_k,
                    gap0,
                    n0: raw.n0_per_j_m3,
                    rho_n: raw.rho_n_ohm_m,
                    sigma_model,
                })
            }
        };

        let thermal = match self.thermal {
            None => None,
            Some(raw) => Some(ThermalMaterialParams {
                name: name.to_string(),
                g_th: raw.g_th.into_law(name, base_dir)?,
                c_th: raw.c_th.into_law(name, base_dir)?,
                density: raw.density_kg_m3,
            }),
        };

        let optical = match self.optical {
            None => None,
            Some(raw) => Some(OpticalMaterialParams {
                name: name.to_string(),
                chi2: raw.chi2_m_v,
                d33: raw.d33_m_v.unwrap_or(raw.chi2_m_v / 2.0),
                n_optical: raw.n_optical,
                n_g: raw.n_g,
                n_subthz: raw.n_subthz,
                alpha_optical: raw.alpha_optical_per_m,
                alpha_subthz: SubThzAbsorption {
                    alpha_min: raw.alpha_subthz.alpha_min_per_m,
                    alpha_max: raw.alpha_subthz.alpha_max_per_m,
                    f_max: raw.alpha_subthz.f_max_hz,
                },
            }),
        };

        Ok(Material {
            name: name.to_string(),
            provenance: Provenance::File(source_name.to_string()),
            superconductor,
            thermal,
            optical,
        })
    }

    fn from_material(m: &Material) -> RawMaterial {
        RawMaterial {
            superconductor: m.superconductor.as_ref().map(|sc| RawSuperconductor {
                tc_k: sc.tc,
                gap0_over_kb_tc: None,
                gap0_j: Some(sc.gap0),
                n0_per_j_m3: sc.n0,
                rho_n_ohm_m: sc.rho_n,
                sigma_table: match &sc.sigma_model {
                    SigmaModel::Analytic => None,
                    SigmaModel::Table(t) => t.path.clone(),
                },
            }),
            thermal: m.thermal.as_ref().map(|th| RawThermal {
                density_kg_m3: th.density,
                g_th: RawLaw::from_law(&th.g_th),
                c_th: RawLaw::from_law(&th.c_th),
            }),
            optical: m.optical.as_ref().map(|op| RawOptical {
                chi2_m_v: op.chi2,
                d33_m_v: Some(op.d33),
                n_optical: op.n_optical,
                n_g: op.n_g,
                n_subthz: op.n_subthz,
                alpha_optical_per_m: op.alpha_optical,
                alpha_subthz: RawRamp {
                    alpha_min_per_m: op.alpha_subthz.alpha_min,
                    alpha_max_per_m: op.alpha_subthz.alpha_max,
                    f_max_hz: op.alpha_subthz.f_max,
                },
            }),
        }
    }
}

impl RawLaw {
    fn into_law(self, entry: &str, base_dir: &Path) -> Result<TempLaw> {
        let law = match self {
            RawLaw::PowerLaw { coeff, exponent } => TempLaw::PowerLaw { coeff, exponent },
            RawLaw::Polynomial { terms } => TempLaw::Polynomial { terms },
            RawLaw::Anchors { points } => TempLaw::Anchors { points },
            RawLaw::Table { path } => {
                let full = base_dir.join(&path);
                let text = std::fs::read_to_string(&full).map_err(|e| Error::MaterialDb {
                    entry: entry.to_string(),
                    reason: format!("cannot read law table `{}`: {e}", full.display()),
                })?;
                TempLaw::from_table_csv(&path, &text)?
            }
        };
        law.validate().map_err(|e| Error::MaterialDb {
            entry: entry.to_string(),
            reason: e.to_string(),
        })?;
        Ok(law)
    }

    fn from_law(law: &TempLaw) -> RawLaw {
        match law {
            TempLaw::PowerLaw { coeff, exponent } => RawLaw::PowerLaw {
                coeff: *coeff,
                exponent: *exponent,
            },
            TempLaw::Polynomial { terms } => RawLaw::Polynomial { terms: terms.clone() },
            TempLaw::Anchors { points } => RawLaw::Anchors { points: points.clone() },
            TempLaw::Table { path, .. } => RawLaw::Table { path: path.clone() },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_exactly_three() {
        let db = builtin_db();
        assert_eq!(db.names(), vec!["LiNbO3", "SiO2", "NbN"]);
        db.validate().unwrap();
    }

    #[test]
    fn empty_source_yields_builtins() {
        let db = load_material_db(None, "none", Path::new(".")).unwrap();
        assert_eq!(db.len(), 3);
        let db = load_material_db(Some("  \n"), "empty.toml", Path::new(".")).unwrap();
        assert_eq!(db.len(), 3);
        assert!(db.iter().all(|m| m.provenance == Provenance::Builtin));
    }

    #[test]
    fn builtin_values_spot_checks() {
        let db = builtin_db();
        let nbn = db.get("NbN").unwrap();
        let sc = nbn.superconductor.as_ref().unwrap();
        assert_eq!(sc.tc, 13.0);
        // frozen: 2.1 * kB * 13
        assert!(((sc.gap0 - 3.769171770000e-22) / sc.gap0).abs() < 1e-12);
        let th = nbn.thermal.as_ref().unwrap();
        // anchors (10 mK, 5 mW/m/K) and (1 K, 5 W/m/K) give 5 T^1.5
        let g = th.g_th.eval(0.1).unwrap();
        assert!(((g - 0.15811388300841897) / g).abs() < 1e-12);
        let g = th.g_th.eval(4.0).unwrap();
        assert!(((g - 40.0) / g).abs() < 1e-12);

        let ln = db.get("LiNbO3").unwrap();
        let opt = ln.optical.as_ref().unwrap();
        assert_eq!(opt.chi2, 2.33e-10);
        assert_eq!(opt.alpha_optical, 84.0);
        let c = ln.thermal.as_ref().unwrap().c_th.eval(0.1).unwrap();
        assert!(((c - 2.705e-7) / c).abs() < 1e-12);

        let ox = db.get("SiO2").unwrap().thermal.as_ref().unwrap();
        let g = ox.g_th.eval(0.3).unwrap();
        assert!(((g - 0.003) / g).abs() < 1e-12);
    }

    #[test]
    fn overlay_merges_per_component() {
        let doc = r#"
[materials.LiNbO3.optical]
chi2_m_V = 5.4e-11
n_optical = 2.3
n_g = 2.3
n_subthz = 4.95
alpha_optical_per_m = 84.0
[materials.LiNbO3.optical.alpha_subthz]
alpha_min_per_m = 200.0
alpha_max_per_m = 500.0
f_max_Hz = 1.2e12
"#;
        let db = load_material_db(Some(doc), "user.toml", Path::new(".")).unwrap();
        assert_eq!(db.len(), 3);
        let ln = db.get("LiNbO3").unwrap();
        // optical replaced...
        assert_eq!(ln.optical.as_ref().unwrap().chi2, 5.4e-11);
        // ...d33 defaulted from chi2/2 when not given...
        assert_eq!(ln.optical.as_ref().unwrap().d33, 2.7e-11);
        // ...thermal inherited from the builtin.
        assert!(ln.thermal.is_some());
        match &ln.provenance {
            Provenance::Mixed { builtin, file } => {
                assert_eq!(file, "user.toml");
                assert_eq!(builtin, &vec!["thermal".to_string()]);
            }
            p => panic!("expected mixed provenance, got {p:?}"),
        }
    }

    #[test]
    fn new_material_appends() {
        let doc = r#"
[materials.Al.superconductor]
Tc_K = 1.2
N0_per_J_m3 = 1.72e47
rho_n_ohm_m = 2.8e-8
"#;
        let db = load_material_db(Some(doc), "al.toml", Path::new(".")).unwrap();
        assert_eq!(db.len(), 4);
        let al = db.get("Al").unwrap();
        let sc = al.superconductor.as_ref().unwrap();
        // gap defaulted to 1.76 kB Tc, and the default was noted
        assert!(((sc.gap0 - 1.76 * K_B * 1.2) / sc.gap0).abs() < 1e-12);
        assert!(db.load_notes.iter().any(|n| n.contains("Al") && n.contains("1.76")));
        assert_eq!(al.provenance, Provenance::File("al.toml".into()));
    }

    #[test]
    fn errors_name_the_entry() {
        let doc = r#"
[materials.Weird.superconductor]
Tc_K = 9.0
N0_per_J_m3 = 1e47
rho_n_ohm_m = -2e-6
"#;
        let err = load_material_db(Some(doc), "w.toml", Path::new(".")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("Weird"), "error should name the entry: {msg}");
        assert!(msg.contains("rho_n"), "error should name the field: {msg}");

        let doc = "[materials.X]\nnonsense = 1\n";
        let err = load_material_db(Some(doc), "x.toml", Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("X"));

        let doc = r#"
[materials.Y.superconductor]
Tc_K = 9.0
gap0_over_kB_Tc = 1.9
gap0_J = 2e-22
N0_per_J_m3 = 1e47
rho_n_ohm_m = 2e-6
"#;
        let err = load_material_db(Some(doc), "y.toml", Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("not both"));
    }

    #[test]
    fn unknown_material_lookup_fails() {
        let db = builtin_db();
        assert!(matches!(db.get("Nb"), Err(Error::UnknownMaterial(_))));
    }

    #[test]
    fn show_round_trips_through_the_dialect() {
        let db = builtin_db();
        let text = db.get("NbN").unwrap().to_toml();
        // The rendered entry must load back cleanly over the builtins.
        let db2 = load_material_db(Some(&text), "roundtrip.toml", Path::new(".")).unwrap();
        let sc1 = db.get("NbN").unwrap().superconductor.as_ref().unwrap();
        let sc2 = db2.get("NbN").unwrap().superconductor.as_ref().unwrap();
        assert_eq!(sc1.gap0, sc2.gap0);
        assert_eq!(sc1.rho_n, sc2.rho_n);
        let th1 = db.get("NbN").unwrap().thermal.as_ref().unwrap();
        let th2 = db2.get("NbN").unwrap().thermal.as_ref().unwrap();
        assert_eq!(th1.g_th, th2.g_th);
    }

    #[test]
    fn law_table_file_loads() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("gth.csv"), "T_K,value\n0.1,1.0\n1.0,100.0\n").unwrap();
        let doc = r#"
[materials.Host.thermal]
density_kg_m3 = 3000.0
g_th = { kind = "table", path = "gth.csv" }
c_th = { kind = "power_law", coeff = 1e-4, exponent = 3.0 }
"#;
        let db = load_material_db(Some(doc), "host.toml", dir.path()).unwrap();
        let th = db.get("Host").unwrap().thermal.as_ref().unwrap();
        let v = th.g_th.eval(0.5).unwrap();
        // two anchors a decade apart spanning 1..100: power law T^2
        assert!(((v - 25.0) / v).abs() < 1e-12);
    }

    #[test]
    fn missing_law_table_errors_with_entry() {
        let doc = r#"
[materials.Host.thermal]
density_kg_m3 = 3000.0
g_th = { kind = "table", path = "nope.csv" }
c_th = { kind = "power_law", coeff = 1e-4, exponent = 3.0 }
"#;
        let err = load_material_db(Some(doc), "host.toml", Path::new("/definitely/missing")).unwrap_err();
        assert!(err.to_string().contains("Host"));
    }
}
