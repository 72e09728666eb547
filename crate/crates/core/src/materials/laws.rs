//! Temperature-dependent material laws.
//!
//! Thermal conductance and heat capacity of the relevant materials vary by
//! orders of magnitude between millikelvin and kelvin temperatures. A law
//! can be given in four forms: a plain power law, a polynomial with
//! arbitrary powers, a set of (T, value) anchor points interpolated
//! log-log (two anchors reduce exactly to a power law), or a CSV file of
//! anchor points loaded at database-build time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TempLaw {
    /// coeff * T^exponent
    PowerLaw { coeff: f64, exponent: f64 },
    /// sum of coeff * T^power terms, e.g. a T + b T^3 lattice/electron mix
    Polynomial { terms: Vec<[f64; 2]> },
    /// (T, value) anchors, interpolated linearly in log-log space and
    /// extended beyond the end anchors with the end segments' power laws
    Anchors { points: Vec<[f64; 2]> },
    /// anchors loaded from a two-column CSV file (T_K, value); the path is
    /// kept for provenance
    Table { path: String, points: Vec<[f64; 2]> },
}

impl TempLaw {
    /// Convenience constructor for the common two-anchor case.
    pub fn from_anchors(t1: f64, v1: f64, t2: f64, v2: f64) -> TempLaw {
        TempLaw::Anchors {
            points: vec![[t1, v1], [t2, v2]],
        }
    }

    /// Parse a `T_K,value` CSV document (header optional) into a Table law.
    pub fn from_table_csv(path: &str, text: &str) -> Result<TempLaw> {
        let law = TempLaw::Table {
            path: path.to_string(),
            points: parse_two_column_csv(path, text)?,
        };
        law.validate()?;
        Ok(law)
    }

    /// Check structural soundness: positive coefficients where positivity
    /// is required, at least two anchors, strictly increasing anchor
    /// temperatures.
    pub fn validate(&self) -> Result<()> {
        match self {
            TempLaw::PowerLaw { coeff, .. } => {
                if !(*coeff > 0.0) {
                    return Err(Error::Domain(format!(
                        "power law coefficient must be positive, got {coeff}"
                    )));
                }
            }
            TempLaw::Polynomial { terms } => {
                if terms.is_empty() {
                    return Err(Error::Domain("polynomial law needs at least one term".into()));
                }
                if terms.iter().all(|[c, _]| *c <= 0.0) {
                    return Err(Error::Domain(
                        "polynomial law needs at least one positive coefficient".into(),
                    ));
                }
            }
            TempLaw::Anchors { points } | TempLaw::Table { points, .. } => {
                if points.len() < 2 {
                    return Err(Error::Domain(
                        "anchor law needs at least two (T, value) points".into(),
                    ));
                }
                for w in points.windows(2) {
                    if !(w[1][0] > w[0][0]) {
                        return Err(Error::Domain(format!(
                            "anchor temperatures must be strictly increasing, got {} then {}",
                            w[0][0], w[1][0]
                        )));
                    }
                }
                for [t, v] in points {
                    if !(*t > 0.0) || !(*v > 0.0) {
                        return Err(Error::Domain(format!(
                            "anchor points must be positive, got ({t}, {v})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Evaluate the law at temperature `t` (kelvin, must be positive).
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!(
                "temperature law evaluated at non-positive T = {t} K"
            )));
        }
        match self {
            TempLaw::PowerLaw { coeff, exponent } => Ok(coeff * t.powf(*exponent)),
            TempLaw::Polynomial { terms } => {
                Ok(terms.iter().map(|[c, p]| c * t.powf(*p)).sum())
            }
            TempLaw::Anchors { points } | TempLaw::Table { points, .. } => {
                Ok(eval_anchors(points, t))
            }
        }
    }
}

/// Two-column numeric CSV: one (x, value) pair per line, an optional header
/// line tolerated. Shared by the law tables and the mode-overlap tables.
pub(crate) fn parse_two_column_csv(path: &str, text: &str) -> Result<Vec<[f64; 2]>> {
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if i == 0 && line.chars().any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
            continue; // header row
        }
        let mut it = line.split(',');
        let (a, b) = (it.next(), it.next());
        match (a, b) {
            (Some(a), Some(b)) => {
                let x: f64 = a.trim().parse().map_err(|_| {
                    Error::TableRange(format!("{path}: line {}: bad number `{a}`", i + 1))
                })?;
                let v: f64 = b.trim().parse().map_err(|_| {
                    Error::TableRange(format!("{path}: line {}: bad number `{b}`", i + 1))
                })?;
                points.push([x, v]);
            }
            _ => {
                return Err(Error::TableRange(format!(
                    "{path}: line {} needs two comma-separated columns",
                    i + 1
                )))
            }
        }
    }
    Ok(points)
}

/// Piecewise power-law interpolation through anchor points: linear in
/// (ln T, ln value). Outside the anchored range the nearest end segment's
/// power law continues, so a two-anchor law is one global power law.
fn eval_anchors(points: &[[f64; 2]], t: f64) -> f64 {
    let n = points.len();
    let seg = if t <= points[0][0] {
        0
    } else if t >= points[n - 1][0] {
        n - 2
    } else {
        // first segment whose right endpoint is at or above t
        points.windows(2).position(|w| t <= w[1][0]).unwrap_or(n - 2)
    };
    let [t0, v0] = points[seg];
    let [t1, v1] = points[seg + 1];
    let slope = (v1 / v0).ln() / (t1 / t0).ln();
    v0 * (t / t0).powf(slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn power_law_evaluates() {
        let law = TempLaw::PowerLaw { coeff: 4.0, exponent: 3.0 };
        assert!(rel(law.eval(0.5).unwrap(), 0.5).abs() < 1e-15);
        assert!(rel(law.eval(2.0).unwrap(), 32.0) < 1e-15);
    }

    #[test]
    fn polynomial_mixes_powers() {
        // electron + lattice heat-capacity shape: a T + b T^3
        let law = TempLaw::Polynomial {
            terms: vec![[0.0283, 1.0], [0.0012, 3.0]],
        };
        // frozen oracle value at T = 2 K: 0.0283*2 + 0.0012*8 = 0.0662
        assert!(rel(law.eval(2.0).unwrap(), 0.0662) < 1e-12);
    }

    #[test]
    fn two_anchors_make_a_power_law() {
        // (10 mK -> 1e-4, 1 K -> 1e-2) is exactly 0.01 * T
        let law = TempLaw::from_anchors(0.01, 1e-4, 1.0, 1e-2);
        assert!(rel(law.eval(0.3).unwrap(), 0.003) < 1e-12);
        // extension beyond the anchors keeps the same power law
        assert!(rel(law.eval(4.0).unwrap(), 0.04) < 1e-12);
        assert!(rel(law.eval(0.001).unwrap(), 1e-5) < 1e-12);
    }

    #[test]
    fn sqrt_law_from_anchors() {
        // (10 mK -> 1e-5, 1 K -> 1e-4) is 1e-4 * sqrt(T)
        let law = TempLaw::from_anchors(0.01, 1e-5, 1.0, 1e-4);
        // frozen oracle value at 0.3 K
        assert!(rel(law.eval(0.3).unwrap(), 5.4772255750516614e-05) < 1e-12);
    }

    #[test]
    fn multi_anchor_interpolation_hits_nodes() {
        let pts = vec![[0.01, 2.0], [0.1, 5.0], [1.0, 7.0], [10.0, 50.0]];
        let law = TempLaw::Anchors { points: pts.clone() };
        for [t, v] in &pts {
            assert!(rel(law.eval(*t).unwrap(), *v) < 1e-12);
        }
        // between nodes: stays between the bracketing values
        let mid = law.eval(0.3).unwrap();
        assert!(mid > 5.0 && mid < 7.0);
    }

    #[test]
    fn table_csv_round_trip() {
        let law = TempLaw::from_table_csv("cth.csv", "T_K,value\n0.1,1.0\n1.0,10.0\n").unwrap();
        assert!(rel(law.eval(0.5).unwrap(), 5.0) < 1e-12);
        match &law {
            TempLaw::Table { path, points } => {
                assert_eq!(path, "cth.csv");
                assert_eq!(points.len(), 2);
            }
            _ => panic!("expected table law"),
        }
    }

    #[test]
    fn invalid_laws_are_rejected() {
        assert!(TempLaw::PowerLaw { coeff: -1.0, exponent: 3.0 }.validate().is_err());
        assert!(TempLaw::Anchors { points: vec![[0.1, 1.0]] }.validate().is_err());
        assert!(TempLaw::Anchors { points: vec![[0.5, 1.0], [0.1, 2.0]] }
            .validate()
            .is_err());
        assert!(TempLaw::from_table_csv("x.csv", "0.1,1.0\nnot,numbers\n").is_err());
    }

    #[test]
    fn non_positive_temperature_is_domain_error() {
        let law = TempLaw::PowerLaw { coeff: 1.0, exponent: 1.0 };
        assert!(matches!(law.eval(0.0), Err(Error::Domain(_))));
        assert!(matches!(law.eval(-1.0), Err(Error::Domain(_))));
    }
}
