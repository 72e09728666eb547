//! Quantity parsing for the tool boundary.
//!
//! Configs and command lines write quantities the way lab notebooks do:
//! `8GHz`, `300um`, `10mK`, with or without a space before the suffix.
//! Everything is converted to base SI here, exactly once — frequencies come
//! back in plain Hz (the angular 2π happens later, at config resolution,
//! so the factor lives in a single place).
//!
//! Every suffix is a power of ten, and scaling is done by splicing that
//! power into the number's decimal exponent before the one and only float
//! parse. `500um` is therefore the same double as the literal `500e-6` —
//! no second rounding from a multiply.
//!
//! Suffix tables (case-sensitive):
//!
//! * frequency: `Hz`, `kHz`, `MHz`, `GHz`, `THz`; bare numbers are Hz
//! * length: `m`, `cm`, `mm`, `um`/`µm`/`μm`, `nm`, `pm`; bare numbers are m
//! * temperature: `K`, `mK`, `uK`/`µK`/`μK`, `nK`; bare numbers are K

use crate::error::{Error, Result};

/// Longest-suffix-first tables of decimal exponents: `ends_with` scans in
/// order, so `um` must be tried before `m` and `mK` before `K`.
const FREQUENCY: &[(&str, i64)] = &[
    ("kHz", 3),
    ("MHz", 6),
    ("GHz", 9),
    ("THz", 12),
    ("Hz", 0),
];

const LENGTH: &[(&str, i64)] = &[
    ("cm", -2),
    ("mm", -3),
    ("um", -6),
    ("µm", -6),
    ("μm", -6),
    ("nm", -9),
    ("pm", -12),
    ("m", 0),
];

const TEMPERATURE: &[(&str, i64)] = &[
    ("mK", -3),
    ("uK", -6),
    ("µK", -6),
    ("μK", -6),
    ("nK", -9),
    ("K", 0),
];

fn parse_with_table(s: &str, table: &[(&str, i64)], what: &str, base: &str) -> Result<f64> {
    let trimmed = s.trim();
    let bad = |detail: &str| {
        let suffixes: Vec<&str> = table.iter().map(|(suf, _)| *suf).collect();
        Error::Config(format!(
            "cannot read {what} from `{s}`: {detail} (a bare number means {base}; suffixes: {})",
            suffixes.join(", ")
        ))
    };
    if trimmed.is_empty() {
        return Err(bad("empty value"));
    }
    let (number_part, shift) = table
        .iter()
        .find(|(suf, _)| trimmed.ends_with(suf))
        .map(|(suf, shift)| (&trimmed[..trimmed.len() - suf.len()], *shift))
        .unwrap_or((trimmed, 0));
    let number_part = number_part.trim();
    if number_part.is_empty() {
        return Err(bad("no number before the suffix"));
    }
    // Fold the suffix into the decimal exponent so the value is rounded to
    // f64 exactly once. This also rejects non-numeric spellings like `inf`.
    let (mantissa, exponent) = match number_part.find(['e', 'E']) {
        None => (number_part, shift),
        Some(at) => {
            let written: i64 = number_part[at + 1..]
                .parse()
                .map_err(|_| bad(&format!("`{number_part}` is not a number")))?;
            (&number_part[..at], written.saturating_add(shift))
        }
    };
    if mantissa.is_empty() {
        return Err(bad("no digits before the exponent"));
    }
    let value: f64 = format!("{mantissa}e{exponent}")
        .parse()
        .map_err(|_| bad(&format!("`{number_part}` is not a number")))?;
    if !value.is_finite() {
        return Err(bad("value must be finite"));
    }
    Ok(value)
}

/// Parse a frequency to Hz. Accepts `5e9`, `8GHz`, `600 GHz`, `1.2 THz`.
pub fn parse_frequency_hz(s: &str) -> Result<f64> {
    let f = parse_with_table(s, FREQUENCY, "a frequency", "Hz")?;
    if !(f > 0.0) {
        return Err(Error::Config(format!(
            "frequency must be positive, got {f} Hz from `{s}`"
        )));
    }
    Ok(f)
}

/// Parse a length to meters. Accepts `3e-4`, `300um`, `1 cm`, `20nm`.
pub fn parse_length_m(s: &str) -> Result<f64> {
    let l = parse_with_table(s, LENGTH, "a length", "m")?;
    if !(l > 0.0) {
        return Err(Error::Config(format!(
            "length must be positive, got {l} m from `{s}`"
        )));
    }
    Ok(l)
}

/// Parse a temperature to kelvin. Accepts `0.01`, `10mK`, `1 K`.
pub fn parse_temperature_k(s: &str) -> Result<f64> {
    let t = parse_with_table(s, TEMPERATURE, "a temperature", "K")?;
    if t < 0.0 {
        return Err(Error::Config(format!(
            "temperature cannot be negative, got {t} K from `{s}`"
        )));
    }
    Ok(t)
}
