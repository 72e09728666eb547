//! Physical constants (CODATA 2018, SI units).
//!
//! These are compiled in and are not part of any configuration surface:
//! nothing in the crate accepts user-supplied constants.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Speed of light in vacuum, m/s.
pub const C_LIGHT: f64 = 299_792_458.0;

/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.854_187_812_8e-12;

/// The constants bundled as a record, for provenance output and display.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
    pub c: f64,
    pub eps0: f64,
}

/// The one and only set of constants used by the crate.
pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    hbar: HBAR,
    k_b: K_B,
    c: C_LIGHT,
    eps0: EPS0,
};
