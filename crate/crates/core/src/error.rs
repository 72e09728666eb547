use thiserror::Error;

/// Crate-wide error type. Variants carry enough context to name the
/// offending quantity, entry, or regime in the message.
#[derive(Debug, Error)]
pub enum Error {
    /// An input is outside the mathematical domain of an operation
    /// (non-positive frequency, negative temperature, and so on).
    #[error("domain error: {0}")]
    Domain(String),

    /// Superconducting conductivity was requested at or above the critical
    /// temperature, where the material is normal-state and the model does
    /// not apply.
    #[error("normal-state regime: T = {t} K is at or above Tc = {tc} K")]
    NormalState { t: f64, tc: f64 },

    /// Photon energy at or above twice the gap: the low-frequency
    /// (pair-breaking-free) conductivity approximation does not apply.
    #[error(
        "pair-breaking regime: hbar*omega = {photon_energy:.6e} J is at or above 2*gap = {two_gap:.6e} J"
    )]
    PairBreaking { photon_energy: f64, two_gap: f64 },

    /// A tabulated quantity was queried outside the table's grid.
    #[error("table range: {0}")]
    TableRange(String),

    /// A material database document failed to load or validate.
    /// `entry` names the offending material or field.
    #[error("material database entry `{entry}`: {reason}")]
    MaterialDb { entry: String, reason: String },

    /// A material name was not found in the registry.
    #[error("unknown material `{0}`")]
    UnknownMaterial(String),

    /// Run configuration is malformed or inconsistent.
    #[error("config error: {0}")]
    Config(String),

    /// A requested operating point cannot be realized (for example a zero
    /// coupling rate, which would require infinite pump power).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The self-consistent thermal solver failed while evaluating the model.
    #[error("thermal solver failed near T = {at_t} K: {reason}")]
    Solver { at_t: f64, reason: String },

    /// A sweep or figure specification is invalid.
    #[error("sweep spec: {0}")]
    Sweep(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
