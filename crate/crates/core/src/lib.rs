//! Simulation of superconducting electro-optic microwave-to-optical
//! quantum transducers.
//!
//! The crate models a thin-film converter in which a microwave mode is
//! upconverted to the optical band either directly (a single Pockels
//! interaction) or via a sub-THz intermediate mode (a kinetic-inductance
//! four-wave step followed by the Pockels step). For a chosen geometry,
//! frequency plan, and bath temperatures it computes, at unit
//! cooperativity:
//!
//! * the pump photon numbers each stage needs,
//! * the self-consistent operating temperature under pump heating,
//! * the end-to-end external conversion efficiency, and
//! * the added thermal noise referred to the microwave input.
//!
//! Modules build on each other roughly bottom-up: [`constants`] and
//! [`special`] provide CODATA values and the Bessel function the
//! conductivity model needs; [`materials`] holds parameter sets, the
//! registry, and the superconductor's complex conductivity; [`rates`]
//! turns geometry and frequencies into loss budgets and coupling rates;
//! [`thermal`] solves the pump-heating fixed point; [`transducer`]
//! assembles full single- and two-step operating points; [`explore`]
//! runs sweeps, reproduces the reference figures, and optimizes geometry;
//! [`table`], [`units`], and [`config`] cover serialization, unit-suffixed
//! quantity parsing, and run configuration.

pub mod config;
pub mod constants;
pub mod error;
pub mod explore;
pub mod materials;
pub mod rates;
pub mod special;
pub mod table;
pub mod thermal;
pub mod transducer;
pub mod units;

pub use error::{Error, Result};
