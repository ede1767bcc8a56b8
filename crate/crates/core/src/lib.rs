//! Simulation of collective nuclear resonances in thin-film x-ray cavities.
//!
//! The crate models an ensemble of Mössbauer nuclei (⁵⁷Fe by default)
//! embedded in a grazing-incidence thin-film cavity. After adiabatic
//! elimination of the cavity field the nuclei obey a collective master
//! equation whose environment-induced terms — superradiant broadening,
//! collective level shift, and spontaneously generated coherences between
//! hyperfine transitions — shape the reflected spectrum.
//!
//! Module map:
//!
//! * [`hyperfine`] — Zeeman-split level schemes and transition couplings for
//!   arbitrary magnetization geometries;
//! * [`liouvillian`] — the collective master equation, its steady state and
//!   time evolution, with every collective term individually switchable;
//! * [`response`] — polarization-resolved reflection spectra, dip/peak
//!   analysis, time response and measurement simulation;
//! * [`parratt`] — independent scalar layer-stack reflectivity oracle and
//!   extraction of effective cavity parameters from it;
//! * [`config`] — TOML-backed run configuration;
//! * [`geometry`], [`constants`], [`linalg`], [`ode`] — supporting pieces.
//!
//! Unless stated otherwise, frequencies and detunings are measured in units
//! of the natural linewidth γ and times in units of 1/γ.

pub mod config;
pub mod constants;
pub mod error;
pub mod geometry;
pub mod hyperfine;
pub mod linalg;
pub mod liouvillian;
pub mod ode;
pub mod parratt;
pub mod response;

pub use error::Error;

/// Crate version, embedded in generated outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Complex double — the workhorse scalar of the crate.
pub type C64 = num_complex::Complex<f64>;

pub type Result<T> = std::result::Result<T, Error>;
