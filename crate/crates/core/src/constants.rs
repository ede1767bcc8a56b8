//! Physical constants and tabulated material data.
//!
//! Everything here is an input taken from standard tabulations, not a result
//! of this crate. Energies are in eV, lengths in nm, field strengths in Tesla.
//! The natural linewidth γ of the 14.4 keV resonance doubles as the global
//! frequency unit: all detunings and rates elsewhere are quoted in γ.

/// Nuclear magneton in eV per Tesla.
pub const MU_N_EV_PER_TESLA: f64 = 3.1525e-8;

/// Natural linewidth of the ⁵⁷Fe 14.4 keV transition in eV.
pub const GAMMA_EV: f64 = 4.66e-9;

/// Ground-state g-factor of ⁵⁷Fe.
pub const G_GROUND: f64 = 0.1812;

/// Excited-state g-factor of ⁵⁷Fe.
pub const G_EXCITED: f64 = -0.1033;

/// Magnetic hyperfine field of α-iron in Tesla.
pub const B_HF_TESLA: f64 = 33.3;

/// Nuclear transition energy in keV (informational).
pub const TRANSITION_KEV: f64 = 14.4;

/// X-ray wavelength at the transition energy, in nm.
pub const WAVELENGTH_NM: f64 = 0.08610;

/// Electronic index decrement δ (n = 1 − δ + iβ) at 14.4 keV: palladium.
pub const DELTA_PD: f64 = 1.04e-5;
/// Absorption index β at 14.4 keV: palladium.
pub const BETA_PD: f64 = 6.5e-7;
/// Electronic index decrement at 14.4 keV: carbon.
pub const DELTA_C: f64 = 2.0e-6;
/// Absorption index at 14.4 keV: carbon.
pub const BETA_C: f64 = 5.0e-10;
/// Electronic index decrement at 14.4 keV: iron.
pub const DELTA_FE: f64 = 7.3e-6;
/// Absorption index at 14.4 keV: iron.
pub const BETA_FE: f64 = 2.7e-7;
/// Electronic index decrement at 14.4 keV: silicon.
pub const DELTA_SI: f64 = 2.33e-6;
/// Absorption index at 14.4 keV: silicon.
pub const BETA_SI: f64 = 1.3e-8;

/// Default nuclear resonance strength of the oracle's single-line layer, in
/// index units times γ. Chosen so that the fitted collective width of the
/// default cavity stack lands near 28 γ, the regime studied throughout.
pub const NUCLEAR_STRENGTH: f64 = 3.0e-6;

/// Default nuclear resonance width of the oracle's single-line layer, in γ.
pub const NUCLEAR_WIDTH: f64 = 1.0;

/// Zeeman energy scale μ_N·B/γ (dimensionless, in γ per unit g·m) for a
/// given field strength in Tesla.
pub fn zeeman_scale(b_tesla: f64) -> f64 {
    MU_N_EV_PER_TESLA * b_tesla / GAMMA_EV
}
