//! Run configuration: one TOML document covering every knob in the pipeline.
//!
//! Every section is optional and every key has a documented default, so the
//! empty document is a complete, runnable configuration (the reference
//! half-Faraday setup). Unknown keys anywhere are rejected. The effective
//! configuration — all defaults filled in — can be serialized back to TOML
//! for provenance; re-parsing that echo reproduces the same configuration.
//!
//! Unit conventions: energies/detunings/widths in γ (the natural linewidth),
//! times in 1/γ, magnetic fields in Tesla, angles in degrees (misalignment)
//! or mrad (grazing incidence), lengths in nm.

use nalgebra::{Matrix2, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::geometry::{GeometryConfig, Misalignment, Polarization, Preset};
use crate::hyperfine::{HalfInt, LevelScheme, NuclearSpecies};
use crate::liouvillian::{CavityParams, DriveConfig, PolarizationSet, Toggles};
use crate::parratt::{LayerStack, NuclearResonance};
use crate::response::{DetectionConfig, FrequencyGrid};
use crate::{constants, error::Error, C64, Result};

/// Complete run configuration with all sections defaulted.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub species: SpeciesSection,
    pub geometry: GeometrySection,
    pub cavity: CavitySection,
    pub drive: DriveSection,
    pub detection: DetectionConfig,
    pub grid: FrequencyGrid,
    pub toggles: Toggles,
    pub time: TimeSection,
    pub measure: MeasureSection,
    pub oracle: OracleSection,
    pub output: OutputSection,
}

/// Overridable nuclear constants (spins are fixed at 1/2 → 3/2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpeciesSection {
    pub g_ground: f64,
    pub g_excited: f64,
    pub mu_n_ev_per_tesla: f64,
    pub gamma_ev: f64,
    pub transition_kev: f64,
}

impl Default for SpeciesSection {
    fn default() -> Self {
        SpeciesSection {
            g_ground: constants::G_GROUND,
            g_excited: constants::G_EXCITED,
            mu_n_ev_per_tesla: constants::MU_N_EV_PER_TESLA,
            gamma_ev: constants::GAMMA_EV,
            transition_kev: constants::TRANSITION_KEV,
        }
    }
}

/// Magnetization direction, field strength, and incident polarization.
///
/// `b_hat` is required when `preset = "custom"` and rejected otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub preset: Preset,
    pub b_tesla: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_hat: Option<[f64; 3]>,
    pub input_polarization: PolarizationSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub misalignment: Option<Misalignment>,
}

impl Default for GeometrySection {
    fn default() -> Self {
        GeometrySection {
            preset: Preset::HalfFaraday,
            b_tesla: constants::B_HF_TESLA,
            b_hat: None,
            input_polarization: PolarizationSpec::default(),
            misalignment: None,
        }
    }
}

/// Incident/reference polarization: a named state or an explicit Jones
/// vector over (σ, π), each component as [re, im].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolarizationSpec {
    Named(PolarizationName),
    Jones { sigma: [f64; 2], pi: [f64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarizationName {
    Sigma,
    Pi,
    /// (σ̂ + i·π̂)/√2.
    CircularPlus,
    /// (σ̂ − i·π̂)/√2.
    CircularMinus,
}

impl Default for PolarizationSpec {
    fn default() -> Self {
        PolarizationSpec::Named(PolarizationName::Sigma)
    }
}

impl PolarizationSpec {
    /// Resolve to a validated polarization; errors carry `key` as the path.
    pub fn resolve(&self, key: &str) -> Result<Polarization> {
        let jones = match self {
            PolarizationSpec::Named(PolarizationName::Sigma) => return Ok(Polarization::sigma()),
            PolarizationSpec::Named(PolarizationName::Pi) => return Ok(Polarization::pi()),
            PolarizationSpec::Named(PolarizationName::CircularPlus) => Vector2::new(
                C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                C64::new(0.0, std::f64::consts::FRAC_1_SQRT_2),
            ),
            PolarizationSpec::Named(PolarizationName::CircularMinus) => Vector2::new(
                C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                C64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2),
            ),
            PolarizationSpec::Jones { sigma, pi } => Vector2::new(
                C64::new(sigma[0], sigma[1]),
                C64::new(pi[0], pi[1]),
            ),
        };
        Polarization::new(jones).map_err(|e| Error::validation(format!("{key}: {e}")))
    }
}

/// Effective cavity parameters of the single resonant mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CavitySection {
    /// Collective broadening γ_S in γ.
    pub gamma_s: f64,
    /// Collective level shift Δ_LS in γ.
    pub delta_ls: f64,
    /// Resonant amplitude prefactor; defaults to γ_S/2 (critically matched).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    /// Which polarization modes the cavity supports.
    pub coupled: PolarizationSet,
    /// Electronic background reflection matrix, entries as [re, im] with
    /// `ps` meaning π-out from σ-in.
    pub background: BackgroundSection,
}

impl Default for CavitySection {
    fn default() -> Self {
        CavitySection {
            gamma_s: 27.0,
            delta_ls: 1.0,
            amplitude: None,
            coupled: PolarizationSet::default(),
            background: BackgroundSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BackgroundSection {
    pub ss: [f64; 2],
    pub ps: [f64; 2],
    pub sp: [f64; 2],
    pub pp: [f64; 2],
}

impl BackgroundSection {
    fn matrix(&self) -> Matrix2<C64> {
        Matrix2::new(
            C64::new(self.ss[0], self.ss[1]),
            C64::new(self.sp[0], self.sp[1]),
            C64::new(self.ps[0], self.ps[1]),
            C64::new(self.pp[0], self.pp[1]),
        )
    }
}

/// Weak classical drive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveSection {
    /// Rabi frequency in γ; the linear-response regime needs Ω ≪ γ.
    pub rabi: f64,
    pub polarization: PolarizationSpec,
}

impl Default for DriveSection {
    fn default() -> Self {
        DriveSection {
            rabi: 1e-3,
            polarization: PolarizationSpec::default(),
        }
    }
}

/// Fourier window for time-response computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSection {
    /// Half-width of the detuning window in γ: the sweep covers ±window.
    pub window: f64,
    /// Number of frequency samples across the window.
    pub samples: usize,
}

impl Default for TimeSection {
    fn default() -> Self {
        TimeSection {
            window: 512.0,
            samples: 1 << 16,
        }
    }
}

/// Analyzer scan for the measurement simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeasureSection {
    pub scan: FrequencyGrid,
}

impl Default for MeasureSection {
    fn default() -> Self {
        MeasureSection {
            scan: FrequencyGrid {
                min: -60.0,
                max: 60.0,
                n: 121,
            },
        }
    }
}

/// Layer-stack oracle: which stack, its resonant sheet, and the scan ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    pub stack: StackKind,
    /// Nuclear susceptibility scale of the resonant sheet.
    pub strength: f64,
    /// Nuclear line width in γ.
    pub width: f64,
    /// Working angle in mrad; defaults to the fitted mode angle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_mrad: Option<f64>,
    /// Detuning half-span of the fitted spectrum in γ.
    pub span: f64,
    /// Points across the fitted spectrum.
    pub points: usize,
    /// Rocking-curve scan range in mrad.
    pub theta_min: f64,
    pub theta_max: f64,
    pub theta_points: usize,
}

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection {
            stack: StackKind::Guide,
            strength: constants::NUCLEAR_STRENGTH,
            width: constants::NUCLEAR_WIDTH,
            theta_mrad: None,
            span: 50.0,
            points: 1001,
            theta_min: 1.0,
            theta_max: 4.4,
            theta_points: 341,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StackKind {
    /// Pd-clad carbon guide with a thin resonant sheet at its center.
    Guide,
    /// Iron-centered variant with non-resonant iron buffers.
    Buffered,
}

/// Output destination for CLI artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
    pub plots: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: "out".into(),
            plots: true,
        }
    }
}

impl RunConfig {
    /// Parse a TOML document; unknown keys and type errors are validation
    /// errors carrying the offending key path.
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| Error::validation(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Full validation of all sections (syntactically valid values can still
    /// be out of range).
    pub fn validate(&self) -> Result<()> {
        self.species()?.validate()?;
        self.geometry()?;
        self.cavity_params()?.validate()?;
        self.drive()?.validate()?;
        self.detection.validate()?;
        self.grid.validate()?;
        if !(self.time.window > 0.0 && self.time.window.is_finite()) {
            return Err(Error::validation("time.window must be positive"));
        }
        if self.time.samples < 16 {
            return Err(Error::validation("time.samples must be at least 16"));
        }
        self.measure.scan.validate()?;
        let o = &self.oracle;
        if !(o.strength >= 0.0 && o.width > 0.0 && o.span > 0.0 && o.points >= 8) {
            return Err(Error::validation(
                "oracle needs strength >= 0, width > 0, span > 0, points >= 8",
            ));
        }
        if !(o.theta_min > 0.0 && o.theta_max > o.theta_min && o.theta_points >= 2) {
            return Err(Error::validation(
                "oracle needs 0 < theta_min < theta_max and theta_points >= 2",
            ));
        }
        if let Some(t) = o.theta_mrad {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::validation("oracle.theta_mrad must be positive"));
            }
        }
        if self.output.dir.is_empty() {
            return Err(Error::validation("output.dir must not be empty"));
        }
        Ok(())
    }

    /// The configuration with computed defaults materialized, suitable for
    /// provenance echoing. Parsing the echo reproduces this value.
    pub fn effective(&self) -> RunConfig {
        let mut eff = self.clone();
        eff.cavity.amplitude = Some(self.resolved_amplitude());
        eff
    }

    /// Canonical TOML echo of [`RunConfig::effective`].
    pub fn effective_toml(&self) -> String {
        toml::to_string_pretty(&self.effective())
            .expect("effective config serializes infallibly")
    }

    /// TOML used for provenance hashing: the effective configuration with
    /// the output destination normalized away, so artifact bytes do not
    /// depend on where they are written.
    pub fn provenance_toml(&self) -> String {
        let mut eff = self.effective();
        eff.output = OutputSection::default();
        toml::to_string_pretty(&eff).expect("effective config serializes infallibly")
    }

    /// Nuclear species with overrides applied (spins fixed at 1/2 → 3/2).
    pub fn species(&self) -> Result<NuclearSpecies> {
        let s = NuclearSpecies {
            ground_spin: HalfInt::from_doubled(1),
            excited_spin: HalfInt::from_doubled(3),
            g_ground: self.species.g_ground,
            g_excited: self.species.g_excited,
            gamma_ev: self.species.gamma_ev,
            mu_n_ev_per_tesla: self.species.mu_n_ev_per_tesla,
            transition_kev: self.species.transition_kev,
        };
        s.validate()?;
        Ok(s)
    }

    /// Resolved scattering geometry (preset or custom direction, field
    /// strength, input polarization, misalignment applied).
    pub fn geometry(&self) -> Result<GeometryConfig> {
        let g = &self.geometry;
        let b_hat = match (g.preset, g.b_hat) {
            (Preset::Custom, Some(v)) => Vector3::new(v[0], v[1], v[2]),
            (Preset::Custom, None) => {
                return Err(Error::validation(
                    "geometry.b_hat is required when geometry.preset = \"custom\"",
                ))
            }
            (_, Some(_)) => {
                return Err(Error::validation(
                    "geometry.b_hat is only allowed with geometry.preset = \"custom\"",
                ))
            }
            (preset, None) => preset.b_hat().expect("non-custom preset has a direction"),
        };
        let pol = g.input_polarization.resolve("geometry.input_polarization")?;
        let base = GeometryConfig::new(b_hat, g.b_tesla, pol)
            .map_err(|e| Error::validation(format!("geometry: {e}")))?;
        Ok(match g.misalignment {
            Some(m) => base.misaligned(m),
            None => base,
        })
    }

    /// Level scheme for the resolved species and geometry.
    pub fn scheme(&self) -> Result<LevelScheme> {
        LevelScheme::build(self.species()?, self.geometry()?)
    }

    fn resolved_amplitude(&self) -> f64 {
        self.cavity.amplitude.unwrap_or(self.cavity.gamma_s / 2.0)
    }

    /// Resolved cavity parameters.
    pub fn cavity_params(&self) -> Result<CavityParams> {
        let params = CavityParams {
            gamma_s: self.cavity.gamma_s,
            delta_ls: self.cavity.delta_ls,
            amplitude: self.resolved_amplitude(),
            r_c: self.cavity.background.matrix(),
            coupled: self.cavity.coupled,
        };
        params.validate()?;
        Ok(params)
    }

    /// Resolved drive.
    pub fn drive(&self) -> Result<DriveConfig> {
        Ok(DriveConfig {
            rabi: self.drive.rabi,
            polarization: self.drive.polarization.resolve("drive.polarization")?,
        })
    }

    /// Frequency grid used by the Fourier time response: ±window, `samples`
    /// points.
    pub fn time_grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::new(-self.time.window, self.time.window, self.time.samples)
    }

    /// Layer stack of the reflectivity oracle.
    pub fn oracle_stack(&self) -> LayerStack {
        let resonance = NuclearResonance {
            strength: self.oracle.strength,
            width: self.oracle.width,
        };
        match self.oracle.stack {
            StackKind::Guide => LayerStack::guide_cavity(resonance),
            StackKind::Buffered => LayerStack::buffered_cavity(resonance),
        }
    }
}
