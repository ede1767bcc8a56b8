//! Magnetically split ⁵⁷Fe level scheme and cavity-polarization couplings.
//!
//! The hyperfine field splits the I = 1/2 ground and I = 3/2 excited state
//! into Zeeman sublevels; six M1 transitions with Δm ∈ {−1, 0, +1} connect
//! them. Each transition carries a Clebsch-Gordan amplitude, a detuning in γ,
//! and a complex coupling vector giving its projection onto the two cavity
//! polarization modes (σ, π); the k̂₀ projection does not couple to the
//! cavity and is discarded.

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::constants;
use crate::error::Error;
use crate::geometry::{spherical_basis, GeometryConfig, Preset};
use crate::{Result, C64};

/// Half-integer quantum number stored as its doubled value (exact integer
/// arithmetic; `HalfInt::from_doubled(-1)` is m = −1/2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfInt(i32);

impl HalfInt {
    pub fn from_doubled(doubled: i32) -> Self {
        HalfInt(doubled)
    }

    pub fn doubled(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

impl std::fmt::Display for HalfInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Which hyperfine manifold a level belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Ground,
    Excited,
}

/// Nuclear species constants. The built-in defaults describe the ⁵⁷Fe
/// 14.4 keV Mössbauer transition; all fields can be overridden from the run
/// configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuclearSpecies {
    pub ground_spin: HalfInt,
    pub excited_spin: HalfInt,
    pub g_ground: f64,
    pub g_excited: f64,
    /// Natural linewidth in eV; doubles as the global frequency unit γ.
    pub gamma_ev: f64,
    pub mu_n_ev_per_tesla: f64,
    /// Transition energy in keV (informational).
    pub transition_kev: f64,
}

impl NuclearSpecies {
    /// The ⁵⁷Fe defaults.
    pub fn fe57() -> Self {
        NuclearSpecies {
            ground_spin: HalfInt::from_doubled(1),
            excited_spin: HalfInt::from_doubled(3),
            g_ground: constants::G_GROUND,
            g_excited: constants::G_EXCITED,
            gamma_ev: constants::GAMMA_EV,
            mu_n_ev_per_tesla: constants::MU_N_EV_PER_TESLA,
            transition_kev: constants::TRANSITION_KEV,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ground_spin.doubled() != 1 || self.excited_spin.doubled() != 3 {
            return Err(Error::validation(
                "built-in level construction requires spins 1/2 (ground) and 3/2 (excited)",
            ));
        }
        if self.gamma_ev <= 0.0 {
            return Err(Error::validation("gamma_ev must be positive"));
        }
        if self.transition_kev <= 0.0 {
            return Err(Error::validation("transition_kev must be positive"));
        }
        Ok(())
    }

    /// Zeeman energy scale μ_N·B/γ for this species at field `b_tesla`.
    pub fn zeeman_scale(&self, b_tesla: f64) -> f64 {
        self.mu_n_ev_per_tesla * b_tesla / self.gamma_ev
    }
}

/// One Zeeman sublevel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub branch: Branch,
    pub m: HalfInt,
    /// Energy shift −g·μ_N·B·m in units of γ.
    pub energy_shift: f64,
}

/// One dipole-allowed transition with its geometry-dependent coupling.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub m_g: HalfInt,
    pub m_e: HalfInt,
    /// Helicity Δm = m_e − m_g.
    pub q: i8,
    /// Clebsch-Gordan amplitude ⟨1/2 m_g; 1 q | 3/2 m_e⟩.
    pub cg: f64,
    /// Line position relative to the unsplit resonance, in γ.
    pub detuning: f64,
    /// Complex coupling (c_σ, c_π) = cg·(ê_q·σ̂, ê_q·π̂).
    pub coupling: Vector2<C64>,
    /// Stationary population of the ground sublevel feeding this line.
    pub ground_population: f64,
}

impl Transition {
    /// Population-weighted coupling √p·c used in all collective quantities.
    pub fn weighted_coupling(&self) -> Vector2<C64> {
        self.coupling * C64::new(self.ground_population.sqrt(), 0.0)
    }
}

/// Clebsch-Gordan amplitude ⟨1/2 m_g; 1 q | 3/2 m_g+q⟩ in the
/// Condon-Shortley convention. Invalid quantum numbers give zero (no
/// transition), mirroring the selection rules.
pub fn clebsch_gordan(m_g: HalfInt, q: i8) -> f64 {
    match (m_g.doubled(), q) {
        (1, 1) | (-1, -1) => 1.0,
        (1, 0) | (-1, 0) => (2.0 / 3.0_f64).sqrt(),
        (1, -1) | (-1, 1) => (1.0 / 3.0_f64).sqrt(),
        _ => 0.0,
    }
}

/// Full level scheme: sublevels plus the six coupled transitions, ordered by
/// ascending detuning (ties broken by (m_g, q) for deterministic layouts).
#[derive(Clone, Debug)]
pub struct LevelScheme {
    pub species: NuclearSpecies,
    pub geometry: GeometryConfig,
    pub levels: Vec<Level>,
    pub transitions: Vec<Transition>,
}

fn bilinear(v: &Vector3<C64>, u: &Vector3<f64>) -> C64 {
    v.x * u.x + v.y * u.y + v.z * u.z
}

impl LevelScheme {
    /// Build the scheme for a species in a given magnetization geometry.
    pub fn build(species: NuclearSpecies, geometry: GeometryConfig) -> Result<Self> {
        species.validate()?;
        let scale = species.zeeman_scale(geometry.b_tesla());
        let basis = spherical_basis(geometry.b_hat())?;

        let mut levels = Vec::with_capacity(6);
        for dm in [-1, 1] {
            let m = HalfInt::from_doubled(dm);
            levels.push(Level {
                branch: Branch::Ground,
                m,
                energy_shift: -species.g_ground * scale * m.value(),
            });
        }
        for dm in [-3, -1, 1, 3] {
            let m = HalfInt::from_doubled(dm);
            levels.push(Level {
                branch: Branch::Excited,
                m,
                energy_shift: -species.g_excited * scale * m.value(),
            });
        }

        let sigma = crate::geometry::sigma_hat();
        let pi = crate::geometry::pi_hat();
        let mut transitions = Vec::with_capacity(6);
        for dm_g in [-1, 1] {
            let m_g = HalfInt::from_doubled(dm_g);
            for q in [-1i8, 0, 1] {
                let m_e = HalfInt::from_doubled(dm_g + 2 * i32::from(q));
                let cg = clebsch_gordan(m_g, q);
                if cg == 0.0 {
                    continue;
                }
                let detuning =
                    scale * (-species.g_excited * m_e.value() + species.g_ground * m_g.value());
                let e_q = basis.vector(q);
                let coupling =
                    Vector2::new(bilinear(e_q, &sigma), bilinear(e_q, &pi)) * C64::new(cg, 0.0);
                transitions.push(Transition {
                    m_g,
                    m_e,
                    q,
                    cg,
                    detuning,
                    coupling,
                    ground_population: 0.5,
                });
            }
        }
        transitions.sort_by(|a, b| {
            a.detuning
                .total_cmp(&b.detuning)
                .then(a.m_g.doubled().cmp(&b.m_g.doubled()))
                .then(a.q.cmp(&b.q))
        });
        debug_assert_eq!(transitions.len(), 6);
        Ok(LevelScheme {
            species,
            geometry,
            levels,
            transitions,
        })
    }

    /// Synthetic one-transition scheme used by oracle and limit checks: a
    /// single line at `detuning` with the given (σ, π) coupling and ground
    /// population.
    pub fn single_line(
        coupling: Vector2<C64>,
        detuning: f64,
        ground_population: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&ground_population) {
            return Err(Error::validation("ground_population must lie in [0, 1]"));
        }
        let geometry = GeometryConfig::preset(Preset::Faraday)?.with_field(0.0);
        let norm = coupling.norm();
        Ok(LevelScheme {
            species: NuclearSpecies::fe57(),
            geometry,
            levels: vec![
                Level {
                    branch: Branch::Ground,
                    m: HalfInt::from_doubled(0),
                    energy_shift: 0.0,
                },
                Level {
                    branch: Branch::Excited,
                    m: HalfInt::from_doubled(0),
                    energy_shift: detuning,
                },
            ],
            transitions: vec![Transition {
                m_g: HalfInt::from_doubled(0),
                m_e: HalfInt::from_doubled(0),
                q: 0,
                cg: norm,
                detuning,
                coupling,
                ground_population,
            }],
        })
    }

    /// Spread between the outermost lines, in γ.
    pub fn span(&self) -> f64 {
        let max = self
            .transitions
            .iter()
            .map(|t| t.detuning)
            .fold(f64::NEG_INFINITY, f64::max);
        let min = self
            .transitions
            .iter()
            .map(|t| t.detuning)
            .fold(f64::INFINITY, f64::min);
        max - min
    }

    /// Number of transitions with non-negligible cavity coupling.
    pub fn coupled_count(&self, tol: f64) -> usize {
        self.transitions
            .iter()
            .filter(|t| t.coupling.norm() > tol)
            .count()
    }
}
