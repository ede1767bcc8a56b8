//! Scattering frame, magnetization geometry, and polarization algebra.
//!
//! The fixed orthonormal frame is spanned by the propagation direction k̂₀,
//! the in-plane polarization σ̂, and the surface normal π̂, with
//! σ̂ = k̂₀ × π̂ (right-handed). The grazing angle is a few milliradians and
//! is neglected in the polarization geometry; corrections are O(θ²) ≈ 1e-5.
//!
//! A magnetization direction b̂ defines a spherical basis (ê₋₁, ê₀, ê₊₁)
//! of transition dipole directions. The transverse gauge is fixed
//! constructively (see [`spherical_basis`]) so that for b̂ ∥ π̂ the circular
//! dipoles come out proportional to σ̂ ± i·k̂₀, and for b̂ ∥ σ̂ proportional
//! to k̂₀ ± i·π̂.

use nalgebra::{Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::{Result, C64};

/// Tolerance on unit-norm validation of direction vectors and polarizations.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Propagation direction k̂₀ of the grazing-incidence beam.
pub fn k0_hat() -> Vector3<f64> {
    Vector3::new(1.0, 0.0, 0.0)
}

/// Surface normal π̂ (also the π polarization direction).
pub fn pi_hat() -> Vector3<f64> {
    Vector3::new(0.0, 1.0, 0.0)
}

/// In-plane polarization direction σ̂ = k̂₀ × π̂.
pub fn sigma_hat() -> Vector3<f64> {
    k0_hat().cross(&pi_hat())
}

/// Named rotation axes for magnetization misalignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    K0,
    Sigma,
    Pi,
}

impl Axis {
    /// The unit vector of the named axis in the fixed frame.
    pub fn unit(self) -> Vector3<f64> {
        match self {
            Axis::K0 => k0_hat(),
            Axis::Sigma => sigma_hat(),
            Axis::Pi => pi_hat(),
        }
    }
}

/// Rotate `v` by `degrees` about `axis` (Rodrigues formula; axis need not be
/// normalized).
pub fn rotate_about(v: &Vector3<f64>, axis: &Vector3<f64>, degrees: f64) -> Vector3<f64> {
    let n = axis.normalize();
    let th = degrees.to_radians();
    let (s, c) = th.sin_cos();
    v * c + n.cross(v) * s + n * (n.dot(v) * (1.0 - c))
}

/// Spherical dipole basis attached to a magnetization direction.
///
/// `e_zero` points along b̂; `e_plus`/`e_minus` are the circular combinations
/// ∓(ê_a ± i·ê_b)/√2 of two transverse directions chosen deterministically:
/// ê_a is σ̂ projected transverse to b̂ (or k̂₀ if b̂ is parallel to σ̂), and
/// ê_b = b̂ × ê_a.
#[derive(Clone, Debug)]
pub struct SphericalBasis {
    pub e_minus: Vector3<C64>,
    pub e_zero: Vector3<C64>,
    pub e_plus: Vector3<C64>,
}

impl SphericalBasis {
    /// Basis vector for helicity `q` ∈ {−1, 0, +1}.
    pub fn vector(&self, q: i8) -> &Vector3<C64> {
        match q {
            -1 => &self.e_minus,
            0 => &self.e_zero,
            1 => &self.e_plus,
            _ => panic!("helicity out of range: {q}"),
        }
    }
}

fn complexify(v: &Vector3<f64>) -> Vector3<C64> {
    v.map(|x| C64::new(x, 0.0))
}

/// Construct the spherical basis for a unit magnetization direction.
///
/// Errors if `b_hat` is not normalized within [`UNIT_NORM_TOL`].
pub fn spherical_basis(b_hat: &Vector3<f64>) -> Result<SphericalBasis> {
    if (b_hat.norm() - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::validation(format!(
            "b_hat must be a unit vector (|b_hat| = {:.12})",
            b_hat.norm()
        )));
    }
    // Transverse seed: σ̂ unless b̂ is (anti)parallel to it, then k̂₀.
    let seed = if b_hat.dot(&sigma_hat()).abs() > 1.0 - 1e-9 {
        k0_hat()
    } else {
        sigma_hat()
    };
    let e_a = (seed - b_hat * seed.dot(b_hat)).normalize();
    let e_b = b_hat.cross(&e_a);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let i = C64::new(0.0, 1.0);
    let e_plus =
        complexify(&e_a) * C64::new(-inv_sqrt2, 0.0) - complexify(&e_b) * (i * inv_sqrt2);
    let e_minus =
        complexify(&e_a) * C64::new(inv_sqrt2, 0.0) - complexify(&e_b) * (i * inv_sqrt2);
    Ok(SphericalBasis {
        e_minus,
        e_zero: complexify(b_hat),
        e_plus,
    })
}

/// Jones vector of the incident or detected field over (σ, π) components.
#[derive(Clone, Debug, PartialEq)]
pub struct Polarization(Vector2<C64>);

impl Polarization {
    /// Validated constructor: the Jones vector must have unit norm.
    pub fn new(jones: Vector2<C64>) -> Result<Self> {
        if (jones.norm() - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::validation(format!(
                "in_polarization must have unit norm (got {:.12})",
                jones.norm()
            )));
        }
        Ok(Polarization(jones))
    }

    /// Linear σ polarization (in the layer plane).
    pub fn sigma() -> Self {
        Polarization(Vector2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)))
    }

    /// Linear π polarization (along the surface normal).
    pub fn pi() -> Self {
        Polarization(Vector2::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0)))
    }

    /// The underlying (σ, π) Jones components.
    pub fn jones(&self) -> &Vector2<C64> {
        &self.0
    }

    /// Bilinear contraction pol·v (no conjugation) with a coupling vector.
    pub fn contract(&self, v: &Vector2<C64>) -> C64 {
        self.0.x * v.x + self.0.y * v.y
    }
}

/// Built-in magnetization geometries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// b̂ ∥ k̂₀: circular transitions only, the two Δm = 0 lines are dark.
    Faraday,
    /// b̂ ∥ (k̂₀ + σ̂)/√2: all six transitions couple to the cavity.
    HalfFaraday,
    /// b̂ ∥ σ̂: Δm = 0 lines couple to σ, circular lines to π and k̂₀.
    Voigt45,
    /// Explicitly supplied b̂.
    Custom,
}

impl Preset {
    /// The magnetization direction of the preset, if it defines one.
    pub fn b_hat(self) -> Option<Vector3<f64>> {
        match self {
            Preset::Faraday => Some(k0_hat()),
            Preset::HalfFaraday => Some((k0_hat() + sigma_hat()).normalize()),
            Preset::Voigt45 => Some(sigma_hat()),
            Preset::Custom => None,
        }
    }
}

/// Optional misalignment applied to the magnetization direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Misalignment {
    pub axis: Axis,
    pub degrees: f64,
}

/// Full magnetization geometry: direction, field strength, and the incident
/// polarization used for detection-channel bookkeeping.
#[derive(Clone, Debug)]
pub struct GeometryConfig {
    b_hat: Vector3<f64>,
    b_tesla: f64,
    in_polarization: Polarization,
}

impl GeometryConfig {
    /// Validated constructor from an explicit direction.
    pub fn new(b_hat: Vector3<f64>, b_tesla: f64, in_polarization: Polarization) -> Result<Self> {
        if (b_hat.norm() - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::validation(format!(
                "b_hat must be a unit vector (|b_hat| = {:.12})",
                b_hat.norm()
            )));
        }
        if b_tesla < 0.0 {
            return Err(Error::validation("b_tesla must be non-negative"));
        }
        Ok(GeometryConfig {
            b_hat,
            b_tesla,
            in_polarization,
        })
    }

    /// Construct from a preset at the standard hyperfine field, with σ input.
    pub fn preset(preset: Preset) -> Result<Self> {
        let b = preset
            .b_hat()
            .ok_or_else(|| Error::validation("custom preset requires an explicit b_hat"))?;
        GeometryConfig::new(b, crate::constants::B_HF_TESLA, Polarization::sigma())
    }

    /// Copy of this geometry with a misalignment rotation applied to b̂.
    pub fn misaligned(&self, mis: Misalignment) -> Self {
        let b = rotate_about(&self.b_hat, &mis.axis.unit(), mis.degrees);
        GeometryConfig {
            b_hat: b.normalize(),
            ..self.clone()
        }
    }

    /// Copy with the magnetization direction reversed.
    pub fn reversed(&self) -> Self {
        GeometryConfig {
            b_hat: -self.b_hat,
            ..self.clone()
        }
    }

    /// Copy with a different incident polarization.
    pub fn with_polarization(&self, pol: Polarization) -> Self {
        GeometryConfig {
            in_polarization: pol,
            ..self.clone()
        }
    }

    /// Copy with a different field strength (Tesla).
    pub fn with_field(&self, b_tesla: f64) -> Self {
        GeometryConfig {
            b_tesla,
            ..self.clone()
        }
    }

    pub fn b_hat(&self) -> &Vector3<f64> {
        &self.b_hat
    }

    pub fn b_tesla(&self) -> f64 {
        self.b_tesla
    }

    pub fn in_polarization(&self) -> &Polarization {
        &self.in_polarization
    }
}

/// Rotation matrix about a named axis, exposed for tests that build custom
/// geometries.
pub fn rotation_matrix(axis: Axis, degrees: f64) -> Matrix3<f64> {
    let cols = [
        rotate_about(&Vector3::x(), &axis.unit(), degrees),
        rotate_about(&Vector3::y(), &axis.unit(), degrees),
        rotate_about(&Vector3::z(), &axis.unit(), degrees),
    ];
    Matrix3::from_columns(&cols)
}
