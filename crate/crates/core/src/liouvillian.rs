//! Collective master equation for cavity-embedded nuclei in the weak-drive
//! (linear-response) regime.
//!
//! The cavity mediates an effective interaction between the hyperfine
//! transitions after the photon field is adiabatically eliminated. Its
//! strength is set by the collective decay enhancement `gamma_s` and the
//! collective level shift `delta_ls`, both in units of the natural width γ.
//! Cross-transition couplings — the spontaneously generated coherences — are
//! carried by the coupling overlap matrix G and can be toggled separately in
//! the Hamiltonian (shift) and dissipative (decay) channels to isolate their
//! effect.
//!
//! Two independent routes to the stationary response are provided:
//!
//! * [`linear_response`]: direct solve of the coherence-sector linear system
//!   M(Δ)·v = source;
//! * [`EffectiveLiouvillian::steady_state`]: perturbative steady state of the
//!   full superoperator, solving the one-excitation coherence sector and the
//!   second-order excited-state sector of the vectorized master equation.
//!
//! Both must agree to solver precision; the test suite checks this.
//!
//! Internally the excited manifold is unfolded transition-by-transition:
//! each of the n coupled lines contributes one formal excited state on top
//! of one formal ground state (dimension n+1). This keeps every
//! cross-transition coherence — including pairs sharing no common level —
//! addressable by a single rate matrix, at the cost of a formal dimension
//! slightly larger than the bare level count. The physical density matrix
//! over the actual sublevels is recovered by [`EffectiveLiouvillian::project_physical`].

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::Polarization;
use crate::hyperfine::{Branch, LevelScheme};
use crate::linalg;
use crate::ode::{integrate_path, OdeOptions};
use crate::{Result, C64};

/// Rabi frequency (in γ) above which the linear-response treatment starts to
/// accumulate visible saturation error; callers should warn past this.
pub const WEAK_DRIVE_LIMIT: f64 = 0.01;

/// Independent switches for the collective terms of the master equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Toggles {
    /// Collective (superradiant) decay enhancement as a whole.
    pub sr: bool,
    /// Cross-transition couplings in the Hamiltonian (level-shift) channel.
    pub sgc_hamiltonian: bool,
    /// Cross-transition couplings in the dissipative channel.
    pub sgc_dissipative: bool,
}

impl Default for Toggles {
    fn default() -> Self {
        Toggles {
            sr: true,
            sgc_hamiltonian: true,
            sgc_dissipative: true,
        }
    }
}

impl Toggles {
    pub fn all_on() -> Self {
        Toggles::default()
    }

    /// Keep single-transition physics, drop every cross-transition coupling.
    pub fn with_sgc(self, on: bool) -> Self {
        Toggles {
            sgc_hamiltonian: on,
            sgc_dissipative: on,
            ..self
        }
    }

    pub fn sgc_off(self) -> Self {
        self.with_sgc(false)
    }
}

/// Which cavity polarization modes couple to the nuclei.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolarizationSet {
    pub sigma: bool,
    pub pi: bool,
}

impl Default for PolarizationSet {
    fn default() -> Self {
        PolarizationSet {
            sigma: true,
            pi: true,
        }
    }
}

impl PolarizationSet {
    fn indices(self) -> Vec<usize> {
        let mut v = Vec::new();
        if self.sigma {
            v.push(0);
        }
        if self.pi {
            v.push(1);
        }
        v
    }

    pub fn validate(self) -> Result<()> {
        if !self.sigma && !self.pi {
            return Err(Error::validation(
                "at least one cavity polarization mode must couple",
            ));
        }
        Ok(())
    }
}

/// Cavity-environment parameters after adiabatic elimination of the photon
/// field. All frequencies in units of γ.
#[derive(Clone, Debug, PartialEq)]
pub struct CavityParams {
    /// Collective decay enhancement (superradiant width) γ_S.
    pub gamma_s: f64,
    /// Collective level shift Δ_LS.
    pub delta_ls: f64,
    /// Overall scale of the resonant reflection amplitude.
    pub amplitude: f64,
    /// Non-resonant (electronic) 2×2 reflection matrix in the (σ, π) basis.
    pub r_c: Matrix2<C64>,
    /// Polarization modes participating in the collective coupling.
    pub coupled: PolarizationSet,
}

impl Default for CavityParams {
    fn default() -> Self {
        CavityParams::symmetric(27.0, 1.0)
    }
}

impl CavityParams {
    /// Critically-matched cavity: amplitude γ_S/2, vanishing electronic
    /// background, both polarizations coupled.
    pub fn symmetric(gamma_s: f64, delta_ls: f64) -> Self {
        CavityParams {
            gamma_s,
            delta_ls,
            amplitude: gamma_s / 2.0,
            r_c: Matrix2::zeros(),
            coupled: PolarizationSet::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.gamma_s.is_finite() || self.gamma_s < 0.0 {
            return Err(Error::validation("gamma_s must be finite and >= 0"));
        }
        if !self.delta_ls.is_finite() || !self.amplitude.is_finite() {
            return Err(Error::validation("delta_ls and amplitude must be finite"));
        }
        self.coupled.validate()
    }
}

/// Classical drive entering through the cavity.
#[derive(Clone, Debug, PartialEq)]
pub struct DriveConfig {
    /// Rabi frequency Ω in units of γ.
    pub rabi: f64,
    pub polarization: Polarization,
}

impl Default for DriveConfig {
    fn default() -> Self {
        DriveConfig {
            rabi: 1e-3,
            polarization: Polarization::sigma(),
        }
    }
}

impl DriveConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.rabi.is_finite() || self.rabi < 0.0 {
            return Err(Error::validation("rabi must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn exceeds_weak_limit(&self) -> bool {
        self.rabi > WEAK_DRIVE_LIMIT
    }
}

/// First-order optical coherences, one complex amplitude per transition,
/// ordered like `LevelScheme::transitions`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceVector(pub DVector<C64>);

impl CoherenceVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.0
    }
}

/// Population-weighted coupling matrix: 2×n, rows (σ, π), columns
/// transitions.
pub fn coupling_matrix(scheme: &LevelScheme) -> DMatrix<C64> {
    let n = scheme.transitions.len();
    DMatrix::from_fn(2, n, |p, t| scheme.transitions[t].weighted_coupling()[p])
}

/// Coupling overlap matrix G_{tt'} = Σ_{p ∈ coupled} c̃_{t,p} c̃*_{t',p}.
/// Hermitian, positive semidefinite, rank ≤ number of coupled modes.
pub fn g_matrix(scheme: &LevelScheme, coupled: PolarizationSet) -> DMatrix<C64> {
    let c = coupling_matrix(scheme);
    let pols = coupled.indices();
    let n = scheme.transitions.len();
    DMatrix::from_fn(n, n, |t, u| {
        pols.iter().map(|&p| c[(p, t)] * c[(p, u)].conj()).sum()
    })
}

/// Coherence-sector response matrix
/// M(Δ)_{tt'} = (Δ − Δ_t + iγ/2)δ_{tt'} + (Δ_LS + iγ_S/2)G_{tt'},
/// with the off-diagonal shift and decay parts gated by the toggles. The
/// diagonal of the G-proportional shift and broadening is single-transition
/// physics and stays active regardless of the SGC switches.
pub fn response_matrix(
    scheme: &LevelScheme,
    params: &CavityParams,
    toggles: Toggles,
    delta: f64,
) -> DMatrix<C64> {
    let g = g_matrix(scheme, params.coupled);
    let n = scheme.transitions.len();
    let gate = |on: bool, x: f64| if on { x } else { 0.0 };
    DMatrix::from_fn(n, n, |t, u| {
        if t == u {
            C64::new(delta - scheme.transitions[t].detuning, 0.5)
                + C64::new(params.delta_ls, 0.5 * gate(toggles.sr, params.gamma_s)) * g[(t, t)]
        } else {
            C64::new(
                gate(toggles.sgc_hamiltonian, params.delta_ls),
                0.5 * gate(toggles.sr && toggles.sgc_dissipative, params.gamma_s),
            ) * g[(t, u)]
        }
    })
}

fn drive_projection(pol: &Vector2<C64>, coupling: &Vector2<C64>) -> C64 {
    pol.x * coupling.x.conj() + pol.y * coupling.y.conj()
}

/// Stationary first-order coherences from the direct linear solve
/// M(Δ)·v = −Ω (a·c̃*_t).
pub fn linear_response(
    scheme: &LevelScheme,
    params: &CavityParams,
    toggles: Toggles,
    delta: f64,
    drive: &DriveConfig,
) -> Result<CoherenceVector> {
    params.validate()?;
    drive.validate()?;
    let m = response_matrix(scheme, params, toggles, delta);
    let pol = drive.polarization.jones();
    let rhs = DVector::from_fn(scheme.transitions.len(), |t, _| {
        -C64::new(drive.rabi, 0.0)
            * drive_projection(&pol, &scheme.transitions[t].weighted_coupling())
    });
    Ok(CoherenceVector(linalg::solve(&m, &rhs)?))
}

/// Map from formal (transition-unfolded) states to physical sublevels.
#[derive(Clone, Debug)]
struct ProjectionMap {
    n_levels: usize,
    ground_index: Vec<usize>,
    excited_index: Vec<usize>,
    /// Stationary population of each physical level (nonzero on grounds).
    base_population: Vec<f64>,
}

impl ProjectionMap {
    fn build(scheme: &LevelScheme) -> Result<Self> {
        let find = |branch: Branch, m: crate::hyperfine::HalfInt| -> Result<usize> {
            scheme
                .levels
                .iter()
                .position(|l| l.branch == branch && l.m == m)
                .ok_or_else(|| Error::validation("transition references a level not in the scheme"))
        };
        let mut ground_index = Vec::new();
        let mut excited_index = Vec::new();
        let mut base_population = vec![0.0; scheme.levels.len()];
        for t in &scheme.transitions {
            let gi = find(Branch::Ground, t.m_g)?;
            let ei = find(Branch::Excited, t.m_e)?;
            if base_population[gi] != 0.0
                && (base_population[gi] - t.ground_population).abs() > 1e-12
            {
                return Err(Error::validation(
                    "transitions sharing a ground level disagree on its population",
                ));
            }
            base_population[gi] = t.ground_population;
            ground_index.push(gi);
            excited_index.push(ei);
        }
        Ok(ProjectionMap {
            n_levels: scheme.levels.len(),
            ground_index,
            excited_index,
            base_population,
        })
    }
}

/// Perturbative steady state: physical density matrix plus the first-order
/// coherence amplitudes it was built from.
#[derive(Clone, Debug)]
pub struct SystemState {
    /// Density matrix over the physical sublevels, ordered like
    /// `LevelScheme::levels`. Populations are correct through O(Ω²),
    /// optical coherences through O(Ω).
    pub rho: DMatrix<C64>,
    pub coherences: CoherenceVector,
}

/// Vectorized master-equation generator, assembled part-by-part so the
/// collective terms can be switched at composition time.
#[derive(Clone, Debug)]
pub struct EffectiveLiouvillian {
    dim: usize,
    n: usize,
    ham_static: DMatrix<C64>,
    ham_sgc: DMatrix<C64>,
    ham_drive: DMatrix<C64>,
    diss_se: DMatrix<C64>,
    diss_sr: DMatrix<C64>,
    diss_sgc: DMatrix<C64>,
    projection: ProjectionMap,
}

/// Superoperator for the commutator part: −i(HρI − IρH) in row-major
/// vectorization vec(AρB) = (A ⊗ Bᵀ)vec(ρ).
fn hamiltonian_superop(h: &DMatrix<C64>) -> DMatrix<C64> {
    let id = DMatrix::<C64>::identity(h.nrows(), h.ncols());
    (h.kronecker(&id) - id.kronecker(&h.transpose())) * C64::new(0.0, -1.0)
}

/// Dissipator over the lowering operators σ_t = |0⟩⟨1+t| with a Hermitian
/// rate matrix R: Σ_{ij} R_ij (σ_j ρ σ_i† − ½{σ_i†σ_j, ρ}).
fn dissipator_superop(dim: usize, rate: &DMatrix<C64>) -> DMatrix<C64> {
    let n = rate.nrows();
    let id = DMatrix::<C64>::identity(dim, dim);
    let mut out = DMatrix::<C64>::zeros(dim * dim, dim * dim);
    let elementary = |r: usize, c: usize| {
        let mut e = DMatrix::<C64>::zeros(dim, dim);
        e[(r, c)] = C64::new(1.0, 0.0);
        e
    };
    for i in 0..n {
        for j in 0..n {
            let r = rate[(i, j)];
            if r.norm() == 0.0 {
                continue;
            }
            let sigma_j = elementary(0, 1 + j);
            let sigma_i = elementary(0, 1 + i); // real, so conj(σ_i) = σ_i
            let ee = elementary(1 + i, 1 + j); // σ_i† σ_j
            let term = sigma_j.kronecker(&sigma_i)
                - (ee.kronecker(&id) + id.kronecker(&ee.transpose())) * C64::new(0.5, 0.0);
            out += term * r;
        }
    }
    out
}

impl EffectiveLiouvillian {
    /// Assemble all generator parts for a scheme driven at detuning `delta`
    /// (the rotating frame of the incident field).
    pub fn assemble(
        scheme: &LevelScheme,
        params: &CavityParams,
        drive: &DriveConfig,
        delta: f64,
    ) -> Result<Self> {
        params.validate()?;
        drive.validate()?;
        let n = scheme.transitions.len();
        if n == 0 {
            return Err(Error::validation("level scheme has no transitions"));
        }
        let dim = n + 1;
        let g = g_matrix(scheme, params.coupled);
        let projection = ProjectionMap::build(scheme)?;

        let mut h_static = DMatrix::<C64>::zeros(dim, dim);
        for t in 0..n {
            h_static[(1 + t, 1 + t)] = C64::new(
                scheme.transitions[t].detuning - delta - params.delta_ls * g[(t, t)].re,
                0.0,
            );
        }
        let mut h_sgc = DMatrix::<C64>::zeros(dim, dim);
        for t in 0..n {
            for u in 0..n {
                if t != u {
                    h_sgc[(1 + t, 1 + u)] = -C64::new(params.delta_ls, 0.0) * g[(t, u)];
                }
            }
        }
        let mut h_drive = DMatrix::<C64>::zeros(dim, dim);
        let pol = drive.polarization.jones();
        for t in 0..n {
            let amp = -C64::new(drive.rabi, 0.0)
                * drive_projection(&pol, &scheme.transitions[t].weighted_coupling());
            h_drive[(1 + t, 0)] = amp;
            h_drive[(0, 1 + t)] = amp.conj();
        }

        let rate_se = DMatrix::<C64>::identity(n, n);
        let mut rate_sr = DMatrix::<C64>::zeros(n, n);
        let mut rate_sgc = DMatrix::<C64>::zeros(n, n);
        for t in 0..n {
            for u in 0..n {
                let r = g[(t, u)] * C64::new(params.gamma_s, 0.0);
                if t == u {
                    rate_sr[(t, u)] = r;
                } else {
                    rate_sgc[(t, u)] = r;
                }
            }
        }

        Ok(EffectiveLiouvillian {
            dim,
            n,
            ham_static: hamiltonian_superop(&h_static),
            ham_sgc: hamiltonian_superop(&h_sgc),
            ham_drive: hamiltonian_superop(&h_drive),
            diss_se: dissipator_superop(dim, &rate_se),
            diss_sr: dissipator_superop(dim, &rate_sr),
            diss_sgc: dissipator_superop(dim, &rate_sgc),
            projection,
        })
    }

    /// Formal dimension n+1 of the unfolded state space.
    pub fn formal_dim(&self) -> usize {
        self.dim
    }

    /// Drive-free generator under the given switches.
    fn free_generator(&self, toggles: Toggles) -> DMatrix<C64> {
        let mut l = self.ham_static.clone() + &self.diss_se;
        if toggles.sgc_hamiltonian {
            l += &self.ham_sgc;
        }
        if toggles.sr {
            l += &self.diss_sr;
            if toggles.sgc_dissipative {
                l += &self.diss_sgc;
            }
        }
        l
    }

    /// Full generator acting on row-major vec(ρ).
    pub fn generator(&self, toggles: Toggles) -> DMatrix<C64> {
        self.free_generator(toggles) + &self.ham_drive
    }

    /// Formal ground state |0⟩⟨0| (all population in the collective ground).
    pub fn ground_state(&self) -> DMatrix<C64> {
        let mut rho = DMatrix::<C64>::zeros(self.dim, self.dim);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        rho
    }

    /// Perturbative steady state: solves the closed one-excitation coherence
    /// sector at O(Ω) and the excited-state sector at O(Ω²), then projects
    /// onto the physical sublevels.
    pub fn steady_state(&self, toggles: Toggles) -> Result<SystemState> {
        let d = self.dim;
        let n = self.n;
        let lf = self.free_generator(toggles);
        let ld = &self.ham_drive;

        // O(Ω): coherence sector, elements ρ_{E_t, G} at index (1+t)·d.
        let idx: Vec<usize> = (0..n).map(|t| (1 + t) * d).collect();
        let a1 = DMatrix::from_fn(n, n, |r, c| lf[(idx[r], idx[c])]);
        let src1 = DVector::from_fn(n, |r, _| -ld[(idx[r], 0)]);
        let v = linalg::solve(&a1, &src1)?;

        // O(Ω²): excited-excited sector sourced by the drive acting on the
        // first-order coherences (both orientations).
        let mut rho1 = DVector::from_element(d * d, C64::new(0.0, 0.0));
        for t in 0..n {
            rho1[(1 + t) * d] = v[t];
            rho1[1 + t] = v[t].conj();
        }
        let src_full = ld * rho1;
        let ee: Vec<usize> = (0..n * n)
            .map(|k| (1 + k / n) * d + 1 + (k % n))
            .collect();
        let a2 = DMatrix::from_fn(n * n, n * n, |r, c| lf[(ee[r], ee[c])]);
        let src2 = DVector::from_fn(n * n, |r, _| -src_full[ee[r]]);
        let b = linalg::solve(&a2, &src2)?;

        let mut formal = DMatrix::<C64>::zeros(d, d);
        formal[(0, 0)] = C64::new(1.0, 0.0);
        for t in 0..n {
            formal[(1 + t, 0)] = v[t];
            formal[(0, 1 + t)] = v[t].conj();
            for u in 0..n {
                formal[(1 + t, 1 + u)] = b[t * n + u];
                formal[(0, 0)] -= if t == u { b[t * n + u] } else { C64::new(0.0, 0.0) };
            }
        }
        Ok(SystemState {
            rho: self.project_physical(&formal),
            coherences: CoherenceVector(v),
        })
    }

    /// Project a formal (n+1)-dimensional state onto the physical sublevels.
    ///
    /// Ground populations split the collective ground according to the
    /// stationary weights minus what each line has promoted; excited
    /// populations and coherences gather the unfolded excited states. Formal
    /// cross terms between excited states excited from *different* ground
    /// levels have no single-nucleus slot and are dropped.
    pub fn project_physical(&self, formal: &DMatrix<C64>) -> DMatrix<C64> {
        let p = &self.projection;
        let mut rho = DMatrix::<C64>::zeros(p.n_levels, p.n_levels);
        for (li, &pop) in p.base_population.iter().enumerate() {
            rho[(li, li)] = C64::new(pop, 0.0);
        }
        for t in 0..self.n {
            let (gt, et) = (p.ground_index[t], p.excited_index[t]);
            let exc = formal[(1 + t, 1 + t)];
            rho[(gt, gt)] -= exc;
            rho[(et, et)] += exc;
            rho[(et, gt)] += formal[(1 + t, 0)];
            rho[(gt, et)] += formal[(0, 1 + t)];
            for u in 0..self.n {
                if u != t && p.ground_index[u] == gt && p.excited_index[u] != et {
                    rho[(et, p.excited_index[u])] += formal[(1 + t, 1 + u)];
                }
            }
        }
        // Symmetrize away solver-level anti-Hermitian noise.
        let adj = rho.adjoint();
        (rho + adj) * C64::new(0.5, 0.0)
    }

    /// Integrate the master equation from a formal initial state, returning
    /// the formal density matrix at each sample time (γ·t units).
    pub fn time_evolve(
        &self,
        toggles: Toggles,
        initial: &DMatrix<C64>,
        times: &[f64],
        opts: &OdeOptions,
    ) -> Result<Vec<DMatrix<C64>>> {
        if initial.shape() != (self.dim, self.dim) {
            return Err(Error::validation(format!(
                "initial state must be {0}×{0}",
                self.dim
            )));
        }
        let l = self.generator(toggles);
        let d = self.dim;
        let y0 = DVector::from_fn(d * d, |k, _| initial[(k / d, k % d)]);
        let path = integrate_path(|_t, y| &l * y, y0, times, opts)?;
        Ok(path
            .into_iter()
            .map(|y| DMatrix::from_fn(d, d, |r, c| y[r * d + c]))
            .collect())
    }

    /// Coherence amplitudes of a formal state, ordered like the transitions.
    pub fn coherences_of(&self, formal: &DMatrix<C64>) -> CoherenceVector {
        CoherenceVector(DVector::from_fn(self.n, |t, _| formal[(1 + t, 0)]))
    }
}
