//! Polarization-resolved cavity response: reflection spectra, detection
//! channels, dip/peak analysis, time-domain response and a simplified
//! analyzer-scan measurement simulation.
//!
//! The reflection amplitude at drive detuning Δ is a 2×2 matrix over the
//! (σ, π) output/input polarizations,
//!
//! r(Δ) = r_c + i·A·C̃ M(Δ)⁻¹ C̃†,
//!
//! where C̃ collects the population-weighted transition couplings and M is
//! the coherence-sector response matrix from [`crate::liouvillian`]. The
//! same M drives the steady-state coherences, so the output-field route and
//! the M-inversion route agree identically; tests enforce this.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::Polarization;
use crate::hyperfine::LevelScheme;
use crate::linalg;
use crate::liouvillian::{coupling_matrix, response_matrix, CavityParams, Toggles};
use crate::{Result, C64};

/// Default fraction of the global maximum a dip's prominence must exceed.
pub const DIP_PROMINENCE_FRACTION: f64 = 0.05;
/// Default fraction of the local peak height (over baseline) that a dip
/// minimum must reach down to, measured from the baseline.
pub const DIP_BASELINE_FRACTION: f64 = 0.05;
/// Default fraction of the global maximum below which local maxima are not
/// reported as peaks.
pub const PEAK_FRACTION: f64 = 0.05;

/// Uniform detuning grid in γ units, inclusive of both endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyGrid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Default for FrequencyGrid {
    /// The reference sweep: ±80γ covering the full hyperfine sextet with
    /// margin, 4000 points.
    fn default() -> Self {
        FrequencyGrid {
            min: -80.0,
            max: 80.0,
            n: 4000,
        }
    }
}

impl FrequencyGrid {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        let grid = FrequencyGrid { min, max, n };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() || self.min >= self.max {
            return Err(Error::validation(format!(
                "frequency grid needs finite min < max (got [{}, {}])",
                self.min, self.max
            )));
        }
        if self.n < 2 {
            return Err(Error::validation("frequency grid needs at least 2 points"));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n).map(|i| self.min + h * i as f64).collect()
    }
}

/// Reflection matrix at a single detuning, over (σ, π) = (row/col 0, 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReflectionMatrix {
    pub delta: f64,
    pub r: Matrix2<C64>,
}

impl ReflectionMatrix {
    /// Reflected Jones vector for a given input polarization.
    pub fn output_field(&self, input: &Polarization) -> Vector2<C64> {
        self.r * input.jones()
    }
}

/// Compute the reflection matrix at one detuning. Polarization modes not in
/// `params.coupled` carry no resonant response.
pub fn reflection_matrix(
    scheme: &LevelScheme,
    params: &CavityParams,
    toggles: Toggles,
    delta: f64,
) -> Result<ReflectionMatrix> {
    params.validate()?;
    let n = scheme.transitions.len();
    let mut c = coupling_matrix(scheme);
    if !params.coupled.sigma {
        c.row_mut(0).fill(C64::new(0.0, 0.0));
    }
    if !params.coupled.pi {
        c.row_mut(1).fill(C64::new(0.0, 0.0));
    }
    let m = response_matrix(scheme, params, toggles, delta);
    // X = M⁻¹ C̃†, solved column-by-column; then r = r_c + iA · C̃ X.
    let mut x = DMatrix::<C64>::zeros(n, 2);
    for p in 0..2 {
        let rhs = DVector::from_fn(n, |t, _| c[(p, t)].conj());
        x.set_column(p, &linalg::solve(&m, &rhs)?);
    }
    let ia = C64::new(0.0, params.amplitude);
    let mut r = params.r_c;
    for p_out in 0..2 {
        for p_in in 0..2 {
            let sum: C64 = (0..n).map(|t| c[(p_out, t)] * x[(t, p_in)]).sum();
            r[(p_out, p_in)] += ia * sum;
        }
    }
    Ok(ReflectionMatrix { delta, r })
}

/// Reflection matrices over a detuning grid, in grid order.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub deltas: Vec<f64>,
    pub matrices: Vec<Matrix2<C64>>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn reflection(&self, i: usize) -> ReflectionMatrix {
        ReflectionMatrix {
            delta: self.deltas[i],
            r: self.matrices[i],
        }
    }

    /// Detection-channel intensity at every grid point.
    pub fn channel(&self, input: &Polarization, det: &DetectionConfig) -> Vec<f64> {
        self.matrices
            .iter()
            .map(|r| channel_intensity(r, input, det))
            .collect()
    }

    /// Grid spacing, verifying uniformity (needed by the Fourier-based
    /// operations).
    pub fn uniform_step(&self) -> Result<f64> {
        if self.len() < 2 {
            return Err(Error::validation("spectrum needs at least 2 grid points"));
        }
        let h = self.deltas[1] - self.deltas[0];
        for w in self.deltas.windows(2) {
            if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0) {
                return Err(Error::validation(
                    "operation requires a uniform detuning grid",
                ));
            }
        }
        Ok(h)
    }
}

/// Sweep the reflection matrix over a detuning grid.
pub fn spectrum_sweep(
    scheme: &LevelScheme,
    params: &CavityParams,
    toggles: Toggles,
    grid: &FrequencyGrid,
) -> Result<Spectrum> {
    grid.validate()?;
    let deltas = grid.points();
    let mut matrices = Vec::with_capacity(deltas.len());
    for &d in &deltas {
        matrices.push(reflection_matrix(scheme, params, toggles, d)?.r);
    }
    Ok(Spectrum { deltas, matrices })
}

/// How the reflected light is detected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionMode {
    /// Analyzer crossed with the input polarization; co-polarized light is
    /// suppressed to the extinction level.
    CrossedPolarimeter,
    /// Energy-resolved detection of the full reflected intensity.
    DirectMonochromator,
}

/// Single-line resonant analyzer placed downstream of the sample for the
/// measurement simulation: width Γ_a in γ, effective resonant optical
/// depth `depth`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzerLine {
    pub width: f64,
    pub depth: f64,
}

impl AnalyzerLine {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) {
            return Err(Error::validation("analyzer width must be > 0"));
        }
        if !(self.depth >= 0.0) {
            return Err(Error::validation("analyzer depth must be >= 0"));
        }
        Ok(())
    }

    /// Complex transmission at frequency ω for the line parked at Δ_a.
    fn transmission(&self, omega: f64, delta_a: f64) -> C64 {
        let lor = C64::new(0.0, self.width / 2.0) / C64::new(omega - delta_a, self.width / 2.0);
        (-C64::new(self.depth / 2.0, 0.0) * lor).exp()
    }
}

/// Counting window in units of 1/γ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGate {
    pub start: f64,
    pub end: f64,
}

impl TimeGate {
    pub fn validate(&self) -> Result<()> {
        if !(self.start >= 0.0) || !(self.end > self.start) {
            return Err(Error::validation(
                "time gate needs 0 <= start < end (in 1/γ units)",
            ));
        }
        Ok(())
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectionConfig {
    pub mode: DetectionMode,
    /// Intensity suppression of the co-polarized leakage in the crossed
    /// channel.
    pub extinction: f64,
    pub analyzer_line: Option<AnalyzerLine>,
    pub time_gate: Option<TimeGate>,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            mode: DetectionMode::CrossedPolarimeter,
            extinction: 1e-10,
            analyzer_line: None,
            time_gate: None,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.extinction) {
            return Err(Error::validation("extinction must lie in [0, 1]"));
        }
        if let Some(a) = &self.analyzer_line {
            a.validate()?;
        }
        if let Some(g) = &self.time_gate {
            g.validate()?;
        }
        Ok(())
    }

    pub fn with_mode(mode: DetectionMode) -> Self {
        DetectionConfig {
            mode,
            ..DetectionConfig::default()
        }
    }
}

/// Detected intensity of an output Jones vector, given the input
/// polarization the analyzer is referenced to.
pub fn field_intensity(field: &Vector2<C64>, input: &Polarization, det: &DetectionConfig) -> f64 {
    match det.mode {
        DetectionMode::DirectMonochromator => field.norm_squared(),
        DetectionMode::CrossedPolarimeter => {
            let a = input.jones();
            // Orthogonal complement of the input polarization.
            let co = a.x.conj() * field.x + a.y.conj() * field.y;
            let cross = -a.y * field.x + a.x * field.y;
            cross.norm_sqr() + det.extinction * co.norm_sqr()
        }
    }
}

/// Detected intensity for a reflection matrix and input polarization.
pub fn channel_intensity(r: &Matrix2<C64>, input: &Polarization, det: &DetectionConfig) -> f64 {
    field_intensity(&(r * input.jones()), input, det)
}

/// Channel intensity of the bare electronic background — the far-detuned
/// reference level dips are measured against.
pub fn baseline_intensity(params: &CavityParams, input: &Polarization, det: &DetectionConfig) -> f64 {
    channel_intensity(&params.r_c, input, det)
}

/// A reflectivity dip: local minimum with prominence above threshold whose
/// floor comes close to the baseline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Dip {
    pub index: usize,
    pub delta: f64,
    pub intensity: f64,
    /// Intensity above the baseline at the minimum.
    pub depth: f64,
    /// Height of the lower flanking maximum above the minimum.
    pub prominence: f64,
    /// Full width at half-depth (γ units), linearly interpolated.
    pub width: f64,
}

/// A reflectivity peak above the reporting threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Peak {
    pub index: usize,
    pub delta: f64,
    pub intensity: f64,
}

/// Interior local maxima plus the two endpoints — the candidate flanks for
/// prominence measurements.
fn flank_candidates(intensity: &[f64]) -> Vec<usize> {
    let n = intensity.len();
    let mut out = vec![0];
    for i in 1..n - 1 {
        if intensity[i] >= intensity[i - 1] && intensity[i] >= intensity[i + 1] {
            out.push(i);
        }
    }
    out.push(n - 1);
    out
}

/// Find dips: interior local minima that (a) have prominence of at least
/// `prominence_fraction` of the global maximum and (b) descend to within
/// `baseline_fraction` of the flanking peak height when measured from
/// `baseline`.
pub fn find_dips(
    deltas: &[f64],
    intensity: &[f64],
    baseline: f64,
    prominence_fraction: f64,
    baseline_fraction: f64,
) -> Vec<Dip> {
    let n = intensity.len();
    if n < 3 || deltas.len() != n {
        return Vec::new();
    }
    let global_max = intensity.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let flanks = flank_candidates(intensity);
    let mut dips = Vec::new();
    for i in 1..n - 1 {
        let is_min = intensity[i] <= intensity[i - 1]
            && intensity[i] <= intensity[i + 1]
            && (intensity[i] < intensity[i - 1] || intensity[i] < intensity[i + 1]);
        if !is_min {
            continue;
        }
        let left = flanks
            .iter()
            .copied()
            .filter(|&k| k < i)
            .max()
            .unwrap_or(0);
        let right = flanks
            .iter()
            .copied()
            .filter(|&k| k > i)
            .min()
            .unwrap_or(n - 1);
        let flank_low = intensity[left].min(intensity[right]);
        let prominence = flank_low - intensity[i];
        if prominence < prominence_fraction * global_max {
            continue;
        }
        if intensity[i] - baseline > baseline_fraction * (flank_low - baseline) {
            continue;
        }
        let half = intensity[i] + prominence / 2.0;
        let cross = |mut k: usize, step: isize| -> f64 {
            loop {
                let next = (k as isize + step) as usize;
                if intensity[next] >= half {
                    let frac = (half - intensity[k]) / (intensity[next] - intensity[k]);
                    return deltas[k] + frac * (deltas[next] - deltas[k]);
                }
                k = next;
                if k == 0 || k == n - 1 {
                    return deltas[k];
                }
            }
        };
        dips.push(Dip {
            index: i,
            delta: deltas[i],
            intensity: intensity[i],
            depth: intensity[i] - baseline,
            prominence,
            width: cross(i, 1) - cross(i, -1),
        });
    }
    dips
}

/// Find peaks: interior local maxima at or above `fraction` of the global
/// maximum.
pub fn find_peaks(deltas: &[f64], intensity: &[f64], fraction: f64) -> Vec<Peak> {
    let n = intensity.len();
    if n < 3 || deltas.len() != n {
        return Vec::new();
    }
    let global_max = intensity.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut peaks = Vec::new();
    for i in 1..n - 1 {
        let is_max = intensity[i] >= intensity[i - 1]
            && intensity[i] >= intensity[i + 1]
            && (intensity[i] > intensity[i - 1] || intensity[i] > intensity[i + 1]);
        if is_max && intensity[i] >= fraction * global_max {
            peaks.push(Peak {
                index: i,
                delta: deltas[i],
                intensity: intensity[i],
            });
        }
    }
    peaks
}

/// Time-domain response of the resonant part of the reflection.
#[derive(Clone, Debug)]
pub struct TimeResponse {
    /// Sample times in 1/γ units, starting at 0.
    pub times: Vec<f64>,
    /// Complex (σ, π) field envelope at each sample time, scaled so a
    /// single resonant line of total width Γ produces |field|² ∝ e^{−Γt}.
    pub fields: Vec<Vector2<C64>>,
    /// Largest edge residual |r(ω_edge) − r_c| over polarizations. Values
    /// that are not ≪ 1 mean the frequency window clipped the resonant
    /// response and the time trace carries truncation ringing.
    pub truncation: f64,
    input: Polarization,
}

impl TimeResponse {
    /// Detected intensity at each sample time.
    pub fn intensity(&self, det: &DetectionConfig) -> Vec<f64> {
        self.fields
            .iter()
            .map(|f| field_intensity(f, &self.input, det))
            .collect()
    }

    /// Total (polarization-summed) intensity at each sample time.
    pub fn total_intensity(&self) -> Vec<f64> {
        self.fields.iter().map(|f| f.norm_squared()).collect()
    }
}

fn fft_forward(planner: &mut FftPlanner<f64>, mut samples: Vec<C64>) -> Vec<C64> {
    let fft = planner.plan_fft_forward(samples.len());
    fft.process(&mut samples);
    samples
}

/// Discrete-Fourier-transform the resonant reflection into the time domain.
///
/// The spectrum must sit on a uniform grid; the sample times are
/// t_k = 2πk/(N·δω) with the intensity scale (δω/2π)² so that the discrete
/// sum approximates the continuum transform. An optional gate zeroes the
/// field outside the counting window.
pub fn time_response(
    spectrum: &Spectrum,
    input: &Polarization,
    r_c: &Matrix2<C64>,
    gate: Option<&TimeGate>,
) -> Result<TimeResponse> {
    let step = spectrum.uniform_step()?;
    if let Some(g) = gate {
        g.validate()?;
    }
    let n = spectrum.len();
    let a = input.jones();
    let bg = r_c * a;
    let mut sig = Vec::with_capacity(n);
    let mut pi = Vec::with_capacity(n);
    let mut truncation: f64 = 0.0;
    for (k, m) in spectrum.matrices.iter().enumerate() {
        let s = m * a - bg;
        if k == 0 || k == n - 1 {
            truncation = truncation.max(s.x.norm()).max(s.y.norm());
        }
        sig.push(s.x);
        pi.push(s.y);
    }
    let mut planner = FftPlanner::new();
    let fs = fft_forward(&mut planner, sig);
    let fp = fft_forward(&mut planner, pi);
    let scale = C64::new(step / std::f64::consts::TAU, 0.0);
    let dt = std::f64::consts::TAU / (n as f64 * step);
    let mut times = Vec::with_capacity(n);
    let mut fields = Vec::with_capacity(n);
    for k in 0..n {
        let t = dt * k as f64;
        times.push(t);
        let mut f = Vector2::new(fs[k] * scale, fp[k] * scale);
        if let Some(g) = gate {
            if !g.contains(t) {
                f = Vector2::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            }
        }
        fields.push(f);
    }
    Ok(TimeResponse {
        times,
        fields,
        truncation,
        input: input.clone(),
    })
}

/// Result of an analyzer-scan measurement simulation.
#[derive(Clone, Debug)]
pub struct MeasuredSpectrum {
    /// Analyzer detunings (γ units).
    pub scan_deltas: Vec<f64>,
    /// Time-gated counts with the analyzer parked at each scan detuning.
    pub counts: Vec<f64>,
    /// Time-gated counts with the analyzer far detuned (no absorption).
    pub reference: f64,
    /// Reference minus counts: the energy the analyzer removed, which maps
    /// out the sample spectrum in the narrow-line, small-depth limit.
    pub spectrum_estimate: Vec<f64>,
}

/// Simulate scanning a single-line analyzer across the reflected spectrum
/// with time-gated detection.
///
/// `spectrum` must cover a uniform grid wide and dense enough for the
/// Fourier step (the analyzer adds structure of its own width, so the grid
/// should resolve it). Requires `detection.analyzer_line` and
/// `detection.time_gate`.
pub fn simulate_measurement(
    spectrum: &Spectrum,
    input: &Polarization,
    detection: &DetectionConfig,
    r_c: &Matrix2<C64>,
    scan: &FrequencyGrid,
) -> Result<MeasuredSpectrum> {
    detection.validate()?;
    scan.validate()?;
    let analyzer = detection
        .analyzer_line
        .ok_or_else(|| Error::validation("simulate_measurement requires detection.analyzer_line"))?;
    let gate = detection
        .time_gate
        .ok_or_else(|| Error::validation("simulate_measurement requires detection.time_gate"))?;
    let step = spectrum.uniform_step()?;
    let n = spectrum.len();
    let a = input.jones();
    let bg = r_c * a;
    let fields: Vec<Vector2<C64>> = spectrum.matrices.iter().map(|m| m * a).collect();

    let dt = std::f64::consts::TAU / (n as f64 * step);
    let scale = step / std::f64::consts::TAU;
    let mut planner = FftPlanner::new();
    let mut gated_counts = |sig: Vec<C64>, pi: Vec<C64>| -> f64 {
        let fs = fft_forward(&mut planner, sig);
        let fp = fft_forward(&mut planner, pi);
        let mut sum = 0.0;
        for k in 0..n {
            let t = dt * k as f64;
            if gate.contains(t) {
                let f = Vector2::new(fs[k] * scale, fp[k] * scale);
                sum += field_intensity(&f, input, detection) * dt;
            }
        }
        sum
    };

    let reference = gated_counts(
        fields.iter().map(|f| f.x - bg.x).collect(),
        fields.iter().map(|f| f.y - bg.y).collect(),
    );

    let scan_deltas = scan.points();
    let mut counts = Vec::with_capacity(scan_deltas.len());
    for &da in &scan_deltas {
        let mut sig = Vec::with_capacity(n);
        let mut pi = Vec::with_capacity(n);
        for (k, f) in fields.iter().enumerate() {
            let t = analyzer.transmission(spectrum.deltas[k], da);
            sig.push(f.x * t - bg.x);
            pi.push(f.y * t - bg.y);
        }
        counts.push(gated_counts(sig, pi));
    }
    let spectrum_estimate = counts.iter().map(|&c| reference - c).collect();
    Ok(MeasuredSpectrum {
        scan_deltas,
        counts,
        reference,
        spectrum_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{pi_hat, GeometryConfig, Preset};
    use crate::hyperfine::{NuclearSpecies, Transition};
    use crate::liouvillian::{linear_response, DriveConfig};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn scheme(preset: Preset) -> LevelScheme {
        let g = GeometryConfig::preset(preset).unwrap();
        LevelScheme::build(NuclearSpecies::fe57(), g).unwrap()
    }

    fn unit_line(detuning: f64) -> LevelScheme {
        LevelScheme::single_line(Vector2::new(c(1.0, 0.0), c(0.0, 0.0)), detuning, 1.0).unwrap()
    }

    #[test]
    fn zero_coupling_returns_background() {
        let s =
            LevelScheme::single_line(Vector2::new(c(0.0, 0.0), c(0.0, 0.0)), 0.0, 1.0).unwrap();
        let mut params = CavityParams::default();
        params.r_c = Matrix2::new(c(0.3, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.3));
        let r = reflection_matrix(&s, &params, Toggles::all_on(), 4.0).unwrap();
        assert!((r.r - params.r_c).norm() < 1e-15);
    }

    #[test]
    fn single_line_matches_scalar_closed_form() {
        let s = unit_line(0.0);
        let params = CavityParams::symmetric(27.0, 0.0);
        // At resonance: |r| = γ_S|c̃|²/(γ + γ_S|c̃|²) = 27/28.
        let r0 = reflection_matrix(&s, &params, Toggles::all_on(), 0.0).unwrap();
        assert_relative_eq!(r0.r[(0, 0)].norm(), 27.0 / 28.0, epsilon = 1e-12);
        assert_relative_eq!(r0.r[(0, 0)].norm(), 0.9642857142857142, epsilon = 1e-15);
        // Off resonance: r_ss = iA/(Δ + i(1+γ_S)/2).
        let r5 = reflection_matrix(&s, &params, Toggles::all_on(), 5.0).unwrap();
        let want = c(0.0, 13.5) / c(5.0, 14.0);
        assert!((r5.r[(0, 0)] - want).norm() < 1e-14);
        assert!(r5.r[(1, 1)].norm() < 1e-15, "π mode carries no coupling");
    }

    #[test]
    fn reflection_agrees_with_output_field_route() {
        let s = scheme(Preset::HalfFaraday);
        let params = CavityParams::default();
        let drive = DriveConfig::default();
        let cmat = coupling_matrix(&s);
        for toggles in [Toggles::all_on(), Toggles::all_on().sgc_off()] {
            for delta in [-60.0, -8.77, 0.0, 31.9, 55.3] {
                let r = reflection_matrix(&s, &params, toggles, delta).unwrap();
                let v = linear_response(&s, &params, toggles, delta, &drive).unwrap();
                // (r − r_c)·a = −(iA/Ω)·C̃·v.
                let out = r.r * drive.polarization.jones();
                let factor = c(0.0, -params.amplitude / drive.rabi);
                for p in 0..2 {
                    let cv: C64 = (0..s.transitions.len())
                        .map(|t| cmat[(p, t)] * v.amplitudes()[t])
                        .sum();
                    assert!(
                        (out[p] - factor * cv).norm() < 1e-12,
                        "Δ={delta}, pol {p}"
                    );
                }
            }
        }
    }

    #[test]
    fn passivity_holds_across_presets_and_toggles() {
        let grid = FrequencyGrid::new(-80.0, 80.0, 401).unwrap();
        for preset in [Preset::Faraday, Preset::HalfFaraday, Preset::Voigt45] {
            let s = scheme(preset);
            for toggles in [Toggles::all_on(), Toggles::all_on().sgc_off()] {
                let sweep = spectrum_sweep(&s, &CavityParams::default(), toggles, &grid).unwrap();
                for m in &sweep.matrices {
                    let md = DMatrix::from_fn(2, 2, |i, j| m[(i, j)]);
                    assert!(linalg::max_singular_value(&md) <= 1.0 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn intensities_relax_to_baseline_far_off_resonance() {
        let s = scheme(Preset::HalfFaraday);
        let params = CavityParams::default();
        let input = Polarization::sigma();
        for mode in [
            DetectionMode::CrossedPolarimeter,
            DetectionMode::DirectMonochromator,
        ] {
            let det = DetectionConfig::with_mode(mode);
            let base = baseline_intensity(&params, &input, &det);
            let at = |delta: f64| {
                let r = reflection_matrix(&s, &params, Toggles::all_on(), delta).unwrap();
                (channel_intensity(&r.r, &input, &det) - base).abs()
            };
            let (d500, d1000) = (at(500.0).max(at(-500.0)), at(1000.0).max(at(-1000.0)));
            // The residual intensity falls off as 1/Δ² (amplitude 1/Δ).
            assert!(d1000 < 0.35 * d500, "1/Δ² falloff: {d500:e} → {d1000:e}");
            match mode {
                // The cross-polarized 1/Δ tail cancels in the mode-overlap
                // sum rule, leaving the O(A·span/Δ²)² residual — measured
                // 1.03e-6 at 500γ with the default amplitude.
                DetectionMode::CrossedPolarimeter => {
                    assert!(d500 < 1.5e-6, "crossed residual {d500:e}")
                }
                // The co-polarized channel keeps its full 1/Δ tail,
                // (A·Q_σσ/Δ)² ~ 3e-4 at 500γ.
                DetectionMode::DirectMonochromator => {
                    assert!(d500 < 1e-3, "direct residual {d500:e}")
                }
            }
        }
    }

    #[test]
    fn voigt_direct_spectrum_is_symmetric_in_detuning() {
        // Negating every magnetic quantum number mirrors the level scheme, so
        // the direct spectrum is even in Δ — exactly when the collective level
        // shift vanishes. A finite shift displaces all lines the same way and
        // breaks the mirror unless it is negated along with Δ.
        let s = scheme(Preset::Voigt45);
        let grid = FrequencyGrid::new(-80.0, 80.0, 321).unwrap();
        let det = DetectionConfig::with_mode(DetectionMode::DirectMonochromator);
        let params = CavityParams::symmetric(27.0, 0.0);
        let sweep = spectrum_sweep(&s, &params, Toggles::all_on(), &grid).unwrap();
        let i = sweep.channel(&Polarization::sigma(), &det);
        let n = i.len();
        for k in 0..n {
            assert_relative_eq!(i[k], i[n - 1 - k], epsilon = 1e-10, max_relative = 1e-8);
        }

        // With a level shift the mirror pairs spectra at opposite shifts.
        let shifted = CavityParams::symmetric(27.0, 1.0);
        let mirrored = CavityParams::symmetric(27.0, -1.0);
        let a = spectrum_sweep(&s, &shifted, Toggles::all_on(), &grid).unwrap();
        let b = spectrum_sweep(&s, &mirrored, Toggles::all_on(), &grid).unwrap();
        let ia = a.channel(&Polarization::sigma(), &det);
        let ib = b.channel(&Polarization::sigma(), &det);
        let asym: f64 = (0..n)
            .map(|k| (ia[k] - ia[n - 1 - k]).abs())
            .fold(0.0, f64::max);
        assert!(asym > 1e-4, "level shift should break the bare mirror");
        for k in 0..n {
            assert_relative_eq!(ia[k], ib[n - 1 - k], epsilon = 1e-10, max_relative = 1e-8);
        }
    }

    #[test]
    fn pi_aligned_field_never_rotates_polarization() {
        // b̂ ∥ π̂: circular transitions couple σ only, linear ones π only, so
        // both reflection off-diagonals vanish and the crossed channel is
        // pure extinction leakage.
        let g = GeometryConfig::new(pi_hat(), 33.3, Polarization::sigma()).unwrap();
        let s = LevelScheme::build(NuclearSpecies::fe57(), g).unwrap();
        let det = DetectionConfig::default();
        for delta in [-55.3, -8.8, 0.0, 32.0] {
            let r = reflection_matrix(&s, &CavityParams::default(), Toggles::all_on(), delta)
                .unwrap();
            assert!(r.r[(1, 0)].norm() < 1e-14);
            assert!(r.r[(0, 1)].norm() < 1e-14);
            let i = channel_intensity(&r.r, &Polarization::sigma(), &det);
            let want = det.extinction * r.r[(0, 0)].norm_sqr();
            assert_relative_eq!(i, want, epsilon = 1e-20);
        }
    }

    #[test]
    fn faraday_rotates_polarization_on_circular_lines() {
        let s = scheme(Preset::Faraday);
        let det = DetectionConfig::default();
        for delta in [-55.3163, -32.0454, 32.0454, 55.3163] {
            let r = reflection_matrix(&s, &CavityParams::default(), Toggles::all_on(), delta)
                .unwrap();
            let i = channel_intensity(&r.r, &Polarization::sigma(), &det);
            assert!(
                i > 1e-3,
                "crossed signal at line Δ={delta} should be macroscopic, got {i:e}"
            );
        }
    }

    #[test]
    fn zero_extinction_diagonal_r_gives_dark_crossed_channel() {
        let det = DetectionConfig {
            extinction: 0.0,
            ..DetectionConfig::default()
        };
        let r = Matrix2::new(c(0.7, 0.1), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.4));
        assert_eq!(channel_intensity(&r, &Polarization::sigma(), &det), 0.0);
    }

    #[test]
    fn degenerate_scheme_collapses_to_one_superradiant_peak() {
        // B = 0: all six lines at Δ = 0. For σ input the effective response
        // is a single resonance of total width γ + γ_S·Σ|c̃_σ|², with
        // Σ|c̃_σ|² = 2/3 exactly (mode-overlap sum rule), i.e. width 19γ.
        let g = GeometryConfig::preset(Preset::HalfFaraday)
            .unwrap()
            .with_field(0.0);
        let s = LevelScheme::build(NuclearSpecies::fe57(), g).unwrap();
        let params = CavityParams::symmetric(27.0, 0.0);
        let grid = FrequencyGrid::new(-80.0, 80.0, 3201).unwrap();
        let sweep = spectrum_sweep(&s, &params, Toggles::all_on(), &grid).unwrap();
        let det = DetectionConfig::with_mode(DetectionMode::DirectMonochromator)
;
        let i = sweep.channel(&Polarization::sigma(), &det);
        let peaks = find_peaks(&sweep.deltas, &i, PEAK_FRACTION);
        assert_eq!(peaks.len(), 1);
        assert!(peaks[0].delta.abs() < 0.1);
        // Full width at half maximum of the intensity.
        let max = i[peaks[0].index];
        let half = max / 2.0;
        let above: Vec<usize> = (0..i.len()).filter(|&k| i[k] >= half).collect();
        let lo = above.first().copied().unwrap();
        let hi = above.last().copied().unwrap();
        let fwhm = sweep.deltas[hi] - sweep.deltas[lo];
        assert!(
            (fwhm - 19.0).abs() < 0.4,
            "superradiant width: got {fwhm}, expected ≈ 19"
        );
    }

    #[test]
    fn faraday_spectrum_has_four_features() {
        let s = scheme(Preset::Faraday);
        let grid = FrequencyGrid::new(-80.0, 80.0, 4001).unwrap();
        let sweep = spectrum_sweep(&s, &CavityParams::default(), Toggles::all_on(), &grid).unwrap();
        let det = DetectionConfig::with_mode(DetectionMode::DirectMonochromator);
        let i = sweep.channel(&Polarization::sigma(), &det);
        assert_eq!(find_peaks(&sweep.deltas, &i, PEAK_FRACTION).len(), 4);
    }

    #[test]
    fn sgc_suppresses_the_voigt_center_by_an_order_of_magnitude() {
        let s = scheme(Preset::Voigt45);
        let params = CavityParams::default();
        let det = DetectionConfig::with_mode(DetectionMode::DirectMonochromator);
        let input = Polarization::sigma();
        let on = reflection_matrix(&s, &params, Toggles::all_on(), 0.0).unwrap();
        let off = reflection_matrix(&s, &params, Toggles::all_on().sgc_off(), 0.0).unwrap();
        let i_on = channel_intensity(&on.r, &input, &det);
        let i_off = channel_intensity(&off.r, &input, &det);
        assert!(
            i_off > 10.0 * i_on,
            "interference suppression: on {i_on:e}, off {i_off:e}"
        );
    }

    #[test]
    fn synthetic_dips_are_found_with_position_width_and_depth() {
        // Flat level 1.0 with two notches of half-width w: I = 1 − depth·L.
        let grid = FrequencyGrid::new(-30.0, 30.0, 6001).unwrap();
        let deltas = grid.points();
        let lor = |x: f64, x0: f64, w: f64| (w * w / 4.0) / ((x - x0).powi(2) + w * w / 4.0);
        let intensity: Vec<f64> = deltas
            .iter()
            .map(|&x| 1.0 - 0.98 * lor(x, -10.0, 2.0) - 0.99 * lor(x, 12.0, 3.0))
            .collect();
        let dips = find_dips(
            &deltas,
            &intensity,
            0.0,
            DIP_PROMINENCE_FRACTION,
            DIP_BASELINE_FRACTION,
        );
        assert_eq!(dips.len(), 2);
        assert!((dips[0].delta + 10.0).abs() < 0.02);
        assert!((dips[1].delta - 12.0).abs() < 0.02);
        // Width at half-depth of 1 − d·L(x; w): crossings where L = 1/2,
        // i.e. x = x0 ± w/2 — width w up to the few-percent shift from the
        // other notch's tail lowering the shared flank.
        assert!((dips[0].width - 2.0).abs() < 0.08, "width {}", dips[0].width);
        assert!((dips[1].width - 3.0).abs() < 0.12, "width {}", dips[1].width);
        // Floor of the first notch: 0.02 minus the second notch's tail there.
        let floor = 0.02 - 0.99 * lor(-10.0, 12.0, 3.0);
        assert!((dips[0].depth - floor).abs() < 2e-4, "depth {}", dips[0].depth);

        // A shallow notch (floor far above baseline) must be rejected.
        let shallow: Vec<f64> = deltas
            .iter()
            .map(|&x| 1.0 - 0.5 * lor(x, 0.0, 2.0))
            .collect();
        assert!(find_dips(&deltas, &shallow, 0.0, 0.05, 0.05).is_empty());

        // Monotone data: nothing to report.
        let monotone: Vec<f64> = deltas.iter().map(|&x| 0.1 + 0.01 * x).collect();
        assert!(find_dips(&deltas, &monotone, 0.0, 0.05, 0.05).is_empty());
        assert!(find_peaks(&deltas, &monotone, 0.05).is_empty());
    }

    fn single_line_spectrum(
        gamma_s: f64,
        window: f64,
        n: usize,
    ) -> (LevelScheme, CavityParams, Spectrum) {
        let s = unit_line(0.0);
        let params = CavityParams::symmetric(gamma_s, 0.0);
        let grid = FrequencyGrid::new(-window, window, n).unwrap();
        let sweep = spectrum_sweep(&s, &params, Toggles::all_on(), &grid).unwrap();
        (s, params, sweep)
    }

    #[test]
    fn single_line_time_response_decays_at_the_total_width() {
        let (_s, params, sweep) = single_line_spectrum(27.0, 8192.0, 1 << 16);
        let tr = time_response(&sweep, &Polarization::sigma(), &params.r_c, None).unwrap();
        assert!(tr.truncation < 2e-3, "edge residual {}", tr.truncation);
        let i = tr.total_intensity();
        // Log-slope over t ∈ [0.01, 0.1]: expect −(1 + γ_S) within 1%.
        let pick = |t: f64| {
            let k = tr.times.iter().position(|&x| x >= t).unwrap();
            (tr.times[k], i[k])
        };
        let (t0, i0) = pick(0.01);
        let (t1, i1) = pick(0.1);
        let slope = (i1.ln() - i0.ln()) / (t1 - t0);
        assert!(
            (slope + 28.0).abs() < 0.28,
            "decay rate {slope}, expected −28"
        );
        // Prompt amplitude: extrapolating exp(−Γt) back to t = 0 recovers
        // |A|². (The t = 0 sample itself sits on the step discontinuity and
        // reconstructs the half-jump, so it is not compared directly.)
        let extrapolated = i0 * (28.0 * t0).exp();
        assert_relative_eq!(extrapolated, params.amplitude.powi(2), max_relative = 0.02);
    }

    #[test]
    fn time_response_satisfies_parseval() {
        let (_s, params, sweep) = single_line_spectrum(27.0, 2048.0, 1 << 14);
        let tr = time_response(&sweep, &Polarization::sigma(), &params.r_c, None).unwrap();
        let dt = tr.times[1] - tr.times[0];
        let time_sum: f64 = tr.total_intensity().iter().sum::<f64>() * dt;
        let dw = sweep.uniform_step().unwrap();
        let a = Polarization::sigma();
        let freq_sum: f64 = sweep
            .matrices
            .iter()
            .map(|m| (m * a.jones() - params.r_c * a.jones()).norm_squared())
            .sum::<f64>()
            * dw
            / std::f64::consts::TAU;
        assert_relative_eq!(time_sum, freq_sum, max_relative = 1e-12);
    }

    #[test]
    fn two_line_beat_period_matches_the_splitting() {
        // Two independent σ-coupled lines at ±8.7745γ (cross coupling off so
        // the poles sit exactly at the bare detunings): the emitted field is
        // ∝ cos(8.7745·t)·exp(−Γt/2), so the intensity has nodes at odd
        // multiples of π/(2·8.7745). Node positions are robust against the
        // decaying envelope, unlike threshold-based peak finding.
        let base = unit_line(0.0);
        let half = Vector2::new(c(std::f64::consts::FRAC_1_SQRT_2, 0.0), c(0.0, 0.0));
        let mk = |d: f64| Transition {
            detuning: d,
            coupling: half,
            ..base.transitions[0].clone()
        };
        let s = LevelScheme {
            transitions: vec![mk(-8.7745), mk(8.7745)],
            ..base
        };
        let params = CavityParams::symmetric(27.0, 0.0);
        let grid = FrequencyGrid::new(-4096.0, 4096.0, 1 << 16).unwrap();
        let toggles = Toggles::all_on().sgc_off();
        let sweep = spectrum_sweep(&s, &params, toggles, &grid).unwrap();
        let tr = time_response(&sweep, &Polarization::sigma(), &params.r_c, None).unwrap();
        let i = tr.total_intensity();
        let node = |lo: f64, hi: f64| {
            tr.times
                .iter()
                .zip(&i)
                .filter(|(&t, _)| t >= lo && t <= hi)
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(&t, _)| t)
                .unwrap()
        };
        let period = std::f64::consts::TAU / (2.0 * 8.7745);
        let first = node(0.10, 0.25);
        let second = node(0.45, 0.62);
        assert_relative_eq!(first, period / 2.0, max_relative = 0.02);
        assert_relative_eq!(second - first, period, max_relative = 0.02);
        // The nodes are deep: contrast against the antinode in between.
        let antinode = tr
            .times
            .iter()
            .zip(&i)
            .filter(|(&t, _)| t > first && t < second)
            .map(|(_, &v)| v)
            .fold(0.0, f64::max);
        assert!(antinode > 50.0 * i[tr.times.iter().position(|&t| t >= first).unwrap()]);
    }

    #[test]
    fn nonuniform_grid_is_rejected() {
        let s = unit_line(0.0);
        let params = CavityParams::default();
        let grid = FrequencyGrid::new(-10.0, 10.0, 64).unwrap();
        let mut sweep = spectrum_sweep(&s, &params, Toggles::all_on(), &grid).unwrap();
        sweep.deltas[10] += 0.01;
        let err = time_response(&sweep, &Polarization::sigma(), &params.r_c, None).unwrap_err();
        assert!(err.is_validation());
    }

    fn measurement_detection(width: f64, depth: f64, gate: TimeGate) -> DetectionConfig {
        DetectionConfig {
            mode: DetectionMode::DirectMonochromator,
            extinction: 1e-10,
            analyzer_line: Some(AnalyzerLine { width, depth }),
            time_gate: Some(gate),
        }
    }

    #[test]
    fn measurement_requires_analyzer_and_gate() {
        let (_s, params, sweep) = single_line_spectrum(27.0, 256.0, 1 << 10);
        let scan = FrequencyGrid::new(-40.0, 40.0, 11).unwrap();
        let det = DetectionConfig::with_mode(DetectionMode::DirectMonochromator);
        let err = simulate_measurement(&sweep, &Polarization::sigma(), &det, &params.r_c, &scan)
            .unwrap_err();
        assert!(err.is_validation());
    }

    #[test]
    fn transparent_analyzer_removes_nothing() {
        let (_s, params, sweep) = single_line_spectrum(27.0, 256.0, 1 << 11);
        let scan = FrequencyGrid::new(-40.0, 40.0, 5).unwrap();
        let det = measurement_detection(1.0, 0.0, TimeGate { start: 0.0, end: 50.0 });
        let m = simulate_measurement(&sweep, &Polarization::sigma(), &det, &params.r_c, &scan)
            .unwrap();
        assert!(m.reference > 0.0);
        for e in &m.spectrum_estimate {
            assert!(e.abs() < 1e-12 * m.reference);
        }
    }

    #[test]
    fn narrow_analyzer_scan_reproduces_the_ideal_spectrum() {
        // Narrow, weak analyzer + full gate: the removed energy maps the
        // sample line shape. Compare, peak-normalized, against the directly
        // computed channel intensity. The analyzer width (0.2γ) stays well
        // above the grid step so its pole is resolved, and well below the
        // 28γ feature width so convolution broadening is sub-percent.
        let (s, params, sweep) = single_line_spectrum(27.0, 256.0, 1 << 13);
        let det = measurement_detection(0.2, 0.05, TimeGate { start: 0.0, end: 100.0 });
        let scan = FrequencyGrid::new(-40.0, 40.0, 81).unwrap();
        let m = simulate_measurement(&sweep, &Polarization::sigma(), &det, &params.r_c, &scan)
            .unwrap();
        let ideal: Vec<f64> = scan
            .points()
            .iter()
            .map(|&d| {
                let r = reflection_matrix(&s, &params, Toggles::all_on(), d).unwrap();
                channel_intensity(
                    &r.r,
                    &Polarization::sigma(),
                    &DetectionConfig::with_mode(DetectionMode::DirectMonochromator),
                )
            })
            .collect();
        let emax = m
            .spectrum_estimate
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let imax = ideal.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (e, i) in m.spectrum_estimate.iter().zip(ideal.iter()) {
            assert!(
                (e / emax - i / imax).abs() < 0.01,
                "normalized shapes differ: {} vs {}",
                e / emax,
                i / imax
            );
        }
    }

    /// Independent oracle for the gated counts at one analyzer detuning.
    ///
    /// To first order in the analyzer depth, the downstream field of a
    /// single resonant line at Δ = 0 behind the analyzer is a sum of two
    /// complex exponentials: the frequency response
    /// iA/(ω − a) · [1 − μ/(ω − b)] with μ = (τ/2)(iΓ_a/2), poles
    /// a = −iΓ/2 and b = Δ_a − iΓ_a/2, transforms (t > 0) to
    /// f(t) = A(1 − μ/(a−b)) e^{−iat} + A·μ/(a−b) e^{−ibt}.
    /// The oracle evaluates |f|² on the same time comb the implementation
    /// uses and sums the gated rectangles — sharing the discretization but
    /// none of the code path (no FFT, no matrices).
    fn gated_counts_oracle(
        amp: f64,
        line_width: f64,
        analyzer: AnalyzerLine,
        delta_a: f64,
        gate: TimeGate,
        n: usize,
        freq_step: f64,
    ) -> f64 {
        let i = c(0.0, 1.0);
        let a_pole = c(0.0, -line_width / 2.0);
        let b_pole = c(delta_a, -analyzer.width / 2.0);
        let mu = i * (analyzer.depth / 2.0) * (analyzer.width / 2.0);
        let alpha = (C64::from(1.0) - mu / (a_pole - b_pole)) * amp;
        let beta = mu / (a_pole - b_pole) * amp;
        let dt = std::f64::consts::TAU / (n as f64 * freq_step);
        let mut sum = 0.0;
        for k in 1..n {
            let t = dt * k as f64;
            if gate.contains(t) {
                let f = alpha * (-i * a_pole * t).exp() + beta * (-i * b_pole * t).exp();
                sum += f.norm_sqr() * dt;
            }
        }
        sum
    }

    #[test]
    fn gated_measurement_matches_the_exponential_oracle() {
        // Single line of total width 28γ, prompt amplitude A = 13.5; weak
        // analyzer; finite gate excluding the earliest decay. The gate
        // start skips the t = 0 step sample, so the oracle comb starts at
        // k = 1 like the gated implementation sum.
        let (_s, params, sweep) = single_line_spectrum(27.0, 4096.0, 1 << 16);
        let analyzer = AnalyzerLine {
            width: 1.0,
            depth: 0.05,
        };
        let gate = TimeGate {
            start: 0.05,
            end: 40.0,
        };
        let det = measurement_detection(analyzer.width, analyzer.depth, gate);
        let n = sweep.len();
        let step = sweep.uniform_step().unwrap();
        for da in [0.0, 5.0, -12.0] {
            let scan = FrequencyGrid {
                min: da,
                max: da + 1.0,
                n: 2,
            };
            let m =
                simulate_measurement(&sweep, &Polarization::sigma(), &det, &params.r_c, &scan)
                    .unwrap();
            let oracle =
                gated_counts_oracle(params.amplitude, 28.0, analyzer, da, gate, n, step);
            assert!(
                (m.counts[0] - oracle).abs() < 0.01 * oracle,
                "Δ_a = {da}: counts {} vs oracle {oracle}",
                m.counts[0]
            );
        }
    }

    #[test]
    fn wide_analyzer_estimate_is_the_convolved_spectrum() {
        // Small depth, full gate, analyzer width 2γ: the removed energy is
        // the ideal intensity convolved with a Lorentzian of the analyzer
        // width. Oracle: direct numerical convolution on a fine grid.
        let (s, params, sweep) = single_line_spectrum(27.0, 256.0, 1 << 13);
        let width = 2.0;
        let det = measurement_detection(width, 0.02, TimeGate { start: 0.0, end: 120.0 });
        let scan = FrequencyGrid::new(-50.0, 50.0, 101).unwrap();
        let m = simulate_measurement(&sweep, &Polarization::sigma(), &det, &params.r_c, &scan)
            .unwrap();

        let fine = FrequencyGrid::new(-300.0, 300.0, 6001).unwrap();
        let fine_pts = fine.points();
        let ideal: Vec<f64> = fine_pts
            .iter()
            .map(|&d| {
                let r = reflection_matrix(&s, &params, Toggles::all_on(), d).unwrap();
                (r.r[(0, 0)] - params.r_c[(0, 0)]).norm_sqr()
            })
            .collect();
        let h = fine.step();
        let conv: Vec<f64> = scan
            .points()
            .iter()
            .map(|&da| {
                fine_pts
                    .iter()
                    .zip(ideal.iter())
                    .map(|(&w, &iw)| {
                        let lor = (width / (2.0 * std::f64::consts::PI))
                            / ((w - da).powi(2) + width * width / 4.0);
                        iw * lor * h
                    })
                    .sum()
            })
            .collect();
        let emax = m
            .spectrum_estimate
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let cmax = conv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (e, ct) in m.spectrum_estimate.iter().zip(conv.iter()) {
            assert!(
                (e / emax - ct / cmax).abs() < 0.02,
                "convolution mismatch: {} vs {}",
                e / emax,
                ct / cmax
            );
        }
    }
}
