//! Subcommand implementations and artifact writing.
//!
//! Every command loads one TOML configuration, applies command-line
//! overrides, echoes the fully-resolved configuration to the output
//! directory, and stamps every artifact with the SHA-256 of that echo so a
//! run can be reproduced byte-for-byte from its own outputs.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use sha2::{Digest, Sha256};

use nucavity::config::RunConfig;
use nucavity::geometry::Preset;
use nucavity::liouvillian::Toggles;
use nucavity::parratt::fit_cavity_params;
use nucavity::response::{
    baseline_intensity, find_dips, find_peaks, simulate_measurement, spectrum_sweep,
    time_response, DetectionConfig, DetectionMode, Dip, FrequencyGrid, Peak,
    DIP_BASELINE_FRACTION, DIP_PROMINENCE_FRACTION, PEAK_FRACTION,
};
use nucavity::{Error, Result};

use crate::plot::{self, Curve};

/// Exact spectrum CSV header (column contract shared with downstream tools).
const SPECTRUM_HEADER: &str = "delta_gamma, re_r_ss, im_r_ss, re_r_ps, im_r_ps, \
re_r_sp, im_r_sp, re_r_pp, im_r_pp, I_crossed, I_direct";
/// Exact time-response CSV header.
const TIME_HEADER: &str = "t_gamma, intensity";
/// Soft bound on the frequency-window edge residual for time-domain work;
/// larger values mean visible truncation ringing.
const TRUNCATION_SOFT_BOUND: f64 = 1e-4;

#[derive(Parser, Debug)]
#[command(
    name = "nucavity",
    version,
    about = "Spectra, time response, and oracle fits for a thin-film nuclear cavity"
)]
pub struct Cli {
    /// TOML run configuration; every key is optional (defaults documented in
    /// the README).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory; overrides [output].dir.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Geometry preset override.
    #[arg(long, global = true)]
    pub preset: Option<PresetArg>,
    /// Switch spontaneously generated coherences on or off.
    #[arg(long, global = true)]
    pub sgc: Option<SwitchArg>,
    /// Detuning grid override, min:max:n in γ units.
    #[arg(long, global = true, value_name = "MIN:MAX:N", allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Hyperfine level scheme: line list and stick plot.
    Levels,
    /// Polarization-resolved reflection spectrum over the detuning grid.
    Spectrum,
    /// Time response of the reflected field after pulsed excitation.
    Time,
    /// Simulated analyzer-scan measurement with time-gated counting.
    Measure,
    /// Layer-stack reflectivity oracle: rocking curve and nuclear spectrum.
    Oracle,
    /// Fit effective cavity parameters to the oracle spectrum.
    Fit,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Levels => "levels",
            Command::Spectrum => "spectrum",
            Command::Time => "time",
            Command::Measure => "measure",
            Command::Oracle => "oracle",
            Command::Fit => "fit",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetArg {
    #[value(name = "faraday")]
    Faraday,
    #[value(name = "half_faraday")]
    HalfFaraday,
    #[value(name = "voigt45")]
    Voigt45,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchArg {
    On,
    Off,
}

/// Load, override, resolve, and dispatch.
pub fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::validation(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    apply_overrides(&mut config, &cli)?;
    config.validate()?;

    let effective = config.effective_toml();
    let sha = hex_sha256(config.provenance_toml().as_bytes());
    let out_dir = PathBuf::from(&config.output.dir);
    fs::create_dir_all(&out_dir)
        .map_err(|e| Error::validation(format!("cannot create {}: {e}", out_dir.display())))?;
    let ctx = Ctx {
        config,
        out_dir,
        sha,
    };
    ctx.write_text("effective_config.toml", &effective)?;

    match cli.command {
        Command::Levels => levels(&ctx),
        Command::Spectrum => spectrum(&ctx),
        Command::Time => time(&ctx),
        Command::Measure => measure(&ctx),
        Command::Oracle => oracle(&ctx),
        Command::Fit => fit(&ctx),
    }
}

fn apply_overrides(config: &mut RunConfig, cli: &Cli) -> Result<()> {
    if let Some(out) = &cli.out {
        config.output.dir = out.display().to_string();
    }
    if let Some(preset) = cli.preset {
        config.geometry.preset = match preset {
            PresetArg::Faraday => Preset::Faraday,
            PresetArg::HalfFaraday => Preset::HalfFaraday,
            PresetArg::Voigt45 => Preset::Voigt45,
        };
        // A preset fixes the direction; drop any explicit one.
        config.geometry.b_hat = None;
    }
    if let Some(sw) = cli.sgc {
        let on = sw == SwitchArg::On;
        config.toggles.sgc_hamiltonian = on;
        config.toggles.sgc_dissipative = on;
    }
    if let Some(text) = &cli.grid {
        config.grid = parse_grid(text)?;
    }
    Ok(())
}

fn parse_grid(text: &str) -> Result<FrequencyGrid> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Error::validation(format!("--grid expects min:max:n, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let min: f64 = parts[0].parse().map_err(|_| bad())?;
    let max: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    FrequencyGrid::new(min, max, n)
}

fn hex_sha256(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

struct Ctx {
    config: RunConfig,
    out_dir: PathBuf,
    sha: String,
}

impl Ctx {
    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn write_text(&self, name: &str, text: &str) -> Result<()> {
        write_file(&self.path(name), text)
    }

    /// CSV with the provenance comment above the header row.
    fn write_csv(&self, name: &str, header: &str, rows: &[Vec<String>]) -> Result<()> {
        let mut out = String::with_capacity(rows.len() * 64 + 128);
        out.push_str(&format!("# config_sha256 = {}\n", self.sha));
        out.push_str(header);
        out.push('\n');
        for row in rows {
            out.push_str(&row.join(", "));
            out.push('\n');
        }
        self.write_text(name, &out)
    }

    fn write_plot(&self, name: &str, svg: String) -> Result<()> {
        if !self.config.output.plots {
            return Ok(());
        }
        let stamped = format!("<!-- config_sha256 = {} -->\n{svg}", self.sha);
        self.write_text(name, &stamped)
    }

    fn write_summary(
        &self,
        command: Command,
        parameters: serde_json::Value,
        dips: &[Dip],
        peaks: &[Peak],
    ) -> Result<()> {
        let doc = json!({
            "command": command.name(),
            "version": nucavity::VERSION,
            "config_sha256": self.sha,
            "parameters": parameters,
            "dips": dips,
            "peaks": peaks,
        });
        let text = serde_json::to_string_pretty(&doc)
            .map_err(|e| Error::validation(format!("summary serialization: {e}")))?;
        self.write_text("summary.json", &format!("{text}\n"))
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)
        .map_err(|e| Error::validation(format!("cannot write {}: {e}", path.display())))
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

fn levels(ctx: &Ctx) -> Result<()> {
    let scheme = ctx.config.scheme()?;
    let geometry = ctx.config.geometry()?;
    let rows: Vec<Vec<String>> = scheme
        .transitions
        .iter()
        .enumerate()
        .map(|(i, t)| {
            vec![
                i.to_string(),
                fmt(t.m_g.value()),
                fmt(t.m_e.value()),
                t.q.to_string(),
                fmt(t.cg),
                fmt(t.detuning),
                fmt(t.coupling.x.re),
                fmt(t.coupling.x.im),
                fmt(t.coupling.y.re),
                fmt(t.coupling.y.im),
                fmt(t.ground_population),
            ]
        })
        .collect();
    ctx.write_csv(
        "levels.csv",
        "index, m_g, m_e, q, clebsch_gordan, detuning_gamma, re_c_sigma, im_c_sigma, re_c_pi, im_c_pi, ground_population",
        &rows,
    )?;

    let sticks: Vec<(f64, f64)> = scheme
        .transitions
        .iter()
        .map(|t| (t.detuning, t.coupling.norm_squared()))
        .collect();
    ctx.write_plot(
        "levels.svg",
        plot::stick_plot(
            "Hyperfine transition lines",
            "detuning (γ)",
            "|coupling|²",
            &sticks,
        )?,
    )?;

    let b = geometry.b_hat();
    let species = ctx.config.species()?;
    ctx.write_summary(
        Command::Levels,
        json!({
            "b_tesla": geometry.b_tesla(),
            "b_hat": [b.x, b.y, b.z],
            "zeeman_scale": species.zeeman_scale(geometry.b_tesla()),
            "span_gamma": scheme.span(),
            "transitions": scheme.transitions.len(),
            "coupled_lines": scheme.coupled_count(1e-12),
        }),
        &[],
        &[],
    )
}

/// Rows of the polarization-resolved spectrum CSV for one sweep.
fn spectrum_rows(
    sweep: &nucavity::response::Spectrum,
    crossed: &[f64],
    direct: &[f64],
) -> Vec<Vec<String>> {
    sweep
        .deltas
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let r = &sweep.matrices[k];
            vec![
                fmt(d),
                fmt(r[(0, 0)].re),
                fmt(r[(0, 0)].im),
                fmt(r[(1, 0)].re),
                fmt(r[(1, 0)].im),
                fmt(r[(0, 1)].re),
                fmt(r[(0, 1)].im),
                fmt(r[(1, 1)].re),
                fmt(r[(1, 1)].im),
                fmt(crossed[k]),
                fmt(direct[k]),
            ]
        })
        .collect()
}

fn spectrum(ctx: &Ctx) -> Result<()> {
    let scheme = ctx.config.scheme()?;
    let params = ctx.config.cavity_params()?;
    let toggles = ctx.config.toggles;
    let input = ctx.config.geometry()?.in_polarization().clone();
    let sweep = spectrum_sweep(&scheme, &params, toggles, &ctx.config.grid)?;

    let crossed_det = DetectionConfig {
        mode: DetectionMode::CrossedPolarimeter,
        ..ctx.config.detection
    };
    let direct_det = DetectionConfig {
        mode: DetectionMode::DirectMonochromator,
        ..ctx.config.detection
    };
    let crossed = sweep.channel(&input, &crossed_det);
    let direct = sweep.channel(&input, &direct_det);
    ctx.write_csv(
        "spectrum.csv",
        SPECTRUM_HEADER,
        &spectrum_rows(&sweep, &crossed, &direct),
    )?;

    // Dips and peaks are reported for the configured detection channel.
    let det = ctx.config.detection;
    let intensity = sweep.channel(&input, &det);
    let baseline = baseline_intensity(&params, &input, &det);
    let dips = find_dips(
        &sweep.deltas,
        &intensity,
        baseline,
        DIP_PROMINENCE_FRACTION,
        DIP_BASELINE_FRACTION,
    );
    let peaks = find_peaks(&sweep.deltas, &intensity, PEAK_FRACTION);

    // Overlay plot: coherent cross couplings on (solid) vs off (dashed).
    let on = Toggles {
        sgc_hamiltonian: true,
        sgc_dissipative: true,
        ..toggles
    };
    let off = toggles.sgc_off();
    let channel = |t: Toggles| -> Result<Vec<(f64, f64)>> {
        let s = spectrum_sweep(&scheme, &params, t, &ctx.config.grid)?;
        Ok(s.deltas
            .iter()
            .zip(s.channel(&input, &det))
            .map(|(&d, i)| (d, i))
            .collect())
    };
    ctx.write_plot(
        "spectrum.svg",
        plot::line_plot(
            "Reflection spectrum",
            "detuning (γ)",
            "intensity",
            &[
                Curve {
                    label: "SGC on".into(),
                    dashed: false,
                    points: channel(on)?,
                },
                Curve {
                    label: "SGC off".into(),
                    dashed: true,
                    points: channel(off)?,
                },
            ],
            false,
        )?,
    )?;

    ctx.write_summary(
        Command::Spectrum,
        json!({
            "preset": ctx.config.geometry.preset,
            "gamma_s": params.gamma_s,
            "delta_ls": params.delta_ls,
            "amplitude": params.amplitude,
            "detection_mode": mode_name(det.mode),
            "baseline_intensity": baseline,
            "toggles": {
                "sr": toggles.sr,
                "sgc_hamiltonian": toggles.sgc_hamiltonian,
                "sgc_dissipative": toggles.sgc_dissipative,
            },
            "grid": { "min": ctx.config.grid.min, "max": ctx.config.grid.max, "n": ctx.config.grid.n },
        }),
        &dips,
        &peaks,
    )
}

fn mode_name(mode: DetectionMode) -> &'static str {
    match mode {
        DetectionMode::CrossedPolarimeter => "crossed_polarimeter",
        DetectionMode::DirectMonochromator => "direct_monochromator",
    }
}

fn time(ctx: &Ctx) -> Result<()> {
    let scheme = ctx.config.scheme()?;
    let params = ctx.config.cavity_params()?;
    let input = ctx.config.geometry()?.in_polarization().clone();
    let grid = ctx.config.time_grid()?;
    let sweep = spectrum_sweep(&scheme, &params, ctx.config.toggles, &grid)?;
    let tr = time_response(&sweep, &input, &params.r_c, None)?;
    if tr.truncation > TRUNCATION_SOFT_BOUND {
        eprintln!(
            "warning: frequency-window edge residual {:.3e} exceeds {TRUNCATION_SOFT_BOUND:.0e}; \
             early-time samples carry truncation ringing (widen [time].window to reduce it)",
            tr.truncation
        );
    }
    let intensity = tr.intensity(&ctx.config.detection);
    let rows: Vec<Vec<String>> = tr
        .times
        .iter()
        .zip(&intensity)
        .map(|(&t, &i)| vec![fmt(t), fmt(i)])
        .collect();
    ctx.write_csv("time.csv", TIME_HEADER, &rows)?;

    let points: Vec<(f64, f64)> = tr
        .times
        .iter()
        .zip(&intensity)
        .filter(|(&t, _)| t <= 2.0)
        .map(|(&t, &i)| (t, i))
        .collect();
    ctx.write_plot(
        "time.svg",
        plot::line_plot(
            "Time response",
            "t (1/γ)",
            "intensity",
            &[Curve {
                label: "detected intensity".into(),
                dashed: false,
                points,
            }],
            true,
        )?,
    )?;

    ctx.write_summary(
        Command::Time,
        json!({
            "window_gamma": ctx.config.time.window,
            "samples": ctx.config.time.samples,
            "edge_residual": tr.truncation,
            "detection_mode": mode_name(ctx.config.detection.mode),
        }),
        &[],
        &[],
    )
}

fn measure(ctx: &Ctx) -> Result<()> {
    let scheme = ctx.config.scheme()?;
    let params = ctx.config.cavity_params()?;
    let input = ctx.config.geometry()?.in_polarization().clone();
    let grid = ctx.config.time_grid()?;
    let sweep = spectrum_sweep(&scheme, &params, ctx.config.toggles, &grid)?;
    let measured = simulate_measurement(
        &sweep,
        &input,
        &ctx.config.detection,
        &params.r_c,
        &ctx.config.measure.scan,
    )?;
    let rows: Vec<Vec<String>> = measured
        .scan_deltas
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            vec![
                fmt(d),
                fmt(measured.counts[k]),
                fmt(measured.spectrum_estimate[k]),
            ]
        })
        .collect();
    ctx.write_csv(
        "measure.csv",
        "delta_a_gamma, gated_counts, spectrum_estimate",
        &rows,
    )?;

    let peaks = find_peaks(
        &measured.scan_deltas,
        &measured.spectrum_estimate,
        PEAK_FRACTION,
    );
    let points: Vec<(f64, f64)> = measured
        .scan_deltas
        .iter()
        .zip(&measured.spectrum_estimate)
        .map(|(&d, &v)| (d, v))
        .collect();
    ctx.write_plot(
        "measure.svg",
        plot::line_plot(
            "Analyzer scan",
            "analyzer detuning (γ)",
            "reference − gated counts",
            &[Curve {
                label: "spectrum estimate".into(),
                dashed: false,
                points,
            }],
            false,
        )?,
    )?;

    let analyzer = ctx.config.detection.analyzer_line.expect("checked above");
    let gate = ctx.config.detection.time_gate.expect("checked above");
    ctx.write_summary(
        Command::Measure,
        json!({
            "analyzer_width_gamma": analyzer.width,
            "analyzer_depth": analyzer.depth,
            "gate_start": gate.start,
            "gate_end": gate.end,
            "reference_counts": measured.reference,
            "scan": { "min": ctx.config.measure.scan.min, "max": ctx.config.measure.scan.max, "n": ctx.config.measure.scan.n },
        }),
        &[],
        &peaks,
    )
}

/// Scalar oracle reflection embedded in the polarization-resolved CSV
/// layout: the stack treats both polarizations identically, so the diagonal
/// carries r and the off-diagonals vanish.
fn oracle_rows(deltas: &[f64], r: &[nucavity::C64], extinction: f64) -> Vec<Vec<String>> {
    deltas
        .iter()
        .zip(r)
        .map(|(&d, &r)| {
            let direct = r.norm_sqr();
            vec![
                fmt(d),
                fmt(r.re),
                fmt(r.im),
                fmt(0.0),
                fmt(0.0),
                fmt(0.0),
                fmt(0.0),
                fmt(r.re),
                fmt(r.im),
                fmt(extinction * direct),
                fmt(direct),
            ]
        })
        .collect()
}

fn oracle_setup(ctx: &Ctx) -> Result<(nucavity::parratt::LayerStack, f64)> {
    let stack = ctx.config.oracle_stack();
    stack.validate()?;
    let o = &ctx.config.oracle;
    let mode = match o.theta_mrad {
        Some(t) => t,
        None => stack.mode_angle_in(o.theta_min, o.theta_max)?,
    };
    Ok((stack, mode))
}

fn stack_json(stack: &nucavity::parratt::LayerStack) -> serde_json::Value {
    let layers: Vec<_> = stack
        .layers
        .iter()
        .map(|l| {
            json!({
                "delta": l.material.delta,
                "beta": l.material.beta,
                "thickness_nm": l.thickness_nm,
                "resonant": l.resonance.is_some(),
            })
        })
        .collect();
    json!({
        "layers": layers,
        "substrate": { "delta": stack.substrate.delta, "beta": stack.substrate.beta },
        "wavelength_nm": stack.wavelength_nm,
    })
}

fn oracle(ctx: &Ctx) -> Result<()> {
    let (stack, mode) = oracle_setup(ctx)?;
    let o = &ctx.config.oracle;

    let thetas = linspace(o.theta_min, o.theta_max, o.theta_points);
    let rocking = stack.rocking_curve(&thetas);
    let rows: Vec<Vec<String>> = thetas
        .iter()
        .zip(&rocking)
        .map(|(&t, &r)| vec![fmt(t), fmt(r)])
        .collect();
    ctx.write_csv("rocking.csv", "theta_mrad, reflectance", &rows)?;

    let deltas = linspace(-o.span, o.span, o.points);
    let r = stack.nuclear_spectrum(mode, &deltas);
    ctx.write_csv(
        "oracle_spectrum.csv",
        SPECTRUM_HEADER,
        &oracle_rows(&deltas, &r, ctx.config.detection.extinction),
    )?;

    let rock_points: Vec<(f64, f64)> = thetas.iter().zip(&rocking).map(|(&t, &v)| (t, v)).collect();
    ctx.write_plot(
        "rocking.svg",
        plot::line_plot(
            "Rocking curve",
            "grazing angle (mrad)",
            "|r|²",
            &[Curve {
                label: "electronic reflectance".into(),
                dashed: false,
                points: rock_points,
            }],
            true,
        )?,
    )?;
    let spec_points: Vec<(f64, f64)> = deltas
        .iter()
        .zip(&r)
        .map(|(&d, c)| (d, c.norm_sqr()))
        .collect();
    ctx.write_plot(
        "oracle_spectrum.svg",
        plot::line_plot(
            "Oracle nuclear spectrum",
            "detuning (γ)",
            "|r|²",
            &[Curve {
                label: "layer-stack reflectance".into(),
                dashed: false,
                points: spec_points,
            }],
            false,
        )?,
    )?;

    let intensity: Vec<f64> = r.iter().map(|c| c.norm_sqr()).collect();
    let peaks = find_peaks(&deltas, &intensity, PEAK_FRACTION);
    ctx.write_summary(
        Command::Oracle,
        json!({
            "mode_angle_mrad": mode,
            "strength": o.strength,
            "width_gamma": o.width,
            "stack": stack_json(&stack),
        }),
        &[],
        &peaks,
    )
}

fn fit(ctx: &Ctx) -> Result<()> {
    let (stack, mode) = oracle_setup(ctx)?;
    let o = &ctx.config.oracle;
    let deltas = linspace(-o.span, o.span, o.points);
    let data = stack.nuclear_spectrum(mode, &deltas);
    let result = fit_cavity_params(&deltas, &data)?;

    let rows: Vec<Vec<String>> = deltas
        .iter()
        .zip(&data)
        .map(|(&d, &r)| {
            let m = result.model(d);
            vec![fmt(d), fmt(r.re), fmt(r.im), fmt(m.re), fmt(m.im)]
        })
        .collect();
    ctx.write_csv(
        "fit.csv",
        "delta_gamma, re_r, im_r, re_model, im_model",
        &rows,
    )?;

    let data_points: Vec<(f64, f64)> = deltas
        .iter()
        .zip(&data)
        .map(|(&d, c)| (d, c.norm_sqr()))
        .collect();
    let model_points: Vec<(f64, f64)> = deltas
        .iter()
        .map(|&d| (d, result.model(d).norm_sqr()))
        .collect();
    ctx.write_plot(
        "fit.svg",
        plot::line_plot(
            "Single-pole fit of the oracle spectrum",
            "detuning (γ)",
            "|r|²",
            &[
                Curve {
                    label: "layer stack".into(),
                    dashed: false,
                    points: data_points,
                },
                Curve {
                    label: "fitted model".into(),
                    dashed: true,
                    points: model_points,
                },
            ],
            false,
        )?,
    )?;

    ctx.write_summary(
        Command::Fit,
        json!({
            "theta_mrad": mode,
            "gamma_s": result.gamma_s,
            "delta_ls": result.delta_ls,
            "background": [result.background.re, result.background.im],
            "amplitude": [result.amplitude.re, result.amplitude.im],
            "amplitude_abs": result.amplitude.norm(),
            "amplitude_arg_deg": result.amplitude.arg().to_degrees(),
            "relative_residual": result.relative_residual,
            "iterations": result.iterations,
        }),
        &[],
        &[],
    )
}
