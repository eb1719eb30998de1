use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use tfi_core::channel::{Capture, NoiseModel, TapPreset};
use tfi_core::harness::{
    draw_trial, emit_results, estimate_noise_floor, read_iq_capture, render_results, run_sweep,
    run_trial, write_iq_capture, CaptureMeta, OutputFormat, SweepSpec, TrialPoint, TrialSidecar,
};
use tfi_core::phy::{Modulation, OfdmConfig, SUPPORTED_OVERCLOCK};
use tfi_core::receiver::{
    calibrate_energy_threshold, receive_frame, receive_frame_baseline, FrameFormat, GroundTruth,
    ReceiverConfig, ENERGY_THRESHOLD,
};
use tfi_core::transmitter::STF_LEN;
use tfi_core::Error;

/// Overclocked OFDM receiver simulator.
#[derive(Debug, Parser)]
#[command(name = "tfi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo sweep over SNR, overclock factor and modulation.
    Sweep(SweepArgs),
    /// One trial with full receiver diagnostics.
    Trial(TrialArgs),
    /// Run both receivers on a stored IQ capture.
    Replay(ReplayArgs),
    /// Re-derive the detector's energy threshold by simulation.
    CalibrateDetector(CalibrateArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 9.0, allow_negative_numbers = true)]
    snr_min: f64,
    #[arg(long, default_value_t = 35.0, allow_negative_numbers = true)]
    snr_max: f64,
    #[arg(long, default_value_t = 2.0)]
    snr_step: f64,
    /// Overclock factors, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = SUPPORTED_OVERCLOCK)]
    g: Vec<usize>,
    /// Modulations, comma separated (bpsk, qpsk, 16qam, 64qam).
    #[arg(long, value_delimiter = ',', default_values_t = Modulation::ALL)]
    scheme: Vec<Modulation>,
    #[arg(long, default_value_t = NoiseModel::Wideband)]
    noise_model: NoiseModel,
    #[arg(long, default_value_t = TapPreset::Flat)]
    taps: TapPreset,
    #[arg(long, default_value_t = 3000)]
    packets: usize,
    #[arg(long, default_value_t = 20)]
    payload_symbols: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Largest carrier offset drawn per trial, Hz.
    #[arg(long, default_value_t = 0.0)]
    cfo_max: f64,
    /// Fill the wall_time_s column (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct TrialArgs {
    #[arg(long, default_value = "16qam")]
    scheme: Modulation,
    #[arg(long, default_value_t = 8)]
    g: usize,
    #[arg(long, default_value_t = 15.0, allow_negative_numbers = true)]
    snr: f64,
    #[arg(long, default_value_t = NoiseModel::Wideband)]
    noise_model: NoiseModel,
    #[arg(long, default_value_t = TapPreset::Flat)]
    taps: TapPreset,
    #[arg(long, default_value_t = 20)]
    payload_symbols: usize,
    #[arg(long, default_value_t = 0.0)]
    cfo_max: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also write the capture (plus a `.json` sidecar with ground truth).
    #[arg(long)]
    dump_iq: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    #[arg(long)]
    iq: PathBuf,
    /// Overclock to receive at; must divide the capture's factor.
    #[arg(long)]
    g: Option<usize>,
    /// Needed when the capture has no sidecar.
    #[arg(long)]
    scheme: Option<Modulation>,
    #[arg(long, default_value_t = 20)]
    payload_symbols: usize,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[arg(long, default_value_t = 16)]
    window: usize,
    #[arg(long, default_value_t = 0.01)]
    false_alarm: f64,
    #[arg(long, default_value_t = 200_000)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Core(
                Error::Io(_)
                | Error::Json(_)
                | Error::NotIqCapture
                | Error::Truncated { .. }
                | Error::UnsupportedVersion(_),
            ) => 2,
            _ => 1,
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Trial(a) => trial(a),
        Command::Replay(a) => replay(a),
        Command::CalibrateDetector(a) => calibrate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn snr_grid(min: f64, max: f64, step: f64) -> CliResult<Vec<f64>> {
    if !min.is_finite() || !max.is_finite() || step.is_nan() || step <= 0.0 || max < min {
        return Err(CliError::Usage(format!("bad SNR grid {min}..{max} step {step}")));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| min + k as f64 * step).collect())
}

fn sweep(a: SweepArgs) -> CliResult {
    let spec = SweepSpec {
        snr_grid_db: snr_grid(a.snr_min, a.snr_max, a.snr_step)?,
        g_grid: a.g,
        schemes: a.scheme,
        noise_model: a.noise_model,
        taps: a.taps,
        packets_per_point: a.packets,
        payload_symbols: a.payload_symbols,
        base_seed: a.seed,
        cfo_max_hz: a.cfo_max,
        timing: a.timing,
    };
    spec.validate()?;
    let rows = run_sweep(&spec, &ReceiverConfig::default())?;
    match a.out {
        Some(path) => emit_results(&rows, a.format, &path)?,
        None => {
            let mut out = io::stdout().lock();
            render_results(&rows, a.format, &mut out)?;
            out.flush().map_err(Error::from)?;
        }
    }
    Ok(())
}

fn trial(a: TrialArgs) -> CliResult {
    let point = TrialPoint {
        scheme: a.scheme,
        g: a.g,
        snr_db: a.snr,
        noise_model: a.noise_model,
        taps: a.taps,
        payload_symbols: a.payload_symbols,
        cfo_max_hz: a.cfo_max,
    };
    let drawn = draw_trial(&point, a.seed)?;
    let capture = drawn.capture()?;
    if let Some(path) = &a.dump_iq {
        dump(path, &capture, &drawn.blueprint, drawn.scenario.cfo_hz)?;
    }
    let pair = run_trial(&capture, &drawn.blueprint, drawn.scenario.cfo_hz, &ReceiverConfig::default());
    let report = json!({
        "point": point,
        "seed": a.seed,
        "timing_offset": drawn.scenario.timing_offset,
        "cfo_hz": drawn.scenario.cfo_hz,
        "noise_variance": capture.noise_variance,
        "ltf_start_base": capture.ltf_start_base(),
        "trial": pair,
    });
    println!("{}", serde_json::to_string_pretty(&report).map_err(Error::from)?);
    Ok(())
}

fn dump(
    path: &Path,
    capture: &Capture,
    blueprint: &tfi_core::transmitter::FrameBlueprint,
    cfo_hz: f64,
) -> CliResult {
    let meta = CaptureMeta {
        sample_rate_hz: capture.sample_rate_hz,
        overclock: capture.overclock as u16,
    };
    write_iq_capture(path, &capture.samples, meta)?;
    TrialSidecar {
        scheme: blueprint.scheme,
        payload_symbols: blueprint.payload_symbols(),
        bits: TrialSidecar::encode_bits(blueprint.info_bits()),
        ltf_start_base: capture.ltf_start_base(),
        noise_variance: capture.noise_variance,
        cfo_hz,
    }
    .write(path)?;
    eprintln!("wrote {} and {}", path.display(), TrialSidecar::path_for(path).display());
    Ok(())
}

fn replay(a: ReplayArgs) -> CliResult {
    let (samples, meta) = read_iq_capture(&a.iq)?;
    let sidecar = TrialSidecar::read(&a.iq)?;
    let file_g = meta.overclock as usize;
    let g = a.g.unwrap_or(file_g);
    if !SUPPORTED_OVERCLOCK.contains(&g) || g > file_g || !file_g.is_multiple_of(g) {
        return Err(CliError::Usage(format!("cannot receive a {file_g}x capture at {g}x")));
    }
    let scheme = match (a.scheme, &sidecar) {
        (Some(s), _) => s,
        (None, Some(side)) => side.scheme,
        (None, None) => return Err(CliError::Usage("no sidecar found; pass --scheme".into())),
    };
    let payload_symbols = sidecar.as_ref().map_or(a.payload_symbols, |s| s.payload_symbols);
    let noise_variance = match &sidecar {
        Some(s) => s.noise_variance,
        None => estimate_noise_floor(&samples, file_g),
    };
    let full = Capture {
        samples,
        overclock: file_g,
        sample_rate_hz: meta.sample_rate_hz,
        frame_start_base: sidecar.as_ref().map_or(0.0, |s| s.ltf_start_base - STF_LEN as f64),
        noise_variance,
    };
    let cap = full.decimate(file_g / g)?;

    let cfg = OfdmConfig::default().with_overclock(g);
    let rx = ReceiverConfig::default().with_noise_floor(noise_variance);
    let format = FrameFormat { scheme, payload_symbols };
    let bits = sidecar.as_ref().map(TrialSidecar::bit_vec);
    let truth = bits.as_deref().map(|bits| GroundTruth {
        bits,
        ltf_start_base: cap.ltf_start_base(),
    });
    let tfi = receive_frame(&cap.samples, &cfg, &rx, format, truth);
    let baseline = receive_frame_baseline(&cap.samples, &cfg, &rx, format, truth);
    let show = |r: Result<_, Error>| match r {
        Ok(d) => json!(d),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let report = json!({
        "capture": a.iq.display().to_string(),
        "capture_overclock": file_g,
        "overclock": g,
        "sample_rate_hz": cap.sample_rate_hz,
        "samples": cap.samples.len(),
        "noise_floor": noise_variance,
        "ground_truth": sidecar.is_some(),
        "tfi": show(tfi),
        "baseline": show(baseline),
    });
    println!("{}", serde_json::to_string_pretty(&report).map_err(Error::from)?);
    Ok(())
}

fn calibrate(a: CalibrateArgs) -> CliResult {
    if a.window == 0 || a.trials == 0 || !(a.false_alarm > 0.0 && a.false_alarm < 1.0) {
        return Err(CliError::Usage("need window > 0, trials > 0, 0 < false-alarm < 1".into()));
    }
    let t = calibrate_energy_threshold(a.window, a.false_alarm, a.trials, a.seed);
    println!(
        "energy threshold for window {} at false-alarm {}: {t:.4} (built-in ENERGY_THRESHOLD = {ENERGY_THRESHOLD})",
        a.window, a.false_alarm
    );
    Ok(())
}
