use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use ddtkit::channel::{
    apply_channel, ddt_pulse_train_sum, pulse_train, read_channel_json,
    verify_channel_identity, NoiseSpec, PulseTrainSpec,
};
use ddtkit::doppler::DopplerLaw;
use ddtkit::error::DdtError;
use ddtkit::export::{export_map_csv, export_map_pgm, parse_complex};
use ddtkit::figures::{run_figures, FigureConfig, FigureSignal, MapFormat};
use ddtkit::grid::{make_grid, TimeGrid};
use ddtkit::inverse::{inverse_ddt, DeconvOptions};
use ddtkit::signal::{read_signal_csv, synthesize, write_signal_csv, ComplexSignal, SignalExpr};
use ddtkit::transforms::{ddt_general, ddt_map, stft_map, verify_shift_identity, TFMap};
use ddtkit::window::WindowSpec;

/// Delay Doppler Transform toolkit.
#[derive(Parser)]
#[command(name = "ddtkit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a DDT map of a signal over a (t, Omega-rate) grid.
    Ddt(MapArgs),
    /// Compute an STFT map of a signal over a (t, Omega) grid.
    Stft(MapArgs),
    /// Pass a signal through a delay-Doppler channel and write the received signal.
    Channel(ChannelArgs),
    /// Recover a signal from its zero-rate DDT slice by regularized deconvolution.
    Invert(InvertArgs),
    /// Synthesize a pulse train and optionally its DDT.
    Pulsetrain(PulseTrainArgs),
    /// Regenerate the DDT/STFT figure maps for the three test chirps.
    Figures(FiguresArgs),
    /// Run the identity diagnostics and print the max errors.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct MapArgs {
    /// Input signal: s1|s2|s3|tone:w=..|impulse|file:<path>
    #[arg(long)]
    signal: String,
    /// Input grid as start,step,count (optional for file signals)
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Window: gaussian:a=..|rect:h=..|file:<path>
    #[arg(long, default_value = "gaussian:a=1")]
    window: String,
    /// Output time axis as start,step,count
    #[arg(long, default_value = "-5,0.0390625,256", allow_hyphen_values = true)]
    taxis: String,
    /// Omega axis as start,step,count
    #[arg(long, default_value = "-5,0.0390625,256", allow_hyphen_values = true)]
    omegaaxis: String,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Output formats, comma separated subset of csv,pgm
    #[arg(long, default_value = "csv,pgm")]
    format: String,
}

#[derive(Args)]
struct ChannelArgs {
    #[arg(long)]
    signal: String,
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Channel description JSON file
    #[arg(long)]
    channel: PathBuf,
    /// Noise as sigma,seed
    #[arg(long, default_value = "0,0")]
    noise: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct InvertArgs {
    /// Zero-rate slice as a t,re,im CSV file
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "gaussian:a=1")]
    window: String,
    /// Tikhonov level relative to the peak window spectral energy
    #[arg(long, default_value_t = 1e-10)]
    lambda: f64,
    /// Zero-padding multiple
    #[arg(long, default_value_t = 2)]
    pad: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PulseTrainArgs {
    /// Symbols as comma-separated complex values, e.g. 1+0j,0+1j
    #[arg(long, allow_hyphen_values = true)]
    symbols: String,
    /// Pulse shape: impulse|tone:w=..|file:<path> or gaussian via file
    #[arg(long, default_value = "gausspulse:a=1")]
    pulse: String,
    /// Pulse grid as start,step,count
    #[arg(long, default_value = "-10,0.0390625,512", allow_hyphen_values = true)]
    pulse_grid: String,
    /// Symbol duration T (integer multiple of the pulse step)
    #[arg(long)]
    symbol_duration: f64,
    /// Output grid as start,step,count
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    /// Also emit the train's DDT at this Doppler rate
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Window for the DDT, when --omega is given
    #[arg(long, default_value = "gaussian:a=1")]
    window: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FiguresArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "csv,pgm")]
    format: String,
    /// Subset of signals, comma separated from s1,s2,s3
    #[arg(long, default_value = "s1,s2,s3")]
    signals: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "s1")]
    signal: String,
    #[arg(long, default_value = "-10,0.0390625,512", allow_hyphen_values = true)]
    grid: String,
    /// Doppler shift rate used by all three diagnostics
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    omega: f64,
    #[arg(long, default_value = "gaussian:a=1")]
    window: String,
}

fn parse_triple(s: &str, what: &str) -> Result<TimeGrid, DdtError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(DdtError::invalid(format!("{what}: expected start,step,count, got '{s}'")));
    }
    let start: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|e| DdtError::invalid(format!("{what} start: {e}")))?;
    let step: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|e| DdtError::invalid(format!("{what} step: {e}")))?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|e| DdtError::invalid(format!("{what} count: {e}")))?;
    make_grid(start, step, count)
}

fn parse_window(s: &str) -> Result<WindowSpec, DdtError> {
    if let Some(rest) = s.strip_prefix("gaussian:a=") {
        let a: f64 = rest
            .parse()
            .map_err(|e| DdtError::invalid(format!("window scale: {e}")))?;
        return WindowSpec::gaussian(a);
    }
    if let Some(rest) = s.strip_prefix("rect:h=") {
        let h: f64 = rest
            .parse()
            .map_err(|e| DdtError::invalid(format!("window halfwidth: {e}")))?;
        return WindowSpec::rectangular(h);
    }
    if let Some(path) = s.strip_prefix("file:") {
        let sig = read_signal_csv(path.as_ref())?;
        let re = sig.samples().iter().map(|z| z.re).collect();
        let im = sig.samples().iter().map(|z| z.im).collect();
        return WindowSpec::tabulated(*sig.grid(), re, im);
    }
    Err(DdtError::invalid(format!(
        "unknown window '{s}' (expected gaussian:a=..|rect:h=..|file:..)"
    )))
}

fn parse_signal_expr(s: &str) -> Result<SignalExpr, DdtError> {
    match s {
        "s1" => return Ok(FigureSignal::S1.expr()),
        "s2" => return Ok(FigureSignal::S2.expr()),
        "s3" => return Ok(FigureSignal::S3.expr()),
        "impulse" => return Ok(SignalExpr::UnitImpulse { at: 0.0 }),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix("tone:w=") {
        let omega: f64 = rest
            .parse()
            .map_err(|e| DdtError::invalid(format!("tone frequency: {e}")))?;
        return Ok(SignalExpr::Tone { omega });
    }
    if let Some(rest) = s.strip_prefix("gausspulse:a=") {
        let a: f64 = rest
            .parse()
            .map_err(|e| DdtError::invalid(format!("pulse scale: {e}")))?;
        return Ok(SignalExpr::GaussianPulse { a });
    }
    if let Some(path) = s.strip_prefix("file:") {
        return Ok(SignalExpr::FromFile { path: PathBuf::from(path) });
    }
    Err(DdtError::invalid(format!(
        "unknown signal '{s}' (expected s1|s2|s3|tone:w=..|impulse|gausspulse:a=..|file:..)"
    )))
}

fn load_signal(spec: &str, grid: Option<&str>) -> Result<ComplexSignal, DdtError> {
    let expr = parse_signal_expr(spec)?;
    match (&expr, grid) {
        (SignalExpr::FromFile { path }, None) => read_signal_csv(path),
        (_, Some(triple)) => {
            let grid = parse_triple(triple, "--grid")?;
            synthesize(&expr, &grid)
        }
        (_, None) => Err(DdtError::invalid("--grid is required for synthesized signals")),
    }
}

fn parse_formats(s: &str) -> Result<Vec<MapFormat>, DdtError> {
    s.split(',')
        .map(|f| match f.trim() {
            "csv" => Ok(MapFormat::Csv),
            "pgm" => Ok(MapFormat::Pgm),
            other => Err(DdtError::invalid(format!("unknown format '{other}'"))),
        })
        .collect()
}

fn parse_noise(s: &str) -> Result<NoiseSpec, DdtError> {
    let (sigma, seed) = s
        .split_once(',')
        .ok_or_else(|| DdtError::invalid(format!("noise: expected sigma,seed, got '{s}'")))?;
    let sigma: f64 = sigma
        .trim()
        .parse()
        .map_err(|e| DdtError::invalid(format!("noise sigma: {e}")))?;
    if sigma < 0.0 {
        return Err(DdtError::invalid("noise sigma must be >= 0"));
    }
    let seed: u64 = seed
        .trim()
        .parse()
        .map_err(|e| DdtError::invalid(format!("noise seed: {e}")))?;
    Ok(NoiseSpec { sigma, seed })
}

fn parse_symbols(s: &str) -> Result<Vec<Complex64>, DdtError> {
    s.split(',').map(|f| parse_complex(f.trim())).collect()
}

fn write_map(map: &TFMap, stem: &str, out: &PathBuf, formats: &[MapFormat]) -> Result<(), DdtError> {
    std::fs::create_dir_all(out)?;
    for format in formats {
        let path = out.join(format!("{stem}.{}", format.extension()));
        match format {
            MapFormat::Csv => export_map_csv(map, &path)?,
            MapFormat::Pgm => export_map_pgm(map, &path)?,
        }
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_map(args: &MapArgs, stft: bool) -> Result<(), DdtError> {
    let s = load_signal(&args.signal, args.grid.as_deref())?;
    let window = parse_window(&args.window)?;
    let t_axis = parse_triple(&args.taxis, "--taxis")?;
    let omega_axis = parse_triple(&args.omegaaxis, "--omegaaxis")?;
    let formats = parse_formats(&args.format)?;
    let (map, stem) = if stft {
        (stft_map(&s, &window, &omega_axis, &t_axis)?, "stft")
    } else {
        (ddt_map(&s, &window, &omega_axis, &t_axis)?, "ddt")
    };
    write_map(&map, stem, &args.out, &formats)
}

fn run_channel(args: &ChannelArgs) -> Result<(), DdtError> {
    let s = load_signal(&args.signal, args.grid.as_deref())?;
    let ch = read_channel_json(&args.channel)?;
    let noise = parse_noise(&args.noise)?;
    let out_grid = *s.grid();
    let output = apply_channel(&s, &ch, &noise, &out_grid)?;
    for r in &output.rounded_taps {
        eprintln!(
            "note: tap {} delay {} rounded to {}",
            r.tap_index, r.requested_delay, r.used_delay
        );
    }
    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join("received.csv");
    write_signal_csv(&output.signal, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_invert(args: &InvertArgs) -> Result<(), DdtError> {
    let d0 = read_signal_csv(&args.input)?;
    let window = parse_window(&args.window)?;
    let opts = DeconvOptions { lambda_rel: args.lambda, pad_factor: args.pad };
    let recovered = inverse_ddt(&d0, &window, &opts)?;
    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join("recovered.csv");
    write_signal_csv(&recovered, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_pulsetrain(args: &PulseTrainArgs) -> Result<(), DdtError> {
    let symbols = parse_symbols(&args.symbols)?;
    let pulse_grid = parse_triple(&args.pulse_grid, "--pulse-grid")?;
    let pulse = synthesize(&parse_signal_expr(&args.pulse)?, &pulse_grid)?;
    let spec = PulseTrainSpec::new(symbols, pulse, args.symbol_duration)?;
    let out_grid = parse_triple(&args.grid, "--grid")?;
    std::fs::create_dir_all(&args.out)?;
    let train = pulse_train(&spec, &out_grid)?;
    let path = args.out.join("train.csv");
    write_signal_csv(&train, &path)?;
    println!("wrote {}", path.display());
    if let Some(omega) = args.omega {
        let window = parse_window(&args.window)?;
        let ddt = ddt_pulse_train_sum(&spec, &window, omega, &out_grid)?;
        let path = args.out.join("train_ddt.csv");
        write_signal_csv(&ddt, &path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run_figures_cmd(args: &FiguresArgs) -> Result<(), DdtError> {
    let mut cfg = FigureConfig::with_output_dir(&args.out);
    cfg.formats = parse_formats(&args.format)?;
    cfg.signals = args
        .signals
        .split(',')
        .map(|s| match s.trim() {
            "s1" => Ok(FigureSignal::S1),
            "s2" => Ok(FigureSignal::S2),
            "s3" => Ok(FigureSignal::S3),
            other => Err(DdtError::invalid(format!("unknown signal '{other}'"))),
        })
        .collect::<Result<_, _>>()?;
    let manifest = run_figures(&cfg)?;
    for f in &manifest.files {
        println!("wrote {} sha256={}", cfg.output_dir.join(&f.name).display(), f.sha256);
    }
    println!("wrote {}", cfg.output_dir.join("manifest.json").display());
    Ok(())
}

/// Identity tolerance shared by the three diagnostics: 1e-9 of the peak
/// magnitude of the quantity compared.
const VERIFY_REL_TOL: f64 = 1e-9;

fn run_verify(args: &VerifyArgs) -> Result<bool, DdtError> {
    let grid = parse_triple(&args.grid, "--grid")?;
    let s = load_signal(&args.signal, Some(&args.grid))?;
    let window = parse_window(&args.window)?;
    let omega = args.omega;
    let law = DopplerLaw::LinearRate { rate: omega };
    let mut all_ok = true;
    let mut report = |name: &str, err: f64, peak: f64| {
        let ok = err <= VERIFY_REL_TOL * peak;
        all_ok &= ok;
        println!(
            "{}: max error {:.3e} (tolerance {:.3e}) {}",
            name,
            err,
            VERIFY_REL_TOL * peak,
            if ok { "OK" } else { "EXCEEDED" }
        );
    };

    let shift_peak = ddt_general(&s, &window, &law, &grid)?.peak_abs();
    let shift_err = verify_shift_identity(&s, 32, omega, &window, &grid)?;
    report("time-shift identity", shift_err, shift_peak);

    let channel_peak = ddtkit::channel::ddt_receive_model(&s, &window, omega, &grid)?.peak_abs();
    let channel_err = verify_channel_identity(&s, &window, omega, &grid)?;
    report("channel identity", channel_err, channel_peak);

    // 4-symbol QPSK train with a Gaussian pulse and T = 64 steps
    let pulse = synthesize(&SignalExpr::GaussianPulse { a: 1.0 }, &grid)?;
    let step = grid.step();
    let spec = PulseTrainSpec::new(
        vec![
            Complex64::new(1.0, 1.0),
            Complex64::new(-1.0, 1.0),
            Complex64::new(-1.0, -1.0),
            Complex64::new(1.0, -1.0),
        ],
        pulse,
        64.0 * step,
    )?;
    let train_grid = make_grid(grid.start(), step, grid.count() + 3 * 64)?;
    let direct = ddt_general(&pulse_train(&spec, &train_grid)?, &window, &law, &train_grid)?;
    let decomposed = ddt_pulse_train_sum(&spec, &window, omega, &train_grid)?;
    let mut train_err = 0.0f64;
    for (a, b) in direct.samples().iter().zip(decomposed.samples()) {
        train_err = train_err.max((a - b).norm());
    }
    report("pulse-train decomposition", train_err, direct.peak_abs());

    Ok(all_ok)
}

fn dispatch(cli: Cli) -> Result<bool, DdtError> {
    match cli.command {
        Command::Ddt(args) => run_map(&args, false).map(|_| true),
        Command::Stft(args) => run_map(&args, true).map(|_| true),
        Command::Channel(args) => run_channel(&args).map(|_| true),
        Command::Invert(args) => run_invert(&args).map(|_| true),
        Command::Pulsetrain(args) => run_pulsetrain(&args).map(|_| true),
        Command::Figures(args) => run_figures_cmd(&args).map(|_| true),
        Command::Verify(args) => run_verify(&args),
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("DDTKIT_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            if n >= 1 {
                // affects speed only; outputs are bitwise identical either way
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                DdtError::Io(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
