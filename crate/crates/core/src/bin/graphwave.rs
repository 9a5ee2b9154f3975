use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use graphwave::continuous::spectrum_report;
use graphwave::edge_function::SampledEdgeFunction;
use graphwave::random::{random_sampled, rng};
use graphwave::report::{spectrum_json, structure_json, to_json};
use graphwave::verify::{run_suite, Suite, VerifyParams};
use graphwave::wave::{wave_solution, write_wave_csv};
use graphwave::{Error, Network};

const EXIT_VERIFY: u8 = 1;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "graphwave",
    version,
    about = "Spectral and wave computations on weighted networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print vertex measures and structural predicates as JSON.
    Info {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Assemble the spectrum of the Laplacian up to band K.
    Spectrum {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        bands: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run residual checks; exit status 1 if any fails.
    Verify(VerifyArgs),
    /// Propagate initial data and write a wave trace CSV.
    Wave(WaveArgs),
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
    suite: String,
    #[arg(long, default_value_t = 256)]
    grid: usize,
    #[arg(long, default_value_t = 3)]
    bands: usize,
    #[arg(long, default_value_t = 2.0)]
    tau_max: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WaveArgs {
    #[arg(long)]
    graph: PathBuf,
    /// `eigen:n:index`, `constant` or `random`.
    #[arg(long)]
    init: String,
    /// Initial velocity, same forms as `--init`; zero when omitted.
    #[arg(long)]
    velocity: Option<String>,
    #[arg(long, default_value_t = 2.0)]
    tau_max: f64,
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// Number of time steps written after `tau = 0`.
    #[arg(long, default_value_t = 16)]
    frames: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn load(path: &Path) -> Result<Network, Error> {
    let text = fs::read_to_string(path)?;
    Network::parse(&text)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(command: Command) -> Result<bool, Error> {
    match command {
        Command::Info { graph } => {
            let net = load(&graph)?;
            emit(&to_json(&structure_json(&net))?, None)?;
        }
        Command::Spectrum { graph, bands, out } => {
            let net = load(&graph)?;
            let report = spectrum_report(&net, bands)?;
            for d in report.diagnostics() {
                eprintln!("note: {d}");
            }
            emit(&to_json(&spectrum_json(&net, &report))?, out.as_deref())?;
        }
        Command::Verify(args) => {
            let net = load(&args.graph)?;
            let params = VerifyParams {
                grid: args.grid,
                bands: args.bands,
                tau_max: args.tau_max,
                seed: args.seed,
                ..VerifyParams::default()
            };
            let report = run_suite(&net, args.suite.parse()?, params)?;
            for c in report.failures() {
                eprintln!(
                    "FAIL {}: residual {:?} > {:e}{}",
                    c.name,
                    c.residual,
                    c.tolerance,
                    c.reason.as_deref().map(|r| format!(" ({r})")).unwrap_or_default()
                );
            }
            emit(&to_json(&report)?, args.out.as_deref())?;
            return Ok(report.pass);
        }
        Command::Wave(args) => wave(args)?,
    }
    Ok(true)
}

fn initial<'a>(net: &'a Network, spec: &str, n: usize, seed: u64) -> Result<SampledEdgeFunction<'a>, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["constant"] => SampledEdgeFunction::constant(net, n, Complex64::new(1.0, 0.0)),
        ["random"] => random_sampled(net, n, &mut rng(seed)),
        ["zero"] => SampledEdgeFunction::zeros(net, n),
        ["eigen", band, index] => {
            let band: usize = band
                .parse()
                .map_err(|_| Error::Domain(format!("bad band in '{spec}'")))?;
            let index: usize = index
                .parse()
                .map_err(|_| Error::Domain(format!("bad index in '{spec}'")))?;
            let report = spectrum_report(net, band)?;
            let group = report.group(band);
            let pair = group.get(index).ok_or_else(|| {
                Error::Domain(format!(
                    "'{spec}': group {band} has {} eigenfunctions",
                    group.len()
                ))
            })?;
            pair.eigenfunction.sample(n)
        }
        _ => Err(Error::Domain(format!(
            "initial data '{spec}' must be eigen:n:index, constant, random or zero"
        ))),
    }
}

fn wave(args: WaveArgs) -> Result<(), Error> {
    let net = load(&args.graph)?;
    if args.frames == 0 {
        return Err(Error::Domain("--frames must be positive".into()));
    }
    if !(args.tau_max.is_finite() && args.tau_max >= 0.0) {
        return Err(Error::Domain(format!("--tau-max {} must be >= 0", args.tau_max)));
    }
    let n = args.grid;
    let f0 = initial(&net, &args.init, n, args.seed)?;
    let f1 = match &args.velocity {
        Some(spec) => initial(&net, spec, n, args.seed.wrapping_add(1))?,
        None => SampledEdgeFunction::zeros(&net, n)?,
    };
    // largest aligned time not beyond --tau-max
    let last = (args.tau_max * n as f64 + 1e-9).floor() as i64;
    let mut frames = Vec::with_capacity(args.frames + 1);
    let mut previous = None;
    for i in 0..=args.frames {
        // frame times rounded to the grid; coinciding ones are written once
        let steps = (last as f64 * i as f64 / args.frames as f64).round() as i64;
        if previous == Some(steps) {
            continue;
        }
        previous = Some(steps);
        let tau = steps as f64 / n as f64;
        frames.push((tau, wave_solution(&net, &f0, &f1, tau)?));
    }
    let mut w = io::BufWriter::new(fs::File::create(&args.out)?);
    write_wave_csv(&mut w, &frames)?;
    w.flush()?;
    Ok(())
}
