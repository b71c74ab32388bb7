//! The `asi-sim` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use asi_core::{Constellation, Preprocessor, PreprocessorKind};
use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{parse_config, RunConfig};
use crate::error::{SimError, SimResult};
use crate::harness::{jml_reference_squarings, run_point, run_sweep, ExperimentPlan};
use crate::{io, report};

#[derive(Debug, Parser)]
#[command(
    name = "asi-sim",
    version,
    about = "Overloaded multi-LNB satellite receiver simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the BER sweep described by a config file.
    Simulate {
        config: PathBuf,
        /// Master seed; overrides `[run] seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; overrides `[run] output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Validate the config and report the problem size without simulating.
        #[arg(long)]
        dry_run: bool,
        /// Worker threads; overrides `[sweep] workers`.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Write the channel matrix as CSV (`re,im` pairs, one LNB per line).
    DumpChannel {
        config: PathBuf,
        /// Destination file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write W, F and H of a preprocessor at one SNR as CSV files.
    DumpPreprocessor {
        config: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, allow_negative_numbers = true)]
        snr: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the constellation points and labels as CSV.
    DumpConstellation {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print closed-form and measured squaring counts per detector.
    Complexity {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// SNR of the measurement; defaults to the first sweep point.
        #[arg(long, allow_negative_numbers = true)]
        snr: Option<f64>,
        /// Vectors to detect per detector.
        #[arg(long, default_value_t = 1_000)]
        symbols: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Mrc,
    WienerHopf,
}

impl From<Kind> for PreprocessorKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Mrc => PreprocessorKind::Mrc,
            Kind::WienerHopf => PreprocessorKind::WienerHopf,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = write!(stderr, "{}", e.render());
            return 1;
        }
        Err(e) => {
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn load(path: &Path) -> SimResult<(RunConfig, PathBuf)> {
    let text = fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
    let cfg = parse_config(&text).map_err(SimError::Config)?;
    let base = path.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf);
    Ok((cfg, base))
}

fn emit(out: &Option<PathBuf>, bytes: &[u8], stdout: &mut dyn Write) -> SimResult<()> {
    match out {
        Some(p) => io::atomic_write(p, bytes),
        None => stdout.write_all(bytes).map_err(|e| SimError::io("<stdout>", e)),
    }
}

fn say(stdout: &mut dyn Write, text: &str) -> SimResult<()> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| SimError::io("<stdout>", e))
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> SimResult<()> {
    match command {
        Command::Simulate {
            config,
            seed,
            out,
            dry_run,
            workers,
        } => {
            let (cfg, base) = load(&config)?;
            let mut plan = cfg.plan(&base, seed)?;
            if let Some(w) = workers {
                plan.workers = w;
            }
            if dry_run {
                return say(stdout, &describe(&plan));
            }
            let records = run_sweep(&plan)?;
            let dir = out.unwrap_or_else(|| cfg.run.output_dir.clone());
            let csv_name = cfg.run.results_file.as_str();
            let stem = Path::new(csv_name)
                .file_stem()
                .map_or("results".into(), |s| s.to_string_lossy());
            let labels = report::detector_labels(&records);
            let summary = format!(
                "{}\n{}",
                report::ber_table(&records, plan.reference_satellite),
                report::complexity_table(
                    plan.modulation,
                    jml_reference_squarings(&plan),
                    &report::mean_squarings(&records)
                )
            );
            io::atomic_write(&dir.join(csv_name), &io::results_csv(&records))?;
            io::atomic_write(
                &dir.join(format!("{stem}.gp")),
                io::gnuplot_script(csv_name, &labels, plan.reference_satellite).as_bytes(),
            )?;
            io::atomic_write(&dir.join(format!("{stem}_summary.txt")), summary.as_bytes())?;
            say(stdout, &summary)?;
            say(
                stdout,
                &format!("results written to {}\n", dir.join(csv_name).display()),
            )
        }
        Command::DumpChannel { config, out } => {
            let (cfg, base) = load(&config)?;
            let a = cfg.channel(&base)?;
            emit(&out, &io::complex_csv(a.matrix()), stdout)
        }
        Command::DumpPreprocessor { config, kind, snr, out } => {
            let (cfg, base) = load(&config)?;
            let channel = cfg.channel(&base)?;
            let k = cfg.noise_correlation()?;
            let p = Preprocessor::build(kind.into(), &channel, channel.sigma2_for_snr(snr), &k)?;
            for (name, m) in [("W", p.w()), ("F", p.f()), ("H", p.h())] {
                io::atomic_write(&out.join(format!("{name}.csv")), &io::complex_csv(m))?;
            }
            say(stdout, &format!("wrote W.csv, F.csv and H.csv to {}\n", out.display()))
        }
        Command::DumpConstellation { config, out } => {
            let (cfg, _) = load(&config)?;
            emit(
                &out,
                &io::constellation_csv(&Constellation::new(cfg.modulation)),
                stdout,
            )
        }
        Command::Complexity {
            config,
            seed,
            snr,
            symbols,
            workers,
        } => {
            let (cfg, base) = load(&config)?;
            let mut plan = cfg.plan(&base, seed)?;
            plan.snr_points = vec![snr.unwrap_or(plan.snr_points[0])];
            plan.min_symbols = symbols;
            plan.max_symbols = symbols;
            if let Some(w) = workers {
                plan.workers = w;
            }
            plan.validate()?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(plan.workers)
                .build()
                .map_err(|e| SimError::Pool(e.to_string()))?;
            let records = pool.install(|| run_point(&plan, 0))?;
            let header = format!(
                "{} vectors at {} dB, {}\n",
                symbols, plan.snr_points[0], plan.modulation
            );
            say(stdout, &header)?;
            say(
                stdout,
                &report::complexity_table(
                    plan.modulation,
                    jml_reference_squarings(&plan),
                    &report::mean_squarings(&records),
                ),
            )
        }
    }
}

fn describe(plan: &ExperimentPlan) -> String {
    let a = plan.channel.matrix();
    let labels: Vec<String> = plan.detectors.iter().map(|d| d.label()).collect();
    format!(
        "config OK\nchannel A: {} x {} ({} LNBs, {} satellites)\nconstellation: {}\ndetectors: {}\nSNR points: {}\nseed: {}\n",
        a.rows(),
        a.cols(),
        a.rows(),
        a.cols(),
        plan.modulation,
        labels.join(", "),
        plan.snr_points.len(),
        plan.master_seed
    )
}
