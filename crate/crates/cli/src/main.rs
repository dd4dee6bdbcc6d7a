use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod table;

use config::FileConfig;
use fredkin_core::sweep::{Grid, Spacing};
use fredkin_core::LossPlacement;
use table::{Format, Table};

#[derive(Parser, Debug)]
#[command(name = "fredkin", version, about = "Optical Fredkin gate and Deutsch machine experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Action of the Fredkin gate on the three-mode basis.
    Truthtable(Output),
    /// Output of one lossy Fredkin gate on a basis state.
    LossyGate {
        #[arg(long)]
        gamma: Option<f64>,
        /// before-kerr, after-kerr or split
        #[arg(long)]
        placement: Option<String>,
        /// Three-mode input label such as 101.
        #[arg(long)]
        input: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Machine error against photon loss, with and without dual-rail post-selection.
    SweepLoss {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        placement: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Machine error against Kerr dephasing, with and without projective correction.
    SweepDephasing {
        #[command(flatten)]
        grid: GridArgs,
        /// Use this many Monte-Carlo phase samples per gate instead of the exact average.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Project after the second gate as well.
        #[arg(long)]
        ec_after_both: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Compare the Monte-Carlo dephased gate with the exact one.
    McValidate {
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: Output,
    },
    /// Dephasing strength from Kerr-cell resonance and photon flux.
    LambdaPhysical {
        /// Resonant frequency in 1/s.
        #[arg(long)]
        omega: Option<f64>,
        /// Photon flux in photons/s.
        #[arg(long)]
        intensity: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// key = value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long)]
    grid_start: Option<f64>,
    #[arg(long)]
    grid_stop: Option<f64>,
    #[arg(long)]
    grid_count: Option<usize>,
    #[arg(long, conflicts_with = "linear")]
    log: bool,
    #[arg(long)]
    linear: bool,
}

pub enum Failure {
    Usage(String),
    Validation(String),
}

impl From<fredkin_core::Error> for Failure {
    fn from(e: fredkin_core::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Validation(format!("write failed: {e}"))
    }
}

/// Command-line value, else config file value, else default.
pub fn pick<T>(flag: Option<T>, file: &FileConfig, key: &str, default: T) -> Result<T, Failure>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(v),
        None => Ok(file.get(key).map_err(Failure::Usage)?.unwrap_or(default)),
    }
}

fn load_config(out: &Output) -> Result<FileConfig, Failure> {
    match &out.config {
        Some(p) => FileConfig::load(p).map_err(Failure::Usage),
        None => Ok(FileConfig::default()),
    }
}

fn resolve_grid(args: &GridArgs, file: &FileConfig) -> Result<Grid, Failure> {
    let d = Grid::default();
    let spacing = if args.log {
        Spacing::Log
    } else if args.linear {
        Spacing::Linear
    } else {
        match file.raw("spacing") {
            None => d.spacing,
            Some("log") => Spacing::Log,
            Some("linear") => Spacing::Linear,
            Some(other) => return Err(Failure::Usage(format!("config key 'spacing': unknown value '{other}'"))),
        }
    };
    Ok(Grid {
        start: pick(args.grid_start, file, "grid-start", d.start)?,
        stop: pick(args.grid_stop, file, "grid-stop", d.stop)?,
        count: pick(args.grid_count, file, "grid-count", d.count)?,
        spacing,
    })
}

fn resolve_placement(flag: &Option<String>, file: &FileConfig, default: LossPlacement) -> Result<LossPlacement, Failure> {
    match flag.as_deref().or(file.raw("placement")) {
        None => Ok(default),
        Some(s) => s.parse().map_err(|e: fredkin_core::Error| Failure::Usage(e.to_string())),
    }
}

fn resolve_format(out: &Output, file: &FileConfig) -> Result<Format, Failure> {
    match out.format {
        Some(f) => Ok(f),
        None => match file.raw("format") {
            None => Ok(Format::Csv),
            Some(s) => Format::from_str(s, false).map_err(|_| Failure::Usage(format!("config key 'format': unknown value '{s}'"))),
        },
    }
}

/// Rows plus named checks; any failed check makes the exit status 1.
pub struct Report {
    pub table: Table,
    pub checks: Vec<(String, bool)>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(table: Table) -> Self {
        Self { table, checks: Vec::new(), notes: Vec::new() }
    }

    pub fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push((name.into(), ok));
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let out_args = match &cli.command {
        Command::Truthtable(o) => o,
        Command::LossyGate { out, .. }
        | Command::SweepLoss { out, .. }
        | Command::SweepDephasing { out, .. }
        | Command::McValidate { out, .. }
        | Command::LambdaPhysical { out, .. } => out,
    };
    let file = load_config(out_args)?;
    let format = resolve_format(out_args, &file)?;
    let out_path = match &out_args.out {
        Some(p) => Some(p.clone()),
        None => file.raw("out").map(PathBuf::from),
    };

    let report = match &cli.command {
        Command::Truthtable(_) => commands::truthtable()?,
        Command::LossyGate { gamma, placement, input, .. } => {
            let gamma = pick(*gamma, &file, "gamma", 0.1)?;
            let placement = resolve_placement(placement, &file, LossPlacement::AfterKerr)?;
            let input = pick(input.clone(), &file, "input", "101".to_string())?;
            commands::lossy_gate(gamma, placement, &input)?
        }
        Command::SweepLoss { grid, placement, .. } => {
            let grid = resolve_grid(grid, &file)?;
            let placement = resolve_placement(placement, &file, LossPlacement::BeforeKerr)?;
            commands::sweep_loss(&grid, placement)?
        }
        Command::SweepDephasing { grid, samples, seed, ec_after_both, .. } => {
            let grid = resolve_grid(grid, &file)?;
            let samples = match samples {
                Some(n) => Some(*n),
                None => file.get("samples").map_err(Failure::Usage)?,
            };
            let seed = pick(*seed, &file, "seed", commands::DEFAULT_SEED)?;
            let both = *ec_after_both || pick(None, &file, "ec-after-both", false)?;
            commands::sweep_dephasing(&grid, samples, seed, both)?
        }
        Command::McValidate { lambda, samples, seed, .. } => {
            let lambda = pick(*lambda, &file, "lambda", 0.1)?;
            let samples = pick(*samples, &file, "samples", 100_000)?;
            let seed = pick(*seed, &file, "seed", commands::DEFAULT_SEED)?;
            commands::mc_validate(lambda, samples, seed)?
        }
        Command::LambdaPhysical { omega, intensity, .. } => {
            let omega = pick(*omega, &file, "omega", f64::NAN)?;
            let intensity = pick(*intensity, &file, "intensity", f64::NAN)?;
            if omega.is_nan() || intensity.is_nan() {
                return Err(Failure::Usage("lambda-physical needs --omega and --intensity".into()));
            }
            commands::lambda_physical(omega, intensity)?
        }
    };

    match out_path {
        Some(p) => {
            let f = File::create(&p).map_err(|e| Failure::Validation(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(f);
            report.table.write(format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            report.table.write(format, &mut lock)?;
        }
    }
    for n in &report.notes {
        eprintln!("{n}");
    }
    let failed: Vec<_> = report.checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(format!("{} check(s) failed: {}", failed.len(), failed.join("; "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
