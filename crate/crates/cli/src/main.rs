mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use tmsv_metrology::estimator::{crlb_check, ExperimentConfig};
use tmsv_metrology::figures::{self, linspace, Table};
use tmsv_metrology::Squeezing;

use config::{parse_f64, parse_list, parse_u64, FileSettings};

/// Precision of loss estimation with two-mode squeezed light.
///
/// Each subcommand writes one CSV table (or a JSON report for `estimate`).
/// Settings may come from a key=value file given with --config; flags win.
#[derive(Parser, Debug)]
#[command(name = "absorb", version)]
struct Cli {
    /// Flat key=value file mirroring the flags.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entangled-ancilla bound and coherent standard limit against n̄.
    Fig2(Flags),
    /// Entangled-ancilla bound and time-reversal readout against n̄.
    Fig4(Flags),
    /// QFI ratio of squeezed vacuum to coherent light against impurity loss α₀.
    Fig6(Flags),
    /// Time-reversal precision against n̄ for a list of impurity losses.
    Fig7(Flags),
    /// Monte Carlo maximum-likelihood runs compared with the Cramér-Rao bound.
    Estimate(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// Sample loss fraction α.
    #[arg(long)]
    alpha: Option<String>,
    /// Photons per beam from the source.
    #[arg(long, conflicts_with = "r")]
    nbar: Option<String>,
    /// Squeezing strength; n̄ = sinh²r.
    #[arg(long)]
    r: Option<String>,
    /// Impurity loss; a comma-separated list for fig7.
    #[arg(long)]
    alpha0: Option<String>,
    /// Number of sweep points.
    #[arg(long)]
    points: Option<String>,
    /// Sweep start.
    #[arg(long)]
    from: Option<String>,
    /// Sweep end.
    #[arg(long)]
    to: Option<String>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Shots per trial.
    #[arg(long)]
    shots: Option<String>,
    /// Independent repetitions.
    #[arg(long)]
    trials: Option<String>,
}

impl Flags {
    fn get(&self, key: &str) -> Option<&str> {
        match key {
            "alpha" => self.alpha.as_deref(),
            "nbar" => self.nbar.as_deref(),
            "r" => self.r.as_deref(),
            "alpha0" => self.alpha0.as_deref(),
            "points" => self.points.as_deref(),
            "from" => self.from.as_deref(),
            "to" => self.to.as_deref(),
            "out" => self.out.as_deref(),
            "seed" => self.seed.as_deref(),
            "shots" => self.shots.as_deref(),
            "trials" => self.trials.as_deref(),
            _ => None,
        }
    }
}

/// Flag values layered over file values.
struct Settings<'a> {
    command: &'static str,
    flags: &'a Flags,
    file: FileSettings,
}

impl Settings<'_> {
    fn restrict(&self, allowed: &[&str]) -> Result<()> {
        for key in config::KEYS {
            if self.flags.get(key).is_some() && !allowed.contains(key) {
                bail!("--{key} does not apply to `{}`", self.command);
            }
        }
        Ok(())
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.flags.get(key).or_else(|| self.file.get(key))
    }

    fn f64(&self, key: &str, default: f64) -> Result<f64> {
        self.raw(key).map_or(Ok(default), |v| parse_f64(key, v))
    }

    fn u64(&self, key: &str, default: u64) -> Result<u64> {
        self.raw(key).map_or(Ok(default), |v| parse_u64(key, v))
    }

    /// `--nbar` or `--r`, flags before file; both in the file is an error.
    fn nbar(&self, default: f64) -> Result<f64> {
        let from_r = |raw: &str| -> Result<f64> { Ok(Squeezing::from_r(parse_f64("r", raw)?)?.nbar()) };
        if let Some(v) = self.flags.nbar.as_deref() {
            return parse_f64("nbar", v);
        }
        if let Some(v) = self.flags.r.as_deref() {
            return from_r(v);
        }
        match (self.file.get("nbar"), self.file.get("r")) {
            (Some(_), Some(_)) => bail!("config sets both `nbar` and `r`; they are mutually exclusive"),
            (Some(v), None) => parse_f64("nbar", v),
            (None, Some(v)) => from_r(v),
            (None, None) => Ok(default),
        }
    }

    fn sweep(&self, from: f64, to: f64, points: u64) -> Result<Vec<f64>> {
        let points = self.u64("points", points)?;
        Ok(linspace(self.f64("from", from)?, self.f64("to", to)?, points as usize)?)
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match self.raw("out") {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("cannot create {path}"))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn emit_table(&self, table: &Table) -> Result<()> {
        let mut out = self.sink()?;
        table.write_csv(&mut out)?;
        out.flush()?;
        Ok(())
    }
}

const SWEEP_NBAR: &[&str] = &["alpha", "points", "from", "to", "out"];

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => FileSettings::load(path)?,
        None => FileSettings::default(),
    };
    let (command, flags) = match &cli.command {
        Command::Fig2(f) => ("fig2", f),
        Command::Fig4(f) => ("fig4", f),
        Command::Fig6(f) => ("fig6", f),
        Command::Fig7(f) => ("fig7", f),
        Command::Estimate(f) => ("estimate", f),
    };
    let s = Settings { command, flags, file };
    match command {
        "fig2" | "fig4" => {
            s.restrict(SWEEP_NBAR)?;
            let alpha = s.f64("alpha", 0.05)?;
            let nbars = s.sweep(1.0, 25.0, 25)?;
            let table = if command == "fig2" {
                figures::fig2(alpha, &nbars)?
            } else {
                figures::fig4(alpha, &nbars)?
            };
            s.emit_table(&table)
        }
        "fig6" => {
            s.restrict(&["alpha", "nbar", "r", "points", "from", "to", "out"])?;
            let alpha0s = s.sweep(0.0, 0.9, 91)?;
            s.emit_table(&figures::fig6(s.f64("alpha", 0.05)?, s.nbar(25.0)?, &alpha0s)?)
        }
        "fig7" => {
            s.restrict(&["alpha", "alpha0", "points", "from", "to", "out"])?;
            let alpha0s = match s.raw("alpha0") {
                Some(v) => parse_list("alpha0", v)?,
                None => vec![0.0, 0.05, 0.25, 0.5],
            };
            let nbars = s.sweep(5.0, 25.0, 21)?;
            s.emit_table(&figures::fig7(s.f64("alpha", 0.05)?, &alpha0s, &nbars)?)
        }
        _ => {
            s.restrict(&["alpha", "nbar", "r", "seed", "shots", "trials", "out"])?;
            let config = ExperimentConfig::new(
                s.nbar(5.0)?,
                s.f64("alpha", 0.1)?,
                s.u64("shots", 10_000)?,
                s.u64("trials", 200)?,
                s.u64("seed", 42)?,
            )?;
            let report = crlb_check(&config)?;
            let mut out = s.sink()?;
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("error: invalid arguments"));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
