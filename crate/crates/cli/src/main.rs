//! `leakctl`: runs the leakage-suppression scenarios from a JSON config and
//! writes CSV tables plus a JSON summary.
//!
//! Exit codes: 0 success, 1 output I/O failure, 2 configuration error,
//! 3 integration, optimisation or fit failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_quantity, AxisConfig, Config, Quantity};

#[derive(Parser, Debug)]
#[command(name = "leakctl", version, about = "Static parameter offset leakage suppression toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration file; may also be given positionally.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads; 0 or unset uses all cores.
    #[arg(long, global = true, env = "LEAKCTL_THREADS")]
    threads: Option<usize>,
    /// Points per axis of the optimiser's seed grid.
    #[arg(long, global = true)]
    seed_grid: Option<usize>,
    /// Integrator time steps.
    #[arg(long, global = true)]
    steps: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Uncorrected and tuned fidelities with population trajectories.
    Run(Common),
    /// One- or two-parameter offset sweep, with a quadratic fit in 1D.
    Sweep(SweepArgs),
    /// Offset optimisation.
    Optimize(Common),
    /// Tolerance panels around the tuned offsets, and offset quantisation.
    Robustness(Common),
    /// Trajectory versus single-pulse Hadamard under ZZ crosstalk.
    Gtc(Common),
    /// Uncorrected, DRAG and tuned-offset fidelities with decoherence.
    Drag(Common),
    /// First-order Magnus residuals and error-propagator diagnostics.
    Framework(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON configuration file.
    file: Option<PathBuf>,
    /// Scenario override: not, hadamard, iswap, stirap, gtc or rabi.
    #[arg(long)]
    scenario: Option<String>,
    /// Objective override: leak_free, trace, averaged or decoherent.
    #[arg(long)]
    objective: Option<String>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Swept offset: amp, det or phase.
    #[arg(long)]
    param: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Second swept offset for a 2D map.
    #[arg(long)]
    param2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lo2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    hi2: Option<String>,
    #[arg(long)]
    n2: Option<usize>,
}

/// Why a command failed, mapped onto the exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl Failure {
    fn config(msg: impl std::fmt::Display) -> Self {
        Failure::Config(leakctl_core::Error::Config(msg.to_string()).to_string())
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
        match self {
            Failure::Config(m) | Failure::Numerical(m) => f.write_str(m),
            Failure::Io(m) => write!(f, "output error: {m}"),
        }
    }
}

impl From<leakctl_core::Error> for Failure {
    fn from(e: leakctl_core::Error) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("leakctl: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn execute(cli: Cli) -> Result<Vec<PathBuf>, Failure> {
    if let Some(n) = cli.threads.filter(|n| *n > 0) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::config(format!("cannot start {n} threads: {e}")))?;
    }
    let common = match &cli.command {
        Command::Run(c)
        | Command::Optimize(c)
        | Command::Robustness(c)
        | Command::Gtc(c)
        | Command::Drag(c)
        | Command::Framework(c) => c,
        Command::Sweep(s) => &s.common,
    };
    let path = match (&common.file, &cli.config) {
        (Some(_), Some(_)) => return Err(Failure::config("give the config either positionally or via --config")),
        (a, b) => a.as_ref().or(b.as_ref()),
    };
    let mut cfg = match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = &common.scenario {
        cfg.scenario = s.clone();
    }
    if let Some(o) = &common.objective {
        cfg.objective = serde_json::from_value(serde_json::Value::String(o.clone()))
            .map_err(|_| Failure::config(format!("unknown objective `{o}`")))?;
    }
    if let Some(n) = cli.seed_grid {
        cfg.seed_grid = n;
    }
    if let Some(n) = cli.steps {
        cfg.steps = Some(n);
    }
    if let Command::Sweep(a) = &cli.command {
        apply_sweep_flags(&mut cfg, a)?;
    }
    cfg.validate()?;
    let stem = path
        .and_then(|p| p.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| cfg.scenario.clone());
    let mut sink = output::Sink::new(&cli.out, &stem)?;
    match &cli.command {
        Command::Run(_) => commands::run(&cfg, &mut sink)?,
        Command::Sweep(_) => commands::sweep(&cfg, &mut sink)?,
        Command::Optimize(_) => commands::optimize(&cfg, &mut sink)?,
        Command::Robustness(_) => commands::robustness(&cfg, &mut sink)?,
        Command::Gtc(_) => commands::gtc(&cfg, &mut sink)?,
        Command::Drag(_) => commands::drag(&cfg, &mut sink)?,
        Command::Framework(_) => commands::framework(&cfg, &mut sink)?,
    }
    Ok(sink.written)
}

fn quantity(flag: &str, text: &str) -> Result<Quantity, Failure> {
    parse_quantity(text).map(Quantity).map_err(|e| Failure::config(format!("--{flag}: {e}")))
}

fn param(flag: &str, text: &str) -> Result<leakctl_core::tuneup::SweepParam, Failure> {
    leakctl_core::tuneup::SweepParam::parse(text).map_err(|e| Failure::config(format!("--{flag}: {e}")))
}

fn apply_sweep_flags(cfg: &mut Config, a: &SweepArgs) -> Result<(), Failure> {
    let x = &mut cfg.sweep.x;
    if let Some(p) = &a.param {
        x.param = param("param", p)?;
    }
    if let Some(v) = &a.lo {
        x.lo = quantity("lo", v)?;
    }
    if let Some(v) = &a.hi {
        x.hi = quantity("hi", v)?;
    }
    if let Some(n) = a.n {
        x.n = n;
    }
    if let Some(p) = &a.param2 {
        let (lo, hi, n) = match (&a.lo2, &a.hi2, a.n2) {
            (Some(lo), Some(hi), Some(n)) => (quantity("lo2", lo)?, quantity("hi2", hi)?, n),
            _ => return Err(Failure::config("--param2 needs --lo2, --hi2 and --n2")),
        };
        cfg.sweep.y = Some(AxisConfig { param: param("param2", p)?, lo, hi, n });
    } else if a.lo2.is_some() || a.hi2.is_some() || a.n2.is_some() {
        return Err(Failure::config("--lo2, --hi2 and --n2 need --param2"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use leakctl_core::Error;

    #[test]
    fn exit_codes_follow_error_kind() {
        assert_eq!(Failure::from(Error::Config("x".into())).code(), 2);
        assert_eq!(Failure::from(Error::Label("x".into())).code(), 2);
        assert_eq!(Failure::from(Error::Integration("x".into())).code(), 3);
        assert_eq!(Failure::from(Error::Opt("x".into())).code(), 3);
        assert_eq!(Failure::from(Error::Fit("x".into())).code(), 3);
        assert_eq!(Failure::Io("x".into()).code(), 1);
    }

    #[test]
    fn negative_literals_parse_as_values() {
        let cli = Cli::try_parse_from(["leakctl", "sweep", "--lo", "-0.15pi", "--hi", "0.15pi", "--n", "41"]).unwrap();
        match cli.command {
            Command::Sweep(a) => assert_eq!(a.lo.as_deref(), Some("-0.15pi")),
            _ => panic!("expected sweep"),
        }
    }
}
