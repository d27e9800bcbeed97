//! `genus0` command-line front end.

mod commands;
mod system;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(name = "genus0", version, about = "Analysis of planar birational maps preserving a genus-0 fibration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    /// Built-in map: br, saito, nostra, pal1 .. pal6.
    #[arg(long, conflicts_with = "spec")]
    pub builtin: Option<String>,
    /// Map specification file (TOML).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Value of the parameter `a`.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Value of the parameter `b`.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run fiber sweeps on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full pipeline over a grid of levels.
    Analyze {
        #[command(flatten)]
        sys: SystemArgs,
        /// Levels (exact scalars); overrides the grid of the spec file.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        h: Vec<String>,
        /// Random starts per fiber for the orbit cross-check (0 disables it).
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Lie symmetry, invariant measure and their checks.
    Symmetry {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// The Möbius map on the fibers and its classification at given levels.
    Mobius {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        h: Vec<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Iterates the map and dumps the orbit.
    Orbit {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, allow_hyphen_values = true, requires = "y", conflicts_with_all = ["h", "t"])]
        x: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "x")]
        y: Option<String>,
        /// Start at the point of parameter `t` on the fiber `h`.
        #[arg(long, allow_hyphen_values = true, requires = "t")]
        h: Option<String>,
        #[arg(long, allow_hyphen_values = true, requires = "h")]
        t: Option<String>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// `exact` or `float`; defaults to the spec file's mode.
        #[arg(long)]
        mode: Option<String>,
        /// Orbit points as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Rotation number profile over levels.
    Rotation {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        h: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        from: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<f64>,
        #[arg(long, default_value_t = 21)]
        samples: usize,
        /// Also estimate θ from orbits of this many steps.
        #[arg(long)]
        estimate: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Level with rotation number q/p and the bound on minimal periods.
    Periods {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Conjugation between two maps, assembled fiber by fiber.
    Conjugate {
        /// Source map: spec file or built-in name.
        #[arg(long)]
        f: String,
        /// Target map: spec file or built-in name.
        #[arg(long)]
        g: String,
        /// Level correspondence `k = f(h)`, an expression in `h`.
        #[arg(long, requires = "m", conflicts_with = "auto")]
        level: Option<String>,
        /// Conjugator `m_h`, an expression in `t` and `h`.
        #[arg(long, requires = "level")]
        m: Option<String>,
        /// Find the level correspondence and the conjugator.
        #[arg(long)]
        auto: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Invariant suite on the built-ins (or one of them).
    Verify {
        #[arg(long)]
        builtin: Option<String>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Parse(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage error: {s}"),
            CliError::Parse(s) => write!(f, "parse error: {s}"),
            CliError::Failed(s) => write!(f, "error: {s}"),
        }
    }
}

/// A finished report and whether every check in it passed.
pub struct Outcome {
    pub report: Value,
    pub passed: bool,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("GENUS0_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("GENUS0_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Failed(e.to_string()))
}

fn emit(out: &OutArgs, outcome: &Outcome) -> Result<(), CliError> {
    match &out.out {
        Some(path) => genus0::report::write(path, &outcome.report)
            .map_err(|e| CliError::Failed(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{}", genus0::report::render(&outcome.report));
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let (out, outcome) = match cli.command {
        Command::Analyze { sys, h, trials, out } => {
            let o = commands::analyze(&sys, &h, trials, &out)?;
            (out, o)
        }
        Command::Symmetry { sys, out } => (out, commands::symmetry(&sys)?),
        Command::Mobius { sys, h, out } => {
            let o = commands::mobius(&sys, &h, &out)?;
            (out, o)
        }
        Command::Orbit { sys, x, y, h, t, steps, mode, csv, out } => {
            let start = match (x, y, h, t) {
                (Some(x), Some(y), None, None) => commands::Start::Point(x, y),
                (None, None, Some(h), Some(t)) => commands::Start::Fiber(h, t),
                _ => return Err(CliError::Usage("give either --x/--y or --h/--t".into())),
            };
            (out, commands::orbit(&sys, start, steps, mode.as_deref(), csv.as_deref())?)
        }
        Command::Rotation { sys, h, from, to, samples, estimate, out } => {
            let o = commands::rotation(&sys, &h, from, to, samples, estimate, &out)?;
            (out, o)
        }
        Command::Periods { sys, p, q, out } => (out, commands::periods(&sys, p, q)?),
        Command::Conjugate { f, g, level, m, auto, out } => {
            let given = level.zip(m);
            if given.is_none() && !auto {
                return Err(CliError::Usage("conjugate needs --auto or both --level and --m".into()));
            }
            (out, commands::conjugate(&f, &g, given)?)
        }
        Command::Verify { builtin, trials, out } => {
            let o = commands::verify(builtin.as_deref(), trials, &out)?;
            (out, o)
        }
    };
    emit(&out, &outcome)?;
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed; see the report");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
