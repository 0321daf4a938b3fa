use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use symkit_cli::ast::{ProblemFile, SymmetryFile};
use symkit_cli::{commands, parse_lambda_list, parse_problem, parse_symmetry, render_json, CliError, Outcome, Overrides};

#[derive(Parser)]
#[command(name = "symkit", version, about = "Exact generalized symmetries of PDEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Symmetries of the equation in a .pde file.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        opts: TaskOpts,
    },
    /// Adjoint action of the translations on the symmetry space.
    Adjoint {
        file: PathBuf,
        #[command(flatten)]
        opts: TaskOpts,
    },
    /// Bracket of two stored symmetries.
    Bracket {
        first: PathBuf,
        second: PathBuf,
        #[command(flatten)]
        out: OutOpts,
    },
    /// Built-in study of the free Schrodinger equation.
    Schrodinger {
        #[arg(long, default_value_t = 4)]
        qmax: usize,
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        out: OutOpts,
    },
    /// Evolutionary symmetries of an evolution equation (heat equation by default).
    Evolution {
        file: Option<PathBuf>,
        #[command(flatten)]
        opts: TaskOpts,
    },
}

#[derive(Args)]
struct OutOpts {
    /// Write JSON to this path, `-` for stdout.
    #[arg(long)]
    json: Option<String>,
}

#[derive(Args)]
struct TaskOpts {
    #[arg(short = 'q', long = "order")]
    order: Option<usize>,
    /// Exponential weights, e.g. `0, i, (1, 2)`.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Degree caps, comma separated.
    #[arg(long)]
    caps: Option<String>,
    /// Re-check every symmetry with the residual oracle.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    out: OutOpts,
}

impl TaskOpts {
    fn overrides(&self) -> Result<Overrides, CliError> {
        let lambda = match &self.lambda {
            Some(s) => Some(parse_lambda_list(s).map_err(|e| CliError::syntax("--lambda", e))?),
            None => None,
        };
        let caps = match &self.caps {
            Some(s) => Some(
                s.trim_matches(|c| c == '[' || c == ']')
                    .split(',')
                    .map(|c| c.trim().parse::<u32>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| CliError::Input(format!("--caps: {e}")))?,
            ),
            None => None,
        };
        Ok(Overrides {
            order: self.order,
            lambda,
            caps,
            verify: self.verify,
        })
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn problem(path: &Path) -> Result<ProblemFile, CliError> {
    parse_problem(&read(path)?).map_err(|e| CliError::syntax(&path.display().to_string(), e))
}

fn symmetry(path: &Path) -> Result<SymmetryFile, CliError> {
    parse_symmetry(&read(path)?).map_err(|e| CliError::syntax(&path.display().to_string(), e))
}

fn emit(outcome: &Outcome, json: &Option<String>) -> Result<(), CliError> {
    let doc = render_json(&outcome.json);
    match json.as_deref() {
        Some("-") => print!("{doc}"),
        Some(path) => {
            print!("{}", outcome.text);
            std::fs::write(path, doc).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
            info!("wrote {path}");
        }
        None => print!("{}", outcome.text),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (outcome, json) = match &cli.command {
        Command::Solve { file, opts } => (commands::solve(&problem(file)?, &opts.overrides()?)?, &opts.out.json),
        Command::Adjoint { file, opts } => (commands::adjoint(&problem(file)?, &opts.overrides()?)?, &opts.out.json),
        Command::Bracket { first, second, out } => (commands::bracket(&symmetry(first)?, &symmetry(second)?)?, &out.json),
        Command::Schrodinger { qmax, verify, out } => (commands::schrodinger(*qmax, *verify)?, &out.json),
        Command::Evolution { file, opts } => {
            let f = file.as_deref().map(problem).transpose()?;
            (commands::evolution(f.as_ref(), &opts.overrides()?)?, &opts.out.json)
        }
    };
    emit(&outcome, json)?;
    Ok(outcome.ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("SYMKIT_LOG")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: a verification check failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
