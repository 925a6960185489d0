use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand, ValueEnum};
use sral::commands::{self, CommandError, ElemAction, ExitCode, Output, PairArgs};
use sral::verify::{RunConfig, DEFAULT_BUDGET, DEFAULT_SEED};
use sral_core::families::DEFAULT_DELTA;
use sral_core::C64;

#[derive(Parser, Debug)]
#[command(name = "sral", version, about = "Spectral radii, radicals and elementary operators on matrix algebras")]
struct Cli {
    /// Word-evaluation cap for searches.
    #[arg(long, global = true, env = "SRAL_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Tolerance override, `name=value`; repeatable.
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    tolerances: Vec<(String, f64)>,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Joint spectral radius bracket of a family file.
    Jsr {
        family: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
    },
    /// Tensor spectral radius bracket of a family file.
    Tsr {
        family: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Elementary-operator reports.
    Elem {
        op: PathBuf,
        #[arg(value_enum)]
        action: Action,
        /// Second operator for `inclusion`.
        #[arg(long)]
        with: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-7)]
        tolerance: f64,
    },
    /// Riesz projection of a matrix for the disc around `center`.
    Riesz {
        matrix: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        center: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        center_im: f64,
        #[arg(long)]
        radius: f64,
    },
    /// Strictly triangularizing chain of a nil family (algebra file).
    Triangularize { generators: PathBuf },
    /// Product decay curve as CSV (family files for K and F).
    Decay {
        k: PathBuf,
        #[arg(long)]
        f: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 16)]
        m_max: usize,
    },
    /// Series reconstruction on the spectral subspace outside a disc.
    Pair {
        op: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long)]
        power: Option<usize>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        center: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        center_im: f64,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
        /// Matrix file with the element to test.
        #[arg(long)]
        z: Option<PathBuf>,
    },
    /// Acceptance suite.
    Verify {
        /// Criterion names (all when omitted).
        #[arg(long = "suite", value_delimiter = ',')]
        suites: Vec<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Action {
    Spec,
    Trace,
    Engel,
    Inclusion,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected name=value")?;
    let v: f64 = value.parse().map_err(|e| format!("{value}: {e}"))?;
    Ok((name.to_owned(), v))
}

fn run(cli: &Cli) -> Result<Output, CommandError> {
    match &cli.command {
        Command::Jsr { family, delta } => commands::jsr(family, *delta, cli.budget),
        Command::Tsr { family, depth } => commands::tsr(family, *depth, cli.budget, cli.seed),
        Command::Elem { op, action, with, tolerance } => {
            let action = match action {
                Action::Spec => ElemAction::Spec,
                Action::Trace => ElemAction::Trace,
                Action::Engel => ElemAction::Engel,
                Action::Inclusion => ElemAction::Inclusion,
            };
            commands::elem(op, action, with.as_deref(), *tolerance)
        }
        Command::Riesz { matrix, center, center_im, radius } => commands::riesz(matrix, C64::new(*center, *center_im), *radius),
        Command::Triangularize { generators } => commands::triangularize_cmd(generators),
        Command::Decay { k, f, lambda, m_max } => commands::decay(k, f.as_deref(), *lambda, *m_max, cli.budget),
        Command::Pair { op, p, power, center, center_im, radius, t, epsilon, z } => commands::pair(&PairArgs {
            op,
            p: *p,
            power: *power,
            center: C64::new(*center, *center_im),
            radius: *radius,
            t: *t,
            epsilon: *epsilon,
            z: z.as_deref(),
        }),
        Command::Verify { suites } => {
            let cfg = RunConfig {
                seed: cli.seed,
                budget: cli.budget,
                tolerances: cli.tolerances.iter().cloned().collect::<BTreeMap<_, _>>(),
            };
            let (out, table) = commands::verify(&cfg, suites)?;
            eprint!("{table}");
            Ok(out)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            process::exit(e.exit_code() as i32);
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &out.text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(out.text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        process::exit(ExitCode::Input as i32);
    }
    process::exit(out.code as i32);
}
