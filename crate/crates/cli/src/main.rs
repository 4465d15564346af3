//! Job-file driven command-line front end for the certification pipeline.
//!
//! Exit codes: 0 = all verifications passed; 1 = a mathematical verification
//! failed (the certificate is still written, with the failure transcript);
//! 2 = input or parse error; 3 = resource or solver error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use geodete_core::error::Error;
use geodete_core::job::{parse_job, run_job, JobSpec, Stage};
use geodete_core::{catalog, DEFAULT_ENUMERATION_BOUND};

const EXIT_VERIFICATION_FAILED: u8 = 1;
const EXIT_INPUT_ERROR: u8 = 2;
const EXIT_RESOURCE_ERROR: u8 = 3;

/// Certifies extensions of finite group actions on hyperbolic surfaces to
/// isometric actions on hyperbolic 3-manifolds.
#[derive(Parser)]
#[command(name = "geodete", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the action and verify the extension's kernel is torsion-free.
    Verify(JobArgs),
    /// Search for actions of the signature on the group and report the count.
    Search(JobArgs),
    /// Verify and numerically realize the polyhedron.
    Realize(JobArgs),
    /// Run the full pipeline: verify, realize, census, corollaries.
    Census(JobArgs),
    /// Built-in example jobs.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// List the built-in jobs.
    List,
    /// Run a built-in job by name.
    Run {
        name: String,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args)]
struct JobArgs {
    /// Path to the TOML job file.
    job: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct Overrides {
    /// Seed for the realization solver (overrides the job file).
    #[arg(long)]
    seed: Option<u64>,
    /// Solver residual tolerance (overrides the job file).
    #[arg(long)]
    tol: Option<f64>,
    /// Group enumeration bound (overrides the job file and
    /// GEODETE_MAX_GROUP_ORDER).
    #[arg(long)]
    max_group_order: Option<usize>,
    /// Certificate output path (overrides the job file).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace the job's stage list (repeatable).
    #[arg(long = "stage")]
    stages: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => {
            run_from_file(&args.job, &args.overrides, Some(&[Stage::Validate, Stage::ExtendT1, Stage::ExtendT2]))
        }
        Command::Search(args) => run_from_file(&args.job, &args.overrides, Some(&[Stage::Validate])),
        Command::Realize(args) => run_from_file(
            &args.job,
            &args.overrides,
            Some(&[Stage::Validate, Stage::ExtendT1, Stage::ExtendT2, Stage::Realize]),
        ),
        Command::Census(args) => run_from_file(&args.job, &args.overrides, None),
        Command::Catalog { command } => match command {
            CatalogCommand::List => {
                for name in catalog::names() {
                    println!("{name}");
                }
                return ExitCode::SUCCESS;
            }
            CatalogCommand::Run { name, overrides } => match catalog::job(&name) {
                Some(text) => run_from_text(text, &name, &overrides, None),
                None => {
                    eprintln!("unknown catalog entry {name:?}; see `geodete catalog list`");
                    return ExitCode::from(EXIT_INPUT_ERROR);
                }
            },
        },
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::EnumerationBound { .. } | Error::Solver { .. } | Error::Internal(_) => {
            EXIT_RESOURCE_ERROR
        }
        _ => EXIT_INPUT_ERROR,
    }
}

fn run_from_file(path: &Path, overrides: &Overrides, cap: Option<&[Stage]>) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Job(format!("cannot read {}: {e}", path.display())))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "job".into());
    run_from_text(&text, &stem, overrides, cap)
}

fn run_from_text(
    text: &str,
    stem: &str,
    overrides: &Overrides,
    cap: Option<&[Stage]>,
) -> Result<ExitCode, Error> {
    let mut spec = parse_job(text)?;
    apply_overrides(&mut spec, overrides)?;
    if let Some(allowed) = cap {
        spec.stages.retain(|s| allowed.contains(s));
    }
    let outcome = run_job(&spec)?;
    for line in &outcome.summary {
        println!("{line}");
    }
    let out_path = overrides
        .out
        .clone()
        .or_else(|| spec.options.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("{stem}.cert.json")));
    std::fs::write(&out_path, &outcome.certificate)
        .map_err(|e| Error::Job(format!("cannot write {}: {e}", out_path.display())))?;
    println!("certificate written to {}", out_path.display());
    Ok(if outcome.verified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFICATION_FAILED)
    })
}

fn apply_overrides(spec: &mut JobSpec, overrides: &Overrides) -> Result<(), Error> {
    if let Some(seed) = overrides.seed {
        spec.options.seed = seed;
    }
    if let Some(tol) = overrides.tol {
        if !(tol > 0.0) {
            return Err(Error::Job("--tol must be positive".into()));
        }
        spec.options.solve_tol = tol;
    }
    if let Some(bound) = overrides.max_group_order {
        spec.options.max_group_order = bound;
    } else if let Ok(value) = std::env::var("GEODETE_MAX_GROUP_ORDER") {
        spec.options.max_group_order = value
            .parse()
            .map_err(|_| Error::Job("GEODETE_MAX_GROUP_ORDER must be an integer".into()))?;
    } else if spec.options.max_group_order == 0 {
        spec.options.max_group_order = DEFAULT_ENUMERATION_BOUND;
    }
    if !overrides.stages.is_empty() {
        let mut stages = Vec::new();
        for name in &overrides.stages {
            stages.push(Stage::parse(name)?);
        }
        stages.sort_unstable();
        stages.dedup();
        spec.stages = stages;
    }
    Ok(())
}
