//! `loopcas`: run a verification job described by a TOML manifest.

mod manifest;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use loopcas_core::par::Execution;

use manifest::{parse_manifest, Job, Manifest, DEFAULT_SEED};
use run::{execute, human_report, machine_report, RunError};

#[derive(Parser)]
#[command(name = "loopcas", version, about = "Exact loop-space verification jobs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the machine-readable JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized checks (overrides the manifest).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Transgress a 1- or 2-form.
    Transgress { manifest: PathBuf },
    /// Symplectic action of a closed 2-form.
    Dinv { manifest: PathBuf },
    /// Exponentiated symplectic action of a closed 2-form.
    Action { manifest: PathBuf },
    /// Residue of Laurent-series forms.
    Residue { manifest: PathBuf },
    /// Reparametrization invariance of a loop function.
    VerifyInvariance { manifest: PathBuf },
    /// Multiplication by S(w) against the field substitution on a basis.
    VerifyAutomorphism { manifest: PathBuf },
    /// Factorization checks for a transgressed or candidate function.
    VerifyFactorization { manifest: PathBuf },
    /// Run every randomized suite.
    Selftest,
}

impl Command {
    fn split(&self) -> (Job, Option<&PathBuf>) {
        match self {
            Command::Transgress { manifest } => (Job::Transgress, Some(manifest)),
            Command::Dinv { manifest } => (Job::Dinv, Some(manifest)),
            Command::Action { manifest } => (Job::Action, Some(manifest)),
            Command::Residue { manifest } => (Job::Residue, Some(manifest)),
            Command::VerifyInvariance { manifest } => (Job::VerifyInvariance, Some(manifest)),
            Command::VerifyAutomorphism { manifest } => (Job::VerifyAutomorphism, Some(manifest)),
            Command::VerifyFactorization { manifest } => (Job::VerifyFactorization, Some(manifest)),
            Command::Selftest => (Job::Selftest, None),
        }
    }
}

fn load(job: Job, path: Option<&PathBuf>, seed: Option<u64>) -> Result<(Manifest, Vec<u8>), RunError> {
    let Some(path) = path else {
        let manifest = parse_manifest("dimension = 1\ntruncation = { M = 1, L = 1, epsilon = 2 }\n")?;
        return Ok((
            Manifest {
                seed: seed.unwrap_or(DEFAULT_SEED),
                ..manifest
            },
            Vec::new(),
        ));
    };
    let bytes = std::fs::read(path).map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))?;
    let mut manifest = parse_manifest(text)?;
    if let Some(declared) = manifest.job {
        if declared != job {
            return Err(RunError::Usage(format!(
                "manifest declares job {}, command is {}",
                declared.name(),
                job.name()
            )));
        }
    }
    if let Some(seed) = seed {
        manifest.seed = seed;
    }
    Ok((manifest, bytes))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = match cli.jobs {
        Some(0) => {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        Some(1) => Execution::Sequential,
        Some(n) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            Execution::default()
        }
        None => Execution::default(),
    };
    let (job, path) = cli.command.split();
    let started = Instant::now();
    let outcome = load(job, path, cli.seed).and_then(|(m, bytes)| Ok((execute(job, &m, exec)?, m, bytes)));
    let (outcome, manifest, bytes) = match outcome {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    print!("{}", human_report(job, &outcome));
    println!("wall time: {:.3} s", started.elapsed().as_secs_f64());
    if let Some(out) = &cli.out {
        let text = machine_report(job, &bytes, manifest.seed, &outcome);
        if let Err(e) = std::fs::write(out, text) {
            eprintln!("error: {}: {e}", out.display());
            return ExitCode::from(2);
        }
    }
    if outcome.report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
