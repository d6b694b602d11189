use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser};
use nlskdv_harness::{load_config, run, HarnessError, RunConfig, Subcommand};

/// Numerical lab for the periodic NLS-KdV system.
///
/// Exit status: 0 when every verdict passes, 1 when one fails, 2 on error.
/// NLSKDV_THREADS sets the size of the worker pool.
#[derive(Parser)]
#[command(name = "nlskdv", version)]
enum Cli {
    /// Evolve the coupled system and monitor M, Q, E and the mean of v.
    Simulate(Common),
    /// Fit the growth exponents of a bilinear counterexample family.
    Scaling(Common),
    /// Check the integral, series and counting bounds.
    Lemmas(Common),
    /// Reduced multiplier suprema and their truncation stability.
    Multipliers(Common),
    /// Picard iteration of the Duhamel formulation.
    Picard(Common),
    /// Strichartz ratios over seeded random ensembles.
    Norms(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed, overriding `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

impl Cli {
    fn split(self) -> (Subcommand, Common) {
        match self {
            Cli::Simulate(c) => (Subcommand::Simulate, c),
            Cli::Scaling(c) => (Subcommand::Scaling, c),
            Cli::Lemmas(c) => (Subcommand::Lemmas, c),
            Cli::Multipliers(c) => (Subcommand::Multipliers, c),
            Cli::Picard(c) => (Subcommand::Picard, c),
            Cli::Norms(c) => (Subcommand::Norms, c),
        }
    }
}

fn resolve(sub: Subcommand, args: Common) -> Result<RunConfig, HarnessError> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => RunConfig::defaults(sub),
    };
    if cfg.subcommand != sub {
        return Err(HarnessError::SubcommandMismatch {
            config: cfg.subcommand.to_string(),
            requested: sub.to_string(),
        });
    }
    if let Some(out) = args.out {
        cfg.output_dir = out;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let (sub, args) = Cli::parse().split();
    if let Some(n) = std::env::var("NLSKDV_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // a pool that already exists is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg = match resolve(sub, args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(report) => {
            for v in &report.verdicts {
                println!(
                    "{} {}: measured {:.6e}, expected {:.6e}",
                    if v.pass { "PASS" } else { "FAIL" },
                    v.name,
                    v.measured,
                    v.expected
                );
            }
            if let Some(e) = &report.error {
                eprintln!("error: {e}");
            }
            println!("wrote {}", report.output_dir.display());
            ExitCode::from(report.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
