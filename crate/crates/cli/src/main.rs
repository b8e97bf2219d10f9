use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use qbgame::epd::game::{thresholds, verify_reduction};
use qbgame::oracle::Anchors;
use qbgame::runner::{run_scenario, write_records, RawConfig, Summary};

#[derive(Parser)]
#[command(name = "qbgame", version, about = "Iterated quantum games between Bayesian rational agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write per-round records.
    Run(RunArgs),
    /// Check the prisoners' dilemma reduction to {Q, D} and print dominance thresholds.
    Verify(VerifyArgs),
    /// Print analytic anchor values.
    Oracle {
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML file with scenario settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// chsh or epd.
    #[arg(long)]
    game: Option<String>,
    /// Named scenario, e.g. finding-advantage or bohrs-horseshoe.
    #[arg(long)]
    scenario: Option<String>,
    /// Game-state entanglement in ebits.
    #[arg(long)]
    gamma_ebits: Option<f64>,
    #[arg(long)]
    prior_a: Option<String>,
    #[arg(long)]
    prior_b: Option<String>,
    #[arg(long)]
    sims: Option<usize>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Probability floor.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (default: $QBGAME_OUTPUT_DIR or ., named after the scenario).
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// csv or jsonl.
    #[arg(long)]
    format: Option<String>,
    /// Prisoner belief update: separate or joint.
    #[arg(long)]
    epd_update: Option<String>,
    /// Skip the per-simulation summary.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 17)]
    theta_steps: usize,
    #[arg(long, default_value_t = 9)]
    phi_steps: usize,
    #[arg(long, default_value_t = 11)]
    gamma_steps: usize,
    /// Floors to check.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.1])]
    eps: Vec<f64>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

fn run(args: RunArgs) -> Result<()> {
    let base = match &args.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    let cfg = base
        .merge(RawConfig {
            game: args.game,
            scenario: args.scenario,
            gamma_ebits: args.gamma_ebits,
            prior_a: args.prior_a,
            prior_b: args.prior_b,
            sims: args.sims,
            rounds: args.rounds,
            iterations: args.iterations,
            eps: args.eps,
            seed: args.seed,
            output: args.output,
            format: args.format,
            epd_update: args.epd_update,
        })
        .resolve()?;
    let start = Instant::now();
    let records = run_scenario(&cfg)?;
    let path = cfg.output_path();
    write_records(&records, &path, cfg.format).with_context(|| format!("writing {}", path.display()))?;
    if !args.quiet {
        print!("{}", Summary(&records));
    }
    eprintln!(
        "{} {}: {} sims x {} rounds in {:.1}s -> {}",
        cfg.game,
        cfg.label,
        cfg.sims,
        cfg.rounds,
        start.elapsed().as_secs_f64(),
        path.display()
    );
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<()> {
    let mut reports = Vec::new();
    for &eps in &args.eps {
        reports.push(verify_reduction(args.theta_steps, args.phi_steps, args.gamma_steps, eps)?);
    }
    let (low, high) = thresholds();
    if args.json {
        let out = serde_json::json!({
            "reports": reports,
            "threshold_low_ebits": low,
            "threshold_high_ebits": high,
        });
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        for r in &reports {
            println!("{r}");
        }
        println!("dominance thresholds: D below {low:.3} ebits, Q above {high:.3} ebits");
    }
    Ok(())
}

fn oracle(json: bool) -> Result<()> {
    let anchors = Anchors::compute()?;
    if json {
        println!("{}", serde_json::to_string_pretty(&anchors)?);
    } else {
        println!("{anchors}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Verify(args) => verify(args),
        Command::Oracle { json } => oracle(json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
