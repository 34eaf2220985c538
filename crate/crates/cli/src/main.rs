use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mhd2d::harness::{
    load_checkpoint_on, make_initial_data, parse_config, run_scenario, run_with_ledger, save_checkpoint, RunConfig,
    ScenarioOptions,
};
use mhd2d::spectral::Grid;

#[derive(Parser)]
#[command(name = "mhd2d", version, about = "2D compressible MHD near a background field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (key = value with [section] headers).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the seed of the initial data or of the lemma trials.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Continue a `simulate` run from this checkpoint.
    #[arg(long, global = true)]
    resume: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Run the configured simulation and write diagnostics and checkpoints.
    Simulate,
    /// Eigenvalues, symbol identity, damping map and single-mode consistency.
    LinearModes,
    /// Long run with the weighted-energy monitor and decay fit.
    DecayVerify,
    /// Time-derivative consistency of the top-order energy identity.
    OmegaResidual,
    /// Randomized commutator and triple-product inequalities.
    LemmaSuite,
    /// L² balance residual and integrator convergence order.
    LedgerCheck,
}

impl Command {
    fn scenario(self) -> Option<&'static str> {
        match self {
            Command::Simulate => None,
            Command::LinearModes => Some("linear-modes"),
            Command::DecayVerify => Some("decay-verify"),
            Command::OmegaResidual => Some("omega-residual"),
            Command::LemmaSuite => Some("lemma-suite"),
            Command::LedgerCheck => Some("ledger-check"),
        }
    }
}

fn read_config(path: &Path) -> Result<RunConfig, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn simulate(cli: &Cli) -> Result<(), String> {
    let path = cli.config.as_ref().ok_or("simulate needs --config")?;
    let mut cfg = read_config(path)?;
    if let Some(seed) = cli.seed {
        cfg.init.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    let out = cfg.out_dir.clone();
    let ckpt_dir = out.join("checkpoints");
    fs::create_dir_all(&ckpt_dir).map_err(|e| e.to_string())?;

    let initial = match &cli.resume {
        Some(p) => {
            let grid = Grid::new(cfg.n1, cfg.n2).map_err(|e| e.to_string())?;
            let (s, params) = load_checkpoint_on(p, &grid).map_err(|e| e.to_string())?;
            if params != cfg.phys {
                return Err(format!("{}: physical parameters differ from the config", p.display()));
            }
            eprintln!("resuming from t = {}", s.time);
            s
        }
        None => make_initial_data(&cfg).map_err(|e| e.to_string())?,
    };
    let (last, ledger, stats) = run_with_ledger(&cfg, initial, Some(&ckpt_dir)).map_err(|e| e.to_string())?;
    fs::write(out.join("diagnostics.csv"), ledger.to_csv()).map_err(|e| e.to_string())?;
    fs::write(out.join("config.txt"), cfg.to_text()).map_err(|e| e.to_string())?;
    save_checkpoint(&last, &cfg.phys, &out.join("final.mhd2")).map_err(|e| e.to_string())?;
    println!(
        "t = {}: {} steps, {} samples, {} checkpoints; |div b| = {:.3e}, output in {}",
        last.time,
        stats.steps,
        stats.samples,
        stats.checkpoints,
        last.divergence_b_l2(),
        out.display()
    );
    Ok(())
}

fn scenario(cli: &Cli, name: &str) -> Result<bool, String> {
    let config = match &cli.config {
        Some(p) => Some(read_config(p)?),
        None => None,
    };
    let out_dir = cli
        .out
        .clone()
        .or_else(|| config.as_ref().map(|c| c.out_dir.join(name)))
        .unwrap_or_else(|| PathBuf::from("out").join(name));
    let opts = ScenarioOptions {
        out_dir,
        seed: cli.seed,
        config,
    };
    let report = run_scenario(name, &opts).map_err(|e| e.to_string())?;
    for c in &report.criteria {
        println!("{c}");
    }
    let failing = report.failing();
    if !failing.is_empty() {
        let ids: Vec<String> = failing.iter().map(|c| format!("{} ({})", c.id, c.name)).collect();
        eprintln!("failing criteria: {}", ids.join(", "));
    }
    Ok(report.all_pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.resume.is_some() && !matches!(cli.command, Command::Simulate) {
        eprintln!("error: --resume only applies to simulate");
        return ExitCode::from(2);
    }
    let result = match cli.command.scenario() {
        None => simulate(&cli).map(|_| true),
        Some(name) => scenario(&cli, name),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
