use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sensorimotor::runner::{self, Overrides, RunArtifacts};
use sensorimotor::ExperimentConfig;

#[derive(Parser)]
#[command(name = "sensorimotor", version, about = "Naive-agent object discovery in gridworlds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// 1D world, one object
    Sim1 {
        #[command(flatten)]
        common: Common,
        /// Redraw the environment with 5% probability per scene
        #[arg(long)]
        variant_changing_env: bool,
    },
    /// 2D world, three objects
    Sim2 {
        #[command(flatten)]
        common: Common,
    },
    /// Run from a `key = value` config file
    Custom {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Rebuild the counters of a run directory from its event log
    Replay { dir: PathBuf },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    changes: Option<usize>,
    #[arg(long)]
    env_change_prob: Option<f64>,
    /// Number of clusters, or `auto` for the eigengap estimate
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scene indices at which to dump C, e.g. `0,5,350`
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<usize>>,
}

impl Common {
    fn overrides(&self, default_out: &str) -> Result<Overrides, String> {
        let k = match self.k.as_deref() {
            None => None,
            Some("auto") => Some(None),
            Some(v) => Some(Some(v.parse::<usize>().map_err(|_| format!("invalid --k {v:?}"))?)),
        };
        Ok(Overrides {
            seed: self.seed,
            changes: self.changes,
            env_change_prob: self.env_change_prob,
            k,
            alpha: self.alpha,
            snapshots: self.snapshots.clone(),
            out: Some(self.out.clone().unwrap_or_else(|| PathBuf::from(default_out))),
        })
    }
}

fn summary(a: &RunArtifacts) {
    let dir = a.config.output_dir.as_deref().map(|d| d.display().to_string()).unwrap_or_default();
    println!("states {}  records {}", a.c.rows(), a.outcome.memory.records().len());
    println!("k {}  eigengap estimate {}", a.clustering.k, a.clustering.eigengap_k);
    let full = a.components.iter().filter(|c| c.is_fully_connected()).count();
    println!("fully connected components at alpha={}: {full}", a.config.alpha);
    match a.purity.overall {
        Some(p) => println!("purity {p:.4}"),
        None => println!("purity -"),
    }
    println!("wrote {dir}");
}

fn run(cli: Cli) -> Result<(), String> {
    let artifacts = match cli.command {
        Command::Sim1 {
            common,
            variant_changing_env,
        } => {
            let default_out = if variant_changing_env { "out/sim1-changing-env" } else { "out/sim1" };
            runner::run_sim1(&common.overrides(default_out)?, variant_changing_env)
        }
        Command::Sim2 { common } => runner::run_sim2(&common.overrides("out/sim2")?),
        Command::Custom { config, common } => {
            let text = std::fs::read_to_string(&config).map_err(|e| format!("{}: {e}", config.display()))?;
            let cfg = ExperimentConfig::parse(&text).map_err(|e| format!("{}: {e}", config.display()))?;
            let mut ov = common.overrides("out/custom")?;
            if common.out.is_none() && cfg.output_dir.is_some() {
                ov.out = None;
            }
            runner::execute(&ov.apply(cfg))
        }
        Command::Replay { dir } => {
            let rep = runner::replay_dir(&dir).map_err(|e| e.to_string())?;
            println!(
                "replayed {} scenes over {} records: counters match",
                rep.scenes,
                rep.counters.len()
            );
            return Ok(());
        }
    }
    .map_err(|e| e.to_string())?;
    summary(&artifacts);
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
