use anyhow::Context;
use clap::Parser;
use randconvex_cli::{run, EpsilonRule, Scenario, ScenarioConfig};
use std::path::PathBuf;

/// Exact-rational verification scenarios for convex analysis over atomic
/// probability spaces.
#[derive(Parser, Debug)]
#[command(name = "randconvex", version, about)]
struct Args {
    /// Scenario: example1 | example2-weak | example2-hull-gap |
    /// example2-cc-fix | prop2-selection | prop3-sublevel | cor33-closure |
    /// cor35-lsc | property-suite
    scenario: String,

    /// Realized block count of the lazy dyadic space
    #[arg(long)]
    blocks: Option<u32>,

    /// Per-block dyadic subdivision depth
    #[arg(long, default_value_t = 6)]
    fine_depth: u32,

    /// Largest generator-family size in hull scenarios
    #[arg(long, default_value_t = 4)]
    max_n: usize,

    /// Epsilon rule: `dyadic` (2^-k per block) or `const:p/q`
    #[arg(long, default_value = "dyadic")]
    epsilon: String,

    /// δ sweep runs 2^0 .. 2^-k
    #[arg(long, default_value_t = 10)]
    delta_sweep: u32,

    /// Relative dyadic depth of battery test vectors
    #[arg(long, default_value_t = 3)]
    battery_depth: u32,

    /// Randomized-check sample count
    #[arg(long, default_value_t = 50)]
    trials: usize,

    /// Seed for every randomized check (recorded in the report)
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Report file (JSON); written in addition to the stdout summary
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    let scenario = Scenario::parse(&args.scenario)
        .with_context(|| format!("unknown scenario `{}`", args.scenario))?;
    let epsilon = EpsilonRule::parse(&args.epsilon).context("bad --epsilon")?;

    let config = ScenarioConfig {
        scenario,
        blocks: args.blocks,
        fine_depth: args.fine_depth,
        max_n: args.max_n,
        epsilon,
        delta_sweep: args.delta_sweep,
        battery_depth: args.battery_depth,
        trials: args.trials,
        seed: args.seed,
    };

    let report = run(&config).context("scenario failed")?;
    if let Some(path) = &args.out {
        std::fs::write(path, report.to_json())
            .with_context(|| format!("writing report to {}", path.display()))?;
    }
    print!("{}", report.summary());
    if report.all_ok() {
        Ok(())
    } else {
        std::process::exit(1);
    }
}
