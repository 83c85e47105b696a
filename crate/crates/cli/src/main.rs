use std::fs::File;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nuca_reach::experiment::{self, GrowthFit, PairPopulation};
use nuca_reach::{oracle, tree};
use nuca_reach::{Configuration, DecideOptions, MinSteps, RuleVector, SamplingParams};

#[derive(Parser)]
#[command(name = "nuca-reach", version, about = "Configuration reachability for non-uniform elementary CAs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether DEST is reachable from SOURCE.
    Decide {
        /// Comma-separated Wolfram codes, one per cell.
        #[arg(long)]
        rules: RuleVector,
        #[arg(long)]
        source: Configuration,
        #[arg(long)]
        dest: Configuration,
        /// Minimum number of steps the witness must take.
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        min_steps: u8,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        count_edges: bool,
        /// Keep every edge instead of pruning to the walk survivors.
        #[arg(long)]
        no_prune: bool,
    },
    /// Print the configuration after each of STEPS steps.
    Evolve {
        #[arg(long)]
        rules: RuleVector,
        #[arg(long)]
        state: Configuration,
        #[arg(long, default_value_t = 1)]
        steps: u64,
    },
    /// Print the orbit of STATE up to its first repeated configuration.
    Trajectory {
        #[arg(long)]
        rules: RuleVector,
        #[arg(long)]
        state: Configuration,
    },
    /// State transition graph as DOT.
    Stg {
        #[arg(long)]
        rules: RuleVector,
        #[arg(long)]
        dot: bool,
        #[arg(long, default_value_t = oracle::DEFAULT_STG_CAP)]
        cap: usize,
    },
    /// Reachability tree as DOT; with --source and --dest, the pruned tree.
    Tree {
        #[arg(long)]
        rules: RuleVector,
        #[arg(long, requires = "dest")]
        source: Option<Configuration>,
        #[arg(long, requires = "source")]
        dest: Option<Configuration>,
        #[arg(long)]
        dot: bool,
        #[arg(long, default_value_t = tree::DEFAULT_TREE_CAP)]
        cap: usize,
    },
    /// Number of reachable configurations, read off the full tree.
    Leaves {
        #[arg(long)]
        rules: RuleVector,
        #[arg(long, default_value_t = tree::DEFAULT_TREE_CAP)]
        cap: usize,
    },
    /// Average explored edges per CA size, as CSV.
    Experiment {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 2.0)]
        t: f64,
        #[arg(long, default_value_t = 0.05)]
        rel_err: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 500)]
        pilot_size: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Population::TwoToN)]
        pair_population: Population,
        /// Rules to draw from instead of all 256.
        #[arg(long, value_delimiter = ',')]
        rule_pool: Option<Vec<u8>>,
        #[arg(long, default_value_t = 1000)]
        max_iterations: usize,
    },
    /// Growth exponents between consecutive `n,e` rows (file or stdin).
    Growth {
        input: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Population {
    TwoToN,
    FourToN,
}

impl From<Population> for PairPopulation {
    fn from(p: Population) -> Self {
        match p {
            Population::TwoToN => PairPopulation::TwoToN,
            Population::FourToN => PairPopulation::FourToN,
        }
    }
}

type CliResult = Result<ExitCode, Box<dyn std::error::Error>>;

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Decide { rules, source, dest, min_steps, json, count_edges, no_prune } => {
            let opts = DecideOptions {
                min_steps_required: MinSteps::from_u8(min_steps)?,
                count_edges,
                prune_enabled: !no_prune,
                ..DecideOptions::default()
            };
            let decision = nuca_reach::decide(&rules, &source, &dest, opts)?;
            let record = decision.record(count_edges);
            if json {
                println!("{}", serde_json::to_string(&record)?);
            } else {
                match (record.min_steps, record.reason, record.at_level) {
                    (Some(t), _, _) => println!("reachable in {t} steps"),
                    (_, Some(reason), Some(level)) => {
                        println!("not reachable ({reason:?} at level {level})")
                    }
                    _ => unreachable!("records carry either steps or a reason"),
                }
                if let Some(e) = record.explored_edges {
                    println!("explored edges: {e}");
                }
            }
            Ok(if decision.outcome.is_reachable() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Evolve { rules, state, steps } => {
            let mut cur = state;
            println!("{cur}");
            for _ in 0..steps {
                cur = rules.evolve(&cur)?;
                println!("{cur}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Trajectory { rules, state } => {
            let traj = oracle::trajectory(&rules, &state)?;
            for c in &traj.states {
                println!("{c}");
            }
            println!("-> {}", traj.states[traj.tail_index]);
            Ok(ExitCode::SUCCESS)
        }
        Command::Stg { rules, dot, cap } => {
            let stg = oracle::build_stg(&rules, cap)?;
            if dot {
                print!("{}", stg.to_dot());
            } else {
                for (x, &y) in stg.successors().iter().enumerate() {
                    let name = |v: u64| Configuration::from_index(v as u128, stg.cells());
                    println!("{} {}", name(x as u64), name(y));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Tree { rules, source, dest, dot, cap } => {
            let levels = match (source, dest) {
                (Some(s), Some(d)) => {
                    if rules.len() > cap {
                        return Err(nuca_reach::Error::SizeCapExceeded { n: rules.len(), cap }.into());
                    }
                    let trace = nuca_reach::decide_traced(&rules, &s, &d, DecideOptions::default())?;
                    trace.levels.into_iter().map(|t| t.kept.unwrap_or(t.level)).collect()
                }
                _ => tree::enumerate_full_tree(&rules, cap)?.levels,
            };
            if dot {
                print!("{}", tree::to_dot(&levels));
            } else {
                for level in &levels {
                    let edges: Vec<String> = level
                        .edges()
                        .map(|(e, l)| format!("{e}{:?}", l.rmt_values()))
                        .collect();
                    println!("level {}: {}", level.index(), edges.join(" "));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Leaves { rules, cap } => {
            println!("{}", tree::enumerate_full_tree(&rules, cap)?.leaf_count);
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment {
            sizes,
            t,
            rel_err,
            delta,
            pilot_size,
            seed,
            pair_population,
            rule_pool,
            max_iterations,
        } => {
            let params = SamplingParams {
                t_const: t,
                rel_err,
                delta,
                pilot_size,
                rng_seed: seed,
                pair_population: pair_population.into(),
                rule_pool,
                max_iterations,
                ..SamplingParams::default()
            };
            params.validate()?;
            println!("{}", experiment::REPORT_CSV_HEADER);
            for n in sizes {
                let report = experiment::avg_explored_edges(n, &params)?;
                if !report.converged {
                    log::warn!("n={n} stopped after {} iterations without converging", report.iterations);
                }
                println!("{}", report.csv_row());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Growth { input } => {
            let reader: Box<dyn Read> = match input {
                Some(path) => Box::new(File::open(path)?),
                None => Box::new(io::stdin()),
            };
            let fit = GrowthFit::new(experiment::read_growth_csv(reader)?)?;
            println!("n1,n2,a");
            for (w, a) in fit.points.windows(2).zip(&fit.exponents) {
                println!("{},{},{:.4}", w[0].0, w[1].0, a);
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
