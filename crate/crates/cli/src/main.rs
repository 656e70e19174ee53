use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use relaynet::channel::ChannelParams;
use relaynet::cnn_runtime::{ModelWeights, HIDDEN_CHANNELS};
use relaynet::expert::ExpertParams;
use relaynet::geometry::Point;
use relaynet::imaging::GridSpec;
use relaynet::pipeline::{
    bench_timing, eval_statistics, generate_dataset, plan, read_manifest, read_tasks_csv,
    run_circle_scenario, run_line_scenario, simulate_patrol, DatasetConfig, PatrolParams, Planner,
    ScenarioRow, TimingRow,
};

#[derive(Parser)]
#[command(name = "relaynet", version, about = "Relay placement for connected robot teams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate expert-labelled image pairs and a manifest.
    GenerateDataset {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 2)]
        agents_min: usize,
        #[arg(long, default_value_t = 6)]
        agents_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Generate on a single thread.
        #[arg(long)]
        serial: bool,
    },
    /// Place relays for the tasks in a CSV file (columns x,y).
    Plan {
        #[command(flatten)]
        planner: PlannerArgs,
        #[arg(long)]
        tasks: PathBuf,
        #[arg(long, default_value_t = 30.0)]
        p_max_dbm: f64,
        /// Relay CSV destination; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the line or circle scenario suite.
    Scenario {
        kind: ScenarioKind,
        #[command(flatten)]
        planner: PlannerArgs,
        /// Separations (line) or radii (circle), meters; comma separated.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// Task count on the circle.
        #[arg(long, default_value_t = 4)]
        tasks: usize,
        #[arg(long, default_value_t = 30.0)]
        p_max_dbm: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a planner against the expert labels of a dataset.
    EvalStats {
        #[arg(long)]
        dataset: PathBuf,
        #[command(flatten)]
        planner: PlannerArgs,
        #[arg(long, default_value_t = 30.0)]
        p_max_dbm: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time both planners across team sizes.
    Bench {
        /// Inclusive range `a..b` or comma-separated list of total agent counts.
        #[arg(long, default_value = "3..20")]
        sizes: String,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        /// Weights for the CNN planner; random weights if absent.
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 30.0)]
        p_max_dbm: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Patrol simulation with a periodic relay controller.
    Simulate {
        #[command(flatten)]
        planner: PlannerArgs,
        #[arg(long, default_value_t = 21.0)]
        power_dbm: f64,
        #[arg(long, default_value_t = 300.0)]
        duration: f64,
        #[arg(long, default_value_t = 0.5)]
        period: f64,
        #[arg(long, default_value_t = 4)]
        tasks: usize,
        #[arg(long, default_value_t = 1.0)]
        task_speed: f64,
        #[arg(long, default_value_t = 3.0)]
        relay_speed: f64,
        /// Side of the square patrol loop, meters.
        #[arg(long, default_value_t = 200.0)]
        side: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioKind {
    Line,
    Circle,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlannerKind {
    Expert,
    Cnn,
}

#[derive(Args)]
struct PlannerArgs {
    #[arg(long, value_enum, default_value_t = PlannerKind::Expert)]
    planner: PlannerKind,
    /// Weight file for the CNN planner.
    #[arg(long)]
    weights: Option<PathBuf>,
}

impl PlannerArgs {
    fn build(&self) -> Result<Planner> {
        Ok(match self.planner {
            PlannerKind::Expert => Planner::Expert(ExpertParams::default()),
            PlannerKind::Cnn => {
                let Some(path) = &self.weights else {
                    bail!("--planner cnn requires --weights");
                };
                Planner::Cnn {
                    weights: Arc::new(load_weights(path)?),
                    grid: GridSpec::default(),
                }
            }
        })
    }
}

fn load_weights(path: &Path) -> Result<ModelWeights> {
    ModelWeights::load(path).with_context(|| format!("loading {}", path.display()))
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
        if a > b {
            bail!("empty size range {s}");
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|v| v.trim().parse().with_context(|| format!("bad size {v:?}")))
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_scenario(rows: &[ScenarioRow], out: Box<dyn Write>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["parameter_m", "relays", "lambda2", "power_dbm"])?;
    for r in rows {
        w.write_record([
            r.parameter_m.to_string(),
            r.relays.to_string(),
            r.lambda2.to_string(),
            opt(r.power_dbm),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let params = ChannelParams::default();
    match cli.command {
        Command::GenerateDataset {
            count,
            agents_min,
            agents_max,
            seed,
            out,
            serial,
        } => {
            let cfg = DatasetConfig {
                count,
                agents_min,
                agents_max,
                base_seed: seed,
                parallel: !serial,
                ..Default::default()
            };
            let summary = generate_dataset(&cfg, &out)?;
            eprintln!(
                "{} samples in {} ({} draws discarded)",
                summary.samples.len(),
                out.display(),
                summary.discarded
            );
        }
        Command::Plan {
            planner,
            tasks,
            p_max_dbm,
            out,
        } => {
            let tasks = read_tasks_csv(&tasks)?;
            let outcome = plan(&planner.build()?, &tasks, &params, p_max_dbm)?;
            let mut w = csv::Writer::from_writer(output(&out)?);
            w.write_record(["x", "y"])?;
            for p in &outcome.comm_positions {
                w.write_record([p.x.to_string(), p.y.to_string()])?;
            }
            w.flush()?;
            eprintln!(
                "relays={} power_dbm={} lambda2={}",
                outcome.comm_positions.len(),
                opt(outcome.power_dbm),
                outcome.lambda2
            );
        }
        Command::Scenario {
            kind,
            planner,
            values,
            tasks,
            p_max_dbm,
            out,
        } => {
            let planner = planner.build()?;
            let rows = match kind {
                ScenarioKind::Line => {
                    let v = values.unwrap_or_else(|| (1..=15).map(|i| 10.0 * i as f64).collect());
                    run_line_scenario(&v, &planner, &params, p_max_dbm)?
                }
                ScenarioKind::Circle => {
                    let v = values.unwrap_or_else(|| (1..=10).map(|i| 10.0 * i as f64).collect());
                    run_circle_scenario(&v, tasks, &planner, &params, p_max_dbm)?
                }
            };
            write_scenario(&rows, output(&out)?)?;
        }
        Command::EvalStats {
            dataset,
            planner,
            p_max_dbm,
            out,
        } => {
            let samples = read_manifest(&dataset)?;
            let report = eval_statistics(&samples, &planner.build()?, &params, p_max_dbm)?;
            report.write_histograms_csv(output(&out)?)?;
            eprintln!(
                "power {:.3} ± {:.3} dBm, relay diff {:.3} ± {:.3}, {} unconnected of {}",
                report.mean_power_dbm,
                report.var_power_dbm.sqrt(),
                report.mean_diff,
                report.var_diff.sqrt(),
                report.unconnected,
                report.cases.len()
            );
        }
        Command::Bench {
            sizes,
            trials,
            weights,
            seed,
            p_max_dbm,
            out,
        } => {
            let weights = match weights {
                Some(p) => load_weights(&p)?,
                None => ModelWeights::random(HIDDEN_CHANNELS, seed),
            };
            let planners = [
                Planner::Expert(ExpertParams::benchmark()),
                Planner::Cnn {
                    weights: Arc::new(weights),
                    grid: GridSpec::default(),
                },
            ];
            let rows = bench_timing(&parse_sizes(&sizes)?, trials, &planners, &params, p_max_dbm, seed)?;
            TimingRow::write_csv(&rows, output(&out)?)?;
        }
        Command::Simulate {
            planner,
            power_dbm,
            duration,
            period,
            tasks,
            task_speed,
            relay_speed,
            side,
            out,
        } => {
            let h = side / 2.0;
            let sim = PatrolParams {
                n_tasks: tasks,
                waypoints: vec![
                    Point::new(-h, -h),
                    Point::new(h, -h),
                    Point::new(h, h),
                    Point::new(-h, h),
                ],
                task_speed_mps: task_speed,
                relay_speed_mps: relay_speed,
                duration_s: duration,
                period_s: period,
                transmit_power_dbm: power_dbm,
            };
            let log = simulate_patrol(&sim, &planner.build()?, &params)?;
            log.write_csv(output(&out)?)?;
            eprintln!(
                "{} ticks, connected on {:.1}%",
                log.ticks.len(),
                100.0 * log.connected_fraction()
            );
        }
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
