use std::io::Write;
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PipelineError, Planner, MIN_TASK_SEPARATION_M};
use crate::channel::{ChannelCurve, ChannelParams};
use crate::cnn_runtime::plan_inference;
use crate::expert::{mst_feasible_init, optimize, ExpertParams};
use crate::geometry::Point;
use crate::imaging::{render, GridSpec};

const BENCH_MAX_ITERATIONS: usize = 20;
const TEAM_ATTEMPTS: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct TimingRow {
    /// Tasks plus MST-seed relays.
    pub agents: usize,
    pub planner: String,
    pub mean_s: f64,
    pub std_s: f64,
    /// Expert iterations per trial; empty for the CNN planner.
    pub iterations: Vec<usize>,
}

/// Finds a task team whose MST seed brings the total agent count to exactly
/// `total`, at least `max(1, total / 3)` of them relays. Tasks are drawn
/// uniformly from a square whose half-side is itself drawn per attempt, so
/// both sparse and dense teams occur.
pub fn team_with_total_agents(
    total: usize,
    grid: &GridSpec,
    curve: &ChannelCurve,
    seed: u64,
) -> Result<Vec<Point>, PipelineError> {
    if total < 3 {
        return Err(PipelineError::InvalidArgument(format!("team of {total} agents")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_half = grid.extent_m() / 2.0 - 8.0 * grid.meters_per_pixel;
    for _ in 0..TEAM_ATTEMPTS {
        let n = rng.random_range(2..=total - (total / 3).max(1));
        let half = rng.random_range(0.1 * max_half..=max_half);
        let tasks: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.random_range(-half..=half), rng.random_range(-half..=half)))
            .collect();
        let separated = tasks.iter().enumerate().all(|(i, a)| {
            tasks[i + 1..].iter().all(|b| a.distance(*b) >= MIN_TASK_SEPARATION_M)
        });
        if separated && n + mst_feasible_init(&tasks, curve).len() == total && render(&tasks, grid).is_ok() {
            return Ok(tasks);
        }
    }
    Err(PipelineError::Sampling {
        attempts: TEAM_ATTEMPTS,
    })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

/// Wall time of each planner per total agent count. Trial `t` of size `n`
/// uses the team drawn from seed `seed + 1000·n + t`, shared by all planners.
/// The expert is capped at 20 iterations; the CNN planner is timed end to
/// end (render, forward pass, extraction).
pub fn bench_timing(
    sizes: &[usize],
    trials: usize,
    planners: &[Planner],
    params: &ChannelParams,
    p_max_dbm: f64,
    seed: u64,
) -> Result<Vec<TimingRow>, PipelineError> {
    if trials < 3 {
        return Err(PipelineError::InvalidArgument(format!("need at least 3 trials, got {trials}")));
    }
    let curve = ChannelCurve::new(*params)?;
    let grid = planners
        .iter()
        .find_map(|p| match p {
            Planner::Cnn { grid, .. } => Some(*grid),
            Planner::Expert(_) => None,
        })
        .unwrap_or_default();
    let mut rows = Vec::new();
    for &n in sizes {
        let teams = (0..trials)
            .map(|t| team_with_total_agents(n, &grid, &curve, seed + 1000 * n as u64 + t as u64))
            .collect::<Result<Vec<_>, _>>()?;
        for planner in planners {
            let mut times = Vec::with_capacity(trials);
            let mut iterations = Vec::new();
            for tasks in &teams {
                let start = Instant::now();
                match planner {
                    Planner::Expert(ep) => {
                        let ep = ExpertParams {
                            max_iterations: ep.max_iterations.min(BENCH_MAX_ITERATIONS),
                            ..*ep
                        };
                        let sol = optimize(tasks, &curve, &ep, None)?;
                        iterations.push(sol.iterations);
                    }
                    Planner::Cnn { weights, grid } => {
                        plan_inference(tasks, weights, grid, params, p_max_dbm)?;
                    }
                }
                times.push(start.elapsed().as_secs_f64());
            }
            let (mean_s, std_s) = mean_std(&times);
            log::info!("{n} agents, {}: {mean_s:.4} s ± {std_s:.4}", planner.name());
            rows.push(TimingRow {
                agents: n,
                planner: planner.name().to_string(),
                mean_s,
                std_s,
                iterations,
            });
        }
    }
    Ok(rows)
}

impl TimingRow {
    pub fn write_csv<W: Write>(rows: &[TimingRow], writer: W) -> Result<(), PipelineError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["agents", "planner", "mean_s", "std_s"])?;
        for r in rows {
            w.write_record([
                r.agents.to_string(),
                r.planner.clone(),
                r.mean_s.to_string(),
                r.std_s.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
