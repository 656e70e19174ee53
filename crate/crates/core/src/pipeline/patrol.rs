use std::io::Write;

use super::{PipelineError, Planner};
use crate::channel::{ChannelCurve, ChannelParams};
use crate::cnn_runtime::plan_inference;
use crate::expert::{optimize, ExpertError};
use crate::geometry::{scale_all, Point};
use crate::netgraph::{positions_connected, positions_connectivity};

#[derive(Clone, Debug, PartialEq)]
pub struct PatrolParams {
    pub n_tasks: usize,
    /// Closed patrol loop, visited in order.
    pub waypoints: Vec<Point>,
    /// Speed of the fastest task; task `i` moves at `(1 − i / 2n)` of it.
    pub task_speed_mps: f64,
    pub relay_speed_mps: f64,
    pub duration_s: f64,
    pub period_s: f64,
    pub transmit_power_dbm: f64,
}

impl Default for PatrolParams {
    fn default() -> Self {
        PatrolParams {
            n_tasks: 4,
            waypoints: vec![
                Point::new(-100.0, -100.0),
                Point::new(100.0, -100.0),
                Point::new(100.0, 100.0),
                Point::new(-100.0, 100.0),
            ],
            task_speed_mps: 1.0,
            relay_speed_mps: 3.0,
            duration_s: 300.0,
            period_s: 0.5,
            transmit_power_dbm: 21.0,
        }
    }
}

impl PatrolParams {
    fn validate(&self) -> Result<(), PipelineError> {
        if !(self.task_speed_mps >= 0.0 && self.task_speed_mps.is_finite()) {
            return Err(PipelineError::InvalidArgument(format!(
                "task speed must be non-negative, got {}",
                self.task_speed_mps
            )));
        }
        let positive = [
            ("relay speed", self.relay_speed_mps),
            ("duration", self.duration_s),
            ("controller period", self.period_s),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(PipelineError::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if self.n_tasks < 2 {
            return Err(PipelineError::InvalidArgument("patrol needs at least 2 tasks".into()));
        }
        if self.waypoints.len() < 2 || loop_length(&self.waypoints) <= 0.0 {
            return Err(PipelineError::InvalidArgument("patrol loop has zero length".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatrolTick {
    pub t_s: f64,
    /// At the operating power.
    pub lambda2: f64,
    pub tasks: Vec<Point>,
    pub relays: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatrolLog {
    /// Distance scale applied before planning, `d_c(base) / d_c(operating)`.
    pub scale: f64,
    pub ticks: Vec<PatrolTick>,
}

impl PatrolLog {
    pub fn connected_fraction(&self) -> f64 {
        let ok = self
            .ticks
            .iter()
            .filter(|t| t.lambda2 > crate::netgraph::CONNECTIVITY_TOLERANCE)
            .count();
        ok as f64 / self.ticks.len() as f64
    }

    /// Long format: one row per agent per tick.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), PipelineError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t_s", "lambda2", "role", "index", "x", "y"])?;
        for tick in &self.ticks {
            let agents = tick
                .tasks
                .iter()
                .map(|p| ("task", p))
                .chain(tick.relays.iter().map(|p| ("relay", p)));
            let mut counters = [0usize; 2];
            for (role, p) in agents {
                let c = &mut counters[(role == "relay") as usize];
                w.write_record([
                    tick.t_s.to_string(),
                    tick.lambda2.to_string(),
                    role.to_string(),
                    c.to_string(),
                    p.x.to_string(),
                    p.y.to_string(),
                ])?;
                *c += 1;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn loop_length(waypoints: &[Point]) -> f64 {
    (0..waypoints.len())
        .map(|i| waypoints[i].distance(waypoints[(i + 1) % waypoints.len()]))
        .sum()
}

fn point_on_loop(waypoints: &[Point], arc: f64) -> Point {
    let mut s = arc.rem_euclid(loop_length(waypoints));
    for i in 0..waypoints.len() {
        let (a, b) = (waypoints[i], waypoints[(i + 1) % waypoints.len()]);
        let len = a.distance(b);
        if s <= len && len > 0.0 {
            return a + (b - a) * (s / len);
        }
        s -= len;
    }
    waypoints[0]
}

/// Greedy matching: repeatedly pairs the closest unassigned relay and target.
/// Entry `j` is the relay given target `j`, or `None` if relays ran out.
pub fn assign_targets(relays: &[Point], targets: &[Point]) -> Vec<Option<usize>> {
    let mut pairs: Vec<(f64, usize, usize)> = relays
        .iter()
        .enumerate()
        .flat_map(|(i, r)| targets.iter().enumerate().map(move |(j, t)| (r.distance(*t), i, j)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut relay_used = vec![false; relays.len()];
    let mut out = vec![None; targets.len()];
    for (_, i, j) in pairs {
        if !relay_used[i] && out[j].is_none() {
            relay_used[i] = true;
            out[j] = Some(i);
        }
    }
    out
}

// Relay targets in the real world. Planning happens in a world shrunk by
// `scale`, where the base power behaves like the operating power.
fn plan_targets(
    planner: &Planner,
    tasks: &[Point],
    relays: &[Point],
    base: &ChannelParams,
    base_curve: &ChannelCurve,
    scale: f64,
) -> Result<Vec<Point>, PipelineError> {
    let tasks_s = scale_all(tasks, scale);
    let relays_s = scale_all(relays, scale);
    let targets_s = match planner {
        Planner::Expert(ep) => {
            let team: Vec<Point> = tasks_s.iter().chain(&relays_s).copied().collect();
            let warm = (!relays_s.is_empty() && positions_connected(&team, base_curve))
                .then_some(relays_s.as_slice());
            match optimize(&tasks_s, base_curve, ep, warm) {
                Ok(sol) => sol.comm_positions,
                Err(ExpertError::InfeasibleInit { .. }) => {
                    optimize(&tasks_s, base_curve, ep, None)?.comm_positions
                }
                Err(e) => return Err(e.into()),
            }
        }
        Planner::Cnn { weights, grid } => {
            plan_inference(&tasks_s, weights, grid, base, base.transmit_power_dbm)?.comm_positions
        }
    };
    Ok(scale_all(&targets_s, 1.0 / scale))
}

/// Patrol with a periodic relay controller. Each tick, tasks and relays move
/// for one period, connectivity is logged, and the planner issues new relay
/// targets. Targets beyond the current relay count spawn relays at the
/// nearest task; relays left without a target leave the team.
pub fn simulate_patrol(
    sim: &PatrolParams,
    planner: &Planner,
    base: &ChannelParams,
) -> Result<PatrolLog, PipelineError> {
    sim.validate()?;
    let base_curve = ChannelCurve::new(*base)?;
    let op_curve = ChannelCurve::new(base.with_transmit_power(sim.transmit_power_dbm))?;
    let scale = base_curve.cutoff_distance_m / op_curve.cutoff_distance_m;
    let perimeter = loop_length(&sim.waypoints);
    let n = sim.n_tasks;
    let speeds: Vec<f64> = (0..n)
        .map(|i| sim.task_speed_mps * (1.0 - i as f64 / (2 * n) as f64))
        .collect();
    let mut arcs: Vec<f64> = (0..n).map(|i| perimeter * i as f64 / n as f64).collect();
    let tasks_at = |arcs: &[f64]| -> Vec<Point> {
        arcs.iter().map(|&s| point_on_loop(&sim.waypoints, s)).collect()
    };
    let lambda2_of = |tasks: &[Point], relays: &[Point]| -> f64 {
        let all: Vec<Point> = tasks.iter().chain(relays).copied().collect();
        positions_connectivity(&all, &op_curve)
    };

    let mut tasks = tasks_at(&arcs);
    let mut targets = plan_targets(planner, &tasks, &[], base, &base_curve, scale)?;
    let mut relays = targets.clone();
    let mut ticks = vec![PatrolTick {
        t_s: 0.0,
        lambda2: lambda2_of(&tasks, &relays),
        tasks: tasks.clone(),
        relays: relays.clone(),
    }];
    let steps = (sim.duration_s / sim.period_s).floor() as usize;
    let relay_step = sim.relay_speed_mps * sim.period_s;
    for k in 1..=steps {
        for (arc, v) in arcs.iter_mut().zip(&speeds) {
            *arc += v * sim.period_s;
        }
        tasks = tasks_at(&arcs);
        for (r, t) in relays.iter_mut().zip(&targets) {
            *r = r.step_toward(*t, relay_step);
        }
        ticks.push(PatrolTick {
            t_s: k as f64 * sim.period_s,
            lambda2: lambda2_of(&tasks, &relays),
            tasks: tasks.clone(),
            relays: relays.clone(),
        });
        if k == steps {
            break;
        }
        targets = plan_targets(planner, &tasks, &relays, base, &base_curve, scale)?;
        relays = assign_targets(&relays, &targets)
            .into_iter()
            .zip(&targets)
            .map(|(slot, t)| match slot {
                Some(i) => relays[i],
                None => *tasks
                    .iter()
                    .min_by(|a, b| a.distance(*t).total_cmp(&b.distance(*t)))
                    .expect("at least two tasks"),
            })
            .collect();
    }
    Ok(PatrolLog { scale, ticks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_interpolation() {
        let sq = PatrolParams::default().waypoints;
        assert_eq!(point_on_loop(&sq, 0.0), Point::new(-100.0, -100.0));
        assert_eq!(point_on_loop(&sq, 250.0), Point::new(100.0, -50.0));
        assert_eq!(point_on_loop(&sq, 850.0), Point::new(-50.0, -100.0));
    }

    #[test]
    fn assignment_is_injective() {
        let relays = [Point::new(0.0, 0.0), Point::new(10.0, 0.0)];
        let targets = [Point::new(9.0, 0.0), Point::new(1.0, 0.0), Point::new(50.0, 0.0)];
        assert_eq!(assign_targets(&relays, &targets), vec![Some(1), Some(0), None]);
    }

    #[test]
    fn rejects_nonpositive_relay_speed() {
        let sim = PatrolParams {
            relay_speed_mps: 0.0,
            ..Default::default()
        };
        let err = simulate_patrol(&sim, &Planner::Expert(Default::default()), &ChannelParams::default());
        assert!(matches!(err, Err(PipelineError::InvalidArgument(_))));
    }
}
