use std::f64::consts::TAU;

use serde::Serialize;

use super::{plan, PipelineError, Planner};
use crate::channel::ChannelParams;
use crate::geometry::Point;

/// One scenario instance and the planner's answer.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioRow {
    /// Task separation (line) or circle radius, meters.
    pub parameter_m: f64,
    pub relays: usize,
    pub lambda2: f64,
    pub power_dbm: Option<f64>,
    #[serde(skip)]
    pub comm_positions: Vec<Point>,
}

/// Two tasks at `(±s/2, 0)`.
pub fn line_tasks(separation_m: f64) -> Vec<Point> {
    vec![Point::new(-separation_m / 2.0, 0.0), Point::new(separation_m / 2.0, 0.0)]
}

/// `n` tasks equally spaced on a circle, the first on the positive x axis.
pub fn circle_tasks(radius_m: f64, n: usize) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let a = TAU * k as f64 / n as f64;
            Point::new(radius_m * a.cos(), radius_m * a.sin())
        })
        .collect()
}

fn run(
    instances: impl Iterator<Item = (f64, Vec<Point>)>,
    planner: &Planner,
    params: &ChannelParams,
    p_max_dbm: f64,
) -> Result<Vec<ScenarioRow>, PipelineError> {
    instances
        .map(|(parameter_m, tasks)| {
            let out = plan(planner, &tasks, params, p_max_dbm)?;
            Ok(ScenarioRow {
                parameter_m,
                relays: out.comm_positions.len(),
                lambda2: out.lambda2,
                power_dbm: out.power_dbm,
                comm_positions: out.comm_positions,
            })
        })
        .collect()
}

/// Two tasks moving apart along the x axis.
pub fn run_line_scenario(
    separations_m: &[f64],
    planner: &Planner,
    params: &ChannelParams,
    p_max_dbm: f64,
) -> Result<Vec<ScenarioRow>, PipelineError> {
    run(
        separations_m.iter().map(|&s| (s, line_tasks(s))),
        planner,
        params,
        p_max_dbm,
    )
}

/// Tasks on the perimeter of an expanding circle.
pub fn run_circle_scenario(
    radii_m: &[f64],
    n_tasks: usize,
    planner: &Planner,
    params: &ChannelParams,
    p_max_dbm: f64,
) -> Result<Vec<ScenarioRow>, PipelineError> {
    if n_tasks < 3 {
        return Err(PipelineError::InvalidArgument(format!(
            "circle scenario needs at least 3 tasks, got {n_tasks}"
        )));
    }
    run(
        radii_m.iter().map(|&r| (r, circle_tasks(r, n_tasks))),
        planner,
        params,
        p_max_dbm,
    )
}
