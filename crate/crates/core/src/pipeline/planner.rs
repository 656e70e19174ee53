use std::sync::Arc;

use super::PipelineError;
use crate::channel::{ChannelCurve, ChannelParams};
use crate::cnn_runtime::{plan_inference, ModelWeights};
use crate::expert::{optimize, ExpertParams};
use crate::geometry::Point;
use crate::imaging::GridSpec;
use crate::netgraph::{min_connecting_power_for, positions_connectivity};

/// Which planner places the relays.
#[derive(Clone, Debug)]
pub enum Planner {
    Expert(ExpertParams),
    Cnn {
        weights: Arc<ModelWeights>,
        grid: GridSpec,
    },
}

impl Planner {
    pub fn name(&self) -> &'static str {
        match self {
            Planner::Expert(_) => "expert",
            Planner::Cnn { .. } => "cnn",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanOutcome {
    pub comm_positions: Vec<Point>,
    /// Least connecting power, or `None` if the team stays disconnected at
    /// the ceiling.
    pub power_dbm: Option<f64>,
    /// Connectivity at `power_dbm`; zero when disconnected.
    pub lambda2: f64,
}

/// Runs a planner on a task team. The expert plans at `params`' power from
/// its MST seed; the CNN planner renders, infers and extracts.
pub fn plan(
    planner: &Planner,
    task_positions: &[Point],
    params: &ChannelParams,
    p_max_dbm: f64,
) -> Result<PlanOutcome, PipelineError> {
    let (comm_positions, power_dbm) = match planner {
        Planner::Expert(ep) => {
            let curve = ChannelCurve::new(*params)?;
            let sol = optimize(task_positions, &curve, ep, None)?;
            let all: Vec<Point> = task_positions.iter().chain(&sol.comm_positions).copied().collect();
            let power = min_connecting_power_for(&all, params, p_max_dbm.max(params.transmit_power_dbm))?;
            (sol.comm_positions, power)
        }
        Planner::Cnn { weights, grid } => {
            let ex = plan_inference(task_positions, weights, grid, params, p_max_dbm)?;
            (ex.comm_positions, ex.power_dbm)
        }
    };
    let lambda2 = match power_dbm {
        Some(p) => {
            let curve = ChannelCurve::new(params.with_transmit_power(p))?;
            let all: Vec<Point> = task_positions.iter().chain(&comm_positions).copied().collect();
            positions_connectivity(&all, &curve)
        }
        None => 0.0,
    };
    Ok(PlanOutcome {
        comm_positions,
        power_dbm,
        lambda2,
    })
}
