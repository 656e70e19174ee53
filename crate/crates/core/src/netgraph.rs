//! Communication graphs induced by a team configuration.
//!
//! Nodes are ordered task agents first, then communication agents. Edge
//! weights are channel rates, so an edge exists exactly when two agents are
//! closer than the cutoff distance.

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::channel::{ChannelCurve, ChannelError, ChannelParams};
use crate::geometry::Point;

/// Algebraic connectivity above this counts as connected.
pub const CONNECTIVITY_TOLERANCE: f64 = 1e-8;

/// Resolution of the transmit-power search, in dB.
pub const POWER_RESOLUTION_DB: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TeamError {
    #[error("a team needs at least two task agents, got {0}")]
    TooFewTasks(usize),
    #[error("non-finite coordinate at node {0}")]
    NonFinite(usize),
}

/// Positions of the task team and the communication team.
#[derive(Clone, Debug, PartialEq)]
pub struct TeamConfig {
    task_positions: Vec<Point>,
    comm_positions: Vec<Point>,
}

impl TeamConfig {
    pub fn new(task_positions: Vec<Point>, comm_positions: Vec<Point>) -> Result<Self, TeamError> {
        if task_positions.len() < 2 {
            return Err(TeamError::TooFewTasks(task_positions.len()));
        }
        if let Some(i) = task_positions
            .iter()
            .chain(&comm_positions)
            .position(|p| !p.is_finite())
        {
            return Err(TeamError::NonFinite(i));
        }
        Ok(TeamConfig {
            task_positions,
            comm_positions,
        })
    }

    pub fn task_positions(&self) -> &[Point] {
        &self.task_positions
    }

    pub fn comm_positions(&self) -> &[Point] {
        &self.comm_positions
    }

    pub fn node_count(&self) -> usize {
        self.task_positions.len() + self.comm_positions.len()
    }

    /// All positions, tasks first.
    pub fn positions(&self) -> Vec<Point> {
        self.task_positions
            .iter()
            .chain(&self.comm_positions)
            .copied()
            .collect()
    }
}

/// Symmetric matrix of pairwise rates with a zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct RateGraph {
    weights: DMatrix<f64>,
}

impl RateGraph {
    pub fn from_positions(positions: &[Point], curve: &ChannelCurve) -> Self {
        let n = positions.len();
        let mut weights = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let w = curve.rate_between(positions[i], positions[j]);
                weights[(i, j)] = w;
                weights[(j, i)] = w;
            }
        }
        RateGraph { weights }
    }

    /// Builds a graph from an explicit weight matrix. The upper triangle is
    /// mirrored and the diagonal cleared.
    pub fn from_weights(mut weights: DMatrix<f64>) -> Self {
        assert!(weights.is_square(), "weight matrix must be square");
        let n = weights.nrows();
        for i in 0..n {
            weights[(i, i)] = 0.0;
            for j in (i + 1)..n {
                weights[(j, i)] = weights[(i, j)];
            }
        }
        RateGraph { weights }
    }

    pub fn size(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }
}

pub fn adjacency(config: &TeamConfig, curve: &ChannelCurve) -> RateGraph {
    RateGraph::from_positions(&config.positions(), curve)
}

/// `L = diag(A·1) - A`.
pub fn laplacian(graph: &RateGraph) -> DMatrix<f64> {
    laplacian_of(graph.weights())
}

pub(crate) fn laplacian_of(weights: &DMatrix<f64>) -> DMatrix<f64> {
    let n = weights.nrows();
    let mut lap = -weights.clone();
    for i in 0..n {
        lap[(i, i)] = weights.row(i).sum() - weights[(i, i)];
    }
    lap
}

/// Second-smallest Laplacian eigenvalue, clamped at zero. Graphs with fewer
/// than two nodes have connectivity zero.
pub fn algebraic_connectivity(graph: &RateGraph) -> f64 {
    if graph.size() < 2 {
        return 0.0;
    }
    let mut eig = SymmetricEigen::new(laplacian(graph)).eigenvalues.as_slice().to_vec();
    eig.sort_by(f64::total_cmp);
    eig[1].max(0.0)
}

/// Breadth-first reachability over strictly positive edges.
pub fn is_connected(graph: &RateGraph) -> bool {
    let n = graph.size();
    if n <= 1 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut reached = 1;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if !seen[j] && graph.weights[(i, j)] > 0.0 {
                seen[j] = true;
                reached += 1;
                stack.push(j);
            }
        }
    }
    reached == n
}

pub fn positions_connected(positions: &[Point], curve: &ChannelCurve) -> bool {
    is_connected(&RateGraph::from_positions(positions, curve))
}

pub fn positions_connectivity(positions: &[Point], curve: &ChannelCurve) -> f64 {
    algebraic_connectivity(&RateGraph::from_positions(positions, curve))
}

/// Least transmit power in `[params.transmit_power_dbm, p_max_dbm]` that
/// connects the team, to [`POWER_RESOLUTION_DB`]. Returns `Ok(None)` when the
/// team stays disconnected at `p_max_dbm`.
pub fn min_connecting_power(
    config: &TeamConfig,
    params: &ChannelParams,
    p_max_dbm: f64,
) -> Result<Option<f64>, ChannelError> {
    min_connecting_power_for(&config.positions(), params, p_max_dbm)
}

pub fn min_connecting_power_for(
    positions: &[Point],
    params: &ChannelParams,
    p_max_dbm: f64,
) -> Result<Option<f64>, ChannelError> {
    let connected_at = |dbm: f64| -> Result<bool, ChannelError> {
        let curve = ChannelCurve::new(params.with_transmit_power(dbm))?;
        Ok(positions_connected(positions, &curve))
    };
    let floor = params.transmit_power_dbm;
    if connected_at(floor)? {
        return Ok(Some(floor));
    }
    if p_max_dbm <= floor || !connected_at(p_max_dbm)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (floor, p_max_dbm);
    while hi - lo > POWER_RESOLUTION_DB {
        let mid = 0.5 * (lo + hi);
        if connected_at(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}
