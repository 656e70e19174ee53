//! Optimization-based relay placement.
//!
//! Each iteration linearizes every channel rate around the current relay
//! positions, which makes the Laplacian affine in the next positions. The
//! relays then move to maximize `γ` subject to `PᵀLP ⪰ γI`, with each relay
//! coordinate confined to a trust region of half-width `Δ` around its current
//! value. Steps are accepted only if the true algebraic connectivity does not
//! drop; otherwise `Δ` is halved and the step retried.

mod basis;
mod lmi;
mod mst;

pub use basis::orthonormal_complement_basis;
pub use lmi::{AffineLmi, BarrierSolver, LmiSolution, LmiSolver};
pub use mst::{euclidean_mst, mst_feasible_init};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

use crate::channel::ChannelCurve;
use crate::geometry::Point;
use crate::netgraph::{laplacian_of, positions_connectivity, RateGraph, TeamConfig, TeamError,
    CONNECTIVITY_TOLERANCE};

/// Slack allowed on the true connectivity when accepting a step.
pub const ACCEPTANCE_SLACK: f64 = 1e-6;
const MAX_HALVINGS: usize = 5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpertError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("initial configuration is disconnected (lambda2 = {lambda2:e})")]
    InfeasibleInit { lambda2: f64 },
    #[error("LMI solver failed: {0}")]
    Solver(String),
    #[error(transparent)]
    Team(#[from] TeamError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpertParams {
    /// Per-coordinate trust region half-width `Δ`, meters.
    pub trust_region_m: f64,
    pub max_iterations: usize,
    /// Change in connectivity counted as a stall.
    pub convergence_tol: f64,
    /// Consecutive stalls that end the optimization.
    pub stall_iterations: usize,
}

impl Default for ExpertParams {
    fn default() -> Self {
        ExpertParams {
            trust_region_m: 2.5,
            max_iterations: 100,
            convergence_tol: 1e-4,
            stall_iterations: 2,
        }
    }
}

impl ExpertParams {
    /// Settings used when timing the expert: at most 20 iterations.
    pub fn benchmark() -> Self {
        ExpertParams {
            max_iterations: 20,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<(), ExpertError> {
        if !(self.trust_region_m > 0.0) || self.max_iterations == 0 {
            return Err(ExpertError::InvalidArgument(
                "trust region must be positive and max_iterations >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpertSolution {
    pub comm_positions: Vec<Point>,
    /// Objective of the last accepted subproblem (connectivity predicted by
    /// the linearized model).
    pub gamma: f64,
    /// True algebraic connectivity of the final configuration.
    pub lambda2: f64,
    /// Connectivity of the seed configuration.
    pub initial_lambda2: f64,
    /// Accepted steps.
    pub iterations: usize,
    /// True connectivity after each accepted step.
    pub gamma_trace: Vec<f64>,
}

/// Builds the trust-region subproblem around the current configuration.
/// Variables are the displacements `(dx_0, dy_0, dx_1, dy_1, ...)` of the
/// relays.
pub fn linearized_problem(
    tasks: &[Point],
    relays: &[Point],
    curve: &ChannelCurve,
    trust_region_m: f64,
) -> Result<AffineLmi, ExpertError> {
    let positions: Vec<Point> = tasks.iter().chain(relays).copied().collect();
    let n = positions.len();
    let basis = orthonormal_complement_basis(n)?;
    let graph = RateGraph::from_positions(&positions, curve);
    let constant = basis.transpose() * laplacian_of(graph.weights()) * &basis;

    let rows: Vec<DVector<f64>> = (0..n).map(|k| basis.row(k).transpose()).collect();
    let dim = n - 1;
    let mut coefficients = Vec::with_capacity(2 * relays.len());
    for r in 0..relays.len() {
        let node = tasks.len() + r;
        let mut fx = DMatrix::zeros(dim, dim);
        let mut fy = DMatrix::zeros(dim, dim);
        for other in 0..n {
            if other == node {
                continue;
            }
            let g = curve.rate_gradient(positions[node], positions[other]);
            if g == Point::ORIGIN {
                continue;
            }
            // Pᵀ (e_node - e_other)(e_node - e_other)ᵀ P
            let diff = &rows[node] - &rows[other];
            let outer = &diff * diff.transpose();
            fx += &outer * g.x;
            fy += &outer * g.y;
        }
        coefficients.push(fx);
        coefficients.push(fy);
    }
    let nvar = coefficients.len();
    Ok(AffineLmi {
        constant,
        coefficients,
        lower: vec![-trust_region_m; nvar],
        upper: vec![trust_region_m; nvar],
    })
}

/// One trust-region step with an explicit solver and step size.
pub fn sdp_step_with(
    solver: &dyn LmiSolver,
    tasks: &[Point],
    relays: &[Point],
    curve: &ChannelCurve,
    trust_region_m: f64,
) -> Result<(Vec<Point>, f64), ExpertError> {
    let problem = linearized_problem(tasks, relays, curve, trust_region_m)?;
    if relays.is_empty() {
        let gamma = SymmetricEigen::new(problem.constant).eigenvalues.min();
        return Ok((Vec::new(), gamma));
    }
    let sol = solver.solve(&problem)?;
    let moved = relays
        .iter()
        .enumerate()
        .map(|(r, &p)| {
            let dx = sol.variables[2 * r].clamp(-trust_region_m, trust_region_m);
            let dy = sol.variables[2 * r + 1].clamp(-trust_region_m, trust_region_m);
            p + Point::new(dx, dy)
        })
        .collect();
    Ok((moved, sol.gamma))
}

/// One step of the expert from a connected configuration.
pub fn sdp_step(
    config: &TeamConfig,
    curve: &ChannelCurve,
    params: &ExpertParams,
) -> Result<(Vec<Point>, f64), ExpertError> {
    params.validate()?;
    let lambda2 = positions_connectivity(&config.positions(), curve);
    if lambda2 <= CONNECTIVITY_TOLERANCE {
        return Err(ExpertError::InfeasibleInit { lambda2 });
    }
    sdp_step_with(
        &BarrierSolver::default(),
        config.task_positions(),
        config.comm_positions(),
        curve,
        params.trust_region_m,
    )
}

/// Locally maximizes algebraic connectivity over relay positions, seeded by
/// `init` or by [`mst_feasible_init`].
pub fn optimize(
    task_positions: &[Point],
    curve: &ChannelCurve,
    params: &ExpertParams,
    init: Option<&[Point]>,
) -> Result<ExpertSolution, ExpertError> {
    optimize_with(&BarrierSolver::default(), task_positions, curve, params, init)
}

pub fn optimize_with(
    solver: &dyn LmiSolver,
    task_positions: &[Point],
    curve: &ChannelCurve,
    params: &ExpertParams,
    init: Option<&[Point]>,
) -> Result<ExpertSolution, ExpertError> {
    params.validate()?;
    let mut relays = match init {
        Some(seed) => seed.to_vec(),
        None => mst_feasible_init(task_positions, curve),
    };
    // validates task count and finiteness
    let config = TeamConfig::new(task_positions.to_vec(), relays.clone())?;
    let mut lambda2 = positions_connectivity(&config.positions(), curve);
    if lambda2 <= CONNECTIVITY_TOLERANCE {
        return Err(ExpertError::InfeasibleInit { lambda2 });
    }
    let initial_lambda2 = lambda2;
    let mut solution = ExpertSolution {
        comm_positions: Vec::new(),
        gamma: lambda2,
        lambda2,
        initial_lambda2,
        iterations: 0,
        gamma_trace: Vec::new(),
    };
    if relays.is_empty() {
        return Ok(solution);
    }

    let mut stalls = 0;
    for _ in 0..params.max_iterations {
        let mut delta = params.trust_region_m;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            if let Ok((candidate, gamma)) =
                sdp_step_with(solver, task_positions, &relays, curve, delta)
            {
                let all: Vec<Point> = task_positions.iter().chain(&candidate).copied().collect();
                let next = positions_connectivity(&all, curve);
                if next >= lambda2 - ACCEPTANCE_SLACK {
                    accepted = Some((candidate, gamma, next));
                    break;
                }
            }
            delta *= 0.5;
        }
        let Some((candidate, gamma, next)) = accepted else {
            break;
        };
        let change = next - lambda2;
        relays = candidate;
        lambda2 = next;
        solution.gamma = gamma;
        solution.iterations += 1;
        solution.gamma_trace.push(next);
        if change.abs() < params.convergence_tol {
            stalls += 1;
            if stalls >= params.stall_iterations {
                break;
            }
        } else {
            stalls = 0;
        }
    }
    solution.comm_positions = relays;
    solution.lambda2 = lambda2;
    Ok(solution)
}
