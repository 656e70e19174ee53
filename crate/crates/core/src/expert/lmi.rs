//! Box-constrained maximization of the smallest eigenvalue of an affine
//! matrix function:
//!
//! ```text
//! maximize γ  subject to  F0 + Σ z_i F_i - γ I ⪰ 0,   lower ≤ z ≤ upper
//! ```
//!
//! [`BarrierSolver`] follows the central path of the log-det barrier with
//! damped Newton steps.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use super::ExpertError;

/// An affine LMI with a box on the decision variables.
#[derive(Clone, Debug)]
pub struct AffineLmi {
    /// Symmetric constant term `F0`.
    pub constant: DMatrix<f64>,
    /// Symmetric coefficient `F_i` for each decision variable.
    pub coefficients: Vec<DMatrix<f64>>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LmiSolution {
    pub variables: Vec<f64>,
    pub gamma: f64,
}

/// A solver for [`AffineLmi`] problems.
pub trait LmiSolver: Send + Sync {
    fn solve(&self, problem: &AffineLmi) -> Result<LmiSolution, ExpertError>;
}

#[derive(Clone, Debug)]
pub struct BarrierSolver {
    /// Stop once the duality-gap bound `m / t` drops below this.
    pub gap_tolerance: f64,
    /// Barrier weight growth per outer iteration.
    pub growth: f64,
    /// Newton steps allowed per centering.
    pub max_newton_steps: usize,
}

impl Default for BarrierSolver {
    fn default() -> Self {
        BarrierSolver {
            gap_tolerance: 1e-9,
            growth: 12.0,
            max_newton_steps: 60,
        }
    }
}

struct Barrier<'a> {
    problem: &'a AffineLmi,
    dim: usize,
}

struct Eval {
    value: f64,
    inverse: DMatrix<f64>,
}

impl Barrier<'_> {
    fn slack(&self, z: &[f64], gamma: f64) -> DMatrix<f64> {
        let mut s = self.problem.constant.clone();
        for (zi, fi) in z.iter().zip(&self.problem.coefficients) {
            if *zi != 0.0 {
                s += fi * *zi;
            }
        }
        for i in 0..self.dim {
            s[(i, i)] -= gamma;
        }
        s
    }

    /// Barrier objective at `(z, γ)`, or `None` outside the domain.
    fn eval(&self, t: f64, z: &[f64], gamma: f64) -> Option<Eval> {
        let mut box_term = 0.0;
        for ((&zi, &lo), &hi) in z.iter().zip(&self.problem.lower).zip(&self.problem.upper) {
            if !(zi > lo && zi < hi) {
                return None;
            }
            box_term -= (hi - zi).ln() + (zi - lo).ln();
        }
        let chol = Cholesky::<f64, Dyn>::new(self.slack(z, gamma))?;
        let log_det: f64 = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
        if !log_det.is_finite() {
            return None;
        }
        Some(Eval {
            value: -t * gamma - log_det + box_term,
            inverse: chol.inverse(),
        })
    }
}

fn trace_product(a: &DMatrix<f64>, b_transposed: &DMatrix<f64>) -> f64 {
    a.iter().zip(b_transposed.iter()).map(|(x, y)| x * y).sum()
}

impl LmiSolver for BarrierSolver {
    fn solve(&self, problem: &AffineLmi) -> Result<LmiSolution, ExpertError> {
        let dim = problem.constant.nrows();
        let nvar = problem.coefficients.len();
        if problem.lower.len() != nvar || problem.upper.len() != nvar {
            return Err(ExpertError::Solver("box bounds do not match variable count".into()));
        }
        if problem.lower.iter().zip(&problem.upper).any(|(l, u)| !(l < u)) {
            return Err(ExpertError::Solver("empty box".into()));
        }
        if dim == 0 {
            return Err(ExpertError::Solver("empty matrix inequality".into()));
        }
        let barrier = Barrier { problem, dim };

        let mut z: Vec<f64> = problem
            .lower
            .iter()
            .zip(&problem.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect();
        let lam_min = SymmetricEigen::new(barrier.slack(&z, 0.0)).eigenvalues.min();
        if !lam_min.is_finite() {
            return Err(ExpertError::Solver("non-finite problem data".into()));
        }
        let scale = lam_min.abs().max(1e-3);
        let mut gamma = lam_min - 0.1 * scale;
        let constraints = (dim + 2 * nvar) as f64;
        let mut t = constraints / scale;

        let nz = nvar + 1;
        loop {
            for _ in 0..self.max_newton_steps {
                let Some(here) = barrier.eval(t, &z, gamma) else {
                    return Err(ExpertError::Solver("left the barrier domain".into()));
                };
                let inv = &here.inverse;
                let weighted: Vec<DMatrix<f64>> =
                    problem.coefficients.iter().map(|f| inv * f).collect();
                let weighted_t: Vec<DMatrix<f64>> =
                    weighted.iter().map(|w| w.transpose()).collect();

                let mut grad = DVector::zeros(nz);
                let mut hess = DMatrix::zeros(nz, nz);
                for i in 0..nvar {
                    let (lo, hi) = (problem.lower[i], problem.upper[i]);
                    let (a, b) = (hi - z[i], z[i] - lo);
                    grad[i] = -weighted[i].trace() + 1.0 / a - 1.0 / b;
                    hess[(i, i)] += 1.0 / (a * a) + 1.0 / (b * b);
                    for j in 0..=i {
                        let h = trace_product(&weighted[i], &weighted_t[j]);
                        hess[(i, j)] += h;
                        if i != j {
                            hess[(j, i)] += h;
                        }
                    }
                    // d²/dz_i dγ of -log det(S) = -tr(S⁻¹ F_i S⁻¹)
                    let cross = -trace_product(&weighted[i], inv);
                    hess[(i, nvar)] = cross;
                    hess[(nvar, i)] = cross;
                }
                grad[nvar] = -t + inv.trace();
                hess[(nvar, nvar)] = inv.iter().map(|v| v * v).sum();

                let step = match Cholesky::new(hess.clone()) {
                    Some(c) => c.solve(&(-&grad)),
                    None => {
                        let ridge = 1e-12 * hess.diagonal().amax().max(1.0);
                        let mut h = hess;
                        for i in 0..nz {
                            h[(i, i)] += ridge;
                        }
                        Cholesky::new(h)
                            .ok_or_else(|| ExpertError::Solver("singular Newton system".into()))?
                            .solve(&(-&grad))
                    }
                };
                let slope = grad.dot(&step);
                if -slope * 0.5 < 1e-11 {
                    break;
                }
                let mut s = 1.0;
                let mut moved = false;
                while s > 1e-14 {
                    let zt: Vec<f64> = z.iter().enumerate().map(|(i, v)| v + s * step[i]).collect();
                    let gt = gamma + s * step[nvar];
                    if let Some(there) = barrier.eval(t, &zt, gt) {
                        if there.value <= here.value + 0.25 * s * slope {
                            z = zt;
                            gamma = gt;
                            moved = true;
                            break;
                        }
                    }
                    s *= 0.5;
                }
                if !moved {
                    break;
                }
            }
            if constraints / t < self.gap_tolerance {
                break;
            }
            t *= self.growth;
        }
        if !gamma.is_finite() || z.iter().any(|v| !v.is_finite()) {
            return Err(ExpertError::Solver("numerical breakdown".into()));
        }
        Ok(LmiSolution {
            variables: z,
            gamma,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_problem_returns_min_eigenvalue() {
        let problem = AffineLmi {
            constant: DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]),
            coefficients: vec![],
            lower: vec![],
            upper: vec![],
        };
        let sol = BarrierSolver::default().solve(&problem).unwrap();
        let expected = 1.5 - (0.25f64 + 0.25).sqrt();
        assert!((sol.gamma - expected).abs() < 1e-7, "{} vs {expected}", sol.gamma);
    }

    #[test]
    fn diagonal_problem_hits_box_edge() {
        // λ_min(diag(1 + z, 3 - z)) peaks at z = 1 but the box stops at 0.5.
        let problem = AffineLmi {
            constant: DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0])),
            coefficients: vec![DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]))],
            lower: vec![-0.5],
            upper: vec![0.5],
        };
        let sol = BarrierSolver::default().solve(&problem).unwrap();
        assert!((sol.gamma - 1.5).abs() < 1e-6, "{}", sol.gamma);
        assert!((sol.variables[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn interior_optimum() {
        let problem = AffineLmi {
            constant: DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0])),
            coefficients: vec![DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]))],
            lower: vec![-4.0],
            upper: vec![4.0],
        };
        let sol = BarrierSolver::default().solve(&problem).unwrap();
        assert!((sol.gamma - 2.0).abs() < 1e-6);
        assert!((sol.variables[0] - 1.0).abs() < 1e-4);
    }
}
