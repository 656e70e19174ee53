use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::PipelineError;
use crate::channel::ChannelCurve;
use crate::expert::mst_feasible_init;
use crate::geometry::Point;
use crate::imaging::{render, GridSpec};

pub const MIN_TASK_SEPARATION_M: f64 = 2.5;
pub const MAX_SAMPLING_ATTEMPTS: usize = 1000;

/// Draws `n` task positions uniformly from the centered square of half-side
/// `extent / 4`, redrawing all of them until every pair is at least
/// [`MIN_TASK_SEPARATION_M`] apart and the MST-seeded team fits the canvas.
pub fn sample_task_config(
    n: usize,
    grid: &GridSpec,
    curve: &ChannelCurve,
    seed: u64,
) -> Result<Vec<Point>, PipelineError> {
    if n < 2 {
        return Err(PipelineError::InvalidArgument(format!("need at least 2 tasks, got {n}")));
    }
    let half = grid.extent_m() / 4.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        let tasks: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.random_range(-half..=half), rng.random_range(-half..=half)))
            .collect();
        let separated = tasks.iter().enumerate().all(|(i, a)| {
            tasks[i + 1..].iter().all(|b| a.distance(*b) >= MIN_TASK_SEPARATION_M)
        });
        if !separated {
            continue;
        }
        let mut team = tasks.clone();
        team.extend(mst_feasible_init(&tasks, curve));
        if render(&team, grid).is_ok() {
            return Ok(tasks);
        }
    }
    Err(PipelineError::Sampling {
        attempts: MAX_SAMPLING_ATTEMPTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelParams;

    #[test]
    fn deterministic_and_bounded() {
        let c = ChannelCurve::new(ChannelParams::default()).unwrap();
        let g = GridSpec::default();
        let a = sample_task_config(5, &g, &c, 42).unwrap();
        assert_eq!(a, sample_task_config(5, &g, &c, 42).unwrap());
        assert!(a.iter().all(|p| p.x.abs() <= 80.0 && p.y.abs() <= 80.0));
    }

    #[test]
    fn one_task_is_rejected() {
        let c = ChannelCurve::new(ChannelParams::default()).unwrap();
        assert!(sample_task_config(1, &GridSpec::default(), &c, 0).is_err());
    }
}
