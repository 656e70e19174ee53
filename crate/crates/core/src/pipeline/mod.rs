//! Experiment harness: dataset generation, scenario suites, statistics,
//! timing, and the dynamic patrol simulation.

mod bench;
mod dataset;
mod patrol;
mod planner;
mod sampling;
mod scenarios;
mod stats;
mod tasks_csv;

pub use bench::{bench_timing, team_with_total_agents, TimingRow};
pub use dataset::{generate_dataset, generate_sample, read_manifest, DatasetConfig, DatasetSample,
    DatasetSummary, GeneratedSample, MANIFEST_FILE};
pub use patrol::{assign_targets, simulate_patrol, PatrolLog, PatrolParams, PatrolTick};
pub use planner::{plan, PlanOutcome, Planner};
pub use sampling::{sample_task_config, MAX_SAMPLING_ATTEMPTS, MIN_TASK_SEPARATION_M};
pub use scenarios::{circle_tasks, line_tasks, run_circle_scenario, run_line_scenario, ScenarioRow};
pub use stats::{eval_statistics, EvalCase, EvalReport, Histogram};
pub use tasks_csv::{parse_tasks_csv, read_tasks_csv, write_tasks_csv};

use thiserror::Error;

use crate::channel::ChannelError;
use crate::cnn_runtime::CnnError;
use crate::expert::ExpertError;
use crate::imaging::ImagingError;
use crate::netgraph::TeamError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no valid task configuration after {attempts} attempts")]
    Sampling { attempts: usize },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Team(#[from] TeamError),
    #[error(transparent)]
    Expert(#[from] ExpertError),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Cnn(#[from] CnnError),
    #[error("manifest line {line}: {source}")]
    Manifest {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
