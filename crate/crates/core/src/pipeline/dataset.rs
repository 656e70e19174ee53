use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use log::{info, warn};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sample_task_config, PipelineError};
use crate::channel::{ChannelCurve, ChannelParams};
use crate::expert::{optimize, ExpertParams};
use crate::geometry::Point;
use crate::imaging::{render, GridSpec, IntensityImage};
use crate::netgraph::CONNECTIVITY_TOLERANCE;

pub const MANIFEST_FILE: &str = "manifest.jsonl";
// Redraws allowed per sample before generation gives up.
const MAX_RESEEDS: u64 = 100;

/// One manifest record. Image paths are relative to the dataset directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSample {
    pub id: String,
    pub seed: u64,
    pub task_positions: Vec<Point>,
    pub expert_comm_positions: Vec<Point>,
    pub transmit_power_dbm: f64,
    pub lambda2: f64,
    pub input_image: String,
    pub target_image: String,
    pub meters_per_pixel: f64,
    pub resolution_px: usize,
}

impl DatasetSample {
    pub fn grid(&self) -> Result<GridSpec, PipelineError> {
        Ok(GridSpec::new(self.resolution_px, self.meters_per_pixel)?)
    }

    pub fn to_json_line(&self) -> Result<String, PipelineError> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json_line(line: &str) -> Result<Self, PipelineError> {
        let s: DatasetSample = serde_json::from_str(line)?;
        s.grid()?;
        Ok(s)
    }
}

/// A sample with its rendered image pair, before anything touches disk.
#[derive(Clone, Debug)]
pub struct GeneratedSample {
    pub record: DatasetSample,
    pub input: IntensityImage,
    pub target: IntensityImage,
}

/// Samples `n` tasks, optimizes relays from the MST seed and renders the
/// task image (input) and relay image (target).
pub fn generate_sample(
    n: usize,
    seed: u64,
    params: &ChannelParams,
    expert: &ExpertParams,
    grid: &GridSpec,
) -> Result<GeneratedSample, PipelineError> {
    let curve = ChannelCurve::new(*params)?;
    let tasks = sample_task_config(n, grid, &curve, seed)?;
    let input = render(&tasks, grid)?;
    let sol = optimize(&tasks, &curve, expert, None)?;
    if sol.lambda2 <= CONNECTIVITY_TOLERANCE {
        return Err(PipelineError::InvalidArgument(format!(
            "expert returned a disconnected team (lambda2 = {:e})",
            sol.lambda2
        )));
    }
    let target = render(&sol.comm_positions, grid)?;
    let id = format!("{seed:016x}");
    Ok(GeneratedSample {
        record: DatasetSample {
            input_image: format!("input_{id}.png"),
            target_image: format!("target_{id}.png"),
            id,
            seed,
            task_positions: tasks,
            expert_comm_positions: sol.comm_positions,
            transmit_power_dbm: params.transmit_power_dbm,
            lambda2: sol.lambda2,
            meters_per_pixel: grid.meters_per_pixel,
            resolution_px: grid.resolution_px,
        },
        input,
        target,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetConfig {
    pub count: usize,
    pub agents_min: usize,
    pub agents_max: usize,
    pub base_seed: u64,
    pub grid: GridSpec,
    pub channel: ChannelParams,
    pub expert: ExpertParams,
    pub parallel: bool,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            count: 100,
            agents_min: 2,
            agents_max: 6,
            base_seed: 0,
            grid: GridSpec::default(),
            channel: ChannelParams::default(),
            expert: ExpertParams::default(),
            parallel: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSummary {
    pub samples: Vec<DatasetSample>,
    /// Draws rejected because sampling or the expert failed.
    pub discarded: usize,
}

// Sample `index` uses seed `base + index`; on failure it redraws with seeds
// offset by multiples of 2^32 so they never collide with other indices.
fn generate_indexed(
    cfg: &DatasetConfig,
    index: usize,
) -> Result<(GeneratedSample, usize), PipelineError> {
    let seed = cfg.base_seed.wrapping_add(index as u64);
    let n = ChaCha8Rng::seed_from_u64(seed).random_range(cfg.agents_min..=cfg.agents_max);
    let mut last = None;
    for attempt in 0..MAX_RESEEDS {
        let s = seed.wrapping_add(attempt << 32);
        match generate_sample(n, s, &cfg.channel, &cfg.expert, &cfg.grid) {
            Ok(sample) => return Ok((sample, attempt as usize)),
            Err(e) => {
                warn!("sample {index} seed {s}: {e}; reseeding");
                last = Some(e);
            }
        }
    }
    Err(last.unwrap_or(PipelineError::Sampling { attempts: 0 }))
}

/// Writes `count` samples (PNG pairs plus `manifest.jsonl`) into `out_dir`.
pub fn generate_dataset(cfg: &DatasetConfig, out_dir: &Path) -> Result<DatasetSummary, PipelineError> {
    if cfg.agents_min < 2 || cfg.agents_max < cfg.agents_min {
        return Err(PipelineError::InvalidArgument(format!(
            "agent range {}..={} is empty or below 2",
            cfg.agents_min, cfg.agents_max
        )));
    }
    fs::create_dir_all(out_dir)?;
    let work = |index: usize| -> Result<(DatasetSample, usize), PipelineError> {
        let (sample, discarded) = generate_indexed(cfg, index)?;
        sample.input.save_png(&out_dir.join(&sample.record.input_image))?;
        sample.target.save_png(&out_dir.join(&sample.record.target_image))?;
        Ok((sample.record, discarded))
    };
    let results: Vec<Result<(DatasetSample, usize), PipelineError>> = if cfg.parallel {
        (0..cfg.count).into_par_iter().map(work).collect()
    } else {
        (0..cfg.count).map(work).collect()
    };
    let mut samples = Vec::with_capacity(cfg.count);
    let mut discarded = 0;
    for r in results {
        let (s, d) = r?;
        samples.push(s);
        discarded += d;
    }
    let mut manifest = BufWriter::new(fs::File::create(out_dir.join(MANIFEST_FILE))?);
    for s in &samples {
        writeln!(manifest, "{}", s.to_json_line()?)?;
    }
    manifest.flush()?;
    info!("wrote {} samples ({discarded} draws discarded)", samples.len());
    Ok(DatasetSummary { samples, discarded })
}

/// Reads every record of `dir/manifest.jsonl`, skipping blank lines.
pub fn read_manifest(dir: &Path) -> Result<Vec<DatasetSample>, PipelineError> {
    let reader = BufReader::new(fs::File::open(dir.join(MANIFEST_FILE))?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let s = serde_json::from_str::<DatasetSample>(&line)
            .map_err(|source| PipelineError::Manifest { line: i + 1, source })?;
        s.grid()?;
        out.push(s);
    }
    Ok(out)
}
