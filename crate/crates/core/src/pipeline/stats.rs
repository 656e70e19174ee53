use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::{plan, DatasetSample, PipelineError, Planner};
use crate::channel::ChannelParams;

/// Normalized histogram over integer bins.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Histogram {
    /// `(bin, mass)`, ascending by bin. Masses sum to one unless empty.
    pub bins: Vec<(i64, f64)>,
}

impl Histogram {
    fn from_bins(values: impl Iterator<Item = i64>) -> Self {
        let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
        let mut total = 0usize;
        for v in values {
            *counts.entry(v).or_default() += 1;
            total += 1;
        }
        Histogram {
            bins: counts
                .into_iter()
                .map(|(b, c)| (b, c as f64 / total as f64))
                .collect(),
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.bins.iter().map(|b| b.1).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalCase {
    pub id: String,
    pub tasks: usize,
    pub expert_relays: usize,
    pub planner_relays: usize,
    /// `None` when unconnectable below the ceiling.
    pub power_dbm: Option<f64>,
}

impl EvalCase {
    /// Connected without raising power above the dataset's default.
    pub fn at_default_power(&self, default_dbm: f64) -> bool {
        self.power_dbm == Some(default_dbm)
    }

    pub fn relay_diff(&self) -> i64 {
        self.planner_relays as i64 - self.expert_relays as i64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub cases: Vec<EvalCase>,
    /// Required power, 1 dBm bins (floor), over connectable cases.
    pub power_histogram: Histogram,
    /// Planner minus expert relay count, over default-power cases.
    pub diff_histogram: Histogram,
    pub mean_power_dbm: f64,
    pub var_power_dbm: f64,
    pub mean_diff: f64,
    pub var_diff: f64,
    pub unconnected: usize,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// Runs `planner` on every sample's tasks at the sample's power and compares
/// against the recorded expert relays.
pub fn eval_statistics(
    samples: &[DatasetSample],
    planner: &Planner,
    params: &ChannelParams,
    p_max_dbm: f64,
) -> Result<EvalReport, PipelineError> {
    let mut cases = Vec::with_capacity(samples.len());
    for s in samples {
        let p = params.with_transmit_power(s.transmit_power_dbm);
        let out = plan(planner, &s.task_positions, &p, p_max_dbm)?;
        cases.push(EvalCase {
            id: s.id.clone(),
            tasks: s.task_positions.len(),
            expert_relays: s.expert_comm_positions.len(),
            planner_relays: out.comm_positions.len(),
            power_dbm: out.power_dbm,
        });
    }
    let powers: Vec<f64> = cases.iter().filter_map(|c| c.power_dbm).collect();
    let defaults: Vec<&EvalCase> = cases
        .iter()
        .zip(samples)
        .filter(|(c, s)| c.at_default_power(s.transmit_power_dbm))
        .map(|(c, _)| c)
        .collect();
    let diffs: Vec<f64> = defaults.iter().map(|c| c.relay_diff() as f64).collect();
    let (mean_power_dbm, var_power_dbm) = mean_var(&powers);
    let (mean_diff, var_diff) = mean_var(&diffs);
    Ok(EvalReport {
        power_histogram: Histogram::from_bins(powers.iter().map(|p| p.floor() as i64)),
        diff_histogram: Histogram::from_bins(defaults.iter().map(|c| c.relay_diff())),
        unconnected: cases.len() - powers.len(),
        cases,
        mean_power_dbm,
        var_power_dbm,
        mean_diff,
        var_diff,
    })
}

impl EvalReport {
    /// Both histograms as `histogram,bin,mass` rows.
    pub fn write_histograms_csv<W: Write>(&self, writer: W) -> Result<(), PipelineError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["histogram", "bin", "mass"])?;
        for (name, h) in [("power_dbm", &self.power_histogram), ("relay_diff", &self.diff_histogram)] {
            for (bin, mass) in &h.bins {
                w.write_record([name.to_string(), bin.to_string(), mass.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
