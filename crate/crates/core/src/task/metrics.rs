//! Dependent measures computed from a session log.

use serde::{Deserialize, Serialize};

use super::{DistanceClass, TrialEvent};
use crate::error::Result;
use crate::log::SessionLog;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetMetrics {
    pub index: usize,
    pub distance_class: DistanceClass,
    /// From the previous selection (or session start) to this selection.
    pub time_s: f64,
    pub first_miss: u32,
    pub wrong_target: u32,
    /// Time-averaged normalized scale over the interval.
    pub norm_scale: f64,
    /// Scale stayed at 1 for the whole interval.
    pub zoom_free: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    /// `None` for the summary over all classes.
    pub distance_class: Option<DistanceClass>,
    pub n: usize,
    pub mean_s: f64,
    /// Sample standard deviation; 0 for fewer than two observations.
    pub sd_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub targets: Vec<TargetMetrics>,
    pub per_class: Vec<ClassSummary>,
    pub overall: ClassSummary,
    pub first_miss: u32,
    pub wrong_target: u32,
    /// Time-averaged normalized scale over every logged tick.
    pub norm_scale: f64,
    pub zoom_free_count: usize,
    pub total_time_s: f64,
    /// Fewer targets were selected than the plan contains.
    pub truncated: bool,
}

pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

fn summarize(distance_class: Option<DistanceClass>, times: &[f64]) -> ClassSummary {
    let (mean_s, sd_s) = mean_sd(times);
    ClassSummary {
        distance_class,
        n: times.len(),
        mean_s,
        sd_s,
    }
}

#[derive(Default)]
struct Interval {
    ticks: usize,
    norm_sum: f64,
    zoom_free: bool,
    first_miss: u32,
    wrong_target: u32,
}

pub fn compute_metrics(log: &SessionLog) -> Result<MetricsReport> {
    let header = &log.header;
    let stage = header.stage()?;
    let task = &header.task;

    let mut targets = Vec::new();
    let mut interval = Interval {
        zoom_free: true,
        ..Interval::default()
    };
    let mut last_selection_t = 0.0;
    let mut norm_total = 0.0;
    let (mut first_miss, mut wrong_target) = (0, 0);

    for record in &log.records {
        let scale = record.viewport.scale;
        let norm = stage.normalized_scale(scale);
        norm_total += norm;
        interval.ticks += 1;
        interval.norm_sum += norm;
        interval.zoom_free &= task.at_full_scale(scale);

        for event in &record.events {
            match *event {
                TrialEvent::FirstMiss { .. } => {
                    interval.first_miss += 1;
                    first_miss += 1;
                }
                TrialEvent::WrongTarget { .. } => {
                    interval.wrong_target += 1;
                    wrong_target += 1;
                }
                TrialEvent::Selected { target } => {
                    let planned = &header.plan.targets[target];
                    targets.push(TargetMetrics {
                        index: target,
                        distance_class: planned.distance_class,
                        time_s: record.t - last_selection_t,
                        first_miss: interval.first_miss,
                        wrong_target: interval.wrong_target,
                        norm_scale: interval.norm_sum / interval.ticks as f64,
                        zoom_free: interval.zoom_free,
                    });
                    last_selection_t = record.t;
                    interval = Interval {
                        zoom_free: true,
                        ..Interval::default()
                    };
                }
            }
        }
    }

    let per_class = DistanceClass::ALL
        .into_iter()
        .map(|class| {
            let times: Vec<f64> = targets
                .iter()
                .filter(|t| t.distance_class == class)
                .map(|t| t.time_s)
                .collect();
            summarize(Some(class), &times)
        })
        .collect();
    let all_times: Vec<f64> = targets.iter().map(|t| t.time_s).collect();
    let ticks = log.records.len();

    Ok(MetricsReport {
        per_class,
        overall: summarize(None, &all_times),
        first_miss,
        wrong_target,
        norm_scale: if ticks == 0 { 1.0 } else { norm_total / ticks as f64 },
        zoom_free_count: targets.iter().filter(|t| t.zoom_free).count(),
        total_time_s: log.records.last().map_or(0.0, |r| r.t),
        truncated: targets.len() < header.plan.targets.len(),
        targets,
    })
}
