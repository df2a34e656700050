use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::log::SessionLog;
use crate::task::{compute_metrics, mean_sd, DistanceClass};
use crate::techniques::TechniqueKind;

/// One CSV row: either a single acquisition (`row = "target"`) or an
/// aggregate over a technique x map x class group (`row = "aggregate"`,
/// with class `all` spanning the three distance classes).
///
/// Aggregates carry the mean and sample sd of `time_s`, the mean of
/// `norm_scale`, and totals of the error and zoom-free counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRow {
    pub row: String,
    pub session: String,
    pub technique: String,
    pub map: String,
    pub class: String,
    pub target: String,
    pub n: usize,
    pub time_s: f64,
    pub time_sd: Option<f64>,
    pub first_miss: u32,
    pub wrong_target: u32,
    pub norm_scale: f64,
    pub zoom_free: usize,
}

#[derive(Default)]
struct Group {
    times: Vec<f64>,
    norm: Vec<f64>,
    first_miss: u32,
    wrong_target: u32,
    zoom_free: usize,
}

impl Group {
    fn add(&mut self, row: &AnalysisRow) {
        self.times.push(row.time_s);
        self.norm.push(row.norm_scale);
        self.first_miss += row.first_miss;
        self.wrong_target += row.wrong_target;
        self.zoom_free += row.zoom_free;
    }
}

/// Per-target rows for every log, followed by aggregate rows.
pub fn analyze(logs: &[SessionLog]) -> Result<Vec<AnalysisRow>> {
    if logs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut rows = Vec::new();
    for log in logs {
        let metrics = compute_metrics(log)?;
        let header = &log.header;
        for t in &metrics.targets {
            rows.push(AnalysisRow {
                row: "target".into(),
                session: header.session_id.clone(),
                technique: header.technique.to_string(),
                map: header.map.name.clone(),
                class: t.distance_class.to_string(),
                target: t.index.to_string(),
                n: 1,
                time_s: t.time_s,
                time_sd: None,
                first_miss: t.first_miss,
                wrong_target: t.wrong_target,
                norm_scale: t.norm_scale,
                zoom_free: usize::from(t.zoom_free),
            });
        }
    }

    // (technique, map, class rank) -> group; rank 3 is "all"
    let mut groups: BTreeMap<(TechniqueKind, String, usize), Group> = BTreeMap::new();
    let class_rank = |name: &str| DistanceClass::ALL.iter().position(|c| c.as_str() == name).expect("known class");
    for row in &rows {
        let technique: TechniqueKind = row.technique.parse()?;
        for rank in [class_rank(&row.class), 3] {
            groups.entry((technique, row.map.clone(), rank)).or_default().add(row);
        }
    }

    for ((technique, map, rank), group) in groups {
        let (mean, sd) = mean_sd(&group.times);
        let (norm, _) = mean_sd(&group.norm);
        rows.push(AnalysisRow {
            row: "aggregate".into(),
            session: "*".into(),
            technique: technique.to_string(),
            map,
            class: DistanceClass::ALL.get(rank).map_or("all", |c| c.as_str()).into(),
            target: "*".into(),
            n: group.times.len(),
            time_s: mean,
            time_sd: Some(sd),
            first_miss: group.first_miss,
            wrong_target: group.wrong_target,
            norm_scale: norm,
            zoom_free: group.zoom_free,
        });
    }
    Ok(rows)
}

pub fn analyze_paths<P: AsRef<Path>>(paths: &[P]) -> Result<Vec<AnalysisRow>> {
    let logs = paths.iter().map(SessionLog::read_path).collect::<Result<Vec<_>>>()?;
    analyze(&logs)
}

pub fn write_csv(rows: &[AnalysisRow], out: impl Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}
