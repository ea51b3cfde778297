//! Ingestion of right-censored survival data from CSV.
//!
//! Each row is one subject: an observed time, an event flag (1 = event,
//! 0 = right-censored) and an optional group label. Rows are partitioned by
//! group and each group is sorted ascending by time with events placed
//! before censorings at tied times.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Group label used when the input has no `group` column.
pub const DEFAULT_GROUP: &str = "all";

/// One subject's observed time, event flag and group.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub time: f64,
    /// `true` when the event was observed, `false` when right-censored.
    pub event: bool,
    pub group: String,
}

impl Observation {
    pub fn new(time: f64, event: bool, group: impl Into<String>) -> Result<Self> {
        let group = group.into();
        if !time.is_finite() || time < 0.0 {
            return Err(Error::Domain(format!(
                "observation time must be finite and non-negative, got {time}"
            )));
        }
        if group.is_empty() {
            return Err(Error::Domain("group label must be non-empty".into()));
        }
        Ok(Self { time, event, group })
    }

    pub fn status(&self) -> u8 {
        u8::from(self.event)
    }
}

/// The observations of one group, sorted by time (events first on ties).
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalSample {
    group: String,
    observations: Vec<Observation>,
}

impl SurvivalSample {
    /// Builds a sample from unsorted observations. All observations are
    /// relabelled with `group`.
    pub fn new(group: impl Into<String>, mut observations: Vec<Observation>) -> Result<Self> {
        let group = group.into();
        if observations.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if group.is_empty() {
            return Err(Error::Domain("group label must be non-empty".into()));
        }
        for obs in &observations {
            if !obs.time.is_finite() || obs.time < 0.0 {
                return Err(Error::Domain(format!(
                    "observation time must be finite and non-negative, got {}",
                    obs.time
                )));
            }
        }
        for obs in &mut observations {
            obs.group.clone_from(&group);
        }
        // Stable sort; at equal times the event precedes the censoring.
        observations.sort_by(|a, b| a.time.total_cmp(&b.time).then(b.event.cmp(&a.event)));
        Ok(Self {
            group,
            observations,
        })
    }

    /// Convenience constructor from parallel `(time, event)` pairs.
    pub fn from_pairs(group: impl Into<String>, pairs: &[(f64, bool)]) -> Result<Self> {
        let group = group.into();
        let obs = pairs
            .iter()
            .map(|&(t, e)| Observation::new(t, e, group.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(group, obs)
    }

    pub fn group(&self) -> &str {
        &self.group
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// The largest observed time (event or censored).
    pub fn max_time(&self) -> f64 {
        self.observations.last().map_or(0.0, |o| o.time)
    }

    pub fn n_events(&self) -> usize {
        self.observations.iter().filter(|o| o.event).count()
    }

    /// Times of observed events, ascending.
    pub fn event_times(&self) -> Vec<f64> {
        self.observations
            .iter()
            .filter(|o| o.event)
            .map(|o| o.time)
            .collect()
    }
}

/// Column names to read. `group` may be absent from the file, in which
/// case every row belongs to [`DEFAULT_GROUP`].
#[derive(Debug, Clone)]
pub struct ColumnSpec {
    pub time: String,
    pub status: String,
    pub group: String,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self {
            time: "time".into(),
            status: "status".into(),
            group: "group".into(),
        }
    }
}

/// Reads a CSV survival dataset and partitions it by group.
///
/// Blank lines are skipped. Any other malformation (bad number, negative
/// time, status outside {0, 1}, unknown column) is an error. Row numbers in
/// errors count data rows from 1.
pub fn load_dataset<R: Read>(
    source: R,
    columns: &ColumnSpec,
) -> Result<BTreeMap<String, SurvivalSample>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let headers = reader.headers()?.clone();
    let position = |name: &str| headers.iter().position(|h| h == name);
    let time_col = position(&columns.time)
        .ok_or_else(|| Error::Schema(format!("missing required column `{}`", columns.time)))?;
    let status_col = position(&columns.status)
        .ok_or_else(|| Error::Schema(format!("missing required column `{}`", columns.status)))?;
    let group_col = position(&columns.group);
    for h in headers.iter() {
        if h != columns.time && h != columns.status && h != columns.group {
            return Err(Error::Schema(format!("unknown column `{h}`")));
        }
    }

    let mut by_group: BTreeMap<String, Vec<Observation>> = BTreeMap::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        let field = |col: usize| record.get(col).unwrap_or("");

        let raw_time = field(time_col);
        let time: f64 = raw_time.parse().map_err(|_| Error::Parse {
            row,
            message: format!("time `{raw_time}` is not a number"),
        })?;
        if !time.is_finite() || time < 0.0 {
            return Err(Error::Parse {
                row,
                message: format!("time {raw_time} must be finite and non-negative"),
            });
        }
        let event = match field(status_col) {
            "1" => true,
            "0" => false,
            other => {
                return Err(Error::Parse {
                    row,
                    message: format!("status `{other}` must be 0 or 1"),
                })
            }
        };
        let group = match group_col {
            Some(col) => {
                let g = field(col);
                if g.is_empty() {
                    return Err(Error::Parse {
                        row,
                        message: "group label is empty".into(),
                    });
                }
                g.to_string()
            }
            None => DEFAULT_GROUP.to_string(),
        };
        by_group.entry(group.clone()).or_default().push(Observation {
            time,
            event,
            group,
        });
    }

    if by_group.is_empty() {
        return Err(Error::EmptyDataset);
    }
    by_group
        .into_iter()
        .map(|(g, obs)| SurvivalSample::new(g.clone(), obs).map(|s| (g, s)))
        .collect()
}

/// Writes samples back out in the `time,status,group` schema.
pub fn write_dataset<'a, W, I>(sink: W, samples: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a SurvivalSample>,
{
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["time", "status", "group"])?;
    for sample in samples {
        for obs in sample.observations() {
            writer.write_record([
                obs.time.to_string(),
                obs.status().to_string(),
                obs.group.clone(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}
