//! Trajectory CSV: `t, x_1_1, …, x_n_3, v1, v2, max_norm, disagreement`.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading
//! a table back gives the recorded values bit for bit.

use std::io::{Read, Write};

use attitude_sync::TrajectoryRecordd;
use thiserror::Error;

const CHANNELS: [&str; 4] = ["v1", "v2", "max_norm", "disagreement"];

#[derive(Debug, Error)]
pub enum TableError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("bad header: {0}")]
    Header(String),
    #[error("row {row}, column `{column}`: cannot parse {value:?}")]
    Value { row: usize, column: String, value: String },
    #[error("row {row} has {actual} fields, expected {expected}")]
    Width { row: usize, expected: usize, actual: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryTable {
    agents: usize,
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

pub fn header_for(agents: usize) -> Vec<String> {
    let mut header = vec!["t".to_string()];
    for i in 1..=agents {
        for k in 1..=3 {
            header.push(format!("x_{i}_{k}"));
        }
    }
    header.extend(CHANNELS.iter().map(|c| c.to_string()));
    header
}

impl TrajectoryTable {
    pub fn from_record(rec: &TrajectoryRecordd) -> Self {
        let agents = rec.states.first().map_or(0, |s| s.len());
        let rows = (0..rec.len())
            .map(|k| {
                let mut row = Vec::with_capacity(3 * agents + 5);
                row.push(rec.times[k]);
                row.extend(rec.states[k].iter().flat_map(|x| x.0));
                row.extend([rec.v1[k], rec.v2[k], rec.max_norm[k], rec.disagreement[k]]);
                row
            })
            .collect();
        TrajectoryTable {
            agents,
            header: header_for(agents),
            rows,
        }
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Coordinate `k` (0-based) of agent `i` (0-based) over time.
    pub fn coordinate(&self, i: usize, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[1 + 3 * i + k]).collect()
    }

    /// Largest spread `max_i x_ik − min_i x_ik` over the three coordinates
    /// of one row.
    pub fn coordinate_spread(&self, row: usize) -> f64 {
        let r = &self.rows[row];
        (0..3)
            .map(|k| {
                let values = (0..self.agents).map(|i| r[1 + 3 * i + k]);
                let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
                hi - lo
            })
            .fold(0.0, f64::max)
    }

    pub fn write<W: Write>(&self, out: W) -> Result<(), TableError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read<R: Read>(input: R) -> Result<Self, TableError> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let width = header.len();
        if width < 5 || !(width - 5).is_multiple_of(3) {
            return Err(TableError::Header(format!("{width} columns")));
        }
        let agents = (width - 5) / 3;
        let expected = header_for(agents);
        if header != expected {
            return Err(TableError::Header(header.join(",")));
        }
        let mut rows = Vec::new();
        for (row, record) in r.records().enumerate() {
            let record = record?;
            if record.len() != width {
                return Err(TableError::Width {
                    row,
                    expected: width,
                    actual: record.len(),
                });
            }
            let values = record
                .iter()
                .zip(&header)
                .map(|(field, column)| {
                    field.parse::<f64>().map_err(|_| TableError::Value {
                        row,
                        column: column.clone(),
                        value: field.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(values);
        }
        Ok(TrajectoryTable { agents, header, rows })
    }
}
