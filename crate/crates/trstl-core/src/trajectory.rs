//! Finite discrete-time state sequences and their CSV form.

use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error("trajectory must contain at least one state")]
    Empty,
    #[error("state at step {t} has {got} dimensions, expected {expected}")]
    RaggedState { t: usize, expected: usize, got: usize },
    #[error("non-finite value at step {t}")]
    NonFinite { t: usize },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv value `{value}` at step {t} is not a number")]
    BadValue { t: usize, value: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// States `x_0 .. x_H`, each of the same dimension; the time domain is
/// `{0, ..., H}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    states: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn new(states: Vec<Vec<f64>>) -> Result<Self, TrajectoryError> {
        let Some(first) = states.first() else {
            return Err(TrajectoryError::Empty);
        };
        let dim = first.len();
        for (t, s) in states.iter().enumerate() {
            if s.len() != dim {
                return Err(TrajectoryError::RaggedState { t, expected: dim, got: s.len() });
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(TrajectoryError::NonFinite { t });
            }
        }
        Ok(Trajectory { states })
    }

    /// Convenience constructor for a scalar signal.
    pub fn scalar(values: &[f64]) -> Result<Self, TrajectoryError> {
        Self::new(values.iter().map(|v| vec![*v]).collect())
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    /// Largest valid time index `H`.
    pub fn horizon(&self) -> usize {
        self.states.len() - 1
    }

    pub fn state(&self, t: usize) -> &[f64] {
        &self.states[t]
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    /// Reads `(trajectory, header)` from CSV: a header row of variable names
    /// and one row of decimal values per time step.
    pub fn from_csv<R: Read>(reader: R) -> Result<(Self, Vec<String>), TrajectoryError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(|s| s.to_string()).collect();
        let mut states = Vec::new();
        for (t, row) in rdr.records().enumerate() {
            let row = row?;
            let mut state = Vec::with_capacity(header.len());
            for field in row.iter() {
                let v: f64 = field.parse().map_err(|_| TrajectoryError::BadValue {
                    t,
                    value: field.to_string(),
                })?;
                state.push(v);
            }
            if state.len() != header.len() {
                return Err(TrajectoryError::RaggedState {
                    t,
                    expected: header.len(),
                    got: state.len(),
                });
            }
            states.push(state);
        }
        Ok((Self::new(states)?, header))
    }

    pub fn write_csv<W: Write>(
        &self,
        names: &[impl AsRef<str>],
        writer: W,
    ) -> Result<(), TrajectoryError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(names.iter().map(AsRef::as_ref))?;
        for s in &self.states {
            w.write_record(s.iter().map(|v| format!("{v}")))?;
        }
        w.flush()?;
        Ok(())
    }
}
