use log::warn;

use crate::error::{BanditError, Result};

/// One logged interaction with the behaviour policy's propensity for the
/// logged action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRecord {
    pub context: usize,
    pub action: usize,
    pub reward: f64,
    pub propensity: f64,
}

impl LogRecord {
    pub fn new(context: usize, action: usize, reward: f64, propensity: f64) -> Result<Self> {
        if !reward.is_finite() {
            return Err(BanditError::invalid(format!("non-finite logged reward {reward}")));
        }
        if !(0.0..=1.0).contains(&propensity) {
            return Err(BanditError::invalid(format!(
                "propensity {propensity} must lie in [0, 1]"
            )));
        }
        Ok(Self {
            context,
            action,
            reward,
            propensity,
        })
    }
}

/// A stationary policy over a finite context set.
pub trait TargetPolicy {
    fn num_arms(&self) -> usize;

    fn num_contexts(&self) -> usize;

    /// `pi(action | context)`; callers check ranges first.
    fn prob(&self, action: usize, context: usize) -> f64;
}

/// A policy evaluated by replay, whose choice may depend on the records it
/// has accepted so far.
pub trait HistoryPolicy {
    fn choose(&mut self, history: &[LogRecord], context: usize) -> usize;
}

impl<F: FnMut(&[LogRecord], usize) -> usize> HistoryPolicy for F {
    fn choose(&mut self, history: &[LogRecord], context: usize) -> usize {
        self(history, context)
    }
}

/// Per-context action probabilities, one row per context.
#[derive(Debug, Clone, PartialEq)]
pub struct TablePolicy {
    rows: Vec<Vec<f64>>,
}

impl TablePolicy {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || k == 0 {
            return Err(BanditError::invalid("policy table is empty"));
        }
        for (c, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(BanditError::invalid(format!(
                    "policy row {c} has {} arms, expected {k}",
                    row.len()
                )));
            }
            if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
                return Err(BanditError::invalid(format!("policy row {c} has a value outside [0, 1]")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(BanditError::invalid(format!("policy row {c} sums to {total}")));
            }
        }
        Ok(Self { rows })
    }

    /// Point-mass policy playing `arms[c]` in context `c`.
    pub fn deterministic(arms: &[usize], num_arms: usize) -> Result<Self> {
        let rows = arms
            .iter()
            .map(|&a| {
                if a >= num_arms {
                    return Err(BanditError::IndexOutOfRange { index: a, len: num_arms });
                }
                let mut row = vec![0.0; num_arms];
                row[a] = 1.0;
                Ok(row)
            })
            .collect::<Result<_>>()?;
        Self::new(rows)
    }

    pub fn uniform(num_contexts: usize, num_arms: usize) -> Result<Self> {
        Self::new(vec![vec![1.0 / num_arms as f64; num_arms]; num_contexts])
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// The chosen arm per context if every row is a point mass.
    pub fn as_deterministic(&self) -> Option<Vec<usize>> {
        self.rows
            .iter()
            .map(|row| row.iter().position(|&p| p == 1.0))
            .collect()
    }
}

impl TargetPolicy for TablePolicy {
    fn num_arms(&self) -> usize {
        self.rows[0].len()
    }

    fn num_contexts(&self) -> usize {
        self.rows.len()
    }

    fn prob(&self, action: usize, context: usize) -> f64 {
        self.rows[context][action]
    }
}

/// Replays the table's point-mass choice, ignoring history.
impl HistoryPolicy for TablePolicy {
    fn choose(&mut self, _history: &[LogRecord], context: usize) -> usize {
        let row = &self.rows[context];
        row.iter().position(|&p| p == 1.0).unwrap_or_else(|| crate::util::argmax(row))
    }
}

/// An estimate `r_hat(action, context)` of the mean reward.
pub trait RewardModel {
    fn r_hat(&self, action: usize, context: usize) -> f64;
}

/// A reward model given as a table, one row per context.
#[derive(Debug, Clone, PartialEq)]
pub struct TableModel {
    rows: Vec<Vec<f64>>,
}

impl TableModel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || k == 0 {
            return Err(BanditError::invalid("reward model table is empty"));
        }
        if rows.iter().any(|r| r.len() != k) {
            return Err(BanditError::invalid("reward model rows have different lengths"));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(BanditError::invalid("reward model has a non-finite entry"));
        }
        Ok(Self { rows })
    }

    pub fn zeros(num_contexts: usize, num_arms: usize) -> Self {
        Self {
            rows: vec![vec![0.0; num_arms]; num_contexts],
        }
    }

    pub fn num_contexts(&self) -> usize {
        self.rows.len()
    }

    pub fn num_arms(&self) -> usize {
        self.rows[0].len()
    }
}

impl RewardModel for TableModel {
    fn r_hat(&self, action: usize, context: usize) -> f64 {
        self.rows[context][action]
    }
}

/// What the sample-average model reports for a cell with no data.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MissingCell {
    /// Report 0 and log a warning.
    #[default]
    Zero,
    Error,
}

/// Per-cell empirical mean reward.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleAverageModel {
    table: TableModel,
    counts: Vec<Vec<usize>>,
}

impl SampleAverageModel {
    pub fn fit(
        log: &[LogRecord],
        num_contexts: usize,
        num_arms: usize,
        missing: MissingCell,
    ) -> Result<Self> {
        let mut sums = vec![vec![0.0; num_arms]; num_contexts];
        let mut counts = vec![vec![0usize; num_arms]; num_contexts];
        for r in log {
            if r.context >= num_contexts {
                return Err(BanditError::IndexOutOfRange { index: r.context, len: num_contexts });
            }
            if r.action >= num_arms {
                return Err(BanditError::IndexOutOfRange { index: r.action, len: num_arms });
            }
            sums[r.context][r.action] += r.reward;
            counts[r.context][r.action] += 1;
        }
        let mut empty = 0;
        for c in 0..num_contexts {
            for a in 0..num_arms {
                if counts[c][a] > 0 {
                    sums[c][a] /= counts[c][a] as f64;
                } else {
                    empty += 1;
                    if missing == MissingCell::Error {
                        return Err(BanditError::UndefinedEstimate(format!(
                            "no logged data for action {a} in context {c}"
                        )));
                    }
                }
            }
        }
        if empty > 0 {
            warn!("sample-average model: {empty} unobserved (action, context) cells set to 0");
        }
        Ok(Self {
            table: TableModel { rows: sums },
            counts,
        })
    }

    pub fn count(&self, action: usize, context: usize) -> usize {
        self.counts[context][action]
    }
}

impl RewardModel for SampleAverageModel {
    fn r_hat(&self, action: usize, context: usize) -> f64 {
        self.table.r_hat(action, context)
    }
}
