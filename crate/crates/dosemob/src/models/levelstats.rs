//! Per-dose-level sufficient statistics.
//!
//! All three dose-response families have design rows that depend on the dose
//! only, and doses take a handful of design values. Counts and response sums
//! per dose level are therefore sufficient to evaluate the least-squares
//! objective of any candidate subset, which makes exhaustive split-point
//! scans cheap: observations are moved between the two child accumulators one
//! at a time instead of refitting from raw data.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct LevelStats {
    doses: Vec<f64>,
    count: Vec<usize>,
    sum_y: Vec<f64>,
    sum_y2: Vec<f64>,
}

impl LevelStats {
    pub fn empty(dose_levels: &[f64]) -> Self {
        LevelStats {
            doses: dose_levels.to_vec(),
            count: vec![0; dose_levels.len()],
            sum_y: vec![0.0; dose_levels.len()],
            sum_y2: vec![0.0; dose_levels.len()],
        }
    }

    pub fn from_observations(dose_levels: &[f64], doses: &[f64], y: &[f64]) -> Result<Self> {
        let mut s = Self::empty(dose_levels);
        for (i, (&d, &yi)) in doses.iter().zip(y).enumerate() {
            let level = level_index(dose_levels, d).ok_or_else(|| {
                Error::Data(format!(
                    "dose {d} at row {} is not one of the design dose levels",
                    i + 1
                ))
            })?;
            s.add(level, yi);
        }
        Ok(s)
    }

    pub fn add(&mut self, level: usize, y: f64) {
        self.count[level] += 1;
        self.sum_y[level] += y;
        self.sum_y2[level] += y * y;
    }

    pub fn remove(&mut self, level: usize, y: f64) {
        debug_assert!(self.count[level] > 0);
        self.count[level] -= 1;
        self.sum_y[level] -= y;
        self.sum_y2[level] -= y * y;
    }

    pub fn merge(&mut self, other: &LevelStats) {
        for j in 0..self.count.len() {
            self.count[j] += other.count[j];
            self.sum_y[j] += other.sum_y[j];
            self.sum_y2[j] += other.sum_y2[j];
        }
    }

    pub fn n(&self) -> usize {
        self.count.iter().sum()
    }

    pub fn n_levels(&self) -> usize {
        self.doses.len()
    }

    pub fn dose(&self, level: usize) -> f64 {
        self.doses[level]
    }

    pub fn count(&self, level: usize) -> usize {
        self.count[level]
    }

    pub fn sum_y(&self, level: usize) -> f64 {
        self.sum_y[level]
    }

    /// Number of dose levels with at least one observation.
    pub fn distinct_doses(&self) -> usize {
        self.count.iter().filter(|&&c| c > 0).count()
    }

    pub fn total_sum_y(&self) -> f64 {
        self.sum_y.iter().sum()
    }

    pub fn total_sum_y2(&self) -> f64 {
        self.sum_y2.iter().sum()
    }
}

pub(crate) fn level_index(dose_levels: &[f64], d: f64) -> Option<usize> {
    dose_levels.iter().position(|&l| l == d)
}
