//! Edge-weight threshold progressions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FraneError, Result};
use crate::similarity::OffDiagStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Progression {
    #[value(name = "geometric")]
    Geometric,
    #[value(name = "linear_min")]
    LinearMin,
    #[value(name = "linear_mean")]
    LinearMean,
    #[value(name = "linear_median")]
    LinearMedian,
    #[value(name = "quantile")]
    Quantile,
}

impl Progression {
    pub const ALL: [Progression; 5] = [
        Progression::Geometric,
        Progression::LinearMin,
        Progression::LinearMean,
        Progression::LinearMedian,
        Progression::Quantile,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Progression::Geometric => "geometric",
            Progression::LinearMin => "linear_min",
            Progression::LinearMean => "linear_mean",
            Progression::LinearMedian => "linear_median",
            Progression::Quantile => "quantile",
        }
    }
}

impl fmt::Display for Progression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Progression {
    type Err = FraneError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| FraneError::InvalidParameter(format!("unknown progression '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSchedule {
    values: Vec<f64>,
    progression: Progression,
}

impl ThresholdSchedule {
    /// Thresholds in generation order (`t_1 .. t_I`).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn progression(&self) -> Progression {
        self.progression
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Distinct thresholds, highest first. This is the order in which the
    /// graph sweep visits them.
    pub fn sweep_order(&self) -> Vec<f64> {
        let mut order = self.values.clone();
        order.sort_by(|a, b| b.total_cmp(a));
        order.dedup();
        order
    }
}

fn check_iterations(iterations: usize) -> Result<()> {
    if iterations < 2 {
        return Err(FraneError::InvalidParameter(format!(
            "need at least 2 thresholds, got {iterations}"
        )));
    }
    Ok(())
}

/// `t_i = M' - min(D) * (max(D) / min(D))^((i-1)/(I-1))` with
/// `D = {M' - w : w < M'}` taken as a set.
///
/// The last threshold is pinned to `min(W')` so the final graph is complete.
/// With no dissimilarities the schedule is the single threshold `M'`.
pub fn geometric_schedule(stats: &OffDiagStats, iterations: usize) -> Result<ThresholdSchedule> {
    check_iterations(iterations)?;
    let top = stats.max;
    let mut dissim: Vec<f64> = stats
        .sorted
        .iter()
        .filter(|&&w| w < top)
        .map(|&w| top - w)
        .collect();
    dissim.sort_by(f64::total_cmp);
    dissim.dedup();

    let values = match dissim.len() {
        0 => vec![top],
        // The only dissimilarity is M' - min(W'), so every threshold is min(W').
        1 => vec![stats.min; iterations],
        _ => {
            let lo = dissim[0];
            let hi = dissim[dissim.len() - 1];
            let ratio = hi / lo;
            let last = (iterations - 1) as f64;
            let mut values: Vec<f64> = (0..iterations)
                .map(|i| {
                    let t = top - lo * ratio.powf(i as f64 / last);
                    t.clamp(stats.min, top)
                })
                .collect();
            values[0] = top - lo;
            values[iterations - 1] = stats.min;
            values
        }
    };
    Ok(ThresholdSchedule {
        values,
        progression: Progression::Geometric,
    })
}

/// `I` evenly spaced thresholds from `a` to `b` inclusive.
pub fn linear_schedule(a: f64, b: f64, iterations: usize) -> Result<ThresholdSchedule> {
    linear_tagged(a, b, iterations, Progression::LinearMin)
}

fn linear_tagged(a: f64, b: f64, iterations: usize, progression: Progression) -> Result<ThresholdSchedule> {
    check_iterations(iterations)?;
    if !(a <= b) {
        return Err(FraneError::InvalidParameter(format!(
            "linear schedule needs a <= b, got a = {a}, b = {b}"
        )));
    }
    let step = (b - a) / (iterations - 1) as f64;
    let mut values: Vec<f64> = (0..iterations)
        .map(|i| (step * i as f64 + a).clamp(a, b))
        .collect();
    values[iterations - 1] = b;
    Ok(ThresholdSchedule {
        values,
        progression,
    })
}

/// Nearest-rank quantiles: `t_i` is the element at 1-based position
/// `ceil(i * |W'| / I)` of the ascending weights.
pub fn quantile_schedule(sorted: &[f64], iterations: usize) -> Result<ThresholdSchedule> {
    check_iterations(iterations)?;
    if sorted.is_empty() {
        return Err(FraneError::InvalidParameter(
            "quantile schedule over an empty weight list".into(),
        ));
    }
    let len = sorted.len();
    let values = (1..=iterations)
        .map(|i| {
            let rank = (i * len).div_ceil(iterations);
            sorted[rank.max(1) - 1]
        })
        .collect();
    Ok(ThresholdSchedule {
        values,
        progression: Progression::Quantile,
    })
}

pub fn build_schedule(
    stats: &OffDiagStats,
    progression: Progression,
    iterations: usize,
) -> Result<ThresholdSchedule> {
    match progression {
        Progression::Geometric => geometric_schedule(stats, iterations),
        Progression::LinearMin => linear_tagged(stats.min, stats.max, iterations, progression),
        Progression::LinearMean => linear_tagged(stats.mean.clamp(stats.min, stats.max), stats.max, iterations, progression),
        Progression::LinearMedian => linear_tagged(stats.median, stats.max, iterations, progression),
        Progression::Quantile => quantile_schedule(&stats.sorted, iterations),
    }
}
