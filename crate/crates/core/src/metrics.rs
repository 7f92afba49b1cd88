//! Evaluation metrics: sortedness, monotonicity error, aggregation,
//! delayed gratification and step totals.

use alloc::vec::Vec;
use core::str::FromStr;

use crate::engine::RunOutcome;
use crate::error::ConfigError;
use crate::model::{CellArrayState, Direction};

/// Positions that follow `direction`: index 0 always, plus every index whose
/// value is ordered after its left neighbour (strictly, unless `strict` is
/// false).
pub fn ordered_count(values: &[i64], direction: Direction, strict: bool) -> usize {
    if values.is_empty() {
        return 0;
    }
    1 + values
        .windows(2)
        .filter(|w| {
            if strict {
                direction.strictly_ordered(w[0], w[1])
            } else {
                !direction.inverted(w[0], w[1])
            }
        })
        .count()
}

pub fn sortedness_of(values: &[i64], direction: Direction, strict: bool) -> f64 {
    if values.is_empty() {
        return 1.0;
    }
    ordered_count(values, direction, strict) as f64 / values.len() as f64
}

/// Fraction of positions in order, in `[0, 1]`.
pub fn sortedness(state: &CellArrayState, direction: Direction, strict: bool) -> f64 {
    if state.is_empty() {
        return 1.0;
    }
    let n = state.len();
    let mut count = 1;
    for w in state.cells.windows(2) {
        let ok = if strict {
            direction.strictly_ordered(w[0].value, w[1].value)
        } else {
            !direction.inverted(w[0].value, w[1].value)
        };
        count += usize::from(ok);
    }
    count as f64 / n as f64
}

pub fn monotonicity_error_of(values: &[i64], direction: Direction) -> u32 {
    values.windows(2).filter(|w| direction.inverted(w[0], w[1])).count() as u32
}

/// Adjacent pairs that strictly violate `direction`. Equal neighbours are
/// fine.
pub fn monotonicity_error(state: &CellArrayState, direction: Direction) -> u32 {
    state
        .cells
        .windows(2)
        .filter(|w| direction.inverted(w[0].value, w[1].value))
        .count() as u32
}

pub fn aggregation_of(labels: &[u8]) -> Result<f64, ConfigError> {
    if labels.len() < 2 {
        return Err(ConfigError::new(
            "n",
            "aggregation needs at least two cells",
        ));
    }
    let same = labels.windows(2).filter(|w| w[0] == w[1]).count();
    Ok(same as f64 / (labels.len() - 1) as f64)
}

/// Share of adjacent pairs whose cells carry the same group label.
pub fn aggregation_value(state: &CellArrayState) -> Result<f64, ConfigError> {
    if state.len() < 2 {
        return Err(ConfigError::new(
            "n",
            "aggregation needs at least two cells",
        ));
    }
    let same = state
        .cells
        .windows(2)
        .filter(|w| w[0].group == w[1].group)
        .count();
    Ok(same as f64 / (state.len() - 1) as f64)
}

/// Sortedness sampled at the start of a run and after every applied swap.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SortednessTrajectory {
    /// `(event_index, sortedness)`.
    pub samples: Vec<(u64, f64)>,
}

impl SortednessTrajectory {
    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|&(_, s)| s).collect()
    }

    pub fn initial(&self) -> Option<f64> {
        self.samples.first().map(|&(_, s)| s)
    }

    pub fn last(&self) -> Option<f64> {
        self.samples.last().map(|&(_, s)| s)
    }
}

/// Aggregation sampled at the start of a run and after every applied swap.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AggregationTrajectory {
    pub samples: Vec<f64>,
}

impl AggregationTrajectory {
    /// Largest sample and the fraction of the run (by swap count) at which
    /// it first occurs.
    pub fn peak(&self) -> Option<(f64, f64)> {
        let (i, v) = self
            .samples
            .iter()
            .copied()
            .enumerate()
            .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((i, v)),
            })?;
        let swaps = self.samples.len() - 1;
        let pos = if swaps == 0 { 0.0 } else { i as f64 / swaps as f64 };
        Some((v, pos))
    }

    /// Resample onto `points` evenly spaced progress fractions. Grid point `k`
    /// takes the sample after `round(k / (points - 1) * swaps)` swaps.
    pub fn resample(&self, points: usize) -> Vec<f64> {
        resample(&self.samples, points)
    }
}

/// Nearest-sample resampling of a per-swap series onto a progress grid.
pub fn resample(samples: &[f64], points: usize) -> Vec<f64> {
    if samples.is_empty() || points == 0 {
        return Vec::new();
    }
    let swaps = (samples.len() - 1) as f64;
    let last = (points.max(2) - 1) as f64;
    (0..points)
        .map(|k| {
            let idx = libm::round(k as f64 / last * swaps) as usize;
            samples[idx.min(samples.len() - 1)]
        })
        .collect()
}

/// One decline of sortedness and the recovery that followed it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DgEvent {
    /// Peak minus valley, always positive.
    pub drop: f64,
    /// Next peak minus valley; zero when the run ends in the decline.
    pub rise: f64,
}

fn dedup(trajectory: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(trajectory.len());
    for &v in trajectory {
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    out
}

/// Split a trajectory into peak, valley, next-peak episodes. Flat stretches
/// are ignored.
pub fn segment_dg_events(trajectory: &[f64]) -> Vec<DgEvent> {
    let t = dedup(trajectory);
    let mut events = Vec::new();
    let mut i = 0;
    while i + 1 < t.len() {
        if t[i + 1] > t[i] {
            i += 1;
            continue;
        }
        let peak = t[i];
        while i + 1 < t.len() && t[i + 1] < t[i] {
            i += 1;
        }
        let valley = t[i];
        while i + 1 < t.len() && t[i + 1] > t[i] {
            i += 1;
        }
        events.push(DgEvent {
            drop: peak - valley,
            rise: t[i] - valley,
        });
    }
    events
}

/// Gain before the first decline. With the event terms this telescopes:
/// `initial_rise + sum(rise - drop) == last - first`.
pub fn initial_rise(trajectory: &[f64]) -> f64 {
    let t = dedup(trajectory);
    let mut i = 0;
    while i + 1 < t.len() && t[i + 1] > t[i] {
        i += 1;
    }
    match t.first() {
        Some(&first) => t[i] - first,
        None => 0.0,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DgFormula {
    /// `(rise - drop) / drop`
    #[default]
    Methods,
    /// `rise / drop`
    Fig6D,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DgAggregate {
    #[default]
    Mean,
    Sum,
}

impl DgFormula {
    pub fn name(self) -> &'static str {
        match self {
            DgFormula::Methods => "methods",
            DgFormula::Fig6D => "fig6d",
        }
    }
}

impl FromStr for DgFormula {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "methods" => Ok(DgFormula::Methods),
            "fig6d" => Ok(DgFormula::Fig6D),
            _ => Err(()),
        }
    }
}

impl DgAggregate {
    pub fn name(self) -> &'static str {
        match self {
            DgAggregate::Mean => "mean",
            DgAggregate::Sum => "sum",
        }
    }
}

impl FromStr for DgAggregate {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "mean" => Ok(DgAggregate::Mean),
            "sum" => Ok(DgAggregate::Sum),
            _ => Err(()),
        }
    }
}

impl DgEvent {
    pub fn score(&self, formula: DgFormula) -> f64 {
        let ratio = self.rise / self.drop;
        match formula {
            DgFormula::Fig6D => ratio,
            DgFormula::Methods => ratio - 1.0,
        }
    }
}

/// Run-level delayed gratification. A run without declines scores 0.
pub fn delayed_gratification(events: &[DgEvent], formula: DgFormula, aggregate: DgAggregate) -> f64 {
    if events.is_empty() {
        return 0.0;
    }
    let sum: f64 = events.iter().map(|e| e.score(formula)).sum();
    match aggregate {
        DgAggregate::Sum => sum,
        DgAggregate::Mean => sum / events.len() as f64,
    }
}

/// Which steps count toward a run's cost.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Counting {
    #[default]
    SwapsOnly,
    SwapsPlusComparisons,
}

impl Counting {
    /// `swaps` or `all` (swaps plus comparisons).
    pub fn name(self) -> &'static str {
        match self {
            Counting::SwapsOnly => "swaps",
            Counting::SwapsPlusComparisons => "all",
        }
    }

    pub fn total(self, swaps: u64, comparisons: u64) -> u64 {
        match self {
            Counting::SwapsOnly => swaps,
            Counting::SwapsPlusComparisons => swaps + comparisons,
        }
    }
}

impl FromStr for Counting {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "swaps" => Ok(Counting::SwapsOnly),
            "all" => Ok(Counting::SwapsPlusComparisons),
            _ => Err(()),
        }
    }
}

pub fn step_totals(outcome: &RunOutcome, counting: Counting) -> u64 {
    counting.total(outcome.total_swaps, outcome.total_comparisons)
}
