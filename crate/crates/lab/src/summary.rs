//! The battery summary table: one CSV row per run.

use std::path::Path;

use cellsort_core::experiments::{ExperimentConfig, RunReport};
use cellsort_core::metrics::Counting;
use serde::{Deserialize, Serialize};

use crate::error::LabError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub run: usize,
    pub seed: u64,
    pub algorithms: String,
    pub mode: String,
    pub n: usize,
    pub frozen_count: usize,
    pub frozen_kind: String,
    pub swaps: u64,
    pub comparisons: u64,
    pub final_sortedness: f64,
    pub final_monotonicity_error: u32,
    pub dg_methods: f64,
    pub dg_fig6d: f64,
    /// Empty for single-label batteries.
    pub peak_aggregation: Option<f64>,
    pub final_aggregation: Option<f64>,
    pub terminated_by: String,
}

impl SummaryRow {
    pub fn new(config: &ExperimentConfig, r: &RunReport) -> Self {
        let mode = match config.control() {
            cellsort_core::Control::CellView => "cell-view",
            cellsort_core::Control::Traditional { .. } => "traditional",
        };
        Self {
            run: r.index,
            seed: r.seed,
            algorithms: config.policy.describe(),
            mode: mode.to_owned(),
            n: config.n,
            frozen_count: config.frozen.count,
            frozen_kind: config.frozen.kind.name().to_owned(),
            swaps: r.swaps,
            comparisons: r.comparisons,
            final_sortedness: r.final_sortedness,
            final_monotonicity_error: r.final_monotonicity_error,
            dg_methods: r.dg_methods,
            dg_fig6d: r.dg_fig6d,
            peak_aggregation: r.peak_aggregation,
            final_aggregation: r.final_aggregation,
            terminated_by: r.terminated_by.name().to_owned(),
        }
    }

    /// A numeric column by name. `steps` follows `counting`; `total` is
    /// always swaps plus comparisons.
    pub fn metric(&self, name: &str, counting: Counting) -> Option<f64> {
        Some(match name {
            "swaps" => self.swaps as f64,
            "comparisons" => self.comparisons as f64,
            "steps" => counting.total(self.swaps, self.comparisons) as f64,
            "total" => (self.swaps + self.comparisons) as f64,
            "final_sortedness" => self.final_sortedness,
            "final_monotonicity_error" => self.final_monotonicity_error as f64,
            "dg_methods" => self.dg_methods,
            "dg_fig6d" => self.dg_fig6d,
            "peak_aggregation" => self.peak_aggregation?,
            "final_aggregation" => self.final_aggregation?,
            _ => return None,
        })
    }
}

pub const METRICS: [&str; 10] = [
    "swaps",
    "comparisons",
    "steps",
    "total",
    "final_sortedness",
    "final_monotonicity_error",
    "dg_methods",
    "dg_fig6d",
    "peak_aggregation",
    "final_aggregation",
];

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<(), LabError> {
    let csv_err = |source| LabError::Csv {
        path: path.to_owned(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| LabError::io(path, e))
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>, LabError> {
    let csv_err = |source| LabError::Csv {
        path: path.to_owned(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().collect::<Result<_, _>>().map_err(csv_err)
}
