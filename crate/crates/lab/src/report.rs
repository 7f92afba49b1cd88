//! Plot-ready tables, one per figure id. No rendering happens here.
//!
//! | id | inputs | rows |
//! |----|--------|------|
//! | `fig3` | any batteries | every run's sortedness on the 101-point progress grid |
//! | `fig4` | any batteries | mean and std of swaps and of steps per battery |
//! | `fig5` | batteries differing in frozen count or kind | mean and std of final monotonicity error |
//! | `fig7` | batteries differing in frozen count | mean and std of delayed gratification |
//! | `fig8` | chimera and pseudo-chimera batteries | mean aggregation vs progress, one column per battery, in input order |
//! | `fig9` | two-part chimeras with opposite directions | mean sortedness and aggregation vs progress |
//!
//! Progress is the fraction of a run's own swaps completed, so runs of
//! different lengths share one axis.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use cellsort_core::experiments::{PolicyScheme, PROGRESS_POINTS};
use cellsort_core::Control;

use crate::battery::Battery;
use crate::error::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    Fig3,
    Fig4,
    Fig5,
    Fig7,
    Fig8,
    Fig9,
}

impl Figure {
    pub const ALL: [Figure; 6] = [Figure::Fig3, Figure::Fig4, Figure::Fig5, Figure::Fig7, Figure::Fig8, Figure::Fig9];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
            Figure::Fig9 => "fig9",
        }
    }

    /// What the figure needs, for error messages.
    pub fn requirement(self) -> &'static str {
        match self {
            Figure::Fig3 | Figure::Fig4 => "one or more battery directories",
            Figure::Fig5 => "one or more battery directories, typically 0-3 frozen cells per algorithm and mode",
            Figure::Fig7 => "one or more battery directories, typically 0-3 movable frozen cells per algorithm",
            Figure::Fig8 => "chimera or pseudo-chimera battery directories (two or more labels each)",
            Figure::Fig9 => "battery directories of two-part chimeras sorting in opposite directions",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown figure {s:?}; expected one of fig3, fig4, fig5, fig7, fig8, fig9"))
    }
}

/// A header row plus string cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> csv::Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let columns = r.headers()?.iter().map(str::to_owned).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_owned).collect()))
            .collect::<csv::Result<_>>()?;
        Ok(Self { columns, rows })
    }
}

/// A loaded battery and the name it is reported under.
pub struct Input<'a> {
    pub name: String,
    pub battery: &'a Battery,
}

fn mode(b: &Battery) -> &'static str {
    match b.config.control() {
        Control::CellView => "cell-view",
        Control::Traditional { .. } => "traditional",
    }
}

fn progress(k: usize) -> String {
    (k as f64 / (PROGRESS_POINTS - 1) as f64).to_string()
}

fn missing(figure: Figure, detail: impl fmt::Display) -> LabError {
    LabError::Usage(format!("{figure} needs {}: {detail}", figure.requirement()))
}

pub fn build(figure: Figure, inputs: &[Input]) -> Result<Table, LabError> {
    if inputs.is_empty() {
        return Err(missing(figure, "no inputs given"));
    }
    match figure {
        Figure::Fig3 => {
            let mut t = Table::new(&["battery", "label", "run", "progress", "sortedness"]);
            for i in inputs {
                for r in &i.battery.summary.reports {
                    for (k, s) in r.sortedness_grid.iter().enumerate() {
                        t.push(vec![i.name.clone(), i.battery.summary.label.clone(), r.index.to_string(), progress(k), s.to_string()]);
                    }
                }
            }
            Ok(t)
        }
        Figure::Fig4 => {
            let mut t = Table::new(&[
                "battery", "label", "mode", "runs", "counting", "swaps_mean", "swaps_std", "steps_mean", "steps_std",
            ]);
            for i in inputs {
                let s = &i.battery.summary;
                t.push(vec![
                    i.name.clone(),
                    s.label.clone(),
                    mode(i.battery).to_owned(),
                    s.swaps.n.to_string(),
                    i.battery.config.counting.name().to_owned(),
                    s.swaps.mean.to_string(),
                    s.swaps.std.to_string(),
                    s.steps.mean.to_string(),
                    s.steps.std.to_string(),
                ]);
            }
            Ok(t)
        }
        Figure::Fig5 | Figure::Fig7 => {
            let (value_cols, fig5) = if figure == Figure::Fig5 {
                (["error_mean", "error_std"], true)
            } else {
                (["dg_mean", "dg_std"], false)
            };
            let mut t = Table::new(&[
                "battery", "label", "mode", "frozen_kind", "frozen_count", "dg_formula", value_cols[0], value_cols[1],
            ]);
            for i in inputs {
                let s = &i.battery.summary;
                let c = &i.battery.config;
                let v = if fig5 { s.final_monotonicity_error } else { s.dg };
                t.push(vec![
                    i.name.clone(),
                    s.label.clone(),
                    mode(i.battery).to_owned(),
                    c.frozen.kind.name().to_owned(),
                    c.frozen.count.to_string(),
                    c.dg_formula.name().to_owned(),
                    v.mean.to_string(),
                    v.std.to_string(),
                ]);
            }
            Ok(t)
        }
        Figure::Fig8 => {
            let mut curves = Vec::new();
            for i in inputs {
                let curve = i.battery.summary.aggregation.as_ref().ok_or_else(|| {
                    missing(figure, format!("{} ({}) has a single label", i.name, i.battery.summary.label))
                })?;
                curves.push(curve);
            }
            let mut columns = vec!["progress"];
            columns.extend(inputs.iter().map(|i| i.name.as_str()));
            let mut t = Table::new(&columns);
            for k in 0..PROGRESS_POINTS {
                let mut row = vec![progress(k)];
                row.extend(curves.iter().map(|c| c.points[k].1.to_string()));
                t.push(row);
            }
            Ok(t)
        }
        Figure::Fig9 => {
            let mut t = Table::new(&["battery", "label", "progress", "sortedness", "aggregation"]);
            for i in inputs {
                let opposed = matches!(&i.battery.config.policy,
                    PolicyScheme::Chimera(p) if p.len() == 2 && p[0].direction != p[1].direction);
                let curve = i.battery.summary.aggregation.as_ref();
                let (true, Some(curve)) = (opposed, curve) else {
                    return Err(missing(figure, format!("{} is {}", i.name, i.battery.summary.label)));
                };
                for k in 0..PROGRESS_POINTS {
                    t.push(vec![
                        i.name.clone(),
                        i.battery.summary.label.clone(),
                        progress(k),
                        i.battery.summary.sortedness_curve[k].1.to_string(),
                        curve.points[k].1.to_string(),
                    ]);
                }
            }
            Ok(t)
        }
    }
}
