use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cellsort_core::experiments::ExperimentConfig;
use cellsort_core::metrics::{Counting, DgFormula};
use cellsort_core::stats::{summarize, welch_t_test, z_test, PValue};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::battery::{load_summary, read_manifest, rebuild, run_to_dir, Battery};
use crate::config::load_config;
use crate::error::LabError;
use crate::report::{self, Figure, Input, Table};
use crate::summary::{SummaryRow, METRICS};

/// Run and evaluate sorting batteries of cell-view and traditional
/// algorithms.
#[derive(Debug, Parser)]
#[command(name = "cellsort", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a battery and write its traces, summary and manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
        #[command(flatten)]
        settings: Settings,
    },
    /// Replay every trace in a battery directory and summarize metrics.
    Evaluate {
        input: PathBuf,
        /// Metrics to report (repeat or comma-separate); default all.
        #[arg(long, value_delimiter = ',')]
        metric: Vec<String>,
        #[command(flatten)]
        settings: Settings,
        /// Also write the table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare one metric between two batteries.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "swaps")]
        metric: String,
        #[arg(long, value_enum, default_value_t = TestKind::Z)]
        test: TestKind,
        #[command(flatten)]
        settings: Settings,
        /// Also write the result row as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the data table behind one figure.
    Report {
        #[arg(long)]
        figure: Figure,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        settings: Settings,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Settings {
    /// Which steps count toward cost: swaps, or swaps plus comparisons.
    #[arg(long, value_enum)]
    counting: Option<CountingArg>,
    /// Delayed-gratification formula.
    #[arg(long, value_enum)]
    dg: Option<DgArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CountingArg {
    Swaps,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DgArg {
    Methods,
    Fig6d,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TestKind {
    Z,
    T,
}

impl Settings {
    fn apply(&self, config: &mut ExperimentConfig) {
        if let Some(c) = self.counting {
            config.counting = match c {
                CountingArg::Swaps => Counting::SwapsOnly,
                CountingArg::All => Counting::SwapsPlusComparisons,
            };
        }
        if let Some(d) = self.dg {
            config.dg_formula = match d {
                DgArg::Methods => DgFormula::Methods,
                DgArg::Fig6d => DgFormula::Fig6D,
            };
        }
    }
}

type Result<T> = std::result::Result<T, LabError>;

fn stdout_err(e: io::Error) -> LabError {
    LabError::io("<stdout>", e)
}

/// `dg` resolves to the formula in force; everything else is a summary
/// column.
fn column(rows: &[SummaryRow], metric: &str, config: &ExperimentConfig) -> Option<Vec<f64>> {
    let name = match metric {
        "dg" => match config.dg_formula {
            DgFormula::Methods => "dg_methods",
            DgFormula::Fig6D => "dg_fig6d",
        },
        m => m,
    };
    rows.iter().map(|r| r.metric(name, config.counting)).collect()
}

fn metric_table(rows: &[SummaryRow], config: &ExperimentConfig, wanted: &[String]) -> Result<Table> {
    let mut table = Table {
        columns: ["metric", "n", "mean", "std"].map(String::from).to_vec(),
        rows: Vec::new(),
    };
    let all: Vec<String> = METRICS.iter().map(|m| m.to_string()).collect();
    let explicit = !wanted.is_empty();
    for m in if explicit { wanted } else { &all } {
        let Some(xs) = column(rows, m, config) else {
            if explicit {
                return Err(LabError::Usage(format!(
                    "metric {m:?} is not available; known metrics: dg, {}",
                    METRICS.join(", ")
                )));
            }
            continue;
        };
        let s = summarize(&xs).map_err(|e| LabError::Usage(format!("{m}: {e}")))?;
        table.rows.push(vec![m.clone(), s.n.to_string(), s.mean.to_string(), s.std.to_string()]);
    }
    Ok(table)
}

fn print_metrics(out: &mut impl Write, table: &Table) -> io::Result<()> {
    for row in &table.rows {
        let mean: f64 = row[2].parse().unwrap_or(f64::NAN);
        let std: f64 = row[3].parse().unwrap_or(f64::NAN);
        writeln!(out, "{:<26} n {:>4}  mean {:>12.4}  std {:>10.4}", row[0], row[1], mean, std)?;
    }
    Ok(())
}

fn print_outcomes(out: &mut impl Write, battery: &Battery) -> io::Result<()> {
    let mut counts: Vec<(&str, usize)> = Vec::new();
    for r in &battery.summary.reports {
        let name = r.terminated_by.name();
        match counts.iter_mut().find(|(n, _)| *n == name) {
            Some((_, c)) => *c += 1,
            None => counts.push((name, 1)),
        }
    }
    let text: Vec<String> = counts.iter().map(|(n, c)| format!("{n} {c}")).collect();
    writeln!(out, "{:<26} {}", "terminated_by", text.join(", "))
}

fn write_table_file(path: &Path, table: &Table) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| LabError::io(path, e))?;
    table.write_csv(file).map_err(|source| LabError::Csv {
        path: path.to_owned(),
        source,
    })
}

fn cmd_run(config: &Path, out: &Path, seed: Option<u64>, reps: Option<usize>, settings: &Settings) -> Result<()> {
    let mut config = load_config(config)?;
    if let Some(s) = seed {
        if s > i64::MAX as u64 {
            return Err(LabError::config("seed", "must fit in a signed 64-bit integer"));
        }
        config.seed = s;
    }
    if let Some(r) = reps {
        config.reps = r;
    }
    settings.apply(&mut config);
    let battery = run_to_dir(&config, out)?;
    let table = metric_table(&battery.rows(), &config, &[])?;
    let mut stdout = io::stdout().lock();
    let mode = match config.control() {
        cellsort_core::Control::CellView => "cell-view",
        cellsort_core::Control::Traditional { .. } => "traditional",
    };
    writeln!(
        stdout,
        "{} ({mode}), n {}, {} runs, digest {}",
        battery.summary.label, config.n, config.reps, battery.digest
    )
    .map_err(stdout_err)?;
    print_metrics(&mut stdout, &table).map_err(stdout_err)?;
    print_outcomes(&mut stdout, &battery).map_err(stdout_err)?;
    for w in &battery.summary.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn load_with(dir: &Path, settings: &Settings) -> Result<Battery> {
    let manifest = read_manifest(dir)?;
    let mut config = manifest.config.clone();
    settings.apply(&mut config);
    rebuild(&manifest, &config)
}

fn cmd_evaluate(input: &Path, metrics: &[String], settings: &Settings, out: Option<&Path>) -> Result<()> {
    let battery = load_with(input, settings)?;
    let (_, stored) = load_summary(input)?;
    let rows = battery.rows();
    if let Some((a, b)) = rows.iter().zip(&stored).find(|(a, b)| a != b) {
        return Err(LabError::Inconsistent {
            path: input.join(crate::battery::SUMMARY),
            message: format!("run {} does not match its replayed trace (stored {:?}, replayed {:?})", b.run, b, a),
        });
    }
    let table = metric_table(&rows, &battery.config, metrics)?;
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "{}: {} traces replayed", battery.summary.label, rows.len()).map_err(stdout_err)?;
    print_metrics(&mut stdout, &table).map_err(stdout_err)?;
    print_outcomes(&mut stdout, &battery).map_err(stdout_err)?;
    if let Some(path) = out {
        write_table_file(path, &table)?;
    }
    Ok(())
}

fn cmd_compare(a: &Path, b: &Path, metric: &str, test: TestKind, settings: &Settings, out: Option<&Path>) -> Result<()> {
    let mut sides = Vec::new();
    for dir in [a, b] {
        let (manifest, rows) = load_summary(dir)?;
        let mut config = manifest.config;
        settings.apply(&mut config);
        let xs = column(&rows, metric, &config).ok_or_else(|| {
            LabError::Usage(format!(
                "metric {metric:?} is not available in {}; known metrics: dg, {}",
                dir.display(),
                METRICS.join(", ")
            ))
        })?;
        sides.push(xs);
    }
    let (xa, xb) = (&sides[0], &sides[1]);
    let (sa, sb) = match (summarize(xa), summarize(xb)) {
        (Ok(sa), Ok(sb)) => (sa, sb),
        (Err(e), _) | (_, Err(e)) => return Err(LabError::Usage(format!("{metric}: {e}"))),
    };
    let (name, statistic, dof, p) = match test {
        TestKind::Z => {
            let r = z_test(&sa, &sb);
            ("z", r.z, None, r.p)
        }
        TestKind::T => {
            let r = welch_t_test(xa, xb).map_err(|e| LabError::Usage(format!("welch t test: {e}")))?;
            ("t", r.t, Some(r.dof), r.p)
        }
    };
    let table = Table {
        columns: [
            "metric", "test", "n_a", "mean_a", "std_a", "n_b", "mean_b", "std_b", "statistic", "dof", "p",
        ]
        .map(String::from)
        .to_vec(),
        rows: vec![vec![
            metric.to_owned(),
            name.to_owned(),
            sa.n.to_string(),
            sa.mean.to_string(),
            sa.std.to_string(),
            sb.n.to_string(),
            sb.mean.to_string(),
            sb.std.to_string(),
            statistic.to_string(),
            dof.map_or_else(String::new, |d| d.to_string()),
            p.to_string(),
        ]],
    };
    let mut stdout = io::stdout().lock();
    let mut print = || -> io::Result<()> {
        writeln!(stdout, "{metric}")?;
        for (label, dir, s) in [("A", a, sa), ("B", b, sb)] {
            writeln!(stdout, "  {label} n {:>4}  mean {:>12.4}  std {:>10.4}  {}", s.n, s.mean, s.std, dir.display())?;
        }
        match dof {
            Some(d) => writeln!(stdout, "  {name} = {statistic:.4} (dof {d:.2}), p = {}", PValue(p))?,
            None => writeln!(stdout, "  {name} = {statistic:.4}, p = {}", PValue(p))?,
        }
        writeln!(stdout)?;
        table.write_csv(&mut stdout).map_err(io::Error::other)
    };
    print().map_err(stdout_err)?;
    if let Some(path) = out {
        write_table_file(path, &table)?;
    }
    Ok(())
}

fn cmd_report(figure: Figure, inputs: &[PathBuf], settings: &Settings, out: Option<&Path>) -> Result<()> {
    let batteries = inputs
        .iter()
        .map(|dir| load_with(dir, settings))
        .collect::<Result<Vec<_>>>()?;
    let named: Vec<Input> = inputs
        .iter()
        .zip(&batteries)
        .map(|(dir, battery)| Input {
            name: dir
                .file_name()
                .map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned()),
            battery,
        })
        .collect();
    let table = report::build(figure, &named)?;
    match out {
        Some(path) => write_table_file(path, &table),
        None => table.write_csv(io::stdout().lock()).map_err(|source| LabError::Csv {
            path: "<stdout>".into(),
            source,
        }),
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            reps,
            settings,
        } => cmd_run(&config, &out, seed, reps, &settings),
        Command::Evaluate {
            input,
            metric,
            settings,
            out,
        } => cmd_evaluate(&input, &metric, &settings, out.as_deref()),
        Command::Compare {
            a,
            b,
            metric,
            test,
            settings,
            out,
        } => cmd_compare(&a, &b, &metric, test, &settings, out.as_deref()),
        Command::Report {
            figure,
            inputs,
            settings,
            out,
        } => cmd_report(figure, &inputs, &settings, out.as_deref()),
    }
}

/// Parse arguments, run, and map failures to exit codes: 2 for
/// configuration and usage errors (clap's own parse errors included), 3
/// for I/O.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
