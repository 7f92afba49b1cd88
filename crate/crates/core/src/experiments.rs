//! Experiment batteries: how to build each run's initial array, run it, and
//! reduce the runs to summaries.
//!
//! Each run draws two independent streams from its seed: one builds the
//! array (values, algotypes, frozen positions) and one drives the scheduler.
//! Runs at the same index of two batteries that differ only in control mode
//! therefore start from the same array.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{Engine, SchedulerConfig, TerminatedBy};
use crate::error::ConfigError;
use crate::metrics::{
    self, AggregationTrajectory, delayed_gratification, resample, segment_dg_events, Counting, DgAggregate, DgFormula,
};
use crate::model::{make_array, Algorithm, CellArrayState, Control, Direction, FrozenKind, Mode};
use crate::probe::{replay, NullProbe, Observed, Probe, ReplayError, TraceRecord};
use crate::seed::{run_seed, substream};
use crate::stats::{summarize, SampleSummary};

/// Points on the normalized progress grid, 0% to 100% inclusive.
pub const PROGRESS_POINTS: usize = 101;

const SETUP_STREAM: u64 = 1;
const SCHEDULER_STREAM: u64 = 2;
const MAX_BAND_ATTEMPTS: u32 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueScheme {
    /// A uniform random permutation of `1..=n`.
    DistinctPermutation,
    /// Every value of `lo..=hi` exactly `copies` times, shuffled.
    DuplicatedRange { lo: i64, hi: i64, copies: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChimeraPart {
    pub algorithm: Algorithm,
    pub direction: Direction,
    pub proportion: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PolicyScheme {
    Pure {
        algorithm: Algorithm,
        mode: Mode,
        direction: Direction,
    },
    /// Cells of several algotypes; part `i` gets aggregation label `i`.
    Chimera(Vec<ChimeraPart>),
    /// One algorithm everywhere, with `labels` arbitrary labels split evenly.
    PseudoChimera { algorithm: Algorithm, labels: u8 },
}

impl PolicyScheme {
    pub fn pure(algorithm: Algorithm, mode: Mode) -> Self {
        PolicyScheme::Pure {
            algorithm,
            mode,
            direction: Direction::Increasing,
        }
    }

    /// Equal-share, same-direction mix.
    pub fn chimera(algorithms: &[Algorithm]) -> Self {
        let share = 1.0 / algorithms.len() as f64;
        PolicyScheme::Chimera(
            algorithms
                .iter()
                .map(|&algorithm| ChimeraPart {
                    algorithm,
                    direction: Direction::Increasing,
                    proportion: share,
                })
                .collect(),
        )
    }

    /// Number of distinct aggregation labels.
    pub fn label_count(&self) -> usize {
        match self {
            PolicyScheme::Pure { .. } => 1,
            PolicyScheme::Chimera(parts) => parts.len(),
            PolicyScheme::PseudoChimera { labels, .. } => *labels as usize,
        }
    }

    /// Short human-readable name, e.g. `bubble+selection`.
    pub fn describe(&self) -> String {
        match self {
            PolicyScheme::Pure { algorithm, .. } => String::from(algorithm.name()),
            PolicyScheme::Chimera(parts) => {
                let names: Vec<_> = parts
                    .iter()
                    .map(|p| match p.direction {
                        Direction::Increasing => String::from(p.algorithm.name()),
                        Direction::Decreasing => format!("{}(dec)", p.algorithm.name()),
                    })
                    .collect();
                names.join("+")
            }
            PolicyScheme::PseudoChimera { algorithm, labels } => {
                format!("{}x{}", algorithm.name(), labels)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrozenPlacement {
    UniformRandom,
    ExplicitIndices(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrozenSpec {
    pub count: usize,
    pub kind: FrozenKind,
    pub placement: FrozenPlacement,
    /// Draw random positions once for the whole battery instead of per run.
    pub same_positions_every_run: bool,
}

impl Default for FrozenSpec {
    fn default() -> Self {
        Self {
            count: 0,
            kind: FrozenKind::FrozenMovable,
            placement: FrozenPlacement::UniformRandom,
            same_positions_every_run: false,
        }
    }
}

impl FrozenSpec {
    pub fn random(count: usize, kind: FrozenKind) -> Self {
        Self {
            count,
            kind,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub values: ValueScheme,
    pub policy: PolicyScheme,
    pub frozen: FrozenSpec,
    pub counting: Counting,
    pub dg_formula: DgFormula,
    pub dg_aggregate: DgAggregate,
    /// Only the non-seed fields are used; run seeds come from `seed`.
    pub scheduler: SchedulerConfig,
    /// Reject initial arrays whose sortedness (increasing, strict) falls
    /// outside this closed interval.
    pub initial_sortedness: Option<(f64, f64)>,
}

impl ExperimentConfig {
    /// 100 cells, 100 runs, distinct values, nothing frozen.
    pub fn new(policy: PolicyScheme) -> Self {
        Self {
            n: 100,
            reps: 100,
            seed: 0,
            values: ValueScheme::DistinctPermutation,
            policy,
            frozen: FrozenSpec::default(),
            counting: Counting::SwapsOnly,
            dg_formula: DgFormula::Methods,
            dg_aggregate: DgAggregate::Mean,
            scheduler: SchedulerConfig::default(),
            initial_sortedness: None,
        }
    }

    pub fn control(&self) -> Control {
        match self.policy {
            PolicyScheme::Pure {
                algorithm,
                mode: Mode::Traditional,
                direction,
            } => Control::Traditional { algorithm, direction },
            _ => Control::CellView,
        }
    }

    /// Whether every run is expected to end fully sorted: one direction and
    /// no immovable cells.
    pub fn expects_full_sort(&self) -> bool {
        let one_direction = match &self.policy {
            PolicyScheme::Chimera(parts) => parts.iter().all(|p| p.direction == parts[0].direction),
            _ => true,
        };
        one_direction && (self.frozen.count == 0 || self.frozen.kind != FrozenKind::FrozenImmovable)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n == 0 {
            return Err(ConfigError::new("n", "must be at least 1"));
        }
        if self.reps == 0 {
            return Err(ConfigError::new("reps", "must be at least 1"));
        }
        if let ValueScheme::DuplicatedRange { lo, hi, copies } = self.values {
            if hi < lo {
                return Err(ConfigError::new("values.hi", "must not be below values.lo"));
            }
            let count = (hi - lo + 1) as u128 * copies as u128;
            if count != self.n as u128 {
                return Err(ConfigError::new(
                    "values.copies",
                    format!("{lo}..={hi} x {copies} gives {count} values, n is {}", self.n),
                ));
            }
        }
        match &self.policy {
            PolicyScheme::Pure { .. } => {}
            PolicyScheme::Chimera(parts) => {
                if parts.is_empty() {
                    return Err(ConfigError::new("policy.algotypes", "chimera needs at least one part"));
                }
                if parts.len() > u8::MAX as usize {
                    return Err(ConfigError::new("policy.algotypes", "too many parts"));
                }
                if parts.iter().any(|p| !(p.proportion > 0.0)) {
                    return Err(ConfigError::new("policy.proportions", "proportions must be positive"));
                }
                let total: f64 = parts.iter().map(|p| p.proportion).sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(ConfigError::new(
                        "policy.proportions",
                        format!("proportions sum to {total}, not 1"),
                    ));
                }
            }
            PolicyScheme::PseudoChimera { labels, .. } => {
                if *labels < 2 {
                    return Err(ConfigError::new("policy.labels", "pseudo-chimera needs at least two labels"));
                }
            }
        }
        if self.frozen.count > self.n {
            return Err(ConfigError::new(
                "frozen.count",
                format!("{} frozen cells requested for {} cells", self.frozen.count, self.n),
            ));
        }
        if self.frozen.count > 0 && self.frozen.kind == FrozenKind::Active {
            return Err(ConfigError::new("frozen.kind", "frozen cells must be movable or immovable"));
        }
        if let FrozenPlacement::ExplicitIndices(ix) = &self.frozen.placement {
            if ix.len() != self.frozen.count {
                return Err(ConfigError::new(
                    "frozen.placement",
                    format!("{} indices given for frozen.count = {}", ix.len(), self.frozen.count),
                ));
            }
            if let Some(&bad) = ix.iter().find(|&&i| i >= self.n) {
                return Err(ConfigError::new(
                    "frozen.placement",
                    format!("index {bad} out of range for n = {}", self.n),
                ));
            }
        }
        if let Some((lo, hi)) = self.initial_sortedness {
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                return Err(ConfigError::new("values.initial_sortedness", "need 0 <= lo <= hi <= 1"));
            }
        }
        if self.scheduler.quiescence_window == 0 {
            return Err(ConfigError::new("scheduler.quiescence_window", "must be positive"));
        }
        if self.scheduler.max_activations == Some(0) {
            return Err(ConfigError::new("scheduler.max_activations", "must be positive"));
        }
        Ok(())
    }
}

/// Split `n` items over shares by largest remainder; ties go to the earlier
/// share.
pub fn apportion(n: usize, shares: &[f64]) -> Vec<usize> {
    let total: f64 = shares.iter().sum();
    let quotas: Vec<f64> = shares.iter().map(|s| s / total * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| libm::floor(*q) as usize).collect();
    let mut order: Vec<usize> = (0..shares.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - counts[a] as f64;
        let rb = quotas[b] - counts[b] as f64;
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let assigned: usize = counts.iter().sum();
    for &i in order.iter().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Everything needed to execute one run.
#[derive(Clone, Debug, PartialEq)]
pub struct PlannedRun {
    pub index: usize,
    pub seed: u64,
    pub state: CellArrayState,
    pub control: Control,
    pub scheduler: SchedulerConfig,
}

fn labels_shuffled(counts: &[usize], rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mut labels: Vec<u8> = counts
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| core::iter::repeat_n(i as u8, c))
        .collect();
    labels.shuffle(rng);
    labels
}

fn draw_values(config: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Vec<i64> {
    let mut values: Vec<i64> = match config.values {
        ValueScheme::DistinctPermutation => (1..=config.n as i64).collect(),
        ValueScheme::DuplicatedRange { lo, hi, copies } => {
            (lo..=hi).flat_map(|v| core::iter::repeat_n(v, copies)).collect()
        }
    };
    values.shuffle(rng);
    values
}

fn draw_frozen(config: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Vec<(usize, FrozenKind)> {
    let kind = config.frozen.kind;
    match &config.frozen.placement {
        FrozenPlacement::ExplicitIndices(ix) => ix.iter().map(|&i| (i, kind)).collect(),
        FrozenPlacement::UniformRandom => {
            let mut ix = index::sample(rng, config.n, config.frozen.count).into_vec();
            ix.sort_unstable();
            ix.into_iter().map(|i| (i, kind)).collect()
        }
    }
}

/// Build run `index` of a battery.
pub fn plan_run(config: &ExperimentConfig, index: usize) -> Result<PlannedRun, ConfigError> {
    config.validate()?;
    let n = config.n;
    let seed = run_seed(config.seed, index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(substream(seed, SETUP_STREAM));

    let mut values = draw_values(config, &mut rng);
    if let Some((lo, hi)) = config.initial_sortedness {
        let mut attempts = 0;
        while !(lo..=hi).contains(&metrics::sortedness_of(&values, Direction::Increasing, true)) {
            attempts += 1;
            if attempts >= MAX_BAND_ATTEMPTS {
                return Err(ConfigError::new(
                    "values.initial_sortedness",
                    format!("no shuffle with sortedness in [{lo}, {hi}] after {attempts} draws"),
                ));
            }
            values.shuffle(&mut rng);
        }
    }

    let (algotypes, directions, groups): (Vec<_>, Vec<_>, Vec<u8>) = match &config.policy {
        PolicyScheme::Pure { algorithm, direction, .. } => (
            vec![*algorithm; n],
            vec![*direction; n],
            vec![algorithm.default_group(); n],
        ),
        PolicyScheme::Chimera(parts) => {
            let shares: Vec<f64> = parts.iter().map(|p| p.proportion).collect();
            let labels = labels_shuffled(&apportion(n, &shares), &mut rng);
            (
                labels.iter().map(|&l| parts[l as usize].algorithm).collect(),
                labels.iter().map(|&l| parts[l as usize].direction).collect(),
                labels,
            )
        }
        PolicyScheme::PseudoChimera { algorithm, labels } => {
            let shares = vec![1.0; *labels as usize];
            let labels = labels_shuffled(&apportion(n, &shares), &mut rng);
            (vec![*algorithm; n], vec![Direction::Increasing; n], labels)
        }
    };

    let frozen = if config.frozen.count == 0 {
        Vec::new()
    } else if config.frozen.same_positions_every_run {
        let mut shared = ChaCha8Rng::seed_from_u64(substream(config.seed, SETUP_STREAM));
        draw_frozen(config, &mut shared)
    } else {
        draw_frozen(config, &mut rng)
    };

    let state = make_array(&values, &algotypes, &directions, &frozen)?.with_groups(&groups)?;
    let mut scheduler = config.scheduler;
    scheduler.seed = substream(seed, SCHEDULER_STREAM);
    Ok(PlannedRun {
        index,
        seed,
        state,
        control: config.control(),
        scheduler,
    })
}

/// Per-run results, one summary row each.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub index: usize,
    pub seed: u64,
    pub swaps: u64,
    pub comparisons: u64,
    pub denied: u64,
    pub rounds: u64,
    pub activations: u64,
    pub terminated_by: TerminatedBy,
    /// Total under the battery's counting convention.
    pub steps: u64,
    pub initial_sortedness: f64,
    pub final_sortedness: f64,
    pub final_monotonicity_error: u32,
    pub dg_methods: f64,
    pub dg_fig6d: f64,
    pub dg_events: usize,
    pub initial_aggregation: Option<f64>,
    pub final_aggregation: Option<f64>,
    pub peak_aggregation: Option<f64>,
    /// Fraction of the run's swaps completed when aggregation first peaked.
    pub peak_position: Option<f64>,
    pub sortedness_grid: Vec<f64>,
    pub aggregation_grid: Option<Vec<f64>>,
    /// Largest minus smallest round-end sortedness over the last
    /// quiescence-window rounds and the round before them.
    pub final_window_change: f64,
    pub final_values: Vec<i64>,
}

impl RunReport {
    /// The delayed-gratification value under `formula`.
    pub fn dg(&self, formula: DgFormula) -> f64 {
        match formula {
            DgFormula::Methods => self.dg_methods,
            DgFormula::Fig6D => self.dg_fig6d,
        }
    }
}

/// How a finished run is reduced to a [`RunReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReportSettings {
    pub counting: Counting,
    pub dg_aggregate: DgAggregate,
    pub quiescence_window: u32,
    /// Aggregation fields are left empty for single-label arrays.
    pub multi_label: bool,
}

impl ExperimentConfig {
    pub fn report_settings(&self) -> ReportSettings {
        ReportSettings {
            counting: self.counting,
            dg_aggregate: self.dg_aggregate,
            quiescence_window: self.scheduler.quiescence_window,
            multi_label: self.policy.label_count() >= 2,
        }
    }
}

/// Execute a planned run, feeding every record to `probe`.
pub fn execute_run<P: Probe>(
    config: &ExperimentConfig,
    plan: PlannedRun,
    digest: &str,
    probe: P,
) -> Result<(RunReport, P), P::Error> {
    let (index, seed) = (plan.index, plan.seed);
    let engine = Engine::new(plan.state, plan.control, plan.scheduler, Observed::new(probe))
        .with_digest(digest)
        .with_header_seed(seed);
    let (outcome, observed) = engine.run()?;
    let report = build_report(index, seed, &observed, &outcome.final_state, config.report_settings());
    Ok((report, observed.inner))
}

/// Rebuild the report of run `index` from its recorded trace. The trace is
/// replayed first, so a report is only produced for a consistent trace.
pub fn report_from_trace(
    records: &[TraceRecord],
    index: usize,
    settings: ReportSettings,
) -> Result<RunReport, ReplayError> {
    let replayed = replay(records)?;
    let mut observed = Observed::new(NullProbe);
    for r in records {
        match observed.record(r) {
            Ok(()) => {}
            Err(never) => match never {},
        }
    }
    let Some(TraceRecord::Header(header)) = records.first() else {
        return Err(ReplayError::NoHeader);
    };
    Ok(build_report(index, header.seed, &observed, &replayed.final_state, settings))
}

fn build_report<P>(
    index: usize,
    seed: u64,
    observed: &Observed<P>,
    final_state: &CellArrayState,
    settings: ReportSettings,
) -> RunReport {
    let footer = observed.footer.as_ref().expect("engine always writes a footer");
    let reference = observed.reference_direction.expect("engine always writes a header");
    let traj = observed.sortedness.values();
    let events = segment_dg_events(&traj);
    let empty = AggregationTrajectory::default();
    let agg = if settings.multi_label { &observed.aggregation } else { &empty };
    let (peak_aggregation, peak_position) = match agg.peak() {
        Some((v, p)) => (Some(v), Some(p)),
        None => (None, None),
    };
    let window = settings.quiescence_window as usize + 1;
    let mut tail: Vec<f64> = observed.round_ends.iter().map(|&(_, s)| s).collect();
    if tail.len() < window {
        tail.insert(0, traj[0]);
    }
    let tail = &tail[tail.len().saturating_sub(window)..];
    let final_window_change = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - tail.iter().copied().fold(f64::INFINITY, f64::min);
    RunReport {
        index,
        seed,
        swaps: footer.swaps,
        comparisons: footer.comparisons,
        denied: footer.denied,
        rounds: footer.rounds,
        activations: footer.activations,
        terminated_by: footer.terminated_by,
        steps: settings.counting.total(footer.swaps, footer.comparisons),
        initial_sortedness: traj[0],
        final_sortedness: metrics::sortedness(final_state, reference, true),
        final_monotonicity_error: metrics::monotonicity_error(final_state, reference),
        dg_methods: delayed_gratification(&events, DgFormula::Methods, settings.dg_aggregate),
        dg_fig6d: delayed_gratification(&events, DgFormula::Fig6D, settings.dg_aggregate),
        dg_events: events.len(),
        initial_aggregation: agg.samples.first().copied(),
        final_aggregation: agg.samples.last().copied(),
        peak_aggregation,
        peak_position,
        sortedness_grid: resample(&traj, PROGRESS_POINTS),
        aggregation_grid: (!agg.samples.is_empty()).then(|| agg.resample(PROGRESS_POINTS)),
        final_window_change,
        final_values: final_state.values(),
    }
}

/// Mean aggregation over normalized progress.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregationCurve {
    /// `(progress fraction, mean aggregation)` on the progress grid.
    pub points: Vec<(f64, f64)>,
    pub peak_value: f64,
    pub peak_position: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatterySummary {
    pub label: String,
    pub reports: Vec<RunReport>,
    pub swaps: SampleSummary,
    pub steps: SampleSummary,
    pub final_sortedness: SampleSummary,
    pub final_monotonicity_error: SampleSummary,
    pub dg: SampleSummary,
    pub peak_aggregation: Option<SampleSummary>,
    pub aggregation: Option<AggregationCurve>,
    /// Mean sortedness over normalized progress.
    pub sortedness_curve: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
}

fn grid_mean(grids: &[&[f64]]) -> Vec<(f64, f64)> {
    let last = (PROGRESS_POINTS - 1) as f64;
    (0..PROGRESS_POINTS)
        .map(|k| {
            let mean = grids.iter().map(|g| g[k]).sum::<f64>() / grids.len() as f64;
            (k as f64 / last, mean)
        })
        .collect()
}

fn summary_of(reports: &[RunReport], f: impl Fn(&RunReport) -> f64) -> SampleSummary {
    let xs: Vec<f64> = reports.iter().map(f).collect();
    summarize(&xs).expect("battery has at least one run")
}

impl BatterySummary {
    pub fn from_reports(config: &ExperimentConfig, mut reports: Vec<RunReport>) -> Self {
        assert!(!reports.is_empty(), "battery has at least one run");
        reports.sort_by_key(|r| r.index);
        let mut warnings = Vec::new();
        if config.expects_full_sort() {
            for r in reports.iter().filter(|r| r.terminated_by == TerminatedBy::ActivationCap) {
                warnings.push(format!(
                    "run {} (seed {}) hit the activation cap before sorting",
                    r.index, r.seed
                ));
            }
        }
        let peaks: Vec<f64> = reports.iter().filter_map(|r| r.peak_aggregation).collect();
        let peak_aggregation = (peaks.len() == reports.len()).then(|| summarize(&peaks).expect("non-empty"));
        let aggregation = if config.policy.label_count() >= 2 && peak_aggregation.is_some() {
            let grids: Vec<&[f64]> = reports
                .iter()
                .map(|r| r.aggregation_grid.as_deref().expect("checked above"))
                .collect();
            let points = grid_mean(&grids);
            let (peak_position, peak_value) = points
                .iter()
                .copied()
                .fold(None, |best: Option<(f64, f64)>, p| match best {
                    Some(b) if b.1 >= p.1 => best,
                    _ => Some(p),
                })
                .expect("grid is non-empty");
            Some(AggregationCurve {
                points,
                peak_value,
                peak_position,
            })
        } else {
            None
        };
        let sgrids: Vec<&[f64]> = reports.iter().map(|r| r.sortedness_grid.as_slice()).collect();
        Self {
            label: config.policy.describe(),
            swaps: summary_of(&reports, |r| r.swaps as f64),
            steps: summary_of(&reports, |r| r.steps as f64),
            final_sortedness: summary_of(&reports, |r| r.final_sortedness),
            final_monotonicity_error: summary_of(&reports, |r| r.final_monotonicity_error as f64),
            dg: summary_of(&reports, |r| r.dg(config.dg_formula)),
            peak_aggregation,
            aggregation,
            sortedness_curve: grid_mean(&sgrids),
            warnings,
            reports,
        }
    }

    /// Per-run values of one numeric summary column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        self.reports.iter().map(|r| report_metric(r, name)).collect()
    }
}

/// Numeric summary columns by name.
pub fn report_metric(r: &RunReport, name: &str) -> Option<f64> {
    Some(match name {
        "swaps" => r.swaps as f64,
        "comparisons" => r.comparisons as f64,
        "steps" => r.steps as f64,
        "total" => (r.swaps + r.comparisons) as f64,
        "final_sortedness" => r.final_sortedness,
        "final_monotonicity_error" => r.final_monotonicity_error as f64,
        "dg_methods" => r.dg_methods,
        "dg_fig6d" => r.dg_fig6d,
        "peak_aggregation" => r.peak_aggregation?,
        "final_aggregation" => r.final_aggregation?,
        _ => return None,
    })
}

/// Mean aggregation trajectory of a multi-label battery.
pub fn aggregation_trajectory(battery: &BatterySummary) -> Result<&AggregationCurve, ConfigError> {
    battery.aggregation.as_ref().ok_or_else(|| {
        ConfigError::new("policy", "aggregation needs at least two labels and two cells")
    })
}

/// Run every replicate in order without keeping traces.
pub fn run_battery(config: &ExperimentConfig) -> Result<BatterySummary, ConfigError> {
    config.validate()?;
    let mut reports = Vec::with_capacity(config.reps);
    for i in 0..config.reps {
        let plan = plan_run(config, i)?;
        let (report, _) = match execute_run(config, plan, "", NullProbe) {
            Ok(r) => r,
            Err(never) => match never {},
        };
        reports.push(report);
    }
    Ok(BatterySummary::from_reports(config, reports))
}

/// Check that `config` mixes exactly two algotypes sorting in opposite
/// directions, and pin initial sortedness to `[0.45, 0.55]`.
pub fn opposed_directions_config(config: &ExperimentConfig) -> Result<ExperimentConfig, ConfigError> {
    let PolicyScheme::Chimera(parts) = &config.policy else {
        return Err(ConfigError::new("policy", "opposed directions need a two-part chimera"));
    };
    if parts.len() != 2 || parts[0].direction == parts[1].direction {
        return Err(ConfigError::new(
            "policy.directions",
            "opposed directions need exactly two parts with opposite directions",
        ));
    }
    let mut c = config.clone();
    c.initial_sortedness = Some((0.45, 0.55));
    Ok(c)
}

pub fn opposed_directions_battery(config: &ExperimentConfig) -> Result<BatterySummary, ConfigError> {
    run_battery(&opposed_directions_config(config)?)
}
