//! The probe: an ordered record of everything a run did.
//!
//! A trace is `Header`, then any number of `Event` and `Snapshot` records in
//! execution order, then one `Footer`. [`RecordOrder`] enforces that shape;
//! every probe that keeps records runs it.

use alloc::string::String;
use alloc::vec::Vec;
use core::convert::Infallible;
use core::fmt;

use crate::engine::TerminatedBy;
use crate::error::ConfigError;
use crate::metrics::{AggregationTrajectory, SortednessTrajectory};
use crate::model::{
    make_array, Algorithm, CellArrayState, CellId, Control, DenyReason, Direction, FrozenKind,
};

pub const FORMAT_VERSION: &str = "cellsort-trace/1";

/// Per-cell attributes fixed at construction, indexed by cell id.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RosterEntry {
    pub algotype: Algorithm,
    pub direction: Direction,
    pub frozen: FrozenKind,
    pub group: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub format_version: String,
    pub config_digest: String,
    pub seed: u64,
    pub n: usize,
    pub control: Control,
    /// Direction the sortedness and error snapshots are measured in.
    pub reference_direction: Direction,
    pub roster: Vec<RosterEntry>,
    pub initial_values: Vec<i64>,
}

impl Header {
    /// Describe a freshly built array (cell ids must still be in initial order).
    pub fn for_state(
        state: &CellArrayState,
        control: Control,
        seed: u64,
        config_digest: impl Into<String>,
    ) -> Self {
        debug_assert!(state.cells.iter().enumerate().all(|(i, c)| c.id as usize == i));
        Self {
            format_version: String::from(FORMAT_VERSION),
            config_digest: config_digest.into(),
            seed,
            n: state.len(),
            control,
            reference_direction: reference_direction(state, control),
            roster: state
                .cells
                .iter()
                .map(|c| RosterEntry {
                    algotype: c.algotype,
                    direction: c.direction,
                    frozen: c.frozen,
                    group: c.group,
                })
                .collect(),
            initial_values: state.values(),
        }
    }

    /// Rebuild the array the run started from.
    pub fn initial_state(&self) -> Result<CellArrayState, ConfigError> {
        let algotypes: Vec<_> = self.roster.iter().map(|r| r.algotype).collect();
        let directions: Vec<_> = self.roster.iter().map(|r| r.direction).collect();
        let frozen: Vec<_> = self
            .roster
            .iter()
            .enumerate()
            .filter(|(_, r)| r.frozen.is_frozen())
            .map(|(i, r)| (i, r.frozen))
            .collect();
        let groups: Vec<_> = self.roster.iter().map(|r| r.group).collect();
        make_array(&self.initial_values, &algotypes, &directions, &frozen)?.with_groups(&groups)
    }
}

/// Direction used for snapshots: the controller's, the cells' common one,
/// or increasing for mixed-direction arrays.
pub fn reference_direction(state: &CellArrayState, control: Control) -> Direction {
    match control {
        Control::Traditional { direction, .. } => direction,
        Control::CellView => state.common_direction().unwrap_or(Direction::Increasing),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Actor {
    Cell(CellId),
    Controller,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    Compare,
    Swap,
    SwapDenied(DenyReason),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Event {
    pub round: u64,
    pub kind: EventKind,
    pub actor: Actor,
    pub index_a: usize,
    pub index_b: usize,
    /// Values and algotypes at the two positions when the event happened
    /// (before the swap, for swaps).
    pub value_a: i64,
    pub value_b: i64,
    pub algotype_a: Algorithm,
    pub algotype_b: Algorithm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SnapshotTrigger {
    Initial,
    Swap,
    RoundEnd,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Snapshot {
    pub round: u64,
    /// Number of events recorded before this snapshot.
    pub event_index: u64,
    pub trigger: SnapshotTrigger,
    pub sortedness: f64,
    pub monotonicity_error: u32,
    /// Undefined for arrays of fewer than two cells.
    pub aggregation_value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Footer {
    pub swaps: u64,
    pub comparisons: u64,
    pub denied: u64,
    pub rounds: u64,
    pub activations: u64,
    pub terminated_by: TerminatedBy,
    /// Cell id at each position of the final array.
    pub final_ids: Vec<CellId>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceRecord {
    Header(Header),
    Event(Event),
    Snapshot(Snapshot),
    Footer(Footer),
}

impl TraceRecord {
    pub fn kind_name(&self) -> &'static str {
        match self {
            TraceRecord::Header(_) => "header",
            TraceRecord::Event(_) => "event",
            TraceRecord::Snapshot(_) => "snapshot",
            TraceRecord::Footer(_) => "footer",
        }
    }
}

/// Receives the records of one run, in order.
pub trait Probe {
    type Error;
    fn record(&mut self, record: &TraceRecord) -> Result<(), Self::Error>;
}

impl<P: Probe + ?Sized> Probe for &mut P {
    type Error = P::Error;
    fn record(&mut self, record: &TraceRecord) -> Result<(), Self::Error> {
        (**self).record(record)
    }
}

/// Records arriving in an order a trace cannot have.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderError {
    MissingHeader { got: &'static str },
    DuplicateHeader,
    AfterFooter { got: &'static str },
}

impl fmt::Display for OrderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderError::MissingHeader { got } => write!(f, "{got} record before header"),
            OrderError::DuplicateHeader => f.write_str("second header record"),
            OrderError::AfterFooter { got } => write!(f, "{got} record after footer"),
        }
    }
}

impl core::error::Error for OrderError {}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
enum Phase {
    #[default]
    Empty,
    Open,
    Closed,
}

/// Header-first, footer-last state machine.
#[derive(Clone, Copy, Debug, Default)]
pub struct RecordOrder {
    phase: Phase,
}

impl RecordOrder {
    pub fn check(&mut self, record: &TraceRecord) -> Result<(), OrderError> {
        let got = record.kind_name();
        self.phase = match (self.phase, record) {
            (Phase::Empty, TraceRecord::Header(_)) => Phase::Open,
            (Phase::Empty, _) => return Err(OrderError::MissingHeader { got }),
            (Phase::Open, TraceRecord::Header(_)) => return Err(OrderError::DuplicateHeader),
            (Phase::Open, TraceRecord::Footer(_)) => Phase::Closed,
            (Phase::Open, _) => Phase::Open,
            (Phase::Closed, _) => return Err(OrderError::AfterFooter { got }),
        };
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        self.phase == Phase::Closed
    }
}

/// Discards everything.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullProbe;

impl Probe for NullProbe {
    type Error = Infallible;
    fn record(&mut self, _: &TraceRecord) -> Result<(), Infallible> {
        Ok(())
    }
}

/// Keeps the whole trace in memory.
#[derive(Clone, Debug, Default)]
pub struct MemoryProbe {
    pub records: Vec<TraceRecord>,
    order: RecordOrder,
}

impl MemoryProbe {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Probe for MemoryProbe {
    type Error = OrderError;
    fn record(&mut self, record: &TraceRecord) -> Result<(), OrderError> {
        self.order.check(record)?;
        self.records.push(record.clone());
        Ok(())
    }
}

/// Builds the metric series a run needs while forwarding every record to an
/// inner probe.
#[derive(Clone, Debug)]
pub struct Observed<P> {
    pub inner: P,
    pub sortedness: SortednessTrajectory,
    pub aggregation: AggregationTrajectory,
    /// Sortedness at the end of every round, `(round, sortedness)`.
    pub round_ends: Vec<(u64, f64)>,
    pub reference_direction: Option<Direction>,
    pub footer: Option<Footer>,
}

impl<P> Observed<P> {
    pub fn new(inner: P) -> Self {
        Self {
            inner,
            sortedness: SortednessTrajectory::default(),
            aggregation: AggregationTrajectory::default(),
            round_ends: Vec::new(),
            reference_direction: None,
            footer: None,
        }
    }
}

impl<P: Probe> Probe for Observed<P> {
    type Error = P::Error;
    fn record(&mut self, record: &TraceRecord) -> Result<(), P::Error> {
        match record {
            TraceRecord::Header(h) => self.reference_direction = Some(h.reference_direction),
            TraceRecord::Footer(f) => self.footer = Some(f.clone()),
            TraceRecord::Event(_) => {}
            TraceRecord::Snapshot(s) => match s.trigger {
                SnapshotTrigger::Initial | SnapshotTrigger::Swap => {
                    self.sortedness.samples.push((s.event_index, s.sortedness));
                    if let Some(a) = s.aggregation_value {
                        self.aggregation.samples.push(a);
                    }
                }
                SnapshotTrigger::RoundEnd => self.round_ends.push((s.round, s.sortedness)),
            },
        }
        self.inner.record(record)
    }
}

/// Where a trace stopped agreeing with its own replay.
#[derive(Clone, Debug, PartialEq)]
pub enum ReplayError {
    NoHeader,
    BadHeader(ConfigError),
    /// The record at this index disagrees with the replayed array.
    Mismatch { record: usize, what: &'static str },
    NoFooter,
}

impl fmt::Display for ReplayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplayError::NoHeader => f.write_str("trace does not start with a header"),
            ReplayError::BadHeader(e) => write!(f, "header does not describe a valid array: {e}"),
            ReplayError::Mismatch { record, what } => write!(f, "record {record}: {what} differs on replay"),
            ReplayError::NoFooter => f.write_str("trace has no footer"),
        }
    }
}

impl core::error::Error for ReplayError {}

/// What a successful replay rebuilt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplaySummary {
    pub swaps: u64,
    pub snapshots: u64,
    pub final_state: CellArrayState,
}

/// Re-apply every recorded swap to the recorded initial array and check
/// every snapshot and the footer against metrics recomputed from scratch.
pub fn replay(records: &[TraceRecord]) -> Result<ReplaySummary, ReplayError> {
    let Some(TraceRecord::Header(header)) = records.first() else {
        return Err(ReplayError::NoHeader);
    };
    let mut state = header.initial_state().map_err(ReplayError::BadHeader)?;
    let dir = header.reference_direction;
    let (mut swaps, mut snapshots) = (0, 0);
    let mismatch = |record, what| Err(ReplayError::Mismatch { record, what });
    for (i, record) in records.iter().enumerate().skip(1) {
        match record {
            TraceRecord::Header(_) => return mismatch(i, "header position"),
            TraceRecord::Event(e) => {
                let n = state.len();
                if e.index_a >= n || e.index_b >= n {
                    return mismatch(i, "event index");
                }
                let (a, b) = (state.cells[e.index_a], state.cells[e.index_b]);
                if (a.value, b.value) != (e.value_a, e.value_b)
                    || (a.algotype, b.algotype) != (e.algotype_a, e.algotype_b)
                {
                    return mismatch(i, "event operands");
                }
                if e.kind == EventKind::Swap {
                    if state.attempt_swap(e.index_a, e.index_b) != crate::model::SwapOutcome::Applied {
                        return mismatch(i, "swap gating");
                    }
                    swaps += 1;
                }
            }
            TraceRecord::Snapshot(s) => {
                let aggregation = crate::metrics::aggregation_value(&state).ok();
                if s.sortedness != crate::metrics::sortedness(&state, dir, true)
                    || s.monotonicity_error != crate::metrics::monotonicity_error(&state, dir)
                    || s.aggregation_value != aggregation
                {
                    return mismatch(i, "snapshot metrics");
                }
                snapshots += 1;
            }
            TraceRecord::Footer(f) => {
                if f.final_ids != state.ids() || f.swaps != swaps || i + 1 != records.len() {
                    return mismatch(i, "footer");
                }
                return Ok(ReplaySummary {
                    swaps,
                    snapshots,
                    final_state: state,
                });
            }
        }
    }
    Err(ReplayError::NoFooter)
}
