//! Deterministic execution of one run.
//!
//! Cell-view runs proceed in rounds. Each round visits every position once,
//! in an order drawn from the seeded scheduler RNG, and activates whichever
//! active cell sits there at that moment. Swaps take effect immediately, so
//! later activations in the same round see them. A run ends once the array
//! is sorted in the cells' shared direction, after `quiescence_window`
//! rounds in which no cell changed anything (no swap and no selection
//! pointer update), or at the activation cap.
//!
//! Traditional runs hand the array to one [`Controller`] and step it to
//! completion; a "round" there is one pass or one boundary position.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algorithms::{
    advance_pointer, bubble_cv_step, insertion_cv_step, selection_cv_step, Controller, Progress,
    Reader, Sensor, Workbench,
};
use crate::metrics;
use crate::model::{is_fully_sorted, Algorithm, CellArrayState, CellId, Control, Direction, SwapOutcome};
use crate::probe::{
    reference_direction, Actor, Event, EventKind, Footer, Header, Probe, Snapshot, SnapshotTrigger,
    TraceRecord,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ActivationOrder {
    #[default]
    ShuffledPerRound,
    FixedIndexOrder,
}

impl ActivationOrder {
    pub fn name(self) -> &'static str {
        match self {
            ActivationOrder::ShuffledPerRound => "shuffled",
            ActivationOrder::FixedIndexOrder => "fixed",
        }
    }
}

impl FromStr for ActivationOrder {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "shuffled" => Ok(ActivationOrder::ShuffledPerRound),
            "fixed" => Ok(ActivationOrder::FixedIndexOrder),
            _ => Err(()),
        }
    }
}

/// How cells pay for looking at their neighbourhood.
///
/// Values never change, so a relation between two particular cells, once
/// read, stays true.
///
/// * `Remembered`: a cell keeps every relation it has read and only pays for
///   pairs of cells it has never compared.
/// * `Changes`: a cell remembers what it last saw at each pair of positions
///   and pays again only when different cells occupy them.
/// * `Recheck`: every inspection is paid on every activation.
///
/// The choice changes comparison counts only; swaps and final arrays are
/// identical. Traditional controllers always pay for every comparison.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Sensing {
    #[default]
    Remembered,
    Changes,
    Recheck,
}

impl Sensing {
    pub fn name(self) -> &'static str {
        match self {
            Sensing::Remembered => "remembered",
            Sensing::Recheck => "recheck",
            Sensing::Changes => "changes",
        }
    }
}

impl FromStr for Sensing {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "remembered" => Ok(Sensing::Remembered),
            "recheck" => Ok(Sensing::Recheck),
            "changes" => Ok(Sensing::Changes),
            _ => Err(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SchedulerConfig {
    pub seed: u64,
    pub quiescence_window: u32,
    /// `None` selects [`default_activation_cap`].
    pub max_activations: Option<u64>,
    pub activation_order: ActivationOrder,
    pub sensing: Sensing,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self::new(0)
    }
}

impl SchedulerConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            quiescence_window: 3,
            max_activations: None,
            activation_order: ActivationOrder::ShuffledPerRound,
            sensing: Sensing::Remembered,
        }
    }

    pub fn activation_cap(&self, n: usize) -> u64 {
        self.max_activations.unwrap_or_else(|| default_activation_cap(n))
    }
}

/// `N^2 * max(N, 10)`: room for about `N^2` full rounds, which covers the
/// slowest same-direction policy (insertion) with a wide margin.
pub fn default_activation_cap(n: usize) -> u64 {
    let n = n as u64;
    n * n * n.max(10)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TerminatedBy {
    Quiescent,
    FullySorted,
    ActivationCap,
}

impl TerminatedBy {
    pub fn name(self) -> &'static str {
        match self {
            TerminatedBy::Quiescent => "quiescent",
            TerminatedBy::FullySorted => "fully-sorted",
            TerminatedBy::ActivationCap => "activation-cap",
        }
    }
}

impl fmt::Display for TerminatedBy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TerminatedBy {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "quiescent" => Ok(TerminatedBy::Quiescent),
            "fully-sorted" => Ok(TerminatedBy::FullySorted),
            "activation-cap" => Ok(TerminatedBy::ActivationCap),
            _ => Err(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub final_state: CellArrayState,
    pub total_swaps: u64,
    pub total_comparisons: u64,
    pub total_denied: u64,
    pub rounds: u64,
    pub activations: u64,
    pub terminated_by: TerminatedBy,
}

/// A swap or refused swap produced by one activation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepAction {
    pub kind: EventKind,
    pub actor: Actor,
    pub index_a: usize,
    pub index_b: usize,
    pub round: u64,
}

/// What happened during one cell-view round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundResult {
    pub swaps: u64,
    /// Selection cells whose target pointer changed.
    pub pointer_moves: u64,
    /// The activation cap cut the round short.
    pub capped: bool,
}

impl RoundResult {
    pub fn is_idle(&self) -> bool {
        self.swaps == 0 && self.pointer_moves == 0
    }
}

/// Above this size the per-cell memory switches from a bit matrix to a set.
const DENSE_MEMORY_LIMIT: usize = 256;

/// What each cell already knows.
#[derive(Clone, Debug)]
enum Memory {
    Off,
    /// Bit per (reader, cell, cell), for small arrays.
    Dense { n: usize, bits: Vec<u64> },
    Sparse(BTreeSet<(CellId, CellId, CellId)>),
    /// Last pair of cells seen at each (reader, position, position).
    Slots(BTreeMap<(CellId, usize, usize), (CellId, CellId)>),
}

impl Memory {
    fn new(sensing: Sensing, n: usize) -> Self {
        match sensing {
            Sensing::Recheck => Memory::Off,
            Sensing::Changes => Memory::Slots(BTreeMap::new()),
            Sensing::Remembered if n <= DENSE_MEMORY_LIMIT => Memory::Dense {
                n,
                bits: vec![0; (n * n * n).div_ceil(64)],
            },
            Sensing::Remembered => Memory::Sparse(BTreeSet::new()),
        }
    }

    /// Note that `reader` looked at positions `a`, `b` holding cells
    /// `ia`, `ib`. True when this costs a comparison.
    fn observe(&mut self, reader: CellId, a: usize, b: usize, ia: CellId, ib: CellId) -> bool {
        let (lo, hi) = if ia < ib { (ia, ib) } else { (ib, ia) };
        match self {
            Memory::Off => true,
            Memory::Dense { n, bits } => {
                let i = (reader as usize * *n + lo as usize) * *n + hi as usize;
                let mask = 1u64 << (i % 64);
                let fresh = bits[i / 64] & mask == 0;
                bits[i / 64] |= mask;
                fresh
            }
            Memory::Sparse(set) => set.insert((reader, lo, hi)),
            Memory::Slots(map) => map.insert((reader, a, b), (ia, ib)) != Some((ia, ib)),
        }
    }
}

/// One run in progress. Emits to the probe as it goes; the first probe error
/// stops the run.
pub struct Engine<P: Probe> {
    state: CellArrayState,
    control: Control,
    reference: Direction,
    config: SchedulerConfig,
    cap: u64,
    rng: ChaCha8Rng,
    probe: P,
    memory: Memory,
    digest: String,
    header_seed: u64,
    started: bool,
    error: Option<P::Error>,
    swaps: u64,
    comparisons: u64,
    denied: u64,
    activations: u64,
    pointer_moves: u64,
    events: u64,
    rounds: u64,
}

impl<P: Probe> Engine<P> {
    pub fn new(state: CellArrayState, control: Control, config: SchedulerConfig, probe: P) -> Self {
        let n = state.len();
        Self {
            reference: reference_direction(&state, control),
            cap: config.activation_cap(n),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            memory: Memory::new(config.sensing, n),
            state,
            control,
            config,
            probe,
            digest: String::new(),
            header_seed: config.seed,
            started: false,
            error: None,
            swaps: 0,
            comparisons: 0,
            denied: 0,
            activations: 0,
            pointer_moves: 0,
            events: 0,
            rounds: 0,
        }
    }

    /// Config digest to put in the trace header.
    pub fn with_digest(mut self, digest: impl Into<String>) -> Self {
        self.digest = digest.into();
        self
    }

    /// Seed to put in the trace header instead of the scheduler seed, for
    /// callers that derive the scheduler seed from a run seed.
    pub fn with_header_seed(mut self, seed: u64) -> Self {
        self.header_seed = seed;
        self
    }

    pub fn state(&self) -> &CellArrayState {
        &self.state
    }

    pub fn probe(&self) -> &P {
        &self.probe
    }

    pub fn into_probe(self) -> P {
        self.probe
    }

    fn emit(&mut self, record: TraceRecord) {
        if self.error.is_some() {
            return;
        }
        if let TraceRecord::Event(_) = record {
            self.events += 1;
        }
        if let Err(e) = self.probe.record(&record) {
            self.error = Some(e);
        }
    }

    fn start(&mut self) {
        if self.started {
            return;
        }
        self.started = true;
        let header = Header::for_state(&self.state, self.control, self.header_seed, self.digest.clone());
        self.emit(TraceRecord::Header(header));
        self.snapshot(SnapshotTrigger::Initial);
    }

    fn snapshot(&mut self, trigger: SnapshotTrigger) {
        let s = Snapshot {
            round: self.rounds,
            event_index: self.events,
            trigger,
            sortedness: metrics::sortedness(&self.state, self.reference, true),
            monotonicity_error: metrics::monotonicity_error(&self.state, self.reference),
            aggregation_value: metrics::aggregation_value(&self.state).ok(),
        };
        self.emit(TraceRecord::Snapshot(s));
    }

    fn event(&mut self, kind: EventKind, actor: Actor, a: usize, b: usize) {
        let (ca, cb) = (self.state.cells[a], self.state.cells[b]);
        self.emit(TraceRecord::Event(Event {
            round: self.rounds,
            kind,
            actor,
            index_a: a,
            index_b: b,
            value_a: ca.value,
            value_b: cb.value,
            algotype_a: ca.algotype,
            algotype_b: cb.algotype,
        }));
    }

    fn try_swap(&mut self, actor: Actor, initiator: usize, partner: usize) -> StepAction {
        let outcome = self.state.swap_gate(initiator, partner);
        let kind = match outcome {
            SwapOutcome::Applied => EventKind::Swap,
            SwapOutcome::Denied(r) => EventKind::SwapDenied(r),
        };
        self.event(kind, actor, initiator, partner);
        match outcome {
            SwapOutcome::Applied => {
                self.state.cells.swap(initiator, partner);
                self.swaps += 1;
                self.snapshot(SnapshotTrigger::Swap);
            }
            SwapOutcome::Denied(_) => self.denied += 1,
        }
        StepAction {
            kind,
            actor,
            index_a: initiator,
            index_b: partner,
            round: self.rounds,
        }
    }

    /// Let the cell at `pos` act once. Frozen cells do nothing.
    pub fn activate_cell(&mut self, pos: usize) -> Option<StepAction> {
        self.start();
        let cell = self.state.cells[pos];
        if cell.frozen.is_frozen() {
            return None;
        }
        self.activations += 1;
        let dir = cell.direction;
        let ptr_before = self.state.selection_pointer[cell.id as usize];
        let proposal = match cell.algotype {
            Algorithm::Bubble => bubble_cv_step(self, pos, dir),
            Algorithm::Insertion => insertion_cv_step(self, pos, dir),
            Algorithm::Selection => {
                let mut ptr = self.state.selection_pointer[cell.id as usize];
                let p = selection_cv_step(self, pos, dir, &mut ptr);
                self.state.selection_pointer[cell.id as usize] = ptr;
                p
            }
        };
        let action = proposal.map(|partner| self.try_swap(Actor::Cell(cell.id), pos, partner));
        if let Some(a) = action {
            if cell.algotype == Algorithm::Selection && a.kind != EventKind::Swap {
                advance_pointer(&mut self.state.selection_pointer[cell.id as usize], pos);
            }
        }
        if self.state.selection_pointer[cell.id as usize] != ptr_before {
            self.pointer_moves += 1;
        }
        action
    }

    /// Run one cell-view round.
    pub fn step_round(&mut self) -> RoundResult {
        self.start();
        self.rounds += 1;
        self.state.round = self.rounds;
        let (swaps, moves) = (self.swaps, self.pointer_moves);
        let mut order: Vec<usize> = (0..self.state.len()).collect();
        if self.config.activation_order == ActivationOrder::ShuffledPerRound {
            order.shuffle(&mut self.rng);
        }
        let mut capped = false;
        for pos in order {
            if self.error.is_some() {
                break;
            }
            if self.activations >= self.cap {
                capped = true;
                break;
            }
            self.activate_cell(pos);
        }
        self.snapshot(SnapshotTrigger::RoundEnd);
        RoundResult {
            swaps: self.swaps - swaps,
            pointer_moves: self.pointer_moves - moves,
            capped,
        }
    }

    fn sorted_in_common_direction(&self) -> bool {
        self.state
            .common_direction()
            .is_some_and(|d| is_fully_sorted(&self.state, d, false))
    }

    fn run_cell_view(&mut self) -> TerminatedBy {
        let mut quiet = 0;
        loop {
            if self.activations >= self.cap {
                return TerminatedBy::ActivationCap;
            }
            let round = self.step_round();
            if self.error.is_some() {
                return TerminatedBy::ActivationCap;
            }
            if self.sorted_in_common_direction() {
                return TerminatedBy::FullySorted;
            }
            if round.capped {
                return TerminatedBy::ActivationCap;
            }
            quiet = if round.is_idle() { quiet + 1 } else { 0 };
            if quiet >= self.config.quiescence_window {
                return TerminatedBy::Quiescent;
            }
        }
    }

    fn run_traditional(&mut self, algorithm: Algorithm, direction: Direction) -> TerminatedBy {
        self.start();
        let mut controller = Controller::new(algorithm, direction, self.state.len());
        if !controller.is_done() {
            self.rounds = 1;
            self.state.round = 1;
        }
        while !controller.is_done() {
            if self.activations >= self.cap {
                self.snapshot(SnapshotTrigger::RoundEnd);
                return TerminatedBy::ActivationCap;
            }
            self.activations += 1;
            let progress = controller.step(self);
            if self.error.is_some() {
                return TerminatedBy::ActivationCap;
            }
            match progress {
                Progress::Working => {}
                Progress::PassComplete => {
                    self.snapshot(SnapshotTrigger::RoundEnd);
                    self.rounds += 1;
                    self.state.round = self.rounds;
                }
                Progress::Finished => self.snapshot(SnapshotTrigger::RoundEnd),
            }
        }
        if is_fully_sorted(&self.state, direction, false) {
            TerminatedBy::FullySorted
        } else {
            TerminatedBy::Quiescent
        }
    }

    /// Run to termination and write the footer.
    pub fn run(mut self) -> Result<(RunOutcome, P), P::Error> {
        self.start();
        let terminated_by = match self.control {
            Control::CellView => self.run_cell_view(),
            Control::Traditional { algorithm, direction } => self.run_traditional(algorithm, direction),
        };
        let footer = Footer {
            swaps: self.swaps,
            comparisons: self.comparisons,
            denied: self.denied,
            rounds: self.rounds,
            activations: self.activations,
            terminated_by,
            final_ids: self.state.ids(),
        };
        self.emit(TraceRecord::Footer(footer));
        if let Some(e) = self.error {
            return Err(e);
        }
        let outcome = RunOutcome {
            final_state: self.state,
            total_swaps: self.swaps,
            total_comparisons: self.comparisons,
            total_denied: self.denied,
            rounds: self.rounds,
            activations: self.activations,
            terminated_by,
        };
        Ok((outcome, self.probe))
    }
}

impl<P: Probe> Sensor for Engine<P> {
    fn len(&self) -> usize {
        self.state.len()
    }

    fn read(&mut self, reader: Reader, a: usize, b: usize) -> (i64, i64) {
        let (ca, cb) = (self.state.cells[a], self.state.cells[b]);
        let actor = match reader {
            Reader::Cell(pos) => {
                let id = self.state.cells[pos].id;
                if !self.memory.observe(id, a, b, ca.id, cb.id) {
                    return (ca.value, cb.value);
                }
                Actor::Cell(id)
            }
            Reader::Controller => Actor::Controller,
        };
        self.comparisons += 1;
        self.event(EventKind::Compare, actor, a, b);
        (ca.value, cb.value)
    }
}

impl<P: Probe> Workbench for Engine<P> {
    fn swap(&mut self, carried: usize, other: usize) -> SwapOutcome {
        match self.try_swap(Actor::Controller, carried, other).kind {
            EventKind::Swap => SwapOutcome::Applied,
            EventKind::SwapDenied(r) => SwapOutcome::Denied(r),
            EventKind::Compare => unreachable!("swap attempts never yield compare events"),
        }
    }
}

/// Run `state` under `control` to termination.
pub fn run<P: Probe>(
    state: CellArrayState,
    control: Control,
    config: &SchedulerConfig,
    probe: P,
) -> Result<RunOutcome, P::Error> {
    Engine::new(state, control, *config, probe).run().map(|(o, _)| o)
}
