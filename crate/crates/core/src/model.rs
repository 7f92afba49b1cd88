//! Cells, arrays and the policies that move them.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::ConfigError;

/// Stable identity of a cell. Assigned `0..N` in initial order and carried
/// along by every swap.
pub type CellId = u32;

/// One of the three sorting procedures. As a cell attribute this is the
/// cell's algotype; as a [`PolicySpec`] field it names a controller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Bubble,
    Insertion,
    Selection,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Bubble, Algorithm::Insertion, Algorithm::Selection];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Bubble => "bubble",
            Algorithm::Insertion => "insertion",
            Algorithm::Selection => "selection",
        }
    }

    /// Default aggregation label for a cell of this algotype.
    pub fn default_group(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "bubble" => Ok(Algorithm::Bubble),
            "insertion" => Ok(Algorithm::Insertion),
            "selection" => Ok(Algorithm::Selection),
            _ => Err(()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    #[default]
    Increasing,
    Decreasing,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Increasing => "increasing",
            Direction::Decreasing => "decreasing",
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
        }
    }

    /// True when `earlier` placed before `later` strictly violates this order.
    #[inline]
    pub fn inverted(self, earlier: i64, later: i64) -> bool {
        match self {
            Direction::Increasing => earlier > later,
            Direction::Decreasing => earlier < later,
        }
    }

    /// True when `earlier` placed before `later` strictly follows this order.
    #[inline]
    pub fn strictly_ordered(self, earlier: i64, later: i64) -> bool {
        match self {
            Direction::Increasing => earlier < later,
            Direction::Decreasing => earlier > later,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Direction {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "increasing" | "inc" => Ok(Direction::Increasing),
            "decreasing" | "dec" => Ok(Direction::Decreasing),
            _ => Err(()),
        }
    }
}

/// Fault state of a cell.
///
/// A movable frozen cell never initiates a swap but may be moved by others.
/// An immovable one takes part in no swap at all.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FrozenKind {
    #[default]
    Active,
    FrozenMovable,
    FrozenImmovable,
}

impl FrozenKind {
    pub fn name(self) -> &'static str {
        match self {
            FrozenKind::Active => "active",
            FrozenKind::FrozenMovable => "movable",
            FrozenKind::FrozenImmovable => "immovable",
        }
    }

    pub fn is_frozen(self) -> bool {
        self != FrozenKind::Active
    }
}

impl fmt::Display for FrozenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FrozenKind {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "active" => Ok(FrozenKind::Active),
            "movable" => Ok(FrozenKind::FrozenMovable),
            "immovable" => Ok(FrozenKind::FrozenImmovable),
            _ => Err(()),
        }
    }
}

/// An array element. All fields are fixed for the lifetime of a run; only
/// the cell's position changes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub id: CellId,
    pub value: i64,
    pub algotype: Algorithm,
    pub direction: Direction,
    pub frozen: FrozenKind,
    /// Label used by the aggregation metric. Defaults to the algotype; a
    /// pseudo-chimera gives identical algorithms distinct labels.
    pub group: u8,
}

/// The live array plus per-cell selection pointers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellArrayState {
    pub cells: Vec<Cell>,
    /// Ideal target position of each cell, indexed by [`CellId`]. Only read
    /// for selection cells.
    pub selection_pointer: Vec<usize>,
    pub round: u64,
}

/// Build a fresh array. Cell ids are assigned `0..N` in the given order.
pub fn make_array(
    values: &[i64],
    algotypes: &[Algorithm],
    directions: &[Direction],
    frozen: &[(usize, FrozenKind)],
) -> Result<CellArrayState, ConfigError> {
    let n = values.len();
    if n == 0 {
        return Err(ConfigError::new("n", "array must contain at least one cell"));
    }
    if u32::try_from(n).is_err() {
        return Err(ConfigError::new("n", "array too large"));
    }
    if algotypes.len() != n {
        return Err(ConfigError::new("policy", "one algotype per cell required"));
    }
    if directions.len() != n {
        return Err(ConfigError::new("policy.direction", "one direction per cell required"));
    }
    let mut cells: Vec<Cell> = values
        .iter()
        .zip(algotypes)
        .zip(directions)
        .enumerate()
        .map(|(i, ((&value, &algotype), &direction))| Cell {
            id: i as CellId,
            value,
            algotype,
            direction,
            frozen: FrozenKind::Active,
            group: algotype.default_group(),
        })
        .collect();
    for &(index, kind) in frozen {
        let Some(cell) = cells.get_mut(index) else {
            return Err(ConfigError::new(
                "frozen.placement",
                alloc::format!("frozen index {index} out of range for {n} cells"),
            ));
        };
        if cell.frozen.is_frozen() {
            return Err(ConfigError::new(
                "frozen.placement",
                alloc::format!("frozen index {index} listed twice"),
            ));
        }
        cell.frozen = kind;
    }
    let selection_pointer = cells
        .iter()
        .map(|c| match c.direction {
            Direction::Increasing => 0,
            Direction::Decreasing => n - 1,
        })
        .collect();
    Ok(CellArrayState {
        cells,
        selection_pointer,
        round: 0,
    })
}

/// Why a swap was refused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DenyReason {
    /// The cell that would have to start the move is frozen.
    InitiatorFrozen,
    /// The passive partner is frozen immovable.
    FrozenImmovable,
}

impl DenyReason {
    pub fn name(self) -> &'static str {
        match self {
            DenyReason::InitiatorFrozen => "initiator-frozen",
            DenyReason::FrozenImmovable => "immovable",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SwapOutcome {
    Applied,
    Denied(DenyReason),
}

impl CellArrayState {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn values(&self) -> Vec<i64> {
        self.cells.iter().map(|c| c.value).collect()
    }

    pub fn ids(&self) -> Vec<CellId> {
        self.cells.iter().map(|c| c.id).collect()
    }

    /// Replace the aggregation labels, one per position.
    pub fn with_groups(mut self, groups: &[u8]) -> Result<Self, ConfigError> {
        if groups.len() != self.cells.len() {
            return Err(ConfigError::new("policy", "one label per cell required"));
        }
        for (cell, &g) in self.cells.iter_mut().zip(groups) {
            cell.group = g;
        }
        Ok(self)
    }

    /// The single direction shared by every cell, if there is one.
    pub fn common_direction(&self) -> Option<Direction> {
        let first = self.cells.first()?.direction;
        self.cells
            .iter()
            .all(|c| c.direction == first)
            .then_some(first)
    }

    /// Exchange the cells at `initiator` and `partner` unless fault gating
    /// forbids it. The initiator is the cell that starts the move (for the
    /// top-down controllers: the element being carried).
    pub fn attempt_swap(&mut self, initiator: usize, partner: usize) -> SwapOutcome {
        let outcome = self.swap_gate(initiator, partner);
        if outcome == SwapOutcome::Applied {
            self.cells.swap(initiator, partner);
        }
        outcome
    }

    /// What [`attempt_swap`](Self::attempt_swap) would do, without doing it.
    pub fn swap_gate(&self, initiator: usize, partner: usize) -> SwapOutcome {
        assert!(initiator != partner, "swap needs two distinct positions");
        if self.cells[initiator].frozen.is_frozen() {
            return SwapOutcome::Denied(DenyReason::InitiatorFrozen);
        }
        if self.cells[partner].frozen == FrozenKind::FrozenImmovable {
            return SwapOutcome::Denied(DenyReason::FrozenImmovable);
        }
        SwapOutcome::Applied
    }
}

/// True iff every adjacent pair follows `direction`. Non-strict accepts
/// equal neighbours.
pub fn is_fully_sorted(state: &CellArrayState, direction: Direction, strict: bool) -> bool {
    state.cells.windows(2).all(|w| {
        let (a, b) = (w[0].value, w[1].value);
        if strict {
            direction.strictly_ordered(a, b)
        } else {
            !direction.inverted(a, b)
        }
    })
}

/// Top-down or bottom-up control of a whole array.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    #[default]
    CellView,
    Traditional,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::CellView => "cell-view",
            Mode::Traditional => "traditional",
        }
    }
}

impl FromStr for Mode {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "cell-view" | "cellview" => Ok(Mode::CellView),
            "traditional" => Ok(Mode::Traditional),
            _ => Err(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PolicySpec {
    pub mode: Mode,
    pub algorithm: Algorithm,
    pub direction: Direction,
}

impl PolicySpec {
    pub fn cell_view(algorithm: Algorithm) -> Self {
        Self {
            mode: Mode::CellView,
            algorithm,
            direction: Direction::Increasing,
        }
    }

    pub fn traditional(algorithm: Algorithm) -> Self {
        Self {
            mode: Mode::Traditional,
            algorithm,
            direction: Direction::Increasing,
        }
    }

    pub fn control(&self) -> Control {
        match self.mode {
            Mode::CellView => Control::CellView,
            Mode::Traditional => Control::Traditional {
                algorithm: self.algorithm,
                direction: self.direction,
            },
        }
    }
}

/// What drives a run: each cell's own algotype, or one controller.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Control {
    CellView,
    Traditional {
        algorithm: Algorithm,
        direction: Direction,
    },
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn bubble(values: &[i64]) -> CellArrayState {
        let n = values.len();
        make_array(
            values,
            &vec![Algorithm::Bubble; n],
            &vec![Direction::Increasing; n],
            &[],
        )
        .unwrap()
    }

    #[test]
    fn constructor_assigns_ids_in_order() {
        let s = bubble(&[3, 1, 2]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.round, 0);
        assert_eq!(s.ids(), vec![0, 1, 2]);
        assert_eq!(s.selection_pointer, vec![0, 0, 0]);
    }

    #[test]
    fn singleton_is_sorted() {
        let s = bubble(&[1]);
        assert!(is_fully_sorted(&s, Direction::Increasing, true));
    }

    #[test]
    fn duplicates_are_legal() {
        let values: Vec<i64> = (0..100).map(|i| i % 10 + 1).collect();
        assert!(make_array(&values, &[Algorithm::Bubble; 100], &[Direction::Increasing; 100], &[]).is_ok());
    }

    #[test]
    fn empty_and_out_of_range_are_rejected() {
        let err = make_array(&[], &[], &[], &[]).unwrap_err();
        assert_eq!(err.key, "n");
        let err = make_array(
            &[1, 2],
            &[Algorithm::Bubble; 2],
            &[Direction::Increasing; 2],
            &[(2, FrozenKind::FrozenMovable)],
        )
        .unwrap_err();
        assert_eq!(err.key, "frozen.placement");
    }

    #[test]
    fn sortedness_flags() {
        assert!(is_fully_sorted(&bubble(&[1, 2, 3]), Direction::Increasing, true));
        let dup = bubble(&[1, 2, 2, 3]);
        assert!(!is_fully_sorted(&dup, Direction::Increasing, true));
        assert!(is_fully_sorted(&dup, Direction::Increasing, false));
        assert!(is_fully_sorted(&bubble(&[3, 2, 1]), Direction::Decreasing, true));
    }

    #[test]
    fn swap_gating() {
        let mut s = make_array(
            &[1, 2, 3],
            &[Algorithm::Bubble; 3],
            &[Direction::Increasing; 3],
            &[(1, FrozenKind::FrozenMovable), (2, FrozenKind::FrozenImmovable)],
        )
        .unwrap();
        assert_eq!(s.attempt_swap(0, 1), SwapOutcome::Applied);
        assert_eq!(s.ids(), vec![1, 0, 2]);
        assert_eq!(
            s.attempt_swap(1, 2),
            SwapOutcome::Denied(DenyReason::FrozenImmovable)
        );
        assert_eq!(
            s.attempt_swap(0, 1),
            SwapOutcome::Denied(DenyReason::InitiatorFrozen)
        );
        assert_eq!(s.ids(), vec![1, 0, 2]);
    }
}
