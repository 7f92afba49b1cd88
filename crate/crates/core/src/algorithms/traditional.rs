//! Textbook top-down sorts as resumable state machines. One call to
//! [`Controller::step`] performs one comparison and any swap it triggers.
//!
//! Swaps are attempted with the element being moved as the initiator. When
//! the array refuses a swap (frozen cells), the controller drops that element
//! and carries on with the next step of its script.

use super::{Reader, Workbench};
use crate::model::{Algorithm, Direction, SwapOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControllerState {
    /// Pass over `0..end`, comparing `index` with `index + 1`.
    Bubble { end: usize, index: usize, swapped: bool },
    /// Inserting the element that started at `boundary`, now at `cursor`.
    Insertion { boundary: usize, cursor: usize },
    /// Searching `boundary..` for the extreme value; `best` so far, next
    /// candidate at `scan`.
    Selection { boundary: usize, best: usize, scan: usize },
    Done,
}

/// Result of one controller step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Progress {
    Working,
    /// An outer iteration (pass or boundary) just finished.
    PassComplete,
    Finished,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Controller {
    pub algorithm: Algorithm,
    pub direction: Direction,
    pub state: ControllerState,
    n: usize,
}

impl Controller {
    pub fn new(algorithm: Algorithm, direction: Direction, n: usize) -> Self {
        let state = if n < 2 {
            ControllerState::Done
        } else {
            match algorithm {
                Algorithm::Bubble => ControllerState::Bubble {
                    end: n - 1,
                    index: 0,
                    swapped: false,
                },
                Algorithm::Insertion => ControllerState::Insertion {
                    boundary: 1,
                    cursor: 1,
                },
                Algorithm::Selection => ControllerState::Selection {
                    boundary: 0,
                    best: 0,
                    scan: 1,
                },
            }
        };
        Self {
            algorithm,
            direction,
            state,
            n,
        }
    }

    pub fn is_done(&self) -> bool {
        self.state == ControllerState::Done
    }

    /// Size of the finished region: completed passes for bubble, the current
    /// boundary for insertion and selection. Never decreases.
    pub fn boundary(&self) -> usize {
        match self.state {
            ControllerState::Bubble { end, .. } => self.n - 1 - end,
            ControllerState::Insertion { boundary, .. } => boundary,
            ControllerState::Selection { boundary, .. } => boundary,
            ControllerState::Done => self.n,
        }
    }

    pub fn step<W: Workbench + ?Sized>(&mut self, w: &mut W) -> Progress {
        let dir = self.direction;
        let n = self.n;
        match self.state {
            ControllerState::Done => Progress::Finished,
            ControllerState::Bubble {
                end,
                index,
                mut swapped,
            } => {
                let (a, b) = w.read(Reader::Controller, index, index + 1);
                if dir.inverted(a, b) && w.swap(index, index + 1) == SwapOutcome::Applied {
                    swapped = true;
                }
                let index = index + 1;
                if index < end {
                    self.state = ControllerState::Bubble { end, index, swapped };
                    Progress::Working
                } else if !swapped || end == 1 {
                    self.state = ControllerState::Done;
                    Progress::Finished
                } else {
                    self.state = ControllerState::Bubble {
                        end: end - 1,
                        index: 0,
                        swapped: false,
                    };
                    Progress::PassComplete
                }
            }
            ControllerState::Insertion { boundary, cursor } => {
                let (a, b) = w.read(Reader::Controller, cursor - 1, cursor);
                let moved = dir.inverted(a, b) && w.swap(cursor, cursor - 1) == SwapOutcome::Applied;
                if moved && cursor > 1 {
                    self.state = ControllerState::Insertion {
                        boundary,
                        cursor: cursor - 1,
                    };
                    return Progress::Working;
                }
                let boundary = boundary + 1;
                if boundary == n {
                    self.state = ControllerState::Done;
                    Progress::Finished
                } else {
                    self.state = ControllerState::Insertion {
                        boundary,
                        cursor: boundary,
                    };
                    Progress::PassComplete
                }
            }
            ControllerState::Selection {
                boundary,
                mut best,
                scan,
            } => {
                let (a, b) = w.read(Reader::Controller, best, scan);
                if dir.inverted(a, b) {
                    best = scan;
                }
                let scan = scan + 1;
                if scan < n {
                    self.state = ControllerState::Selection { boundary, best, scan };
                    return Progress::Working;
                }
                if best != boundary {
                    w.swap(best, boundary);
                }
                let boundary = boundary + 1;
                if boundary == n - 1 {
                    self.state = ControllerState::Done;
                    Progress::Finished
                } else {
                    self.state = ControllerState::Selection {
                        boundary,
                        best: boundary,
                        scan: boundary + 1,
                    };
                    Progress::PassComplete
                }
            }
        }
    }

    /// Step until finished. Returns the number of steps taken.
    pub fn run_to_end<W: Workbench + ?Sized>(&mut self, w: &mut W) -> u64 {
        let mut steps = 0;
        while !self.is_done() {
            self.step(w);
            steps += 1;
        }
        steps
    }
}
