//! The six sorting policies.
//!
//! Cell-view rules look at the array from one cell's position and propose at
//! most one swap per activation. Traditional controllers walk the whole array
//! one comparison at a time. Both read values only through a [`Sensor`], so
//! the engine sees (and counts) every inspection.

pub mod cell_view;
pub mod traditional;

pub use cell_view::{advance_pointer, bubble_cv_step, insertion_cv_step, selection_cv_step};
pub use traditional::{Controller, ControllerState, Progress};

use crate::model::SwapOutcome;

/// Who is looking at the array.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reader {
    /// The cell currently at this position.
    Cell(usize),
    Controller,
}

/// Counted access to the values of the live array.
pub trait Sensor {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Values at positions `a` and `b`, read on behalf of `reader`.
    fn read(&mut self, reader: Reader, a: usize, b: usize) -> (i64, i64);
}

/// What a traditional controller needs on top of reading: the ability to
/// exchange two positions. `carried` is the element the controller is moving.
pub trait Workbench: Sensor {
    fn swap(&mut self, carried: usize, other: usize) -> SwapOutcome;
}
