//! Per-cell rules. Each function inspects the array from `pos` and returns
//! the position the cell wants to swap with, if any. Nothing is mutated here
//! except the selection pointer; the engine applies (or denies) the swap.
//!
//! Every rule reads the pair `(own position, other)` with the actor's
//! position first. Equal values never trigger a swap.

use super::{Reader, Sensor};
use crate::model::Direction;

/// Left neighbour first, then right.
pub fn bubble_cv_step<S: Sensor + ?Sized>(s: &mut S, pos: usize, dir: Direction) -> Option<usize> {
    let me = Reader::Cell(pos);
    if pos > 0 {
        let (own, left) = s.read(me, pos, pos - 1);
        if dir.inverted(left, own) {
            return Some(pos - 1);
        }
    }
    if pos + 1 < s.len() {
        let (own, right) = s.read(me, pos, pos + 1);
        if dir.inverted(own, right) {
            return Some(pos + 1);
        }
    }
    None
}

/// Move left only once everything to the left is in order. The prefix is
/// scanned from the nearest pair outward and the scan stops at the first
/// violation.
pub fn insertion_cv_step<S: Sensor + ?Sized>(s: &mut S, pos: usize, dir: Direction) -> Option<usize> {
    if pos == 0 {
        return None;
    }
    let me = Reader::Cell(pos);
    for j in (1..pos).rev() {
        let (a, b) = s.read(me, j - 1, j);
        if dir.inverted(a, b) {
            return None;
        }
    }
    let (own, left) = s.read(me, pos, pos - 1);
    dir.inverted(left, own).then_some(pos - 1)
}

/// Try to jump to the ideal position held in `pointer`.
///
/// Increasing cells start with the pointer at the left end and walk it right;
/// decreasing cells start at the right end and walk it left. A cell swaps
/// when it and the occupant are out of order, and otherwise advances the
/// pointer one step toward itself. A pointer that has been overtaken (the
/// cell was moved past it) snaps to the cell's own position. A pointer at the
/// own position means the cell rests.
pub fn selection_cv_step<S: Sensor + ?Sized>(
    s: &mut S,
    pos: usize,
    dir: Direction,
    pointer: &mut usize,
) -> Option<usize> {
    match dir {
        Direction::Increasing if *pointer > pos => *pointer = pos,
        Direction::Decreasing if *pointer < pos => *pointer = pos,
        _ => {}
    }
    let target = *pointer;
    if target == pos {
        return None;
    }
    let (own, occupant) = s.read(Reader::Cell(pos), pos, target);
    let out_of_order = if target < pos {
        dir.inverted(occupant, own)
    } else {
        dir.inverted(own, occupant)
    };
    if out_of_order {
        return Some(target);
    }
    advance_pointer(pointer, pos);
    None
}

/// One step of the pointer toward the cell's own position. Used after a value
/// check fails and after a denied swap.
pub fn advance_pointer(pointer: &mut usize, pos: usize) {
    use core::cmp::Ordering::*;
    match (*pointer).cmp(&pos) {
        Less => *pointer += 1,
        Greater => *pointer -= 1,
        Equal => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::testing::Bench;
    use crate::model::{make_array, Algorithm, FrozenKind};
    use alloc::vec;

    const INC: Direction = Direction::Increasing;
    const DEC: Direction = Direction::Decreasing;

    fn bench(values: &[i64]) -> Bench {
        let n = values.len();
        Bench::new(make_array(values, &vec![Algorithm::Bubble; n], &vec![INC; n], &[]).unwrap())
    }

    #[test]
    fn bubble_examples() {
        let mut b = bench(&[4, 2, 9]);
        assert_eq!(bubble_cv_step(&mut b, 1, INC), Some(0));
        assert_eq!(b.reads.len(), 1);
        let mut b = bench(&[1, 2, 3]);
        for p in 0..3 {
            assert_eq!(bubble_cv_step(&mut b, p, INC), None);
        }
        let mut b = bench(&[5, 3]);
        assert_eq!(bubble_cv_step(&mut b, 0, INC), Some(1));
        let mut b = bench(&[1, 2]);
        assert_eq!(bubble_cv_step(&mut b, 0, DEC), Some(1));
        let mut b = bench(&[2, 2]);
        assert_eq!(bubble_cv_step(&mut b, 1, INC), None);
    }

    #[test]
    fn insertion_examples() {
        let mut b = bench(&[1, 3, 2]);
        assert_eq!(insertion_cv_step(&mut b, 2, INC), Some(1));
        assert_eq!(b.reads.len(), 2);
        let mut b = bench(&[3, 1, 2]);
        assert_eq!(insertion_cv_step(&mut b, 2, INC), None);
        let mut b = bench(&[1, 2]);
        assert_eq!(insertion_cv_step(&mut b, 1, INC), None);
        assert_eq!(insertion_cv_step(&mut b, 0, INC), None);
        let mut b = bench(&[3, 2, 5]);
        assert_eq!(insertion_cv_step(&mut b, 2, DEC), Some(1));
    }

    #[test]
    fn selection_examples() {
        let mut b = bench(&[5, 1]);
        let mut ptr = 0;
        assert_eq!(selection_cv_step(&mut b, 1, INC, &mut ptr), Some(0));
        let mut b = bench(&[1, 5]);
        let mut ptr = 0;
        assert_eq!(selection_cv_step(&mut b, 1, INC, &mut ptr), None);
        assert_eq!(ptr, 1);
        assert_eq!(selection_cv_step(&mut b, 1, INC, &mut ptr), None);
        assert_eq!(b.reads.len(), 1);
    }

    #[test]
    fn selection_decreasing_walks_from_the_right() {
        let mut b = bench(&[1, 5, 3]);
        let mut ptr = 2;
        // 1 at the left should end up at the right end.
        assert_eq!(selection_cv_step(&mut b, 0, DEC, &mut ptr), Some(2));
        let mut ptr = 2;
        assert_eq!(selection_cv_step(&mut b, 1, DEC, &mut ptr), None);
        assert_eq!(ptr, 1);
    }

    #[test]
    fn overtaken_pointer_snaps_to_position() {
        let mut b = bench(&[1, 2, 3]);
        let mut ptr = 2;
        assert_eq!(selection_cv_step(&mut b, 1, INC, &mut ptr), None);
        assert_eq!(ptr, 1);
        assert!(b.reads.is_empty());
    }

    #[test]
    fn denied_swap_lets_pointer_go_around() {
        let state = make_array(
            &[5, 9, 1],
            &[Algorithm::Selection; 3],
            &[INC; 3],
            &[(0, FrozenKind::FrozenImmovable)],
        )
        .unwrap();
        let mut b = Bench::new(state);
        let mut ptr = 0;
        assert_eq!(selection_cv_step(&mut b, 2, INC, &mut ptr), Some(0));
        advance_pointer(&mut ptr, 2);
        assert_eq!(selection_cv_step(&mut b, 2, INC, &mut ptr), Some(1));
    }
}
