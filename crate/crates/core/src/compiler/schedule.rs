//! The read schedule: which track of `u` each slot of an object reads.
//!
//! Entering an object with shift `z` pins every later read position: reads are
//! spaced `beta` apart, each `u`-slot is entered with the running shift and
//! reads `3x + 1` symbols (or `3x` when entered with shift `>= beta - 3x`),
//! and `b`-runs absorb single reads at the edges. Walking the skeleton with
//! pure position arithmetic yields the track and read count of every slot;
//! the table rows of the construction are instances of this walk.

use super::params::Params;
use super::template::{skeleton, ObjKind, Seg};
use super::CompileError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotRead {
    /// Slot index: position of the `u` within the object, leftmost = 0.
    pub slot: usize,
    /// Shift with which the `u` is entered, i.e. the track read.
    pub track: usize,
    /// `3x + 1`, or `3x` for tracks in `[beta - 3x, beta)`.
    pub reads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReadAtom {
    /// A single `b` read inside one of the object's `b`-runs.
    BRead,
    Slot(SlotRead),
}

#[derive(Debug, Clone)]
pub struct ObjectWalk {
    pub atoms: Vec<ReadAtom>,
    pub total_reads: usize,
    /// The unique slot reading `3x` symbols, when one exists.
    pub short_slot: Option<usize>,
    /// Floor-read case (`z >= beta - shift_change`).
    pub low_case: bool,
    pub exit_shift: usize,
}

/// Walks one round over the object entered with shift `z`.
pub fn walk_object(kind: ObjKind, params: &Params, z: usize) -> Result<ObjectWalk, CompileError> {
    let beta = params.beta;
    let x = params.x;
    let u_len = params.u_len();
    assert!(z < beta, "entry shift must be < beta");

    let mut atoms = Vec::new();
    let mut short_slot = None;
    let mut pos = z;
    let mut offset = 0usize;
    let mut slot = 0usize;
    let bug = |msg: String| CompileError::WalkInvariant { kind, z, msg };

    for seg in skeleton(kind, x) {
        match seg {
            Seg::B(n) => {
                let end = offset + n;
                let mut hits = 0;
                while pos >= offset && pos < end {
                    atoms.push(ReadAtom::BRead);
                    pos += beta;
                    hits += 1;
                }
                if hits > 1 {
                    return Err(bug(format!("{hits} reads in one b-run")));
                }
                offset = end;
            }
            Seg::U => {
                let end = offset + u_len;
                if pos < offset || pos >= end {
                    return Err(bug(format!("slot {slot} skipped (pos {pos})")));
                }
                let track = pos - offset;
                if track >= beta {
                    return Err(bug(format!("slot {slot} entered with shift {track}")));
                }
                let reads = if track < beta - 3 * x { 3 * x + 1 } else { 3 * x };
                if reads == 3 * x {
                    if short_slot.is_some() {
                        return Err(bug("two short slots in one walk".into()));
                    }
                    short_slot = Some(slot);
                }
                atoms.push(ReadAtom::Slot(SlotRead { slot, track, reads }));
                pos = offset + track + reads * beta;
                offset = end;
                slot += 1;
            }
        }
    }

    if slot != params.slots(kind) {
        return Err(bug(format!("walked {slot} slots")));
    }
    let len = params.object_len(kind);
    if pos < len || pos >= len + beta {
        return Err(bug(format!("walk ended at {pos}, object length {len}")));
    }
    let exit_shift = pos - len;
    debug_assert_eq!(
        exit_shift,
        (z + params.object_shift_change(kind)) % beta,
        "exit shift disagrees with the shift-change law"
    );

    let total_reads: usize = atoms
        .iter()
        .map(|a| match a {
            ReadAtom::BRead => 1,
            ReadAtom::Slot(s) => s.reads,
        })
        .sum();
    let low_case = params.is_low_case(kind, z);
    let expected = params.object_reads(kind, z);
    if total_reads != expected {
        return Err(bug(format!(
            "walk read {total_reads} symbols, the read-count law predicts {expected}"
        )));
    }
    if low_case != (expected == params.object_len(kind) / beta)
        && params.object_len(kind) % beta != 0
    {
        return Err(bug("case split disagrees with read count".into()));
    }

    Ok(ObjectWalk {
        atoms,
        total_reads,
        short_slot,
        low_case,
        exit_shift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::select_params;

    /// Brute-force positional oracle over the expanded object: walk indices
    /// `z, z + beta, ...` over segment boundaries, recording whether each
    /// lands in a b-run or in which u-slot.
    fn naive_walk(kind: ObjKind, params: &Params, z: usize) -> (usize, Vec<(usize, usize)>) {
        let mut bounds = Vec::new(); // (start, end, slot index or usize::MAX)
        let mut off = 0;
        let mut slot = 0;
        for seg in skeleton(kind, params.x) {
            match seg {
                Seg::B(n) => {
                    bounds.push((off, off + n, usize::MAX));
                    off += n;
                }
                Seg::U => {
                    bounds.push((off, off + params.u_len(), slot));
                    off += params.u_len();
                    slot += 1;
                }
            }
        }
        let mut pos = z;
        let mut breads = 0;
        let mut slots = Vec::new();
        'outer: while pos < off {
            for &(s, e, idx) in &bounds {
                if pos >= s && pos < e {
                    if idx == usize::MAX {
                        breads += 1;
                    } else if slots.last().map(|&(i, _)| i) != Some(idx) {
                        slots.push((idx, pos - s));
                    }
                    pos += params.beta;
                    continue 'outer;
                }
            }
            unreachable!();
        }
        (breads, slots)
    }

    #[test]
    fn walk_matches_naive_oracle_on_shift_set() {
        let params = select_params(2, 0, None).unwrap();
        // Sample the reachable shift set (all multiples of x) plus the
        // interesting boundaries.
        let x = params.x;
        let mut shifts: Vec<usize> = (0..params.beta / x).step_by(97).map(|k| k * x).collect();
        for z in [
            0,
            x,
            params.beta - params.z1,
            params.beta - params.z1 - x,
            params.beta - params.z2,
            params.beta - params.z2 - x,
            params.beta - x,
            params.beta - 2 * x,
        ] {
            shifts.push(z);
        }
        for kind in [ObjKind::Eps, ObjKind::EpsPrime, ObjKind::Zero, ObjKind::One] {
            for &z in &shifts {
                let walk = walk_object(kind, &params, z).unwrap();
                let (naive_b, naive_slots) = naive_walk(kind, &params, z);
                let walk_b = walk
                    .atoms
                    .iter()
                    .filter(|a| matches!(a, ReadAtom::BRead))
                    .count();
                let walk_slots: Vec<(usize, usize)> = walk
                    .atoms
                    .iter()
                    .filter_map(|a| match a {
                        ReadAtom::Slot(s) => Some((s.slot, s.track)),
                        _ => None,
                    })
                    .collect();
                assert_eq!(walk_b, naive_b, "{kind:?} z={z}");
                assert_eq!(walk_slots, naive_slots, "{kind:?} z={z}");
            }
        }
    }

    #[test]
    fn one_high_case_slot_schedule() {
        // <1> entered with shift z < beta - z1 reads track (z + i(3x-2) - 10)
        // in its i-th u for i < x/2 - 7, track (z + 3xi - x + 4) for
        // x/2-7 <= i < x, and track (z + 3x^2 - x + 2) in the last u.
        let params = select_params(2, 0, None).unwrap();
        let (x, beta) = (params.x, params.beta);
        let z = 5 * x; // comfortably below beta - z1
        let walk = walk_object(ObjKind::One, &params, z).unwrap();
        for atom in &walk.atoms {
            if let ReadAtom::Slot(s) = atom {
                let expect = if s.slot < x / 2 - 7 {
                    z + s.slot * (3 * x - 2) - 10
                } else if s.slot < x {
                    z + 3 * x * s.slot - x + 4
                } else {
                    z + 3 * x * x - x + 2
                };
                assert_eq!(s.track, expect % beta, "slot {}", s.slot);
                assert_eq!(s.reads, 3 * x + 1);
            }
        }
        assert_eq!(walk.exit_shift, z + params.z1);
        assert!(!walk.low_case);
        assert_eq!(walk.short_slot, None);
    }

    #[test]
    fn zero_at_shift_zero_reads_leading_b_and_short_first_slot() {
        let params = select_params(2, 0, None).unwrap();
        let walk = walk_object(ObjKind::Zero, &params, 0).unwrap();
        assert!(matches!(walk.atoms[0], ReadAtom::BRead));
        match walk.atoms[1] {
            ReadAtom::Slot(s) => {
                assert_eq!(s.track, params.beta - 4);
                assert_eq!(s.reads, 3 * params.x);
            }
            _ => panic!("expected first slot after the leading b"),
        }
        assert!(!walk.low_case);
        assert_eq!(walk.total_reads, params.object_reads(ObjKind::Zero, 0));
    }

    #[test]
    fn low_case_has_exactly_one_short_slot() {
        let params = select_params(2, 0, None).unwrap();
        let (x, beta, z1, z2) = (params.x, params.beta, params.z1, params.z2);
        for (kind, lo) in [
            (ObjKind::One, beta - z1),
            (ObjKind::Zero, beta - z1),
            (ObjKind::EpsPrime, beta - z2),
        ] {
            let mut z = lo;
            while z < beta {
                let walk = walk_object(kind, &params, z).unwrap();
                assert!(walk.low_case, "{kind:?} z={z}");
                assert!(walk.short_slot.is_some(), "{kind:?} z={z}");
                assert_eq!(walk.exit_shift, (z + params.object_shift_change(kind)) % beta);
                z += x;
            }
        }
    }
}
