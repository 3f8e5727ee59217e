//! Track-by-track synthesis of the word `u`.
//!
//! For every object kind and every reachable entry shift
//! `z = (z1 m + z2 d) mod beta`, the schedule walk yields the track each
//! `u`-slot reads; the target object sequence for that read then pins the
//! track's content. Unassigned tracks default to all-`b`, so an accidental
//! read of one degenerates the dataword instead of corrupting it silently.
//!
//! Special-case rows (length-`3x` tracks, missing-`b` completions) fall out of
//! the same walk instead of being transcribed separately; each assignment is
//! classified back to its table row and checked against the row's stated
//! shift range.

use crate::cyclic::CyclicProgram;

use super::ledger::{Provenance, TrackLedger};
use super::params::Params;
use super::schedule::{walk_object, ObjectWalk, ReadAtom, SlotRead};
use super::template::{read_pattern, ObjKind, PatternForm};
use super::CompileError;
use crate::bits::PackedWord;

/// Decode table for `z = (z1 m + z2 d) mod beta` over the full `m`, `d`
/// ranges. Every pair gives a distinct shift; the reachable set is exactly
/// the multiples of `x`.
#[derive(Debug, Clone)]
pub struct ShiftTable {
    table: Vec<u32>,
    pub shifts: Vec<usize>,
    x: usize,
}

const UNREACHABLE: u32 = u32::MAX;

impl ShiftTable {
    pub fn decode(&self, z: usize) -> Option<(usize, usize)> {
        if z % self.x != 0 {
            return None;
        }
        let packed = *self.table.get(z / self.x)?;
        if packed == UNREACHABLE {
            return None;
        }
        Some(((packed >> 16) as usize, (packed & 0xffff) as usize))
    }
}

pub fn shift_table(params: &Params) -> ShiftTable {
    let (z1, z2, beta, x) = (params.z1, params.z2, params.beta, params.x);
    let mut table = vec![UNREACHABLE; beta / x];
    let mut shifts = Vec::with_capacity((3 * x - 2) * (3 * x + 1));
    for m in 0..3 * x - 2 {
        for d in 0..3 * x + 1 {
            let z = (m * z1 + d * z2) % beta;
            debug_assert_eq!(z % x, 0);
            debug_assert_eq!(table[z / x], UNREACHABLE, "shift collision at z={z}");
            table[z / x] = ((m as u32) << 16) | d as u32;
            shifts.push(z);
        }
    }
    shifts.sort_unstable();
    ShiftTable { table, shifts, x }
}

/// The object sequence appended when `kind` is read entered with shift `z`:
/// the appendant encoding for `<1>`, all-garbage for the rest, with the
/// `<e'>` inserted at the short slot in the floor-read case.
pub fn target_sequence(
    kind: ObjKind,
    x: usize,
    alpha: Option<&[bool]>,
    low_case: bool,
    short_slot: Option<usize>,
) -> Vec<ObjKind> {
    if kind == ObjKind::Eps {
        return vec![ObjKind::Eps];
    }
    let sigma: Vec<ObjKind> = alpha
        .unwrap_or(&[])
        .iter()
        .map(|&b| if b { ObjKind::One } else { ObjKind::Zero })
        .collect();
    let base_len = match (kind, low_case) {
        (ObjKind::One | ObjKind::Zero, false) => x + 1,
        (ObjKind::One | ObjKind::Zero, true) => x,
        (ObjKind::EpsPrime | ObjKind::OnePrime, false) => x,
        (ObjKind::EpsPrime | ObjKind::OnePrime, true) => x - 1,
        (ObjKind::Eps, _) => unreachable!(),
    };
    let sigma = match kind {
        ObjKind::One | ObjKind::OnePrime => sigma,
        _ => Vec::new(),
    };
    assert!(sigma.len() <= base_len, "appendant longer than the encoding");
    let mut seq = sigma;
    seq.extend(std::iter::repeat_n(ObjKind::Eps, base_len - seq.len()));
    if low_case {
        let j = short_slot.expect("floor-read case without a short slot");
        seq.insert(j, ObjKind::EpsPrime);
    }
    seq
}

/// One track assignment produced by a table row.
#[derive(Debug, Clone)]
pub struct RowAssignment {
    pub track: usize,
    pub content: Vec<bool>,
    pub prov: Provenance,
}

/// Deliberate corruption hook for the conflict audit: the named row's content
/// gets one bit flipped before insertion.
#[derive(Debug, Clone, Copy)]
pub struct Corruption {
    pub object: ObjKind,
    pub entry_shift: usize,
    pub slot: usize,
}

fn classify(
    kind: ObjKind,
    params: &Params,
    z: usize,
    slot: &SlotRead,
    target: ObjKind,
    low_case: bool,
    short_slot: Option<usize>,
) -> Result<&'static str, CompileError> {
    let (x, beta) = (params.x, params.beta);
    let short_zone = slot.track >= beta - 3 * x;
    let range = |row: &'static str, ok: bool| {
        if ok {
            Ok(row)
        } else {
            Err(CompileError::OutOfRangeUnderscript {
                row,
                kind,
                z,
                track: slot.track,
            })
        }
    };
    let j = short_slot;
    let row = match kind {
        ObjKind::Eps => {
            if z == 0 {
                range("T2R1", slot.track == beta - 2)?
            } else if !short_zone {
                "T2R2"
            } else {
                range("T2R3", slot.track >= beta - 3 * x && slot.track < beta - 2)?
            }
        }
        ObjKind::EpsPrime if !low_case => match slot.slot {
            0 if z == 0 => range("T2R4", slot.track == beta - 4)?,
            0 => "T2R5",
            s if s < x - 1 => "T2R6",
            _ if !short_zone => "T2R7",
            _ => range("T2R8", slot.track == beta - 2 * x - 8)?,
        },
        ObjKind::Zero if !low_case => match slot.slot {
            0 if z == 0 => range("T2R9", slot.track == beta - 4)?,
            0 => "T2R10",
            s if s < x => "T2R11",
            _ if !short_zone => "T2R12",
            _ => range("T2R13", slot.track == beta - 2 * x - 8)?,
        },
        ObjKind::One | ObjKind::OnePrime if !low_case => match (slot.slot, target) {
            (0, ObjKind::Zero) if z == 0 => range("T2R14", slot.track == beta - 10)?,
            (0, ObjKind::One) if z == 0 => range("T2R15", slot.track == beta - 10)?,
            (s, ObjKind::Zero) if s < x / 2 - 7 => "T2R16",
            (s, ObjKind::One) if s < x / 2 - 7 => "T2R17",
            (s, ObjKind::Eps) if s < x / 2 - 7 => "T2R18",
            (s, ObjKind::Eps) if s < params.slots(kind) - 1 => "T2R19",
            (_, ObjKind::Eps) if !short_zone => "T2R20",
            (_, ObjKind::Eps) => range("T2R21", slot.track == beta - 3 * x + 2)?,
            _ => {
                return Err(CompileError::WalkInvariant {
                    kind,
                    z,
                    msg: format!("unclassifiable slot {} target {:?}", slot.slot, target),
                })
            }
        },
        ObjKind::EpsPrime => match slot.slot {
            0 if j != Some(0) => range("T3R1", !short_zone)?,
            0 => range("T3R2", short_zone && slot.track < beta - 4)?,
            s if s < x - 1 && j != Some(s) => "T3R3",
            s if s < x - 1 => range("T3R4", short_zone)?,
            _ if j != Some(x - 1) => range("T3R5", !short_zone)?,
            _ => range("T3R6", slot.track > beta - 2 * x && slot.track < beta)?,
        },
        ObjKind::Zero => match slot.slot {
            0 if j != Some(0) => range("T3R7", !short_zone)?,
            0 => range("T3R8", short_zone && slot.track < beta - 4)?,
            s if s < x && j != Some(s) => "T3R9",
            s if s < x => range("T3R10", short_zone)?,
            _ if j != Some(x) => range("T3R11", !short_zone)?,
            _ => range("T3R12", slot.track > beta - 2 * x && slot.track < beta)?,
        },
        ObjKind::One | ObjKind::OnePrime => {
            let jj = j.expect("floor-read case without a short slot");
            match (slot.slot, target) {
                (s, ObjKind::Zero) if s < jj => "T4R1",
                (s, ObjKind::One) if s < jj => "T4R2",
                (s, ObjKind::Zero) if s > jj => "T4R3",
                (s, ObjKind::One) if s > jj => "T4R4",
                (s, ObjKind::Eps) if s < x / 2 - 7 && s < jj => "T4R5",
                (s, ObjKind::Eps) if s < x / 2 - 7 => "T4R6",
                (s, ObjKind::EpsPrime) if s < x / 2 - 7 => {
                    range("T4R7", short_zone && slot.track < beta - 10)?
                }
                (s, ObjKind::Eps) if s < params.slots(kind) - 1 => "T4R8",
                (s, ObjKind::EpsPrime) if s < params.slots(kind) - 1 => {
                    range("T4R9", short_zone)?
                }
                (_, ObjKind::Eps) => "T4R10",
                (_, ObjKind::EpsPrime) => {
                    range("T4R11", slot.track > beta - 2 * x && slot.track < beta)?
                }
                _ => {
                    return Err(CompileError::WalkInvariant {
                        kind,
                        z,
                        msg: format!("unclassifiable slot {} target {:?}", slot.slot, target),
                    })
                }
            }
        }
    };
    Ok(row)
}

/// Groups the walk's read atoms into one assignment per appended object.
///
/// Each target object's read pattern is `[lead b-reads][one u track][trail
/// b-reads]`; the `b`-reads come from the object's own `b`-runs and complete
/// the short tracks.
pub fn assignments_for_object(
    kind: ObjKind,
    params: &Params,
    z: usize,
    alpha: Option<&[bool]>,
    corruption: Option<&Corruption>,
) -> Result<Vec<RowAssignment>, CompileError> {
    let walk = walk_object(kind, params, z)?;
    let targets = target_sequence(kind, params.x, alpha, walk.low_case, walk.short_slot);
    group_assignments(kind, params, z, &walk, &targets, corruption)
}

pub fn group_assignments(
    kind: ObjKind,
    params: &Params,
    z: usize,
    walk: &ObjectWalk,
    targets: &[ObjKind],
    corruption: Option<&Corruption>,
) -> Result<Vec<RowAssignment>, CompileError> {
    let x = params.x;
    let bug = |msg: String| CompileError::WalkInvariant { kind, z, msg };
    let mut atoms = walk.atoms.iter();
    let mut out = Vec::with_capacity(targets.len());
    for &target in targets {
        let pattern = read_pattern(target, x, PatternForm::Full);
        let need = pattern.len();
        let (mut got, mut lead, mut trail) = (0usize, 0usize, 0usize);
        let mut slot: Option<SlotRead> = None;
        while got < need {
            match atoms.next() {
                Some(ReadAtom::BRead) => {
                    if slot.is_none() {
                        lead += 1;
                    } else {
                        trail += 1;
                    }
                    got += 1;
                }
                Some(ReadAtom::Slot(s)) => {
                    if slot.is_some() {
                        return Err(bug(format!("two u slots inside one {target:?} group")));
                    }
                    slot = Some(*s);
                    got += s.reads;
                }
                None => return Err(bug("read stream underflow".into())),
            }
        }
        if got != need {
            return Err(bug(format!("group overshoot for {target:?}")));
        }
        let slot = slot.ok_or_else(|| bug(format!("{target:?} appended without a u slot")))?;
        if pattern[..lead].iter().any(|&b| b) || pattern[need - trail..].iter().any(|&b| b) {
            return Err(bug(format!(
                "b-reads do not align with {target:?} pattern edges"
            )));
        }
        let mut content = pattern[lead..need - trail].to_vec();
        debug_assert_eq!(content.len(), slot.reads);
        let row = classify(kind, params, z, &slot, target, walk.low_case, walk.short_slot)?;
        if let Some(c) = corruption {
            if c.object == kind && c.entry_shift == z && c.slot == slot.slot {
                let flip = content.iter().position(|&b| b).unwrap_or(0);
                content[flip] = !content[flip];
            }
        }
        out.push(RowAssignment {
            track: slot.track,
            content,
            prov: Provenance {
                object: kind,
                entry_shift: z,
                slot: slot.slot,
                row,
            },
        });
    }
    if atoms.next().is_some() {
        return Err(bug("leftover read atoms after grouping".into()));
    }
    Ok(out)
}

/// Enumerates every (object, entry shift) row and collects the ledger.
/// Conflicts are recorded, not fatal, so audits can report them.
pub fn assemble_ledger(
    source: &CyclicProgram,
    params: &Params,
    table: &ShiftTable,
    corruption: Option<&Corruption>,
) -> Result<TrackLedger, CompileError> {
    assert_eq!(source.len(), params.p_prime, "source must be replicated");
    let mut ledger = TrackLedger::new();
    for &z in &table.shifts {
        for kind in [ObjKind::Eps, ObjKind::EpsPrime, ObjKind::Zero, ObjKind::One] {
            let alpha = if kind == ObjKind::One {
                let (m, _) = table.decode(z).expect("enumerated shift must decode");
                Some(source.appendants[m].as_slice())
            } else {
                None
            };
            for row in assignments_for_object(kind, params, z, alpha.map(|v| &v[..]), corruption)?
            {
                ledger.insert(row.track, row.content, row.prov);
            }
        }
    }
    Ok(ledger)
}

/// Writes the assigned tracks into an all-`b` word of length `(3x+1)beta-3x`.
pub fn materialize_u(params: &Params, ledger: &TrackLedger) -> PackedWord {
    let mut u = PackedWord::zeros(params.u_len());
    for (&shift, entry) in &ledger.entries {
        for (k, &bit) in entry.content.iter().enumerate() {
            if bit {
                u.set(shift + k * params.beta, true);
            }
        }
    }
    u
}

/// Which case-1 slot (appendant-encoding track) a shift's residue mod `x`
/// pins, if any: case-1 tracks satisfy `s = -2k - 10 mod x` for
/// `k in [0, x/2 - 7)`.
pub fn case1_slot_of_shift(params: &Params, shift: usize) -> Option<usize> {
    let x = params.x;
    let residue = shift % x;
    let need = (2 * x - 10 - residue) % x; // 2k mod x
    if need % 2 != 0 {
        return None;
    }
    let k = need / 2;
    (k < x / 2 - 7 && (x - (2 * k + 10) % x) % x == residue).then_some(k)
}
