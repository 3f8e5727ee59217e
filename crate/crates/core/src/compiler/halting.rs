//! The halting variant.
//!
//! Odd-shift tracks are never read during a valid simulation (every reachable
//! track shift is even), so they stay all-`b`. To make the system halt when
//! the designated appendant fires, the appendant-encoding tracks for that
//! index are replaced so the appended word has odd length: one designated
//! track becomes all-`b`, the rest keep garbage shapes. Everything read after
//! the odd block sits at odd shifts, reads only `b`s, and the dataword shrinks
//! by `beta - 1` per step until it is shorter than `beta`.

use super::ledger::{Provenance, TrackLedger};
use super::params::Params;
use super::template::{read_pattern, ObjKind, PatternForm};
use super::{CompileError, CompiledSystem};

/// The appendant-encoding slots owned exclusively by entry shift `z`:
/// `(z + k(3x-2) - 10) mod beta` for `k in [0, x/2 - 7)`.
fn case1_tracks(params: &Params, z: usize) -> Vec<(usize, usize, usize)> {
    let (x, beta) = (params.x, params.beta);
    (0..x / 2 - 7)
        .map(|k| {
            let track = (z + k * (3 * x - 2) + beta - 10) % beta;
            let reads = if track < beta - 3 * x { 3 * x + 1 } else { 3 * x };
            (k, track, reads)
        })
        .collect()
}

/// Replaces the tracks that would append the designated appendant, for every
/// garbage counter `d`, so the total appended word has odd length.
pub(super) fn apply_halting_edits(
    ledger: &mut TrackLedger,
    params: &Params,
    h: usize,
) -> Result<(), CompileError> {
    let (x, beta, z1, z2) = (params.x, params.beta, params.z1, params.z2);
    if h >= params.p_prime {
        return Err(CompileError::HaltingIndexOutOfRange {
            index: h,
            p_prime: params.p_prime,
        });
    }
    for d in 0..3 * x + 1 {
        let z = (h * z1 + d * z2) % beta;
        let slots = case1_tracks(params, z);
        // The designated slot appends an odd count of b symbols: a full-length
        // all-b track, or at z = 0 the short track completed by the object's
        // leading b. A short slot elsewhere keeps the <e'> shape.
        let designated = if z == 0 {
            0
        } else {
            slots
                .iter()
                .find(|&&(_, _, reads)| reads == 3 * x + 1)
                .map(|&(k, _, _)| k)
                .ok_or_else(|| CompileError::HaltingUnsupported {
                    index: h,
                    x,
                    detail: format!(
                        "no full-length exclusive track at z={z}; recompile with larger x"
                    ),
                })?
        };
        for (k, track, reads) in slots {
            let entry = ledger.entries.get(&track).ok_or_else(|| {
                CompileError::HaltingConflict {
                    shift: track,
                    detail: "expected an appendant-encoding assignment".into(),
                }
            })?;
            for prov in &entry.assignments {
                let exclusive = matches!(prov.object, ObjKind::One | ObjKind::OnePrime)
                    && prov.entry_shift == z
                    && prov.slot == k;
                if !exclusive {
                    return Err(CompileError::HaltingConflict {
                        shift: track,
                        detail: format!("shared with {prov}"),
                    });
                }
            }
            let content = if k == designated {
                vec![false; reads]
            } else if reads == 3 * x + 1 {
                read_pattern(ObjKind::Eps, x, PatternForm::Full)
            } else {
                read_pattern(ObjKind::EpsPrime, x, PatternForm::Full)
            };
            ledger.replace(
                track,
                content,
                Provenance {
                    object: ObjKind::One,
                    entry_shift: z,
                    slot: k,
                    row: "HALT",
                },
            );
        }
    }
    Ok(())
}

/// Produces the halting variant of a compiled system: identical except that
/// reading a 1 at the designated appendant index appends an odd-length
/// all-`b` block instead of the appendant encoding.
pub fn apply_halting_variant(
    sys: &CompiledSystem,
    halting_index: usize,
) -> Result<CompiledSystem, CompileError> {
    let mut ledger = sys.ledger.clone();
    apply_halting_edits(&mut ledger, &sys.params, halting_index)?;
    CompiledSystem::assemble(
        sys.params,
        sys.base_len,
        sys.source.clone(),
        ledger,
        sys.variant,
        Some(halting_index),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{compile, select_params};
    use crate::cyclic::CyclicProgram;

    #[test]
    fn halting_edits_touch_only_even_exclusive_tracks() {
        let base = CyclicProgram::parse("1\n1\n").unwrap();
        let sys = compile(&base, None).unwrap();
        let halted = apply_halting_variant(&sys, 5).unwrap();
        assert_eq!(halted.halting_index, Some(5));
        let mut replaced = 0;
        for (&shift, entry) in &halted.ledger.entries {
            if entry.assignments.iter().any(|p| p.row == "HALT") {
                assert_eq!(shift % 2, 0, "halting fill must stay on even tracks");
                replaced += 1;
            }
        }
        // One track per (d, slot) pair; x = 18 has 2 slots and 3x + 1 = 55 ds.
        assert_eq!(replaced, (3 * sys.params.x + 1) * (sys.params.x / 2 - 7));
        // Odd tracks carry no assignments at all (all-b by default).
        assert!(halted.ledger.entries.keys().all(|s| s % 2 == 0));
    }

    #[test]
    fn designated_block_has_odd_read_count() {
        let params = select_params(2, 1, Some(18)).unwrap();
        let x = params.x;
        for d in 0..3 * x + 1 {
            let z = (5 * params.z1 + d * params.z2) % params.beta;
            let slots = case1_tracks(&params, z);
            let designated = if z == 0 {
                0
            } else {
                slots.iter().find(|s| s.2 == 3 * x + 1).unwrap().0
            };
            // Appended length parity: designated all-b slot contributes
            // 3x + 1 reads (or 3x + the object's leading b at z = 0), the
            // rest contribute even-length objects.
            let (_, _, reads) = slots[designated];
            let appended = if z == 0 { reads + 1 } else { reads };
            assert_eq!(appended % 2, 1, "z={z}");
        }
    }

    #[test]
    fn out_of_range_index_rejected() {
        let base = CyclicProgram::parse("1\n1\n").unwrap();
        let sys = compile(&base, None).unwrap();
        assert!(matches!(
            apply_halting_variant(&sys, 1000),
            Err(CompileError::HaltingIndexOutOfRange { .. })
        ));
    }
}
