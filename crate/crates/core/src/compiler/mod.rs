//! Compiler from cyclic tag programs to binary tag systems.
//!
//! The compiled system has deletion number `beta`, alphabet `{b, c}` and the
//! two rules `b -> b`, `c -> u`. The word `u` encodes the entire (replicated)
//! cyclic program on its tracks: entering an object with shift
//! `z = (z1 m + z2 d) mod beta` makes its `u`-slots read exactly the tracks
//! that append the encoding of appendant `m`.

mod build;
mod file;
mod halting;
mod ledger;
mod params;
mod pcp_ready;
mod schedule;
mod template;

pub use build::{
    assemble_ledger, assignments_for_object, case1_slot_of_shift, materialize_u, shift_table,
    target_sequence, Corruption, RowAssignment, ShiftTable,
};
pub use halting::apply_halting_variant;
pub use ledger::{Provenance, TrackConflict, TrackEntry, TrackLedger};
pub use params::{select_params, Params};
pub use pcp_ready::build_pcp_ready;
pub use schedule::{walk_object, ObjectWalk, ReadAtom, SlotRead};
pub use template::{
    expand_object, read_pattern, skeleton, ObjKind, ObjectTemplate, PatternForm, Seg,
    OBJECT_KINDS,
};

use crate::bits::{PackedDataword, PackedWord};
use crate::cyclic::{replicate_program, CyclicProgram};
use crate::tagcore::BinTagMachine;

#[derive(Debug, thiserror::Error)]
pub enum CompileError {
    #[error("program length {p} is unsupported: the construction requires p = 3k + 2")]
    UnsupportedArity { p: usize },
    #[error("no feasible x for p={p}, r={r}")]
    NoFeasibleX { p: usize, r: usize },
    #[error("invalid x override {x}: {reason}")]
    InvalidX { x: usize, reason: String },
    #[error("track conflict at shift {shift}: {incoming} vs {existing}")]
    TrackConflict {
        shift: usize,
        existing: String,
        incoming: String,
    },
    #[error("row {row} for <{}> entered z={z}: track {track} outside the row's stated range", kind.label())]
    OutOfRangeUnderscript {
        row: &'static str,
        kind: ObjKind,
        z: usize,
        track: usize,
    },
    #[error("schedule walk invariant broken for <{}> at z={z}: {msg}", kind.label())]
    WalkInvariant { kind: ObjKind, z: usize, msg: String },
    #[error("appendant of length {len} exceeds r={r}")]
    AppendantTooLong { len: usize, r: usize },
    #[error("halting index {index} out of range (program length {p_prime})")]
    HaltingIndexOutOfRange { index: usize, p_prime: usize },
    #[error("halting variant unsupported for index {index} at x={x}: {detail}")]
    HaltingUnsupported {
        index: usize,
        x: usize,
        detail: String,
    },
    #[error("halting replacement would clobber a shared track {shift} ({detail})")]
    HaltingConflict { shift: usize, detail: String },
    #[error("track 0 already assigned; cannot install the bootstrap track")]
    Track0Assigned,
    #[error("operation requires the {expected:?} variant")]
    WrongVariant { expected: Variant },
    #[error("two (m, d) pairs share shift {z}")]
    ShiftCollision { z: usize },
    #[error("track ownership audit failed at shift {shift}: {detail}")]
    TrackOwnership { shift: usize, detail: String },
    #[error("stored ledger disagrees with a fresh build at shift {shift}")]
    LedgerMismatch { shift: usize },
    #[error("stored u disagrees with a fresh build")]
    UMismatch,
    #[error("compiled file format error on line {line}: {msg}")]
    FileFormat { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Cyclic(#[from] crate::cyclic::CyclicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Standard,
    PcpReady,
}

/// Expanded object templates, substituted with the system's actual rule word
/// (`u` for the standard variant, `u'` for the PCP-ready one).
#[derive(Debug, Clone)]
pub struct Templates {
    by_kind: Vec<PackedWord>,
}

impl Templates {
    fn build(params: &Params, rule_word: &PackedWord) -> Templates {
        let by_kind = OBJECT_KINDS
            .iter()
            .map(|&k| expand_object(&ObjectTemplate::new(k, params), rule_word))
            .collect();
        Templates { by_kind }
    }

    pub fn get(&self, kind: ObjKind) -> &PackedWord {
        &self.by_kind[OBJECT_KINDS.iter().position(|&k| k == kind).unwrap()]
    }
}

/// A compiled binary tag system.
#[derive(Debug, Clone)]
pub struct CompiledSystem {
    pub params: Params,
    /// Length of the pre-replication program.
    pub base_len: usize,
    /// The replicated program of length `3x - 2` whose appendants `u` encodes.
    pub source: CyclicProgram,
    pub ledger: TrackLedger,
    /// The design-side word `u`.
    pub u: PackedWord,
    /// What the rule `c` actually appends: `u`, or `u'` for the PCP-ready
    /// variant.
    pub rule_word: PackedWord,
    pub variant: Variant,
    pub halting_index: Option<usize>,
    templates: Templates,
}

impl CompiledSystem {
    pub(crate) fn assemble(
        params: Params,
        base_len: usize,
        source: CyclicProgram,
        ledger: TrackLedger,
        variant: Variant,
        halting_index: Option<usize>,
    ) -> Result<CompiledSystem, CompileError> {
        if let Some(c) = ledger.conflicts.first() {
            return Err(CompileError::TrackConflict {
                shift: c.shift,
                existing: c.existing.to_string(),
                incoming: c.incoming.to_string(),
            });
        }
        let u = materialize_u(&params, &ledger);
        let rule_word = match variant {
            Variant::Standard => u.clone(),
            Variant::PcpReady => derive_u_prime(&u),
        };
        let templates = Templates::build(&params, &rule_word);
        Ok(CompiledSystem {
            params,
            base_len,
            source,
            ledger,
            u,
            rule_word,
            variant,
            halting_index,
            templates,
        })
    }

    pub fn template(&self, kind: ObjKind) -> &PackedWord {
        self.templates.get(kind)
    }

    /// The packed two-rule machine `b -> b`, `c -> rule_word`.
    pub fn machine(&self) -> BinTagMachine {
        BinTagMachine::new(
            self.params.beta,
            PackedWord::from_bits([false]),
            self.rule_word.clone(),
        )
    }

    pub fn shift_table(&self) -> ShiftTable {
        shift_table(&self.params)
    }

    /// The designated input word `u_beta .. u_l b` of the PCP-ready variant:
    /// the rule word minus its first `beta - 1` symbols.
    pub fn pcp_input_word(&self) -> Result<PackedWord, CompileError> {
        if self.variant != Variant::PcpReady {
            return Err(CompileError::WrongVariant {
                expected: Variant::PcpReady,
            });
        }
        let mut w = PackedWord::with_capacity(self.rule_word.len() - (self.params.beta - 1));
        w.extend_from_range(
            &self.rule_word,
            self.params.beta - 1,
            self.rule_word.len() - (self.params.beta - 1),
        );
        Ok(w)
    }
}

/// `u' = u` minus its first symbol plus one trailing `b`; `|u'| = |u|`.
pub(crate) fn derive_u_prime(u: &PackedWord) -> PackedWord {
    let mut up = PackedWord::with_capacity(u.len());
    up.extend_from_range(u, 1, u.len() - 1);
    up.push(false);
    up
}

/// Compiles a cyclic program of length `p = 3k + 2` into the standard-variant
/// binary tag system.
pub fn compile(base: &CyclicProgram, x_override: Option<usize>) -> Result<CompiledSystem, CompileError> {
    let params = select_params(base.len(), base.longest_appendant(), x_override)?;
    let source = replicate_program(base, params.q)?;
    let table = shift_table(&params);
    let ledger = assemble_ledger(&source, &params, &table, None)?;
    CompiledSystem::assemble(params, base.len(), source, ledger, Variant::Standard, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AppendantMode {
    Full,
    PrimeAt(usize),
}

/// Encodes one appendant as an object sequence: the full form
/// `<s1>..<sv><e>^{x-v+1}`, or the `<e'>`-interleaved forms used when a
/// floor-read inserts one short garbage object at position `j`.
pub fn encode_appendant(
    alpha: &[bool],
    params: &Params,
    mode: AppendantMode,
) -> Result<Vec<ObjKind>, CompileError> {
    if alpha.len() > params.r {
        return Err(CompileError::AppendantTooLong {
            len: alpha.len(),
            r: params.r,
        });
    }
    Ok(match mode {
        AppendantMode::Full => target_sequence(ObjKind::One, params.x, Some(alpha), false, None),
        AppendantMode::PrimeAt(j) => {
            assert!(j <= params.x, "prime position out of range");
            target_sequence(ObjKind::One, params.x, Some(alpha), true, Some(j))
        }
    })
}

/// Encodes a cyclic dataword as the compiled input dataword
/// `<w_1><w_2>..<w_n>` with its leftmost `entry_shift` symbols deleted.
pub fn encode_dataword(sys: &CompiledSystem, w: &[bool], entry_shift: usize) -> PackedDataword {
    assert!(!w.is_empty(), "input word must be non-empty");
    assert!(entry_shift < sys.params.beta);
    let total: usize = w
        .iter()
        .map(|&b| sys.params.object_len(if b { ObjKind::One } else { ObjKind::Zero }))
        .sum();
    let mut buf = PackedWord::with_capacity(total);
    for &b in w {
        buf.extend_from(sys.template(if b { ObjKind::One } else { ObjKind::Zero }));
    }
    let mut dw = PackedDataword::from_word(buf, entry_shift);
    dw.drop_front(entry_shift);
    dw
}

/// Audit counters reported by `verify-u`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AuditReport {
    pub conflicts: usize,
    pub ledger_entries: usize,
    pub owned_tracks_checked: usize,
    pub distinct_shifts: usize,
    pub tracks_matching_u: usize,
}

/// Shift injectivity: all `(m, d)` shifts are pairwise distinct (in
/// particular cross-`m` distinct), so each shift encodes one appendant.
/// Returns the shift count.
pub fn audit_shift_injectivity(params: &Params) -> Result<usize, CompileError> {
    let (z1, z2, beta, x) = (params.z1, params.z2, params.beta, params.x);
    let mut seen: Vec<Option<usize>> = vec![None; beta];
    let mut count = 0;
    for m in 0..3 * x - 2 {
        for d in 0..3 * x + 1 {
            let z = (m * z1 + d * z2) % beta;
            if let Some(prev_m) = seen[z] {
                let _ = prev_m;
                return Err(CompileError::ShiftCollision { z });
            }
            seen[z] = Some(m);
            count += 1;
        }
    }
    Ok(count)
}

/// Track ownership: a track of the form `(z' + k(3x-2) - 10) mod beta` is
/// read only when `<1>` is entered with shift `z'` and its `k`-th slot is
/// being read. Audited over the ledger's provenance lists.
pub fn audit_track_ownership(params: &Params, ledger: &TrackLedger) -> Result<usize, CompileError> {
    let (x, beta) = (params.x, params.beta);
    let mut checked = 0;
    for (&shift, entry) in &ledger.entries {
        match case1_slot_of_shift(params, shift) {
            Some(k) => {
                let offset = (k * (3 * x - 2)).wrapping_sub(10) as isize;
                let z_expected =
                    ((shift as isize - offset).rem_euclid(beta as isize)) as usize;
                for prov in &entry.assignments {
                    let ok = matches!(prov.object, ObjKind::One | ObjKind::OnePrime)
                        && prov.slot == k
                        && prov.entry_shift == z_expected;
                    if !ok {
                        return Err(CompileError::TrackOwnership {
                            shift,
                            detail: format!("assigned by {prov}, expected <1> z={z_expected} slot {k}"),
                        });
                    }
                }
                checked += 1;
            }
            None => {
                for prov in &entry.assignments {
                    let is_case1_row = matches!(prov.object, ObjKind::One | ObjKind::OnePrime)
                        && prov.slot < x / 2 - 7
                        && prov.row != "BOOT";
                    if is_case1_row {
                        return Err(CompileError::TrackOwnership {
                            shift,
                            detail: format!("appendant-encoding row {prov} landed off-pattern"),
                        });
                    }
                }
            }
        }
    }
    Ok(checked)
}

/// Every assigned track's content must be readable back off `u` verbatim.
pub fn audit_tracks_match_u(sys: &CompiledSystem) -> Result<usize, CompileError> {
    let beta = sys.params.beta;
    let mut verified = 0;
    for (&shift, entry) in &sys.ledger.entries {
        let window = if shift < beta - 3 * sys.params.x {
            3 * sys.params.x + 1
        } else {
            3 * sys.params.x
        };
        if entry.content.len() != window {
            return Err(CompileError::LedgerMismatch { shift });
        }
        for (k, &bit) in entry.content.iter().enumerate() {
            if sys.u.get(shift + k * beta) != bit {
                return Err(CompileError::LedgerMismatch { shift });
            }
        }
        verified += 1;
    }
    // All ones in u must be accounted for by ledger entries.
    let ledger_ones: usize = sys
        .ledger
        .entries
        .values()
        .map(|e| e.content.iter().filter(|&&b| b).count())
        .sum();
    if sys.u.count_ones() != ledger_ones {
        return Err(CompileError::UMismatch);
    }
    Ok(verified)
}

/// Re-runs the whole synthesis from the stored source and checks the stored
/// ledger and `u` against it, then runs the conflict, ownership and
/// injectivity audits.
pub fn verify_compiled(sys: &CompiledSystem) -> Result<AuditReport, CompileError> {
    let table = sys.shift_table();
    let mut fresh = assemble_ledger(&sys.source, &sys.params, &table, None)?;
    if sys.variant == Variant::PcpReady {
        pcp_ready::install_bootstrap_track(&mut fresh, &sys.params)?;
    }
    if let Some(h) = sys.halting_index {
        halting::apply_halting_edits(&mut fresh, &sys.params, h)?;
    }
    if let Some(c) = fresh.conflicts.first() {
        return Err(CompileError::TrackConflict {
            shift: c.shift,
            existing: c.existing.to_string(),
            incoming: c.incoming.to_string(),
        });
    }
    if fresh.entries.len() != sys.ledger.entries.len() {
        let shift = fresh
            .entries
            .keys()
            .chain(sys.ledger.entries.keys())
            .copied()
            .find(|s| fresh.entries.contains_key(s) != sys.ledger.entries.contains_key(s))
            .unwrap_or(0);
        return Err(CompileError::LedgerMismatch { shift });
    }
    for (&shift, entry) in &fresh.entries {
        let stored = sys
            .ledger
            .entries
            .get(&shift)
            .ok_or(CompileError::LedgerMismatch { shift })?;
        if stored.content != entry.content {
            return Err(CompileError::LedgerMismatch { shift });
        }
    }
    let fresh_u = materialize_u(&sys.params, &fresh);
    if fresh_u != sys.u {
        return Err(CompileError::UMismatch);
    }
    let tracks_matching_u = audit_tracks_match_u(sys)?;
    let owned_tracks_checked = audit_track_ownership(&sys.params, &fresh)?;
    let distinct_shifts = audit_shift_injectivity(&sys.params)?;
    Ok(AuditReport {
        conflicts: fresh.conflict_count(),
        ledger_entries: fresh.entries.len(),
        owned_tracks_checked,
        distinct_shifts,
        tracks_matching_u,
    })
}

pub use file::{read_compiled, write_compiled, FILE_HEADER};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclic::parse_binword;

    #[test]
    fn verify_compiled_passes_on_fresh_builds() {
        let base = CyclicProgram::parse("1\n1\n").unwrap();
        let sys = compile(&base, None).unwrap();
        let report = verify_compiled(&sys).unwrap();
        assert_eq!(report.conflicts, 0);
        assert!(report.ledger_entries > 0);
        assert!(report.owned_tracks_checked > 0);
        assert_eq!(report.distinct_shifts, (3 * 18 - 2) * (3 * 18 + 1));
        assert_eq!(report.tracks_matching_u, report.ledger_entries);

        // The halting and PCP-ready variants re-verify too.
        let halted = apply_halting_variant(&sys, 3).unwrap();
        assert_eq!(verify_compiled(&halted).unwrap().conflicts, 0);
        let pcp = build_pcp_ready(&CyclicProgram::parse("1\n").unwrap(), &[true], None).unwrap();
        assert_eq!(verify_compiled(&pcp).unwrap().conflicts, 0);
    }

    #[test]
    fn encode_appendant_matches_the_equations() {
        let params = select_params(2, 1, Some(18)).unwrap();
        let x = params.x;
        let alpha = parse_binword("1").unwrap();
        // Eq. (2): <1><e>^x for v = 1.
        let seq = encode_appendant(&alpha, &params, AppendantMode::Full).unwrap();
        assert_eq!(seq.len(), x + 1);
        assert_eq!(seq[0], ObjKind::One);
        assert!(seq[1..].iter().all(|&k| k == ObjKind::Eps));
        // Eq. (4): <1><e>^2<e'><e>^{x-3} for j = 3 >= v.
        let seq = encode_appendant(&alpha, &params, AppendantMode::PrimeAt(3)).unwrap();
        assert_eq!(seq.len(), x + 1);
        assert_eq!(seq[0], ObjKind::One);
        assert_eq!(seq[3], ObjKind::EpsPrime);
        // Over-long appendants are rejected.
        let long = parse_binword("1010").unwrap();
        assert!(matches!(
            encode_appendant(&long, &params, AppendantMode::Full),
            Err(CompileError::AppendantTooLong { .. })
        ));
    }

    #[test]
    fn encode_dataword_is_template_concatenation() {
        let base = CyclicProgram::parse("1\n1\n").unwrap();
        let sys = compile(&base, None).unwrap();
        let one = encode_dataword(&sys, &[true], 0);
        assert_eq!(one.len(), sys.template(ObjKind::One).len());
        assert!(one.eq_range(0, sys.template(ObjKind::One), 0, one.len()));
        let two = encode_dataword(&sys, &[true, false], 0);
        assert_eq!(two.len(), 2 * sys.template(ObjKind::One).len());
        // Eq. (1): the leftmost z symbols are deleted.
        let shifted = encode_dataword(&sys, &[true], 5 * sys.params.x);
        assert_eq!(
            shifted.len() + 5 * sys.params.x,
            sys.template(ObjKind::One).len()
        );
        assert_eq!(shifted.entry_shift, 5 * sys.params.x);
    }
}
