//! The track-assignment ledger: every shift of `u` that any table row
//! assigns, with full provenance for conflict reports and audits.

use std::collections::BTreeMap;
use std::fmt;

use super::template::ObjKind;

/// Where an assignment came from: which object read, entered with which
/// shift, reading which slot, instantiating which table row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub object: ObjKind,
    pub entry_shift: usize,
    pub slot: usize,
    pub row: &'static str,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [<{}> entered z={}, slot {}]",
            self.row,
            self.object.label(),
            self.entry_shift,
            self.slot
        )
    }
}

#[derive(Debug, Clone)]
pub struct TrackEntry {
    pub content: Vec<bool>,
    pub assignments: Vec<Provenance>,
}

/// A conflict: two rows assigning different content to the same shift.
/// Identical re-assignment is not a conflict.
#[derive(Debug, Clone)]
pub struct TrackConflict {
    pub shift: usize,
    pub existing: Provenance,
    pub incoming: Provenance,
}

impl fmt::Display for TrackConflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "track {}: {} conflicts with {}",
            self.shift, self.incoming, self.existing
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct TrackLedger {
    pub entries: BTreeMap<usize, TrackEntry>,
    pub conflicts: Vec<TrackConflict>,
}

impl TrackLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, shift: usize, content: Vec<bool>, prov: Provenance) {
        match self.entries.get_mut(&shift) {
            None => {
                self.entries.insert(
                    shift,
                    TrackEntry {
                        content,
                        assignments: vec![prov],
                    },
                );
            }
            Some(entry) => {
                if entry.content == content {
                    entry.assignments.push(prov);
                } else {
                    self.conflicts.push(TrackConflict {
                        shift,
                        existing: entry.assignments[0].clone(),
                        incoming: prov,
                    });
                }
            }
        }
    }

    /// Replaces a track's content wholesale (halting variant, bootstrap
    /// track). The caller owns the exclusivity argument.
    pub fn replace(&mut self, shift: usize, content: Vec<bool>, prov: Provenance) {
        self.entries.insert(
            shift,
            TrackEntry {
                content,
                assignments: vec![prov],
            },
        );
    }

    pub fn conflict_count(&self) -> usize {
        self.conflicts.len()
    }
}
