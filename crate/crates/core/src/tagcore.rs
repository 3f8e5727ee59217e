//! Tag-system execution semantics and the shift/track calculus.
//!
//! A tag system deletes `beta` symbols per step and appends the word its rule
//! table assigns to the first deleted symbol; it halts when the dataword is
//! shorter than `beta`. A *round* traverses the dataword once, reading every
//! `beta`-th symbol; the *shift* with which a word is entered selects which of
//! its tracks is read, and a word of length `y*beta - s` changes the shift of
//! whatever follows it by `s`.
//!
//! Two execution paths: a generic engine over small alphabets, and a packed
//! 1-bit-per-symbol machine for the two-letter systems produced by the
//! compiler, where datawords reach 10^7..10^8 symbols.

use std::collections::BTreeMap;
use std::fmt;

use crate::bits::{PackedDataword, PackedWord};

pub type Sym = u8;

#[derive(Debug, thiserror::Error)]
pub enum TagError {
    #[error("malformed dataword: symbol {0:?} is not in the alphabet")]
    MalformedDataword(char),
    #[error("invalid shift {shift}: deletion number is {beta}")]
    InvalidShift { shift: usize, beta: usize },
    #[error("tag system parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A deterministic tag system: deletion number plus a total rule map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagSystem {
    beta: usize,
    rules: BTreeMap<Sym, Vec<Sym>>,
}

impl TagSystem {
    pub fn new(beta: usize, rules: BTreeMap<Sym, Vec<Sym>>) -> Result<Self, TagError> {
        assert!(beta >= 1, "deletion number must be >= 1");
        assert!(!rules.is_empty(), "rule map must not be empty");
        for appendant in rules.values() {
            if let Some(&s) = appendant.iter().find(|s| !rules.contains_key(s)) {
                return Err(TagError::MalformedDataword(s as char));
            }
        }
        Ok(TagSystem { beta, rules })
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    pub fn alphabet(&self) -> impl Iterator<Item = Sym> + '_ {
        self.rules.keys().copied()
    }

    pub fn appendant(&self, sym: Sym) -> Result<&[Sym], TagError> {
        self.rules
            .get(&sym)
            .map(|v| v.as_slice())
            .ok_or(TagError::MalformedDataword(sym as char))
    }

    /// Text format: line 1 `beta=N`, then one `sym -> word` line per rule.
    pub fn parse(text: &str) -> Result<Self, TagError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
        let (ln, first) = lines.next().ok_or(TagError::Parse {
            line: 1,
            msg: "empty file".into(),
        })?;
        let beta: usize = first
            .trim()
            .strip_prefix("beta=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or(TagError::Parse {
                line: ln + 1,
                msg: "expected `beta=N`".into(),
            })?;
        let mut rules = BTreeMap::new();
        for (ln, line) in lines {
            let (lhs, rhs) = line.split_once("->").ok_or(TagError::Parse {
                line: ln + 1,
                msg: "expected `sym -> word`".into(),
            })?;
            let lhs = lhs.trim();
            if lhs.len() != 1 {
                return Err(TagError::Parse {
                    line: ln + 1,
                    msg: "rule symbol must be a single character".into(),
                });
            }
            let rhs = rhs.trim();
            let word = if rhs == "e" {
                Vec::new()
            } else {
                rhs.bytes().collect()
            };
            rules.insert(lhs.as_bytes()[0], word);
        }
        TagSystem::new(beta, rules)
    }
}

impl fmt::Display for TagSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "beta={}", self.beta)?;
        for (sym, app) in &self.rules {
            let rhs = if app.is_empty() {
                "e".to_string()
            } else {
                app.iter().map(|&s| s as char).collect()
            };
            writeln!(f, "{} -> {}", *sym as char, rhs)?;
        }
        Ok(())
    }
}

/// A dataword over the owning system's alphabet.
///
/// `entry_shift` records how many leading symbols of the leftmost logical
/// object were already deleted; tagcore carries it as opaque metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataword {
    pub syms: Vec<Sym>,
    pub entry_shift: usize,
}

impl Dataword {
    pub fn new(syms: Vec<Sym>) -> Self {
        Dataword {
            syms,
            entry_shift: 0,
        }
    }

    pub fn parse(s: &str) -> Self {
        Dataword::new(s.trim().bytes().collect())
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }
}

impl fmt::Display for Dataword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.syms {
            write!(f, "{}", s as char)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Stepped(Dataword),
    /// `|w| < beta`: the word is returned unchanged.
    Halted(Dataword),
}

/// One computation step: delete the first `beta` symbols, append the rule word
/// for the first deleted symbol.
pub fn tag_step(sys: &TagSystem, w: &Dataword) -> Result<StepOutcome, TagError> {
    if w.len() < sys.beta() {
        return Ok(StepOutcome::Halted(w.clone()));
    }
    for &s in &w.syms[..sys.beta()] {
        if !sys.rules.contains_key(&s) {
            return Err(TagError::MalformedDataword(s as char));
        }
    }
    let appendant = sys.appendant(w.syms[0])?;
    let mut next = Vec::with_capacity(w.len() - sys.beta() + appendant.len());
    next.extend_from_slice(&w.syms[sys.beta()..]);
    next.extend_from_slice(appendant);
    Ok(StepOutcome::Stepped(Dataword {
        syms: next,
        entry_shift: w.entry_shift,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub word: Dataword,
    pub steps: usize,
    pub halted: bool,
}

/// Iterates [`tag_step`] to a halt or the step budget, reporting which.
pub fn tag_run(sys: &TagSystem, w: &Dataword, max_steps: usize) -> Result<RunOutcome, TagError> {
    let mut cur = w.clone();
    for steps in 0..max_steps {
        match tag_step(sys, &cur)? {
            StepOutcome::Stepped(next) => cur = next,
            StepOutcome::Halted(word) => {
                return Ok(RunOutcome {
                    word,
                    steps,
                    halted: true,
                })
            }
        }
    }
    let halted = cur.len() < sys.beta();
    Ok(RunOutcome {
        word: cur,
        steps: max_steps,
        halted,
    })
}

/// `track_z(w) = w_z w_{z+beta} w_{z+2*beta} ...` — the symbols read during a
/// single round on `w` entered with shift `z`.
pub fn track_of(w: &[Sym], z: usize, beta: usize) -> Result<Vec<Sym>, TagError> {
    if z >= beta {
        return Err(TagError::InvalidShift { shift: z, beta });
    }
    Ok((z..w.len()).step_by(beta).map(|i| w[i]).collect())
}

/// The `s` with `|w| = y*beta - s`, `0 <= s < beta`.
pub fn shift_change_of(w: &[Sym], beta: usize) -> usize {
    shift_change_of_len(w.len(), beta)
}

pub fn shift_change_of_len(len: usize, beta: usize) -> usize {
    (beta - len % beta) % beta
}

/// Outcome of one round over a designated prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftReport {
    pub shift_change: usize,
    pub symbols_read: usize,
    pub exit_shift: usize,
}

/// One round over `prefix` entered with shift `entry`. Appends made during the
/// round land outside the prefix and do not extend it.
///
/// `symbols_read` is `ceil(|prefix|/beta)` when `entry < beta - s` and
/// `floor(|prefix|/beta)` when `entry >= beta - s`, for shift change `s > 0`;
/// the exit shift is `(entry + s) mod beta`.
pub fn round_on(sys: &TagSystem, prefix: &[Sym], entry: usize) -> Result<ShiftReport, TagError> {
    let beta = sys.beta();
    if entry >= beta {
        return Err(TagError::InvalidShift { shift: entry, beta });
    }
    let shift_change = shift_change_of(prefix, beta);
    let symbols_read = prefix.len().saturating_sub(entry).div_ceil(beta);
    Ok(ShiftReport {
        shift_change,
        symbols_read,
        exit_shift: (entry + shift_change) % beta,
    })
}

/// Packed fast path for two-symbol systems with rules `b -> app_b`,
/// `c -> app_c` (`b` = `false`, `c` = `true`).
#[derive(Debug, Clone)]
pub struct BinTagMachine {
    pub beta: usize,
    pub app_b: PackedWord,
    pub app_c: PackedWord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinStep {
    /// The symbol that was read.
    Read(bool),
    Halted,
}

impl BinTagMachine {
    pub fn new(beta: usize, app_b: PackedWord, app_c: PackedWord) -> Self {
        assert!(beta >= 1);
        BinTagMachine { beta, app_b, app_c }
    }

    /// One step in place. Returns the symbol read, or `Halted` if `|w| < beta`.
    pub fn step(&self, w: &mut PackedDataword) -> BinStep {
        if w.len() < self.beta {
            return BinStep::Halted;
        }
        let read = w.get(0);
        w.drop_front(self.beta);
        w.append_word(if read { &self.app_c } else { &self.app_b });
        BinStep::Read(read)
    }

    /// Runs to a halt or the budget; returns (steps taken, halted).
    pub fn run(&self, w: &mut PackedDataword, max_steps: usize) -> (usize, bool) {
        for steps in 0..max_steps {
            if let BinStep::Halted = self.step(w) {
                return (steps, true);
            }
        }
        (max_steps, w.len() < self.beta)
    }
}
