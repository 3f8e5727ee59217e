//! Two execution engines for compiled systems.
//!
//! The object engine works on sequences of object kinds with pure shift
//! arithmetic: consuming an object appends the kinds dictated by its entry
//! shift and advances the shift by the object's shift change. The symbol
//! engine runs the literal two-rule tag machine on the packed dataword and
//! recognizes objects by template matching, so it exercises `u` itself. In
//! `both` mode every consumed object is cross-checked between the engines:
//! kind, entry shift, and the appended expansion, bit for bit.
//!
//! One simulated cyclic step is one payload object (`<0>`/`<1>`) plus the
//! garbage run that follows it.

use std::collections::VecDeque;
use std::time::Instant;

use crate::bits::{PackedDataword, PackedWord};
use crate::compiler::{
    target_sequence, walk_object, CompileError, CompiledSystem, ObjKind, ShiftTable, Variant,
};
use crate::cyclic::BinWord;
use crate::tagcore::{BinStep, BinTagMachine};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("shift {z} is not in the reachable shift set")]
    NotInShiftSet { z: usize },
    #[error("cannot decode the dataword at symbol offset {offset}: {detail}")]
    Decode { offset: usize, detail: String },
    #[error("engines diverged at object {index}: {detail}")]
    Divergence { index: u64, detail: String },
    #[error("symbol engine halted unexpectedly at tag step {step}")]
    UnexpectedHalt { step: u64 },
    #[error("operation needs the standard variant")]
    NeedsStandard,
    #[error("operation needs the PCP-ready variant")]
    NeedsPcpReady,
    #[error(transparent)]
    Compile(#[from] CompileError),
}

/// Inverts `z = (z1 m + z2 d) mod beta` to its unique `(m, d)` witness.
pub fn shift_decode(table: &ShiftTable, z: usize) -> Result<(usize, usize), SimError> {
    table.decode(z).ok_or(SimError::NotInShiftSet { z })
}

/// Object-level state: the kinds in the dataword plus the leftmost entry
/// shift (design-side).
#[derive(Debug, Clone)]
pub struct ObjectState {
    pub objects: VecDeque<ObjKind>,
    pub entry_shift: usize,
    pub steps_elapsed: u64,
}

/// One consumed object.
#[derive(Debug, Clone)]
pub struct ObjectRecord {
    pub index: u64,
    pub kind: ObjKind,
    pub entry_shift: usize,
    pub m: usize,
    pub d: usize,
    pub appended: Vec<ObjKind>,
    pub symbols_read: usize,
    /// Set when this read fired the halting appendant; `appended` is empty
    /// and the engine stops.
    pub halting: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepStatus {
    Simulated,
    /// No payload object remains: the simulated dataword is empty.
    Completed,
    HaltingTriggered,
}

pub struct ObjectEngine<'a> {
    pub sys: &'a CompiledSystem,
    table: ShiftTable,
    pub state: ObjectState,
    pub tag_steps: u64,
    stopped: bool,
}

impl<'a> ObjectEngine<'a> {
    pub fn new(sys: &'a CompiledSystem, w: &[bool], entry_shift: usize) -> ObjectEngine<'a> {
        let objects = w
            .iter()
            .map(|&b| if b { ObjKind::One } else { ObjKind::Zero })
            .collect();
        ObjectEngine {
            sys,
            table: sys.shift_table(),
            state: ObjectState {
                objects,
                entry_shift,
                steps_elapsed: 0,
            },
            tag_steps: 0,
            stopped: false,
        }
    }

    /// PCP-ready start: the designated input word has been read, appending
    /// `<1>'` entered with design shift `3x` (m = 1, d = 3x).
    pub fn new_bootstrap(sys: &'a CompiledSystem) -> Result<ObjectEngine<'a>, SimError> {
        if sys.variant != Variant::PcpReady {
            return Err(SimError::NeedsPcpReady);
        }
        let x = sys.params.x;
        Ok(ObjectEngine {
            sys,
            table: sys.shift_table(),
            state: ObjectState {
                objects: VecDeque::from([ObjKind::OnePrime]),
                entry_shift: 3 * x,
                steps_elapsed: 0,
            },
            tag_steps: 3 * x as u64,
            stopped: false,
        })
    }

    pub fn remaining_payload(&self) -> BinWord {
        self.state
            .objects
            .iter()
            .filter_map(|k| k.payload_bit())
            .collect()
    }

    pub fn garbage_counts(&self) -> (usize, usize) {
        let eps = self
            .state
            .objects
            .iter()
            .filter(|&&k| k == ObjKind::Eps)
            .count();
        let epsp = self
            .state
            .objects
            .iter()
            .filter(|&&k| k == ObjKind::EpsPrime)
            .count();
        (eps, epsp)
    }

    /// Consumes the leftmost object. `None` when no objects remain or the
    /// engine already hit the halting appendant.
    pub fn step_object(&mut self) -> Result<Option<ObjectRecord>, SimError> {
        if self.stopped {
            return Ok(None);
        }
        let Some(&kind) = self.state.objects.front() else {
            return Ok(None);
        };
        let z = self.state.entry_shift;
        let (m, d) = shift_decode(&self.table, z)?;
        let index = self.state.steps_elapsed;
        let walk = walk_object(kind, &self.sys.params, z)?;

        if kind.payload_bit() == Some(true) && self.sys.halting_index == Some(m) {
            self.state.objects.pop_front();
            self.state.entry_shift = walk.exit_shift;
            self.state.steps_elapsed += 1;
            self.tag_steps += walk.total_reads as u64;
            self.stopped = true;
            return Ok(Some(ObjectRecord {
                index,
                kind,
                entry_shift: z,
                m,
                d,
                appended: Vec::new(),
                symbols_read: walk.total_reads,
                halting: true,
            }));
        }

        let alpha = match kind {
            ObjKind::One | ObjKind::OnePrime => Some(self.sys.source.appendants[m].clone()),
            _ => None,
        };
        let appended = target_sequence(
            kind,
            self.sys.params.x,
            alpha.as_deref(),
            walk.low_case,
            walk.short_slot,
        );
        self.state.objects.pop_front();
        self.state.objects.extend(appended.iter().copied());
        self.state.entry_shift = walk.exit_shift;
        self.state.steps_elapsed += 1;
        self.tag_steps += walk.total_reads as u64;
        Ok(Some(ObjectRecord {
            index,
            kind,
            entry_shift: z,
            m,
            d,
            appended,
            symbols_read: walk.total_reads,
            halting: false,
        }))
    }

    /// One simulated cyclic step: a payload object plus the garbage run that
    /// follows it.
    pub fn step_cyclic(&mut self) -> Result<(Vec<ObjectRecord>, StepStatus), SimError> {
        let mut records = Vec::new();
        // Leading garbage only occurs in externally decoded states.
        loop {
            match self.state.objects.front() {
                None => return Ok((records, StepStatus::Completed)),
                Some(k) if k.is_payload() => break,
                Some(_) => match self.step_object()? {
                    Some(rec) => records.push(rec),
                    None => return Ok((records, StepStatus::Completed)),
                },
            }
        }
        match self.step_object()? {
            None => return Ok((records, StepStatus::Completed)),
            Some(rec) => {
                let halting = rec.halting;
                records.push(rec);
                if halting {
                    return Ok((records, StepStatus::HaltingTriggered));
                }
            }
        }
        while matches!(self.state.objects.front(), Some(k) if !k.is_payload()) {
            match self.step_object()? {
                Some(rec) => records.push(rec),
                None => break,
            }
        }
        Ok((records, StepStatus::Simulated))
    }
}

/// Symbol-level engine: the literal tag machine plus object recognition.
pub struct SymbolEngine<'a> {
    pub sys: &'a CompiledSystem,
    machine: BinTagMachine,
    pub word: PackedDataword,
    /// Physical shift of the leftmost object (how many of its symbols are
    /// already deleted).
    actual_shift: usize,
    pub tag_steps: u64,
}

#[derive(Debug, Clone)]
pub struct SymbolRecord {
    pub kind: ObjKind,
    pub entry_shift: usize,
    pub symbols_read: usize,
    pub appended_len: usize,
}

impl<'a> SymbolEngine<'a> {
    pub fn new(sys: &'a CompiledSystem, w: &[bool], entry_shift: usize) -> Result<Self, SimError> {
        if sys.variant != Variant::Standard {
            return Err(SimError::NeedsStandard);
        }
        Ok(SymbolEngine {
            sys,
            machine: sys.machine(),
            word: crate::compiler::encode_dataword(sys, w, entry_shift),
            actual_shift: entry_shift,
            tag_steps: 0,
        })
    }

    /// PCP-ready start: runs the machine over the designated input word,
    /// which appends `<1>'` entered with physical shift `3x - 1`.
    pub fn new_bootstrap(sys: &'a CompiledSystem) -> Result<Self, SimError> {
        let input = sys.pcp_input_word().map_err(SimError::Compile)?;
        let mut word = PackedDataword::from_word(input, 0);
        let machine = sys.machine();
        let x = sys.params.x;
        for step in 0..3 * x {
            if machine.step(&mut word) == BinStep::Halted {
                return Err(SimError::UnexpectedHalt { step: step as u64 });
            }
        }
        let mut engine = SymbolEngine {
            sys,
            machine,
            word,
            actual_shift: 3 * x - 1,
            tag_steps: 3 * x as u64,
        };
        engine.word.entry_shift = 3 * x;
        // The dataword is now <1>' with its leftmost 3x - 1 symbols deleted.
        let (kind, _) = engine.peek_kind()?;
        if kind != ObjKind::OnePrime {
            return Err(SimError::Decode {
                offset: 0,
                detail: "bootstrap did not append <1>'".into(),
            });
        }
        Ok(engine)
    }

    /// Entry shift in design coordinates: the PCP-ready variant runs one
    /// symbol to the left of the design everywhere.
    pub fn design_shift(&self) -> usize {
        match self.sys.variant {
            Variant::Standard => self.actual_shift,
            Variant::PcpReady => (self.actual_shift + 1) % self.sys.params.beta,
        }
    }

    fn candidates(&self) -> &'static [ObjKind] {
        candidates_for(self.sys.variant)
    }

    /// Identifies the leftmost object by template matching at the current
    /// physical shift.
    pub fn peek_kind(&self) -> Result<(ObjKind, usize), SimError> {
        let z = self.actual_shift;
        let mut found = None;
        for &kind in self.candidates() {
            let tpl = self.sys.template(kind);
            if tpl.len() <= z || self.word.len() < tpl.len() - z {
                continue;
            }
            if self.word.eq_range(0, tpl, z, tpl.len() - z) {
                if let Some(prev) = found {
                    return Err(SimError::Decode {
                        offset: 0,
                        detail: format!(
                            "ambiguous leftmost object: <{}> and <{}>",
                            ObjKind::label(prev),
                            kind.label()
                        ),
                    });
                }
                found = Some(kind);
            }
        }
        found.map(|k| (k, z)).ok_or_else(|| SimError::Decode {
            offset: 0,
            detail: format!("no template matches at physical shift {z}"),
        })
    }

    /// Runs the machine until exactly one full leftmost object has been
    /// consumed; returns what was read and how much was appended.
    pub fn consume_object(&mut self) -> Result<SymbolRecord, SimError> {
        let (kind, z) = self.peek_kind()?;
        let tpl_len = self.sys.template(kind).len();
        let remaining = tpl_len - z;
        let steps = remaining.div_ceil(self.machine.beta);
        let len_before = self.word.len();
        for _ in 0..steps {
            if self.machine.step(&mut self.word) == BinStep::Halted {
                return Err(SimError::UnexpectedHalt {
                    step: self.tag_steps,
                });
            }
        }
        self.tag_steps += steps as u64;
        let appended_len = self.word.len() + steps * self.machine.beta - len_before;
        let exit = steps * self.machine.beta - remaining;
        debug_assert!(exit < self.machine.beta);
        self.actual_shift = exit;
        self.word.entry_shift = self.design_shift();
        Ok(SymbolRecord {
            kind,
            entry_shift: match self.sys.variant {
                Variant::Standard => z,
                Variant::PcpReady => (z + 1) % self.sys.params.beta,
            },
            symbols_read: steps,
            appended_len,
        })
    }

    /// Compares the block appended by the last `consume_object` against an
    /// expected expansion, without copying it out.
    pub fn tail_matches(&self, appended_len: usize, expected: &PackedWord) -> bool {
        appended_len == expected.len()
            && self
                .word
                .eq_range(self.word.len() - appended_len, expected, 0, appended_len)
    }

    /// Raw run: tag steps until halt or budget. Used for halting-variant
    /// collapses where the dataword stops being object-shaped.
    pub fn run_until_halt(&mut self, budget: u64) -> (u64, bool) {
        for step in 0..budget {
            if self.machine.step(&mut self.word) == BinStep::Halted {
                self.tag_steps += step;
                return (step, true);
            }
        }
        self.tag_steps += budget;
        (budget, self.word.len() < self.machine.beta)
    }

    pub fn decode_state(&self) -> Result<DecodedState, SimError> {
        decode_dataword_inner(self.sys, &self.word, self.actual_shift)
    }
}

fn candidates_for(variant: Variant) -> &'static [ObjKind] {
    match variant {
        Variant::Standard => &[ObjKind::One, ObjKind::Zero, ObjKind::Eps, ObjKind::EpsPrime],
        Variant::PcpReady => &[
            ObjKind::One,
            ObjKind::Zero,
            ObjKind::Eps,
            ObjKind::EpsPrime,
            ObjKind::OnePrime,
        ],
    }
}

/// A dataword parsed back into objects.
#[derive(Debug, Clone)]
pub struct DecodedState {
    pub objects: Vec<ObjKind>,
    /// Design-side entry shift of the leftmost (possibly partial) object.
    pub entry_shift: usize,
    /// Payload projection: the simulated cyclic dataword.
    pub payload: BinWord,
    pub eps_count: usize,
    pub epsprime_count: usize,
}

/// Parses a packed dataword into its object sequence. The dataword's
/// `entry_shift` annotation gives the design-side shift of the leftmost
/// object.
pub fn decode_dataword(
    sys: &CompiledSystem,
    word: &PackedDataword,
) -> Result<DecodedState, SimError> {
    let actual = match sys.variant {
        Variant::Standard => word.entry_shift,
        Variant::PcpReady => (word.entry_shift + sys.params.beta - 1) % sys.params.beta,
    };
    decode_dataword_inner(sys, word, actual)
}

fn decode_dataword_inner(
    sys: &CompiledSystem,
    word: &PackedDataword,
    actual_shift: usize,
) -> Result<DecodedState, SimError> {
    let candidates = candidates_for(sys.variant);
    let mut objects = Vec::new();
    let mut pos = 0usize;
    let mut offset = actual_shift;
    while pos < word.len() {
        let mut matched = None;
        for &kind in candidates {
            let tpl = sys.template(kind);
            if tpl.len() <= offset || word.len() - pos < tpl.len() - offset {
                continue;
            }
            if word.eq_range(pos, tpl, offset, tpl.len() - offset) {
                if matched.is_some() {
                    return Err(SimError::Decode {
                        offset: pos,
                        detail: "ambiguous object".into(),
                    });
                }
                matched = Some(kind);
            }
        }
        let kind = matched.ok_or_else(|| SimError::Decode {
            offset: pos,
            detail: "no object template matches".into(),
        })?;
        pos += sys.template(kind).len() - offset;
        offset = 0;
        objects.push(kind);
    }
    let payload = objects.iter().filter_map(|k| k.payload_bit()).collect();
    let eps_count = objects.iter().filter(|&&k| k == ObjKind::Eps).count();
    let epsprime_count = objects.iter().filter(|&&k| k == ObjKind::EpsPrime).count();
    let entry_shift = match sys.variant {
        Variant::Standard => actual_shift,
        Variant::PcpReady => (actual_shift + 1) % sys.params.beta,
    };
    Ok(DecodedState {
        objects,
        entry_shift,
        payload,
        eps_count,
        epsprime_count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Object,
    Symbol,
    Both,
}

/// Default cap on symbol-engine cyclic steps in `both` mode.
pub const DEFAULT_SYMBOL_CAP: u64 = 12;

#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub records: Vec<ObjectRecord>,
    /// Payload word after each simulated cyclic step.
    pub payload_after: Vec<BinWord>,
    pub steps_done: u64,
    pub status: StepStatus,
    pub object_tag_steps: u64,
    pub symbol_tag_steps: Option<u64>,
    /// Objects cross-checked between the engines.
    pub cross_checked: u64,
}

/// Runs the requested engine(s) for `cts_steps` simulated cyclic steps.
///
/// In `both` mode the engines run in lockstep and every consumed object is
/// compared: kind, design entry shift, symbols read, and the appended block
/// against the expansion of the appended kinds. The symbol engine stops at
/// `symbol_cap` cyclic steps; the object engine continues alone.
pub fn simulate(
    sys: &CompiledSystem,
    w: &[bool],
    cts_steps: u64,
    engine: Engine,
    symbol_cap: u64,
) -> Result<SimOutcome, SimError> {
    if sys.variant != Variant::Standard {
        return Err(SimError::NeedsStandard);
    }
    if engine == Engine::Symbol {
        return simulate_symbol_only(sys, w, cts_steps);
    }
    let mut object = ObjectEngine::new(sys, w, 0);
    let mut symbol = match engine {
        Engine::Object | Engine::Symbol => None,
        Engine::Both => Some(SymbolEngine::new(sys, w, 0)?),
    };
    let mut records = Vec::new();
    let mut payload_after = Vec::new();
    let mut status = StepStatus::Simulated;
    let mut steps_done = 0;
    let mut cross_checked = 0;

    for step in 0..cts_steps {
        let (step_records, step_status) = object.step_cyclic()?;
        if let Some(sym) = symbol.as_mut() {
            if step < symbol_cap {
                for rec in &step_records {
                    let srec = sym.consume_object()?;
                    check_record(sys, sym, rec, &srec)?;
                    cross_checked += 1;
                }
                if step_status == StepStatus::Simulated {
                    let decoded = sym.decode_state()?;
                    let obj_payload = object.remaining_payload();
                    if decoded.payload != obj_payload {
                        return Err(SimError::Divergence {
                            index: object.state.steps_elapsed,
                            detail: "payload projections disagree".into(),
                        });
                    }
                }
            }
        }
        records.extend(step_records);
        if step_status != StepStatus::Simulated {
            status = step_status;
            steps_done = step;
            break;
        }
        payload_after.push(object.remaining_payload());
        steps_done = step + 1;
    }
    Ok(SimOutcome {
        records,
        payload_after,
        steps_done,
        status,
        object_tag_steps: object.tag_steps,
        symbol_tag_steps: symbol.as_ref().map(|s| s.tag_steps),
        cross_checked,
    })
}

/// Symbol engine alone: objects are recognized, not predicted, and the
/// appended kinds in the records come from decoding.
fn simulate_symbol_only(
    sys: &CompiledSystem,
    w: &[bool],
    cts_steps: u64,
) -> Result<SimOutcome, SimError> {
    let table = sys.shift_table();
    let mut sym = SymbolEngine::new(sys, w, 0)?;
    let mut records = Vec::new();
    let mut payload_after = Vec::new();
    let mut status = StepStatus::Simulated;
    let mut steps_done = 0;
    let mut index = 0u64;
    'steps: for step in 0..cts_steps {
        // One cyclic step: a payload object plus the garbage run after it.
        loop {
            if sym.word.is_empty() {
                status = StepStatus::Completed;
                steps_done = step;
                break 'steps;
            }
            let (kind, _) = sym.peek_kind()?;
            let z = sym.design_shift();
            let (m, d) = shift_decode(&table, z)?;
            let halting = kind.payload_bit() == Some(true) && sys.halting_index == Some(m);
            let rec = sym.consume_object()?;
            records.push(ObjectRecord {
                index,
                kind: rec.kind,
                entry_shift: rec.entry_shift,
                m,
                d,
                appended: Vec::new(),
                symbols_read: rec.symbols_read,
                halting,
            });
            index += 1;
            if halting {
                status = StepStatus::HaltingTriggered;
                steps_done = step;
                break 'steps;
            }
            if kind.is_payload() {
                break;
            }
        }
        loop {
            if sym.word.is_empty() {
                break;
            }
            let (kind, _) = sym.peek_kind()?;
            if kind.is_payload() {
                break;
            }
            let z = sym.design_shift();
            let (m, d) = shift_decode(&table, z)?;
            let rec = sym.consume_object()?;
            records.push(ObjectRecord {
                index,
                kind: rec.kind,
                entry_shift: rec.entry_shift,
                m,
                d,
                appended: Vec::new(),
                symbols_read: rec.symbols_read,
                halting: false,
            });
            index += 1;
        }
        payload_after.push(sym.decode_state()?.payload);
        steps_done = step + 1;
    }
    let tag_steps = sym.tag_steps;
    Ok(SimOutcome {
        records,
        payload_after,
        steps_done,
        status,
        object_tag_steps: 0,
        symbol_tag_steps: Some(tag_steps),
        cross_checked: 0,
    })
}

fn check_record(
    sys: &CompiledSystem,
    sym: &SymbolEngine,
    obj: &ObjectRecord,
    srec: &SymbolRecord,
) -> Result<(), SimError> {
    if obj.kind != srec.kind {
        return Err(SimError::Divergence {
            index: obj.index,
            detail: format!(
                "object engine read <{}>, symbol engine read <{}>",
                obj.kind.label(),
                srec.kind.label()
            ),
        });
    }
    if obj.entry_shift != srec.entry_shift {
        return Err(SimError::Divergence {
            index: obj.index,
            detail: format!(
                "entry shifts disagree: {} vs {}",
                obj.entry_shift, srec.entry_shift
            ),
        });
    }
    if obj.symbols_read != srec.symbols_read {
        return Err(SimError::Divergence {
            index: obj.index,
            detail: format!(
                "symbols read disagree: {} vs {}",
                obj.symbols_read, srec.symbols_read
            ),
        });
    }
    if obj.halting {
        return Ok(());
    }
    let expected_len: usize = obj
        .appended
        .iter()
        .map(|&k| sys.params.object_len(k))
        .sum();
    let mut expected = PackedWord::with_capacity(expected_len);
    for &k in &obj.appended {
        expected.extend_from(sys.template(k));
    }
    if !sym.tail_matches(srec.appended_len, &expected) {
        return Err(SimError::Divergence {
            index: obj.index,
            detail: "appended expansions disagree".into(),
        });
    }
    Ok(())
}

/// One row of the growth table emitted by the complexity probe.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ProbeRow {
    pub step: u64,
    pub objects_total: usize,
    pub eps_count: usize,
    pub epsprime_count: usize,
    pub payload_count: usize,
    pub tag_steps_cum: u64,
    pub wall_micros: u128,
}

/// Runs the object engine for `t` cyclic steps, emitting per-step counters
/// for growth-law fitting.
pub fn complexity_probe(
    sys: &CompiledSystem,
    w: &[bool],
    t: u64,
) -> Result<Vec<ProbeRow>, SimError> {
    let mut engine = ObjectEngine::new(sys, w, 0);
    let start = Instant::now();
    let mut rows = Vec::with_capacity(t as usize);
    for step in 1..=t {
        let (_, st) = engine.step_cyclic()?;
        if st != StepStatus::Simulated {
            break;
        }
        let (eps, epsp) = engine.garbage_counts();
        let payload = engine.remaining_payload().len();
        rows.push(ProbeRow {
            step,
            objects_total: engine.state.objects.len(),
            eps_count: eps,
            epsprime_count: epsp,
            payload_count: payload,
            tag_steps_cum: engine.tag_steps,
            wall_micros: start.elapsed().as_micros(),
        });
    }
    Ok(rows)
}
