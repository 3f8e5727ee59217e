//! The Post correspondence reduction.
//!
//! The halting problem for a binary tag system with rules `b -> b` and
//! `c -> u_1 .. u_l b` on input `u_beta .. u_l b` reduces to the four pairs
//!
//! ```text
//! P = { (1, 1 <u_1> .. <u_l> 1 0),  (1 0^beta 1, 1 1 0),  (1 0^beta, e),  (1, 0) }
//! ```
//!
//! with `<b> = 1 0^beta 1` and `<c> = 1`. A configuration's unmatched surplus
//! encodes the current dataword, ending in the sentinel `1 0^beta` that stands
//! for the dataword's final `b`. The guided matcher replays the tag
//! computation: pair 0 or 1 simulates the rule applied to the leading symbol,
//! pairs 2 and 3 simulate the remaining `beta - 1` deletions, and the halting
//! dataword (a single `b`) closes with pair 2 into an exact match.
//!
//! Pair words are token streams (literal runs plus a symbolic body referencing
//! the rule word), because the compiled pair-0 word has ~10^10 raw symbols;
//! raw expansion is reserved for toy instances.

use std::collections::{HashMap, VecDeque};
use std::io::{BufRead, BufReader, Read, Write};

use crate::bits::{PackedDataword, PackedWord};
use crate::compiler::{CompiledSystem, Variant};
use crate::tagcore::{BinStep, BinTagMachine};

#[derive(Debug, thiserror::Error)]
pub enum PcpError {
    #[error("the reduction needs the PCP-ready variant")]
    WrongVariant,
    #[error("the rule word must be non-empty and end in b")]
    RuleShape,
    #[error("pair {pair} does not match the surplus: {detail}")]
    Mismatch { pair: usize, detail: String },
    #[error("surplus is not a well-formed encoded dataword: {detail}")]
    MalformedSurplus { detail: String },
    #[error("a solution must be a non-empty index sequence")]
    EmptySequence,
    #[error("pair index {index} out of range")]
    IndexOutOfRange { index: usize },
    #[error("search budget exceeded ({nodes} configurations)")]
    BudgetExceeded { nodes: usize },
    #[error("instance too large to expand to raw words")]
    TooLargeToExpand,
    #[error("bisimulation broke at tag step {step}: {detail}")]
    Bisim { step: u64, detail: String },
    #[error("instance file format error on line {line}: {msg}")]
    FileFormat { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One token of a pair word or surplus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tok {
    Ones(usize),
    Zeros(usize),
    /// The encodings `<W[from]> <W[from+1]> .. <W[l-1]>` of the rule word's
    /// symbols, excluding its final `b`.
    Body { from: usize },
}

/// A four-pair instance over `{0,1}` with the rule word kept symbolic.
#[derive(Debug, Clone)]
pub struct PcpInstance {
    pub beta: usize,
    /// The full rule word `W = u_1 .. u_l b` (what `c` appends).
    pub rule: PackedWord,
    pub pairs: Vec<(Vec<Tok>, Vec<Tok>)>,
}

impl PcpInstance {
    /// Symbols `[0, enc_end)` of the rule word are encoded in pair 0.
    pub fn enc_end(&self) -> usize {
        self.rule.len() - 1
    }
}

/// Builds the four pairs for a tag system of the reducible two-rule shape.
pub fn build_instance(beta: usize, rule: &PackedWord) -> Result<PcpInstance, PcpError> {
    if rule.is_empty() || rule.get(rule.len() - 1) {
        return Err(PcpError::RuleShape);
    }
    let pairs = vec![
        (
            vec![Tok::Ones(1)],
            vec![Tok::Ones(1), Tok::Body { from: 0 }, Tok::Ones(1), Tok::Zeros(1)],
        ),
        (
            vec![Tok::Ones(1), Tok::Zeros(beta), Tok::Ones(1)],
            vec![Tok::Ones(2), Tok::Zeros(1)],
        ),
        (vec![Tok::Ones(1), Tok::Zeros(beta)], vec![]),
        (vec![Tok::Ones(1)], vec![Tok::Zeros(1)]),
    ];
    Ok(PcpInstance {
        beta,
        rule: rule.clone(),
        pairs,
    })
}

/// The four-pair reduction for a compiled PCP-ready system.
pub fn reduce_to_pcp(sys: &CompiledSystem) -> Result<PcpInstance, PcpError> {
    if sys.variant != Variant::PcpReady {
        return Err(PcpError::WrongVariant);
    }
    build_instance(sys.params.beta, &sys.rule_word)
}

/// The token surplus: the unmatched suffix of the v-concatenation.
#[derive(Debug, Clone, Default)]
pub struct TokStream {
    toks: VecDeque<Tok>,
}

impl TokStream {
    pub fn is_empty(&self) -> bool {
        self.toks.is_empty()
    }

    fn push_back(&mut self, tok: Tok) {
        match (self.toks.back_mut(), tok) {
            (_, Tok::Ones(0)) | (_, Tok::Zeros(0)) => {}
            (Some(Tok::Ones(a)), Tok::Ones(b)) => *a += b,
            (Some(Tok::Zeros(a)), Tok::Zeros(b)) => *a += b,
            (_, t) => self.toks.push_back(t),
        }
    }

    fn push_front(&mut self, tok: Tok) {
        match (self.toks.front_mut(), tok) {
            (Some(Tok::Ones(a)), Tok::Ones(b)) => *a += b,
            (Some(Tok::Zeros(a)), Tok::Zeros(b)) => *a += b,
            (_, t) => self.toks.push_front(t),
        }
    }

    /// Replaces a leading `Body` token by the tokens of its first encoded
    /// symbol, so the front becomes a literal run.
    fn expand_front(&mut self, inst: &PcpInstance) {
        while let Some(&Tok::Body { from }) = self.toks.front() {
            self.toks.pop_front();
            if from >= inst.enc_end() {
                continue;
            }
            if from + 1 < inst.enc_end() {
                self.toks.push_front(Tok::Body { from: from + 1 });
            }
            if inst.rule.get(from) {
                self.push_front(Tok::Ones(1)); // <c> = 1
            } else {
                // <b> = 1 0^beta 1
                self.push_front(Tok::Ones(1));
                self.push_front(Tok::Zeros(inst.beta));
                self.push_front(Tok::Ones(1));
            }
        }
    }

    fn consume_run(&mut self, inst: &PcpInstance, ones: bool, mut n: usize) -> Result<(), String> {
        while n > 0 {
            self.expand_front(inst);
            match self.toks.front_mut() {
                None => return Err("surplus exhausted".into()),
                Some(Tok::Ones(k)) if ones => {
                    if *k > n {
                        *k -= n;
                        n = 0;
                    } else {
                        n -= *k;
                        self.toks.pop_front();
                    }
                }
                Some(Tok::Zeros(k)) if !ones => {
                    if *k > n {
                        *k -= n;
                        n = 0;
                    } else {
                        n -= *k;
                        self.toks.pop_front();
                    }
                }
                Some(_) => {
                    return Err(format!(
                        "expected {}, surplus has {}",
                        if ones { "1" } else { "0" },
                        if ones { "0" } else { "1" }
                    ))
                }
            }
        }
        Ok(())
    }

    /// Consumes one r-word from the front.
    fn consume_pattern(&mut self, inst: &PcpInstance, pattern: &[Tok]) -> Result<(), String> {
        for tok in pattern {
            match *tok {
                Tok::Ones(n) => self.consume_run(inst, true, n)?,
                Tok::Zeros(n) => self.consume_run(inst, false, n)?,
                Tok::Body { .. } => unreachable!("r-words are literal"),
            }
        }
        Ok(())
    }

    fn append_pattern(&mut self, pattern: &[Tok]) {
        for &tok in pattern {
            self.push_back(tok);
        }
    }

    /// Fully expands to literal run tokens (symbol count stays linear).
    fn expanded_runs(&self, inst: &PcpInstance) -> Vec<(bool, usize)> {
        let mut runs: Vec<(bool, usize)> = Vec::new();
        let push = |bit: bool, n: usize, runs: &mut Vec<(bool, usize)>| {
            if n == 0 {
                return;
            }
            if let Some(last) = runs.last_mut() {
                if last.0 == bit {
                    last.1 += n;
                    return;
                }
            }
            runs.push((bit, n));
        };
        for tok in &self.toks {
            match *tok {
                Tok::Ones(n) => push(true, n, &mut runs),
                Tok::Zeros(n) => push(false, n, &mut runs),
                Tok::Body { from } => {
                    for i in from..inst.enc_end() {
                        if inst.rule.get(i) {
                            push(true, 1, &mut runs);
                        } else {
                            push(true, 1, &mut runs);
                            push(false, inst.beta, &mut runs);
                            push(true, 1, &mut runs);
                        }
                    }
                }
            }
        }
        runs
    }

    /// Decodes the surplus as an encoded dataword in configuration form:
    /// symbols `<b> = 1 0^beta 1`, `<c> = 1`, closed by the sentinel
    /// `1 0^beta` that encodes the trailing `b`.
    pub fn decode_dataword(&self, inst: &PcpInstance) -> Result<PackedWord, PcpError> {
        let runs = self.expanded_runs(inst);
        let malformed = |detail: &str| PcpError::MalformedSurplus {
            detail: detail.to_string(),
        };
        let mut word = PackedWord::new();
        let mut idx = 0;
        // Remainder of the current 1-run; a <b>'s closing 1 is taken off the
        // run that follows its 0-run.
        let mut ones_left = 0usize;
        loop {
            if ones_left == 0 {
                match runs.get(idx) {
                    Some(&(true, n)) => {
                        ones_left = n;
                        idx += 1;
                    }
                    Some(&(false, _)) => {
                        return Err(malformed("run of 0s at a symbol boundary"))
                    }
                    None => return Err(malformed("missing sentinel")),
                }
            }
            // All but the last 1 of the run are <c>.
            for _ in 0..ones_left - 1 {
                word.push(true);
            }
            match runs.get(idx) {
                Some(&(false, z)) if z == inst.beta => idx += 1,
                Some(&(false, _)) => return Err(malformed("0-run is not beta long")),
                Some(&(true, _)) => return Err(malformed("adjacent 1-runs")),
                None => return Err(malformed("dangling 1 without 0s")),
            }
            match runs.get(idx) {
                None => {
                    // Sentinel: the dataword's final b.
                    word.push(false);
                    return Ok(word);
                }
                Some(&(true, n)) => {
                    // Closing 1 of a <b>; the rest of the run starts the
                    // next symbol.
                    word.push(false);
                    ones_left = n - 1;
                    idx += 1;
                    if ones_left == 0 && idx >= runs.len() {
                        return Err(malformed("missing sentinel after <b>"));
                    }
                }
                Some(&(false, _)) => return Err(malformed("two adjacent 0-runs")),
            }
        }
    }
}

/// What the guided strategy sees at the front of the surplus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontSymbol {
    C,
    B,
    /// Exactly `1 0^beta` remains: the halting dataword `b`.
    SentinelOnly,
}

/// Matcher phase: either at a tag-step boundary or mid-deletion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    AtStep,
    Deleting { remaining: usize, mid_b: bool },
    Matched,
}

/// A prefix-matching configuration: chosen indices plus the unmatched
/// surplus of the v-concatenation.
#[derive(Debug, Clone)]
pub struct PcpConfig {
    pub indices: Vec<usize>,
    pub surplus: TokStream,
    pub phase: Phase,
    pub tag_steps: u64,
    /// The initial beta - 1 deletions reach the configuration form and do
    /// not count as a simulated tag step.
    bootstrapping: bool,
}

/// The forced first pair is pair 0: every other pair mismatches immediately
/// on an empty match.
pub fn initial_config(inst: &PcpInstance) -> PcpConfig {
    let mut surplus = TokStream::default();
    // v_0 minus r_0: pair 0 is (1, 1 <u_1>..<u_l> 1 0).
    surplus.append_pattern(&inst.pairs[0].1[1..]);
    PcpConfig {
        indices: vec![0],
        surplus,
        // The input dataword is u_beta .. u_l b: beta - 1 leading encoded
        // symbols must be deleted to reach the configuration form.
        phase: Phase::Deleting {
            remaining: inst.beta - 1,
            mid_b: false,
        },
        tag_steps: 0,
        bootstrapping: true,
    }
}

pub fn peek_front(cfg: &PcpConfig, inst: &PcpInstance) -> Result<FrontSymbol, PcpError> {
    let mut probe = cfg.surplus.clone();
    probe.expand_front(inst);
    let malformed = |detail: String| PcpError::MalformedSurplus { detail };
    match probe.toks.front() {
        None => Err(malformed("empty surplus".into())),
        Some(&Tok::Ones(n)) if n >= 2 => Ok(FrontSymbol::C),
        Some(&Tok::Ones(_)) => {
            match probe.toks.get(1) {
                // A Body token always starts with a 1, so the 1-run
                // continues: the front symbol is <c>.
                Some(&Tok::Body { .. }) => Ok(FrontSymbol::C),
                Some(&Tok::Zeros(z)) if z == inst.beta => {
                    // 1 0^beta followed by a closing 1 is <b>; alone it is
                    // the sentinel.
                    match probe.toks.get(2) {
                        None => Ok(FrontSymbol::SentinelOnly),
                        Some(&Tok::Ones(_)) | Some(&Tok::Body { .. }) => Ok(FrontSymbol::B),
                        Some(&Tok::Zeros(_)) => Err(malformed("adjacent 0-runs".into())),
                    }
                }
                Some(&Tok::Zeros(z)) => Err(malformed(format!("0-run of {z}, beta expected"))),
                Some(&Tok::Ones(_)) => Ok(FrontSymbol::C),
                None => Err(malformed("lone trailing 1".into())),
            }
        }
        Some(other) => Err(malformed(format!("front token {other:?}"))),
    }
}

/// Applies one pair to a configuration: consumes its r-word from the surplus
/// front and appends its v-word.
pub fn apply_pair(cfg: &mut PcpConfig, inst: &PcpInstance, pair: usize) -> Result<(), PcpError> {
    if pair >= inst.pairs.len() {
        return Err(PcpError::IndexOutOfRange { index: pair });
    }
    let (r, v) = &inst.pairs[pair];
    cfg.surplus
        .consume_pattern(inst, r)
        .map_err(|detail| PcpError::Mismatch { pair, detail })?;
    cfg.surplus.append_pattern(v);
    cfg.indices.push(pair);
    Ok(())
}

/// One deterministic matcher step: applies the unique pair that follows the
/// simulation. Returns the pair applied, or `None` once matched.
pub fn guided_match_step(
    cfg: &mut PcpConfig,
    inst: &PcpInstance,
) -> Result<Option<usize>, PcpError> {
    match cfg.phase {
        Phase::Matched => Ok(None),
        Phase::AtStep => match peek_front(cfg, inst)? {
            FrontSymbol::SentinelOnly => {
                apply_pair(cfg, inst, 2)?;
                if !cfg.surplus.is_empty() {
                    return Err(PcpError::MalformedSurplus {
                        detail: "sentinel close left residue".into(),
                    });
                }
                cfg.phase = Phase::Matched;
                Ok(Some(2))
            }
            FrontSymbol::C => {
                apply_pair(cfg, inst, 0)?;
                cfg.phase = Phase::Deleting {
                    remaining: inst.beta - 1,
                    mid_b: false,
                };
                Ok(Some(0))
            }
            FrontSymbol::B => {
                apply_pair(cfg, inst, 1)?;
                cfg.phase = Phase::Deleting {
                    remaining: inst.beta - 1,
                    mid_b: false,
                };
                Ok(Some(1))
            }
        },
        Phase::Deleting { remaining, mid_b } => {
            debug_assert!(remaining > 0);
            let pair = if mid_b {
                3
            } else {
                match peek_front(cfg, inst)? {
                    FrontSymbol::C => 3,
                    FrontSymbol::B => 2,
                    FrontSymbol::SentinelOnly => {
                        return Err(PcpError::MalformedSurplus {
                            detail: "dataword ran out mid-deletion".into(),
                        })
                    }
                }
            };
            if pair == 2 {
                apply_pair(cfg, inst, 2)?;
                cfg.phase = Phase::Deleting {
                    remaining,
                    mid_b: true,
                };
                return Ok(Some(2));
            }
            apply_pair(cfg, inst, 3)?;
            let remaining = remaining - 1;
            cfg.phase = if remaining == 0 {
                if cfg.bootstrapping {
                    cfg.bootstrapping = false;
                } else {
                    cfg.tag_steps += 1;
                }
                Phase::AtStep
            } else {
                Phase::Deleting {
                    remaining,
                    mid_b: false,
                }
            };
            Ok(Some(3))
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub tag_steps: u64,
    pub matched: bool,
    pub indices: Vec<usize>,
    pub bisim_checks: u64,
    pub final_dataword_len: usize,
}

/// Replays the tag computation through the matcher, decoding the surplus
/// after every simulated tag step and asserting it equals the machine's
/// dataword (and that the dataword length obeys `len = y (beta - 1) + 1`).
pub fn match_replay(inst: &PcpInstance, max_tag_steps: u64) -> Result<ReplayReport, PcpError> {
    let machine = BinTagMachine::new(
        inst.beta,
        PackedWord::from_bits([false]),
        inst.rule.clone(),
    );
    let mut input = PackedWord::with_capacity(inst.rule.len() - (inst.beta - 1));
    input.extend_from_range(&inst.rule, inst.beta - 1, inst.rule.len() - (inst.beta - 1));
    let mut word = PackedDataword::from_word(input, 0);

    let mut cfg = initial_config(inst);
    let mut bisim_checks = 0;

    // Drive to the first step boundary (the bootstrap deletions).
    while cfg.phase != Phase::AtStep {
        guided_match_step(&mut cfg, inst)?;
    }
    check_surplus(&cfg, inst, &word, bisim_checks)?;
    bisim_checks += 1;

    while cfg.tag_steps < max_tag_steps {
        if word.len() < inst.beta {
            // The tag system halted; the surplus must close exactly.
            let step = guided_match_step(&mut cfg, inst)?;
            if step != Some(2) || cfg.phase != Phase::Matched {
                return Err(PcpError::Bisim {
                    step: cfg.tag_steps,
                    detail: "halted dataword did not close into a match".into(),
                });
            }
            return Ok(ReplayReport {
                tag_steps: cfg.tag_steps,
                matched: true,
                indices: cfg.indices,
                bisim_checks,
                final_dataword_len: word.len(),
            });
        }
        let expected = word.get(0);
        let front = peek_front(&cfg, inst)?;
        let got = match front {
            FrontSymbol::C => true,
            FrontSymbol::B => false,
            FrontSymbol::SentinelOnly => {
                return Err(PcpError::Bisim {
                    step: cfg.tag_steps,
                    detail: "surplus closed while the tag system is running".into(),
                })
            }
        };
        if got != expected {
            return Err(PcpError::Bisim {
                step: cfg.tag_steps,
                detail: "front symbol disagrees with the tag dataword".into(),
            });
        }
        let before = cfg.tag_steps;
        while cfg.tag_steps == before && cfg.phase != Phase::Matched {
            guided_match_step(&mut cfg, inst)?;
        }
        if machine.step(&mut word) == BinStep::Halted {
            return Err(PcpError::Bisim {
                step: cfg.tag_steps,
                detail: "machine halted below beta mid-step".into(),
            });
        }
        check_surplus(&cfg, inst, &word, bisim_checks)?;
        bisim_checks += 1;
    }
    Ok(ReplayReport {
        tag_steps: cfg.tag_steps,
        matched: false,
        indices: cfg.indices,
        bisim_checks,
        final_dataword_len: word.len(),
    })
}

fn check_surplus(
    cfg: &PcpConfig,
    inst: &PcpInstance,
    word: &PackedDataword,
    step: u64,
) -> Result<(), PcpError> {
    let decoded = cfg.surplus.decode_dataword(inst)?;
    let actual = word.to_word();
    if decoded != actual {
        return Err(PcpError::Bisim {
            step,
            detail: format!(
                "decoded surplus ({} symbols) differs from the dataword ({} symbols)",
                decoded.len(),
                actual.len()
            ),
        });
    }
    // Length law: every reachable dataword length is y(beta-1)+1.
    if (decoded.len() + inst.beta - 2) % (inst.beta - 1) != 0 {
        return Err(PcpError::Bisim {
            step,
            detail: format!("dataword length {} breaks the y(beta-1)+1 law", decoded.len()),
        });
    }
    Ok(())
}

/// A raw-word instance for the brute-force solver.
#[derive(Debug, Clone)]
pub struct RawInstance {
    pub pairs: Vec<(Vec<bool>, Vec<bool>)>,
}

fn expand_toks(inst: &PcpInstance, toks: &[Tok]) -> Vec<bool> {
    let mut out = Vec::new();
    for tok in toks {
        match *tok {
            Tok::Ones(n) => out.extend(std::iter::repeat_n(true, n)),
            Tok::Zeros(n) => out.extend(std::iter::repeat_n(false, n)),
            Tok::Body { from } => {
                for i in from..inst.enc_end() {
                    if inst.rule.get(i) {
                        out.push(true);
                    } else {
                        out.push(true);
                        out.extend(std::iter::repeat_n(false, inst.beta));
                        out.push(true);
                    }
                }
            }
        }
    }
    out
}

/// Expands a symbolic instance to raw words. Permitted only at toy scale.
pub fn expand_instance(inst: &PcpInstance) -> Result<RawInstance, PcpError> {
    if inst.beta > 64 || inst.rule.len() > 1 << 16 {
        return Err(PcpError::TooLargeToExpand);
    }
    Ok(RawInstance {
        pairs: inst
            .pairs
            .iter()
            .map(|(r, v)| (expand_toks(inst, r), expand_toks(inst, v)))
            .collect(),
    })
}

/// Breadth-first search for a shortest solution within `max_depth`.
///
/// Configurations are (leading side, surplus); ties break deterministically
/// by pair index, so reruns return identical sequences.
pub fn bfs_solve(
    inst: &RawInstance,
    max_depth: usize,
    node_budget: usize,
) -> Result<Option<Vec<usize>>, PcpError> {
    #[derive(Clone, PartialEq, Eq, Hash)]
    struct Node {
        v_leads: bool,
        surplus: Vec<bool>,
    }
    // (node, parent arena index, pair chosen)
    let mut arena: Vec<(Node, usize, usize)> = Vec::new();
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new(); // (arena idx, depth)
    let mut seen: HashMap<Node, ()> = HashMap::new();

    let extend = |v_leads: bool, surplus: &[bool], r: &[bool], v: &[bool]| -> Option<Node> {
        // The side that lags must match the leader's surplus first.
        let (lag, lead_ext) = if v_leads { (r, v) } else { (v, r) };
        let mut lead: Vec<bool> = surplus.to_vec();
        lead.extend_from_slice(lead_ext);
        let n = lag.len().min(lead.len());
        if lag[..n] != lead[..n] {
            return None;
        }
        if lag.len() <= lead.len() {
            Some(Node {
                v_leads,
                surplus: lead[lag.len()..].to_vec(),
            })
        } else {
            Some(Node {
                v_leads: !v_leads,
                surplus: lag[lead.len()..].to_vec(),
            })
        }
    };

    for (i, (r, v)) in inst.pairs.iter().enumerate() {
        if let Some(node) = extend(true, &[], r, v) {
            if node.surplus.is_empty() {
                return Ok(Some(vec![i]));
            }
            if seen.insert(node.clone(), ()).is_none() {
                arena.push((node, usize::MAX, i));
                queue.push_back((arena.len() - 1, 1));
            }
        }
    }

    while let Some((idx, depth)) = queue.pop_front() {
        if arena.len() > node_budget {
            return Err(PcpError::BudgetExceeded { nodes: arena.len() });
        }
        if depth >= max_depth {
            continue;
        }
        let (node, _, _) = arena[idx].clone();
        for (i, (r, v)) in inst.pairs.iter().enumerate() {
            let base_leads = node.v_leads;
            if let Some(next) = extend(base_leads, &node.surplus, r, v) {
                if next.surplus.is_empty() {
                    // Exact match: reconstruct the index sequence.
                    let mut seq = vec![i];
                    let mut cur = idx;
                    while cur != usize::MAX {
                        seq.push(arena[cur].2);
                        cur = arena[cur].1;
                    }
                    seq.reverse();
                    return Ok(Some(seq));
                }
                if seen.insert(next.clone(), ()).is_none() {
                    arena.push((next, idx, i));
                    queue.push_back((arena.len() - 1, depth + 1));
                }
            }
        }
    }
    Ok(None)
}

/// Checks `r_{i_1} .. r_{i_l} = v_{i_1} .. v_{i_l}` on raw words.
pub fn verify_solution_raw(inst: &RawInstance, indices: &[usize]) -> Result<bool, PcpError> {
    if indices.is_empty() {
        return Err(PcpError::EmptySequence);
    }
    let mut r = Vec::new();
    let mut v = Vec::new();
    for &i in indices {
        let (ri, vi) = inst.pairs.get(i).ok_or(PcpError::IndexOutOfRange { index: i })?;
        r.extend_from_slice(ri);
        v.extend_from_slice(vi);
    }
    Ok(r == v)
}

/// Token-aware verification: compares the two concatenations as canonical
/// run streams without expanding the symbolic body.
pub fn verify_solution(inst: &PcpInstance, indices: &[usize]) -> Result<bool, PcpError> {
    if indices.is_empty() {
        return Err(PcpError::EmptySequence);
    }
    let mut r = TokStream::default();
    let mut v = TokStream::default();
    for &i in indices {
        let (ri, vi) = inst.pairs.get(i).ok_or(PcpError::IndexOutOfRange { index: i })?;
        r.append_pattern(ri);
        v.append_pattern(vi);
    }
    Ok(r.expanded_runs(inst) == v.expanded_runs(inst))
}

pub const INSTANCE_HEADER: &str = "# bintag pcp instance v1";

/// Writes the instance file: `beta`, the rule word, then one `r TAB v` line
/// per pair with runs in the `(0^N)` syntax and the symbolic `<body>` token.
pub fn write_instance<W: Write>(inst: &PcpInstance, out: &mut W) -> Result<(), PcpError> {
    writeln!(out, "{INSTANCE_HEADER}")?;
    writeln!(out, "beta={}", inst.beta)?;
    writeln!(out, "rule={}", inst.rule.to_rle_bc())?;
    writeln!(out, "pairs:")?;
    for (r, v) in &inst.pairs {
        writeln!(out, "{}\t{}", format_toks(r), format_toks(v))?;
    }
    writeln!(out, "end")?;
    Ok(())
}

fn format_toks(toks: &[Tok]) -> String {
    if toks.is_empty() {
        return "e".into();
    }
    let mut s = String::new();
    for tok in toks {
        match *tok {
            Tok::Ones(n) if n <= 8 => s.extend(std::iter::repeat_n('1', n)),
            Tok::Ones(n) => s.push_str(&format!("(1^{n})")),
            Tok::Zeros(n) if n <= 8 => s.extend(std::iter::repeat_n('0', n)),
            Tok::Zeros(n) => s.push_str(&format!("(0^{n})")),
            Tok::Body { from: 0 } => s.push_str("<body>"),
            Tok::Body { from } => s.push_str(&format!("<body@{from}>")),
        }
    }
    s
}

fn parse_toks(s: &str, line: usize) -> Result<Vec<Tok>, PcpError> {
    let fail = |msg: &str| PcpError::FileFormat {
        line,
        msg: msg.to_string(),
    };
    if s == "e" {
        return Ok(Vec::new());
    }
    let bytes = s.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'0' => {
                toks.push(Tok::Zeros(1));
                i += 1;
            }
            b'1' => {
                toks.push(Tok::Ones(1));
                i += 1;
            }
            b'(' => {
                let close = s[i..].find(')').ok_or_else(|| fail("unclosed run"))? + i;
                let body = &s[i + 1..close];
                let (bit, count) = body.split_once('^').ok_or_else(|| fail("bad run"))?;
                let n: usize = count.parse().map_err(|_| fail("bad run count"))?;
                match bit {
                    "0" => toks.push(Tok::Zeros(n)),
                    "1" => toks.push(Tok::Ones(n)),
                    _ => return Err(fail("runs are over 0/1")),
                }
                i = close + 1;
            }
            b'<' => {
                let close = s[i..].find('>').ok_or_else(|| fail("unclosed token"))? + i;
                let body = &s[i + 1..close];
                let from = if body == "body" {
                    0
                } else if let Some(rest) = body.strip_prefix("body@") {
                    rest.parse().map_err(|_| fail("bad body offset"))?
                } else {
                    return Err(fail("unknown token"));
                };
                toks.push(Tok::Body { from });
                i = close + 1;
            }
            _ => return Err(fail("unexpected character")),
        }
    }
    // Canonicalize adjacent runs.
    let mut canon: Vec<Tok> = Vec::new();
    for tok in toks {
        match (canon.last_mut(), tok) {
            (Some(Tok::Ones(a)), Tok::Ones(b)) => *a += b,
            (Some(Tok::Zeros(a)), Tok::Zeros(b)) => *a += b,
            (_, t) => canon.push(t),
        }
    }
    Ok(canon)
}

pub fn read_instance<R: Read>(input: R) -> Result<PcpInstance, PcpError> {
    let reader = BufReader::new(input);
    let mut lines = reader.lines().enumerate();
    let mut next = || -> Result<(usize, String), PcpError> {
        lines
            .next()
            .ok_or_else(|| PcpError::FileFormat {
                line: 0,
                msg: "unexpected end of file".into(),
            })
            .and_then(|(n, l)| Ok((n + 1, l?)))
    };
    let (ln, header) = next()?;
    if header.trim() != INSTANCE_HEADER {
        return Err(PcpError::FileFormat {
            line: ln,
            msg: "not a bintag pcp instance".into(),
        });
    }
    let (ln, beta_line) = next()?;
    let beta: usize = beta_line
        .trim()
        .strip_prefix("beta=")
        .and_then(|v| v.parse().ok())
        .ok_or(PcpError::FileFormat {
            line: ln,
            msg: "expected beta=N".into(),
        })?;
    let (ln, rule_line) = next()?;
    let rule = rule_line
        .trim()
        .strip_prefix("rule=")
        .and_then(|v| PackedWord::parse_rle_bc(v).ok())
        .ok_or(PcpError::FileFormat {
            line: ln,
            msg: "expected rule=<rle>".into(),
        })?;
    let (ln, tag) = next()?;
    if tag.trim() != "pairs:" {
        return Err(PcpError::FileFormat {
            line: ln,
            msg: "expected pairs:".into(),
        });
    }
    let mut pairs = Vec::new();
    loop {
        let (ln, line) = next()?;
        let line = line.trim();
        if line == "end" {
            break;
        }
        let (r, v) = line.split_once('\t').ok_or(PcpError::FileFormat {
            line: ln,
            msg: "expected r TAB v".into(),
        })?;
        pairs.push((parse_toks(r.trim(), ln)?, parse_toks(v.trim(), ln)?));
    }
    if pairs.len() != 4 {
        return Err(PcpError::FileFormat {
            line: 0,
            msg: format!("expected 4 pairs, found {}", pairs.len()),
        });
    }
    Ok(PcpInstance { beta, rule, pairs })
}
