//! Cyclic tag systems: semantics, program replication, and the
//! single-1-input transformation.
//!
//! A cyclic tag system is a list of binary appendants with a rotating marker.
//! Reading a 1 appends the marked appendant, reading a 0 appends nothing, and
//! either way the marker advances. The computation completes when the dataword
//! is empty or a configuration repeats.

use std::collections::{HashSet, VecDeque};
use std::fmt;

pub type BinWord = Vec<bool>;

pub fn parse_binword(s: &str) -> Result<BinWord, CyclicError> {
    s.trim()
        .bytes()
        .enumerate()
        .map(|(i, b)| match b {
            b'0' => Ok(false),
            b'1' => Ok(true),
            _ => Err(CyclicError::Parse {
                line: 1,
                msg: format!("non-binary symbol at position {i}"),
            }),
        })
        .collect()
}

pub fn format_binword(w: &[bool]) -> String {
    w.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Debug, thiserror::Error)]
pub enum CyclicError {
    #[error("cyclic program parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("program must have at least one appendant")]
    EmptyProgram,
    #[error("replication count must be >= 1")]
    ZeroReplication,
    #[error("input word must be non-empty")]
    EmptyInput,
}

/// An ordered list of appendants over `{0,1}`; empty appendants are
/// first-class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicProgram {
    pub appendants: Vec<BinWord>,
}

impl CyclicProgram {
    pub fn new(appendants: Vec<BinWord>) -> Result<Self, CyclicError> {
        if appendants.is_empty() {
            return Err(CyclicError::EmptyProgram);
        }
        Ok(CyclicProgram { appendants })
    }

    pub fn len(&self) -> usize {
        self.appendants.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Length of the longest appendant.
    pub fn longest_appendant(&self) -> usize {
        self.appendants.iter().map(|a| a.len()).max().unwrap_or(0)
    }

    /// File format: one appendant per line over `{0,1}`, the literal token
    /// `e` for the empty word.
    pub fn parse(text: &str) -> Result<Self, CyclicError> {
        let mut appendants = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            if t == "e" {
                appendants.push(Vec::new());
            } else {
                appendants.push(parse_binword(t).map_err(|_| CyclicError::Parse {
                    line: i + 1,
                    msg: "appendants are words over {0,1} or `e`".into(),
                })?);
            }
        }
        CyclicProgram::new(appendants)
    }

    /// Moves the last appendant to the front.
    pub fn rotate_right(&self) -> CyclicProgram {
        let mut appendants = Vec::with_capacity(self.len());
        appendants.push(self.appendants[self.len() - 1].clone());
        appendants.extend_from_slice(&self.appendants[..self.len() - 1]);
        CyclicProgram { appendants }
    }
}

impl fmt::Display for CyclicProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.appendants {
            if a.is_empty() {
                writeln!(f, "e")?;
            } else {
                writeln!(f, "{}", format_binword(a))?;
            }
        }
        Ok(())
    }
}

/// Marker position plus dataword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicConfig {
    pub program: CyclicProgram,
    pub marker: usize,
    pub dataword: VecDeque<bool>,
}

impl CyclicConfig {
    pub fn new(program: CyclicProgram, input: &[bool]) -> Self {
        CyclicConfig {
            program,
            marker: 0,
            dataword: input.iter().copied().collect(),
        }
    }

    pub fn dataword_vec(&self) -> BinWord {
        self.dataword.iter().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CyclicStep {
    Stepped,
    /// The dataword was empty; the configuration is unchanged.
    Completed,
}

/// One computation step in place: delete the leading symbol, append the marked
/// appendant if it was a 1, advance the marker mod p.
pub fn cyclic_step(cfg: &mut CyclicConfig) -> CyclicStep {
    let Some(first) = cfg.dataword.pop_front() else {
        return CyclicStep::Completed;
    };
    if first {
        let appendant = &cfg.program.appendants[cfg.marker];
        cfg.dataword.extend(appendant.iter().copied());
    }
    cfg.marker = (cfg.marker + 1) % cfg.program.len();
    CyclicStep::Stepped
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Running,
    Empty,
    CycleDetected,
}

#[derive(Debug, Clone)]
pub struct CyclicRun {
    pub config: CyclicConfig,
    pub steps: usize,
    pub status: RunStatus,
    /// Dataword snapshots, one per executed step (snapshot taken after the
    /// step), when tracing is on.
    pub trace: Vec<(usize, BinWord)>,
}

pub const DEFAULT_CYCLE_WINDOW: usize = 10_000;

/// Iterates [`cyclic_step`] up to `max_steps`, detecting repeated
/// configurations within a bounded window of stored states.
pub fn cyclic_run(
    cfg: CyclicConfig,
    max_steps: usize,
    cycle_window: usize,
    trace: bool,
) -> CyclicRun {
    let mut cfg = cfg;
    let mut seen: HashSet<(usize, BinWord)> = HashSet::new();
    let mut order: VecDeque<(usize, BinWord)> = VecDeque::new();
    let mut steps = 0;
    let mut traced = Vec::new();
    if cycle_window > 0 {
        let key = (cfg.marker, cfg.dataword_vec());
        seen.insert(key.clone());
        order.push_back(key);
    }
    while steps < max_steps {
        match cyclic_step(&mut cfg) {
            CyclicStep::Completed => {
                return CyclicRun {
                    config: cfg,
                    steps,
                    status: RunStatus::Empty,
                    trace: traced,
                };
            }
            CyclicStep::Stepped => {
                steps += 1;
                if trace {
                    traced.push((cfg.marker, cfg.dataword_vec()));
                }
                if cfg.dataword.is_empty() {
                    return CyclicRun {
                        config: cfg,
                        steps,
                        status: RunStatus::Empty,
                        trace: traced,
                    };
                }
                if cycle_window > 0 {
                    let key = (cfg.marker, cfg.dataword_vec());
                    if seen.contains(&key) {
                        return CyclicRun {
                            config: cfg,
                            steps,
                            status: RunStatus::CycleDetected,
                            trace: traced,
                        };
                    }
                    seen.insert(key.clone());
                    order.push_back(key);
                    if order.len() > cycle_window {
                        let old = order.pop_front().unwrap();
                        seen.remove(&old);
                    }
                }
            }
        }
    }
    CyclicRun {
        config: cfg,
        steps,
        status: RunStatus::Running,
        trace: traced,
    }
}

/// `q` concatenated copies of the program; simulates the original step for
/// step on identical input.
pub fn replicate_program(c: &CyclicProgram, q: usize) -> Result<CyclicProgram, CyclicError> {
    if q == 0 {
        return Err(CyclicError::ZeroReplication);
    }
    let mut appendants = Vec::with_capacity(c.len() * q);
    for _ in 0..q {
        appendants.extend(c.appendants.iter().cloned());
    }
    CyclicProgram::new(appendants)
}

/// `<v>` for a binary word `v = v_1 .. v_m` is `v_1 0 v_2 0 .. v_m 0`.
pub fn encode_padded(v: &[bool]) -> BinWord {
    let mut out = Vec::with_capacity(2 * v.len());
    for &b in v {
        out.push(b);
        out.push(false);
    }
    out
}

/// The program `C_w` that takes a single 1 as input and simulates `C` on `w`:
/// `<w>, <a_0>, e, <a_1>, e, .., e, <a_{p-1}>`, with `<.>` the padded
/// encoding. Every second appendant is an encoded appendant and every second
/// dataword symbol is a payload symbol.
pub fn build_cw(c: &CyclicProgram, w: &[bool]) -> Result<CyclicProgram, CyclicError> {
    if w.is_empty() {
        return Err(CyclicError::EmptyInput);
    }
    let p = c.len();
    let mut appendants = Vec::with_capacity(2 * p);
    appendants.push(encode_padded(w));
    appendants.push(encode_padded(&c.appendants[0]));
    for alpha in &c.appendants[1..] {
        appendants.push(Vec::new());
        appendants.push(encode_padded(alpha));
    }
    CyclicProgram::new(appendants)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_program() -> CyclicProgram {
        CyclicProgram::parse("001\n01\n11\n").unwrap()
    }

    #[test]
    fn paper_example_first_step() {
        let mut cfg = CyclicConfig::new(paper_program(), &parse_binword("101").unwrap());
        assert_eq!(cyclic_step(&mut cfg), CyclicStep::Stepped);
        assert_eq!(cfg.marker, 1);
        assert_eq!(format_binword(&cfg.dataword_vec()), "01001");
    }

    #[test]
    fn paper_example_six_steps() {
        let expected = [
            (1, "01001"),
            (2, "1001"),
            (0, "00111"),
            (1, "0111"),
            (2, "111"),
            (0, "1111"),
        ];
        let mut cfg = CyclicConfig::new(paper_program(), &parse_binword("101").unwrap());
        for (marker, word) in expected {
            assert_eq!(cyclic_step(&mut cfg), CyclicStep::Stepped);
            assert_eq!(cfg.marker, marker);
            assert_eq!(format_binword(&cfg.dataword_vec()), word);
        }
    }

    #[test]
    fn zero_deletes_and_advances() {
        let mut cfg = CyclicConfig::new(paper_program(), &parse_binword("0").unwrap());
        assert_eq!(cyclic_step(&mut cfg), CyclicStep::Stepped);
        assert_eq!(cfg.marker, 1);
        assert!(cfg.dataword.is_empty());
    }

    #[test]
    fn run_statuses() {
        let cfg = CyclicConfig::new(paper_program(), &parse_binword("101").unwrap());
        let run = cyclic_run(cfg, 6, DEFAULT_CYCLE_WINDOW, false);
        assert_eq!(run.status, RunStatus::Running);
        assert_eq!(run.steps, 6);

        let empty = CyclicConfig::new(paper_program(), &[]);
        let run = cyclic_run(empty, 6, DEFAULT_CYCLE_WINDOW, false);
        assert_eq!(run.status, RunStatus::Empty);
        assert_eq!(run.steps, 0);

        // C = (1) on "1" is the fixed point "1" -> "1".
        let one = CyclicProgram::new(vec![vec![true]]).unwrap();
        let cfg = CyclicConfig::new(one, &[true]);
        let run = cyclic_run(cfg, 100, DEFAULT_CYCLE_WINDOW, false);
        assert_eq!(run.status, RunStatus::CycleDetected);
        assert_eq!(run.steps, 1);
    }

    #[test]
    fn replicate_matches_paper_and_simulates() {
        let c = paper_program();
        let c2 = replicate_program(&c, 2).unwrap();
        assert_eq!(
            c2,
            CyclicProgram::parse("001\n01\n11\n001\n01\n11\n").unwrap()
        );
        assert_eq!(replicate_program(&c, 1).unwrap(), c);

        let input = parse_binword("101").unwrap();
        let run_a = cyclic_run(CyclicConfig::new(c, &input), 6, 0, true);
        let run_b = cyclic_run(CyclicConfig::new(c2, &input), 6, 0, true);
        let words_a: Vec<_> = run_a.trace.iter().map(|(_, w)| w.clone()).collect();
        let words_b: Vec<_> = run_b.trace.iter().map(|(_, w)| w.clone()).collect();
        assert_eq!(words_a, words_b);
    }

    #[test]
    fn build_cw_interleaves_encoded_appendants() {
        let c = paper_program();
        let cw = build_cw(&c, &parse_binword("101").unwrap()).unwrap();
        let words: Vec<String> = cw
            .appendants
            .iter()
            .map(|a| {
                if a.is_empty() {
                    "e".into()
                } else {
                    format_binword(a)
                }
            })
            .collect();
        assert_eq!(words, vec!["100010", "000010", "e", "0010", "e", "1010"]);
        assert_eq!(cw.len(), 2 * c.len());
    }

    #[test]
    fn cw_first_step_appends_encoded_input() {
        let c = CyclicProgram::new(vec![vec![true]]).unwrap();
        let cw = build_cw(&c, &[true]).unwrap();
        let mut cfg = CyclicConfig::new(cw, &[true]);
        cyclic_step(&mut cfg);
        assert_eq!(format_binword(&cfg.dataword_vec()), "10");
    }

    /// Simulation invariance: `C` after `t` steps equals the even-position
    /// projection of `C_w` after `2t + 1` steps, and the markers correspond
    /// as `marker_Cw = 1 + 2 * marker_C mod 2p`.
    #[test]
    fn cw_projection_invariant() {
        let cases: Vec<(CyclicProgram, &str)> = vec![
            (paper_program(), "101"),
            (paper_program(), "1"),
            (paper_program(), "1101"),
            (
                CyclicProgram::new(vec![vec![true], vec![]]).unwrap(),
                "111",
            ),
            (
                CyclicProgram::parse("11\ne\n101\n0\n").unwrap(),
                "110",
            ),
        ];
        for (c, w) in cases {
            let w = parse_binword(w).unwrap();
            let p = c.len();
            let cw = build_cw(&c, &w).unwrap();
            for t in 0..=200usize {
                let direct = cyclic_run(CyclicConfig::new(c.clone(), &w), t, 0, false);
                if direct.steps < t {
                    break; // direct run completed
                }
                let sim = cyclic_run(CyclicConfig::new(cw.clone(), &[true]), 2 * t + 1, 0, false);
                assert_eq!(sim.steps, 2 * t + 1, "C_w completed early");
                let projected: BinWord = sim
                    .config
                    .dataword_vec()
                    .iter()
                    .step_by(2)
                    .copied()
                    .collect();
                assert_eq!(projected, direct.config.dataword_vec(), "t={t}");
                assert_eq!(
                    sim.config.marker,
                    (1 + 2 * direct.config.marker) % (2 * p),
                    "t={t}"
                );
            }
        }
    }

    /// Growth bound: one step never grows the dataword by more than
    /// max appendant length - 1.
    #[test]
    fn step_growth_bound() {
        let c = paper_program();
        let bound = c.longest_appendant() - 1;
        let mut cfg = CyclicConfig::new(c, &parse_binword("101").unwrap());
        for _ in 0..300 {
            let before = cfg.dataword.len();
            if cyclic_step(&mut cfg) == CyclicStep::Completed {
                break;
            }
            assert!(cfg.dataword.len() <= before + bound);
        }
    }
}
