//! The `bintag` command line: compile, verify-u, run-cts, simulate,
//! reduce-pcp, match-pcp, solve-pcp, bench.
//!
//! Exit codes: 0 ok, 2 parse error, 3 invariant violation, 4 divergence,
//! 5 budget exceeded.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::compiler::{self, CompileError, CompiledSystem};
use crate::cyclic::{self, CyclicConfig, CyclicProgram, RunStatus};
use crate::manifest::RunManifest;
use crate::pcp::{self, PcpError};
use crate::simulator::{self, Engine, SimError};
use crate::tagcore::TagSystem;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_DIVERGENCE: i32 = 4;
pub const EXIT_BUDGET: i32 = 5;

#[derive(Parser)]
#[command(name = "bintag")]
#[command(about = "Compile cyclic tag systems to binary tag systems and 4-pair PCP instances")]
#[command(version)]
struct Cli {
    /// Seed recorded in the run manifest (used by randomized suites).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Manifest path; defaults to `<output>.manifest.json` or
    /// `<command>.manifest.json`.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Object,
    Symbol,
    Both,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a cyclic tag program into a binary tag system.
    Compile {
        /// Program file: one appendant per line over {0,1}, `e` for empty.
        #[arg(long)]
        program: PathBuf,
        /// Install the halting variant for this appendant index.
        #[arg(long)]
        halting_index: Option<usize>,
        /// Build the PCP-ready variant T' (requires --input).
        #[arg(long)]
        pcp_ready: bool,
        /// Input word for the PCP-ready variant.
        #[arg(long)]
        input: Option<String>,
        /// Override the scale x (even, > 14, with r < x/2 - 7).
        #[arg(long)]
        x: Option<usize>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Re-run the track audits (no conflicts, track/appendant uniqueness,
    /// shift injectivity) on a compiled file.
    VerifyU { file: PathBuf },
    /// Run a cyclic tag system directly.
    RunCts {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        trace: bool,
        /// Stored-state window for cycle detection (0 disables).
        #[arg(long, default_value_t = cyclic::DEFAULT_CYCLE_WINDOW)]
        cycle_window: usize,
    },
    /// Simulate a compiled system for N cyclic steps.
    Simulate {
        #[arg(long)]
        compiled: PathBuf,
        /// Cyclic input word over {0,1}.
        #[arg(long)]
        input: String,
        #[arg(long)]
        steps: u64,
        #[arg(long, value_enum, default_value_t = EngineArg::Both)]
        engine: EngineArg,
        /// Per-object trace file (tab-separated).
        #[arg(long)]
        trace_out: Option<PathBuf>,
        /// Cyclic-step cap for the symbol engine in `both` mode.
        #[arg(long, default_value_t = simulator::DEFAULT_SYMBOL_CAP)]
        symbol_cap: u64,
    },
    /// Reduce a PCP-ready compiled system (or a toy tag system file) to a
    /// four-pair instance.
    ReducePcp {
        /// A compiled-system file, or a tag-system file with rules
        /// `b -> b` and `c -> W` (W ending in b).
        #[arg(long)]
        compiled: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Replay the tag computation as guided prefix matching, checking the
    /// surplus against the tag dataword after every step.
    MatchPcp {
        #[arg(long)]
        instance: PathBuf,
        /// Optional compiled/toy system to cross-validate beta and rule word.
        #[arg(long)]
        compiled: Option<PathBuf>,
        /// Tag-step budget.
        #[arg(long)]
        steps: u64,
    },
    /// Brute-force search for a solution on a raw-expandable instance.
    SolvePcp {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1 << 22)]
        node_budget: usize,
    },
    /// Run the growth-law probe and write a tab-separated table.
    Bench {
        #[arg(long)]
        compiled: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 50)]
        steps: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Pcp(#[from] PcpError),
    #[error(transparent)]
    Cyclic(#[from] crate::cyclic::CyclicError),
    #[error(transparent)]
    Tag(#[from] crate::tagcore::TagError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Compile(e) => match e {
                CompileError::FileFormat { .. }
                | CompileError::Io(_)
                | CompileError::Cyclic(_)
                | CompileError::UnsupportedArity { .. }
                | CompileError::InvalidX { .. }
                | CompileError::NoFeasibleX { .. }
                | CompileError::HaltingIndexOutOfRange { .. } => EXIT_PARSE,
                _ => EXIT_INVARIANT,
            },
            CliError::Sim(e) => match e {
                SimError::Divergence { .. } => EXIT_DIVERGENCE,
                SimError::Compile(c) => CliError::Compile(clone_compile_code(c)).exit_code(),
                _ => EXIT_INVARIANT,
            },
            CliError::Pcp(e) => match e {
                PcpError::Mismatch { .. } | PcpError::Bisim { .. } => EXIT_DIVERGENCE,
                PcpError::BudgetExceeded { .. } => EXIT_BUDGET,
                PcpError::FileFormat { .. }
                | PcpError::Io(_)
                | PcpError::EmptySequence
                | PcpError::IndexOutOfRange { .. } => EXIT_PARSE,
                _ => EXIT_INVARIANT,
            },
            CliError::Cyclic(_) | CliError::Tag(_) | CliError::Io(_) | CliError::Usage(_) => {
                EXIT_PARSE
            }
        }
    }
}

/// Exit-code classification needs only the variant, not the payload.
fn clone_compile_code(e: &CompileError) -> CompileError {
    match e {
        CompileError::FileFormat { line, msg } => CompileError::FileFormat {
            line: *line,
            msg: msg.clone(),
        },
        CompileError::UnsupportedArity { p } => CompileError::UnsupportedArity { p: *p },
        _ => CompileError::UMismatch,
    }
}

fn manifest_path(explicit: &Option<PathBuf>, out: Option<&Path>, cmd: &str) -> PathBuf {
    if let Some(p) = explicit {
        return p.clone();
    }
    match out {
        Some(o) => PathBuf::from(format!("{}.manifest.json", o.display())),
        None => PathBuf::from(format!("{cmd}.manifest.json")),
    }
}

fn load_compiled(path: &Path) -> Result<CompiledSystem, CliError> {
    Ok(compiler::read_compiled(File::open(path)?)?)
}

/// A "toy" system: a plain tag-system file with rules `b -> b`, `c -> W`.
fn load_toy_tag(path: &Path) -> Result<(usize, crate::bits::PackedWord), CliError> {
    let text = std::fs::read_to_string(path)?;
    let sys = TagSystem::parse(&text)?;
    let b_rule = sys.appendant(b'b')?;
    if b_rule != [b'b'] {
        return Err(CliError::Usage("toy systems need the rule b -> b".into()));
    }
    let c_rule = sys.appendant(b'c')?;
    let word = crate::bits::PackedWord::parse_symbols(
        &c_rule.iter().map(|&s| s as char).collect::<String>(),
    )
    .map_err(|_| CliError::Usage("rule word must be over {b,c}".into()))?;
    Ok((sys.beta(), word))
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Cmd::Compile {
            program,
            halting_index,
            pcp_ready,
            input,
            x,
            out,
        } => {
            let mut manifest = RunManifest::new("compile", cli.seed);
            manifest.add_input(&program)?;
            let base = CyclicProgram::parse(&std::fs::read_to_string(&program)?)?;
            let mut sys = if pcp_ready {
                let w = input.ok_or_else(|| {
                    CliError::Usage("--pcp-ready requires --input".into())
                })?;
                let w = cyclic::parse_binword(&w)?;
                compiler::build_pcp_ready(&base, &w, x)?
            } else {
                compiler::compile(&base, x)?
            };
            if let Some(h) = halting_index {
                sys = compiler::apply_halting_variant(&sys, h)?;
            }
            let mut f = File::create(&out)?;
            compiler::write_compiled(&sys, &mut f)?;
            manifest.set_parameters(json!({
                "x": sys.params.x,
                "beta": sys.params.beta,
                "q": sys.params.q,
                "p": sys.base_len,
                "variant": format!("{:?}", sys.variant),
                "halting_index": sys.halting_index,
            }));
            manifest.add_output(&out);
            manifest.write(&manifest_path(&cli.manifest, Some(&out), "compile"))?;
            println!(
                "compiled: x={} beta={} |u|={} ledger_entries={}",
                sys.params.x,
                sys.params.beta,
                sys.u.len(),
                sys.ledger.entries.len()
            );
            Ok(EXIT_OK)
        }
        Cmd::VerifyU { file } => {
            let mut manifest = RunManifest::new("verify-u", cli.seed);
            manifest.add_input(&file)?;
            let sys = load_compiled(&file)?;
            let report = compiler::verify_compiled(&sys)?;
            println!("conflicts: {}", report.conflicts);
            println!("ledger entries: {}", report.ledger_entries);
            println!("appendant tracks checked: {}", report.owned_tracks_checked);
            println!("distinct (m,d) shifts: {}", report.distinct_shifts);
            println!("tracks matching u: {}", report.tracks_matching_u);
            manifest.set_parameters(serde_json::to_value(&report).unwrap());
            manifest.write(&manifest_path(&cli.manifest, None, "verify-u"))?;
            Ok(EXIT_OK)
        }
        Cmd::RunCts {
            program,
            input,
            steps,
            trace,
            cycle_window,
        } => {
            let mut manifest = RunManifest::new("run-cts", cli.seed);
            manifest.add_input(&program)?;
            let prog = CyclicProgram::parse(&std::fs::read_to_string(&program)?)?;
            let word = cyclic::parse_binword(&input)?;
            let cfg = CyclicConfig::new(prog, &word);
            let run = cyclic::cyclic_run(cfg, steps, cycle_window, trace);
            if trace {
                for (i, (marker, w)) in run.trace.iter().enumerate() {
                    println!("{}\t{}\t{}", i + 1, marker, cyclic::format_binword(w));
                }
            }
            println!(
                "steps={} status={:?} marker={} dataword={}",
                run.steps,
                run.status,
                run.config.marker,
                cyclic::format_binword(&run.config.dataword_vec())
            );
            manifest.set_parameters(json!({
                "steps": run.steps,
                "status": format!("{:?}", run.status),
            }));
            manifest.write(&manifest_path(&cli.manifest, None, "run-cts"))?;
            Ok(match run.status {
                RunStatus::Running | RunStatus::Empty | RunStatus::CycleDetected => EXIT_OK,
            })
        }
        Cmd::Simulate {
            compiled,
            input,
            steps,
            engine,
            trace_out,
            symbol_cap,
        } => {
            let mut manifest = RunManifest::new("simulate", cli.seed);
            manifest.add_input(&compiled)?;
            let sys = load_compiled(&compiled)?;
            let word = cyclic::parse_binword(&input)?;
            let engine = match engine {
                EngineArg::Object => Engine::Object,
                EngineArg::Symbol => Engine::Symbol,
                EngineArg::Both => Engine::Both,
            };
            let outcome = simulator::simulate(&sys, &word, steps, engine, symbol_cap)?;
            if let Some(path) = &trace_out {
                write_trace(path, &outcome.records)?;
                manifest.add_output(path);
            }
            println!(
                "steps={} status={:?} objects_consumed={} cross_checked={} object_tag_steps={}{}",
                outcome.steps_done,
                outcome.status,
                outcome.records.len(),
                outcome.cross_checked,
                outcome.object_tag_steps,
                match outcome.symbol_tag_steps {
                    Some(t) => format!(" symbol_tag_steps={t}"),
                    None => String::new(),
                }
            );
            if let Some(last) = outcome.payload_after.last() {
                println!("payload={}", cyclic::format_binword(last));
            }
            manifest.set_parameters(json!({
                "steps": outcome.steps_done,
                "status": format!("{:?}", outcome.status),
                "cross_checked": outcome.cross_checked,
            }));
            manifest.write(&manifest_path(&cli.manifest, trace_out.as_deref(), "simulate"))?;
            Ok(EXIT_OK)
        }
        Cmd::ReducePcp { compiled, out } => {
            let mut manifest = RunManifest::new("reduce-pcp", cli.seed);
            manifest.add_input(&compiled)?;
            // A compiled file or a toy tag-system file.
            let head = std::fs::read_to_string(&compiled)?;
            let inst = if head.starts_with(compiler::FILE_HEADER) {
                let sys = load_compiled(&compiled)?;
                pcp::reduce_to_pcp(&sys)?
            } else {
                let (beta, rule) = load_toy_tag(&compiled)?;
                pcp::build_instance(beta, &rule)?
            };
            let mut f = File::create(&out)?;
            pcp::write_instance(&inst, &mut f)?;
            manifest.set_parameters(json!({ "beta": inst.beta, "pairs": inst.pairs.len() }));
            manifest.add_output(&out);
            manifest.write(&manifest_path(&cli.manifest, Some(&out), "reduce-pcp"))?;
            println!("pairs: {}", inst.pairs.len());
            Ok(EXIT_OK)
        }
        Cmd::MatchPcp {
            instance,
            compiled,
            steps,
        } => {
            let mut manifest = RunManifest::new("match-pcp", cli.seed);
            manifest.add_input(&instance)?;
            let inst = pcp::read_instance(File::open(&instance)?)?;
            if let Some(cpath) = &compiled {
                manifest.add_input(cpath)?;
                let head = std::fs::read_to_string(cpath)?;
                let (beta, rule) = if head.starts_with(compiler::FILE_HEADER) {
                    let sys = load_compiled(cpath)?;
                    (sys.params.beta, sys.rule_word.clone())
                } else {
                    load_toy_tag(cpath)?
                };
                if beta != inst.beta || rule != inst.rule {
                    return Err(CliError::Usage(
                        "instance does not match the given system".into(),
                    ));
                }
            }
            let report = pcp::match_replay(&inst, steps)?;
            manifest.set_parameters(json!({
                "tag_steps": report.tag_steps,
                "matched": report.matched,
                "bisim_checks": report.bisim_checks,
            }));
            manifest.write(&manifest_path(&cli.manifest, None, "match-pcp"))?;
            if report.matched {
                let ok = pcp::verify_solution(&inst, &report.indices)?;
                println!(
                    "MATCH at length {} (verified: {ok}), tag steps {}",
                    report.indices.len(),
                    report.tag_steps
                );
                if !ok {
                    return Err(CliError::Pcp(PcpError::Bisim {
                        step: report.tag_steps,
                        detail: "matched sequence failed verification".into(),
                    }));
                }
                Ok(EXIT_OK)
            } else {
                println!(
                    "NO MATCH within {} tag steps ({} bisimulation checks passed)",
                    report.tag_steps, report.bisim_checks
                );
                Ok(EXIT_BUDGET)
            }
        }
        Cmd::SolvePcp {
            instance,
            depth,
            node_budget,
        } => {
            let mut manifest = RunManifest::new("solve-pcp", cli.seed);
            manifest.add_input(&instance)?;
            let inst = pcp::read_instance(File::open(&instance)?)?;
            let raw = pcp::expand_instance(&inst)?;
            let solution = pcp::bfs_solve(&raw, depth, node_budget)?;
            manifest.set_parameters(json!({
                "depth": depth,
                "found": solution.is_some(),
            }));
            manifest.write(&manifest_path(&cli.manifest, None, "solve-pcp"))?;
            match solution {
                Some(seq) => {
                    let ok = pcp::verify_solution_raw(&raw, &seq)?;
                    println!(
                        "SOLUTION length {}: {:?} (verified: {ok})",
                        seq.len(),
                        seq
                    );
                    Ok(EXIT_OK)
                }
                None => {
                    println!("NO SOLUTION within depth {depth}");
                    Ok(EXIT_BUDGET)
                }
            }
        }
        Cmd::Bench {
            compiled,
            input,
            steps,
            out,
        } => {
            let mut manifest = RunManifest::new("bench", cli.seed);
            manifest.add_input(&compiled)?;
            let sys = load_compiled(&compiled)?;
            let word = cyclic::parse_binword(&input)?;
            let rows = simulator::complexity_probe(&sys, &word, steps)?;
            let mut f = File::create(&out)?;
            writeln!(
                f,
                "step\tobjects_total\teps\teps_prime\tpayload\ttag_steps_cum\twall_micros"
            )?;
            for r in &rows {
                writeln!(
                    f,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    r.step,
                    r.objects_total,
                    r.eps_count,
                    r.epsprime_count,
                    r.payload_count,
                    r.tag_steps_cum,
                    r.wall_micros
                )?;
            }
            manifest.add_output(&out);
            manifest.set_parameters(json!({ "steps": rows.len() }));
            manifest.write(&manifest_path(&cli.manifest, Some(&out), "bench"))?;
            println!("probe rows: {}", rows.len());
            Ok(EXIT_OK)
        }
    }
}

fn write_trace(path: &Path, records: &[simulator::ObjectRecord]) -> std::io::Result<()> {
    let mut f = File::create(path)?;
    writeln!(f, "step\tkind\tshift\tm\td\tappended\tsymbols_read")?;
    let mut step = 0u64;
    for rec in records {
        if rec.kind.is_payload() {
            step += 1;
        }
        let appended = compact_kinds(&rec.appended);
        writeln!(
            f,
            "{step}\t{}\t{}\t{}\t{}\t{appended}\t{}",
            rec.kind.label(),
            rec.entry_shift,
            rec.m,
            rec.d,
            rec.symbols_read
        )?;
    }
    Ok(())
}

/// Run-length rendering of an appended kind sequence, e.g. `1,e*16`.
fn compact_kinds(kinds: &[crate::compiler::ObjKind]) -> String {
    if kinds.is_empty() {
        return "-".into();
    }
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < kinds.len() {
        let mut j = i + 1;
        while j < kinds.len() && kinds[j] == kinds[i] {
            j += 1;
        }
        if j - i == 1 {
            parts.push(kinds[i].label().to_string());
        } else {
            parts.push(format!("{}*{}", kinds[i].label(), j - i));
        }
        i = j;
    }
    parts.join(",")
}
