//! Compiled-system file format: a header with all parameters, the source
//! program, `u` as a run-length-encoded `{b,c}` string, and the ledger as
//! (shift, content, provenance-row) triples.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use crate::bits::PackedWord;
use crate::cyclic::{format_binword, parse_binword, CyclicProgram};

use super::ledger::{Provenance, TrackEntry, TrackLedger};
use super::template::ObjKind;
use super::{select_params, CompileError, CompiledSystem, Variant};

pub const FILE_HEADER: &str = "# bintag compiled system v1";

pub fn write_compiled<W: Write>(sys: &CompiledSystem, out: &mut W) -> Result<(), CompileError> {
    writeln!(out, "{FILE_HEADER}")?;
    writeln!(
        out,
        "variant={}",
        match sys.variant {
            Variant::Standard => "standard",
            Variant::PcpReady => "pcp-ready",
        }
    )?;
    let p = &sys.params;
    writeln!(out, "x={}", p.x)?;
    writeln!(out, "p={}", sys.base_len)?;
    writeln!(out, "q={}", p.q)?;
    writeln!(out, "r={}", p.r)?;
    writeln!(out, "z1={}", p.z1)?;
    writeln!(out, "z2={}", p.z2)?;
    writeln!(out, "beta={}", p.beta)?;
    match sys.halting_index {
        Some(h) => writeln!(out, "halting_index={h}")?,
        None => writeln!(out, "halting_index=none")?,
    }
    writeln!(out, "source:")?;
    for a in &sys.source.appendants {
        if a.is_empty() {
            writeln!(out, "e")?;
        } else {
            writeln!(out, "{}", format_binword(a))?;
        }
    }
    writeln!(out, "u:")?;
    writeln!(out, "{}", sys.u.to_rle_bc())?;
    writeln!(out, "ledger:")?;
    for (&shift, entry) in &sys.ledger.entries {
        let prov = &entry.assignments[0];
        let content = PackedWord::from_bits(entry.content.iter().copied());
        writeln!(
            out,
            "{shift}\t{}\t{}\t{}\t{}\t{}\t{}",
            content.to_rle_bc(),
            prov.row,
            prov.object.label(),
            prov.entry_shift,
            prov.slot,
            entry.assignments.len()
        )?;
    }
    writeln!(out, "end")?;
    Ok(())
}

fn fail(line: usize, msg: impl Into<String>) -> CompileError {
    CompileError::FileFormat {
        line,
        msg: msg.into(),
    }
}

pub fn read_compiled<R: Read>(input: R) -> Result<CompiledSystem, CompileError> {
    let reader = BufReader::new(input);
    let mut lines = reader.lines().enumerate();
    let mut next = || -> Result<(usize, String), CompileError> {
        lines
            .next()
            .ok_or_else(|| fail(0, "unexpected end of file"))
            .and_then(|(n, l)| Ok((n + 1, l?)))
    };

    let (ln, header) = next()?;
    if header.trim() != FILE_HEADER {
        return Err(fail(ln, "not a bintag compiled system file"));
    }
    let mut fields: BTreeMap<String, String> = BTreeMap::new();
    loop {
        let (ln, line) = next()?;
        let line = line.trim().to_string();
        if line == "source:" {
            break;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| fail(ln, "expected key=value"))?;
        fields.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| -> Result<&String, CompileError> {
        fields.get(k).ok_or_else(|| fail(0, format!("missing field {k}")))
    };
    let num = |k: &str| -> Result<usize, CompileError> {
        get(k)?
            .parse()
            .map_err(|_| fail(0, format!("field {k} is not a number")))
    };
    let variant = match get("variant")?.as_str() {
        "standard" => Variant::Standard,
        "pcp-ready" => Variant::PcpReady,
        other => return Err(fail(0, format!("unknown variant {other}"))),
    };
    let x = num("x")?;
    let base_len = num("p")?;
    let q = num("q")?;
    let r = num("r")?;
    let halting_index = match get("halting_index")?.as_str() {
        "none" => None,
        v => Some(v.parse().map_err(|_| fail(0, "bad halting_index"))?),
    };

    let params = select_params(
        {
            // select_params validates p | 3x - 2 against the base length;
            // reconstruct p from q to keep one validation path.
            let p_prime = 3 * x - 2;
            if q == 0 || p_prime % q != 0 {
                return Err(fail(0, "inconsistent q"));
            }
            p_prime / q
        },
        r,
        Some(x),
    )?;
    if params.z1 != num("z1")? || params.z2 != num("z2")? || params.beta != num("beta")? {
        return Err(fail(0, "stored parameters disagree with the x identities"));
    }
    if params.p_prime / params.q != base_len {
        return Err(fail(0, "stored p disagrees with q"));
    }

    let mut appendants = Vec::with_capacity(params.p_prime);
    for _ in 0..params.p_prime {
        let (ln, line) = next()?;
        let t = line.trim();
        if t == "e" {
            appendants.push(Vec::new());
        } else {
            appendants.push(parse_binword(t).map_err(|_| fail(ln, "bad appendant"))?);
        }
    }
    let source = CyclicProgram::new(appendants)?;

    let (ln, u_tag) = next()?;
    if u_tag.trim() != "u:" {
        return Err(fail(ln, "expected `u:`"));
    }
    let (ln, u_line) = next()?;
    let u = PackedWord::parse_rle_bc(u_line.trim()).map_err(|_| fail(ln, "bad u encoding"))?;
    if u.len() != params.u_len() {
        return Err(fail(ln, "u has the wrong length"));
    }

    let (ln, ledger_tag) = next()?;
    if ledger_tag.trim() != "ledger:" {
        return Err(fail(ln, "expected `ledger:`"));
    }
    let mut ledger = TrackLedger::new();
    loop {
        let (ln, line) = next()?;
        let line = line.trim();
        if line == "end" {
            break;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 7 {
            return Err(fail(ln, "ledger rows have 7 tab-separated fields"));
        }
        let shift: usize = parts[0].parse().map_err(|_| fail(ln, "bad shift"))?;
        let content = PackedWord::parse_rle_bc(parts[1])
            .map_err(|_| fail(ln, "bad content encoding"))?;
        let object =
            ObjKind::parse_label(parts[3]).ok_or_else(|| fail(ln, "bad object label"))?;
        let entry_shift: usize = parts[4].parse().map_err(|_| fail(ln, "bad entry shift"))?;
        let slot: usize = parts[5].parse().map_err(|_| fail(ln, "bad slot"))?;
        let row = intern_row(parts[2]).ok_or_else(|| fail(ln, "unknown row label"))?;
        ledger.entries.insert(
            shift,
            TrackEntry {
                content: content.iter().collect(),
                assignments: vec![Provenance {
                    object,
                    entry_shift,
                    slot,
                    row,
                }],
            },
        );
    }

    let sys = CompiledSystem::assemble(params, base_len, source, ledger, variant, halting_index)?;
    if sys.u != u {
        return Err(CompileError::UMismatch);
    }
    Ok(sys)
}

/// Row labels are a fixed vocabulary; files map back onto the static strs.
fn intern_row(row: &str) -> Option<&'static str> {
    const ROWS: [&str; 46] = [
        "T2R1", "T2R2", "T2R3", "T2R4", "T2R5", "T2R6", "T2R7", "T2R8", "T2R9", "T2R10", "T2R11",
        "T2R12", "T2R13", "T2R14", "T2R15", "T2R16", "T2R17", "T2R18", "T2R19", "T2R20", "T2R21",
        "T3R1", "T3R2", "T3R3", "T3R4", "T3R5", "T3R6", "T3R7", "T3R8", "T3R9", "T3R10", "T3R11",
        "T3R12", "T4R1", "T4R2", "T4R3", "T4R4", "T4R5", "T4R6", "T4R7", "T4R8", "T4R9", "T4R10",
        "T4R11", "BOOT", "HALT",
    ];
    ROWS.iter().find(|&&r| r == row).copied()
}
