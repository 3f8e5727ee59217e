//! The PCP-ready variant `T'`.
//!
//! Track 0 of `u` is never read by the standard simulation (every in-object
//! track shift avoids residue 0 mod x), so it is free to hold a bootstrap: a
//! track whose tail appends `<1>'`, the `<1>` object with one `u` removed from
//! its central run. The rule word becomes `u' = u` minus its first symbol plus
//! a trailing `b`, and the designated input `u_beta .. u_l b` reads exactly
//! that tail, appending `<1>'` entered with shift `3x - 1`. Since every track
//! of `u` sits one symbol to the left in `u'`, the whole simulation runs at
//! shifts one below the design values, and the never-read all-`b` fill lands
//! on the even `u'`-tracks.
//!
//! The simulated program is the single-1-input form of the user's program
//! with the input re-encoded as `0w` (one marker advance to absorb the
//! bootstrap's garbage-like shift change) and the appendant list rotated one
//! place to the right.

use crate::cyclic::{build_cw, replicate_program, CyclicProgram};

use super::build::{assemble_ledger, shift_table};
use super::ledger::{Provenance, TrackLedger};
use super::params::Params;
use super::template::{read_pattern, ObjKind, PatternForm};
use super::{select_params, CompileError, CompiledSystem, Variant};

/// Installs the bootstrap track: content `b` + the `<1>'` read pattern, so
/// that the tail `u_beta u_{2 beta} .. u_{3x beta}` appends `<1>'`.
pub(super) fn install_bootstrap_track(
    ledger: &mut TrackLedger,
    params: &Params,
) -> Result<(), CompileError> {
    if ledger.entries.contains_key(&0) {
        return Err(CompileError::Track0Assigned);
    }
    let mut content = vec![false];
    content.extend(read_pattern(ObjKind::OnePrime, params.x, PatternForm::Full));
    debug_assert_eq!(content.len(), 3 * params.x + 1);
    ledger.replace(
        0,
        content,
        Provenance {
            object: ObjKind::OnePrime,
            entry_shift: 0,
            slot: 0,
            row: "BOOT",
        },
    );
    Ok(())
}

/// The bootstrap `<1>'` is read exactly once, entered with design shift `3x`
/// (m = 1, d = 3x). All its slot tracks must already carry the right content:
/// the appendant-encoding tracks of z = 3x, then `<e>`-appending tracks.
fn audit_bootstrap(sys: &CompiledSystem) -> Result<(), CompileError> {
    let params = &sys.params;
    let z = 3 * params.x;
    let walk = super::schedule::walk_object(ObjKind::OnePrime, params, z)?;
    let table = sys.shift_table();
    let (m, _) = table.decode(z).expect("3x is in the shift set");
    let alpha = &sys.source.appendants[m];
    let targets =
        super::build::target_sequence(ObjKind::OnePrime, params.x, Some(alpha), walk.low_case, walk.short_slot);
    let mut slot_idx = 0;
    for atom in &walk.atoms {
        if let super::schedule::ReadAtom::Slot(s) = atom {
            let entry = sys.ledger.entries.get(&s.track).ok_or_else(|| {
                CompileError::TrackOwnership {
                    shift: s.track,
                    detail: "bootstrap slot reads an unassigned track".into(),
                }
            })?;
            let expect = read_pattern(targets[slot_idx], params.x, PatternForm::Full);
            if entry.content != expect {
                return Err(CompileError::TrackOwnership {
                    shift: s.track,
                    detail: format!(
                        "bootstrap slot {slot_idx} expects <{}>",
                        targets[slot_idx].label()
                    ),
                });
            }
            slot_idx += 1;
        }
    }
    Ok(())
}

/// Compiles the PCP-ready variant `T'` for a base program and input word.
///
/// The base program must have `p = 3k + 1` appendants so the single-1-input
/// transformation yields `2p = 3k' + 2`.
pub fn build_pcp_ready(
    base: &CyclicProgram,
    input: &[bool],
    x_override: Option<usize>,
) -> Result<CompiledSystem, CompileError> {
    let mut cw = build_cw(base, input)?;
    // Encode 0w: one extra marker advance before the payload stream.
    cw.appendants[0].insert(0, false);
    let rotated = cw.rotate_right();
    let params = select_params(rotated.len(), rotated.longest_appendant(), x_override)?;
    let source = replicate_program(&rotated, params.q)?;
    let table = shift_table(&params);
    let mut ledger = assemble_ledger(&source, &params, &table, None)?;
    install_bootstrap_track(&mut ledger, &params)?;
    let sys = CompiledSystem::assemble(
        params,
        rotated.len(),
        source,
        ledger,
        Variant::PcpReady,
        None,
    )?;
    audit_bootstrap(&sys)?;
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tagcore::shift_change_of_len;

    fn toy_pcp_system() -> CompiledSystem {
        // p = 1 base program; 2p = 2 appendants = 3*0 + 2.
        let base = CyclicProgram::parse("1\n").unwrap();
        build_pcp_ready(&base, &[true], None).unwrap()
    }

    #[test]
    fn u_prime_invariants() {
        let sys = toy_pcp_system();
        let (u, up) = (&sys.u, &sys.rule_word);
        assert_eq!(u.len(), up.len());
        // u' is u shifted one left with a trailing b.
        assert!(up.eq_range(0, u, 1, u.len() - 1) || u.len() == 0);
        assert!(!up.get(up.len() - 1));
    }

    #[test]
    fn input_word_length_and_shift_change() {
        let sys = toy_pcp_system();
        let input = sys.pcp_input_word().unwrap();
        let (x, beta) = (sys.params.x, sys.params.beta);
        assert_eq!(input.len(), sys.u.len() - beta + 1);
        assert_eq!(input.len(), 3 * x * (beta - 1) + 1);
        assert_eq!(shift_change_of_len(input.len(), beta), 3 * x - 1);
    }

    #[test]
    fn one_prime_has_one_fewer_slot() {
        let sys = toy_pcp_system();
        assert_eq!(
            sys.params.slots(ObjKind::OnePrime) + 1,
            sys.params.slots(ObjKind::One)
        );
        assert_eq!(
            sys.template(ObjKind::OnePrime).len() + sys.u.len(),
            sys.template(ObjKind::One).len()
        );
    }

    #[test]
    fn source_program_is_rotated_zero_w() {
        let base = CyclicProgram::parse("1\n").unwrap();
        let sys = build_pcp_ready(&base, &[true], None).unwrap();
        // C_w for C = (1), w = 1 is [<w>, <a0>] = [10, 10]; the 0w change
        // makes slot 0 "010", and the rotation puts <a0> first.
        let words: Vec<String> = sys.source.appendants[..sys.base_len]
            .iter()
            .map(|a| crate::cyclic::format_binword(a))
            .collect();
        assert_eq!(words, vec!["10", "010"]);
        assert_eq!(sys.source.len(), sys.params.p_prime);
    }

    #[test]
    fn standard_compile_refuses_bad_arity_for_cw() {
        // A p = 2 base gives 2p = 4 (= 3k + 1), which the construction
        // cannot compile.
        let base = CyclicProgram::parse("1\n1\n").unwrap();
        assert!(matches!(
            build_pcp_ready(&base, &[true], None),
            Err(CompileError::UnsupportedArity { p: 4 })
        ));
    }
}
