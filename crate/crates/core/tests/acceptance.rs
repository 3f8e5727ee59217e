//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Criteria (all zero-tolerance unless stated):
//! 1. the worked tag and cyclic traces reproduce exactly;
//! 2. the object-length and shift-change identities hold at x = 16, 20, 24;
//! 3. the track audit reports zero conflicts, and a corrupted row is caught;
//! 4. shift decoding is injective across appendant indices (exhaustive);
//! 5. object and symbol engines agree object-for-object for >= 10 steps and
//!    the decoded payload tracks the direct cyclic run;
//! 6. the halting variant halts all-b within a predicted budget, the control
//!    does not;
//! 7. objects grow linearly and cumulative tag steps quadratically (R^2 >=
//!    0.98);
//! 8. the toy four-pair reduction bisimulates and closes into a verified
//!    match;
//! 9. the BFS solver finds the documented solution and agrees with an
//!    independent exhaustive enumerator.

use bintag::bits::{PackedDataword, PackedWord};
use bintag::compiler::{
    apply_halting_variant, assemble_ledger, audit_shift_injectivity, compile, encode_dataword, select_params,
    shift_table, Corruption, ObjKind,
};
use bintag::cyclic::{
    cyclic_run, cyclic_step, parse_binword, CyclicConfig, CyclicProgram, CyclicStep,
};
use bintag::pcp::{
    bfs_solve, build_instance, expand_instance, match_replay, verify_solution,
    verify_solution_raw, RawInstance,
};
use bintag::simulator::{simulate, Engine, StepStatus};
use bintag::tagcore::{shift_change_of_len, tag_step, BinStep, Dataword, StepOutcome, TagSystem};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn criterion_1_worked_examples() {
    // Post's 3-tag system 0 -> 00, 1 -> 1101 on 0101110, five steps.
    let sys = TagSystem::parse("beta=3\n0 -> 00\n1 -> 1101\n").unwrap();
    let expected = [
        "0101110", "111000", "0001101", "110100", "1001101", "11011101",
    ];
    let mut w = Dataword::parse(expected[0]);
    for want in &expected[1..] {
        w = match tag_step(&sys, &w).unwrap() {
            StepOutcome::Stepped(next) => next,
            other => panic!("tag trace halted early: {other:?}"),
        };
        assert_eq!(&w.to_string(), want);
    }

    // The cyclic system 001, 01, 11 on 101, six steps, markers included.
    let prog = CyclicProgram::parse("001\n01\n11\n").unwrap();
    let mut cfg = CyclicConfig::new(prog, &parse_binword("101").unwrap());
    let expected = [
        (1usize, "01001"),
        (2, "1001"),
        (0, "00111"),
        (1, "0111"),
        (2, "111"),
        (0, "1111"),
    ];
    for (marker, word) in expected {
        assert_eq!(cyclic_step(&mut cfg), CyclicStep::Stepped);
        assert_eq!(cfg.marker, marker);
        assert_eq!(
            bintag::cyclic::format_binword(&cfg.dataword_vec()),
            word
        );
    }
    println!("ACCEPT 1: worked tag and cyclic traces reproduce exactly");
}

#[test]
fn criterion_2_table_identities() {
    let base = CyclicProgram::parse("e\ne\n").unwrap(); // p = 2, r = 0
    for x in [16usize, 20, 24] {
        let sys = compile(&base, Some(x)).unwrap();
        let p = &sys.params;
        let (u, beta, z1, z2) = (sys.u.len(), p.beta, p.z1, p.z2);
        assert_eq!(u, (3 * x + 1) * beta - 3 * x, "x={x}: |u|");
        let len = |k: ObjKind| sys.template(k).len();
        assert_eq!(len(ObjKind::Eps), u + 3 * x, "x={x}: |<e>|");
        assert_eq!(len(ObjKind::Eps), (3 * x + 1) * beta, "x={x}: |<e>| = (3x+1)beta");
        assert_eq!(len(ObjKind::One), (x + 1) * u + 2 * x, "x={x}: |<1>|");
        assert_eq!(len(ObjKind::Zero), len(ObjKind::One), "x={x}: |<0>| = |<1>|");
        assert_eq!(len(ObjKind::EpsPrime), x * u + 2 * x, "x={x}: |<e'>|");
        assert_eq!(shift_change_of_len(len(ObjKind::One), beta), z1, "x={x}");
        assert_eq!(shift_change_of_len(len(ObjKind::Zero), beta), z1, "x={x}");
        assert_eq!(shift_change_of_len(len(ObjKind::EpsPrime), beta), z2, "x={x}");
        assert_eq!(shift_change_of_len(len(ObjKind::Eps), beta), 0, "x={x}");
        assert_eq!(shift_change_of_len(u, beta), 3 * x, "x={x}: u shift change");
        assert_eq!(z1 * (3 * x - 2), beta, "x={x}: z1(3x-2) = beta");
        assert_eq!((z2 * (3 * x + 1)) % beta, 0, "x={x}: z2(3x+1) = 0 mod beta");
        // Spot identities from the x = 16 compile.
        if x == 16 {
            assert_eq!(u, 1_767_088);
            assert_eq!(beta, 36_064);
            assert_eq!(len(ObjKind::One), 30_040_528);
            // Ceiling-read count for <1> entered below beta - z1.
            assert_eq!(len(ObjKind::One).div_ceil(beta), 833);
        }
    }
    println!("ACCEPT 2: object length and shift-change identities exact at x = 16, 20, 24");
}

#[test]
fn criterion_3_track_audit_and_corruption() {
    let base = CyclicProgram::parse("e\ne\n").unwrap();
    let params = select_params(2, 0, None).unwrap();
    assert_eq!(params.x, 16);
    let source = bintag::cyclic::replicate_program(&base, params.q).unwrap();
    let table = shift_table(&params);

    let clean = assemble_ledger(&source, &params, &table, None).unwrap();
    assert_eq!(clean.conflict_count(), 0, "clean build must have no conflicts");
    assert!(!clean.entries.is_empty());

    // Corrupt one shared row: <0> at a generic shift, middle slot. The same
    // track is assigned by the <e'> rows, so the flip must collide.
    let corruption = Corruption {
        object: ObjKind::Zero,
        entry_shift: 7 * params.x,
        slot: 3,
    };
    let corrupt = assemble_ledger(&source, &params, &table, Some(&corruption)).unwrap();
    assert!(
        corrupt.conflict_count() >= 1,
        "corrupted row must be reported"
    );
    println!(
        "ACCEPT 3: track audit clean ({} tracks, 0 conflicts); corrupted row raises {} conflict(s)",
        clean.entries.len(),
        corrupt.conflict_count()
    );
}

#[test]
fn criterion_4_shift_injectivity() {
    let params = select_params(2, 0, None).unwrap();
    let count = audit_shift_injectivity(&params).unwrap();
    assert_eq!(count, (3 * 16 - 2) * (3 * 16 + 1)); // 2254 shifts
    // Cross-m distinctness is implied by full injectivity; check the
    // decode table agrees.
    let table = shift_table(&params);
    let mut m_seen = vec![false; params.p_prime];
    for &z in &table.shifts {
        let (m, _) = table.decode(z).unwrap();
        m_seen[m] = true;
    }
    assert!(m_seen.iter().all(|&b| b));
    println!("ACCEPT 4: all {count} (m,d) shifts distinct at x = 16; zero cross-m collisions");
}

#[test]
fn criterion_5_engine_equivalence() {
    // p = 2 cyclic program with nonempty appendants sustains >= 10 steps on
    // a length-4 input; it compiles at the minimal feasible x = 18 (r = 1
    // requires x/2 - 7 > 1). The budget envelope is the x = 16 scale.
    let base = CyclicProgram::parse("1\n1\n").unwrap();
    let sys = compile(&base, None).unwrap();
    assert_eq!(sys.params.x, 18);
    let input = parse_binword("1111").unwrap();
    let steps = 12;
    let out = simulate(&sys, &input, steps, Engine::Both, steps).unwrap();
    assert_eq!(out.steps_done, steps);
    assert_eq!(out.status, StepStatus::Simulated);
    assert!(
        out.cross_checked >= 10,
        "need at least 10 cross-checked steps"
    );
    // Decoded payload equals the direct cyclic run, step for step.
    for (t, payload) in out.payload_after.iter().enumerate() {
        let direct = cyclic_run(
            CyclicConfig::new(sys.source.clone(), &input),
            t + 1,
            0,
            false,
        );
        assert_eq!(payload, &direct.config.dataword_vec(), "cyclic step {}", t + 1);
    }
    println!(
        "ACCEPT 5: engines agree on {} objects over {} cyclic steps; payload tracks the cyclic run",
        out.cross_checked, steps
    );
}

#[test]
fn criterion_6_halting_variant() {
    let base = CyclicProgram::parse("1\n1\n").unwrap();
    let standard = compile(&base, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    for _ in 0..3 {
        let h = rng.random_range(1..8);
        let n = rng.random_range(2..5);
        let input: Vec<bool> = vec![true; n];
        let halting = apply_halting_variant(&standard, h).unwrap();

        // Predicted budget: once the odd block is crossed every read appends
        // one b, so the dataword shrinks by beta - 1 per step. Before that,
        // the remaining P payload reads each append at most the <1> encoding
        // plus x garbage objects. Generous factor 2.
        let p = &halting.params;
        let one_len = p.object_len(ObjKind::One);
        let eps_len = p.object_len(ObjKind::Eps);
        let l0 = n * one_len;
        let growth = (h + n + 2) * (one_len + p.x * eps_len);
        let budget = (2 * (l0 + growth) / (p.beta - 1)) as u64;

        let machine = halting.machine();
        let mut word = encode_dataword(&halting, &input, 0);
        let mut halted_at = None;
        for step in 0..budget {
            if machine.step(&mut word) == BinStep::Halted {
                halted_at = Some(step);
                break;
            }
        }
        let halted_at = halted_at.expect("halting variant must halt within the predicted budget");
        assert!(word.len() < p.beta);
        let final_word = word.to_word();
        assert_eq!(
            final_word.count_ones(),
            0,
            "final dataword must be all b symbols"
        );

        // Control: the standard system does not halt within the same budget.
        let control_machine = standard.machine();
        let mut control = encode_dataword(&standard, &input, 0);
        let mut control_halted = false;
        for _ in 0..budget {
            if control_machine.step(&mut control) == BinStep::Halted {
                control_halted = true;
                break;
            }
        }
        assert!(!control_halted, "control run must not halt (h={h}, n={n})");
        checked += 1;
        println!(
            "  halting h={h} input=1^{n}: halted at tag step {halted_at} (budget {budget}), all-b; control alive"
        );
    }
    println!("ACCEPT 6: halting variant halts all-b within the predicted budget in {checked}/{checked} runs; controls do not");
}

#[test]
fn criterion_7_complexity_fits() {
    let base = CyclicProgram::parse("1\n1\n").unwrap();
    let sys = compile(&base, None).unwrap();
    let input = parse_binword("1111").unwrap();
    let rows = bintag::simulator::complexity_probe(&sys, &input, 50).unwrap();
    assert!(rows.len() >= 50);
    let window: Vec<_> = rows.iter().filter(|r| r.step >= 5).collect();

    // Linear fit objects_total ~ a + b t.
    let xs: Vec<f64> = window.iter().map(|r| r.step as f64).collect();
    let ys: Vec<f64> = window.iter().map(|r| r.objects_total as f64).collect();
    let r2_linear = r_squared(&xs, &ys);
    // Quadratic fit tag_steps_cum ~ a + b t^2.
    let xs2: Vec<f64> = window.iter().map(|r| (r.step * r.step) as f64).collect();
    let ys2: Vec<f64> = window.iter().map(|r| r.tag_steps_cum as f64).collect();
    let r2_quad = r_squared(&xs2, &ys2);

    assert!(r2_linear >= 0.98, "linear fit R^2 = {r2_linear}");
    assert!(r2_quad >= 0.98, "quadratic fit R^2 = {r2_quad}");

    // Fitted-constant bounds: objects_total <= c1 t, tag_steps <= c2 t^2.
    let c1 = window
        .iter()
        .map(|r| r.objects_total as f64 / r.step as f64)
        .fold(f64::MIN, f64::max);
    let c2 = window
        .iter()
        .map(|r| r.tag_steps_cum as f64 / (r.step * r.step) as f64)
        .fold(f64::MIN, f64::max);
    for r in &window {
        assert!(r.objects_total as f64 <= c1 * r.step as f64 + 1e-9);
        assert!(r.tag_steps_cum as f64 <= c2 * (r.step * r.step) as f64 + 1e-9);
    }
    println!(
        "ACCEPT 7: growth fits over t in [5,50]: objects R^2 = {r2_linear:.5} (c1 = {c1:.1}), cumulative tag steps R^2 = {r2_quad:.5} (c2 = {c2:.1})"
    );
}

fn r_squared(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (a + b * x);
            e * e
        })
        .sum();
    1.0 - ss_res / syy
}

#[test]
fn criterion_8_toy_reduction_end_to_end() {
    // A beta = 3 toy of the Lemma 9 rule shape that runs long.
    let runner = build_instance(3, &PackedWord::parse_symbols("ccccb").unwrap()).unwrap();
    assert_eq!(runner.pairs.len(), 4);
    let runner_report = match_replay(&runner, 12).unwrap();
    assert!(!runner_report.matched);
    assert!(
        runner_report.bisim_checks >= 10,
        "surplus must decode to the dataword for >= 10 steps"
    );

    // A halting toy: cbcbb at beta = 3 halts after 5 steps on input cbb.
    let halting = build_instance(3, &PackedWord::parse_symbols("cbcbb").unwrap()).unwrap();
    assert_eq!(halting.pairs.len(), 4);
    let report = match_replay(&halting, 100).unwrap();
    assert!(report.matched, "halting toy must reach an exact match");
    assert!(verify_solution(&halting, &report.indices).unwrap());
    let raw = expand_instance(&halting).unwrap();
    assert!(verify_solution_raw(&raw, &report.indices).unwrap());

    // The length law and per-step surplus/dataword equality are asserted
    // inside match_replay; re-run a beta = 2 toy for breadth.
    let beta2 = build_instance(2, &PackedWord::parse_symbols("ccccb").unwrap()).unwrap();
    let r2 = match_replay(&beta2, 15).unwrap();
    assert!(r2.bisim_checks >= 15);
    println!(
        "ACCEPT 8: 4-pair toys bisimulate ({} beta-3 + {} beta-2 step checks); halting toy closes into a verified match of length {}",
        runner_report.bisim_checks,
        r2.bisim_checks,
        report.indices.len()
    );
}

/// Independent oracle for criterion 9: iterative-deepening enumeration of all
/// index sequences, comparing raw concatenations with prefix pruning. Shares
/// nothing with the BFS search state.
fn enumerate_shortest(
    pairs: &[(Vec<bool>, Vec<bool>)],
    max_depth: usize,
    node_budget: usize,
) -> Result<Option<Vec<usize>>, ()> {
    fn dfs(
        pairs: &[(Vec<bool>, Vec<bool>)],
        seq: &mut Vec<usize>,
        r: &mut Vec<bool>,
        v: &mut Vec<bool>,
        depth: usize,
        nodes: &mut usize,
        budget: usize,
    ) -> Result<Option<Vec<usize>>, ()> {
        *nodes += 1;
        if *nodes > budget {
            return Err(());
        }
        if !seq.is_empty() {
            let n = r.len().min(v.len());
            if r[..n] != v[..n] {
                return Ok(None);
            }
            if r.len() == v.len() {
                return Ok(Some(seq.clone()));
            }
        }
        if depth == 0 {
            return Ok(None);
        }
        for (i, (ri, vi)) in pairs.iter().enumerate() {
            seq.push(i);
            r.extend_from_slice(ri);
            v.extend_from_slice(vi);
            let found = dfs(pairs, seq, r, v, depth - 1, nodes, budget)?;
            r.truncate(r.len() - ri.len());
            v.truncate(v.len() - vi.len());
            seq.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
    let mut nodes = 0;
    for depth in 1..=max_depth {
        let mut seq = Vec::new();
        let mut r = Vec::new();
        let mut v = Vec::new();
        if let Some(found) = dfs(pairs, &mut seq, &mut r, &mut v, depth, &mut nodes, node_budget)?
        {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

#[test]
fn criterion_9_bfs_oracle() {
    // The documented instance.
    let word = |s: &str| -> Vec<bool> { s.bytes().map(|b| b == b'1').collect() };
    let inst = RawInstance {
        pairs: vec![
            (word("1"), word("111")),
            (word("10111"), word("10")),
            (word("10"), word("0")),
        ],
    };
    let sol = bfs_solve(&inst, 12, 1 << 20).unwrap().unwrap();
    assert_eq!(sol, vec![1, 0, 0, 2]);
    assert!(verify_solution_raw(&inst, &sol).unwrap());
    let mut r = Vec::new();
    for &i in &sol {
        r.extend_from_slice(&inst.pairs[i].0);
    }
    let s: String = r.iter().map(|&b| if b { '1' } else { '0' }).collect();
    assert_eq!(s, "101111110");

    // Exhaustive agreement on every 1- and 2-pair instance over words of
    // length <= 2.
    let mut words: Vec<Vec<bool>> = vec![vec![]];
    for len in 1..=2usize {
        for bits in 0..(1 << len) {
            words.push((0..len).map(|i| (bits >> i) & 1 == 1).collect());
        }
    }
    let mut compared = 0;
    let mut agreements = 0;
    let mut all_pairs = Vec::new();
    for r in &words {
        for v in &words {
            all_pairs.push((r.clone(), v.clone()));
        }
    }
    let mut check = |pairs: Vec<(Vec<bool>, Vec<bool>)>| {
        let inst = RawInstance { pairs };
        let bfs = bfs_solve(&inst, 12, 1 << 21);
        let oracle = enumerate_shortest(&inst.pairs, 12, 1 << 22);
        if let (Ok(bfs), Ok(oracle)) = (bfs, oracle) {
            compared += 1;
            match (&bfs, &oracle) {
                (Some(a), Some(b)) => {
                    assert_eq!(a.len(), b.len(), "shortest lengths differ");
                    assert!(verify_solution_raw(&inst, a).unwrap());
                    assert!(verify_solution_raw(&inst, b).unwrap());
                }
                (None, None) => {}
                other => panic!("solvers disagree: {other:?}"),
            }
            agreements += 1;
        }
    };
    for p in &all_pairs {
        check(vec![p.clone()]);
    }
    for a in &all_pairs {
        for b in &all_pairs {
            check(vec![a.clone(), b.clone()]);
        }
    }
    // Seeded sample of 3-pair instances with words up to 4 symbols.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rand_word = |rng: &mut ChaCha8Rng| -> Vec<bool> {
        let len = rng.random_range(0..=4);
        (0..len).map(|_| rng.random()).collect()
    };
    for _ in 0..150 {
        let pairs: Vec<(Vec<bool>, Vec<bool>)> = (0..3)
            .map(|_| (rand_word(&mut rng), rand_word(&mut rng)))
            .collect();
        check(pairs);
    }
    assert!(compared >= 1000, "compared only {compared} instances");
    assert_eq!(compared, agreements);
    println!(
        "ACCEPT 9: documented solution [1,0,0,2] verified; BFS agrees with the exhaustive enumerator on {compared} instances to depth 12"
    );
}

#[test]
fn acceptance_packed_dataword_is_exported() {
    // Smoke check that the packed-dataword surface used above stays public.
    let w = PackedWord::parse_symbols("0101").unwrap();
    let d = PackedDataword::from_word(w, 0);
    assert_eq!(d.len(), 4);
}
