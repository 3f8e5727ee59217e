//! Python bindings for the bintag workbench: the tag and cyclic engines, the
//! compiler, the simulators, and the four-pair reduction.

use std::collections::HashMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use bintag::bits::PackedWord;
use bintag::compiler as comp;
use bintag::cyclic;
use bintag::pcp;
use bintag::simulator as sim;
use bintag::tagcore;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_word(s: &str) -> PyResult<Vec<bool>> {
    cyclic::parse_binword(s).map_err(err)
}

/// Runs a tag system (text format: `beta=N`, then `sym -> word` lines) for at
/// most `steps` steps. Returns (dataword, steps taken, halted).
#[pyfunction]
fn tag_run(system: &str, word: &str, steps: usize) -> PyResult<(String, usize, bool)> {
    let sys = tagcore::TagSystem::parse(system).map_err(err)?;
    let out = tagcore::tag_run(&sys, &tagcore::Dataword::parse(word), steps).map_err(err)?;
    Ok((out.word.to_string(), out.steps, out.halted))
}

/// Runs a cyclic tag system (one appendant per line, `e` for empty).
/// Returns (marker, dataword, status).
#[pyfunction]
fn cyclic_run(program: &str, input: &str, steps: usize) -> PyResult<(usize, String, String)> {
    let prog = cyclic::CyclicProgram::parse(program).map_err(err)?;
    let word = parse_word(input)?;
    let run = cyclic::cyclic_run(
        cyclic::CyclicConfig::new(prog, &word),
        steps,
        cyclic::DEFAULT_CYCLE_WINDOW,
        false,
    );
    Ok((
        run.config.marker,
        cyclic::format_binword(&run.config.dataword_vec()),
        format!("{:?}", run.status),
    ))
}

/// The single-1-input transformation: returns the program of `C_w`, one
/// appendant per line.
#[pyfunction]
fn build_cw(program: &str, input: &str) -> PyResult<String> {
    let prog = cyclic::CyclicProgram::parse(program).map_err(err)?;
    let cw = cyclic::build_cw(&prog, &parse_word(input)?).map_err(err)?;
    Ok(cw.to_string())
}

#[pyclass(name = "CompiledSystem")]
struct PyCompiledSystem {
    inner: comp::CompiledSystem,
}

#[pymethods]
impl PyCompiledSystem {
    #[getter]
    fn x(&self) -> usize {
        self.inner.params.x
    }

    #[getter]
    fn beta(&self) -> usize {
        self.inner.params.beta
    }

    #[getter]
    fn u_len(&self) -> usize {
        self.inner.u.len()
    }

    #[getter]
    fn variant(&self) -> String {
        format!("{:?}", self.inner.variant)
    }

    fn params(&self) -> HashMap<&'static str, usize> {
        let p = &self.inner.params;
        HashMap::from([
            ("k", p.k),
            ("q", p.q),
            ("x", p.x),
            ("p_prime", p.p_prime),
            ("z1", p.z1),
            ("z2", p.z2),
            ("beta", p.beta),
            ("r", p.r),
        ])
    }

    /// Re-runs the track audits; returns the counter dict.
    fn verify(&self) -> PyResult<HashMap<&'static str, usize>> {
        let report = comp::verify_compiled(&self.inner).map_err(err)?;
        Ok(HashMap::from([
            ("conflicts", report.conflicts),
            ("ledger_entries", report.ledger_entries),
            ("owned_tracks_checked", report.owned_tracks_checked),
            ("distinct_shifts", report.distinct_shifts),
            ("tracks_matching_u", report.tracks_matching_u),
        ]))
    }

    /// Simulates `steps` cyclic steps with the chosen engine (`object`,
    /// `symbol` or `both`). Returns (steps done, status, payload word,
    /// objects cross-checked).
    fn simulate(
        &self,
        input: &str,
        steps: u64,
        engine: &str,
        symbol_cap: u64,
    ) -> PyResult<(u64, String, String, u64)> {
        let engine = match engine {
            "object" => sim::Engine::Object,
            "symbol" => sim::Engine::Symbol,
            "both" => sim::Engine::Both,
            other => return Err(PyValueError::new_err(format!("unknown engine {other}"))),
        };
        let word = parse_word(input)?;
        let out = sim::simulate(&self.inner, &word, steps, engine, symbol_cap).map_err(err)?;
        Ok((
            out.steps_done,
            format!("{:?}", out.status),
            out.payload_after
                .last()
                .map(|w| cyclic::format_binword(w))
                .unwrap_or_default(),
            out.cross_checked,
        ))
    }

    /// The halting variant with the designated appendant index.
    fn halting_variant(&self, index: usize) -> PyResult<PyCompiledSystem> {
        Ok(PyCompiledSystem {
            inner: comp::apply_halting_variant(&self.inner, index).map_err(err)?,
        })
    }

    /// The four-pair reduction (PCP-ready variant only).
    fn reduce_pcp(&self) -> PyResult<PyPcpInstance> {
        Ok(PyPcpInstance {
            inner: pcp::reduce_to_pcp(&self.inner).map_err(err)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        let mut f = std::fs::File::create(path)?;
        comp::write_compiled(&self.inner, &mut f).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<PyCompiledSystem> {
        let f = std::fs::File::open(path)?;
        Ok(PyCompiledSystem {
            inner: comp::read_compiled(f).map_err(err)?,
        })
    }
}

/// Compiles a cyclic program (p = 3k + 2 appendants) into the standard
/// binary tag system.
#[pyfunction]
#[pyo3(signature = (program, x=None))]
fn compile_program(program: &str, x: Option<usize>) -> PyResult<PyCompiledSystem> {
    let prog = cyclic::CyclicProgram::parse(program).map_err(err)?;
    Ok(PyCompiledSystem {
        inner: comp::compile(&prog, x).map_err(err)?,
    })
}

/// Compiles the PCP-ready variant T' for a base program (p = 3k + 1) and
/// input word.
#[pyfunction]
#[pyo3(signature = (program, input, x=None))]
fn build_pcp_ready(program: &str, input: &str, x: Option<usize>) -> PyResult<PyCompiledSystem> {
    let prog = cyclic::CyclicProgram::parse(program).map_err(err)?;
    Ok(PyCompiledSystem {
        inner: comp::build_pcp_ready(&prog, &parse_word(input)?, x).map_err(err)?,
    })
}

#[pyclass(name = "PcpInstance")]
struct PyPcpInstance {
    inner: pcp::PcpInstance,
}

#[pymethods]
impl PyPcpInstance {
    #[getter]
    fn beta(&self) -> usize {
        self.inner.beta
    }

    /// The four pairs, raw-expanded (toy scale only).
    fn pairs(&self) -> PyResult<Vec<(String, String)>> {
        let raw = pcp::expand_instance(&self.inner).map_err(err)?;
        let fmt =
            |w: &[bool]| -> String { w.iter().map(|&b| if b { '1' } else { '0' }).collect() };
        Ok(raw.pairs.iter().map(|(r, v)| (fmt(r), fmt(v))).collect())
    }

    /// Replays the tag computation as guided matching. Returns
    /// (matched, tag_steps, bisim_checks, solution length or 0).
    fn match_replay(&self, max_tag_steps: u64) -> PyResult<(bool, u64, u64, usize)> {
        let report = pcp::match_replay(&self.inner, max_tag_steps).map_err(err)?;
        let len = if report.matched {
            report.indices.len()
        } else {
            0
        };
        Ok((report.matched, report.tag_steps, report.bisim_checks, len))
    }
}

/// A four-pair toy instance for a tag system with rules `b -> b`,
/// `c -> rule` (rule over {b,c}, ending in b).
#[pyfunction]
fn toy_instance(beta: usize, rule: &str) -> PyResult<PyPcpInstance> {
    let word = PackedWord::parse_symbols(rule).map_err(err)?;
    Ok(PyPcpInstance {
        inner: pcp::build_instance(beta, &word).map_err(err)?,
    })
}

/// Breadth-first PCP search over raw pairs of {0,1} words.
#[pyfunction]
fn bfs_solve(
    pairs: Vec<(String, String)>,
    max_depth: usize,
    node_budget: usize,
) -> PyResult<Option<Vec<usize>>> {
    let inst = raw_instance(&pairs)?;
    pcp::bfs_solve(&inst, max_depth, node_budget).map_err(err)
}

#[pyfunction]
fn verify_solution(pairs: Vec<(String, String)>, indices: Vec<usize>) -> PyResult<bool> {
    let inst = raw_instance(&pairs)?;
    pcp::verify_solution_raw(&inst, &indices).map_err(err)
}

fn raw_instance(pairs: &[(String, String)]) -> PyResult<pcp::RawInstance> {
    let parse = |s: &str| -> PyResult<Vec<bool>> {
        s.bytes()
            .map(|b| match b {
                b'0' => Ok(false),
                b'1' => Ok(true),
                _ => Err(PyValueError::new_err("words are over {0,1}")),
            })
            .collect()
    };
    Ok(pcp::RawInstance {
        pairs: pairs
            .iter()
            .map(|(r, v)| Ok((parse(r)?, parse(v)?)))
            .collect::<PyResult<_>>()?,
    })
}

#[pymodule]
fn bintag_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(tag_run, m)?)?;
    m.add_function(wrap_pyfunction!(cyclic_run, m)?)?;
    m.add_function(wrap_pyfunction!(build_cw, m)?)?;
    m.add_function(wrap_pyfunction!(compile_program, m)?)?;
    m.add_function(wrap_pyfunction!(build_pcp_ready, m)?)?;
    m.add_function(wrap_pyfunction!(toy_instance, m)?)?;
    m.add_function(wrap_pyfunction!(bfs_solve, m)?)?;
    m.add_function(wrap_pyfunction!(verify_solution, m)?)?;
    m.add_class::<PyCompiledSystem>()?;
    m.add_class::<PyPcpInstance>()?;
    Ok(())
}
