//! Workbench for binary tag systems.
//!
//! The pipeline compiles a cyclic tag system into a 2-symbol tag system whose
//! single large appendant `u` carries the whole program on its tracks, runs the
//! result with two independent engines (an object-level engine and a literal
//! symbol-level engine), and reduces the halting problem of the compiled
//! system to a Post correspondence instance with four pairs of words.
//!
//! Modules:
//! - [`tagcore`]: tag-system semantics plus the shift/track calculus.
//! - [`cyclic`]: cyclic tag systems, program replication, the single-1-input
//!   transformation.
//! - [`compiler`]: parameter selection, object templates, track-by-track
//!   synthesis of `u`, the halting variant, and the PCP-ready variant.
//! - [`simulator`]: object-level and symbol-level execution engines with
//!   cross-checking and decoding.
//! - [`pcp`]: the four-pair reduction, the guided prefix matcher, and a
//!   brute-force solver for toy instances.

pub mod bits;
pub mod cli;
pub mod compiler;
pub mod cyclic;
pub mod manifest;
pub mod pcp;
pub mod simulator;
pub mod tagcore;
