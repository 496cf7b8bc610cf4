//! Wave-speed selection and parameter-limit studies.
//!
//! The solvers in [`crate::slab`] construct a wave profile for a *given*
//! speed `c`; this module picks the speed itself by enforcing a level-set
//! normalization, extends slab solutions toward the whole line, and walks
//! parameter limits (`ε → 0`, `|χ| → ∞`) comparing the selected waves
//! against their limiting profiles.

use alloc::vec::Vec;

/// Outcome of a parameter-limit study: waves computed along a decreasing
/// parameter sequence and compared against a known limiting wave.
///
/// Entry `k` of every per-point vector corresponds to `parameters[k]`.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// The parameter sequence the study walked, in the order given.
    pub parameters: Vec<f64>,
    /// Wave speed obtained at each parameter.
    pub speeds: Vec<f64>,
    /// The limiting speed the sequence is measured against.
    pub target: f64,
    /// Sup-distance of each profile to the limiting profile, after the
    /// producing study's stated alignment convention.
    pub distances: Vec<f64>,
    /// Auxiliary per-parameter diagnostic (study-specific; each producing
    /// function documents what it records here).
    pub gaps: Vec<f64>,
    /// True when every check the study promises held: the speeds and
    /// profiles approach their targets as required and all per-parameter
    /// side conditions passed.
    pub verdict: bool,
}
