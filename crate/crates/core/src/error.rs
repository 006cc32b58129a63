use thiserror::Error;

/// Errors raised by the boundary calculus, the curve families and the solvers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid grid size {0}: expected a power of two >= 16")]
    InvalidGrid(usize),

    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at node {0}")]
    NonFinite(usize),

    #[error("trace is not real-valued (max |Im| = {0:e})")]
    NonRealInput(f64),

    #[error("function vanishes on the boundary: |value| = {modulus:e} at node {node}")]
    ZeroOnBoundary { node: usize, modulus: f64 },

    #[error("phase jump of {jump:.3} rad between nodes {node} and {next}; grid too coarse")]
    UnresolvedPhase { node: usize, next: usize, jump: f64 },

    #[error("point {re}+{im}i lies within {margin:e} of a boundary circle")]
    PointTooCloseToBoundary { re: f64, im: f64, margin: f64 },

    #[error("zero search lost zeros: boundary count {expected}, located {found}")]
    CountMismatch { expected: i64, found: i64 },

    #[error("zero near {re}+{im}i polished only to |f| = {residual:e}")]
    ZeroPolishFailed { re: f64, im: f64, residual: f64 },

    #[error("curve family does not enclose 0 at theta = {theta:.6}")]
    ZeroNotEnclosed { theta: f64 },

    #[error("degenerate ellipse axis at theta = {theta:.6}")]
    DegenerateAxis { theta: f64 },

    #[error("eta has winding number {0} along the trace (expected 0)")]
    EtaWindingNonzero(i64),

    #[error("trace vanishes at node {0}")]
    ZeroOnTrace(usize),

    #[error("divisor multiplier vanishes at node {0}")]
    MultiplierVanishes(usize),

    #[error("Newton iteration did not converge in {iterations} iterations")]
    NoConvergence { iterations: usize, history: Vec<f64> },

    #[error("glued approximate solution too coarse: {0}")]
    GlueTooCoarse(String),

    #[error("Laurent modes beyond {usable} underflow for q = {q}")]
    ModeConditioning { q: f64, usable: usize },

    #[error("Neumann series diverged (term ratio {ratio:.3} after {terms} terms)")]
    NeumannDiverges { ratio: f64, terms: usize },

    #[error("certificate sampling failed: {0}")]
    SamplingFailed(String),

    #[error("family on boundary component {0} is not a circle centred at 0")]
    NotRadialFamily(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
