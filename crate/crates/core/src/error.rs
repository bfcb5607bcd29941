use thiserror::Error;

/// Data-dependent failures surfaced by the verification pipeline.
///
/// Structural misuse (dimension mismatches, out-of-range sites, ragged
/// constructors) panics instead, following the convention of the dense
/// linear-algebra ecosystem.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("modulus k must lie in [0, 1), got {0}")]
    InvalidModulus(f64),

    #[error("argument must be finite, got {0}")]
    NonFiniteArgument(f64),

    #[error("coupling pole: rho + sigma = 0 at rho = {rho}, sigma = {sigma}")]
    CouplingPole { rho: String, sigma: String },

    #[error("middle tangent is zero; its reciprocal enters the coupling table")]
    ZeroMiddleTangent,

    #[error("tangent undefined: cos vanishes at half-angle t = {0}")]
    TangentUndefined(String),

    #[error("line pair must satisfy i < j, got ({0}, {1})")]
    BadLinePair(usize, usize),

    #[error("line index {index} outside 1..={lines}")]
    LineOutOfRange { index: usize, lines: usize },

    #[error("spectral config must provide at least {expected} lines, got {got}")]
    WrongLineCount { expected: usize, got: usize },

    #[error("trial count must be at least 1")]
    ZeroTrials,

    #[error("modulus grid must be nonempty")]
    EmptyGrid,

    #[error("sampler exceeded {0} rejections for a single trial")]
    ResampleCapExceeded(usize),

    #[error(
        "algebra system is inconsistent (residual {residual:e}); \
         the defining relation guarantees solvability, so this indicates a construction fault"
    )]
    AlgebraInconsistent { residual: f64 },
}
