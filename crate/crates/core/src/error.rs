use thiserror::Error;

/// Errors surfaced by the region calculus, the frequency-domain analysis,
/// and the sampling oracle.
#[derive(Debug, Error)]
pub enum SrgError {
    #[error("input contains a non-finite value: {context}")]
    NonFiniteInput { context: String },

    #[error("empty input: {context}")]
    EmptyInput { context: String },

    #[error("invalid input: {context}")]
    InvalidInput { context: String },

    #[error("cannot invert a region whose boundary passes within {tol:e} of the origin; the reciprocal map is singular there")]
    InversionSingularAtZero { tol: f64 },

    #[error("operand region must satisfy the chord property for a sound Minkowski sum cover; check_properties reported it absent")]
    ChordPropertyRequired,

    #[error("operand regions must satisfy the arc property for a sound product cover; check_properties reported it absent")]
    ArcPropertyRequired,

    #[error("operation requires a bounded region, but the operand extends to infinity")]
    UnboundedOperand,

    #[error("loop-transform offset kappa = {kappa} lies outside the nonlinearity's graph region on the real axis")]
    KappaOutsideRegion { kappa: f64 },

    #[error("transfer function must be proper: numerator degree {num_deg} exceeds denominator degree {den_deg}")]
    ImproperTransferFunction { num_deg: usize, den_deg: usize },

    #[error("denominator polynomial is zero or degenerate")]
    DegenerateDenominator,

    #[error("evaluation point s = {point} coincides with a pole")]
    EvaluationAtPole { point: String },

    #[error("operation is defined for stable transfer functions only; found pole(s) in the closed right half-plane: {poles}; use the extended graph construction for unstable or marginally stable dynamics")]
    UnstableTransferFunction { poles: String },

    #[error("adaptive sampler exceeded {max} samples before meeting the resolution target {target:e}; worst remaining gap {worst:e}")]
    MaxSamplesExceeded { max: usize, target: f64, worst: f64 },

    #[error("query point lies on the contour (within {tol:e}); winding number is undefined there")]
    PointOnContour { tol: f64 },

    #[error("winding computation did not converge: accumulated angle {residue:.3e} rad away from a multiple of 2*pi; contour needs refinement")]
    InsufficientRefinement { residue: f64 },

    #[error("signal has zero norm; gain and angle are undefined")]
    ZeroNormSignal,

    #[error("static nonlinearity must satisfy phi(0) = 0 to admit a sector description through the origin; got phi(0) = {value}")]
    SectorAtZeroRequiresOrigin { value: f64 },

    #[error("sampling oracle does not support this operator: {context}")]
    OracleUnsupported { context: String },
}

pub type Result<T> = std::result::Result<T, SrgError>;
