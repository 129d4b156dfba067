use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("subset is empty")]
    EmptySubset,
    #[error("site {site} out of range for lattice with {len} sites")]
    SiteOutOfRange { site: usize, len: usize },
    #[error("box of size {size} does not fit with margin {margin} in extent {extent}")]
    BoxExceedsMargin { size: usize, margin: usize, extent: usize },
    #[error("invalid Følner schedule: {0}")]
    InvalidSchedule(String),
    #[error("covering condition violated: radius {radius} < spacing {spacing} / 2")]
    CoveringCondition { spacing: usize, radius: f64 },
    #[error("members overlap too thinly for taper {taper}: weight {member} jumps by {jump} across a hop")]
    OverlapTooThin { taper: f64, member: usize, jump: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Schatten exponent must be >= 1, got {0}")]
    SchattenExponent(f64),
    #[error("dense conversion needs {rows} rows, limit is {limit}")]
    DenseLimit { rows: usize, limit: usize },
    #[error("test family is empty")]
    EmptyFamily,
    #[error("flux {flux} per plaquette on {plaquettes} plaquettes is not a multiple of 2π in total")]
    FluxNotQuantized { flux: f64, plaquettes: usize },
    #[error("symbol is not unimodular at site {site}: |u| = {modulus}")]
    NonUnimodular { site: usize, modulus: f64 },
    #[error("circle of {sites} sites too small: need at least {required}")]
    CircleTooSmall { sites: usize, required: usize },
    #[error("operator is not self-adjoint: deviation {0:e}")]
    NotSelfAdjoint(f64),
    #[error("Chebyshev degree cap {cap} reached with tail {tail:e} above target {target:e}")]
    DegreeCap { cap: usize, tail: f64, target: f64 },
    #[error("filter is not admissible for index use: {0}")]
    FilterNotAdmissible(String),
    #[error("sequence of length {len} is shorter than the window {window}")]
    SequenceTooShort { len: usize, window: usize },
    #[error("invalid limit policy: {0}")]
    InvalidPolicy(String),
    #[error("holonomy eigenvalue within {distance:e} of -1 at plaquette {plaquette}; refine the flux")]
    BranchAmbiguity { plaquette: usize, distance: f64 },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("support of the test form touches the boundary at site {0}")]
    SupportTouchesBoundary(usize),
    #[error("continuity bound violated: |{value}| > {bound}")]
    ContinuityViolation { value: f64, bound: f64 },
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("module is not involutive: {0}")]
    NotInvolutive(String),
    #[error("module grading: {0}")]
    Grading(String),
    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("antisymmetrization degree {0} exceeds 4")]
    PermutationDegree(usize),
    #[error("symbol regime: {0}")]
    SymbolRegime(String),
    #[error("eigenvalue {value:e} within tolerance of 0 at fiber x={x:?}, xi={xi:?}")]
    NearZeroEigenvalue { x: Vec<f64>, xi: Vec<f64>, value: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("calibration: {0}")]
    Calibration(String),
    #[error("cache: {0}")]
    Cache(String),
}
