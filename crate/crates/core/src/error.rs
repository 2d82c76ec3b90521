use thiserror::Error;

/// Errors raised while building or evaluating cavity models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("static cavity: theta = 0 describes no motion")]
    StaticCavity,
    #[error("parameter out of range: {name} = {value}")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("degenerate inversion: theta must be nonzero")]
    DegenerateInversion,
    #[error("no physical solution: v0 must differ from v1")]
    NoPhysicalSolution,
    #[error("luminal wall: maximal velocity reaches 1")]
    LuminalWall,
    #[error("singular homography: determinant vanishes")]
    SingularMap,
    #[error("derivative undefined at pole")]
    DerivativeAtPole,
    #[error("Schwarzian undefined: first derivative vanishes")]
    SchwarzianUndefined,
    #[error("closed form unavailable for the {0} family")]
    ClosedFormUnavailable(&'static str),
    #[error("quadrature budget exhausted: estimate {estimate}, error bound {error}")]
    QuadratureBudget { estimate: f64, error: f64 },
    #[error("point x = {x} lies outside the cavity [0, {length}]")]
    OutsideCavity { x: f64, length: f64 },
    #[error("root bracket [{lo}, {hi}] does not contain a sign change")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("iteration cap of {0} exceeded")]
    IterationCap(usize),
    #[error("trajectory is not smooth at t = {0}")]
    NonSmooth(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
