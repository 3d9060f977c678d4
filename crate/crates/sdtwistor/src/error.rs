use thiserror::Error;

/// Errors raised by precondition checks across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vector has zero length")]
    ZeroVector,
    #[error("argument {0} outside [-1, 1]")]
    OutOfDomain(f64),
    #[error("sample count {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("band limit {coeffs} exceeds grid band limit {grid}")]
    BandLimit { grid: usize, coeffs: usize },
    #[error("generator has nonzero mean {0:e}")]
    NonzeroMean(f64),
    #[error("input has content of the wrong parity at degree {0}")]
    WrongParity(usize),
    #[error("ill-conditioned inversion at degree {0}")]
    IllConditioned(usize),
    #[error("too few time slices: need {need}, have {have}")]
    TooFewSlices { need: usize, have: usize },
    #[error("time {0} is not a node of the time grid")]
    OffGrid(f64),
    #[error("potential V = {0:e} is not positive")]
    NonPositiveV(f64),
    #[error("Fourier tail energy {tail:e} exceeds tolerance {tol:e}; increase K")]
    FourierTail { tail: f64, tol: f64 },
    #[error("point lies on the line where the projection is undefined")]
    OnExceptionalLine,
    #[error("quaternion norm {0} is not 1")]
    NotUnit(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("degenerate span of lifted fields")]
    DegenerateSpan,
    #[error("point at infinity of the stereographic chart")]
    Infinite,
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
