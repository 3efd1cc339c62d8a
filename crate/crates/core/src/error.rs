use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("exponent at byte {offset} is not a nonnegative integer")]
    Exponent { offset: usize },

    #[error("total degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: u32, cap: u32 },

    #[error("range sample needs {nodes} grid nodes, budget is {budget}")]
    SampleBudget { nodes: u64, budget: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exterior cone check inconclusive: test point {point} lies within the sampling uncertainty band")]
    ConeInconclusive { point: Complex64 },

    #[error("Hamilton map is singular (degenerate Hessian)")]
    SingularHamiltonMap,

    #[error("eigenvalue selection is ambiguous: Re(alpha mu / i) = {0:e}")]
    AmbiguousSelection(f64),

    #[error("quadratic form has a real zero on the unit circle")]
    RealZero,

    #[error("sampled winding number {0} is not one of -2, 0, 2")]
    Winding(i64),

    #[error("real part lost positive definiteness (condition number {0:e})")]
    IllConditioned(f64),

    #[error("assembly pad {pad} is smaller than the symbol degree {degree}")]
    PadTooSmall { pad: usize, degree: u32 },

    #[error("symbol is not of the form xi^2 + V(x)")]
    NotSchrodinger,

    #[error("QR iteration did not converge after {sweeps} sweeps ({} eigenvalues found)", partial.len())]
    NoConvergence { sweeps: usize, partial: Vec<Complex64> },

    #[error("need at least {needed} trusted eigenvalues, found {found}")]
    TooFewTrusted { needed: usize, found: usize },

    #[error("least-squares system is rank deficient ({points} points, degree {degree})")]
    RankDeficient { points: usize, degree: usize },
}
