use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("constant polynomial has no roots")]
    ConstantPolynomial,

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    RootsNotConverged {
        iterations: usize,
        residual: f64,
        best: Vec<C64>,
    },

    #[error("leading coefficient must be nonzero")]
    ZeroLeading,

    #[error("internal consistency: exact division left remainder {remainder:e} (scale {scale:e})")]
    InexactDivision { remainder: f64, scale: f64 },

    #[error("not in the image of build_pi_phi: implied sigma_0 = {sigma0}")]
    NotInImage { sigma0: C64 },

    #[error("invalid degrees: {0}")]
    Degree(String),

    #[error("recurrence singular at n = {0}")]
    RecurrenceSingular(usize),

    #[error("q = {q} is within {distance:e} of a root of unity of order {order}")]
    NearRootOfUnity { q: C64, order: usize, distance: f64 },

    #[error("solutions found ({found}) exceed the Heine bound {bound}")]
    HeineBoundExceeded { found: usize, bound: u64 },

    #[error("coincident points at indices {0} and {1}")]
    CoincidentPoints(usize, usize),

    #[error("quadrature did not converge with {nodes} nodes (last estimates {previous} and {last})")]
    QuadratureNotConverged { nodes: usize, previous: C64, last: C64 },

    #[error("pole of the Gamma function at {0}")]
    GammaPole(C64),

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
