//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GnrError {
    #[error("singular tensor (determinant zero or non-finite)")]
    SingularTensor,

    #[error("deformation gradient has non-positive determinant ({0})")]
    NonPositiveDeterminant(f64),

    #[error("tensor argument must be symmetric positive definite")]
    NotPositiveDefinite,

    #[error("degenerate fiber state: C_e_co : M_bar <= 0")]
    DegenerateFiber,

    #[error("invalid material state: {0}")]
    InvalidState(String),

    #[error("local integration failed to converge (residual {residual:.3e} after {iterations} iterations, substep depth {depth})")]
    LocalNonConvergence {
        residual: f64,
        iterations: usize,
        depth: usize,
    },

    #[error("global Newton failed to converge at t = {time} days (residual {residual:.3e})")]
    GlobalNonConvergence { time: f64, residual: f64 },

    #[error("element {element} quadrature point {qp}: {source}")]
    QuadraturePoint {
        element: usize,
        qp: usize,
        #[source]
        source: Box<GnrError>,
    },

    #[error("inverted element detected (det F <= 0) in element {0}")]
    InvertedElement(usize),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
