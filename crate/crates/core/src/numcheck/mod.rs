//! Floating-point oracle for symbolic results.

mod corpus;
mod eval;
mod lambert;
mod quad;
mod residual;
mod sample;

pub use corpus::{fd_corpus, FdEntry, FdReport, DERIVATIVE_CORPUS};
pub use eval::{eval, eval_scoped, q_to_f64, Binding, Instantiation, PolyInst};
pub use lambert::lambert_w0;
pub use quad::integrate;
pub use residual::{numeric_residual, partial_value};
pub use sample::{
    eval_guarded, fd_check, instantiate, probe_zero, random_binding, random_poly, rng, sample_onshell, Probe,
    COORDINATES,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumError {
    #[error("unbound `{0}`")]
    Unbound(String),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("only {got} of {wanted} samples avoided singularities")]
    RejectionOverflow { wanted: usize, got: usize },
}
