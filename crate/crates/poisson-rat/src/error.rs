//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by construction, evaluation and quadrature routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("empty input: a rational map needs at least one pole")]
    EmptyInput,
    #[error("pole and residue sequences have lengths {poles} and {residues}")]
    LengthMismatch { poles: usize, residues: usize },
    #[error("non-finite value in input data")]
    NonFinite,
    #[error("poles {i} and {j} coincide within tolerance (distance {dist:.3e})")]
    DuplicatePole { i: usize, j: usize, dist: f64 },
    #[error("residue {index} is zero")]
    ZeroResidue { index: usize },
    #[error("evaluation point within guard distance of pole {index}")]
    EvalAtPole { index: usize },
    #[error("derivative order {order} not supported (only 1 and 2)")]
    UnsupportedOrder { order: u32 },
    #[error("denominator polynomial has a repeated root near {re}+{im}i")]
    RepeatedRoot { re: f64, im: f64 },
    #[error("polynomial root solve did not converge")]
    NonConvergedRoots,
    #[error("could not sample {n} poles with separation {separation} after {attempts} attempts")]
    SamplingExhausted {
        n: usize,
        separation: f64,
        attempts: usize,
    },
    #[error("external evaluation point sits on pole {index}")]
    ExternalPointAtPole { index: usize },
    #[error("contour quadrature did not converge below {tol:.3e} at {nodes} nodes (last delta {last_delta:.3e})")]
    NonConvergent {
        tol: f64,
        nodes: u32,
        last_delta: f64,
    },
    #[error("evaluation point coincides with a singularity of the differential")]
    EvalAtSingularity,
    #[error("bracket points p and q coincide within tolerance")]
    CoincidentPq,
    #[error("triple-bracket points must be pairwise distinct")]
    CoincidentPoints,
    #[error("coordinate outside the chart domain: {reason}")]
    DomainViolation { reason: String },
    #[error("chart jacobian is singular at the requested point")]
    SingularJacobian,
    #[error("no Casimirs of this family exist for N={n}")]
    TooSmall { n: usize },
    #[error("Leibniz recovery would divide by residue {index} with |rho| = {magnitude:.3e}")]
    LeibnizSolveFailure { index: usize, magnitude: f64 },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
