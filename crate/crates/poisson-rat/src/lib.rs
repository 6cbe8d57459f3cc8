//! Poisson bracket hierarchies on rational functions of the Riemann sphere.
//!
//! The configuration space is the set of degree-N rational functions
//! `w(z) = sum_k rho_k/(z_k - z)`, a complex 2N-dimensional manifold with a
//! family of Poisson structures on it. This crate implements and
//! numerically cross-validates:
//!
//! * the contour-integral bracket `{w(p), w(q)}^f` over circles around the
//!   poles, its closed forms for `f = 1` and `f = z`, and the residue
//!   decomposition that measures the obstruction for higher weights
//!   ([`bracket`]);
//! * triple-bracket Jacobi checks for the contour bracket and a Jacobiator
//!   falsification of the pure closed-form ansatz for `f = z^n`, `n >= 2`
//!   ([`bracket`], [`tensor`]);
//! * the exact polynomial identities used by the direct Jacobi proof,
//!   verified with integer coefficient arithmetic ([`identities`]);
//! * the derivative hierarchy `{w(p), w(q)}^n = p^n w'(p) w(q) - q^n w'(q) w(p)`,
//!   its coordinate tensors in `(z, rho)` variables, Darboux charts,
//!   rank-2 degeneracy, Casimirs and the averaged action-angle pair
//!   ([`deriv`]);
//! * generic machinery to extract coordinate tensors from any pointwise
//!   bracket by double contour quadrature, evaluate Jacobiators, and compute
//!   numerical ranks and nullspaces ([`tensor`]).
//!
//! Everything is pure and deterministic: all types are immutable after
//! construction and safe to share across threads.

pub mod bracket;
pub mod contour;
pub mod deriv;
pub mod error;
pub mod identities;
mod poly;
pub mod ratfun;
pub mod tensor;

pub use bracket::{BracketMethod, BracketValue};
pub use contour::{ContourSpec, FWeight, QuadratureResult};
pub use deriv::{ActionAngleAverage, CanonicalTensor, CasimirBasis, ChartReport, DarbouxChart};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use ratfun::{PolynomialPair, RationalMap};
pub use tensor::{JacobiReport, PoissonTensorField};

/// Serializes a complex number as the `[re, im]` pair used by every JSON
/// surface of the crate.
pub(crate) fn serialize_complex<S: serde::Serializer>(
    value: &num_complex::Complex64,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    [value.re, value.im].serialize(serializer)
}
