//! The first bracket hierarchy: the contour-integral bracket, its closed
//! forms, the residue decomposition, and triple-bracket Jacobi checks.
//!
//! The contour bracket is
//!
//! ```text
//! {w(p), w(q)}^f = sum_k (1/2 pi i) . (circle around z_k) of
//!                  f(z) w(z) (w(p) - w(q)) / ((z-p)(z-q)) dz
//! ```
//!
//! with the circles oriented so that `f = 1` reproduces the closed form
//! `(w(p) - w(q))^2 / (p - q)`; with the counterclockwise parametrization of
//! [`crate::contour::integrate`] this is minus the node sum. Equivalently the
//! bracket equals the residue sum at `p`, `q` and infinity, which is what the
//! decomposition check verifies.

use num_complex::Complex64;
use serde::Serialize;

use crate::contour::{
    check_distinct_pq, integrate, pole_contours, residue_at_infinity, two_pi_i, ContourSpec,
    FWeight, COINCIDENT_TOL, DEFAULT_QUAD_TOL,
};
use crate::error::{Error, Result};
use crate::ratfun::RationalMap;
use crate::tensor::{self, PoissonTensorField};

/// Quadrature target for the outer integral of a nested triple bracket.
const TRIPLE_OUTER_TOL: f64 = 1e-9;

/// Inner brackets of a nested integral run 10x tighter than the outer one.
const INNER_TOL_FACTOR: f64 = 0.1;

/// Differentiation step for Jacobiators of quadrature-fed tensors; larger
/// than the generic default so finite differences do not amplify quadrature
/// noise past truncation error.
pub const ANSATZ_JACOBIATOR_STEP: f64 = 1e-4;

/// How a bracket value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketMethod {
    Contour,
    ClosedForm,
    Ansatz,
}

/// A bracket evaluation with its error estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BracketValue {
    #[serde(serialize_with = "crate::serialize_complex")]
    pub value: Complex64,
    pub method: BracketMethod,
    pub est_error: f64,
}

fn closed(value: Complex64) -> BracketValue {
    BracketValue {
        value,
        method: BracketMethod::ClosedForm,
        est_error: 0.0,
    }
}

/// `{w(p), w(q)}^f` by contour quadrature around every pole.
pub fn bracket_contour(
    f: &FWeight,
    w: &RationalMap,
    p: Complex64,
    q: Complex64,
) -> Result<BracketValue> {
    let contours = pole_contours(w, &[p, q])?;
    bracket_contour_on(f, w, p, q, &contours, DEFAULT_QUAD_TOL)
}

/// Contour bracket on caller-supplied circles (used by the nested triple
/// bracket, whose inner integrals must avoid the outer quadrature nodes).
fn bracket_contour_on(
    f: &FWeight,
    w: &RationalMap,
    p: Complex64,
    q: Complex64,
    contours: &[ContourSpec],
    tol: f64,
) -> Result<BracketValue> {
    check_distinct_pq(p, q)?;
    let dw = w.eval(p)? - w.eval(q)?;
    let mut total = Complex64::new(0.0, 0.0);
    let mut est_error = 0.0;
    for c in contours {
        let r = integrate(
            |z| Ok(f.eval(z) * w.eval(z)? * dw / ((z - p) * (z - q))),
            c,
            tol,
        )?;
        total += r.value;
        est_error += r.est_error;
    }
    Ok(BracketValue {
        value: -total / two_pi_i(),
        method: BracketMethod::Contour,
        est_error: est_error / std::f64::consts::TAU,
    })
}

/// Atiyah-Hitchin closed form `{w(p), w(q)} = (w(p) - w(q))^2 / (p - q)`.
pub fn bracket_ah(w: &RationalMap, p: Complex64, q: Complex64) -> Result<BracketValue> {
    check_distinct_pq(p, q)?;
    let dw = w.eval(p)? - w.eval(q)?;
    Ok(closed(dw * dw / (p - q)))
}

/// Closed form for `f(z) = z`:
/// `{w(p), w(q)}^z = (p w(p) - q w(q)) / (p - q) * (w(p) - w(q))`.
pub fn bracket_z(w: &RationalMap, p: Complex64, q: Complex64) -> Result<BracketValue> {
    check_distinct_pq(p, q)?;
    let wp = w.eval(p)?;
    let wq = w.eval(q)?;
    Ok(closed((p * wp - q * wq) / (p - q) * (wp - wq)))
}

/// The candidate closed form for arbitrary polynomial `f`:
/// `(f(p) w(p) - f(q) w(q)) / (p - q) * (w(p) - w(q))`.
///
/// It differs from the contour bracket by exactly the residue of the bracket
/// differential at infinity and is a Poisson bracket only when that residue
/// vanishes.
pub fn bracket_ansatz(
    f: &FWeight,
    w: &RationalMap,
    p: Complex64,
    q: Complex64,
) -> Result<BracketValue> {
    check_distinct_pq(p, q)?;
    let wp = w.eval(p)?;
    let wq = w.eval(q)?;
    let value = (f.eval(p) * wp - f.eval(q) * wq) / (p - q) * (wp - wq);
    Ok(BracketValue {
        value,
        method: BracketMethod::Ansatz,
        est_error: 0.0,
    })
}

/// Residual of the Cauchy decomposition
/// `bracket_contour = ansatz + res_infinity(alpha)`.
pub fn residue_decomposition_check(
    f: &FWeight,
    w: &RationalMap,
    p: Complex64,
    q: Complex64,
) -> Result<f64> {
    let lhs = bracket_contour(f, w, p, q)?.value;
    let rhs = bracket_ansatz(f, w, p, q)?.value + residue_at_infinity(f, w, p, q)?;
    Ok((lhs - rhs).norm())
}

fn check_pairwise_distinct(points: &[Complex64]) -> Result<()> {
    let scale = 1.0 + points.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if (points[i] - points[j]).norm() < COINCIDENT_TOL * scale {
                return Err(Error::CoincidentPoints);
            }
        }
    }
    Ok(())
}

/// `{{w(p), w(q)}, w(r)}` for the contour bracket, assembled through the
/// Leibniz rule: the outer integral runs over the pole circles while every
/// inner bracket is itself a contour bracket on circles of half the outer
/// radius, so outer nodes never touch inner circles.
pub fn triple_bracket_contour(
    f: &FWeight,
    w: &RationalMap,
    p: Complex64,
    q: Complex64,
    r: Complex64,
) -> Result<Complex64> {
    check_pairwise_distinct(&[p, q, r])?;
    let outer = pole_contours(w, &[p, q, r])?;
    let inner: Vec<ContourSpec> = outer.iter().map(|c| c.scaled(0.5)).collect();
    let inner_tol = TRIPLE_OUTER_TOL * INNER_TOL_FACTOR;

    let b_pr = bracket_contour_on(f, w, p, r, &inner, inner_tol)?.value;
    let b_qr = bracket_contour_on(f, w, q, r, &inner, inner_tol)?.value;
    let outer_constants = b_pr - b_qr;
    let dw = w.eval(p)? - w.eval(q)?;

    let mut total = Complex64::new(0.0, 0.0);
    for c in &outer {
        let part = integrate(
            |z| {
                let wz = w.eval(z)?;
                let inner_bracket = bracket_contour_on(f, w, z, r, &inner, inner_tol)?.value;
                Ok(f.eval(z) / ((z - p) * (z - q)) * (wz * outer_constants + dw * inner_bracket))
            },
            c,
            TRIPLE_OUTER_TOL,
        )?;
        total += part.value;
    }
    Ok(-total / two_pi_i())
}

/// Normalized cyclic sum `|{{p,q},r} + {{q,r},p} + {{r,p},q}|`.
pub fn jacobi_defect_contour(
    f: &FWeight,
    w: &RationalMap,
    p: Complex64,
    q: Complex64,
    r: Complex64,
) -> Result<f64> {
    let t1 = triple_bracket_contour(f, w, p, q, r)?;
    let t2 = triple_bracket_contour(f, w, q, r, p)?;
    let t3 = triple_bracket_contour(f, w, r, p, q)?;
    let scale = t1.norm().max(t2.norm()).max(t3.norm()).max(1e-300);
    Ok((t1 + t2 + t3).norm() / scale)
}

/// Tensor field obtained by extracting the ansatz bracket through the
/// residue functionals at each configuration near `w`.
///
/// Note that this extraction cannot distinguish the ansatz from the contour
/// bracket: the two differ by `(w(p) - w(q)) * polynomial(p, q)`, and every
/// closed contour annihilates the polynomial factor, so the extracted tensor
/// is always the (Poisson) contour-bracket tensor. It is kept as data about
/// the first hierarchy's coordinate tensor, not as a Jacobi test.
pub fn ansatz_tensor_field(f: FWeight, n: usize) -> PoissonTensorField {
    PoissonTensorField::new(2 * n, format!("ansatz[deg {}]", f.degree()), move |x| {
        let w = RationalMap::new(x[..n].to_vec(), x[n..].to_vec())?;
        tensor::extract_coordinate_tensor(|p, q| Ok(bracket_ansatz(&f, &w, p, q)?.value), &w)
    })
}

/// `{{w(p), w(q)}, w(r)}` for the pure ansatz closed form, expanded through
/// the Leibniz rule: with `g = (f(p) w(p) - f(q) w(q))(w(p) - w(q))/(p - q)`,
///
/// ```text
/// {{w(p), w(q)}, w(r)} = dg/dw(p) {w(p), w(r)} + dg/dw(q) {w(q), w(r)}
/// ```
///
/// where the inner brackets are again the ansatz.
fn double_bracket_ansatz(
    f: &FWeight,
    w: &RationalMap,
    p: Complex64,
    q: Complex64,
    r: Complex64,
) -> Result<Complex64> {
    let wp = w.eval(p)?;
    let wq = w.eval(q)?;
    let fp = f.eval(p);
    let fq = f.eval(q);
    let dg_dwp = (fp * (wp - wq) + (fp * wp - fq * wq)) / (p - q);
    let dg_dwq = (-fq * (wp - wq) - (fp * wp - fq * wq)) / (p - q);
    Ok(dg_dwp * bracket_ansatz(f, w, p, r)?.value + dg_dwq * bracket_ansatz(f, w, q, r)?.value)
}

/// Normalized cyclic Jacobi defect of the ansatz closed form at the triple
/// `(p, q, r)`; zero only for weights of degree 0 or 1.
///
/// This is the pointwise Leibniz expansion rather than a coordinate-tensor
/// Jacobiator: the residue-functional extraction provably erases the
/// difference between the ansatz and the contour bracket (see
/// [`ansatz_tensor_field`]), so only the pointwise route can exhibit the
/// failure.
pub fn jacobi_defect_ansatz(
    f: &FWeight,
    w: &RationalMap,
    p: Complex64,
    q: Complex64,
    r: Complex64,
) -> Result<f64> {
    check_pairwise_distinct(&[p, q, r])?;
    let t1 = double_bracket_ansatz(f, w, p, q, r)?;
    let t2 = double_bracket_ansatz(f, w, q, r, p)?;
    let t3 = double_bracket_ansatz(f, w, r, p, q)?;
    let scale = t1.norm().max(t2.norm()).max(t3.norm()).max(1e-300);
    Ok((t1 + t2 + t3).norm() / scale)
}

pub use crate::identities::{run_identity_checks, verify_proof_identities, IdentityCheck};
