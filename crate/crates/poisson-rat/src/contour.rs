//! Contour integration on circles and the meromorphic differentials built
//! from a rational map.
//!
//! All quadrature is the periodic trapezoid rule with node doubling; for
//! integrands analytic in an annulus around the circle it converges
//! geometrically, so the 4096-node cap is generous. Circles are always
//! parametrized counterclockwise. The pole functionals ([`residue_at`],
//! [`pole_moment`], [`derivative_moment`]) extract the coefficients of the
//! `rho_k/(z_k - z)` representation, which equal *minus* the counterclockwise
//! residues of `w`; they apply that sign internally so that
//! `residue_at(w, k) == rho_k`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly;
use crate::ratfun::RationalMap;

/// Default convergence target for a single contour integral.
pub const DEFAULT_QUAD_TOL: f64 = 1e-12;

/// Initial node count for adaptive integration.
pub const START_NODES: u32 = 64;

/// Hard cap on trapezoid nodes.
pub const MAX_NODES: u32 = 4096;

/// Threshold (relative) below which two bracket points count as coincident.
pub const COINCIDENT_TOL: f64 = 1e-8;

/// Relative guard distance around isolated singularities.
const SINGULARITY_GUARD: f64 = 1e-12;

/// A circle `|z - center| = radius` with a starting node count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    center: Complex64,
    radius: f64,
    nodes: u32,
}

impl ContourSpec {
    /// `radius > 0`; `nodes` is rounded up to a power of two, at least 16.
    pub fn new(center: Complex64, radius: f64, nodes: u32) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 || !center.re.is_finite() || !center.im.is_finite()
        {
            return Err(Error::NonFinite);
        }
        let nodes = nodes.max(16).next_power_of_two();
        Ok(Self {
            center,
            radius,
            nodes,
        })
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn nodes(&self) -> u32 {
        self.nodes
    }

    /// Same circle with the radius scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            center: self.center,
            radius: self.radius * factor,
            nodes: self.nodes,
        }
    }

    /// The point at angle `theta` on the circle.
    pub fn point(&self, theta: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, theta)
    }
}

/// An entire weight function `f(z)`, represented as a polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct FWeight {
    coeffs: Vec<Complex64>,
}

impl FWeight {
    /// `f(z) = z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    /// `f(z) = 1`.
    pub fn one() -> Self {
        Self::monomial(0)
    }

    /// Arbitrary polynomial weight from ascending coefficients.
    pub fn from_coeffs(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        poly::trim(&mut coeffs);
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        poly::degree(&self.coeffs)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        poly::eval(&self.coeffs, z)
    }

    /// `Some(n)` when `f` is exactly the monomial `z^n`.
    pub fn as_monomial(&self) -> Option<usize> {
        let n = self.degree();
        let is_monomial = self
            .coeffs
            .iter()
            .take(n)
            .all(|c| c.norm() == 0.0)
            && (self.coeffs[n] - Complex64::new(1.0, 0.0)).norm() == 0.0;
        is_monomial.then_some(n)
    }
}

/// Converged value of a contour integral.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadratureResult {
    #[serde(serialize_with = "crate::serialize_complex")]
    pub value: Complex64,
    #[serde(rename = "nodes")]
    pub nodes_used: u32,
    #[serde(rename = "err")]
    pub est_error: f64,
}

/// Counterclockwise trapezoid integral of `g` over the circle, with node
/// doubling until two successive estimates agree to `tol` (relative).
pub fn integrate<F>(g: F, c: &ContourSpec, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let tau = std::f64::consts::TAU;
    let weight_at = |theta: f64| -> Complex64 {
        // dz = i r e^{i theta} d theta
        Complex64::new(0.0, c.radius) * Complex64::from_polar(1.0, theta)
    };
    let mut m = c.nodes;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..m {
        let theta = tau * j as f64 / m as f64;
        sum += weight_at(theta) * g(c.point(theta))?;
    }
    let mut estimate = sum * (tau / m as f64);
    loop {
        if m >= MAX_NODES {
            return Err(Error::NonConvergent {
                tol,
                nodes: m,
                last_delta: f64::NAN,
            });
        }
        // the even nodes of the doubled grid are exactly the current grid
        let m2 = m * 2;
        for j in 0..m {
            let theta = tau * (2 * j + 1) as f64 / m2 as f64;
            sum += weight_at(theta) * g(c.point(theta))?;
        }
        let refined = sum * (tau / m2 as f64);
        let delta = (refined - estimate).norm();
        if !refined.re.is_finite() || !refined.im.is_finite() {
            return Err(Error::NonFinite);
        }
        if delta < tol * (1.0 + refined.norm()) {
            return Ok(QuadratureResult {
                value: refined,
                nodes_used: m2,
                est_error: delta,
            });
        }
        if m2 >= MAX_NODES {
            return Err(Error::NonConvergent {
                tol,
                nodes: m2,
                last_delta: delta,
            });
        }
        estimate = refined;
        m = m2;
    }
}

/// One circle per pole of `w`, radius half the distance to the nearest other
/// pole or external point (capped at the pole scale), so each circle encloses
/// exactly its own pole.
pub fn pole_contours(w: &RationalMap, externals: &[Complex64]) -> Result<Vec<ContourSpec>> {
    let guard = w.guard_distance();
    for e in externals {
        let (index, dist) = w.nearest_pole(*e);
        if dist < guard {
            return Err(Error::ExternalPointAtPole { index });
        }
    }
    let cap = w.pole_scale();
    let poles = w.poles();
    poles
        .iter()
        .enumerate()
        .map(|(k, &zk)| {
            let mut d = cap;
            for (j, &zj) in poles.iter().enumerate() {
                if j != k {
                    d = d.min((zj - zk).norm());
                }
            }
            for &e in externals {
                d = d.min((e - zk).norm());
            }
            ContourSpec::new(zk, 0.5 * d, START_NODES)
        })
        .collect()
}

/// Circles around an arbitrary set of isolated points, radius half the
/// nearest mutual distance (capped).
fn isolating_contours(points: &[Complex64], cap: f64) -> Result<Vec<ContourSpec>> {
    points
        .iter()
        .enumerate()
        .map(|(k, &zk)| {
            let mut d = cap;
            for (j, &zj) in points.iter().enumerate() {
                if j != k {
                    d = d.min((zj - zk).norm());
                }
            }
            ContourSpec::new(zk, 0.5 * d, START_NODES)
        })
        .collect()
}

pub(crate) fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, std::f64::consts::TAU)
}

/// Extracts `rho_k` by quadrature: minus the counterclockwise residue of `w`
/// at `z_k`, which is the coefficient of `1/(z_k - z)`.
pub fn residue_at(w: &RationalMap, k: usize) -> Result<Complex64> {
    residue_at_on(w, &pole_contours(w, &[])?[k])
}

/// Same as [`residue_at`] but on a caller-supplied circle around the pole.
pub fn residue_at_on(w: &RationalMap, contour: &ContourSpec) -> Result<Complex64> {
    let q = integrate(|z| w.eval(z), contour, DEFAULT_QUAD_TOL)?;
    Ok(-q.value / two_pi_i())
}

/// `rho_k z_k^m` extracted as the m-th moment over the circle around pole k.
pub fn pole_moment(w: &RationalMap, k: usize, m: u32) -> Result<Complex64> {
    let contour = &pole_contours(w, &[])?[k];
    let q = integrate(
        |z| Ok(z.powu(m) * w.eval(z)?),
        contour,
        DEFAULT_QUAD_TOL,
    )?;
    Ok(-q.value / two_pi_i())
}

/// Moment of the derivative: equals `-n z_k^{n-1} rho_k` (integration by
/// parts).
pub fn derivative_moment(w: &RationalMap, k: usize, n: u32) -> Result<Complex64> {
    let contour = &pole_contours(w, &[])?[k];
    let q = integrate(
        |z| Ok(z.powu(n) * w.eval_derivative(z, 1)?),
        contour,
        DEFAULT_QUAD_TOL,
    )?;
    Ok(-q.value / two_pi_i())
}

fn singularity_guard(points: &[Complex64]) -> f64 {
    SINGULARITY_GUARD * (1.0 + points.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Density of the third-kind differential with residues +1 at `p` and -1 at
/// `q`: `(1/2 pi i) [1/(z-p) - 1/(z-q)]`.
pub fn eval_epsilon(p: Complex64, q: Complex64, z: Complex64) -> Result<Complex64> {
    let guard = singularity_guard(&[p, q, z]);
    if (z - p).norm() < guard || (z - q).norm() < guard {
        return Err(Error::EvalAtSingularity);
    }
    Ok((1.0 / (z - p) - 1.0 / (z - q)) / two_pi_i())
}

/// Density `(1/2 pi i) / ((z-p)(z-q))`; pointwise equal to
/// `eval_epsilon / (p - q)`.
pub fn eval_epsilon_circ(p: Complex64, q: Complex64, z: Complex64) -> Result<Complex64> {
    let guard = singularity_guard(&[p, q, z]);
    if (z - p).norm() < guard || (z - q).norm() < guard {
        return Err(Error::EvalAtSingularity);
    }
    Ok(1.0 / ((z - p) * (z - q)) / two_pi_i())
}

pub(crate) fn check_distinct_pq(p: Complex64, q: Complex64) -> Result<()> {
    let scale = 1.0 + p.norm().max(q.norm());
    if (p - q).norm() < COINCIDENT_TOL * scale {
        return Err(Error::CoincidentPq);
    }
    Ok(())
}

/// Density of the bracket differential
/// `alpha_pq^f(z) = eps_circ(z) * f(z) * w(z) * (w(p) - w(q))`.
pub fn eval_alpha(
    f: &FWeight,
    w: &RationalMap,
    p: Complex64,
    q: Complex64,
    z: Complex64,
) -> Result<Complex64> {
    check_distinct_pq(p, q)?;
    let eps = eval_epsilon_circ(p, q, z)?;
    Ok(eps * f.eval(z) * w.eval(z)? * (w.eval(p)? - w.eval(q)?))
}

/// Residue at infinity of `alpha_pq^f`, computed two independent ways and
/// cross-checked: minus the sum over circles around every finite singularity,
/// and minus the integral over one large circle. The two must agree to 1e-8.
pub fn residue_at_infinity(
    f: &FWeight,
    w: &RationalMap,
    p: Complex64,
    q: Complex64,
) -> Result<Complex64> {
    check_distinct_pq(p, q)?;
    let wp = w.eval(p)?;
    let wq = w.eval(q)?;
    let dw = wp - wq;
    let density = |z: Complex64| -> Result<Complex64> {
        Ok(f.eval(z) * w.eval(z)? * dw / ((z - p) * (z - q)))
    };

    let mut points: Vec<Complex64> = w.poles().to_vec();
    points.push(p);
    points.push(q);
    let extent = 1.0 + points.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let circles = isolating_contours(&points, extent)?;
    let mut finite_sum = Complex64::new(0.0, 0.0);
    for c in &circles {
        finite_sum += integrate(density, c, DEFAULT_QUAD_TOL)?.value;
    }
    let by_finite = -finite_sum / two_pi_i();

    let big = ContourSpec::new(Complex64::new(0.0, 0.0), 10.0 * extent, START_NODES)?;
    let by_large = -integrate(density, &big, DEFAULT_QUAD_TOL)?.value / two_pi_i();

    let discrepancy = (by_finite - by_large).norm();
    if discrepancy > 1e-8 * (1.0 + by_finite.norm()) {
        return Err(Error::NonConvergent {
            tol: 1e-8,
            nodes: big.nodes(),
            last_delta: discrepancy,
        });
    }
    Ok(by_finite)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn circle(center: (f64, f64), radius: f64) -> ContourSpec {
        ContourSpec::new(c(center.0, center.1), radius, START_NODES).unwrap()
    }

    fn map(poles: &[(f64, f64)], residues: &[(f64, f64)]) -> RationalMap {
        RationalMap::new(
            poles.iter().map(|&(re, im)| c(re, im)).collect(),
            residues.iter().map(|&(re, im)| c(re, im)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn integrate_defining_residue_case() {
        let r = integrate(|z| Ok(1.0 / z), &circle((0.0, 0.0), 1.0), 1e-13).unwrap();
        assert!((r.value - two_pi_i()).norm() < 1e-12);
    }

    #[test]
    fn integrate_entire_function_vanishes() {
        let r = integrate(|_| Ok(c(1.0, 0.0)), &circle((0.3, -0.7), 2.5), 1e-13).unwrap();
        assert!(r.value.norm() < 1e-12);
    }

    #[test]
    fn integrate_pole_outside_vanishes() {
        let r = integrate(
            |z| Ok(1.0 / (z - c(3.0, 0.0))),
            &circle((0.0, 0.0), 1.0),
            1e-13,
        )
        .unwrap();
        assert!(r.value.norm() < 1e-12);
    }

    #[test]
    fn integrate_reports_nonconvergence() {
        // essential-singularity-grade oscillation on the contour itself:
        // exp(1/(z - point_on_circle)) cannot converge
        let bad = c(1.0, 0.0);
        let err = integrate(
            |z| Ok((1.0 / (z - bad)).exp()),
            &circle((0.0, 0.0), 1.0),
            1e-13,
        );
        assert!(err.is_err());
    }

    #[test]
    fn node_doubling_stays_within_estimate() {
        let g = |z: Complex64| Ok(z.exp() / z);
        let coarse = integrate(
            g,
            &ContourSpec::new(c(0.0, 0.0), 1.0, 16).unwrap(),
            1e-13,
        )
        .unwrap();
        let fine = integrate(
            g,
            &ContourSpec::new(c(0.0, 0.0), 1.0, 64).unwrap(),
            1e-13,
        )
        .unwrap();
        assert!(
            (coarse.value - fine.value).norm()
                <= coarse.est_error + fine.est_error + 1e-14
        );
        assert!(coarse.est_error >= 0.0);
    }

    #[test]
    fn contour_deformation_invariance() {
        let g = |z: Complex64| Ok(c(2.5, 1.0) / z + z * z);
        let a = integrate(g, &circle((0.0, 0.0), 1.0), 1e-13).unwrap();
        let b = integrate(g, &circle((0.0, 0.0), 0.5), 1e-13).unwrap();
        assert!((a.value - b.value).norm() < 2e-13 * (1.0 + a.value.norm()));
    }

    #[test]
    fn pole_contour_radii_nearest_distance() {
        let w = map(&[(0.0, 0.0), (2.0, 0.0)], &[(1.0, 0.0), (1.0, 0.0)]);
        let cs = pole_contours(&w, &[c(5.0, 0.0)]).unwrap();
        assert!((cs[0].radius() - 1.0).abs() < 1e-15);
        assert!((cs[1].radius() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pole_contour_radius_respects_external() {
        let w = map(&[(0.0, 0.0)], &[(1.0, 0.0)]);
        let cs = pole_contours(&w, &[c(0.1, 0.0)]).unwrap();
        assert!((cs[0].radius() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn external_on_pole_rejected() {
        let w = map(&[(0.0, 0.0)], &[(1.0, 0.0)]);
        assert!(matches!(
            pole_contours(&w, &[c(0.0, 0.0)]),
            Err(Error::ExternalPointAtPole { index: 0 })
        ));
    }

    #[test]
    fn residue_matches_stored_value() {
        let w = map(&[(0.0, 0.0)], &[(3.0, 0.0)]);
        assert!((residue_at(&w, 0).unwrap() - c(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn residue_matches_stored_values_random() {
        for seed in 0..100u64 {
            let n = 1 + (seed as usize) % 6;
            let w = RationalMap::random(n, seed, 0.3).unwrap();
            for k in 0..n {
                let r = residue_at(&w, k).unwrap();
                assert!(
                    (r - w.residues()[k]).norm() < 1e-10,
                    "seed {seed} pole {k}: {r} vs {}",
                    w.residues()[k]
                );
            }
        }
    }

    #[test]
    fn residue_invariant_under_radius_shrink() {
        let w = RationalMap::random(3, 5, 0.4).unwrap();
        let contours = pole_contours(&w, &[]).unwrap();
        for (k, contour) in contours.iter().enumerate() {
            let a = residue_at_on(&w, contour).unwrap();
            let b = residue_at_on(&w, &contour.scaled(0.1)).unwrap();
            assert!((a - b).norm() < 1e-9, "pole {k}: {a} vs {b}");
        }
    }

    #[test]
    fn pole_moment_values() {
        let w = map(&[(2.0, 0.0)], &[(1.0, 0.0)]);
        assert!((pole_moment(&w, 0, 1).unwrap() - c(2.0, 0.0)).norm() < 1e-11);
        let w = map(&[(2.0, 0.0)], &[(3.0, 0.0)]);
        assert!((pole_moment(&w, 0, 2).unwrap() - c(12.0, 0.0)).norm() < 1e-10);
        // m = 0 reduces to the residue
        let r0 = pole_moment(&w, 0, 0).unwrap();
        let res = residue_at(&w, 0).unwrap();
        assert!((r0 - res).norm() < 1e-12);
    }

    #[test]
    fn derivative_moment_values() {
        let w = map(&[(2.0, 0.0)], &[(1.0, 0.0)]);
        // n = 0: derivative of an analytic germ has no residue
        assert!(derivative_moment(&w, 0, 0).unwrap().norm() < 1e-12);
        // n = 1: -1 * z^0 * rho = -1
        assert!((derivative_moment(&w, 0, 1).unwrap() - c(-1.0, 0.0)).norm() < 1e-11);
        let w = map(&[(2.0, 0.0)], &[(3.0, 0.0)]);
        // n = 3: -3 * 2^2 * 3 = -36
        assert!((derivative_moment(&w, 0, 3).unwrap() - c(-36.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn derivative_moment_formula_sweep() {
        let w = RationalMap::random(3, 2, 0.4).unwrap();
        for k in 0..3 {
            let zk = w.poles()[k];
            let rk = w.residues()[k];
            for n in 0..=5u32 {
                let expect = if n == 0 {
                    c(0.0, 0.0)
                } else {
                    -(n as f64) * zk.powu(n - 1) * rk
                };
                let got = derivative_moment(&w, k, n).unwrap();
                assert!(
                    (got - expect).norm() < 1e-9 * (1.0 + expect.norm()),
                    "k={k} n={n}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn epsilon_residues_plus_minus_one() {
        let p = c(0.3, 0.2);
        let q = c(-1.1, 0.5);
        let around_p = ContourSpec::new(p, 0.4, START_NODES).unwrap();
        let around_q = ContourSpec::new(q, 0.4, START_NODES).unwrap();
        let rp = integrate(|z| eval_epsilon(p, q, z), &around_p, 1e-13).unwrap();
        let rq = integrate(|z| eval_epsilon(p, q, z), &around_q, 1e-13).unwrap();
        assert!((rp.value - c(1.0, 0.0)).norm() < 1e-12);
        assert!((rq.value - c(-1.0, 0.0)).norm() < 1e-12);
        // circle enclosing neither
        let elsewhere = ContourSpec::new(c(4.0, 4.0), 0.5, START_NODES).unwrap();
        let r0 = integrate(|z| eval_epsilon(p, q, z), &elsewhere, 1e-13).unwrap();
        assert!(r0.value.norm() < 1e-12);
    }

    #[test]
    fn epsilon_circ_value_and_identity() {
        let v = eval_epsilon_circ(c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        let expect = c(0.5, 0.0) / two_pi_i();
        assert!((v - expect).norm() < 1e-15);

        // eps_pq(z)/(p-q) = eps_circ_pq(z) pointwise
        let p = c(0.4, -0.3);
        let q = c(-0.9, 1.2);
        for j in 0..100 {
            let t = j as f64;
            let z = c((t * 0.731).sin() * 2.0 + 2.5, (t * 1.13).cos() * 2.0 - 2.3);
            let a = eval_epsilon(p, q, z).unwrap() / (p - q);
            let b = eval_epsilon_circ(p, q, z).unwrap();
            assert!((a - b).norm() < 1e-13 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn epsilon_at_singularity_rejected() {
        let p = c(0.0, 0.0);
        let q = c(1.0, 0.0);
        assert!(matches!(
            eval_epsilon(p, q, p),
            Err(Error::EvalAtSingularity)
        ));
        assert!(matches!(
            eval_epsilon_circ(p, q, q),
            Err(Error::EvalAtSingularity)
        ));
    }

    #[test]
    fn alpha_factorwise() {
        let f = FWeight::one();
        let w = map(&[(0.0, 0.0)], &[(1.0, 0.0)]);
        let p = c(1.0, 0.0);
        let q = c(2.0, 0.0);
        let z = c(0.0, 1.0);
        let alpha = eval_alpha(&f, &w, p, q, z).unwrap();
        let eps = eval_epsilon_circ(p, q, z).unwrap();
        let wz = w.eval(z).unwrap();
        let expect = eps * wz * (c(-1.0, 0.0) - c(-0.5, 0.0));
        assert!((alpha - expect).norm() < 1e-15);
    }

    #[test]
    fn alpha_vanishes_when_w_equal() {
        // poles +-1 with residues +-1 give the even map 2/(1 - z^2),
        // so w(2) = w(-2) and the (w(p) - w(q)) factor kills alpha
        let w = map(&[(1.0, 0.0), (-1.0, 0.0)], &[(1.0, 0.0), (-1.0, 0.0)]);
        let f = FWeight::one();
        let alpha = eval_alpha(&f, &w, c(2.0, 0.0), c(-2.0, 0.0), c(0.0, 3.0)).unwrap();
        assert!(alpha.norm() < 1e-15);
    }

    #[test]
    fn alpha_coincident_pq_rejected() {
        let w = map(&[(0.0, 0.0)], &[(1.0, 0.0)]);
        let p = c(1.0, 0.0);
        assert!(matches!(
            eval_alpha(&FWeight::one(), &w, p, p, c(0.0, 1.0)),
            Err(Error::CoincidentPq)
        ));
    }

    #[test]
    fn residue_at_infinity_dichotomy() {
        let w = RationalMap::random(2, 3, 0.5).unwrap();
        let p = c(2.9, 0.4);
        let q = c(-2.7, 1.9);
        for n in 0..=1usize {
            let r = residue_at_infinity(&FWeight::monomial(n), &w, p, q).unwrap();
            assert!(r.norm() < 1e-10, "n={n}: residue at infinity {r}");
        }
        let r2 = residue_at_infinity(&FWeight::monomial(2), &w, p, q).unwrap();
        assert!(r2.norm() > 1e-6, "n=2 should not vanish: {r2}");
        // independent series oracle: res_inf = dw * sum_{i+j=n-2} m_i h_j(p,q)
        let dw = w.eval(p).unwrap() - w.eval(q).unwrap();
        let m0: Complex64 = w.residues().iter().sum();
        assert!((r2 - dw * m0).norm() < 1e-9 * (1.0 + r2.norm()));
        let m1: Complex64 = w
            .poles()
            .iter()
            .zip(w.residues())
            .map(|(&z, &r)| z * r)
            .sum();
        let r3 = residue_at_infinity(&FWeight::monomial(3), &w, p, q).unwrap();
        let expect3 = dw * (m1 + m0 * (p + q));
        assert!((r3 - expect3).norm() < 1e-9 * (1.0 + r3.norm()));
    }

    #[test]
    fn monomial_helpers() {
        let f = FWeight::monomial(3);
        assert_eq!(f.as_monomial(), Some(3));
        assert_eq!(f.degree(), 3);
        assert!((f.eval(c(2.0, 0.0)) - c(8.0, 0.0)).norm() < 1e-15);
        let g = FWeight::from_coeffs(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(g.as_monomial(), None);
    }
}
