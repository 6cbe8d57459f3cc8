//! Coordinate Poisson tensors: extraction from pointwise brackets, the
//! Jacobiator, numerical rank and nullspaces.
//!
//! The coordinate order is fixed crate-wide as `(z_1..z_N, rho_1..rho_N)`.
//! A tensor entry `J[i][j]` is the bracket of coordinate `i` with coordinate
//! `j`; every routine here treats the entries as holomorphic functions of the
//! complex coordinates.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::contour::{pole_contours, ContourSpec, MAX_NODES};
use crate::error::{Error, Result};
use crate::ratfun::RationalMap;

/// Minimum residue modulus for the Leibniz division step.
const LEIBNIZ_RHO_FLOOR: f64 = 1e-8;

/// Default relative step for entry derivatives inside the Jacobiator.
pub const DEFAULT_JACOBIATOR_STEP: f64 = 1e-5;

/// Default tolerance for the double-contour moments. The node sums carry a
/// roundoff floor slightly above 1e-12 for tightly clustered poles, while
/// the geometric convergence makes the accepted truncation error roughly the
/// square of the last doubling delta, so this is not the accuracy limit.
pub const DEFAULT_EXTRACT_TOL: f64 = 1e-11;

type TensorEvalFn = dyn Fn(&[Complex64]) -> Result<DMatrix<Complex64>> + Send + Sync;

/// A field of antisymmetric matrices over the coordinate space.
pub struct PoissonTensorField {
    dim: usize,
    label: String,
    eval_fn: Box<TensorEvalFn>,
}

impl PoissonTensorField {
    pub fn new<F>(dim: usize, label: impl Into<String>, eval_fn: F) -> Self
    where
        F: Fn(&[Complex64]) -> Result<DMatrix<Complex64>> + Send + Sync + 'static,
    {
        Self {
            dim,
            label: label.into(),
            eval_fn: Box::new(eval_fn),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn evaluate(&self, x: &[Complex64]) -> Result<DMatrix<Complex64>> {
        assert_eq!(x.len(), self.dim, "coordinate vector has wrong length");
        (self.eval_fn)(x)
    }
}

impl std::fmt::Debug for PoissonTensorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PoissonTensorField")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .finish()
    }
}

/// Jacobiator evaluation summary.
#[derive(Debug, Clone, Serialize)]
pub struct JacobiReport {
    /// Largest normalized Jacobiator component.
    pub max_defect: f64,
    /// Index triple realizing the maximum.
    pub worst_triple: (usize, usize, usize),
    /// Number of index triples evaluated.
    pub samples: usize,
    /// Scale `max(1, ||J||^2 / (1 + max |x_l|))` used to normalize.
    pub normalization: f64,
}

/// `max_ij |J + J^T|_ij`, the antisymmetry residual.
pub fn antisymmetry_residual(j: &DMatrix<Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..j.nrows() {
        for b in 0..j.ncols() {
            worst = worst.max((j[(a, b)] + j[(b, a)]).norm());
        }
    }
    worst
}

fn max_norm(j: &DMatrix<Complex64>) -> f64 {
    j.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// The four moment integrals of a two-point kernel over a circle pair:
/// weights 1, zeta, eta and zeta*eta, each normalized by `(2 pi i)^{-2}`.
/// When the circles coincide the inner grid is shifted by a half step so
/// nodes never collide with the outer grid.
fn double_contour_moments<B>(
    kernel: &B,
    ck: &ContourSpec,
    cj: &ContourSpec,
    same_circle: bool,
    tol: f64,
) -> Result<[Complex64; 4]>
where
    B: Fn(Complex64, Complex64) -> Result<Complex64>,
{
    let tau = std::f64::consts::TAU;
    let mut m = ck.nodes().max(cj.nodes());
    let mut previous: Option<[Complex64; 4]> = None;
    loop {
        let mut sums = [Complex64::new(0.0, 0.0); 4];
        let offset = if same_circle { 0.5 } else { 0.0 };
        for a in 0..m {
            let theta = tau * a as f64 / m as f64;
            let zeta = ck.point(theta);
            let wz = Complex64::new(0.0, ck.radius()) * Complex64::from_polar(1.0, theta);
            for b in 0..m {
                let phi = tau * (b as f64 + offset) / m as f64;
                let eta = cj.point(phi);
                let we = Complex64::new(0.0, cj.radius()) * Complex64::from_polar(1.0, phi);
                let weight = wz * we;
                let value = kernel(zeta, eta)?;
                sums[0] += weight * value;
                sums[1] += weight * zeta * value;
                sums[2] += weight * eta * value;
                sums[3] += weight * zeta * eta * value;
            }
        }
        let scale = (tau / m as f64) * (tau / m as f64);
        let denom = Complex64::new(0.0, tau) * Complex64::new(0.0, tau);
        let current = [
            sums[0] * scale / denom,
            sums[1] * scale / denom,
            sums[2] * scale / denom,
            sums[3] * scale / denom,
        ];
        if current
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        if let Some(prev) = previous {
            let converged = current
                .iter()
                .zip(prev.iter())
                .all(|(c, p)| (c - p).norm() < tol * (1.0 + c.norm()));
            if converged {
                return Ok(current);
            }
        }
        if m * 2 > MAX_NODES {
            let last_delta = previous
                .map(|prev| (current[0] - prev[0]).norm())
                .unwrap_or(f64::NAN);
            return Err(Error::NonConvergent {
                tol,
                nodes: m,
                last_delta,
            });
        }
        previous = Some(current);
        m *= 2;
    }
}

/// Extracts the coordinate Poisson tensor of a pointwise bracket
/// `B(zeta, eta) = {w(zeta), w(eta)}` at the configuration `w`.
///
/// The residue functionals give `{rho_k, rho_j}` directly as double contour
/// integrals of the kernel; the moment-weighted integrals give
/// `{z_k rho_k, rho_j}` and `{z_k rho_k, z_j rho_j}`, and the Leibniz rule is
/// solved for `{z_k, rho_j}` and `{z_k, z_j}`. Configurations with a residue
/// modulus below 1e-8 are rejected rather than regularized.
pub fn extract_coordinate_tensor<B>(kernel: B, w: &RationalMap) -> Result<DMatrix<Complex64>>
where
    B: Fn(Complex64, Complex64) -> Result<Complex64>,
{
    let n = w.degree();
    let poles = w.poles();
    let residues = w.residues();
    for (index, rho) in residues.iter().enumerate() {
        if rho.norm() < LEIBNIZ_RHO_FLOOR {
            return Err(Error::LeibnizSolveFailure {
                index,
                magnitude: rho.norm(),
            });
        }
    }
    // Shrink the isolating circles so that two different circles keep a gap:
    // kernels of closed-form brackets carry a removable zeta = eta point and
    // must not be sampled arbitrarily close to it. Start the doubling at 32
    // nodes per axis; the geometric convergence reaches the target in one or
    // two doublings anyway.
    let contours: Vec<ContourSpec> = pole_contours(w, &[])?
        .into_iter()
        .map(|c| ContourSpec::new(c.center(), 0.8 * c.radius(), 32))
        .collect::<Result<_>>()?;

    // One quadrature per unordered pair; the transposed moments follow from
    // the exact antisymmetry of the kernel (the reversed-order node sums
    // would contain the same terms up to summation order anyway):
    // m00(j,k) = -m00(k,j), m10(j,k) = -m01(k,j), m11(j,k) = -m11(k,j).
    let mut m00 = DMatrix::<Complex64>::zeros(n, n);
    let mut m10 = DMatrix::<Complex64>::zeros(n, n);
    let mut m11 = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        for j in k..n {
            let moments = double_contour_moments(
                &kernel,
                &contours[k],
                &contours[j],
                k == j,
                DEFAULT_EXTRACT_TOL,
            )?;
            if j == k {
                // over the symmetric domain O_k x O_k the integrals with
                // symmetric weight (1 and zeta*eta) of the antisymmetric
                // kernel vanish identically; only the zeta-weighted moment
                // carries information
                m10[(k, k)] = moments[1];
            } else {
                m00[(k, j)] = moments[0];
                m10[(k, j)] = moments[1];
                m11[(k, j)] = moments[3];
                m00[(j, k)] = -moments[0];
                m10[(j, k)] = -moments[2];
                m11[(j, k)] = -moments[3];
            }
        }
    }

    // {z_k, rho_j} = ({z_k rho_k, rho_j} - z_k {rho_k, rho_j}) / rho_k
    let mut z_rho = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        for j in 0..n {
            z_rho[(k, j)] = (m10[(k, j)] - poles[k] * m00[(k, j)]) / residues[k];
        }
    }

    let mut out = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    for k in 0..n {
        for j in 0..n {
            // {z_k, z_j} from the doubly moment-weighted bracket
            let rho_z_kj = -z_rho[(j, k)]; // {rho_k, z_j}
            let zz = (m11[(k, j)]
                - poles[k] * poles[j] * m00[(k, j)]
                - poles[k] * residues[j] * rho_z_kj
                - residues[k] * poles[j] * z_rho[(k, j)])
                / (residues[k] * residues[j]);
            out[(k, j)] = zz;
            out[(k, n + j)] = z_rho[(k, j)];
            out[(n + k, j)] = rho_z_kj;
            out[(n + k, n + j)] = m00[(k, j)];
        }
    }
    Ok(out)
}

/// Pushes a coordinate tensor back to the pointwise bracket through the chain
/// rule: `{w(p), w(q)} = sum_ij dw(p)/dx_i J_ij dw(q)/dx_j` with
/// `dw(p)/dz_k = -rho_k/(z_k - p)^2` and `dw(p)/drho_k = 1/(z_k - p)`.
pub fn recontract_bracket(
    j: &DMatrix<Complex64>,
    w: &RationalMap,
    p: Complex64,
    q: Complex64,
) -> Result<Complex64> {
    let n = w.degree();
    assert_eq!(j.nrows(), 2 * n);
    w.eval(p)?;
    w.eval(q)?;
    let grad = |point: Complex64| -> Vec<Complex64> {
        let mut g = Vec::with_capacity(2 * n);
        for k in 0..n {
            let d = w.poles()[k] - point;
            g.push(-w.residues()[k] / (d * d));
        }
        for k in 0..n {
            let d = w.poles()[k] - point;
            g.push(1.0 / d);
        }
        g
    };
    let gp = grad(p);
    let gq = grad(q);
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..2 * n {
        for b in 0..2 * n {
            acc += gp[a] * j[(a, b)] * gq[b];
        }
    }
    Ok(acc)
}

/// Finite-difference Jacobiator of a tensor field at `x`.
///
/// Entry derivatives use central differences with a real step
/// `step * (1 + |x_l|)` in each complex coordinate (the entries are
/// holomorphic, so one direction determines the complex derivative). The
/// defect is `max_{i<j<k} |sum_l J_il d_l J_jk + cyc|` divided by
/// `max(1, ||J||^2 / (1 + max |x_l|))`.
pub fn jacobiator(
    field: &PoissonTensorField,
    x: &[Complex64],
    step: f64,
) -> Result<JacobiReport> {
    let d = field.dim();
    let j0 = field.evaluate(x)?;
    let mut derivs: Vec<DMatrix<Complex64>> = Vec::with_capacity(d);
    for l in 0..d {
        let h = step * (1.0 + x[l].norm());
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[l] += Complex64::new(h, 0.0);
        xm[l] -= Complex64::new(h, 0.0);
        let jp = field.evaluate(&xp)?;
        let jm = field.evaluate(&xm)?;
        derivs.push((jp - jm) / Complex64::new(2.0 * h, 0.0));
    }

    let mut max_raw: f64 = 0.0;
    let mut worst = (0, 0, 0);
    let mut samples = 0usize;
    for i in 0..d {
        for j in (i + 1)..d {
            for k in (j + 1)..d {
                let mut t = Complex64::new(0.0, 0.0);
                for l in 0..d {
                    t += j0[(i, l)] * derivs[l][(j, k)]
                        + j0[(j, l)] * derivs[l][(k, i)]
                        + j0[(k, l)] * derivs[l][(i, j)];
                }
                samples += 1;
                let norm = t.norm();
                if norm > max_raw {
                    max_raw = norm;
                    worst = (i, j, k);
                }
            }
        }
    }
    let x_scale = 1.0 + x.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let jmax = max_norm(&j0);
    let normalization = (jmax * jmax / x_scale).max(1.0);
    Ok(JacobiReport {
        max_defect: max_raw / normalization,
        worst_triple: worst,
        samples,
        normalization,
    })
}

/// Count of singular values above `threshold * sigma_max`.
pub fn numerical_rank(j: &DMatrix<Complex64>, threshold: f64) -> usize {
    let svd = j.clone().svd(false, false);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|&&s| s > threshold * sigma_max)
        .count()
}

/// Orthonormal kernel basis at the given relative threshold.
pub fn nullspace(j: &DMatrix<Complex64>, threshold: f64) -> Vec<Vec<Complex64>> {
    let n = j.ncols();
    let svd = j.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let mut basis = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if sigma_max == 0.0 || s <= threshold * sigma_max {
            // kernel vector = conjugated row of V^H
            basis.push((0..n).map(|c| v_t[(i, c)].conj()).collect());
        }
    }
    // a square zero matrix has a full kernel even though the SVD reports
    // min(n, n) singular values; nothing more to add for square inputs
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket;
    use crate::deriv;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ah_kernel(w: &RationalMap) -> impl Fn(Complex64, Complex64) -> Result<Complex64> + '_ {
        move |p, q| Ok(bracket::bracket_ah(w, p, q)?.value)
    }

    #[test]
    fn extraction_diagonal_blocks_vanish() {
        let w = RationalMap::random(2, 9, 0.5).unwrap();
        let j = extract_coordinate_tensor(ah_kernel(&w), &w).unwrap();
        for i in 0..4 {
            assert!(j[(i, i)].norm() < 1e-12, "diagonal {i}: {}", j[(i, i)]);
        }
    }

    #[test]
    fn extraction_recontracts_to_ah_bracket() {
        for seed in [1u64, 4, 8] {
            let w = RationalMap::random(2, seed, 0.5).unwrap();
            let j = extract_coordinate_tensor(ah_kernel(&w), &w).unwrap();
            let p = c(2.9, 0.7);
            let q = c(-2.8, -1.4);
            let direct = bracket::bracket_ah(&w, p, q).unwrap().value;
            let back = recontract_bracket(&j, &w, p, q).unwrap();
            assert!(
                (direct - back).norm() < 1e-8 * (1.0 + direct.norm()),
                "seed {seed}: {direct} vs {back}"
            );
        }
    }

    #[test]
    fn extraction_matches_closed_tensor_for_derivative_bracket() {
        let w = RationalMap::random(2, 3, 0.5).unwrap();
        for n in 0..=2u32 {
            let kernel = |p, q| deriv::bracket_n(n, &w, p, q);
            let j = extract_coordinate_tensor(kernel, &w).unwrap();
            let closed = deriv::coord_tensor_closed(n, w.poles(), w.residues());
            let diff = max_norm(&(&j - &closed));
            assert!(diff < 1e-8, "n={n}: max entry mismatch {diff}");
        }
    }

    #[test]
    fn extracted_tensor_fields_are_poisson() {
        // tensors extracted from the first-hierarchy closed forms have
        // vanishing Jacobiator; the differentiation step is chosen above the
        // quadrature noise of the extracted entries
        let w = RationalMap::random(2, 4, 0.5).unwrap();
        let x: Vec<Complex64> = w.poles().iter().chain(w.residues()).cloned().collect();
        for degree in 0..=1usize {
            let field = PoissonTensorField::new(4, format!("closed f deg {degree}"), move |y| {
                let wy = RationalMap::new(y[..2].to_vec(), y[2..].to_vec())?;
                extract_coordinate_tensor(
                    |p, q| {
                        Ok(if degree == 0 {
                            bracket::bracket_ah(&wy, p, q)?.value
                        } else {
                            bracket::bracket_z(&wy, p, q)?.value
                        })
                    },
                    &wy,
                )
            });
            let report = jacobiator(&field, &x, 1e-4).unwrap();
            assert!(
                report.max_defect < 1e-7,
                "f degree {degree}: defect {}",
                report.max_defect
            );
        }
    }

    #[test]
    fn leibniz_floor_enforced() {
        let w = RationalMap::new(vec![c(0.0, 0.0)], vec![c(1e-9, 0.0)]).unwrap();
        let err = extract_coordinate_tensor(ah_kernel(&w), &w).unwrap_err();
        assert!(matches!(err, Error::LeibnizSolveFailure { index: 0, .. }));
    }

    #[test]
    fn jacobiator_constant_tensor_is_exact_zero() {
        let field = PoissonTensorField::new(4, "constant", |_| {
            let mut j = DMatrix::<Complex64>::zeros(4, 4);
            for a in 0..2 {
                for b in 0..2 {
                    j[(a, 2 + b)] = c(1.0, 0.0);
                    j[(2 + a, b)] = c(-1.0, 0.0);
                }
            }
            Ok(j)
        });
        let x = vec![c(1.0, 0.0); 4];
        let report = jacobiator(&field, &x, DEFAULT_JACOBIATOR_STEP).unwrap();
        assert!(report.max_defect < 1e-12);
        assert_eq!(report.samples, 4);
    }

    #[test]
    fn jacobiator_step_halving_is_stable() {
        let w = RationalMap::random(2, 6, 0.5).unwrap();
        let field = deriv::closed_tensor_field(2, w.degree());
        let x: Vec<Complex64> = w
            .poles()
            .iter()
            .chain(w.residues())
            .cloned()
            .collect();
        let d1 = jacobiator(&field, &x, 1e-5).unwrap().max_defect;
        let d2 = jacobiator(&field, &x, 5e-6).unwrap().max_defect;
        let larger = d1.max(d2).max(1e-300);
        assert!(d1.max(d2) / d2.min(d1).max(1e-300) < 10.0 || larger < 1e-11,
            "step sensitivity: {d1} vs {d2}");
    }

    #[test]
    fn rank_and_nullity_add_up() {
        let ones = deriv::CanonicalTensor::ones_block(3).matrix();
        assert_eq!(numerical_rank(&ones, 1e-10), 2);
        let kernel = nullspace(&ones, 1e-10);
        assert_eq!(kernel.len(), 4);
        for v in &kernel {
            let vec = nalgebra::DVector::from_column_slice(v);
            let residual = (&ones * &vec).norm();
            assert!(residual < 1e-10, "kernel residual {residual}");
        }

        let standard = deriv::CanonicalTensor::identity_block(3).matrix();
        assert_eq!(numerical_rank(&standard, 1e-10), 6);
        assert!(nullspace(&standard, 1e-10).is_empty());

        let zero = DMatrix::<Complex64>::zeros(4, 4);
        assert_eq!(numerical_rank(&zero, 1e-10), 0);
        assert_eq!(nullspace(&zero, 1e-10).len(), 4);
    }

    #[test]
    fn antisymmetry_residual_detects_defect() {
        let mut j = DMatrix::<Complex64>::zeros(2, 2);
        j[(0, 1)] = c(1.0, 0.0);
        j[(1, 0)] = c(-1.0, 0.0);
        assert!(antisymmetry_residual(&j) < 1e-15);
        j[(1, 0)] = c(-0.5, 0.0);
        assert!((antisymmetry_residual(&j) - 0.5).abs() < 1e-15);
    }
}
