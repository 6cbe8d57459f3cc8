//! The second bracket hierarchy
//! `{w(p), w(q)}^n = p^n w'(p) w(q) - q^n w'(q) w(p)`, its coordinate
//! tensors, Darboux charts, degeneracy analysis and Casimirs.
//!
//! Coordinate order is `(z_1..z_N, rho_1..rho_N)`; the coordinate brackets
//! are taken from the closed forms
//!
//! ```text
//! {rho_k, rho_p} = -rho_k rho_p n (z_k^{n-1} - z_p^{n-1})
//! {rho_p, z_k}   =  rho_p z_k^n
//! {z_k, z_p}     =  0
//! ```
//!
//! with the signs of these three lines treated as normative.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratfun::RationalMap;
use crate::tensor::{self, PoissonTensorField};

/// Relative threshold for "the pushforward tensor is constant".
pub const CHART_CONSTANCY_TOL: f64 = 1e-8;

/// Singular-value threshold for rank decisions.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// `{w(p), w(q)}^n = p^n w'(p) w(q) - q^n w'(q) w(p)`.
///
/// The formula is regular at `p = q` (antisymmetry forces zero there), so
/// coincident points are allowed.
pub fn bracket_n(n: u32, w: &RationalMap, p: Complex64, q: Complex64) -> Result<Complex64> {
    let wp = w.eval(p)?;
    let wq = w.eval(q)?;
    let dp = w.eval_derivative(p, 1)?;
    let dq = w.eval_derivative(q, 1)?;
    Ok(p.powu(n) * dp * wq - q.powu(n) * dq * wp)
}

/// `{w'(p), w(q)} = n p^{n-1} w'(p) w(q) + p^n w''(p) w(q) - q^n w'(q) w'(p)`.
pub fn bracket_n_deriv(n: u32, w: &RationalMap, p: Complex64, q: Complex64) -> Result<Complex64> {
    let wq = w.eval(q)?;
    let wp1 = w.eval_derivative(p, 1)?;
    let wp2 = w.eval_derivative(p, 2)?;
    let wq1 = w.eval_derivative(q, 1)?;
    let first = if n == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        (n as f64) * p.powu(n - 1) * wp1 * wq
    };
    Ok(first + p.powu(n) * wp2 * wq - q.powu(n) * wq1 * wp1)
}

/// `{{w(p), w(q)}, w(r)}` assembled from the Leibniz rule and the derivative
/// bracket, exactly as in the closed-form Jacobi proof.
fn double_bracket_n(
    n: u32,
    w: &RationalMap,
    p: Complex64,
    q: Complex64,
    r: Complex64,
) -> Result<Complex64> {
    let wp = w.eval(p)?;
    let wq = w.eval(q)?;
    let dp = w.eval_derivative(p, 1)?;
    let dq = w.eval_derivative(q, 1)?;
    Ok(p.powu(n) * wq * bracket_n_deriv(n, w, p, r)?
        + p.powu(n) * dp * bracket_n(n, w, q, r)?
        - q.powu(n) * wp * bracket_n_deriv(n, w, q, r)?
        - q.powu(n) * dq * bracket_n(n, w, p, r)?)
}

/// Normalized cyclic sum of the three double brackets; zero for every `n`.
pub fn pointwise_jacobi_deriv_hierarchy(
    n: u32,
    w: &RationalMap,
    p: Complex64,
    q: Complex64,
    r: Complex64,
) -> Result<f64> {
    let t1 = double_bracket_n(n, w, p, q, r)?;
    let t2 = double_bracket_n(n, w, q, r, p)?;
    let t3 = double_bracket_n(n, w, r, p, q)?;
    let scale = t1.norm().max(t2.norm()).max(t3.norm()).max(1e-300);
    Ok((t1 + t2 + t3).norm() / scale)
}

/// Closed-form coordinate tensor at the configuration `(z, rho)`.
pub fn coord_tensor_closed(n: u32, z: &[Complex64], rho: &[Complex64]) -> DMatrix<Complex64> {
    let big_n = z.len();
    assert_eq!(big_n, rho.len());
    let mut j = DMatrix::<Complex64>::zeros(2 * big_n, 2 * big_n);
    for k in 0..big_n {
        for p in 0..big_n {
            // {z_k, rho_p} = -rho_p z_k^n
            let z_rho = -rho[p] * z[k].powu(n);
            j[(k, big_n + p)] = z_rho;
            j[(big_n + p, k)] = -z_rho;
            // {rho_k, rho_p} = -rho_k rho_p n (z_k^{n-1} - z_p^{n-1})
            if n > 0 && k != p {
                j[(big_n + k, big_n + p)] =
                    -rho[k] * rho[p] * (n as f64) * (z[k].powu(n - 1) - z[p].powu(n - 1));
            }
        }
    }
    j
}

/// The closed tensor as a field over `(z, rho)` coordinates.
pub fn closed_tensor_field(n: u32, big_n: usize) -> PoissonTensorField {
    PoissonTensorField::new(2 * big_n, format!("closed[n={n}]"), move |x| {
        Ok(coord_tensor_closed(n, &x[..big_n], &x[big_n..]))
    })
}

/// Coordinate tensor recovered from double contour integrals of the
/// pointwise bracket, with the Leibniz relations solved for the mixed
/// entries. Oracle counterpart of [`coord_tensor_closed`].
pub fn coord_tensor_numeric(n: u32, w: &RationalMap) -> Result<DMatrix<Complex64>> {
    tensor::extract_coordinate_tensor(|p, q| bracket_n(n, w, p, q), w)
}

/// Constant canonical matrices in the `(I, theta)` block order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CanonicalVariant {
    /// `[[0, I], [-I, 0]]` with the N x N identity.
    IdentityBlock,
    /// `[[0, 1], [-1, 0]]` with the all-ones N x N matrix.
    OnesBlock,
}

/// One of the two constant antisymmetric reference tensors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CanonicalTensor {
    variant: CanonicalVariant,
    n: usize,
}

impl CanonicalTensor {
    pub fn identity_block(n: usize) -> Self {
        Self {
            variant: CanonicalVariant::IdentityBlock,
            n,
        }
    }

    pub fn ones_block(n: usize) -> Self {
        Self {
            variant: CanonicalVariant::OnesBlock,
            n,
        }
    }

    pub fn variant(&self) -> CanonicalVariant {
        self.variant
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        let n = self.n;
        let mut j = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
        for a in 0..n {
            for b in 0..n {
                let fill = match self.variant {
                    CanonicalVariant::IdentityBlock => a == b,
                    CanonicalVariant::OnesBlock => true,
                };
                if fill {
                    j[(a, n + b)] = Complex64::new(1.0, 0.0);
                    j[(n + a, b)] = Complex64::new(-1.0, 0.0);
                }
            }
        }
        j
    }
}

/// Invertible chart `(z, rho) -> (I, theta)` with
/// `I_k = z_k` (n = 0), `log z_k` (n = 1), `z_k^{1-n}` (n >= 2), and
/// `theta_k = log rho_k + c log z_k`. The charts stated in closed form have
/// `c = 0`; the corrected family varies `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarbouxChart {
    n: u32,
    log_z_coeff: f64,
}

impl DarbouxChart {
    /// The chart with `theta_k = log rho_k`.
    pub fn standard(n: u32) -> Self {
        Self {
            n,
            log_z_coeff: 0.0,
        }
    }

    /// Member of the one-parameter family `theta_k = log rho_k + c log z_k`.
    pub fn corrected(n: u32, c: f64) -> Self {
        Self { n, log_z_coeff: c }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn log_z_coeff(&self) -> f64 {
        self.log_z_coeff
    }

    fn needs_log_z(&self) -> bool {
        self.n >= 1 || self.log_z_coeff != 0.0
    }

    fn check_domain(&self, z: &[Complex64], rho: &[Complex64]) -> Result<()> {
        for &zk in z {
            if self.needs_log_z() && zk.norm() == 0.0 {
                return Err(Error::DomainViolation {
                    reason: "pole at the origin".into(),
                });
            }
            if self.needs_log_z() && zk.im == 0.0 && zk.re < 0.0 {
                return Err(Error::DomainViolation {
                    reason: "pole on the negative real axis (log branch cut)".into(),
                });
            }
            if self.n >= 2 {
                // principal branches compose only inside this sector
                let limit = std::f64::consts::PI / (self.n as f64 - 1.0);
                if zk.arg().abs() >= limit {
                    return Err(Error::DomainViolation {
                        reason: format!("pole argument outside the sector |arg z| < pi/{}", self.n - 1),
                    });
                }
            }
        }
        for &rk in rho {
            if rk.norm() == 0.0 || (rk.im == 0.0 && rk.re < 0.0) {
                return Err(Error::DomainViolation {
                    reason: "residue on the log branch cut".into(),
                });
            }
        }
        Ok(())
    }

    /// `(z, rho) -> (I, theta)`.
    pub fn forward(&self, z: &[Complex64], rho: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        self.check_domain(z, rho)?;
        let action: Vec<Complex64> = z
            .iter()
            .map(|&zk| match self.n {
                0 => zk,
                1 => zk.ln(),
                n => zk.powi(1 - n as i32),
            })
            .collect();
        let angle: Vec<Complex64> = z
            .iter()
            .zip(rho)
            .map(|(&zk, &rk)| rk.ln() + self.log_z_coeff * zk.ln())
            .collect();
        Ok((action, angle))
    }

    /// `(I, theta) -> (z, rho)`.
    pub fn inverse(&self, action: &[Complex64], angle: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let z: Vec<Complex64> = action
            .iter()
            .map(|&ik| match self.n {
                0 => ik,
                1 => ik.exp(),
                n => ik.powf(1.0 / (1.0 - n as f64)),
            })
            .collect();
        let rho: Vec<Complex64> = z
            .iter()
            .zip(angle)
            .map(|(&zk, &tk)| (tk - self.log_z_coeff * zk.ln()).exp())
            .collect();
        self.check_domain(&z, &rho)?;
        Ok((z, rho))
    }

    /// Jacobian `d(I, theta) / d(z, rho)` at the point, in block form
    /// `[[diag dI/dz, 0], [diag c/z, diag 1/rho]]`.
    pub fn jacobian(&self, z: &[Complex64], rho: &[Complex64]) -> Result<DMatrix<Complex64>> {
        self.check_domain(z, rho)?;
        let big_n = z.len();
        let mut a = DMatrix::<Complex64>::zeros(2 * big_n, 2 * big_n);
        for k in 0..big_n {
            let di = match self.n {
                0 => Complex64::new(1.0, 0.0),
                1 => 1.0 / z[k],
                n => (1.0 - n as f64) * z[k].powi(-(n as i32)),
            };
            if !di.re.is_finite() || !di.im.is_finite() || di.norm() == 0.0 {
                return Err(Error::SingularJacobian);
            }
            a[(k, k)] = di;
            a[(big_n + k, big_n + k)] = 1.0 / rho[k];
            if self.log_z_coeff != 0.0 {
                a[(big_n + k, k)] = self.log_z_coeff / z[k];
            }
        }
        Ok(a)
    }
}

/// Congruence transform of a coordinate tensor by the chart jacobian:
/// `J' = A J A^T` (plain transpose; the coordinates are holomorphic).
pub fn pushforward_tensor(
    j: &DMatrix<Complex64>,
    chart: &DarbouxChart,
    z: &[Complex64],
    rho: &[Complex64],
) -> Result<DMatrix<Complex64>> {
    let a = chart.jacobian(z, rho)?;
    Ok(&a * j * a.transpose())
}

/// Constancy measurement of the pushforward tensor over random domain points.
#[derive(Debug, Clone, Serialize)]
pub struct ChartReport {
    pub n: u32,
    pub degree: usize,
    pub log_z_coeff: f64,
    pub samples: usize,
    pub is_constant: bool,
    pub max_deviation: f64,
    /// Per-entry maximum deviation from the first sample, row major.
    pub deviation_matrix: Vec<Vec<f64>>,
    /// First-sample pushforward tensor, row major as `[re, im]` pairs.
    pub reference_tensor: Vec<Vec<[f64; 2]>>,
}

fn sample_domain_point(
    n: u32,
    big_n: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<Complex64>, Vec<Complex64>) {
    // stay well inside the principal-branch sector of the chart
    let sector = std::f64::consts::PI / (2.0 * (n.max(2) as f64 - 1.0)).max(2.0);
    let mut z: Vec<Complex64> = Vec::with_capacity(big_n);
    while z.len() < big_n {
        let modulus = rng.random_range(0.5..2.0);
        let arg = rng.random_range(-sector..sector);
        let cand = Complex64::from_polar(modulus, arg);
        if z.iter().all(|&existing| (existing - cand).norm() > 0.05) {
            z.push(cand);
        }
    }
    let rho: Vec<Complex64> = (0..big_n)
        .map(|_| {
            let modulus = rng.random_range(0.3..2.0);
            let arg = rng.random_range(-2.8..2.8);
            Complex64::from_polar(modulus, arg)
        })
        .collect();
    (z, rho)
}

/// Pushes the closed tensor through the chart at `samples` random domain
/// points and reports whether the result is constant to 1e-8.
pub fn chart_constancy_report(
    chart: &DarbouxChart,
    big_n: usize,
    samples: usize,
    seed: u64,
) -> Result<ChartReport> {
    assert!(samples >= 2, "constancy needs at least two samples");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reference: Option<DMatrix<Complex64>> = None;
    let dim = 2 * big_n;
    let mut deviation = vec![vec![0.0f64; dim]; dim];
    let mut max_deviation = 0.0f64;
    for _ in 0..samples {
        let (z, rho) = sample_domain_point(chart.n(), big_n, &mut rng);
        let j = coord_tensor_closed(chart.n(), &z, &rho);
        let pushed = pushforward_tensor(&j, chart, &z, &rho)?;
        match &reference {
            None => reference = Some(pushed),
            Some(base) => {
                for a in 0..dim {
                    for b in 0..dim {
                        let d = (pushed[(a, b)] - base[(a, b)]).norm();
                        deviation[a][b] = deviation[a][b].max(d);
                        max_deviation = max_deviation.max(d);
                    }
                }
            }
        }
    }
    let reference = reference.expect("at least two samples");
    let reference_tensor = (0..dim)
        .map(|a| {
            (0..dim)
                .map(|b| [reference[(a, b)].re, reference[(a, b)].im])
                .collect()
        })
        .collect();
    Ok(ChartReport {
        n: chart.n(),
        degree: big_n,
        log_z_coeff: chart.log_z_coeff(),
        samples,
        is_constant: max_deviation < CHART_CONSTANCY_TOL,
        max_deviation,
        deviation_matrix: deviation,
        reference_tensor,
    })
}

/// Searches the family `theta_k = log rho_k + c log z_k` for the member with
/// the most constant pushforward tensor; returns the found coefficient and
/// its residual deviation.
pub fn search_constant_chart(n: u32, big_n: usize, samples: usize, seed: u64) -> Result<(f64, f64)> {
    let objective = |c: f64| -> Result<f64> {
        let chart = DarbouxChart::corrected(n, c);
        Ok(chart_constancy_report(&chart, big_n, samples, seed)?.max_deviation)
    };
    // coarse scan, then golden-section refinement around the best cell
    let lo = -2.0 * n as f64 - 4.0;
    let hi = 4.0;
    let steps = 64;
    let mut best = (lo, objective(lo)?);
    for i in 1..=steps {
        let c = lo + (hi - lo) * i as f64 / steps as f64;
        let v = objective(c)?;
        if v < best.1 {
            best = (c, v);
        }
    }
    let cell = (hi - lo) / steps as f64;
    let (mut a, mut b) = (best.0 - cell, best.0 + cell);
    let phi = 0.5 * (3.0 - 5.0f64.sqrt());
    let mut x1 = a + phi * (b - a);
    let mut x2 = b - phi * (b - a);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    for _ in 0..80 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + phi * (b - a);
            f1 = objective(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - phi * (b - a);
            f2 = objective(x2)?;
        }
    }
    let c = 0.5 * (a + b);
    Ok((c, objective(c)?))
}

/// Linear functionals in `(I, theta)` annihilated by the ones-block tensor.
#[derive(Debug, Clone, Serialize)]
pub struct CasimirBasis {
    vectors: Vec<Vec<f64>>,
}

impl CasimirBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Largest `|J v|` over the basis, with `J` the ones-block tensor of the
    /// matching size; zero when the annihilation is exact.
    pub fn max_annihilation_residual(&self) -> f64 {
        let big_n = self.vectors.first().map_or(0, |v| v.len() / 2);
        if big_n == 0 {
            return 0.0;
        }
        let j = CanonicalTensor::ones_block(big_n).matrix();
        self.vectors
            .iter()
            .map(|v| {
                let vec = nalgebra::DVector::from_iterator(
                    2 * big_n,
                    v.iter().map(|&x| Complex64::new(x, 0.0)),
                );
                (&j * &vec).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// The `2N - 2` difference Casimirs `I_k - I_{k+1}` and
/// `theta_k - theta_{k+1}`; each lies in the kernel of the ones-block tensor
/// exactly (integer arithmetic).
pub fn casimirs_n0(big_n: usize) -> Result<CasimirBasis> {
    if big_n < 2 {
        return Err(Error::TooSmall { n: big_n });
    }
    let dim = 2 * big_n;
    let mut vectors = Vec::with_capacity(2 * big_n - 2);
    for k in 0..(big_n - 1) {
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        v[k + 1] = -1.0;
        vectors.push(v);
    }
    for k in 0..(big_n - 1) {
        let mut v = vec![0.0; dim];
        v[big_n + k] = 1.0;
        v[big_n + k + 1] = -1.0;
        vectors.push(v);
    }
    Ok(CasimirBasis { vectors })
}

/// The averaged action-angle pair and its bracket.
#[derive(Debug, Clone, Serialize)]
pub struct ActionAngleAverage {
    /// Coefficients of the averaged action `(I_1 + .. + I_N)/N`.
    pub action_coeffs: Vec<f64>,
    /// Coefficients of the averaged angle `(theta_1 + .. + theta_N)/N`.
    pub angle_coeffs: Vec<f64>,
    /// The bracket of the pair, computed from the n = 0 pushforward tensor;
    /// unit modulus, computed sign reported as is.
    #[serde(serialize_with = "crate::serialize_complex")]
    pub bracket_value: Complex64,
}

/// Computes `{avg I, avg theta}` from the actual n = 0 pushforward tensor by
/// bilinearity and asserts it has unit modulus.
pub fn action_angle_average(big_n: usize) -> Result<ActionAngleAverage> {
    assert!(big_n >= 1);
    // any domain point works: the pushforward is constant for n = 0
    let z: Vec<Complex64> = (0..big_n).map(|k| Complex64::new(1.0 + k as f64, 0.0)).collect();
    let rho: Vec<Complex64> = (0..big_n).map(|_| Complex64::new(1.0, 0.0)).collect();
    let chart = DarbouxChart::standard(0);
    let j = coord_tensor_closed(0, &z, &rho);
    let pushed = pushforward_tensor(&j, &chart, &z, &rho)?;
    let weight = 1.0 / big_n as f64;
    let mut value = Complex64::new(0.0, 0.0);
    for k in 0..big_n {
        for p in 0..big_n {
            value += weight * weight * pushed[(k, big_n + p)];
        }
    }
    assert!(
        (value.norm() - 1.0).abs() < 1e-12,
        "averaged pair bracket should have unit modulus, got {value}"
    );
    Ok(ActionAngleAverage {
        action_coeffs: vec![weight; big_n],
        angle_coeffs: vec![weight; big_n],
        bracket_value: value,
    })
}

/// Numerical rank of the n = 0 canonical tensor; equals 2 for every N.
pub fn rank_n0(big_n: usize) -> usize {
    tensor::numerical_rank(&CanonicalTensor::ones_block(big_n).matrix(), RANK_THRESHOLD)
}
