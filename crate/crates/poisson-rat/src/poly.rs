//! Dense univariate polynomials over the complex numbers.
//!
//! Coefficients are stored in ascending order (`coeffs[k]` multiplies `z^k`).
//! This is internal plumbing for [`crate::ratfun::PolynomialPair`], the
//! entire-weight type and the companion-matrix root solver.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Drop trailing (near-)zero leading coefficients.
pub(crate) fn trim(coeffs: &mut Vec<Complex64>) {
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
        coeffs.pop();
    }
    if coeffs.is_empty() {
        coeffs.push(Complex64::new(0.0, 0.0));
    }
}

pub(crate) fn degree(coeffs: &[Complex64]) -> usize {
    coeffs.len().saturating_sub(1)
}

/// Horner evaluation.
pub(crate) fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

pub(crate) fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    if coeffs.len() <= 1 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

pub(crate) fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

pub(crate) fn add_scaled(acc: &mut Vec<Complex64>, term: &[Complex64], scale: Complex64) {
    if acc.len() < term.len() {
        acc.resize(term.len(), Complex64::new(0.0, 0.0));
    }
    for (a, &t) in acc.iter_mut().zip(term.iter()) {
        *a += t * scale;
    }
}

/// Roots of a monic polynomial via companion-matrix eigenvalues, each polished
/// with one Newton step.
///
/// The caller guarantees `coeffs` is monic of degree >= 1.
pub(crate) fn monic_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = degree(coeffs);
    debug_assert!(n >= 1);
    debug_assert!((coeffs[n] - Complex64::new(1.0, 0.0)).norm() < 1e-14);

    let mut companion = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        companion[(i, n - 1)] = -coeffs[i];
    }

    let schur = companion
        .try_schur(f64::EPSILON, 10_000)
        .ok_or(Error::NonConvergedRoots)?;
    let (_, t) = schur.unpack();
    let deriv = derivative(coeffs);
    let mut roots: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    for r in roots.iter_mut() {
        if !r.re.is_finite() || !r.im.is_finite() {
            return Err(Error::NonConvergedRoots);
        }
        let dp = eval(&deriv, *r);
        if dp.norm() > 0.0 {
            let step = eval(coeffs, *r) / dp;
            if step.norm() < 1.0 {
                *r -= step;
            }
        }
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn horner_matches_naive() {
        let p = [c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 3.0)];
        let z = c(0.5, -1.5);
        let naive = p[0] + p[1] * z + p[2] * z * z;
        assert!((eval(&p, z) - naive).norm() < 1e-15);
    }

    #[test]
    fn derivative_of_cubic() {
        // z^3 - 2z -> 3z^2 - 2
        let p = [c(0.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let d = derivative(&p);
        assert_eq!(d.len(), 3);
        assert!((d[0] - c(-2.0, 0.0)).norm() < 1e-15);
        assert!((d[2] - c(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn companion_roots_of_quadratic() {
        // z^2 - 1
        let p = [c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let mut roots = monic_roots(&p).unwrap();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((roots[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!((roots[1] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn companion_roots_complex_coefficients() {
        // (z - i)(z - 2) = z^2 - (2 + i) z + 2i
        let p = [c(0.0, 2.0), c(-2.0, -1.0), c(1.0, 0.0)];
        let roots = monic_roots(&p).unwrap();
        for r in roots {
            assert!(eval(&p, r).norm() < 1e-10, "residual too large at {r}");
        }
    }
}
