//! Pole-residue representation of rational functions on the Riemann sphere.
//!
//! The configuration space is the set of degree-N rational functions
//!
//! ```text
//! w(z) = sum_k rho_k / (z_k - z) = -q(z)/p(z)
//! ```
//!
//! with pairwise distinct poles `z_k` and nonzero residues `rho_k`. The
//! pole-residue form is the master representation; the polynomial pair
//! `(q, p)` is derived from it and can be inverted back through a
//! companion-matrix root solve.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly;

/// Relative pole-separation floor, in units of machine epsilon.
const DUPLICATE_POLE_ULPS: f64 = 10.0;

/// Guard distance for evaluation near poles, relative to the pole scale.
const EVAL_GUARD: f64 = 1e-12;

/// Pairs `(z_k, rho_k)` in canonical order: poles sorted lexicographically
/// by `(re, im)`, residues permuted consistently.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMap {
    poles: Vec<Complex64>,
    residues: Vec<Complex64>,
}

impl RationalMap {
    /// Validates and canonically orders a pole-residue configuration.
    ///
    /// Fails with [`Error::DuplicatePole`] when two poles are closer than
    /// `10 * eps * (1 + max |z_k|)`, with [`Error::ZeroResidue`] when a
    /// residue vanishes, and with [`Error::EmptyInput`] for empty input.
    pub fn new(poles: Vec<Complex64>, residues: Vec<Complex64>) -> Result<Self> {
        if poles.is_empty() {
            return Err(Error::EmptyInput);
        }
        if poles.len() != residues.len() {
            return Err(Error::LengthMismatch {
                poles: poles.len(),
                residues: residues.len(),
            });
        }
        if poles
            .iter()
            .chain(residues.iter())
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        for (index, rho) in residues.iter().enumerate() {
            if rho.norm() == 0.0 {
                return Err(Error::ZeroResidue { index });
            }
        }

        let mut pairs: Vec<(Complex64, Complex64)> =
            poles.into_iter().zip(residues).collect();
        pairs.sort_by(|a, b| {
            (a.0.re, a.0.im)
                .partial_cmp(&(b.0.re, b.0.im))
                .expect("finite values are comparable")
        });
        let poles: Vec<Complex64> = pairs.iter().map(|p| p.0).collect();
        let residues: Vec<Complex64> = pairs.iter().map(|p| p.1).collect();

        let scale = 1.0 + poles.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = DUPLICATE_POLE_ULPS * f64::EPSILON * scale;
        for i in 0..poles.len() {
            for j in (i + 1)..poles.len() {
                let dist = (poles[i] - poles[j]).norm();
                if dist <= tol {
                    return Err(Error::DuplicatePole { i, j, dist });
                }
            }
        }

        Ok(Self { poles, residues })
    }

    /// Degree N of the map.
    pub fn degree(&self) -> usize {
        self.poles.len()
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn residues(&self) -> &[Complex64] {
        &self.residues
    }

    /// `1 + max |z_k|`, the length scale used by all relative tolerances.
    pub fn pole_scale(&self) -> f64 {
        1.0 + self.poles.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Guard distance below which evaluation is refused.
    pub fn guard_distance(&self) -> f64 {
        EVAL_GUARD * self.pole_scale()
    }

    /// Index of the pole nearest to `z`, with the distance.
    pub fn nearest_pole(&self, z: Complex64) -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (k, &zk) in self.poles.iter().enumerate() {
            let d = (zk - z).norm();
            if d < best.1 {
                best = (k, d);
            }
        }
        best
    }

    fn check_off_poles(&self, z: Complex64) -> Result<()> {
        let (index, dist) = self.nearest_pole(z);
        if dist < self.guard_distance() {
            return Err(Error::EvalAtPole { index });
        }
        Ok(())
    }

    /// `w(z) = sum_k rho_k / (z_k - z)`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_off_poles(z)?;
        Ok(self
            .poles
            .iter()
            .zip(&self.residues)
            .map(|(&zk, &rk)| rk / (zk - z))
            .sum())
    }

    /// First or second derivative of `w`.
    ///
    /// Order 1 is `sum_k rho_k / (z_k - z)^2`, order 2 is
    /// `sum_k 2 rho_k / (z_k - z)^3`.
    pub fn eval_derivative(&self, z: Complex64, order: u32) -> Result<Complex64> {
        self.check_off_poles(z)?;
        match order {
            1 => Ok(self
                .poles
                .iter()
                .zip(&self.residues)
                .map(|(&zk, &rk)| {
                    let d = zk - z;
                    rk / (d * d)
                })
                .sum()),
            2 => Ok(self
                .poles
                .iter()
                .zip(&self.residues)
                .map(|(&zk, &rk)| {
                    let d = zk - z;
                    2.0 * rk / (d * d * d)
                })
                .sum()),
            order => Err(Error::UnsupportedOrder { order }),
        }
    }

    /// Expands `w = -q/p` with `p(z) = prod_k (z - z_k)` monic and
    /// `q(z) = sum_k rho_k prod_{j != k} (z - z_j)`.
    pub fn to_polynomial_pair(&self) -> PolynomialPair {
        let one = Complex64::new(1.0, 0.0);
        let mut p = vec![one];
        for &zk in &self.poles {
            p = poly::mul(&p, &[-zk, one]);
        }
        let mut q = vec![Complex64::new(0.0, 0.0)];
        for (k, &rk) in self.residues.iter().enumerate() {
            let mut partial = vec![one];
            for (j, &zj) in self.poles.iter().enumerate() {
                if j != k {
                    partial = poly::mul(&partial, &[-zj, one]);
                }
            }
            poly::add_scaled(&mut q, &partial, rk);
        }
        poly::trim(&mut q);
        PolynomialPair { q, p }
    }

    /// Recovers the pole-residue form from `(q, p)`: poles are the roots of
    /// `p` (companion-matrix eigenvalues, Newton-polished), residues come
    /// from `rho_k = q(z_k) / p'(z_k)`.
    pub fn from_polynomial_pair(pp: &PolynomialPair) -> Result<Self> {
        let roots = poly::monic_roots(&pp.p)?;
        let scale = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = (DUPLICATE_POLE_ULPS * f64::EPSILON * scale).max(1e-10 * scale);
        for i in 0..roots.len() {
            for j in (i + 1)..roots.len() {
                if (roots[i] - roots[j]).norm() <= tol {
                    return Err(Error::RepeatedRoot {
                        re: roots[i].re,
                        im: roots[i].im,
                    });
                }
            }
        }
        let dp = poly::derivative(&pp.p);
        let residues: Vec<Complex64> = roots
            .iter()
            .map(|&zk| poly::eval(&pp.q, zk) / poly::eval(&dp, zk))
            .collect();
        Self::new(roots, residues)
    }

    /// Seeded random configuration: poles in the disk `|z| <= 2` with
    /// pairwise distance at least `separation`, residue moduli in
    /// `[separation, 2]`. Deterministic for a fixed seed.
    pub fn random(n: usize, seed: u64, separation: f64) -> Result<Self> {
        const MAX_ATTEMPTS_PER_POLE: usize = 2_000;
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        if !separation.is_finite() || separation <= 0.0 || separation >= 2.0 {
            return Err(Error::SamplingExhausted {
                n,
                separation,
                attempts: 0,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut poles: Vec<Complex64> = Vec::with_capacity(n);
        let mut attempts = 0usize;
        let budget = MAX_ATTEMPTS_PER_POLE * n;
        while poles.len() < n {
            if attempts >= budget {
                return Err(Error::SamplingExhausted {
                    n,
                    separation,
                    attempts,
                });
            }
            attempts += 1;
            let z = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            if z.norm() > 2.0 {
                continue;
            }
            if poles.iter().any(|&p| (p - z).norm() < separation) {
                continue;
            }
            poles.push(z);
        }
        let residues: Vec<Complex64> = (0..n)
            .map(|_| {
                let modulus = rng.random_range(separation..2.0);
                let phase = rng.random_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(modulus, phase)
            })
            .collect();
        Self::new(poles, residues)
    }

    /// Maximum relative pole-wise distance to another map with the same
    /// degree, used by round-trip tests.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.degree(), other.degree());
        let scale = self.pole_scale();
        self.poles
            .iter()
            .zip(&other.poles)
            .map(|(a, b)| (a - b).norm())
            .chain(
                self.residues
                    .iter()
                    .zip(&other.residues)
                    .map(|(a, b)| (a - b).norm()),
            )
            .fold(0.0, f64::max)
            / scale
    }
}

#[derive(Serialize, Deserialize)]
struct RationalMapWire {
    poles: Vec<[f64; 2]>,
    residues: Vec<[f64; 2]>,
}

impl Serialize for RationalMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RationalMapWire {
            poles: self.poles.iter().map(|z| [z.re, z.im]).collect(),
            residues: self.residues.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = RationalMapWire::deserialize(deserializer)?;
        let to_c = |v: Vec<[f64; 2]>| -> Vec<Complex64> {
            v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect()
        };
        RationalMap::new(to_c(wire.poles), to_c(wire.residues)).map_err(D::Error::custom)
    }
}

/// The derived global representation `w = -q/p`.
///
/// `p` is monic of degree N with ascending coefficients; `deg q < deg p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPair {
    q: Vec<Complex64>,
    p: Vec<Complex64>,
}

impl PolynomialPair {
    /// Builds a pair from raw coefficient sequences (ascending powers).
    ///
    /// `p` is normalized to monic form; `q` is padded/trimmed. Fails when
    /// `deg q >= deg p` or `p` is constant.
    pub fn new(q: Vec<Complex64>, p: Vec<Complex64>) -> Result<Self> {
        let mut p = p;
        let mut q = q;
        poly::trim(&mut p);
        poly::trim(&mut q);
        if poly::degree(&p) == 0 {
            return Err(Error::EmptyInput);
        }
        if p.iter().chain(q.iter()).any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if poly::degree(&q) >= poly::degree(&p) {
            return Err(Error::LengthMismatch {
                poles: poly::degree(&p),
                residues: poly::degree(&q),
            });
        }
        let lead = *p.last().expect("nonempty");
        if lead.norm() == 0.0 {
            return Err(Error::EmptyInput);
        }
        for c in p.iter_mut() {
            *c /= lead;
        }
        for c in q.iter_mut() {
            *c /= lead;
        }
        Ok(Self { q, p })
    }

    pub fn numerator(&self) -> &[Complex64] {
        &self.q
    }

    pub fn denominator(&self) -> &[Complex64] {
        &self.p
    }

    /// Evaluates `-q(z)/p(z)`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        -poly::eval(&self.q, z) / poly::eval(&self.p, z)
    }
}
