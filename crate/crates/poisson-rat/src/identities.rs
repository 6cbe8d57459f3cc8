//! Exact verification of the polynomial identities behind the direct Jacobi
//! proof.
//!
//! Each identity is expanded as a multivariate polynomial in the five symbols
//! `(z, eta, p, q, r)` with exact integer coefficients and compared
//! coefficient-wise, so these checks carry no floating-point tolerance at all.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

/// Number of symbols: z, eta, p, q, r.
const VARS: usize = 5;

pub const Z: usize = 0;
pub const ETA: usize = 1;
pub const P: usize = 2;
pub const Q: usize = 3;
pub const R: usize = 4;

/// Sparse multivariate polynomial with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    terms: BTreeMap<[u8; VARS], i64>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: i64) -> Self {
        let mut p = Self::zero();
        if c != 0 {
            p.terms.insert([0; VARS], c);
        }
        p
    }

    /// The symbol with the given index.
    pub fn var(index: usize) -> Self {
        assert!(index < VARS);
        let mut exp = [0u8; VARS];
        exp[index] = 1;
        let mut p = Self::zero();
        p.terms.insert(exp, 1);
        p
    }

    /// `var(a) - var(b)`, the ubiquitous linear factor.
    pub fn diff(a: usize, b: usize) -> Self {
        Self::var(a) - Self::var(b)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, exp: [u8; VARS], coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(exp).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.remove(&exp);
        }
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        let mut out = self;
        for (exp, c) in rhs.terms {
            out.insert(exp, c);
        }
        out
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        let mut out = self;
        for (exp, c) in rhs.terms {
            out.insert(exp, -c);
        }
        out
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut exp = [0u8; VARS];
                for i in 0..VARS {
                    exp[i] = ea[i] + eb[i];
                }
                out.insert(exp, ca * cb);
            }
        }
        out
    }
}

/// Outcome of one identity check.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
}

fn product(factors: &[MultiPoly]) -> MultiPoly {
    factors
        .iter()
        .cloned()
        .fold(MultiPoly::constant(1), |acc, f| acc * f)
}

/// Pole-relabelling identity: the density `eps_circ_{ab}(z)/(z-c)` does not
/// depend on which two of the three points carry the differential. After
/// clearing denominators this says `(z-a')(z-b')(z-c')` equals
/// `(z-a)(z-b)(z-c)` for every permutation `(a',b',c')` of `(a,b,c)`.
fn first_identity_all_permutations() -> bool {
    let base = [P, Q, R];
    let reference = product(&[
        MultiPoly::diff(Z, P),
        MultiPoly::diff(Z, Q),
        MultiPoly::diff(Z, R),
    ]);
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    perms.iter().all(|perm| {
        let permuted = product(&[
            MultiPoly::diff(Z, base[perm[0]]),
            MultiPoly::diff(Z, base[perm[1]]),
            MultiPoly::diff(Z, base[perm[2]]),
        ]);
        permuted == reference
    })
}

/// `(z-r)(eta-q) - (z-q)(eta-r) - (z-p)(eta-r) + (z-p)(eta-q)
///  = (eta + p - 2z)(q - r)`.
fn second_identity(perturb: bool) -> bool {
    let lhs = product(&[MultiPoly::diff(Z, R), MultiPoly::diff(ETA, Q)])
        - product(&[MultiPoly::diff(Z, Q), MultiPoly::diff(ETA, R)])
        - product(&[MultiPoly::diff(Z, P), MultiPoly::diff(ETA, R)])
        + product(&[MultiPoly::diff(Z, P), MultiPoly::diff(ETA, Q)]);
    let mut factor =
        MultiPoly::var(ETA) + MultiPoly::var(P) - MultiPoly::constant(2) * MultiPoly::var(Z);
    if perturb {
        // negative control: break one coefficient
        factor = factor + MultiPoly::var(Q);
    }
    let rhs = factor * MultiPoly::diff(Q, R);
    (lhs - rhs).is_zero()
}

/// `(z-r)(eta-p)(eta-q) - (z-q)(eta-p)(eta-r) = (eta-p)(r-q)(z-eta)`.
fn triple_expansion_first() -> bool {
    let lhs = product(&[
        MultiPoly::diff(Z, R),
        MultiPoly::diff(ETA, P),
        MultiPoly::diff(ETA, Q),
    ]) - product(&[
        MultiPoly::diff(Z, Q),
        MultiPoly::diff(ETA, P),
        MultiPoly::diff(ETA, R),
    ]);
    let rhs = product(&[
        MultiPoly::diff(ETA, P),
        MultiPoly::diff(R, Q),
        MultiPoly::diff(Z, ETA),
    ]);
    (lhs - rhs).is_zero()
}

/// `(z-p)(eta-q)(eta-r) - (z-q)(eta-p)(eta-r) = (eta-r)(z-eta)(p-q)`.
fn triple_expansion_second() -> bool {
    let lhs = product(&[
        MultiPoly::diff(Z, P),
        MultiPoly::diff(ETA, Q),
        MultiPoly::diff(ETA, R),
    ]) - product(&[
        MultiPoly::diff(Z, Q),
        MultiPoly::diff(ETA, P),
        MultiPoly::diff(ETA, R),
    ]);
    let rhs = product(&[
        MultiPoly::diff(ETA, R),
        MultiPoly::diff(Z, ETA),
        MultiPoly::diff(P, Q),
    ]);
    (lhs - rhs).is_zero()
}

/// Runs every identity check; `perturb` injects a deliberate defect into the
/// second identity as a negative control of the checker itself.
pub fn run_identity_checks(perturb: bool) -> Vec<IdentityCheck> {
    vec![
        IdentityCheck {
            name: "pole_relabelling_all_permutations".into(),
            holds: first_identity_all_permutations(),
        },
        IdentityCheck {
            name: "cross_term_collapse".into(),
            holds: second_identity(perturb),
        },
        IdentityCheck {
            name: "triple_product_expansion_first".into(),
            holds: triple_expansion_first(),
        },
        IdentityCheck {
            name: "triple_product_expansion_second".into(),
            holds: triple_expansion_second(),
        },
    ]
}

/// True iff all proof identities hold coefficient-exactly.
pub fn verify_proof_identities() -> bool {
    run_identity_checks(false).iter().all(|c| c.holds)
}
