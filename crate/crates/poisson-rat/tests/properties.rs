//! Property tests for the structural invariants: representation round trips,
//! evaluation consistency, skew symmetry and tensor antisymmetry.

use num_complex::Complex64;
use proptest::prelude::*;

use poisson_rat::bracket::{bracket_ah, bracket_ansatz, bracket_z};
use poisson_rat::contour::FWeight;
use poisson_rat::deriv::{bracket_n, coord_tensor_closed};
use poisson_rat::tensor::antisymmetry_residual;
use poisson_rat::RationalMap;

fn external_point(radius: f64, angle: f64) -> Complex64 {
    Complex64::from_polar(radius, angle)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polynomial_pair_round_trip(seed in any::<u64>(), n in 1usize..=8) {
        let w = RationalMap::random(n, seed, 0.25).unwrap();
        let back = RationalMap::from_polynomial_pair(&w.to_polynomial_pair()).unwrap();
        prop_assert!(w.distance(&back) < 1e-10, "drift {}", w.distance(&back));
    }

    #[test]
    fn eval_forms_agree(
        seed in any::<u64>(),
        n in 1usize..=6,
        radius in 2.2f64..3.0,
        angle in 0.0f64..std::f64::consts::TAU,
    ) {
        let w = RationalMap::random(n, seed, 0.3).unwrap();
        let z = external_point(radius, angle);
        let direct = w.eval(z).unwrap();
        let poly = w.to_polynomial_pair().eval(z);
        prop_assert!(
            (direct - poly).norm() <= 1e-11 * (1.0 + direct.norm()),
            "{direct} vs {poly}"
        );
    }

    #[test]
    fn closed_brackets_skew_symmetric(
        seed in any::<u64>(),
        n in 1usize..=5,
        r1 in 2.2f64..3.0,
        r2 in 2.2f64..3.0,
        a1 in 0.0f64..2.0,
        a2 in 2.5f64..4.5,
    ) {
        let w = RationalMap::random(n, seed, 0.3).unwrap();
        let p = external_point(r1, a1);
        let q = external_point(r2, a2);
        let ah_f = bracket_ah(&w, p, q).unwrap().value;
        let ah_b = bracket_ah(&w, q, p).unwrap().value;
        prop_assert!((ah_f + ah_b).norm() <= 1e-13 * (1.0 + ah_f.norm()));
        let z_f = bracket_z(&w, p, q).unwrap().value;
        let z_b = bracket_z(&w, q, p).unwrap().value;
        prop_assert!((z_f + z_b).norm() <= 1e-13 * (1.0 + z_f.norm()));
        let an_f = bracket_ansatz(&FWeight::monomial(3), &w, p, q).unwrap().value;
        let an_b = bracket_ansatz(&FWeight::monomial(3), &w, q, p).unwrap().value;
        prop_assert!((an_f + an_b).norm() <= 1e-13 * (1.0 + an_f.norm()));
    }

    #[test]
    fn derivative_bracket_antisymmetric_pointwise(
        seed in any::<u64>(),
        n in 0u32..=4,
        big_n in 1usize..=4,
        r1 in 2.2f64..3.0,
        a1 in 0.0f64..2.0,
        a2 in 2.5f64..4.5,
    ) {
        let w = RationalMap::random(big_n, seed, 0.3).unwrap();
        let p = external_point(r1, a1);
        let q = external_point(2.6, a2);
        let fwd = bracket_n(n, &w, p, q).unwrap();
        let bwd = bracket_n(n, &w, q, p).unwrap();
        prop_assert!((fwd + bwd).norm() <= 1e-12 * (1.0 + fwd.norm()));
    }

    #[test]
    fn coordinate_tensors_antisymmetric(
        seed in any::<u64>(),
        n in 0u32..=4,
        big_n in 1usize..=4,
    ) {
        let w = RationalMap::random(big_n, seed, 0.3).unwrap();
        let j = coord_tensor_closed(n, w.poles(), w.residues());
        prop_assert!(antisymmetry_residual(&j) < 1e-12);
    }

    #[test]
    fn json_round_trip_bit_exact(seed in any::<u64>(), n in 1usize..=6) {
        let w = RationalMap::random(n, seed, 0.3).unwrap();
        let text = serde_json::to_string(&w).unwrap();
        let back: RationalMap = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(w, back);
    }

    #[test]
    fn herglotz_preserved_for_real_positive_data(
        seed in any::<u64>(),
        n in 1usize..=5,
        re in -4.0f64..4.0,
        im in 0.01f64..3.0,
    ) {
        // real poles, positive residues: the map sends the upper half-plane
        // into itself
        let base = RationalMap::random(n, seed, 0.3).unwrap();
        let poles: Vec<Complex64> = base
            .poles()
            .iter()
            .map(|z| Complex64::new(z.re, 0.0))
            .collect();
        let residues: Vec<Complex64> = base
            .residues()
            .iter()
            .map(|r| Complex64::new(r.norm(), 0.0))
            .collect();
        let Ok(w) = RationalMap::new(poles, residues) else {
            // collapsing the imaginary parts may merge poles; skip those
            return Ok(());
        };
        let z = Complex64::new(re, im);
        if w.nearest_pole(z).1 > 0.05 {
            let value = w.eval(z).unwrap();
            prop_assert!(value.im > 0.0, "Im w({z}) = {}", value.im);
        }
    }
}
