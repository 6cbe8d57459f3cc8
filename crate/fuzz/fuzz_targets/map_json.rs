//! Fuzz target for rational-map JSON files (the `bracket --map FILE` input).
//!
//! Parsing arbitrary bytes must never panic; any accepted map must satisfy
//! the construction invariants and round-trip bit-exactly through JSON.

#![no_main]

use libfuzzer_sys::fuzz_target;
use poisson_rat::RationalMap;

fuzz_target!(|data: &[u8]| {
    let Ok(map) = serde_json::from_slice::<RationalMap>(data) else {
        return;
    };
    // accepted maps are validated: nonempty, distinct poles, nonzero residues
    assert!(map.degree() >= 1);
    let text = serde_json::to_string(&map).expect("accepted maps serialize");
    let back: RationalMap = serde_json::from_str(&text).expect("own output parses");
    assert_eq!(map, back, "serialization must round-trip exactly");
    // exercise evaluation safely outside the pole disk
    let z = num_complex::Complex64::new(map.pole_scale() + 2.0, 0.375);
    let _ = map.eval(z);
    let _ = map.to_polynomial_pair();
});
