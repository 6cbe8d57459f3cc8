//! Fuzz target for the `re,im` point syntax and the seed-list syntax of the
//! command line: no panic on any input, finite values on acceptance.

#![no_main]

use libfuzzer_sys::fuzz_target;
use poisson_rat_cli::config::{parse_complex_pair, parse_seed_list};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(z) = parse_complex_pair(text) {
        assert!(z.re.is_finite() && z.im.is_finite());
    }
    let _ = parse_seed_list(text);
});
