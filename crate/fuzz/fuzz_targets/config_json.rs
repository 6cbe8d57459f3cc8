//! Fuzz target for `--config` JSON files: parsing must never panic, and any
//! accepted config must survive validation and re-serialization.

#![no_main]

use libfuzzer_sys::fuzz_target;
use poisson_rat_cli::config::{FileConfig, Hierarchy, RunConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(file) = serde_json::from_slice::<FileConfig>(data) else {
        return;
    };
    let _ = serde_json::to_string(&file).expect("accepted configs serialize");
    // run the same merge + validation path as the binary
    let cfg = RunConfig {
        hierarchy: file.hierarchy.unwrap_or(Hierarchy::Contour),
        f_degree: file.f_degree,
        f_coeffs: file.f_coeffs,
        n: file.n,
        degree: file.degree.unwrap_or(1),
        seeds: file.seeds.unwrap_or_else(|| vec![1]),
        tol: file.tol,
    };
    let _ = cfg.validate();
});
