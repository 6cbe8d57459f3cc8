//! Library surface of the verification CLI: run configuration, report
//! model and the check suites, kept separate from the binary so integration
//! tests and fuzz targets can drive them directly.

pub mod config;
pub mod report;
pub mod suites;
