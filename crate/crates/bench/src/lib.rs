//! Criterion benchmarks for `cumcal`; see `benches/diagnostics.rs`.
