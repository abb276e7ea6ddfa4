//! Benchmark-only crate; see `benches/spectra.rs`.
