//! Criterion benchmarks for topophase kernels; see `benches/`.
