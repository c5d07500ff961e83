//! Criterion benchmarks for nullfront; see `benches/`.
