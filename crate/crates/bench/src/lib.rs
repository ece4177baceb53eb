//! Criterion benchmarks for the walk engine live in `benches/`.
