//! Criterion benchmarks for `qdunkl-core`; see `benches/`.
