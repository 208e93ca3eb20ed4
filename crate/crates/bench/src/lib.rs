//! Criterion benchmarks for the optimizers in `tripartite-core`; see `benches/`.
