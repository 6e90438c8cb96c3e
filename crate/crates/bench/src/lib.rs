//! Criterion benchmarks for `holevo-core`; see `benches/`.
