//! Criterion benchmarks for `walkvisits-core`; see `benches/`.
