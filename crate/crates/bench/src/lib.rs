//! Criterion benchmarks for `linrel`; see `benches/`.
