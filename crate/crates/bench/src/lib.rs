//! Criterion benchmarks for `qedge`; see `benches/`.
