//! Criterion benchmarks for `ntn-peb`. See `benches/`.
