//! Criterion benchmarks for the implicitization pipeline live under
//! `benches/`; run them with `cargo bench -p envcheb-bench`.
