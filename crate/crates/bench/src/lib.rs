//! Benchmarks live in `benches/engines.rs`; run them with `cargo bench -p nilcover-bench`.
