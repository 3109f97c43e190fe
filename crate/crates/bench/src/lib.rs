//! Benchmarks live in `benches/`; this crate only exists to host them.
//! Run with `cargo bench -p dgo-bench`.
