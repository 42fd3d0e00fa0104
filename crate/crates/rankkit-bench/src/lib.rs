//! Benchmark host for the workspace. The crate ships no code of its own;
//! the measurements live in `benches/core.rs` and run under `cargo bench`.
