//! Criterion benchmarks for the symspec kernels; run `cargo bench -p symspec-bench`.
