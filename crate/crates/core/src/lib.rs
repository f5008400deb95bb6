//! Singular-value inequalities for the sum of two matrices: a catalog of
//! claimed and proven lower bounds on σ(A+B), numerical checking with
//! scale-aware tolerances, randomized counterexample search, and independent
//! certification of the semi-unitary trace extrema behind the prefix-sum
//! bounds.
//!
//! Module map:
//! - [`matrix`]: dense real/complex matrices and the JSON interchange format;
//! - [`spectrum`]: singular values and the Ky Fan / tail / sorted-difference
//!   functionals;
//! - [`catalog`]: the six inequality entries, check reports, and the
//!   comparison-chain verifier;
//! - [`trace`]: closed-form trace extrema over semi-unitary factors and the
//!   alternating-maximization oracle that certifies them;
//! - [`search`]: seeded, reproducible violation search with hill-climbing
//!   refinement.

pub mod catalog;
pub mod matrix;
pub mod search;
pub mod spectrum;
pub mod trace;

mod jacobi;
mod stream;

pub use num_complex::Complex64;
