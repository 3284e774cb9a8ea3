//! Exact tools for ℓ-Oddtown families: modular linear algebra, per-prime
//! certificates, Fourier analysis of 0–1 images over `F_p`, σ-admissible
//! submatrices, bound formulas and an exact solver for small ground sets.

pub mod admissible;
pub mod error;
pub mod exact;
pub mod figure;
pub mod fourier;
pub mod modlinalg;
pub mod numtheory;
pub mod oddtown;
pub mod par;
pub mod solver;

pub use error::{Error, ErrorKind, Result};
