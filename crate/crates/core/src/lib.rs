//! Multiplicatively weighted ergodic averages at desk scale.
//!
//! The crate tabulates the Liouville and Möbius functions with a linear
//! sieve, runs them as weights against orbits of small measure-preserving
//! systems, and measures the quantities that control convergence of
//!
//! ```text
//! A_N(x) = (1/N) Σ_{n=1}^{N} ν(n) f(T^{an} x) g(T^{bn} x)
//! ```
//!
//! Modules, bottom-up:
//!
//! * [`arith`]: factor sieve, Ω, λ, μ, weight tables, the on-disk sieve cache.
//! * [`dynsys`]: rotations, the doubling map and cyclic shifts with exact
//!   fixed-point state, plus observables on them.
//! * [`averages`]: prefix series of weighted multilinear averages, the
//!   finitary bilinear form on `Z_J` (direct and Fourier-side), Cesàro
//!   diagnostics along lacunary grids.
//! * [`expsum`]: weighted exponential sums, their maximum over frequency
//!   grids, short-interval sums and the spectral ℓ² bound.
//! * [`maximal`]: lacunary grids, block maximal functions, the √K ratio and
//!   the transference identity on the cyclic system.
//! * [`kbsz`]: prime-dilate correlations and the orthogonality criterion.
//!
//! The `book/` directory next to the workspace walks through each of these
//! with runnable snippets.

pub mod arith;
pub mod averages;
pub mod dynsys;
pub mod error;
pub mod expsum;
pub mod fixed;
pub mod kbsz;
pub mod maximal;
pub mod report;
pub mod rng;

pub use error::{Error, Result};
pub use fixed::Fixed64;
pub use num_complex::Complex64;
