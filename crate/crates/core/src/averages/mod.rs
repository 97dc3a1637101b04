//! Weighted multilinear ergodic averages.
//!
//! Two settings are covered. Along a single orbit, [`prefix_series`] streams
//! `A_N = (1/N) Σ_{n≤N} ν(n) Π_j f_j(T^{a_j n} x)` over a grid of `N`. On the
//! cyclic group `Z_J` with the shift, the bilinear form
//!
//! ```text
//! B_N(j) = (1/N) Σ_{n=1}^{N} ν(n) f(j+n) g(j−n)
//! ```
//!
//! is evaluated for every `j` at once, either directly ([`finitary_direct`])
//! or on the Fourier side ([`finitary_fourier`]) through one circular
//! convolution per character. The two must agree; the direct one is the
//! production path.

mod cesaro;
mod finitary;
mod series;

pub use cesaro::{cesaro_diagnostics, CesaroReport, CesaroRow};
pub use finitary::{dft, finitary_direct, finitary_fourier, idft, FinitaryField};
pub use series::{default_grid, prefix_series, rotation_reduction_check, AverageSeries};
