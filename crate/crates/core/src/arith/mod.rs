//! Arithmetic weights: the smallest-prime-factor sieve, Ω, λ, μ, weight
//! tables on `1..=N_max`, and the binary sieve cache.

mod cache;
mod sieve;
mod weights;

pub use cache::{cache_path, load_cache, load_or_build, read_cache, save_cache, write_cache, CacheStatus, CACHE_MAGIC};
pub use sieve::{build_sieve, count_primes, FactorSieve, MAX_SIEVE_LIMIT};
pub use weights::{weight_table, WeightKind, WeightSequence, CUSTOM_SUP_TOLERANCE};

/// `Ω(n)`: prime factors of `n` counted with multiplicity.
pub fn big_omega(sieve: &FactorSieve, n: u64) -> crate::Result<u32> {
    sieve.big_omega(n)
}

/// `λ(n) = (-1)^Ω(n)`.
pub fn liouville(sieve: &FactorSieve, n: u64) -> crate::Result<i8> {
    sieve.liouville(n)
}

/// `μ(n)`: 1 at 1, `λ(n)` on squarefree `n`, 0 otherwise.
pub fn moebius(sieve: &FactorSieve, n: u64) -> crate::Result<i8> {
    sieve.moebius(n)
}

/// `Σ_{n ≤ N} ν(n)`.
pub fn partial_sum(w: &WeightSequence, n: usize) -> crate::Result<num_complex::Complex64> {
    w.partial_sum(n)
}

/// `ν(n)` on all of `Z`, with `ν(-n) = ν(n)` and `ν(0) = 0`.
pub fn extend(w: &WeightSequence, n: i64) -> crate::Result<num_complex::Complex64> {
    w.extend(n)
}
