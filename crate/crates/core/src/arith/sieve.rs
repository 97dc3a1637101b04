use crate::{Error, Result};

/// Largest supported sieve limit.
pub const MAX_SIEVE_LIMIT: u64 = 1 << 31;

/// Smallest prime factor table for `2..=limit`, built by a linear sieve.
///
/// Every composite is crossed out exactly once, by its smallest prime factor,
/// so construction is `O(limit)`. `spf[0]` and `spf[1]` are 0.
#[derive(Clone, Debug)]
pub struct FactorSieve {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

pub fn build_sieve(n_max: u64) -> Result<FactorSieve> {
    FactorSieve::new(n_max)
}

impl FactorSieve {
    pub fn new(n_max: u64) -> Result<FactorSieve> {
        if !(2..=MAX_SIEVE_LIMIT).contains(&n_max) {
            return Err(Error::Size {
                param: "N_max",
                value: n_max.to_string(),
                expected: format!("2 <= N_max <= 2^31 ({MAX_SIEVE_LIMIT})"),
            });
        }
        let n = n_max as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let lpf = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > lpf || m > n {
                    break;
                }
                spf[m] = p;
            }
        }
        Ok(FactorSieve {
            limit: n_max,
            spf,
            primes,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// The smallest prime factor table, indexed by `n` (0 for `n < 2`).
    pub fn spf(&self) -> &[u32] {
        &self.spf
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.spf[n as usize] as u64 == n
    }

    fn check(&self, n: u64) -> Result<usize> {
        if n == 0 || n > self.limit {
            return Err(Error::range("n", n, format!("1..={}", self.limit)));
        }
        Ok(n as usize)
    }

    /// Prime factorization as `(p, e)` pairs, ascending.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u32, u32)>> {
        let mut n = self.check(n)?;
        let mut out: Vec<(u32, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n];
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
            n /= p as usize;
        }
        Ok(out)
    }

    pub fn big_omega(&self, n: u64) -> Result<u32> {
        let mut n = self.check(n)?;
        let mut count = 0;
        while n > 1 {
            n /= self.spf[n] as usize;
            count += 1;
        }
        Ok(count)
    }

    pub fn liouville(&self, n: u64) -> Result<i8> {
        Ok(if self.big_omega(n)? % 2 == 0 { 1 } else { -1 })
    }

    pub fn moebius(&self, n: u64) -> Result<i8> {
        let factors = self.factorize(n)?;
        if factors.iter().any(|&(_, e)| e > 1) {
            return Ok(0);
        }
        Ok(if factors.len() % 2 == 0 { 1 } else { -1 })
    }

    /// λ and μ on `1..=limit` in one pass over the table (index 0 is `n = 1`).
    pub(crate) fn sign_tables(&self) -> (Vec<i8>, Vec<i8>) {
        let n = self.limit as usize;
        // Index by n directly while filling, then drop the 0 slot.
        let mut lambda = vec![0i8; n + 1];
        let mut mu = vec![0i8; n + 1];
        lambda[1] = 1;
        mu[1] = 1;
        for i in 2..=n {
            let p = self.spf[i] as usize;
            let m = i / p;
            lambda[i] = -lambda[m];
            mu[i] = if m.is_multiple_of(p) { 0 } else { -mu[m] };
        }
        lambda.remove(0);
        mu.remove(0);
        (lambda, mu)
    }
}

/// `π(n)`: number of primes `≤ n`, with an odd-only sieve of Eratosthenes.
pub fn count_primes(n: u64) -> u64 {
    if n < 2 {
        return 0;
    }
    // slot i stands for 2i + 1
    let slots = (n as usize - 1) / 2 + 1;
    let mut composite = vec![false; slots];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= n as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < slots {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    // slot 0 is 1, which is not prime; 2 is counted separately
    1 + composite[1..].iter().filter(|&&c| !c).count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_spf(n: u64) -> u64 {
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return d;
            }
            d += 1;
        }
        n
    }

    #[test]
    fn spf_small() {
        let s = build_sieve(10).unwrap();
        assert_eq!(s.spf(), &[0, 0, 2, 3, 2, 5, 2, 7, 2, 3, 2]);
        assert_eq!(s.primes(), &[2, 3, 5, 7]);
        assert_eq!(build_sieve(2).unwrap().primes(), &[2]);
    }

    #[test]
    fn spf_matches_trial_division() {
        let s = build_sieve(100_000).unwrap();
        for n in 2..=100_000u64 {
            assert_eq!(s.spf()[n as usize] as u64, trial_spf(n), "n = {n}");
            assert_eq!(s.is_prime(n), trial_spf(n) == n);
        }
    }

    #[test]
    fn size_errors() {
        assert!(matches!(build_sieve(1), Err(Error::Size { param: "N_max", .. })));
        assert!(matches!(build_sieve(0), Err(Error::Size { .. })));
        assert!(matches!(build_sieve((1 << 31) + 1), Err(Error::Size { .. })));
    }

    #[test]
    fn omega_lambda_mu() {
        let s = build_sieve(2000).unwrap();
        assert_eq!(s.big_omega(1).unwrap(), 0);
        assert_eq!(s.big_omega(8).unwrap(), 3);
        assert_eq!(s.big_omega(60).unwrap(), 4);
        assert_eq!(s.liouville(1).unwrap(), 1);
        assert_eq!(s.liouville(12).unwrap(), -1);
        assert_eq!(s.liouville(1024).unwrap(), 1);
        assert_eq!(s.moebius(1).unwrap(), 1);
        assert_eq!(s.moebius(4).unwrap(), 0);
        assert_eq!(s.moebius(6).unwrap(), 1);
        assert!(matches!(s.big_omega(2001), Err(Error::Range { param: "n", .. })));
        assert!(matches!(s.liouville(0), Err(Error::Range { .. })));
    }

    #[test]
    fn prime_counts() {
        assert_eq!(count_primes(0), 0);
        assert_eq!(count_primes(1), 0);
        assert_eq!(count_primes(2), 1);
        assert_eq!(count_primes(10), 4);
        assert_eq!(count_primes(100), 25);
        assert_eq!(count_primes(1_000_000), 78_498);
        let s = build_sieve(123_457).unwrap();
        assert_eq!(count_primes(123_457), s.primes().len() as u64);
    }
}
