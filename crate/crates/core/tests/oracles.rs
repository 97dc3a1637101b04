//! Library results against independent reference computations.

use ewl::arith::{build_sieve, count_primes, weight_table, WeightKind, WeightSequence};
use ewl::averages::{finitary_direct, finitary_fourier, prefix_series, FinitaryField};
use ewl::dynsys::{orbit_observable, Observable, Point, SystemSpec};
use ewl::expsum::{exp_sum, max_over_grid};
use ewl::rng::Ensemble;
use ewl::{Complex64, Fixed64};

fn trial_division(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        while n.is_multiple_of(d) {
            out.push(d);
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn oracle_omega_lambda_mu(n: u64) -> (u32, i8, i8) {
    let f = trial_division(n);
    let omega = f.len() as u32;
    let lambda = if omega.is_multiple_of(2) { 1 } else { -1 };
    let squarefree = f.windows(2).all(|w| w[0] != w[1]);
    let mu = if squarefree { lambda } else { 0 };
    (omega, lambda, mu)
}

#[test]
fn sieve_matches_trial_division_to_1e5() {
    let sieve = build_sieve(100_000).unwrap();
    let (lam, mu) = WeightSequence::liouville_and_moebius(100_000).unwrap();
    for n in 1..=100_000u64 {
        let (o, l, m) = oracle_omega_lambda_mu(n);
        assert_eq!(sieve.big_omega(n).unwrap(), o, "Omega({n})");
        assert_eq!(sieve.liouville(n).unwrap(), l, "lambda({n})");
        assert_eq!(sieve.moebius(n).unwrap(), m, "mu({n})");
        assert_eq!(lam.at(n as usize).re, l as f64);
        assert_eq!(mu.at(n as usize).re, m as f64);
    }
}

#[test]
fn liouville_is_completely_multiplicative() {
    let lam = weight_table(WeightKind::Liouville, 1_000_000).unwrap();
    let l = |n: usize| lam.at(n).re;
    for m in 1..=10_000usize {
        for n in 1..=10_000 / m {
            assert_eq!(l(m * n), l(m) * l(n), "{m}*{n}");
        }
    }
    let mut rng = Ensemble::new(7, 0);
    for _ in 0..100_000 {
        let m = 1 + (rng.uniform() * 1000.0) as usize;
        let n = 1 + (rng.uniform() * (1_000_000 / m) as f64) as usize;
        let n = n.min(1_000_000 / m);
        assert_eq!(l(m * n), l(m) * l(n));
    }
}

#[test]
fn moebius_identities() {
    let (lam, mu) = WeightSequence::liouville_and_moebius(10_000).unwrap();
    for n in 1..=10_000usize {
        let squarefree = trial_division(n as u64).windows(2).all(|w| w[0] != w[1]);
        let expect = if squarefree { lam.at(n) } else { Complex64::new(0.0, 0.0) };
        assert_eq!(mu.at(n), expect);
        let divisor_sum: f64 = (1..=n).filter(|d| n % d == 0).map(|d| mu.at(d).re).sum();
        assert_eq!(divisor_sum, if n == 1 { 1.0 } else { 0.0 }, "n = {n}");
    }
}

#[test]
fn liouville_partial_sums() {
    let lam = weight_table(WeightKind::Liouville, 1_000_000).unwrap();
    let sums = lam.integer_prefix_sums().unwrap();
    // sums[n - 1] = L(n)
    assert_eq!(sums[9], 0);
    assert_eq!(sums[999_999], -530);
    for (i, s) in sums.iter().enumerate() {
        let n = i + 1;
        assert!((s.unsigned_abs() as f64) <= 3.0 * (n as f64).sqrt(), "N = {n}");
    }
    assert_eq!(count_primes(1_000_000), 78_498);
    assert_eq!(count_primes(1), 0);
}

#[test]
fn exp_sum_matches_float_summation() {
    let lam = weight_table(WeightKind::Liouville, 5_000).unwrap();
    for &theta in &[0.1, 0.25, 0.377, 0.9] {
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 1..=5_000u64 {
            let phase = (n as f64 * theta).fract();
            acc += lam.at(n as usize) * Complex64::from_polar(1.0, std::f64::consts::TAU * phase);
        }
        let s = exp_sum(&lam, 5_000, theta, 1).unwrap();
        assert!((s - acc).norm() < 1e-8, "theta = {theta}");
    }
}

#[test]
fn finitary_forms_match_triple_loop() {
    let j = 37usize;
    let n = 20usize;
    let lam = weight_table(WeightKind::Liouville, 64).unwrap();
    let mut rng = Ensemble::new(3, 1);
    let f: Vec<Complex64> = (0..j).map(|_| Complex64::new(rng.uniform() - 0.5, rng.uniform() - 0.5)).collect();
    let g: Vec<Complex64> = (0..j).map(|_| Complex64::new(rng.uniform() - 0.5, rng.uniform() - 0.5)).collect();
    let ff = FinitaryField::new(f.clone()).unwrap();
    let gf = FinitaryField::new(g.clone()).unwrap();
    let direct = finitary_direct(&ff, &gf, &lam, n).unwrap();
    let fourier = finitary_fourier(&ff, &gf, &lam, n).unwrap();
    for x in 0..j as i64 {
        let mut b = Complex64::new(0.0, 0.0);
        for m in 1..=n as i64 {
            b += lam.at(m as usize) * f[(x + m).rem_euclid(j as i64) as usize] * g[(x - m).rem_euclid(j as i64) as usize];
        }
        b /= n as f64;
        assert!((direct.values()[x as usize] - b).norm() < 1e-13);
        assert!((fourier.values()[x as usize] - b).norm() < 1e-12);
    }
}

#[test]
fn rotation_average_matches_scalar_formula() {
    let lam = weight_table(WeightKind::Liouville, 10_000).unwrap();
    let sys = SystemSpec::rotation(Fixed64::GOLDEN);
    let x = Fixed64::from_ratio(2, 5);
    let f = orbit_observable(&sys, &Observable::Character { k: 1 }, Point::Torus(x), 1, 10_000).unwrap();
    let g = orbit_observable(&sys, &Observable::Character { k: 1 }, Point::Torus(x), 2, 10_000).unwrap();
    let series = prefix_series(&lam, &[f, g], &[10_000]).unwrap();
    let alpha = Fixed64::GOLDEN.to_f64();
    let x0 = x.to_f64();
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..=10_000u64 {
        let phase = (2.0 * x0 + ((3 * n) as f64 * alpha).fract()).fract();
        acc += lam.at(n as usize) * Complex64::from_polar(1.0, std::f64::consts::TAU * phase);
    }
    assert!((series.values[0] - acc / 10_000.0).norm() < 1e-10);
}

// Regression values from an independent numpy evaluation.
#[test]
fn davenport_max_at_4096() {
    let lam = weight_table(WeightKind::Liouville, 4096).unwrap();
    let gm = max_over_grid(&lam, 4096, 1, 4 * 4096).unwrap();
    assert!((gm.max_norm - 0.0432).abs() < 5e-4, "{}", gm.max_norm);
    assert!((gm.argmax_theta.min(1.0 - gm.argmax_theta) - 0.33124).abs() < 1e-4, "{}", gm.argmax_theta);
}
