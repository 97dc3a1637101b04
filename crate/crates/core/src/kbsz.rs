//! Prime-dilate correlations and weighted orthogonality.
//!
//! Sequences are 1-based slices: `f[n-1]` holds `F(n)`. Correlations are
//! `c(p, q, N) = (1/N) Σ_{n≤N} F(np) conj(F(nq))`; the weighted average is
//! `w(N) = (1/N) Σ_{n≤N} ν(n) F(n)`. A report flags the correlation
//! hypothesis as plausible when every off-diagonal `|c|` at the largest `N`
//! is below a threshold. The flag is a reporting heuristic.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::WeightSequence;
use crate::dynsys::{orbit_observable, Observable, Point, System, SystemSpec};
use crate::{Error, Result};

pub const DEFAULT_PRIME_WINDOW: (u64, u64) = (11, 97);
pub const DEFAULT_THRESHOLD: f64 = 0.1;
pub const APERIODICITY_RANGE: u64 = 8;
pub const EXPERIMENT_LABEL: &str = "conjecture experiment, empirical only";

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

pub fn primes_in(p_min: u64, p_max: u64) -> Vec<u64> {
    (p_min..=p_max).filter(|&p| is_prime(p)).collect()
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn check_length(f: &[Complex64], needed: u128) -> Result<()> {
    if (f.len() as u128) < needed {
        return Err(Error::Length {
            param: "F",
            len: f.len(),
            needed: needed.min(usize::MAX as u128) as usize,
        });
    }
    Ok(())
}

/// `(1/N) Σ_{n=1}^{N} F(np) conj(F(nq))`.
pub fn prime_pair_correlation(f: &[Complex64], p: u64, q: u64, n: usize) -> Result<Complex64> {
    for (name, v) in [("p", p), ("q", q)] {
        if !is_prime(v) {
            return Err(Error::precondition(name, v, "a prime"));
        }
    }
    if p == q {
        return Err(Error::precondition("q", q, "q != p"));
    }
    correlation(f, p, q, n)
}

// Diagonal entries are allowed here.
fn correlation(f: &[Complex64], p: u64, q: u64, n: usize) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::validation("N", "N must be >= 1"));
    }
    check_length(f, n as u128 * p.max(q) as u128)?;
    let (p, q) = (p as usize, q as usize);
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 1..=n {
        acc += f[m * p - 1] * f[m * q - 1].conj();
    }
    Ok(acc / n as f64)
}

/// Prime-dilate correlations and weighted averages for one sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub sequence: String,
    /// Set when the report comes from an experiment rather than a criterion run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub primes: Vec<u64>,
    /// The largest grid point; the matrix is evaluated there.
    pub n_max: usize,
    /// Row-major `c(p_i, p_j, n_max)` as `[re, im]`, diagonal included.
    pub matrix: Vec<Vec<[f64; 2]>>,
    pub grid: Vec<usize>,
    /// `w(N)` as `[re, im]` on the grid.
    pub weighted: Vec<[f64; 2]>,
    pub max_offdiagonal: Option<f64>,
    pub threshold: f64,
    /// `None` when no prime window was evaluated.
    pub hypothesis_plausible: Option<bool>,
    pub config: Vec<(String, String)>,
}

impl CorrelationReport {
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        let [re, im] = self.matrix[i][j];
        Complex64::new(re, im)
    }

    pub fn weighted_at(&self, n: usize) -> Option<Complex64> {
        let i = self.grid.binary_search(&n).ok()?;
        let [re, im] = self.weighted[i];
        Some(Complex64::new(re, im))
    }
}

fn check_grid(grid: &[usize]) -> Result<usize> {
    if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::validation("grid", "grid must be non-empty, strictly ascending and >= 1"));
    }
    Ok(*grid.last().unwrap())
}

fn weighted_series(f: &[Complex64], w: &WeightSequence, grid: &[usize]) -> Result<Vec<[f64; 2]>> {
    let n_max = check_grid(grid)?;
    w.check_upto("N", n_max)?;
    check_length(f, n_max as u128)?;
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = Complex64::new(0.0, 0.0);
    let mut next = grid.iter().peekable();
    for n in 1..=n_max {
        acc += w.at(n) * f[n - 1];
        if next.peek() == Some(&&n) {
            next.next();
            out.push(pair(acc / n as f64));
        }
    }
    Ok(out)
}

fn correlation_matrix(f: &[Complex64], primes: &[u64], n: usize) -> Result<Vec<Vec<[f64; 2]>>> {
    let k = primes.len();
    let entries = (0..k * k)
        .into_par_iter()
        .map(|idx| correlation(f, primes[idx / k], primes[idx % k], n).map(pair))
        .collect::<Result<Vec<_>>>()?;
    Ok(entries.chunks(k).map(<[_]>::to_vec).collect())
}

/// Correlation matrix over the primes of `[p_min, p_max]` at the largest grid
/// point, plus `w(N)` on the grid.
pub fn criterion_report(
    f: &[Complex64],
    sequence: impl Into<String>,
    prime_window: (u64, u64),
    w: &WeightSequence,
    grid: &[usize],
    threshold: f64,
) -> Result<CorrelationReport> {
    let n_max = check_grid(grid)?;
    if !(threshold > 0.0) {
        return Err(Error::range("threshold", threshold, "> 0"));
    }
    let primes = primes_in(prime_window.0, prime_window.1);
    if primes.len() < 2 {
        return Err(Error::validation(
            "primes",
            format!("window [{}, {}] holds fewer than two primes", prime_window.0, prime_window.1),
        ));
    }
    let weighted = weighted_series(f, w, grid)?;
    let matrix = correlation_matrix(f, &primes, n_max)?;
    let max_off = (0..primes.len())
        .flat_map(|i| (0..primes.len()).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| Complex64::new(matrix[i][j][0], matrix[i][j][1]).norm())
        .fold(0.0, f64::max);
    Ok(CorrelationReport {
        sequence: sequence.into(),
        label: None,
        primes,
        n_max,
        matrix,
        grid: grid.to_vec(),
        weighted,
        max_offdiagonal: Some(max_off),
        threshold,
        hypothesis_plausible: Some(max_off < threshold),
        config: vec![
            ("p_min".into(), prime_window.0.to_string()),
            ("p_max".into(), prime_window.1.to_string()),
            ("weight".into(), w.kind().to_string()),
        ],
    })
}

/// `F(n) = Π_j f_j(T^{a_j n} x)` for `n = 1..=N`. Powers default to `1..=k`.
pub fn product_observable(
    sys: &SystemSpec,
    observables: &[Observable],
    powers: Option<&[i64]>,
    x: Point,
    n: usize,
) -> Result<Vec<Complex64>> {
    if observables.is_empty() {
        return Err(Error::validation("observables", "need at least one observable"));
    }
    let default: Vec<i64> = (1..=observables.len() as i64).collect();
    let powers = powers.unwrap_or(&default);
    if powers.len() != observables.len() {
        return Err(Error::validation(
            "powers",
            format!("{} powers for {} observables", powers.len(), observables.len()),
        ));
    }
    if let Some(a) = powers.iter().find(|&&a| a <= 0) {
        return Err(Error::precondition("powers", a, "positive integers"));
    }
    let mut sorted = powers.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::precondition("powers", format!("{powers:?}"), "distinct"));
    }
    let mut out = vec![Complex64::new(1.0, 0.0); n];
    for (obs, &a) in observables.iter().zip(powers) {
        let orbit = orbit_observable(sys, obs, x, a, n)?;
        for (o, v) in out.iter_mut().zip(&orbit.values) {
            *o *= v;
        }
    }
    Ok(out)
}

/// `F(n) = Π_j f_j(T_j^n x)` for commuting rotations `T_j`, with `w(N)` on
/// the grid and, if a prime window is given, the correlation matrix.
pub fn commuting_experiment(
    systems: &[SystemSpec],
    observables: &[Observable],
    x: Point,
    w: &WeightSequence,
    grid: &[usize],
    prime_window: Option<(u64, u64)>,
    threshold: f64,
) -> Result<CorrelationReport> {
    if systems.len() < 2 {
        return Err(Error::validation("systems", "need at least two transformations"));
    }
    if systems.len() != observables.len() {
        return Err(Error::validation(
            "observables",
            format!("{} observables for {} systems", observables.len(), systems.len()),
        ));
    }
    let mut alphas = Vec::with_capacity(systems.len());
    for s in systems {
        match s.system {
            System::Rotation { alpha } => alphas.push(alpha.0),
            _ => {
                return Err(Error::validation(
                    "systems",
                    format!("{} is not a rotation; only commuting rotations are supported", s.kind_name()),
                ))
            }
        }
    }
    let mut sorted = alphas.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::validation("systems", "rotation angles must be distinct"));
    }
    let n_max = check_grid(grid)?;
    let len = match prime_window {
        Some((_, p_max)) => n_max.checked_mul(p_max as usize).ok_or_else(|| Error::range("N*p_max", n_max, "fits in memory"))?,
        None => n_max,
    };
    let mut f = vec![Complex64::new(1.0, 0.0); len];
    for (sys, obs) in systems.iter().zip(observables) {
        let orbit = orbit_observable(sys, obs, x, 1, len)?;
        for (o, v) in f.iter_mut().zip(&orbit.values) {
            *o *= v;
        }
    }
    let description = systems
        .iter()
        .zip(observables)
        .map(|(s, o)| format!("{} under {}", o.describe(), s))
        .collect::<Vec<_>>()
        .join(" * ");
    let mut report = match prime_window {
        Some(window) => criterion_report(&f, description, window, w, grid, threshold)?,
        None => CorrelationReport {
            sequence: description,
            label: None,
            primes: Vec::new(),
            n_max,
            matrix: Vec::new(),
            grid: grid.to_vec(),
            weighted: weighted_series(&f, w, grid)?,
            max_offdiagonal: None,
            threshold,
            hypothesis_plausible: None,
            config: vec![("weight".into(), w.kind().to_string())],
        },
    };
    report.label = Some(EXPERIMENT_LABEL.into());
    report.config.push(("x".into(), x.to_string()));
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AperiodicityReport {
    pub n: usize,
    /// `(a, b, |(1/N) Σ_{n≤N} ν(an+b)|)`.
    pub rows: Vec<(u64, u64, f64)>,
    pub max_abs: f64,
    pub threshold: f64,
    pub plausible: bool,
}

/// `|(1/N) Σ_{n≤N} ν(an+b)|` for `1 ≤ a ≤ 8`, `0 ≤ b ≤ 8`.
pub fn aperiodicity_check(w: &WeightSequence, n: usize, threshold: f64) -> Result<AperiodicityReport> {
    if n == 0 {
        return Err(Error::validation("N", "N must be >= 1"));
    }
    let r = APERIODICITY_RANGE as usize;
    w.check_upto("N", r * n + r)?;
    let mut rows = Vec::new();
    for a in 1..=r {
        for b in 0..=r {
            let s: Complex64 = (1..=n).map(|m| w.at(a * m + b)).sum();
            rows.push((a as u64, b as u64, s.norm() / n as f64));
        }
    }
    let max_abs = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    Ok(AperiodicityReport {
        n,
        rows,
        max_abs,
        threshold,
        plausible: max_abs < threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{weight_table, WeightKind};
    use crate::Fixed64;

    fn lambda_seq(n: usize) -> Vec<Complex64> {
        weight_table(WeightKind::Liouville, n as u64).unwrap().to_complex(n).unwrap()
    }

    #[test]
    fn trivial_sequences() {
        let one = vec![Complex64::new(1.0, 0.0); 1000];
        assert_eq!(prime_pair_correlation(&one, 2, 3, 100).unwrap(), Complex64::new(1.0, 0.0));
        let lam = lambda_seq(10_000);
        for (p, q) in [(2, 3), (5, 7), (11, 97)] {
            assert_eq!(prime_pair_correlation(&lam, p, q, 100).unwrap(), Complex64::new(1.0, 0.0));
        }
        assert!(matches!(prime_pair_correlation(&one, 2, 3, 334), Err(Error::Length { .. })));
        assert!(prime_pair_correlation(&one, 2, 2, 10).is_err());
        assert!(prime_pair_correlation(&one, 4, 3, 10).is_err());
    }

    #[test]
    fn rotation_character_closed_form() {
        let alpha = Fixed64::SQRT2_MINUS_1;
        let n = 10_000;
        let f: Vec<Complex64> = (1..=3 * n as i64).map(|m| alpha.wrapping_mul_int(m).exp_i2pi()).collect();
        let c = prime_pair_correlation(&f, 2, 3, n).unwrap();
        let e = |t: f64| Complex64::from_polar(1.0, std::f64::consts::TAU * t);
        let a = alpha.to_f64();
        let closed = e(-a) * (Complex64::new(1.0, 0.0) - e(-(n as f64) * a)) / (Complex64::new(1.0, 0.0) - e(-a)) / n as f64;
        assert!((c - closed).norm() < 1e-9);
        assert!(c.norm() <= 1.0 / (n as f64 * (2.0 * (std::f64::consts::PI * a).sin()).abs()) + 1e-9);
    }

    #[test]
    fn report_structure() {
        let lam = lambda_seq(100 * 97);
        let w = weight_table(WeightKind::Liouville, 100).unwrap();
        let r = criterion_report(&lam, "lambda", (2, 97), &w, &[10, 50, 100], DEFAULT_THRESHOLD).unwrap();
        assert_eq!(r.primes.len(), 25);
        for i in 0..25 {
            for j in 0..25 {
                assert_eq!(r.entry(i, j), r.entry(j, i).conj());
                assert_eq!(r.entry(i, j), Complex64::new(1.0, 0.0));
            }
        }
        assert_eq!(r.hypothesis_plausible, Some(false));
        // ν = λ and F = λ give w(N) = 1
        assert_eq!(r.weighted_at(100), Some(Complex64::new(1.0, 0.0)));

        let zero = WeightSequence::zero(100);
        let r = criterion_report(&lam, "lambda", DEFAULT_PRIME_WINDOW, &zero, &[100], 0.1).unwrap();
        assert!(r.weighted.iter().all(|v| *v == [0.0, 0.0]));
        assert!(criterion_report(&lam, "lambda", (24, 28), &w, &[100], 0.1).is_err());
        assert!(criterion_report(&lam[..9000], "lambda", (2, 97), &w, &[100], 0.1).is_err());
    }

    #[test]
    fn product_observable_cases() {
        let sys = SystemSpec::rotation(Fixed64::GOLDEN);
        let x = Fixed64::from_ratio(1, 7);
        let chars = vec![Observable::Character { k: 1 }; 3];
        let f = product_observable(&sys, &chars, None, Point::Torus(x), 200).unwrap();
        for (i, v) in f.iter().enumerate() {
            let n = i as i64 + 1;
            let expect = (x * 3 + Fixed64::GOLDEN * (6 * n)).exp_i2pi();
            assert!((v - expect).norm() < 1e-12);
        }
        let one = product_observable(&sys, &[Observable::constant_one(), Observable::constant_one()], None, Point::Torus(x), 50).unwrap();
        assert!(one.iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        let single = product_observable(&sys, &chars[..1], Some(&[5]), Point::Torus(x), 50).unwrap();
        let orbit = orbit_observable(&sys, &chars[0], Point::Torus(x), 5, 50).unwrap();
        assert_eq!(single, orbit.values);
        assert!(product_observable(&sys, &chars[..2], Some(&[2, 2]), Point::Torus(x), 5).is_err());
        assert!(product_observable(&sys, &chars[..2], Some(&[0, 2]), Point::Torus(x), 5).is_err());
    }

    #[test]
    fn commuting_reductions() {
        let w = weight_table(WeightKind::Liouville, 2000).unwrap();
        let x = Point::Torus(Fixed64::ZERO);
        let rots = [SystemSpec::rotation(Fixed64::GOLDEN), SystemSpec::rotation(Fixed64::SQRT2_MINUS_1)];
        let ones = [Observable::constant_one(), Observable::constant_one()];
        let r = commuting_experiment(&rots, &ones, x, &w, &[1000, 2000], None, 0.1).unwrap();
        let expect = w.partial_sum(2000).unwrap() / 2000.0;
        assert_eq!(r.weighted_at(2000), Some(expect));
        assert_eq!(r.label.as_deref(), Some(EXPERIMENT_LABEL));

        let chars = [Observable::Character { k: 2 }, Observable::Character { k: -1 }];
        let r = commuting_experiment(&rots, &chars, x, &w, &[2000], None, 0.1).unwrap();
        let theta = Fixed64::GOLDEN * 2 + Fixed64::SQRT2_MINUS_1 * -1;
        let s = crate::expsum::exp_sum_fixed(&w, 2000, theta, 1).unwrap() / 2000.0;
        assert!((r.weighted_at(2000).unwrap() - s).norm() < 1e-12);

        assert!(commuting_experiment(&rots[..1], &ones[..1], x, &w, &[10], None, 0.1).is_err());
        let mixed = [SystemSpec::rotation(Fixed64::GOLDEN), SystemSpec::doubling()];
        assert!(matches!(
            commuting_experiment(&mixed, &ones, x, &w, &[10], None, 0.1),
            Err(Error::Validation { .. })
        ));
        let same = [rots[0].clone(), rots[0].clone()];
        assert!(commuting_experiment(&same, &ones, x, &w, &[10], None, 0.1).is_err());
    }

    #[test]
    fn aperiodicity_of_constant_and_lambda() {
        let one = weight_table(WeightKind::ConstantOne, 1000).unwrap();
        let r = aperiodicity_check(&one, 100, 0.1).unwrap();
        assert_eq!(r.max_abs, 1.0);
        assert!(!r.plausible);
        assert_eq!(r.rows.len(), 72);
        let lam = weight_table(WeightKind::Liouville, 1_000_000).unwrap();
        assert!(aperiodicity_check(&lam, 100_000, 0.1).unwrap().plausible);
        assert!(aperiodicity_check(&lam, 200_000, 0.1).is_err());
    }
}
