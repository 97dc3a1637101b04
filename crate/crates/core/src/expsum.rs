//! Weighted exponential sums `S(θ) = Σ_{n≤N} ν(n) e(n^k θ)`.
//!
//! Phases are reduced exactly: `θ` is held as a 64-bit fixed-point fraction
//! and `n^k θ mod 1` is a wrapping integer product, so there is no drift in
//! `n`. The maximum over the frequency grid `{m/G}` is taken with one
//! zero-padded DFT for `k = 1` and by direct summation for `k ≥ 2`.

use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::arith::WeightSequence;
use crate::averages::FinitaryField;
use crate::report::{fmt_f64, write_meta};
use crate::{Error, Fixed64, Result};

/// Largest supported phase exponent.
pub const MAX_POWER: u32 = 4;

/// Allowance for the grid maximum under-estimating the true supremum.
pub const SPECTRAL_SLACK: f64 = 0.02;

fn power_mod_2_64(n: usize, k: u32) -> Result<u64> {
    let p = (n as u128)
        .checked_pow(k)
        .ok_or_else(|| Error::range("n^k", format!("{n}^{k}"), "< 2^128"))?;
    Ok(p as u64)
}

fn check_power(k: u32) -> Result<()> {
    if k == 0 || k > MAX_POWER {
        return Err(Error::precondition("k", k, format!("1 <= k <= {MAX_POWER}")));
    }
    Ok(())
}

/// `Σ_{n=1}^{N} ν(n) e(n^k θ)` with `θ` in fixed point.
pub fn exp_sum_fixed(w: &WeightSequence, n: usize, theta: Fixed64, k: u32) -> Result<Complex64> {
    check_power(k)?;
    w.check_upto("N", n)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 1..=n {
        let phase = Fixed64(power_mod_2_64(m, k)?.wrapping_mul(theta.0));
        acc += w.at(m) * phase.exp_i2pi();
    }
    Ok(acc)
}

/// `Σ_{n=1}^{N} ν(n) e(n^k θ)` for real `θ ∈ [0, 1)`.
pub fn exp_sum(w: &WeightSequence, n: usize, theta: f64, k: u32) -> Result<Complex64> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::range("theta", theta, "[0, 1)"));
    }
    exp_sum_fixed(w, n, Fixed64::from_f64(theta), k)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridMax {
    /// `max_m |S(m/G)| / N`.
    pub max_norm: f64,
    pub argmax_index: usize,
    pub argmax_theta: f64,
}

/// `|S(m/G)|` for every `m`, `k = 1`, via one length-`G` DFT. Exponents are
/// folded mod `G`, which is exact at grid nodes.
fn grid_values_linear(coeffs: impl Iterator<Item = (usize, Complex64)>, grid: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); grid];
    for (n, c) in coeffs {
        buf[n % grid] += c;
    }
    // inverse transform: Σ_n a_n e(+nm/G), unnormalized
    FftPlanner::new().plan_fft_inverse(grid).process(&mut buf);
    buf
}

fn argmax(norms: impl Iterator<Item = f64>) -> (usize, f64) {
    // ties resolve to the smallest index
    norms
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best })
}

/// Values `S(m/G)`, `m = 0..G`.
pub fn grid_values(w: &WeightSequence, n: usize, k: u32, grid: usize) -> Result<Vec<Complex64>> {
    check_power(k)?;
    w.check_upto("N", n)?;
    if grid == 0 {
        return Err(Error::validation("G", "grid size must be >= 1"));
    }
    if k == 1 {
        return Ok(grid_values_linear((1..=n).map(|m| (m, w.at(m))), grid));
    }
    let g = grid as u128;
    let residues: Vec<usize> = (1..=n)
        .map(|m| (m as u128).checked_pow(k).map(|p| (p % g) as usize))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::range("n^k", format!("{n}^{k}"), "< 2^128"))?;
    let nu: Vec<Complex64> = (1..=n).map(|m| w.at(m)).collect();
    let table: Vec<Complex64> = (0..grid)
        .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * t as f64 / grid as f64))
        .collect();
    Ok((0..grid)
        .into_par_iter()
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (r, c) in residues.iter().zip(&nu) {
                acc += c * table[(*r as u128 * m as u128 % g) as usize];
            }
            acc
        })
        .collect())
}

/// `max_{θ ∈ {m/G}} |S(θ)| / N`.
///
/// For `k = 1` the grid must satisfy `G ≥ 4N`, which keeps the grid maximum
/// within a fixed factor of the supremum over the circle.
pub fn max_over_grid(w: &WeightSequence, n: usize, k: u32, grid: usize) -> Result<GridMax> {
    check_power(k)?;
    if n == 0 {
        return Err(Error::validation("N", "N must be >= 1"));
    }
    if k == 1 && grid < 4 * n {
        return Err(Error::validation(
            "G",
            format!("G = {grid} is below the density floor 4N = {} for k = 1", 4 * n),
        ));
    }
    let values = grid_values(w, n, k, grid)?;
    let (i, best) = argmax(values.iter().map(|v| v.norm()));
    Ok(GridMax {
        max_norm: best / n as f64,
        argmax_index: i,
        argmax_theta: i as f64 / grid as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShortIntervalMax {
    /// Normalized by the number of summands `M + 1`.
    pub by_count: f64,
    /// Normalized by `M`.
    pub by_length: f64,
    pub argmax_theta: f64,
}

/// `max_{θ ∈ {m/G}} |Σ_{N ≤ n ≤ N+M} ν(n) e(nθ)|`, normalized both ways.
/// Requires `M ≥ ⌈N^{5/8}⌉`.
pub fn short_interval_max(w: &WeightSequence, n: usize, m: usize, grid: usize) -> Result<ShortIntervalMax> {
    if n == 0 {
        return Err(Error::validation("N", "N must be >= 1"));
    }
    if grid == 0 {
        return Err(Error::validation("G", "grid size must be >= 1"));
    }
    let threshold = (n as f64).powf(5.0 / 8.0).ceil() as usize;
    if m < threshold || m == 0 {
        return Err(Error::precondition(
            "M",
            m,
            format!("M >= ceil(N^(5/8)) = {threshold} (short-interval exponent 5/8)"),
        ));
    }
    w.check_upto("N+M", n + m)?;
    let values = grid_values_linear((0..=m).map(|t| (t, w.at(n + t))), grid);
    let (i, best) = argmax(values.iter().map(|v| v.norm()));
    Ok(ShortIntervalMax {
        by_count: best / (m + 1) as f64,
        by_length: best / m as f64,
        argmax_theta: i as f64 / grid as f64,
    })
}

/// Smallest interval length admitted for `N` at exponent `5/8 + ε`.
pub fn short_interval_length(n: usize, eps: f64) -> usize {
    (n as f64).powf(5.0 / 8.0 + eps).ceil() as usize
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl SpectralCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + slack)
    }
}

/// Compares `‖(1/N) Σ_{n≤N} ν(n) g(j−n) χ_m(n)‖_{ℓ²(Z_J)}` (left) with
/// `max_over_grid(ν, N, 1, 4N) · ‖g‖_{ℓ²}` (right).
pub fn spectral_norm_check(g: &FinitaryField, w: &WeightSequence, n: usize, m: usize) -> Result<SpectralCheck> {
    let modulus = g.modulus();
    if n == 0 {
        return Err(Error::validation("N", "N must be >= 1"));
    }
    if n >= modulus {
        return Err(Error::Window { window: n, modulus });
    }
    if m >= modulus {
        return Err(Error::validation("m", format!("character index {m} outside Z_{modulus}")));
    }
    w.check_upto("N", n)?;
    let h: Vec<Complex64> = (1..=n)
        .map(|k| {
            let chi = Complex64::from_polar(1.0, std::f64::consts::TAU * ((m * k) % modulus) as f64 / modulus as f64);
            w.at(k) * chi / n as f64
        })
        .collect();
    let gv = g.values();
    let sq: f64 = (0..modulus)
        .into_par_iter()
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, hk) in h.iter().enumerate() {
                acc += hk * gv[(j + modulus - (k + 1)) % modulus];
            }
            acc.norm_sqr()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    let lhs = (sq / modulus as f64).sqrt();
    let rhs = max_over_grid(w, n, 1, 4 * n)?.max_norm * g.norm_l2();
    Ok(SpectralCheck { lhs, rhs })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayRow {
    pub n: usize,
    pub k: u32,
    pub grid: usize,
    pub max_norm: f64,
    pub argmax_theta: f64,
}

/// Least-squares fit `max_norm ≈ C / log^A N` for a fixed `A`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub a: u32,
    pub c: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayReport {
    pub weight: String,
    pub rows: Vec<DecayRow>,
    pub fits: Vec<DecayFit>,
    /// The fit with the smallest residual; an empirical observation only.
    pub best_fit: Option<DecayFit>,
    pub eps: Option<f64>,
}

impl DecayReport {
    pub fn is_strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].max_norm < w[0].max_norm)
    }

    /// Columns `N,k,G,max_norm,argmax_theta,fitted_A,fitted_C`.
    pub fn write_csv<W: Write>(&self, mut out: W, meta: &[(String, String)]) -> io::Result<()> {
        let mut meta = meta.to_vec();
        meta.push(("weight".into(), self.weight.clone()));
        if let Some(eps) = self.eps {
            meta.push(("eps".into(), fmt_f64(eps)));
        }
        write_meta(&mut out, &meta)?;
        writeln!(out, "N,k,G,max_norm,argmax_theta,fitted_A,fitted_C")?;
        let (fa, fc) = match self.best_fit {
            Some(f) => (f.a.to_string(), fmt_f64(f.c)),
            None => (String::new(), String::new()),
        };
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.n,
                r.k,
                r.grid,
                fmt_f64(r.max_norm),
                fmt_f64(r.argmax_theta),
                fa,
                fc
            )?;
        }
        Ok(())
    }
}

pub fn fit_log_decay(rows: &[DecayRow]) -> Vec<DecayFit> {
    let usable: Vec<&DecayRow> = rows.iter().filter(|r| r.n >= 3).collect();
    if usable.is_empty() {
        return Vec::new();
    }
    (1..=3)
        .map(|a| {
            let xs: Vec<f64> = usable.iter().map(|r| (r.n as f64).ln().powi(-(a as i32))).collect();
            let sxx: f64 = xs.iter().map(|x| x * x).sum();
            let sxy: f64 = xs.iter().zip(&usable).map(|(x, r)| x * r.max_norm).sum();
            let c = sxy / sxx;
            let residual = xs
                .iter()
                .zip(&usable)
                .map(|(x, r)| (r.max_norm - c * x).powi(2))
                .sum::<f64>()
                .sqrt();
            DecayFit { a, c, residual }
        })
        .collect()
}

/// Grid maxima for each `(N, G)` pair, with the `1/log^A` fits.
pub fn decay_report(w: &WeightSequence, k: u32, sizes: &[(usize, usize)]) -> Result<DecayReport> {
    let mut rows = Vec::with_capacity(sizes.len());
    for &(n, grid) in sizes {
        let gm = max_over_grid(w, n, k, grid)?;
        rows.push(DecayRow {
            n,
            k,
            grid,
            max_norm: gm.max_norm,
            argmax_theta: gm.argmax_theta,
        });
    }
    let fits = fit_log_decay(&rows);
    let best_fit = fits
        .iter()
        .copied()
        .min_by(|a, b| a.residual.total_cmp(&b.residual));
    Ok(DecayReport {
        weight: w.kind().to_string(),
        rows,
        fits,
        best_fit,
        eps: None,
    })
}
