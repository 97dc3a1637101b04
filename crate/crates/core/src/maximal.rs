//! Lacunary grids and block maximal functions on `Z_J`.
//!
//! For `ρ > 1`, `I_ρ` collects the ceilings of `ρ^n`; `N_k` is its `k`-th
//! element (1-based, so `N_1 = 1`). The block maximal function
//!
//! ```text
//! m_{N0,N1}(f,g)(j) = sup { |B_N(j) − B_{N0}(j)| : N ∈ I_ρ ∩ [N0, N1] }
//! ```
//!
//! is built from running sums of the bilinear form, so a whole family of
//! blocks costs one pass `O(J · N_{K+1})`.

use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::WeightSequence;
use crate::averages::{prefix_series, FinitaryField};
use crate::dynsys::{orbit_observable, Observable, Point, System, SystemSpec};
use crate::report::{fmt_f64, write_meta};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct LacunaryGrid {
    pub rho: f64,
    /// Strictly increasing, starting at 1, all `≤ N_max`.
    pub points: Vec<usize>,
}

impl LacunaryGrid {
    /// `N_k`, 1-based.
    pub fn n_k(&self, k: usize) -> Option<usize> {
        k.checked_sub(1).and_then(|i| self.points.get(i).copied())
    }

    /// Consecutive pairs `(N_k, N_{k+1})`.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn contains(&self, n: usize) -> bool {
        self.points.binary_search(&n).is_ok()
    }
}

/// `{⌈ρ^n⌉ : n ≥ 0} ∩ [1, N_max]`, deduplicated.
pub fn lacunary_grid(rho: f64, n_max: usize) -> Result<LacunaryGrid> {
    if !(rho > 1.0) || !rho.is_finite() {
        return Err(Error::validation("rho", format!("rho = {rho} must be a finite real > 1")));
    }
    if n_max == 0 {
        return Err(Error::validation("N_max", "lacunary grid needs N_max >= 1"));
    }
    let mut points = Vec::new();
    let mut power = 1.0f64;
    loop {
        let p = power.ceil();
        if p > n_max as f64 {
            break;
        }
        let p = p as usize;
        if points.last() != Some(&p) {
            points.push(p);
        }
        power *= rho;
    }
    Ok(LacunaryGrid { rho, points })
}

fn check_pair(f: &FinitaryField, g: &FinitaryField) -> Result<usize> {
    if f.modulus() != g.modulus() {
        return Err(Error::validation(
            "g",
            format!("fields live on different groups: Z_{} and Z_{}", f.modulus(), g.modulus()),
        ));
    }
    Ok(f.modulus())
}

/// For every `j`, the running values `|B_N(j) − B_{N_{k}}(j)|` maximized
/// over `N ∈ I_ρ ∩ [N_k, N_{k+1}]`, for each consecutive block of `points`.
/// `points` must be strictly increasing lacunary points below `J`.
fn block_sups(f: &FinitaryField, g: &FinitaryField, w: &WeightSequence, points: &[usize]) -> Vec<Vec<f64>> {
    let modulus = f.modulus();
    let n_top = *points.last().unwrap();
    let nu: Vec<Complex64> = (1..=n_top).map(|n| w.at(n)).collect();
    let (fv, gv) = (f.values(), g.values());
    let blocks = points.len() - 1;
    // per j: one sup per block
    let per_j: Vec<Vec<f64>> = (0..modulus)
        .into_par_iter()
        .map(|j| {
            let mut out = vec![0.0f64; blocks];
            let mut sum = Complex64::new(0.0, 0.0);
            let mut next = 0;
            let mut base = Complex64::new(0.0, 0.0);
            for n in 1..=n_top {
                let plus = (j + n) % modulus;
                let minus = (j + modulus - n % modulus) % modulus;
                sum += nu[n - 1] * fv[plus] * gv[minus];
                if n == points[next] {
                    let b = sum / n as f64;
                    if next > 0 {
                        let k = next - 1;
                        out[k] = out[k].max((b - base).norm());
                    }
                    base = b;
                    next += 1;
                }
            }
            out
        })
        .collect();
    (0..blocks).map(|k| per_j.iter().map(|row| row[k]).collect()).collect()
}

/// `m_{N0,N1}(f,g)` as a nonnegative real field on `Z_J`.
pub fn block_maximal(
    f: &FinitaryField,
    g: &FinitaryField,
    w: &WeightSequence,
    grid: &LacunaryGrid,
    n0: usize,
    n1: usize,
) -> Result<FinitaryField> {
    let modulus = check_pair(f, g)?;
    for (param, n) in [("N0", n0), ("N1", n1)] {
        if !grid.contains(n) {
            return Err(Error::validation(param, format!("{n} is not a point of I_rho (rho = {})", grid.rho)));
        }
    }
    if n1 < n0 {
        return Err(Error::validation("N1", format!("N1 = {n1} must be >= N0 = {n0}")));
    }
    if n1 >= modulus {
        return Err(Error::Window { window: n1, modulus });
    }
    w.check_upto("N1", n1)?;
    if n0 == n1 {
        return Ok(FinitaryField::zeros(modulus));
    }
    let inside: Vec<usize> = grid.points.iter().copied().filter(|&p| p >= n0 && p <= n1).collect();
    // sup over I_rho ∩ [N0, N1] against the fixed base B_{N0}
    let values: Vec<Complex64> = {
        let nu: Vec<Complex64> = (1..=n1).map(|n| w.at(n)).collect();
        let (fv, gv) = (f.values(), g.values());
        (0..modulus)
            .into_par_iter()
            .map(|j| {
                let mut sum = Complex64::new(0.0, 0.0);
                let mut base = None;
                let mut best: f64 = 0.0;
                let mut next = 0;
                for n in 1..=n1 {
                    let plus = (j + n) % modulus;
                    let minus = (j + modulus - n % modulus) % modulus;
                    sum += nu[n - 1] * fv[plus] * gv[minus];
                    if next < inside.len() && n == inside[next] {
                        let b = sum / n as f64;
                        match base {
                            None => base = Some(b),
                            Some(b0) => best = best.max((b - b0).norm()),
                        }
                        next += 1;
                    }
                }
                Complex64::new(best, 0.0)
            })
            .collect()
    };
    FinitaryField::new(values)
}

/// Block norms of the √K inequality and the running ratios.
#[derive(Clone, Debug, PartialEq)]
pub struct MaximalStats {
    pub rho: f64,
    pub k: usize,
    /// `‖m_{N_k,N_{k+1}}(f,g)‖_{ℓ¹}` for `k = 1..=K`.
    pub block_norms: Vec<f64>,
    pub f_norm: f64,
    pub g_norm: f64,
    /// `Σ_{i≤k} block_norms[i] / (√k ‖f‖₂ ‖g‖₂)` for `k = 1..=K`.
    pub cumulative_ratios: Vec<f64>,
    pub ratio: f64,
}

impl MaximalStats {
    /// Columns `rho,K,block,block_l1,cumulative_ratio`.
    pub fn write_csv<W: Write>(&self, mut out: W, meta: &[(String, String)]) -> io::Result<()> {
        write_meta(&mut out, meta)?;
        writeln!(out, "rho,K,block,block_l1,cumulative_ratio")?;
        self.write_rows(&mut out)
    }

    pub fn write_rows<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for (i, (norm, ratio)) in self.block_norms.iter().zip(&self.cumulative_ratios).enumerate() {
            writeln!(out, "{},{},{},{},{}", fmt_f64(self.rho), self.k, i + 1, fmt_f64(*norm), fmt_f64(*ratio))?;
        }
        Ok(())
    }
}

#[allow(non_snake_case)]
pub fn sqrtK_ratio(f: &FinitaryField, g: &FinitaryField, w: &WeightSequence, rho: f64, k: usize) -> Result<MaximalStats> {
    let modulus = check_pair(f, g)?;
    if k == 0 {
        return Err(Error::validation("K", "K must be >= 1"));
    }
    let grid = lacunary_grid(rho, modulus.saturating_sub(1).max(1))?;
    if grid.points.len() < k + 1 {
        return Err(Error::validation(
            "K",
            format!(
                "I_rho below J = {modulus} has {} points, K = {k} needs {}",
                grid.points.len(),
                k + 1
            ),
        ));
    }
    let points = &grid.points[..=k];
    w.check_upto("N_{K+1}", points[k])?;
    let sups = block_sups(f, g, w, points);
    let block_norms: Vec<f64> = sups.iter().map(|s| s.iter().sum::<f64>() / modulus as f64).collect();
    let (f_norm, g_norm) = (f.norm_l2(), g.norm_l2());
    let denom = f_norm * g_norm;
    let mut acc = 0.0;
    let cumulative_ratios: Vec<f64> = block_norms
        .iter()
        .enumerate()
        .map(|(i, b)| {
            acc += b;
            if denom == 0.0 {
                0.0
            } else {
                acc / (((i + 1) as f64).sqrt() * denom)
            }
        })
        .collect();
    Ok(MaximalStats {
        rho,
        k,
        ratio: *cumulative_ratios.last().unwrap(),
        block_norms,
        f_norm,
        g_norm,
        cumulative_ratios,
    })
}

/// `‖m_{N0,N1}(f,g)‖_{ℓ¹}` computed on the sequence side and, independently,
/// on the dynamical side with `(Z_J, shift, uniform)` and powers `+1`, `−1`.
pub fn transference_check(
    sys: &SystemSpec,
    f: &FinitaryField,
    g: &FinitaryField,
    w: &WeightSequence,
    rho: f64,
    n0: usize,
    n1: usize,
) -> Result<(f64, f64)> {
    let modulus = check_pair(f, g)?;
    match sys.system {
        System::CyclicShift { modulus: m } if m as usize == modulus => {}
        System::CyclicShift { modulus: m } => {
            return Err(Error::validation(
                "J",
                format!("system is Z_{m} but the fields live on Z_{modulus}"),
            ))
        }
        _ => {
            return Err(Error::validation(
                "system",
                format!("transference runs on the cyclic shift, got {}", sys.kind_name()),
            ))
        }
    }
    let grid = lacunary_grid(rho, n1.max(1))?;
    let seq_side = block_maximal(f, g, w, &grid, n0, n1)?.norm_l1();

    let f_obs = Observable::table(f.values().to_vec())?;
    let g_obs = Observable::table(g.values().to_vec())?;
    let sample: Vec<usize> = grid.points.iter().copied().filter(|&p| p >= n0 && p <= n1).collect();
    let mut total = 0.0;
    for x in 0..modulus as u64 {
        if n0 == n1 {
            break;
        }
        let fo = orbit_observable(sys, &f_obs, Point::Residue(x), 1, n1)?;
        let go = orbit_observable(sys, &g_obs, Point::Residue(x), -1, n1)?;
        let series = prefix_series(w, &[fo, go], &sample)?;
        let base = series.values[0];
        total += series.values.iter().map(|v| (v - base).norm()).fold(0.0, f64::max);
    }
    Ok((seq_side, total / modulus as f64))
}
