use std::io::{self, Write};

use num_complex::Complex64;

use crate::arith::WeightSequence;
use crate::dynsys::{orbit_observable, Observable, OrbitSequence, Point, System, SystemSpec};
use crate::report::{fmt_f64, write_meta};
use crate::{expsum, maximal, Error, Fixed64, Result};

/// `A_N` on an ascending grid of `N`, plus the metadata describing the run.
#[derive(Clone, Debug, PartialEq)]
pub struct AverageSeries {
    pub grid: Vec<usize>,
    pub values: Vec<Complex64>,
    /// `sup|ν| · Π_j sup|f_j|`, the trivial bound on every `|A_N|`.
    pub bound: f64,
    pub meta: Vec<(String, String)>,
}

impl AverageSeries {
    pub fn value_at(&self, n: usize) -> Option<Complex64> {
        self.grid.binary_search(&n).ok().map(|i| self.values[i])
    }

    pub fn last(&self) -> Option<(usize, Complex64)> {
        Some((*self.grid.last()?, *self.values.last()?))
    }

    /// Columns `N,re,im,abs` under a `key=value` metadata line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut meta = self.meta.clone();
        meta.push(("bound".into(), fmt_f64(self.bound)));
        write_meta(&mut out, &meta)?;
        writeln!(out, "N,re,im,abs")?;
        for (n, v) in self.grid.iter().zip(&self.values) {
            writeln!(out, "{n},{},{},{}", fmt_f64(v.re), fmt_f64(v.im), fmt_f64(v.norm()))?;
        }
        Ok(())
    }
}

fn check_grid(grid: &[usize]) -> Result<usize> {
    if grid.is_empty() {
        return Err(Error::validation("grid", "grid is empty"));
    }
    if grid[0] == 0 {
        return Err(Error::validation("grid", "grid points must be >= 1"));
    }
    if let Some(w) = grid.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::validation(
            "grid",
            format!("grid must be strictly ascending ({} then {})", w[0], w[1]),
        ));
    }
    Ok(*grid.last().unwrap())
}

/// Running averages `A_N = (1/N) Σ_{n≤N} ν(n) Π_j orbit_j[n−1]`, emitted at
/// each grid point, in one pass.
pub fn prefix_series(w: &WeightSequence, orbits: &[OrbitSequence], grid: &[usize]) -> Result<AverageSeries> {
    let n_max = check_grid(grid)?;
    w.check_upto("grid", n_max)?;
    for (i, o) in orbits.iter().enumerate() {
        if o.len() < n_max {
            return Err(Error::validation(
                "orbits",
                format!("orbit {i} has length {}, grid needs {n_max}", o.len()),
            ));
        }
    }

    let mut values = Vec::with_capacity(grid.len());
    let mut sum = Complex64::new(0.0, 0.0);
    let mut next = grid.iter().peekable();
    for n in 1..=n_max {
        let mut term = w.at(n);
        for o in orbits {
            term *= o.values[n - 1];
        }
        sum += term;
        if next.peek() == Some(&&n) {
            values.push(sum / n as f64);
            next.next();
        }
    }

    let bound = w.sup_norm() * orbits.iter().map(|o| o.meta.sup).product::<f64>();
    let mut meta = vec![
        ("weight".to_string(), w.kind().to_string()),
        ("observables".to_string(), orbits.len().to_string()),
    ];
    for (i, o) in orbits.iter().enumerate() {
        meta.push((format!("f{}", i + 1), o.meta.observable.clone()));
        meta.push((format!("power{}", i + 1), o.meta.power.to_string()));
    }
    if let Some(o) = orbits.first() {
        meta.push(("system".into(), o.meta.system.clone()));
        meta.push(("start".into(), o.meta.start.to_string()));
    }
    Ok(AverageSeries {
        grid: grid.to_vec(),
        values,
        bound,
        meta,
    })
}

/// Evaluates the bilinear average of two characters over a rotation two ways.
///
/// The first component is `A_N` from the orbit streams of `e(k1·)` at power
/// `a` and `e(k2·)` at power `b`. The second is the collapsed form
/// `e((k1+k2)x) · (1/N) Σ ν(n) e(n (k1 a + k2 b) α)`. They agree up to
/// rounding.
#[allow(clippy::too_many_arguments)]
pub fn rotation_reduction_check(
    w: &WeightSequence,
    sys: &SystemSpec,
    k1: i64,
    k2: i64,
    a: i64,
    b: i64,
    x: Fixed64,
    n: usize,
) -> Result<(Complex64, Complex64)> {
    let System::Rotation { alpha } = sys.system else {
        return Err(Error::validation(
            "system",
            format!("rotation_reduction_check needs a rotation, got {}", sys.kind_name()),
        ));
    };
    let f = orbit_observable(sys, &Observable::Character { k: k1 }, Point::Torus(x), a, n)?;
    let g = orbit_observable(sys, &Observable::Character { k: k2 }, Point::Torus(x), b, n)?;
    let via_orbits = prefix_series(w, &[f, g], &[n])?.values[0];

    let theta = alpha * (k1.wrapping_mul(a).wrapping_add(k2.wrapping_mul(b)));
    let collapsed = x.wrapping_mul_int(k1.wrapping_add(k2)).exp_i2pi() * expsum::exp_sum_fixed(w, n, theta, 1)? / n as f64;
    Ok((via_orbits, collapsed))
}

/// Dyadic points `1, 2, 4, …` together with the lacunary points of `ρ`, and
/// `n_max` itself.
pub fn default_grid(n_max: usize, rho: f64) -> Result<Vec<usize>> {
    if n_max == 0 {
        return Err(Error::validation("N_max", "grid needs N_max >= 1"));
    }
    let lacunary = maximal::lacunary_grid(rho, n_max)?;
    let mut grid: Vec<usize> = std::iter::successors(Some(1usize), |&p| p.checked_mul(2))
        .take_while(|&p| p <= n_max)
        .chain(lacunary.points.iter().copied())
        .chain(std::iter::once(n_max))
        .collect();
    grid.sort_unstable();
    grid.dedup();
    Ok(grid)
}
