use super::AverageSeries;
use crate::maximal::lacunary_grid;
use crate::{Error, Result};

/// One lacunary point `N_m` with `|A_{N_m}|` and the gap term
/// `bound · (N_{m+1} − N_m) / N_m` to the next point (absent for the last).
#[derive(Clone, Debug, PartialEq)]
pub struct CesaroRow {
    pub n: usize,
    pub abs_value: f64,
    pub gap: Option<f64>,
}

/// Convergence diagnostics linking the lacunary subsequence to all `N`.
///
/// Between consecutive lacunary points `N_m ≤ N < N_{m+1}`,
/// `|A_N| ≤ |A_{N_m}| + bound · (N − N_m)/N_m ≤ |A_{N_m}| + gap_m`, so the
/// tail of the full series is controlled by the tail along `I_ρ` plus the
/// largest gap term, which tends to `bound · (ρ − 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CesaroReport {
    pub rho: f64,
    pub bound: f64,
    pub rows: Vec<CesaroRow>,
    /// First lacunary point counted as tail: the smallest `N_m ≥ √N_last`.
    pub tail_start: usize,
    /// `sup |A_{N_m}|` over lacunary tail points.
    pub tail_sup: f64,
    /// Largest gap term among tail rows.
    pub max_gap: f64,
    /// `sup |A_N|` over every grid point `N ≥ tail_start`.
    pub full_tail_sup: f64,
    /// Grid points where the interpolation inequality fails (always 0 unless
    /// the series is corrupt).
    pub interpolation_violations: usize,
}

pub fn cesaro_diagnostics(series: &AverageSeries, rho: f64) -> Result<CesaroReport> {
    let Some(&n_last) = series.grid.last() else {
        return Err(Error::validation("grid", "series is empty"));
    };
    let lacunary = lacunary_grid(rho, n_last)?;
    if lacunary.points.len() < 2 {
        return Err(Error::validation(
            "grid",
            format!("grid up to {n_last} holds fewer than two lacunary points for rho = {rho}"),
        ));
    }
    let mut abs_at = Vec::with_capacity(lacunary.points.len());
    for &p in &lacunary.points {
        let Some(v) = series.value_at(p) else {
            return Err(Error::validation(
                "grid",
                format!("lacunary point {p} (rho = {rho}) is missing from the series grid"),
            ));
        };
        abs_at.push(v.norm());
    }

    let rows: Vec<CesaroRow> = lacunary
        .points
        .iter()
        .enumerate()
        .map(|(i, &n)| CesaroRow {
            n,
            abs_value: abs_at[i],
            gap: lacunary
                .points
                .get(i + 1)
                .map(|&next| series.bound * (next - n) as f64 / n as f64),
        })
        .collect();

    let threshold = (n_last as f64).sqrt();
    let tail_start = lacunary
        .points
        .iter()
        .copied()
        .find(|&p| p as f64 >= threshold)
        .unwrap_or(n_last);
    let tail = rows.iter().filter(|r| r.n >= tail_start);
    let tail_sup = tail.clone().map(|r| r.abs_value).fold(0.0, f64::max);
    let max_gap = tail.filter_map(|r| r.gap).fold(0.0, f64::max);

    let mut full_tail_sup: f64 = 0.0;
    let mut violations = 0;
    let mut m = 0;
    for (&n, v) in series.grid.iter().zip(&series.values) {
        while m + 1 < rows.len() && rows[m + 1].n <= n {
            m += 1;
        }
        if n >= tail_start {
            full_tail_sup = full_tail_sup.max(v.norm());
        }
        let base = &rows[m];
        let allowed = base.abs_value + series.bound * (n - base.n) as f64 / base.n as f64;
        if v.norm() > allowed * (1.0 + 1e-12) + 1e-15 {
            violations += 1;
        }
    }

    Ok(CesaroReport {
        rho,
        bound: series.bound,
        rows,
        tail_start,
        tail_sup,
        max_gap,
        full_tail_sup,
        interpolation_violations: violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averages::{default_grid, prefix_series};
    use crate::arith::{weight_table, WeightKind, WeightSequence};
    use crate::dynsys::{orbit_observable, Observable, Point, SystemSpec};
    use crate::Fixed64;

    fn chars(n: usize) -> Vec<crate::dynsys::OrbitSequence> {
        let sys = SystemSpec::rotation(Fixed64::GOLDEN);
        let x = Point::Torus(Fixed64::ZERO);
        vec![
            orbit_observable(&sys, &Observable::Character { k: 1 }, x, 1, n).unwrap(),
            orbit_observable(&sys, &Observable::Character { k: 1 }, x, 2, n).unwrap(),
        ]
    }

    #[test]
    fn zero_series() {
        let grid = default_grid(4096, 2.0).unwrap();
        let s = prefix_series(&WeightSequence::zero(4096), &chars(4096), &grid).unwrap();
        let r = cesaro_diagnostics(&s, 2.0).unwrap();
        assert_eq!((r.tail_sup, r.max_gap, r.full_tail_sup), (0.0, 0.0, 0.0));
        assert!(r.rows.iter().all(|row| row.abs_value == 0.0 && row.gap.unwrap_or(0.0) == 0.0));
    }

    #[test]
    fn dyadic_gap_is_rho_minus_one() {
        let lambda = weight_table(WeightKind::Liouville, 1 << 14).unwrap();
        let grid = default_grid(1 << 14, 2.0).unwrap();
        let s = prefix_series(&lambda, &chars(1 << 14), &grid).unwrap();
        let r = cesaro_diagnostics(&s, 2.0).unwrap();
        assert_eq!(r.max_gap, 1.0);
        assert_eq!(r.interpolation_violations, 0);
    }

    #[test]
    fn missing_lacunary_points() {
        let lambda = weight_table(WeightKind::Liouville, 100).unwrap();
        let s = prefix_series(&lambda, &chars(100), &[1, 2, 4, 8, 16, 32, 64, 100]).unwrap();
        assert!(cesaro_diagnostics(&s, 2.0).is_ok());
        assert!(matches!(cesaro_diagnostics(&s, 1.5), Err(Error::Validation { param: "grid", .. })));
        let tiny = prefix_series(&lambda, &chars(1), &[1]).unwrap();
        assert!(cesaro_diagnostics(&tiny, 2.0).is_err());
    }
}
