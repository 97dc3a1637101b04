use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sieve::{FactorSieve, MAX_SIEVE_LIMIT};
use crate::{Error, Result};

/// Slack on `|ν(n)| ≤ 1` for custom weights, so unit complex numbers built in
/// floating point are accepted.
pub const CUSTOM_SUP_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Liouville,
    Moebius,
    ConstantOne,
    Custom,
}

impl WeightKind {
    pub fn name(self) -> &'static str {
        match self {
            WeightKind::Liouville => "liouville",
            WeightKind::Moebius => "moebius",
            WeightKind::ConstantOne => "constant_one",
            WeightKind::Custom => "custom",
        }
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<WeightKind> {
        match s {
            "liouville" | "lambda" => Ok(WeightKind::Liouville),
            "moebius" | "mobius" | "mu" => Ok(WeightKind::Moebius),
            "constant_one" | "one" => Ok(WeightKind::ConstantOne),
            "custom" => Ok(WeightKind::Custom),
            other => Err(Error::validation(
                "weight",
                format!("unknown weight kind {other:?} (liouville, moebius, constant_one, custom)"),
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Values {
    /// λ, μ and the constant weight: 8-bit signs, widened on use.
    Signs(Vec<i8>),
    Complex(Vec<Complex64>),
}

/// A weight `ν` tabulated on `1..=limit`, extended evenly to `Z` with `ν(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence {
    kind: WeightKind,
    values: Values,
}

/// Tabulate λ, μ or the constant weight on `1..=n_max`.
pub fn weight_table(kind: WeightKind, n_max: u64) -> Result<WeightSequence> {
    if !(1..=MAX_SIEVE_LIMIT).contains(&n_max) {
        return Err(Error::Size {
            param: "N_max",
            value: n_max.to_string(),
            expected: format!("1 <= N_max <= 2^31 ({MAX_SIEVE_LIMIT})"),
        });
    }
    let signs = match kind {
        WeightKind::ConstantOne => vec![1i8; n_max as usize],
        WeightKind::Liouville | WeightKind::Moebius if n_max == 1 => vec![1],
        WeightKind::Liouville => FactorSieve::new(n_max)?.sign_tables().0,
        WeightKind::Moebius => FactorSieve::new(n_max)?.sign_tables().1,
        WeightKind::Custom => {
            return Err(Error::validation(
                "weight",
                "custom weights carry caller-supplied values; use WeightSequence::custom",
            ))
        }
    };
    Ok(WeightSequence {
        kind,
        values: Values::Signs(signs),
    })
}

impl WeightSequence {
    /// Both sign tables from one sieve pass.
    pub fn liouville_and_moebius(n_max: u64) -> Result<(WeightSequence, WeightSequence)> {
        if n_max == 1 {
            return Ok((weight_table(WeightKind::Liouville, 1)?, weight_table(WeightKind::Moebius, 1)?));
        }
        let (lambda, mu) = FactorSieve::new(n_max)?.sign_tables();
        Ok((
            WeightSequence {
                kind: WeightKind::Liouville,
                values: Values::Signs(lambda),
            },
            WeightSequence {
                kind: WeightKind::Moebius,
                values: Values::Signs(mu),
            },
        ))
    }

    /// Caller-supplied weight; `values[0]` is `ν(1)`. Requires `|ν(n)| ≤ 1`.
    pub fn custom(values: Vec<Complex64>) -> Result<WeightSequence> {
        if values.is_empty() {
            return Err(Error::validation("weight", "custom weight table is empty"));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.norm() <= 1.0 + CUSTOM_SUP_TOLERANCE))
        {
            return Err(Error::validation(
                "weight",
                format!("|nu({})| = {} exceeds 1", i + 1, v.norm()),
            ));
        }
        Ok(WeightSequence {
            kind: WeightKind::Custom,
            values: Values::Complex(values),
        })
    }

    /// Custom weight that vanishes identically on `1..=n_max`.
    pub fn zero(n_max: usize) -> WeightSequence {
        WeightSequence {
            kind: WeightKind::Custom,
            values: Values::Complex(vec![Complex64::new(0.0, 0.0); n_max]),
        }
    }

    pub(crate) fn from_signs(kind: WeightKind, signs: Vec<i8>) -> WeightSequence {
        WeightSequence {
            kind,
            values: Values::Signs(signs),
        }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn limit(&self) -> usize {
        match &self.values {
            Values::Signs(v) => v.len(),
            Values::Complex(v) => v.len(),
        }
    }

    /// The sign table, when the weight is stored as one.
    pub fn signs(&self) -> Option<&[i8]> {
        match &self.values {
            Values::Signs(v) => Some(v),
            Values::Complex(_) => None,
        }
    }

    /// `ν(n)` for `1 ≤ n ≤ limit`. Panics outside that range.
    #[inline]
    pub fn at(&self, n: usize) -> Complex64 {
        match &self.values {
            Values::Signs(v) => Complex64::new(v[n - 1] as f64, 0.0),
            Values::Complex(v) => v[n - 1],
        }
    }

    pub fn get(&self, n: usize) -> Result<Complex64> {
        if n == 0 || n > self.limit() {
            return Err(Error::range("n", n, format!("1..={}", self.limit())));
        }
        Ok(self.at(n))
    }

    /// `ν(1..=n)` widened to complex, `out[0] = ν(1)`.
    pub fn to_complex(&self, n: usize) -> Result<Vec<Complex64>> {
        self.check_upto("N", n)?;
        Ok((1..=n).map(|k| self.at(k)).collect())
    }

    pub(crate) fn check_upto(&self, param: &'static str, n: usize) -> Result<()> {
        if n > self.limit() {
            return Err(Error::range(param, n, format!("<= weight limit {}", self.limit())));
        }
        Ok(())
    }

    pub fn sup_norm(&self) -> f64 {
        match &self.values {
            Values::Signs(v) => v.iter().map(|&s| (s as f64).abs()).fold(0.0, f64::max),
            Values::Complex(v) => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }

    pub fn partial_sum(&self, n: usize) -> Result<Complex64> {
        if n == 0 || n > self.limit() {
            return Err(Error::range("N", n, format!("1..={}", self.limit())));
        }
        Ok(match &self.values {
            Values::Signs(v) => Complex64::new(v[..n].iter().map(|&s| s as i64).sum::<i64>() as f64, 0.0),
            Values::Complex(v) => v[..n].iter().sum(),
        })
    }

    /// All prefix sums `Σ_{k ≤ n} ν(k)` for `n = 1..=limit` of an integer weight.
    pub fn integer_prefix_sums(&self) -> Option<Vec<i64>> {
        let signs = self.signs()?;
        let mut acc = 0i64;
        Some(
            signs
                .iter()
                .map(|&s| {
                    acc += s as i64;
                    acc
                })
                .collect(),
        )
    }

    pub fn extend(&self, n: i64) -> Result<Complex64> {
        let m = n.unsigned_abs();
        if m > self.limit() as u64 {
            return Err(Error::range("n", n, format!("|n| <= {}", self.limit())));
        }
        if m == 0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(self.at(m as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(w: &WeightSequence) -> Vec<f64> {
        (1..=w.limit()).map(|n| w.at(n).re).collect()
    }

    #[test]
    fn small_tables() {
        let lambda = weight_table(WeightKind::Liouville, 10).unwrap();
        assert_eq!(re(&lambda), vec![1., -1., -1., 1., -1., 1., -1., -1., 1., 1.]);
        let one = weight_table(WeightKind::ConstantOne, 5).unwrap();
        assert_eq!(re(&one), vec![1.; 5]);
        let mu = weight_table(WeightKind::Moebius, 4).unwrap();
        assert_eq!(re(&mu), vec![1., -1., -1., 0.]);
        assert_eq!(re(&weight_table(WeightKind::Liouville, 1).unwrap()), vec![1.]);
    }

    #[test]
    fn partial_sums() {
        let lambda = weight_table(WeightKind::Liouville, 10).unwrap();
        assert_eq!(lambda.partial_sum(10).unwrap(), Complex64::new(0.0, 0.0));
        let one = weight_table(WeightKind::ConstantOne, 7).unwrap();
        assert_eq!(one.partial_sum(7).unwrap().re, 7.0);
        let mu = weight_table(WeightKind::Moebius, 10).unwrap();
        assert_eq!(mu.partial_sum(10).unwrap().re, -1.0);
        assert!(matches!(mu.partial_sum(11), Err(Error::Range { param: "N", .. })));
        assert!(matches!(mu.partial_sum(0), Err(Error::Range { .. })));
    }

    #[test]
    fn even_extension() {
        let lambda = weight_table(WeightKind::Liouville, 20).unwrap();
        let mu = weight_table(WeightKind::Moebius, 20).unwrap();
        assert_eq!(lambda.extend(-12).unwrap().re, -1.0);
        assert_eq!(lambda.extend(0).unwrap().re, 0.0);
        assert_eq!(mu.extend(0).unwrap().re, 0.0);
        assert_eq!(mu.extend(-4).unwrap().re, 0.0);
        assert!(lambda.extend(-21).is_err());
    }

    #[test]
    fn custom_validation() {
        let ok = WeightSequence::custom(vec![Complex64::from_polar(1.0, 0.3); 4]).unwrap();
        assert_eq!(ok.kind(), WeightKind::Custom);
        let bad = WeightSequence::custom(vec![Complex64::new(0.5, 0.0), Complex64::new(1.5, 0.0)]);
        match bad {
            Err(Error::Validation { param, reason }) => {
                assert_eq!(param, "weight");
                assert!(reason.contains("nu(2)"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(WeightSequence::custom(vec![Complex64::new(f64::NAN, 0.0)]).is_err());
        assert!(weight_table(WeightKind::Custom, 5).is_err());
        assert!(weight_table(WeightKind::Liouville, 0).is_err());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in [WeightKind::Liouville, WeightKind::Moebius, WeightKind::ConstantOne, WeightKind::Custom] {
            assert_eq!(k.name().parse::<WeightKind>().unwrap(), k);
        }
        assert!("zeta".parse::<WeightKind>().is_err());
    }
}
