//! Desk-scale measure-preserving systems and observables on them.
//!
//! Three families are provided: the circle rotation `x ↦ x + α`, the doubling
//! map `x ↦ 2x` (both on 64-bit fixed-point state) and the cyclic shift
//! `j ↦ j + 1` on `Z_J` with uniform measure. All iterates are computed in
//! integer arithmetic, so the group law holds bit for bit.

use std::fmt;

use num_complex::Complex64;

use crate::{Error, Fixed64, Result};

/// Largest `|n|` accepted by [`iterate`].
pub const MAX_ITERATE: u64 = 1 << 62;

#[derive(Clone, Debug, PartialEq)]
pub enum System {
    Rotation { alpha: Fixed64 },
    Doubling,
    CyclicShift { modulus: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub system: System,
    pub description: String,
}

impl SystemSpec {
    pub fn rotation(alpha: Fixed64) -> SystemSpec {
        SystemSpec {
            system: System::Rotation { alpha },
            description: format!("rotation by {alpha} (~{:.17})", alpha.to_f64()),
        }
    }

    pub fn doubling() -> SystemSpec {
        SystemSpec {
            system: System::Doubling,
            description: "doubling map x -> 2x mod 1 (empirical analog, not checked for weak mixing)".into(),
        }
    }

    pub fn cyclic_shift(modulus: u64) -> Result<SystemSpec> {
        if modulus == 0 {
            return Err(Error::validation("J", "cyclic shift modulus must be >= 1"));
        }
        Ok(SystemSpec {
            system: System::CyclicShift { modulus },
            description: format!("shift j -> j+1 on Z_{modulus}"),
        })
    }

    pub fn with_description(mut self, description: impl Into<String>) -> SystemSpec {
        self.description = description.into();
        self
    }

    pub fn kind_name(&self) -> &'static str {
        match self.system {
            System::Rotation { .. } => "rotation",
            System::Doubling => "doubling",
            System::CyclicShift { .. } => "cyclic_shift",
        }
    }

    pub fn is_invertible(&self) -> bool {
        !matches!(self.system, System::Doubling)
    }

    fn check_point(&self, x: Point) -> Result<()> {
        match (&self.system, x) {
            (System::Rotation { .. } | System::Doubling, Point::Torus(_)) => Ok(()),
            (System::CyclicShift { modulus }, Point::Residue(r)) if r < *modulus => Ok(()),
            (System::CyclicShift { modulus }, Point::Residue(r)) => Err(Error::range("x", r, format!("0..{modulus}"))),
            _ => Err(Error::validation(
                "x",
                format!("point {x} is not in the state space of {}", self.kind_name()),
            )),
        }
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description)
    }
}

/// A state: a fixed-point circle point, or a residue of `Z_J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Point {
    Torus(Fixed64),
    Residue(u64),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Torus(x) => write!(f, "{x}"),
            Point::Residue(r) => write!(f, "{r}"),
        }
    }
}

/// `T^n x`, exactly.
pub fn iterate(sys: &SystemSpec, x: Point, n: i64) -> Result<Point> {
    sys.check_point(x)?;
    if n.unsigned_abs() > MAX_ITERATE {
        return Err(Error::range("n", n, "|n| <= 2^62"));
    }
    Ok(match (&sys.system, x) {
        (System::Rotation { alpha }, Point::Torus(x)) => Point::Torus(x + *alpha * n),
        (System::Doubling, Point::Torus(x)) => {
            if n < 0 {
                return Err(Error::NonInvertible {
                    system: "doubling",
                    steps: n,
                });
            }
            Point::Torus(if n >= 64 { Fixed64::ZERO } else { Fixed64(x.0 << n) })
        }
        (System::CyclicShift { modulus }, Point::Residue(r)) => {
            Point::Residue((r as i128 + n as i128).rem_euclid(*modulus as i128) as u64)
        }
        _ => unreachable!("checked above"),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    /// `x ↦ e(kx)` on the circle.
    Character { k: i64 },
    /// Indicator of the arc `[left, right)`, wrapping through 0 when `left > right`.
    IntervalIndicator { left: Fixed64, right: Fixed64 },
    /// Arbitrary values on `Z_J`.
    Table { values: Vec<Complex64> },
}

impl Observable {
    pub fn constant_one() -> Observable {
        Observable::Character { k: 0 }
    }

    pub fn table(values: Vec<Complex64>) -> Result<Observable> {
        if values.is_empty() {
            return Err(Error::validation("observable", "table observable needs at least one value"));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::validation("observable", "table observable must be finite"));
        }
        Ok(Observable::Table { values })
    }

    /// Recorded `sup |f|`.
    pub fn sup(&self) -> f64 {
        match self {
            Observable::Character { .. } => 1.0,
            Observable::IntervalIndicator { left, right } => {
                if left == right {
                    0.0
                } else {
                    1.0
                }
            }
            Observable::Table { values } => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }

    pub fn check_domain(&self, sys: &SystemSpec) -> Result<()> {
        match (self, &sys.system) {
            (Observable::Character { .. } | Observable::IntervalIndicator { .. }, System::Rotation { .. } | System::Doubling) => Ok(()),
            (Observable::Table { values }, System::CyclicShift { modulus }) if values.len() as u64 == *modulus => Ok(()),
            (Observable::Table { values }, System::CyclicShift { modulus }) => Err(Error::validation(
                "observable",
                format!("table has {} values but the shift is on Z_{modulus}", values.len()),
            )),
            _ => Err(Error::validation(
                "observable",
                format!("{} is not defined on {}", self.describe(), sys.kind_name()),
            )),
        }
    }

    /// Value at a point of the matching state space.
    pub fn eval(&self, x: Point) -> Complex64 {
        match (self, x) {
            (Observable::Character { k }, Point::Torus(x)) => x.wrapping_mul_int(*k).exp_i2pi(),
            (Observable::IntervalIndicator { left, right }, Point::Torus(x)) => {
                let inside = if left <= right {
                    *left <= x && x < *right
                } else {
                    x >= *left || x < *right
                };
                Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
            }
            (Observable::Table { values }, Point::Residue(r)) => values[r as usize],
            _ => panic!("observable {} evaluated at incompatible point {x}", self.describe()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Observable::Character { k } => format!("character(k={k})"),
            Observable::IntervalIndicator { left, right } => {
                format!("indicator[{:.6},{:.6})", left.to_f64(), right.to_f64())
            }
            Observable::Table { values } => format!("table(J={})", values.len()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitMeta {
    pub system: String,
    pub observable: String,
    pub start: Point,
    pub power: i64,
    pub sup: f64,
}

/// `values[n-1] = f(T^{an} x)` for `1 ≤ n ≤ N`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitSequence {
    pub values: Vec<Complex64>,
    pub meta: OrbitMeta,
}

impl OrbitSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The stream `n ↦ f(T^{an} x)`, `n = 1..=N`, in one pass.
pub fn orbit_observable(sys: &SystemSpec, obs: &Observable, x: Point, a: i64, n: usize) -> Result<OrbitSequence> {
    obs.check_domain(sys)?;
    sys.check_point(x)?;
    if n == 0 {
        return Err(Error::validation("N", "orbit length must be >= 1"));
    }
    let reach = (a as i128) * (n as i128);
    if reach.unsigned_abs() > MAX_ITERATE as u128 {
        return Err(Error::range("a*N", reach, "|a*N| <= 2^62"));
    }
    let mut values = Vec::with_capacity(n);
    match (&sys.system, x) {
        (System::Rotation { alpha }, Point::Torus(x)) => {
            let step = *alpha * a;
            let mut cur = x;
            for _ in 0..n {
                cur = cur + step;
                values.push(obs.eval(Point::Torus(cur)));
            }
        }
        (System::Doubling, Point::Torus(_)) => {
            if a < 0 {
                return Err(Error::NonInvertible {
                    system: "doubling",
                    steps: a,
                });
            }
            for k in 1..=n as i64 {
                values.push(obs.eval(iterate(sys, x, a * k)?));
            }
        }
        (System::CyclicShift { modulus }, Point::Residue(r)) => {
            let step = (a as i128).rem_euclid(*modulus as i128) as u64;
            let mut cur = r;
            for _ in 0..n {
                cur = ((cur as u128 + step as u128) % *modulus as u128) as u64;
                values.push(obs.eval(Point::Residue(cur)));
            }
        }
        _ => unreachable!("checked above"),
    }
    Ok(OrbitSequence {
        values,
        meta: OrbitMeta {
            system: sys.description.clone(),
            observable: obs.describe(),
            start: x,
            power: a,
            sup: obs.sup(),
        },
    })
}
