//! Points of the circle `T = R/Z` as 64-bit fixed-point fractions.
//!
//! A value `x` stands for `x / 2^64`. Addition and integer multiples wrap
//! modulo `2^64`, which is exactly reduction modulo 1, so `T^m T^n = T^{m+n}`
//! holds bit for bit no matter how long an orbit runs.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fixed64(pub u64);

impl Fixed64 {
    pub const ZERO: Fixed64 = Fixed64(0);
    pub const HALF: Fixed64 = Fixed64(1 << 63);
    pub const QUARTER: Fixed64 = Fixed64(1 << 62);

    /// Nearest 64-bit approximant of the golden ratio conjugate `(√5 − 1)/2`.
    pub const GOLDEN: Fixed64 = Fixed64(0x9e37_79b9_7f4a_7c16);

    /// Nearest 64-bit approximant of `√2 − 1`.
    pub const SQRT2_MINUS_1: Fixed64 = Fixed64(0x6a09_e667_f3bc_c909);

    /// Nearest fixed-point value to the fractional part of `t`.
    pub fn from_f64(t: f64) -> Fixed64 {
        let frac = t - t.floor();
        // frac * 2^64 is exact; rounding may land on 2^64, which wraps to 0.
        let scaled = (frac * TWO_POW_64).round();
        Fixed64((scaled as u128 & u64::MAX as u128) as u64)
    }

    /// Nearest fixed-point value to `p/q` (mod 1).
    pub fn from_ratio(p: i64, q: u64) -> Fixed64 {
        assert!(q > 0, "denominator must be positive");
        let p = (p as i128).rem_euclid(q as i128) as u128;
        let q = q as u128;
        let num = (p << 64) + q / 2;
        Fixed64((num / q) as u64)
    }

    /// Representative in `[0, 1)`.
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / TWO_POW_64
    }

    /// Signed representative in `[-1/2, 1/2)`; keeps full precision near 0.
    pub fn to_signed_f64(self) -> f64 {
        self.0 as i64 as f64 / TWO_POW_64
    }

    /// `e(x) = exp(2πi x)`.
    pub fn exp_i2pi(self) -> Complex64 {
        let angle = std::f64::consts::TAU * self.to_signed_f64();
        Complex64::from_polar(1.0, angle)
    }

    pub fn wrapping_mul_int(self, k: i64) -> Fixed64 {
        Fixed64(self.0.wrapping_mul(k as u64))
    }
}

impl Add for Fixed64 {
    type Output = Fixed64;
    fn add(self, rhs: Fixed64) -> Fixed64 {
        Fixed64(self.0.wrapping_add(rhs.0))
    }
}

impl Sub for Fixed64 {
    type Output = Fixed64;
    fn sub(self, rhs: Fixed64) -> Fixed64 {
        Fixed64(self.0.wrapping_sub(rhs.0))
    }
}

impl Neg for Fixed64 {
    type Output = Fixed64;
    fn neg(self) -> Fixed64 {
        Fixed64(self.0.wrapping_neg())
    }
}

impl Mul<i64> for Fixed64 {
    type Output = Fixed64;
    fn mul(self, k: i64) -> Fixed64 {
        self.wrapping_mul_int(k)
    }
}

impl fmt::Display for Fixed64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#018x}/2^64", self.0)
    }
}
