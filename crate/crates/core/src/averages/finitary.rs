use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::arith::WeightSequence;
use crate::rng::Ensemble;
use crate::{Error, Result};

/// A function on `Z_J`, `values[j] = f(j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FinitaryField {
    values: Vec<Complex64>,
}

impl FinitaryField {
    pub fn new(values: Vec<Complex64>) -> Result<FinitaryField> {
        if values.is_empty() {
            return Err(Error::validation("J", "field modulus must be >= 1"));
        }
        Ok(FinitaryField { values })
    }

    pub fn from_real(values: &[f64]) -> Result<FinitaryField> {
        FinitaryField::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn constant(modulus: usize, c: Complex64) -> FinitaryField {
        assert!(modulus > 0, "modulus must be positive");
        FinitaryField {
            values: vec![c; modulus],
        }
    }

    pub fn zeros(modulus: usize) -> FinitaryField {
        FinitaryField::constant(modulus, Complex64::new(0.0, 0.0))
    }

    /// Indicator of `{at}`.
    pub fn delta(modulus: usize, at: usize) -> FinitaryField {
        let mut f = FinitaryField::zeros(modulus);
        f.values[at % modulus] = Complex64::new(1.0, 0.0);
        f
    }

    /// Uniform ±1 field drawn from the seeded ensemble.
    pub fn random_signs(modulus: usize, rng: &mut Ensemble) -> FinitaryField {
        FinitaryField {
            values: rng.signs(modulus),
        }
    }

    pub fn modulus(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `f(j mod J)` for any integer `j`.
    pub fn at(&self, j: i64) -> Complex64 {
        self.values[j.rem_euclid(self.modulus() as i64) as usize]
    }

    /// `‖f‖_p = ((1/J) Σ_j |f(j)|^p)^{1/p}`.
    pub fn norm_lp(&self, p: f64) -> f64 {
        let j = self.modulus() as f64;
        if p == 1.0 {
            return self.values.iter().map(|v| v.norm()).sum::<f64>() / j;
        }
        if p == 2.0 {
            return (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / j).sqrt();
        }
        (self.values.iter().map(|v| v.norm().powf(p)).sum::<f64>() / j).powf(1.0 / p)
    }

    pub fn norm_l1(&self) -> f64 {
        self.norm_lp(1.0)
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm_lp(2.0)
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `(1/J) Σ_j f(j)`.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.modulus() as f64
    }

    /// Translate: `(τ_s f)(j) = f(j − s)`.
    pub fn shifted(&self, s: i64) -> FinitaryField {
        let values = (0..self.modulus() as i64).map(|j| self.at(j - s)).collect();
        FinitaryField { values }
    }

    pub fn scaled(&self, c: Complex64) -> FinitaryField {
        FinitaryField {
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

pub(crate) fn check_bilinear(f: &FinitaryField, g: &FinitaryField, w: &WeightSequence, n: usize) -> Result<usize> {
    let modulus = f.modulus();
    if g.modulus() != modulus {
        return Err(Error::validation(
            "g",
            format!("fields live on different groups: Z_{modulus} and Z_{}", g.modulus()),
        ));
    }
    if n == 0 {
        return Err(Error::validation("N", "window length must be >= 1"));
    }
    if n >= modulus {
        return Err(Error::Window { window: n, modulus });
    }
    w.check_upto("N", n)?;
    Ok(modulus)
}

/// `B(j) = (1/N) Σ_{n=1}^{N} ν(n) f(j+n) g(j−n)` for every `j ∈ Z_J`, in `O(J·N)`.
pub fn finitary_direct(f: &FinitaryField, g: &FinitaryField, w: &WeightSequence, n: usize) -> Result<FinitaryField> {
    let modulus = check_bilinear(f, g, w, n)?;
    let nu = w.to_complex(n)?;
    let (fv, gv) = (f.values(), g.values());
    let values = (0..modulus)
        .into_par_iter()
        .map(|j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, weight) in nu.iter().enumerate() {
                let step = k + 1;
                let plus = (j + step) % modulus;
                let minus = (j + modulus - step) % modulus;
                acc += weight * fv[plus] * gv[minus];
            }
            acc / n as f64
        })
        .collect();
    Ok(FinitaryField { values })
}

fn plan(modulus: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    let mut planner = FftPlanner::new();
    (planner.plan_fft_forward(modulus), planner.plan_fft_inverse(modulus))
}

/// Forward DFT `F(f)(χ_m) = Σ_n f(n) χ_m(−n)` with `χ_m(n) = e(mn/J)`, unnormalized.
pub fn dft(f: &FinitaryField) -> Vec<Complex64> {
    let mut buf = f.values.clone();
    plan(f.modulus()).0.process(&mut buf);
    buf
}

/// Inverse of [`dft`]; carries the `1/J`.
pub fn idft(spectrum: &[Complex64]) -> Result<FinitaryField> {
    let modulus = spectrum.len();
    let mut buf = spectrum.to_vec();
    if modulus > 0 {
        plan(modulus).1.process(&mut buf);
    }
    FinitaryField::new(buf.into_iter().map(|v| v / modulus as f64).collect())
}

/// Characters handled per parallel task. Fixed, so partial sums are merged in
/// the same order regardless of thread count.
const CHARACTERS_PER_TASK: usize = 32;

/// The same `B(j)` as [`finitary_direct`], computed on the Fourier side.
///
/// With `h(n) = ν(n)/N` on `1..=N` and 0 elsewhere, for each character `χ_m`
/// the circular convolution `Ĝ_j(χ_m) = (h * (g·χ̄_m))(j)` is formed with DFTs,
/// and `B(j) = (1/J) Σ_m F(f)(χ_m) Ĝ_j(χ_m) χ_m(2j)`. Cost `O(J² log J)`.
pub fn finitary_fourier(f: &FinitaryField, g: &FinitaryField, w: &WeightSequence, n: usize) -> Result<FinitaryField> {
    let modulus = check_bilinear(f, g, w, n)?;
    let (forward, inverse) = plan(modulus);

    // e(t/J) for t in Z_J
    let twiddle: Vec<Complex64> = (0..modulus)
        .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * t as f64 / modulus as f64))
        .collect();

    let f_hat = dft(f);
    let mut h_hat = vec![Complex64::new(0.0, 0.0); modulus];
    for k in 1..=n {
        h_hat[k] = w.at(k) / n as f64;
    }
    forward.process(&mut h_hat);

    let chunks: Vec<Vec<Complex64>> = (0..modulus)
        .collect::<Vec<_>>()
        .par_chunks(CHARACTERS_PER_TASK)
        .map(|ms| {
            let mut partial = vec![Complex64::new(0.0, 0.0); modulus];
            let mut buf = vec![Complex64::new(0.0, 0.0); modulus];
            let mut scratch = vec![Complex64::new(0.0, 0.0); forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len())];
            for &m in ms {
                // g · conj(χ_m)
                for (t, slot) in buf.iter_mut().enumerate() {
                    *slot = g.values[t] * twiddle[(modulus - (m * t) % modulus) % modulus];
                }
                forward.process_with_scratch(&mut buf, &mut scratch);
                for (slot, h) in buf.iter_mut().zip(&h_hat) {
                    *slot *= h;
                }
                inverse.process_with_scratch(&mut buf, &mut scratch);
                // buf[j] = J · Ĝ_j(χ_m)
                for (j, acc) in partial.iter_mut().enumerate() {
                    let chi_2j = twiddle[(2 * j * m) % modulus];
                    *acc += f_hat[m] * buf[j] * chi_2j;
                }
            }
            partial
        })
        .collect();

    let scale = 1.0 / (modulus as f64 * modulus as f64);
    let mut values = vec![Complex64::new(0.0, 0.0); modulus];
    for partial in &chunks {
        for (v, p) in values.iter_mut().zip(partial) {
            *v += p;
        }
    }
    for v in &mut values {
        *v *= scale;
    }
    Ok(FinitaryField { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{weight_table, WeightKind};

    fn max_diff(a: &FinitaryField, b: &FinitaryField) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn constant_fields_give_the_mean_weight() {
        let lambda = weight_table(WeightKind::Liouville, 100).unwrap();
        let one = FinitaryField::constant(32, Complex64::new(1.0, 0.0));
        let mean = lambda.partial_sum(7).unwrap() / 7.0;
        for b in [finitary_direct(&one, &one, &lambda, 7).unwrap(), finitary_fourier(&one, &one, &lambda, 7).unwrap()] {
            assert!(b.values().iter().all(|v| (v - mean).norm() < 1e-13));
        }
    }

    #[test]
    fn zero_weight_kills_everything() {
        let mut rng = Ensemble::new(3, 0);
        let f = FinitaryField::random_signs(16, &mut rng);
        let g = FinitaryField::random_signs(16, &mut rng);
        let zero = WeightSequence::zero(16);
        assert_eq!(finitary_direct(&f, &g, &zero, 5).unwrap(), FinitaryField::zeros(16));
        assert!(finitary_fourier(&f, &g, &zero, 5).unwrap().sup() < 1e-15);
    }

    #[test]
    fn deltas_never_meet() {
        // δ0(j+n) δ0(j−n) needs 2n ≡ 0 mod 8, impossible for n ∈ {1,2,3}
        let lambda = weight_table(WeightKind::Liouville, 10).unwrap();
        let d = FinitaryField::delta(8, 0);
        let b = finitary_direct(&d, &d, &lambda, 3).unwrap();
        assert_eq!(b, FinitaryField::zeros(8));
        assert!(finitary_fourier(&d, &d, &lambda, 3).unwrap().sup() < 1e-15);
    }

    #[test]
    fn fourier_matches_direct_on_random_fields() {
        let lambda = weight_table(WeightKind::Liouville, 2048).unwrap();
        for (modulus, n) in [(16usize, 4usize), (17, 9), (60, 59), (128, 33)] {
            for trial in 0..5 {
                let mut rng = Ensemble::new(11, trial);
                let f = FinitaryField::random_signs(modulus, &mut rng);
                let g = FinitaryField::random_signs(modulus, &mut rng);
                let d = finitary_direct(&f, &g, &lambda, n).unwrap();
                let q = finitary_fourier(&f, &g, &lambda, n).unwrap();
                assert!(max_diff(&d, &q) < 1e-9 * (1.0 + f.sup() * g.sup()), "J={modulus} N={n}");
            }
        }
    }

    #[test]
    fn window_and_shape_errors() {
        let lambda = weight_table(WeightKind::Liouville, 100).unwrap();
        let f = FinitaryField::zeros(8);
        assert!(matches!(finitary_direct(&f, &f, &lambda, 8), Err(Error::Window { window: 8, modulus: 8 })));
        assert!(matches!(finitary_fourier(&f, &f, &lambda, 9), Err(Error::Window { .. })));
        assert!(finitary_direct(&f, &f, &lambda, 0).is_err());
        assert!(finitary_direct(&f, &FinitaryField::zeros(9), &lambda, 3).is_err());
        let short = weight_table(WeightKind::Liouville, 2).unwrap();
        assert!(finitary_direct(&f, &f, &short, 3).is_err());
    }

    #[test]
    fn parseval() {
        let mut rng = Ensemble::new(5, 1);
        for modulus in [1usize, 7, 64, 1000] {
            let values: Vec<Complex64> = (0..modulus).map(|_| Complex64::new(rng.uniform() - 0.5, rng.uniform() - 0.5)).collect();
            let f = FinitaryField::new(values).unwrap();
            let lhs: f64 = dft(&f).iter().map(|v| v.norm_sqr()).sum::<f64>() / modulus as f64;
            let rhs: f64 = f.values().iter().map(|v| v.norm_sqr()).sum();
            assert!((lhs - rhs).abs() <= 1e-10 * rhs);
            let back = idft(&dft(&f)).unwrap();
            assert!(max_diff(&back, &f) < 1e-12);
        }
    }

    #[test]
    fn dft_convention() {
        // F(δ_1)(χ_m) = χ_m(−1) = e(−m/J)
        let d = FinitaryField::delta(8, 1);
        let spec = dft(&d);
        for (m, v) in spec.iter().enumerate() {
            let expected = Complex64::from_polar(1.0, -std::f64::consts::TAU * m as f64 / 8.0);
            assert!((v - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn shift_covariance_is_exact() {
        let lambda = weight_table(WeightKind::Liouville, 100).unwrap();
        let mut rng = Ensemble::new(9, 2);
        let f = FinitaryField::random_signs(50, &mut rng);
        let g = FinitaryField::random_signs(50, &mut rng);
        let b = finitary_direct(&f, &g, &lambda, 20).unwrap();
        for s in [1i64, 7, -13, 49] {
            let bs = finitary_direct(&f.shifted(s), &g.shifted(s), &lambda, 20).unwrap();
            assert_eq!(bs, b.shifted(s));
        }
    }

    #[test]
    fn norms_are_averaged() {
        let f = FinitaryField::from_real(&[3.0, -4.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.norm_l1(), 7.0 / 4.0);
        assert_eq!(f.norm_l2(), (25.0f64 / 4.0).sqrt());
        assert!((f.norm_lp(3.0) - (91.0f64 / 4.0).powf(1.0 / 3.0)).abs() < 1e-14);
        assert_eq!(f.sup(), 4.0);
        assert_eq!(f.mean(), Complex64::new(-0.25, 0.0));
    }
}
