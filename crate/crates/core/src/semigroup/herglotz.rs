use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::disc::SignedBoundaryMeasure;

/// Coefficients below this fraction of the largest one are dropped.
const COEFF_CUTOFF: f64 = 1e-15;

/// Taylor expansion of the Herglotz transform of a sampled density,
///
/// `∫ (ζ+z)/(ζ-z) ρ(ζ) dm(ζ) = ρ̂₀ + 2 Σ_{k≥1} ρ̂_k z^k`,
///
/// truncated below the Nyquist index. This is the holomorphic extension of the
/// trigonometric interpolant of the samples, and it stays bounded up to the
/// circle where the quadrature sum would not.
#[derive(Clone, Debug, PartialEq)]
pub struct HerglotzSeries {
    coeffs: Arc<[Complex64]>,
}

impl HerglotzSeries {
    pub fn from_density(mu: &SignedBoundaryMeasure) -> Self {
        let n = mu.grid_size();
        if n == 0 {
            return Self { coeffs: Arc::from(Vec::new()) };
        }
        let mut buf: Vec<Complex64> = mu.density().iter().map(|&d| Complex64::new(d, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let scale = 1.0 / n as f64;
        let half = n / 2;
        let mut coeffs: Vec<Complex64> = Vec::with_capacity(half + 1);
        coeffs.push(buf[0] * scale);
        for (k, b) in buf.iter().enumerate().take(half).skip(1) {
            coeffs.push(2.0 * b * scale);
            debug_assert!(k < half);
        }
        if n.is_multiple_of(2) && n >= 2 {
            // the Nyquist mode is shared between k and -k
            coeffs.push(buf[half] * scale);
        }
        let peak = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let keep = coeffs.iter().rposition(|c| c.norm() > COEFF_CUTOFF * peak).map_or(0, |i| i + 1);
        coeffs.truncate(keep);
        Self { coeffs: Arc::from(coeffs) }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::BoundaryMeasure;
    use std::f64::consts::TAU;

    #[test]
    fn constant_density_collapses_to_one_coefficient() {
        let s = HerglotzSeries::from_density(&SignedBoundaryMeasure::uniform(1.0, 1024));
        assert_eq!(s.len(), 1);
        assert!((s.eval(Complex64::new(0.99, 0.1)) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn agrees_with_quadrature_inside() {
        let n = 256;
        let density: Vec<f64> = (0..n)
            .map(|k| 1.0 + 0.5 * (TAU * k as f64 / n as f64).cos() + 0.2 * (3.0 * TAU * k as f64 / n as f64).sin())
            .collect();
        let mu = BoundaryMeasure::new(vec![], density).unwrap();
        let s = HerglotzSeries::from_density(&mu);
        for j in 0..20 {
            let z = Complex64::from_polar(0.9 * j as f64 / 19.0, 0.41 * j as f64);
            let quad = mu.herglotz_integral(0.0, z).unwrap();
            assert!((s.eval(z) - quad).norm() < 1e-10, "{z}");
        }
        // 1 + cos θ/2 + sin 3θ/5 extends as 1 + z/2 - i z³/5
        let z = Complex64::new(0.3, -0.4);
        let exact = 1.0 + z / 2.0 - Complex64::i() * z.powi(3) / 5.0;
        assert!((s.eval(z) - exact).norm() < 1e-13);
    }
}
