//! Boundary limits by geometric sampling plus Richardson extrapolation.
//!
//! A quantity `q(h)` is sampled at `h_k = 2^{-k}`, `k = k_min..=k_max`, and the
//! samples are fed through a Richardson tableau assuming an expansion in
//! integer powers of `h`. Sampling stops as soon as two consecutive rows
//! agree to the requested tolerance.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Deepest elimination order used by the tableau.
const MAX_ORDER: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Radial {
    pub k_min: u32,
    pub k_max: u32,
    /// Cauchy tolerance, relative to `1 + |value|`.
    pub tol: f64,
}

impl Default for Radial {
    fn default() -> Self {
        Self { k_min: 4, k_max: 40, tol: 1e-9 }
    }
}

impl Radial {
    pub fn with_tol(self, tol: f64) -> Self {
        Self { tol, ..self }
    }

    pub fn with_k_max(self, k_max: u32) -> Self {
        Self { k_max, ..self }
    }

    pub fn steps(&self) -> impl Iterator<Item = f64> {
        (self.k_min..=self.k_max).map(|k| 0.5f64.powi(k as i32))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitStatus {
    Converged,
    /// Samples stayed bounded but never settled to the tolerance.
    Stalled,
    /// A sample exceeded the cap or was not finite.
    Diverged,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Limit {
    pub value: Complex64,
    pub error: f64,
    pub status: LimitStatus,
    /// Number of samples evaluated.
    pub samples: usize,
    /// Last raw (unextrapolated) sample.
    pub last_raw: Complex64,
}

impl Limit {
    pub fn converged(&self) -> bool {
        self.status == LimitStatus::Converged
    }
}

/// Extrapolates `lim_{h→0} q(h)` along the schedule.
///
/// `cap` bounds the modulus of raw samples; exceeding it reports divergence.
pub fn extrapolate<F>(radial: &Radial, cap: Option<f64>, mut q: F) -> Result<Limit>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let mut prev_row: Vec<Complex64> = Vec::new();
    let mut best = Limit {
        value: Complex64::new(f64::NAN, f64::NAN),
        error: f64::INFINITY,
        status: LimitStatus::Stalled,
        samples: 0,
        last_raw: Complex64::new(f64::NAN, f64::NAN),
    };
    let mut prev_ok: Option<Complex64> = None;

    for (i, h) in radial.steps().enumerate() {
        let s = q(h)?;
        best.samples = i + 1;
        best.last_raw = s;
        if !s.is_finite() || cap.is_some_and(|c| s.norm() > c) {
            best.status = LimitStatus::Diverged;
            return Ok(best);
        }

        let depth = (prev_row.len() + 1).min(MAX_ORDER + 1);
        let mut row = Vec::with_capacity(depth);
        row.push(s);
        for j in 1..depth {
            let factor = f64::from(1u32 << j) - 1.0;
            let t = row[j - 1] + (row[j - 1] - prev_row[j - 1]) / factor;
            row.push(t);
        }

        // error of column j: change against the same column one row up
        let mut row_best: Option<(Complex64, f64)> = None;
        for j in 0..prev_row.len().min(row.len()) {
            let err = (row[j] - prev_row[j]).norm();
            if row_best.is_none_or(|(_, e)| err < e) {
                row_best = Some((row[j], err));
            }
        }
        prev_row = row;

        let Some((value, err)) = row_best else { continue };
        if err < best.error || !best.value.is_finite() {
            best.value = value;
            best.error = err;
        }
        let tol = radial.tol * (1.0 + value.norm());
        if err <= tol {
            if let Some(p) = prev_ok {
                if (p - value).norm() <= tol {
                    best.value = value;
                    best.error = err.max((p - value).norm());
                    best.status = LimitStatus::Converged;
                    return Ok(best);
                }
            }
            prev_ok = Some(value);
        } else {
            prev_ok = None;
        }
    }
    Ok(best)
}

/// Real-valued convenience wrapper around [`extrapolate`].
pub fn extrapolate_real<F>(radial: &Radial, cap: Option<f64>, mut q: F) -> Result<Limit>
where
    F: FnMut(f64) -> Result<f64>,
{
    extrapolate(radial, cap, |h| q(h).map(|x| Complex64::new(x, 0.0)))
}

/// One step of first-order Richardson extrapolation for samples taken at
/// `h` and `h/2`: `2 q(h/2) - q(h)`.
pub fn richardson_pair(coarse: f64, fine: f64) -> f64 {
    2.0 * fine - coarse
}
