//! Dormand–Prince 5(4) integration of `∂φ_t/∂t = G(φ_t)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::VectorField;
use crate::disc::check_interior;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Allowed excursion of `|φ_t(z)|` above 1 before reporting an escape.
    pub escape_slack: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, max_steps: 1_000_000, escape_slack: 1e-9 }
    }
}

impl FlowOptions {
    pub fn with_rtol(self, rtol: f64) -> Self {
        Self { rtol, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowResult {
    pub value: Complex64,
    pub steps: usize,
    pub max_modulus_seen: f64,
}

// Dormand–Prince tableau
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b̂, the embedded error weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Flows a single point for time `t`.
pub fn flow<G: VectorField + ?Sized>(g: &G, t: f64, z: Complex64, opts: &FlowOptions) -> Result<FlowResult> {
    let (values, steps, max_modulus_seen) = flow_many(g, t, &[z], opts)?;
    Ok(FlowResult { value: values[0], steps, max_modulus_seen })
}

/// Flows several points jointly with one shared step sequence.
///
/// Sharing the steps makes the discretization error a smooth function of the
/// initial point, so differences between trajectories (finite differences
/// of the flow map) are not polluted by step-selection jitter.
pub fn flow_many<G: VectorField + ?Sized>(
    g: &G,
    t: f64,
    z0: &[Complex64],
    opts: &FlowOptions,
) -> Result<(Vec<Complex64>, usize, f64)> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Parameter(format!("flow time {t} must be finite and nonnegative")));
    }
    for &z in z0 {
        check_interior(z)?;
    }
    let mut max_mod = z0.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if t == 0.0 {
        return Ok((z0.to_vec(), 0, max_mod));
    }

    let n = z0.len();
    let f = |y: &[Complex64], out: &mut [Complex64]| {
        for (o, &yi) in out.iter_mut().zip(y) {
            *o = g.value(yi);
        }
    };

    let mut y = z0.to_vec();
    let mut k1 = vec![Complex64::default(); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut k5 = k1.clone();
    let mut k6 = k1.clone();
    let mut k7 = k1.clone();
    let mut tmp = k1.clone();
    let mut y_new = k1.clone();

    f(&y, &mut k1);
    let mut h = initial_step(&y, &k1, t, opts);
    let mut time = 0.0;
    let mut steps = 0usize;

    while time < t {
        if steps >= opts.max_steps {
            return Err(Error::Integrator(format!("step budget {} exhausted at t = {time}", opts.max_steps)));
        }
        let last = time + h >= t;
        if last {
            h = t - time;
        }

        stage(&y, h, &[(A21, &k1)], &mut tmp);
        f(&tmp, &mut k2);
        stage(&y, h, &[(A31, &k1), (A32, &k2)], &mut tmp);
        f(&tmp, &mut k3);
        stage(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)], &mut tmp);
        f(&tmp, &mut k4);
        stage(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], &mut tmp);
        f(&tmp, &mut k5);
        stage(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], &mut tmp);
        f(&tmp, &mut k6);
        stage(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], &mut y_new);
        f(&y_new, &mut k7);

        let mut acc = 0.0;
        for i in 0..n {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            acc += (e.re / sc).powi(2) + (e.im / sc).powi(2);
        }
        let err = (acc / (2 * n) as f64).sqrt();
        if !err.is_finite() {
            h *= 0.1;
            if h < f64::EPSILON * t {
                return Err(Error::Integrator(format!("non-finite error estimate at t = {time}")));
            }
            continue;
        }

        if err <= 1.0 {
            time = if last { t } else { time + h };
            steps += 1;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            let m = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
            max_mod = max_mod.max(m);
            if m > 1.0 + opts.escape_slack {
                return Err(Error::IntegratorEscape { t: time, modulus: m });
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            if h < 1e-14 * t.max(1.0) {
                return Err(Error::Integrator(format!("step size underflow at t = {time}")));
            }
        }
    }
    Ok((y, steps, max_mod))
}

fn stage(y: &[Complex64], h: f64, terms: &[(f64, &Vec<Complex64>)], out: &mut [Complex64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = Complex64::default();
        for (a, k) in terms {
            s += *a * k[i];
        }
        *o = y[i] + h * s;
    }
}

fn initial_step(y: &[Complex64], dy: &[Complex64], t: f64, opts: &FlowOptions) -> f64 {
    let speed = dy.iter().map(|d| d.norm()).fold(0.0, f64::max);
    let scale = opts.atol + opts.rtol * y.iter().map(|z| z.norm()).fold(0.0, f64::max);
    // fifth-order local error ~ (h·speed)^5; aim for a modest first step
    let h = if speed > 0.0 { 0.1 * (scale / speed.powi(5)).powf(0.2).max(1e-3 / speed) } else { t };
    h.min(t).max(1e-12 * t)
}
