//! The weak* derivative at `t = 0` of the Clark measures `μ_t = μ_{φ_t,τ}` of a
//! semigroup: `σ_t = (μ_t - δ_τ)/t → -λδ_τ + μ`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clark::{clark_measure, ClarkMeasure};
use crate::disc::{weakstar_distance, Atom, BoundaryMeasure, CirclePoint, SignedBoundaryMeasure, TestFunctionFamily};
use crate::error::{Error, Result};
use crate::limits::{extrapolate, extrapolate_real, Radial};
use crate::maps::HoloMap;
use crate::semigroup::{brfp_analyze, flow, FlowOptions, Generator};

/// Agreement required between the atom of `μ_t` and `e^{-λt}`.
pub const ATOM_TOL: f64 = 1e-4;
/// Slack allowed when checking that weak* errors decrease.
pub const MONOTONE_SLACK: f64 = 1e-6;
/// Lowest accepted sample of the limit density.
const POSITIVITY_FLOOR: f64 = -1e-9;
/// Samples of the limit density within this many cells of `τ` are interpolated.
const TAU_EXCLUSION_CELLS: f64 = 1.0;

/// Flow tolerances used when differentiating in `t`.
pub fn derivative_flow_options() -> FlowOptions {
    FlowOptions { rtol: 1e-12, atol: 1e-14, ..FlowOptions::default() }
}

/// The times `t = 2^{-k}`, `k = k_min..=k_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeSchedule {
    pub k_min: u32,
    pub k_max: u32,
}

impl Default for TimeSchedule {
    fn default() -> Self {
        Self { k_min: 2, k_max: 9 }
    }
}

impl TimeSchedule {
    pub fn new(k_min: u32, k_max: u32) -> Result<Self> {
        if k_min > k_max || k_max > 60 {
            return Err(Error::Parameter(format!("bad time schedule {k_min}..={k_max}")));
        }
        Ok(Self { k_min, k_max })
    }

    pub fn times(&self) -> Vec<f64> {
        (self.k_min..=self.k_max).map(|k| 0.5f64.powi(k as i32)).collect()
    }
}

/// Extrapolates `lim_{t→0}` of samples taken at `t = 2^{-k}` along the schedule.
fn extrapolate_samples(schedule: &TimeSchedule, values: &[f64]) -> Result<f64> {
    let radial = Radial { k_min: schedule.k_min, k_max: schedule.k_max, tol: 1e-9 };
    let mut it = values.iter();
    let lim = extrapolate_real(&radial, None, |_| Ok(*it.next().expect("one value per time")))?;
    Ok(if lim.value.re.is_finite() { lim.value.re } else { *values.last().unwrap_or(&f64::NAN) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SigmaT {
    pub t: f64,
    /// `(μ_t - δ_τ)/t` with the atom of `μ_t` at `τ` set to `e^{-λt}`.
    pub sigma: SignedBoundaryMeasure,
    /// `(e^{-λt} - 1)/t`.
    pub atom: f64,
    /// Atom of `μ_t` at `τ` as estimated from the measure itself.
    pub reestimated_atom: f64,
    pub clark: ClarkMeasure,
}

/// `λ` at `τ` from the radial behavior of `G`.
fn lambda_at(g: &Generator, radial: &Radial) -> Result<f64> {
    let report = brfp_analyze(g, g.tau(), radial)?;
    if !report.is_brfp {
        return Err(Error::NotBrfp(report.reason.unwrap_or_default()));
    }
    Ok(report.lambda_est)
}

/// `σ_t = (μ_t - δ_τ)/t` on an `n`-point grid.
pub fn sigma_t(g: &Generator, t: f64, n: usize, radial: &Radial) -> Result<SigmaT> {
    sigma_t_with(g, lambda_at(g, radial)?, t, n, radial)
}

fn sigma_t_with(g: &Generator, lambda: f64, t: f64, n: usize, radial: &Radial) -> Result<SigmaT> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Parameter(format!("σ_t needs t > 0, got {t}")));
    }
    let tau = g.tau();
    let map = HoloMap::flow_with(g.clone(), t, derivative_flow_options())?;
    let clark = clark_measure(&map, tau, n, radial)?;
    if clark.is_incomplete() {
        return Err(Error::NumericalInconsistency(format!(
            "Clark measure of φ_t at t = {t} is incomplete (mass residual {})",
            clark.mass_residual
        )));
    }
    let exact = (-lambda * t).exp();
    let reestimated_atom = clark.measure.mass_at(tau);
    if (reestimated_atom - exact).abs() > ATOM_TOL * exact.max(1.0) {
        return Err(Error::NumericalInconsistency(format!(
            "atom of μ_t at τ is {reestimated_atom}, expected e^(-λt) = {exact}"
        )));
    }
    let mut atoms: Vec<Atom> =
        clark.measure.atoms().iter().filter(|a| a.location.distance(tau) > 1e-12).copied().collect();
    atoms.push(Atom::new(tau, exact));
    let mu_t = SignedBoundaryMeasure::new(atoms, clark.measure.density().to_vec())?;
    let sigma =
        SignedBoundaryMeasure::linear_combine(1.0 / t, &mu_t, -1.0 / t, &SignedBoundaryMeasure::dirac(tau, 1.0))?;
    Ok(SigmaT { t, sigma, atom: (exact - 1.0) / t, reestimated_atom, clark })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcMassLimit {
    pub t_values: Vec<f64>,
    /// `‖σ_t^a‖` from the sampled density.
    pub masses: Vec<f64>,
    /// `‖σ_t^a‖` from `Re((τ + φ_t(0))/(τ - φ_t(0)))` and the exact atom.
    pub transform_masses: Vec<f64>,
    pub limit: f64,
    /// `2 Re G(0) + λ`.
    pub predicted: f64,
}

/// Total mass of `μ_t` through the Herglotz transform at the origin.
fn transform_ac_mass(g: &Generator, lambda: f64, t: f64) -> Result<f64> {
    let w = flow(g, t, Complex64::new(0.0, 0.0), &derivative_flow_options())?.value;
    let tau = g.tau().to_complex();
    let total = (1.0 - w.norm_sqr()) / (tau - w).norm_sqr();
    Ok((total - (-lambda * t).exp()) / t)
}

/// `lim_{t→0} ‖σ_t^a‖`, computed from the measures and cross-checked against
/// the transform route.
pub fn sigma_ac_mass_limit(g: &Generator, schedule: &TimeSchedule, n: usize, radial: &Radial) -> Result<AcMassLimit> {
    let lambda = lambda_at(g, radial)?;
    let t_values = schedule.times();
    let pairs: Vec<(f64, f64)> = t_values
        .par_iter()
        .map(|&t| {
            let s = sigma_t_with(g, lambda, t, n, radial)?;
            Ok((s.sigma.ac_mass(), transform_ac_mass(g, lambda, t)?))
        })
        .collect::<Result<_>>()?;
    let (masses, transform_masses): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    for ((&t, m), tm) in t_values.iter().zip(&masses).zip(&transform_masses) {
        if (m - tm).abs() > 1e-3 * (1.0 + tm.abs()) {
            return Err(Error::NumericalInconsistency(format!(
                "‖σ_t^a‖ at t = {t}: measure gives {m}, transform gives {tm}"
            )));
        }
    }
    let limit = extrapolate_samples(schedule, &transform_masses)?;
    let g0 = g.eval(Complex64::new(0.0, 0.0))?;
    Ok(AcMassLimit { t_values, masses, transform_masses, limit, predicted: 2.0 * g0.re + lambda })
}

/// `∫ P(ζ, z) dσ_t(ζ) = (1/t) Re[(τ + φ_t(z))/(τ - φ_t(z)) - (τ + z)/(τ - z)]`.
pub fn poisson_pairing(g: &Generator, t: f64, z: Complex64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("pairing needs t > 0, got {t}")));
    }
    let tau = g.tau().to_complex();
    let w = flow(g, t, z, &derivative_flow_options())?.value;
    let pw = (1.0 - w.norm_sqr()) / (tau - w).norm_sqr();
    let pz = (1.0 - z.norm_sqr()) / (tau - z).norm_sqr();
    Ok((pw - pz) / t)
}

/// `lim_{t→0}` of [`poisson_pairing`]: `2 Re[G(z)τ/(τ - z)²]`.
pub fn pairing_limit(g: &Generator, z: Complex64) -> Result<f64> {
    let tau = g.tau().to_complex();
    Ok(2.0 * (g.eval(z)? * tau / ((tau - z) * (tau - z))).re)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitMeasure {
    /// The measure `μ` in `σ_t → -λδ_τ + μ`.
    pub measure: BoundaryMeasure,
    /// `λ` (including the contribution of an atom of `ν` at `τ`).
    pub lambda: f64,
    pub nonconvergent: Vec<usize>,
}

impl LimitMeasure {
    /// `-λδ_τ + μ`.
    pub fn predicted_limit(&self, tau: CirclePoint) -> Result<SignedBoundaryMeasure> {
        SignedBoundaryMeasure::linear_combine(-self.lambda, &SignedBoundaryMeasure::dirac(tau, 1.0), 1.0, &self.measure)
    }
}

/// The limit measure `μ`: density `lim_{r→1} 2 Re[G(rξ)τ/(τ - rξ)²]` plus twice
/// the atoms of `ν` away from `τ`.
pub fn mu_limit_density(g: &Generator, n: usize, radial: &Radial) -> Result<LimitMeasure> {
    let lambda = lambda_at(g, radial)?;
    let tau = g.tau();
    let t = tau.to_complex();
    let atoms: Vec<Atom> = g
        .nu()
        .atoms()
        .iter()
        .filter(|a| a.location.distance(tau) > 1e-12)
        .map(|a| Atom::new(a.location, 2.0 * a.mass))
        .collect();
    let cell = std::f64::consts::TAU / n.max(1) as f64;
    let samples: Vec<Option<(f64, bool)>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let xi = CirclePoint::grid(k, n);
            if xi.distance(tau) < TAU_EXCLUSION_CELLS * cell - 1e-12
                || atoms.iter().any(|a| a.location.distance(xi) <= 3.0 * cell + 1e-12)
            {
                return Ok(None);
            }
            let x = xi.to_complex();
            let lim = extrapolate(radial, None, |h| {
                let z = (1.0 - h) * x;
                Ok(Complex64::new(2.0 * (g.eval(z)? * t / ((t - z) * (t - z))).re, 0.0))
            })?;
            Ok(Some((lim.value.re, lim.converged())))
        })
        .collect::<Result<_>>()?;

    let mut nonconvergent = Vec::new();
    let mut values = Vec::with_capacity(n);
    for (k, s) in samples.into_iter().enumerate() {
        match s {
            Some((v, ok)) => {
                if !ok {
                    nonconvergent.push(k);
                }
                if v < POSITIVITY_FLOOR {
                    return Err(Error::NumericalInconsistency(format!("limit density is {v} < 0 at grid point {k}")));
                }
                values.push(Some(v.max(0.0)));
            }
            None => values.push(None),
        }
    }
    let density = crate::clark::interpolate_gaps(&values);
    Ok(LimitMeasure { measure: BoundaryMeasure::new(atoms, density)?, lambda, nonconvergent })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub t_values: Vec<f64>,
    pub weakstar_errors: Vec<f64>,
    /// `(e^{-λt} - 1)/t`.
    pub singular_atom_values: Vec<f64>,
    /// Atom of `σ_t` at `τ` re-estimated from `μ_t`.
    pub reestimated_atom_values: Vec<f64>,
    pub ac_masses: Vec<f64>,
    /// Largest gap between `∫P dσ_t` from the measure and from the transform.
    pub transform_deviations: Vec<f64>,
    pub extrapolated_limit_error: f64,
    pub lambda: f64,
    pub monotone: bool,
    pub atom_exact: bool,
    pub converged: bool,
}

/// Weak* distance from `σ_t` to `-λδ_τ + μ` along the schedule.
pub fn derivative_convergence(
    g: &Generator,
    schedule: &TimeSchedule,
    family: &TestFunctionFamily,
    n: usize,
    radial: &Radial,
) -> Result<DerivativeReport> {
    let limit = mu_limit_density(g, n, radial)?;
    let lambda = limit.lambda;
    let tau = g.tau();
    let target = limit.predicted_limit(tau)?;
    let t_values = schedule.times();
    let rows: Vec<(f64, f64, f64, f64, f64)> = t_values
        .par_iter()
        .map(|&t| {
            let s = sigma_t_with(g, lambda, t, n, radial)?;
            let err = weakstar_distance(&s.sigma, &target, family)?;
            let mut dev = 0.0f64;
            for &z in family.probes() {
                dev = dev.max((s.sigma.poisson_integral(z)? - poisson_pairing(g, t, z)?).abs());
            }
            Ok((err, s.atom, (s.reestimated_atom - 1.0) / t, s.sigma.ac_mass(), dev))
        })
        .collect::<Result<_>>()?;

    let weakstar_errors: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let singular_atom_values: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let reestimated_atom_values: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let ac_masses = rows.iter().map(|r| r.3).collect();
    let transform_deviations = rows.iter().map(|r| r.4).collect();

    let monotone = weakstar_errors.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);
    let extrapolated_limit_error = extrapolate_samples(schedule, &weakstar_errors)?.abs();
    let atom_exact = t_values
        .iter()
        .zip(&singular_atom_values)
        .all(|(&t, &a)| (a - ((-lambda * t).exp() - 1.0) / t).abs() <= ATOM_TOL);
    Ok(DerivativeReport {
        t_values,
        weakstar_errors,
        singular_atom_values,
        reestimated_atom_values,
        ac_masses,
        transform_deviations,
        converged: extrapolated_limit_error < 1e-3,
        extrapolated_limit_error,
        lambda,
        monotone,
        atom_exact,
    })
}
