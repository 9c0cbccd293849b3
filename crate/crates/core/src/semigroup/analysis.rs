use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{flow, FlowOptions, Generator, VectorField};
use crate::disc::CirclePoint;
use crate::error::{Error, Result};
use crate::limits::{extrapolate, Radial};
use crate::maps::{boundary_dilatation, HoloMap};

/// `|Re p|` may dip this far below zero before a decomposition is rejected.
const RE_P_REJECT: f64 = -1e-6;
/// Tolerance for "`G(τ) = 0`" and for the imaginary part of the derivative limit.
const BRFP_TOL: f64 = 1e-7;

/// Interior sample points on concentric circles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub radii: Vec<f64>,
    pub angles: usize,
}

impl Default for SampleGrid {
    fn default() -> Self {
        Self { radii: vec![0.1, 0.3, 0.5, 0.7, 0.9], angles: 16 }
    }
}

impl SampleGrid {
    /// A finer grid reaching closer to the circle.
    pub fn dense() -> Self {
        Self { radii: vec![0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.9, 0.95, 0.99], angles: 48 }
    }

    pub fn points(&self) -> Vec<Complex64> {
        self.radii
            .iter()
            .flat_map(|&r| {
                (0..self.angles).map(move |j| {
                    // half-step offset keeps the grid off the boundary point τ = 1's ray
                    let theta = std::f64::consts::TAU * (j as f64 + 0.5) / self.angles as f64;
                    Complex64::from_polar(r, theta)
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrfpReport {
    /// Radial limit of `G(rτ)`; zero at a boundary regular fixed point.
    pub g_limit: Complex64,
    /// Radial limit of `G(rτ)/(rτ - τ)`.
    pub lambda_est: f64,
    pub is_brfp: bool,
    pub reason: Option<String>,
}

/// Radial analysis of `G` at `τ`: `G(rτ) → 0` and `G(rτ)/(rτ - τ) → λ ∈ ℝ`.
pub fn brfp_analyze<G: VectorField + ?Sized>(g: &G, tau: CirclePoint, radial: &Radial) -> Result<BrfpReport> {
    let t = tau.to_complex();
    let value = extrapolate(radial, None, |h| Ok(g.value((1.0 - h) * t)))?;
    let quotient = extrapolate(radial, None, |h| Ok(g.value((1.0 - h) * t) / (-h * t)))?;

    let mut reason = None;
    if !value.converged() || value.value.norm() > BRFP_TOL {
        reason = Some(format!("G(rτ) does not tend to 0 (limit ≈ {})", value.value));
    } else if !quotient.converged() {
        reason = Some("G(rτ)/(rτ - τ) does not converge".to_string());
    } else if quotient.value.im.abs() > BRFP_TOL * (1.0 + quotient.value.norm()) {
        reason = Some(format!("G(rτ)/(rτ - τ) tends to a non-real value {}", quotient.value));
    }
    Ok(BrfpReport { g_limit: value.value, lambda_est: quotient.value.re, is_brfp: reason.is_none(), reason })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilatationCheck {
    pub measured: f64,
    pub lambda_est: f64,
    /// `e^{λ_est t}`
    pub predicted: f64,
}

/// Boundary dilatation of `φ_t` at `τ`, next to the prediction `e^{λ_est t}`.
pub fn dilatation_check(
    g: &Generator,
    tau: CirclePoint,
    t: f64,
    radial: &Radial,
    opts: &FlowOptions,
) -> Result<DilatationCheck> {
    let brfp = brfp_analyze(g, tau, radial)?;
    let map = HoloMap::flow_with(g.clone(), t, *opts)?;
    let measured = boundary_dilatation(&map, tau, radial)?;
    Ok(DilatationCheck { measured, lambda_est: brfp.lambda_est, predicted: (brfp.lambda_est * t).exp() })
}

/// `max_z |φ_{s+t}(z) - φ_s(φ_t(z))|` over the probes.
pub fn semigroup_law_check<G: VectorField + ?Sized>(
    g: &G,
    s: f64,
    t: f64,
    probes: &[Complex64],
    opts: &FlowOptions,
) -> Result<f64> {
    if s < 0.0 || t < 0.0 {
        return Err(Error::Parameter("semigroup times must be nonnegative".into()));
    }
    let devs: Vec<f64> = probes
        .par_iter()
        .map(|&z| {
            let direct = flow(g, s + t, z, opts)?.value;
            let inner = flow(g, t, z, opts)?.value;
            let composed = flow(g, s, inner, opts)?.value;
            Ok((direct - composed).norm())
        })
        .collect::<Result<_>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub lambda: f64,
    /// Radial limit of `τ̄(rτ - τ)p(rτ)`; nonzero means the regularity
    /// condition on `p` fails and the atom form of the dilatation applies.
    pub beta_estimate: f64,
    pub min_re_p: f64,
    pub samples: Vec<(Complex64, Complex64)>,
}

/// Recovers `(λ, p)` from `G` at a boundary regular fixed point `τ`:
/// `λ = ∠lim G(z)/(z-τ)` and `p(z) = G(z)/((τ̄z-1)(z-τ)) + (λ/2)(τ+z)/(τ-z)`.
pub fn decompose<G: VectorField + ?Sized>(
    g: &G,
    tau: CirclePoint,
    grid: &SampleGrid,
    radial: &Radial,
) -> Result<Decomposition> {
    let brfp = brfp_analyze(g, tau, radial)?;
    if !brfp.is_brfp {
        return Err(Error::NotBrfp(brfp.reason.unwrap_or_default()));
    }
    let lambda = brfp.lambda_est;
    let t = tau.to_complex();
    let p = |z: Complex64| g.value(z) / ((t.conj() * z - 1.0) * (z - t)) + 0.5 * lambda * (t + z) / (t - z);

    let samples: Vec<(Complex64, Complex64)> = grid.points().into_iter().map(|z| (z, p(z))).collect();
    let min_re_p = samples.iter().map(|(_, v)| v.re).fold(f64::INFINITY, f64::min);
    if min_re_p < RE_P_REJECT {
        return Err(Error::InvalidDecomposition(format!("Re p reaches {min_re_p}")));
    }

    // (rτ - τ)p(rτ) = -G(rτ)/h - (λ/2)(τ + rτ) since τ̄(rτ) - 1 = -h
    let beta = extrapolate(radial, None, |h| {
        let z = (1.0 - h) * t;
        Ok(t.conj() * (-g.value(z) / h - 0.5 * lambda * (t + z)))
    })?;
    Ok(Decomposition { lambda, beta_estimate: beta.value.re, min_re_p, samples })
}

/// `H1(z) = (τ̄z - 1)(z - τ)p(z)`, a parabolic generator at `τ`.
#[derive(Clone, Copy)]
pub struct ParabolicPart<'a>(&'a Generator);

/// `H2(z) = (λ/2)(τ̄z² - τ)`, hyperbolic automorphisms fixing `±τ`.
#[derive(Clone, Copy)]
pub struct HyperbolicPart<'a>(&'a Generator);

impl VectorField for ParabolicPart<'_> {
    fn value(&self, z: Complex64) -> Complex64 {
        self.0.h1(z)
    }
}

impl VectorField for HyperbolicPart<'_> {
    fn value(&self, z: Complex64) -> Complex64 {
        self.0.h2(z)
    }
}

pub type HSplit<'a> = (ParabolicPart<'a>, HyperbolicPart<'a>);

/// Splits `G = H1 + H2`.
pub fn h_split(g: &Generator) -> HSplit<'_> {
    (ParabolicPart(g), HyperbolicPart(g))
}

/// `min Re[G(z)/((τ̄z - 1)(z - τ))]` over the grid.
pub fn berkson_porta_check<G: VectorField + ?Sized>(g: &G, tau: CirclePoint, grid: &SampleGrid) -> f64 {
    let t = tau.to_complex();
    grid.points().into_iter().map(|z| (g.value(z) / ((t.conj() * z - 1.0) * (z - t))).re).fold(f64::INFINITY, f64::min)
}

/// Radial limit of `τ̄(rτ - τ)p(rτ)`, which equals `-2ν({τ})`.
pub fn beta_limit(g: &Generator, radial: &Radial) -> Result<f64> {
    let t = g.tau().to_complex();
    let lim = extrapolate(radial, None, |h| Ok(t.conj() * g.z_minus_tau_p((1.0 - h) * t)))?;
    Ok(lim.value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{canonical, FnField};

    fn radial() -> Radial {
        Radial::default()
    }

    #[test]
    fn brfp_of_canonical_generators() {
        let one = CirclePoint::ONE;
        let h = brfp_analyze(&canonical::hyperbolic(), one, &radial()).unwrap();
        assert!(h.is_brfp);
        assert!((h.lambda_est + 1.0).abs() < 1e-9);
        let p = brfp_analyze(&canonical::parabolic(), one, &radial()).unwrap();
        assert!(p.is_brfp);
        assert!(p.lambda_est.abs() < 1e-9);
        // β = -1 shows up in the measured exponent
        let a = brfp_analyze(&canonical::atom_at_tau(), one, &radial()).unwrap();
        assert!((a.lambda_est + 1.0).abs() < 1e-9);
    }

    #[test]
    fn interior_point_is_not_brfp() {
        let g = FnField(|z: Complex64| -z);
        let r = brfp_analyze(&g, CirclePoint::ONE, &radial()).unwrap();
        assert!(!r.is_brfp);
        assert!(r.reason.is_some());
        assert!(matches!(decompose(&g, CirclePoint::ONE, &SampleGrid::default(), &radial()), Err(Error::NotBrfp(_))));
    }

    #[test]
    fn decompose_canonical_generators() {
        let grid = SampleGrid::default();
        let one = CirclePoint::ONE;
        let d = decompose(&canonical::hyperbolic(), one, &grid, &radial()).unwrap();
        assert!((d.lambda + 1.0).abs() < 1e-9);
        assert!(d.samples.iter().all(|(_, p)| p.norm() < 1e-8));
        let d = decompose(&canonical::parabolic(), one, &grid, &radial()).unwrap();
        assert!(d.lambda.abs() < 1e-9);
        assert!(d.samples.iter().all(|(_, p)| (p - 1.0).norm() < 1e-8));
        assert!(d.beta_estimate.abs() < 1e-8);
    }

    #[test]
    fn decompose_rejects_negative_real_part() {
        // G = -(z - 1)² would need p ≡ -1
        let g = FnField(|z: Complex64| -(z - 1.0) * (z - 1.0));
        assert!(matches!(
            decompose(&g, CirclePoint::ONE, &SampleGrid::default(), &radial()),
            Err(Error::InvalidDecomposition(_))
        ));
    }

    #[test]
    fn h_split_examples() {
        let grid = SampleGrid::default();
        let par = canonical::parabolic();
        let (h1, h2) = h_split(&par);
        for z in grid.points() {
            assert!((h1.value(z) - (z - 1.0) * (z - 1.0)).norm() < 1e-14);
            assert_eq!(h2.value(z), Complex64::new(0.0, 0.0));
        }
        let hyp = canonical::hyperbolic();
        let (h1, h2) = h_split(&hyp);
        for z in grid.points() {
            assert!(h1.value(z).norm() < 1e-15);
            assert!((h2.value(z) - (1.0 - z * z) / 2.0).norm() < 1e-15);
        }
    }

    #[test]
    fn berkson_porta_sign() {
        let grid = SampleGrid::dense();
        let one = CirclePoint::ONE;
        assert!(berkson_porta_check(&canonical::hyperbolic(), one, &grid) >= -1e-9);
        assert!(berkson_porta_check(&canonical::parabolic(), one, &grid) >= -1e-9);
        assert!((berkson_porta_check(&canonical::parabolic(), one, &grid) - 1.0).abs() < 1e-12);
        assert!(berkson_porta_check(&canonical::repelling(), one, &grid) < 0.0);
    }

    #[test]
    fn beta_limits() {
        assert!((beta_limit(&canonical::atom_at_tau(), &radial()).unwrap() + 1.0).abs() < 1e-12);
        assert!(beta_limit(&canonical::parabolic(), &radial()).unwrap().abs() < 1e-9);
        assert_eq!(beta_limit(&canonical::zero(), &radial()).unwrap(), 0.0);
    }

    #[test]
    fn beta_is_normalized_for_rotated_tau() {
        let tau = CirclePoint::new(2.0).unwrap();
        let nu = crate::disc::SignedBoundaryMeasure::dirac(tau, 0.25);
        let g = Generator::new(nu, 0.0, tau, 0.0).unwrap();
        let b = beta_limit(&g, &radial()).unwrap();
        assert!((b + 0.5).abs() < 1e-12);
        assert_eq!(g.beta(), -0.5);
    }
}
