//! Radial limits, dilatation coefficients and angular derivatives.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::HoloMap;
use crate::disc::CirclePoint;
use crate::error::{Error, Result};
use crate::limits::{extrapolate, LimitStatus, Radial};

/// Samples beyond this modulus count as divergence.
pub const DILATATION_CAP: f64 = 1e6;

/// Distance from the circle below which a radial limit counts as unimodular.
pub(crate) const CONTACT_TOL: f64 = 1e-6;

const STOLZ_APERTURE: f64 = FRAC_PI_4;

/// Schedule adjusted to the accuracy of the map: integrated flows cannot be
/// sampled arbitrarily close to the circle.
pub(crate) fn schedule_for(f: &HoloMap, radial: &Radial) -> Radial {
    let noise = f.noise_floor();
    if noise > 0.0 {
        Radial { k_max: radial.k_max.min(14), tol: radial.tol.max(1e2 * noise), ..*radial }
    } else {
        *radial
    }
}

fn agreement_tol(f: &HoloMap) -> f64 {
    if f.is_closed_form() {
        1e-6
    } else {
        1e-4
    }
}

/// `(f(rζ), 1 - |f(rζ)|²)` at `r = 1 - h`.
fn radial_sample(f: &HoloMap, zeta: Complex64, h: f64) -> Result<(Complex64, f64)> {
    f.eval_pair((1.0 - h) * zeta, h * (2.0 - h))
}

/// `lim_{r→1} f(rζ)`, or `None` when the samples do not settle.
pub fn radial_limit(f: &HoloMap, zeta: CirclePoint, radial: &Radial) -> Result<Option<Complex64>> {
    let radial = schedule_for(f, radial);
    let z = zeta.to_complex();
    let lim = extrapolate(&radial, None, |h| Ok(radial_sample(f, z, h)?.0))?;
    Ok(lim.converged().then_some(lim.value))
}

/// `lim_{r→1} (1 - |f(rζ)|)/(1 - r)`; `f64::INFINITY` when the quotient
/// exceeds [`DILATATION_CAP`] or fails to settle.
pub fn boundary_dilatation(f: &HoloMap, zeta: CirclePoint, radial: &Radial) -> Result<f64> {
    let radial = schedule_for(f, radial);
    let z = zeta.to_complex();
    let lim = extrapolate(&radial, Some(DILATATION_CAP), |h| {
        let (w, defect) = radial_sample(f, z, h)?;
        Ok(Complex64::new(defect / ((1.0 + w.norm()) * h), 0.0))
    })?;
    Ok(if lim.converged() { lim.value.re.max(0.0) } else { f64::INFINITY })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AngularDerivative {
    Finite(Complex64),
    Infinite,
}

impl AngularDerivative {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            AngularDerivative::Finite(d) => Some(d),
            AngularDerivative::Infinite => None,
        }
    }

    pub fn modulus(self) -> f64 {
        self.finite().map_or(f64::INFINITY, |d| d.norm())
    }
}

impl Serialize for AngularDerivative {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AngularDerivative::Finite(d) => d.serialize(s),
            AngularDerivative::Infinite => s.serialize_str("+inf"),
        }
    }
}

/// Difference quotient `(f(z) - L)/(z - ζ)` along `z = ζ(1 - h e^{iφ})`.
fn quotient_limit(
    f: &HoloMap,
    zeta: Complex64,
    limit: Complex64,
    phi: f64,
    radial: &Radial,
) -> Result<crate::limits::Limit> {
    let dir = Complex64::from_polar(1.0, phi);
    extrapolate(radial, Some(DILATATION_CAP), |h| {
        let dz = -zeta * dir * h;
        let z = zeta + dz;
        let defect = if phi == 0.0 { h * (2.0 - h) } else { 1.0 - z.norm_sqr() };
        let (w, _) = f.eval_pair(z, defect)?;
        Ok((w - limit) / dz)
    })
}

/// `∠lim_{z→ζ} (f(z) - f*(ζ))/(z - ζ)`.
///
/// The radial difference quotient is cross-checked against `f'(rζ)` and
/// against two rays at the edge of a Stolz sector; a disagreement is an error.
pub fn angular_derivative(f: &HoloMap, zeta: CirclePoint, radial: &Radial) -> Result<AngularDerivative> {
    let Some(limit) = radial_limit(f, zeta, radial)? else {
        return Ok(AngularDerivative::Infinite);
    };
    let radial = schedule_for(f, radial);
    if (limit.norm() - 1.0).abs() > CONTACT_TOL.max(f.noise_floor()) {
        return Ok(AngularDerivative::Infinite);
    }
    let z = zeta.to_complex();
    let quotient = quotient_limit(f, z, limit, 0.0, &radial)?;
    if !quotient.converged() {
        return Ok(AngularDerivative::Infinite);
    }
    let value = quotient.value;
    let tol = agreement_tol(f) * (1.0 + value.norm());

    let deriv = extrapolate(&radial, Some(DILATATION_CAP), |h| f.derivative((1.0 - h) * z))?;
    if deriv.status == LimitStatus::Diverged || (deriv.value - value).norm() > tol {
        return Err(Error::NumericalInconsistency(format!(
            "difference quotient {value} and derivative limit {} disagree at {zeta}",
            deriv.value
        )));
    }
    for phi in [STOLZ_APERTURE, -STOLZ_APERTURE] {
        let ray = quotient_limit(f, z, limit, phi, &radial)?;
        if ray.status == LimitStatus::Diverged || (ray.value - value).norm() > tol {
            return Err(Error::NumericalInconsistency(format!(
                "nontangential quotient {} on the ray at angle {phi} differs from the radial value {value} at {zeta}",
                ray.value
            )));
        }
    }
    Ok(AngularDerivative::Finite(value))
}

fn serialize_ext_real<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_infinite() {
        s.serialize_str("+inf")
    } else {
        s.serialize_f64(*x)
    }
}

fn serialize_radial<S: Serializer>(x: &Option<Complex64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(w) => w.serialize(s),
        None => s.serialize_str("divergent"),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryPointReport {
    pub point: CirclePoint,
    /// `None` when the radial samples do not settle.
    #[serde(serialize_with = "serialize_radial")]
    pub radial_limit: Option<Complex64>,
    /// The unimodular value `f*(ζ)` when `ζ` is a contact point.
    pub contact_for: Option<CirclePoint>,
    #[serde(serialize_with = "serialize_ext_real")]
    pub dilatation: f64,
    pub angular_derivative: AngularDerivative,
}

pub fn boundary_report(f: &HoloMap, zeta: CirclePoint, radial: &Radial) -> Result<BoundaryPointReport> {
    let radial_limit = radial_limit(f, zeta, radial)?;
    let contact_for = match radial_limit {
        Some(w) if (w.norm() - 1.0).abs() <= CONTACT_TOL.max(f.noise_floor()) => Some(CirclePoint::from_complex(w)?),
        _ => None,
    };
    let (dilatation, angular_derivative) = if contact_for.is_some() {
        (boundary_dilatation(f, zeta, radial)?, angular_derivative(f, zeta, radial)?)
    } else {
        (f64::INFINITY, AngularDerivative::Infinite)
    };
    Ok(BoundaryPointReport { point: zeta, radial_limit, contact_for, dilatation, angular_derivative })
}

/// Reports at every `ζ` with `f*(ζ) = τ`, sorted by angle.
///
/// Requires a map that collapses to a finite Blaschke product.
pub fn contact_points(f: &HoloMap, tau: CirclePoint, radial: &Radial) -> Result<Vec<BoundaryPointReport>> {
    let b = f
        .as_blaschke()?
        .ok_or_else(|| Error::Unsupported("contact-point solving needs a finite Blaschke product".into()))?;
    b.boundary_preimages(tau)?.into_iter().map(|zeta| boundary_report(f, zeta, radial)).collect()
}
