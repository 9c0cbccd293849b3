//! Unit-circle and unit-disc primitives.
//!
//! Points of the circle are stored by angle, measures on the circle as a
//! finite list of atoms plus a density sampled on a uniform grid with
//! respect to the normalized arc-length measure `m` (so `m(circle) = 1`).

mod kernels;
mod measure;
mod weakstar;

pub use kernels::{herglotz_kernel, poisson_kernel};
pub use measure::{Atom, BoundaryMeasure, SignedBoundaryMeasure, ATOM_MERGE_TOL, DEFAULT_GRID};
pub use weakstar::{weakstar_distance, TestFunctionFamily};

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted for a point of the open disc.
pub const INTERIOR_LIMIT: f64 = 1.0 - 1e-15;

/// A point `e^{iθ}` of the unit circle, `θ ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct CirclePoint {
    angle: f64,
}

impl CirclePoint {
    pub const ONE: CirclePoint = CirclePoint { angle: 0.0 };

    pub fn new(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::Parameter(format!("angle {angle} is not finite")));
        }
        // adding zero maps -0.0 to 0.0
        let mut a = angle.rem_euclid(TAU) + 0.0;
        // rem_euclid can round up to exactly 2π for tiny negative inputs
        if a >= TAU {
            a = 0.0;
        }
        Ok(Self { angle: a })
    }

    /// Radial projection of a nonzero complex number onto the circle.
    pub fn from_complex(z: Complex64) -> Result<Self> {
        if !(z.norm() > 0.0) || !z.is_finite() {
            return Err(Error::Parameter(format!("cannot project {z} onto the circle")));
        }
        Self::new(z.arg())
    }

    pub fn angle(self) -> f64 {
        self.angle
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    /// Angular distance along the circle, in `[0, π]`.
    pub fn distance(self, other: CirclePoint) -> f64 {
        let d = (self.angle - other.angle).abs();
        d.min(TAU - d)
    }

    /// The antipodal point `-ζ`.
    pub fn antipode(self) -> CirclePoint {
        CirclePoint::new(self.angle + std::f64::consts::PI).expect("finite angle")
    }

    /// `e^{2πik/n}`.
    pub fn grid(k: usize, n: usize) -> CirclePoint {
        CirclePoint::new(TAU * k as f64 / n as f64).expect("finite angle")
    }
}

impl TryFrom<f64> for CirclePoint {
    type Error = Error;

    fn try_from(angle: f64) -> Result<Self> {
        CirclePoint::new(angle)
    }
}

impl From<CirclePoint> for f64 {
    fn from(p: CirclePoint) -> f64 {
        p.angle
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e^(i{})", self.angle)
    }
}

pub(crate) fn check_interior(z: Complex64) -> Result<()> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("{z} is not finite")));
    }
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!("|{z}| = {} is not inside the unit disc", z.norm())));
    }
    Ok(())
}

/// Pseudo-hyperbolic distance `|z - w| / |1 - w̄ z|`.
pub fn pseudo_hyperbolic(z: Complex64, w: Complex64) -> f64 {
    (z - w).norm() / (Complex64::new(1.0, 0.0) - w.conj() * z).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn canonicalizes_angles() {
        assert_eq!(CirclePoint::new(-PI / 2.0).unwrap().angle(), 1.5 * PI);
        assert_eq!(CirclePoint::new(TAU).unwrap().angle(), 0.0);
        assert_eq!(CirclePoint::new(-1e-300).unwrap().angle(), 0.0);
        assert!(CirclePoint::new(f64::NAN).is_err());
        assert!(CirclePoint::new(f64::INFINITY).is_err());
    }

    #[test]
    fn embedded_point_is_unimodular() {
        for k in 0..1000 {
            let p = CirclePoint::new(k as f64 * 0.731).unwrap();
            assert!((p.to_complex().norm() - 1.0).abs() < 1e-15);
            assert!((0.0..TAU).contains(&p.angle()));
        }
    }

    #[test]
    fn distance_wraps() {
        let a = CirclePoint::new(0.1).unwrap();
        let b = CirclePoint::new(TAU - 0.1).unwrap();
        assert!((a.distance(b) - 0.2).abs() < 1e-14);
        assert!((CirclePoint::ONE.antipode().angle() - PI).abs() < 1e-15);
    }

    #[test]
    fn serde_as_bare_angle() {
        let p: CirclePoint = serde_json::from_str("-3.0").unwrap();
        assert!((p.angle() - (TAU - 3.0)).abs() < 1e-15);
        assert_eq!(serde_json::to_string(&CirclePoint::ONE).unwrap(), "0.0");
    }
}
