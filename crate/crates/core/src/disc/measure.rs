use std::ops::Deref;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernels::{herglotz_unchecked, poisson_unchecked};
use super::{check_interior, CirclePoint};
use crate::error::{Error, Result};

/// Atoms closer than this (in radians) are the same atom.
pub const ATOM_MERGE_TOL: f64 = 1e-12;

/// Default number of density samples on the circle.
pub const DEFAULT_GRID: usize = 1024;

/// Lowest density sample still accepted as nonnegative.
const DENSITY_FLOOR: f64 = -1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(rename = "angle")]
    pub location: CirclePoint,
    pub mass: f64,
}

impl Atom {
    pub fn new(location: CirclePoint, mass: f64) -> Self {
        Self { location, mass }
    }
}

#[derive(Deserialize)]
struct RawMeasure {
    #[serde(default)]
    atoms: Vec<Atom>,
    #[serde(default)]
    density: Vec<f64>,
    grid_size: Option<usize>,
}

/// A finite real measure on the circle: atoms plus a density sampled at the
/// angles `2πk/N` relative to the normalized arc-length measure.
///
/// `grid_size == 0` means the measure is purely atomic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure")]
pub struct SignedBoundaryMeasure {
    atoms: Vec<Atom>,
    density: Vec<f64>,
    grid_size: usize,
}

impl TryFrom<RawMeasure> for SignedBoundaryMeasure {
    type Error = Error;

    fn try_from(raw: RawMeasure) -> Result<Self> {
        if let Some(n) = raw.grid_size {
            if n != raw.density.len() {
                return Err(Error::Schema(format!(
                    "grid_size {n} does not match {} density samples",
                    raw.density.len()
                )));
            }
        }
        SignedBoundaryMeasure::new(raw.atoms, raw.density)
    }
}

impl SignedBoundaryMeasure {
    /// Builds a measure, merging atoms that coincide within [`ATOM_MERGE_TOL`].
    pub fn new(atoms: Vec<Atom>, density: Vec<f64>) -> Result<Self> {
        if let Some(a) = atoms.iter().find(|a| !a.mass.is_finite()) {
            return Err(Error::Parameter(format!("atom mass {} is not finite", a.mass)));
        }
        if density.iter().any(|d| !d.is_finite()) {
            return Err(Error::Parameter("density sample is not finite".into()));
        }
        let grid_size = density.len();
        Ok(Self { atoms: merge_atoms(atoms), density, grid_size })
    }

    pub fn zero() -> Self {
        Self { atoms: Vec::new(), density: Vec::new(), grid_size: 0 }
    }

    pub fn dirac(location: CirclePoint, mass: f64) -> Self {
        Self::new(vec![Atom::new(location, mass)], Vec::new()).expect("finite mass")
    }

    /// `c·m` on a grid of `n` points.
    pub fn uniform(c: f64, n: usize) -> Self {
        Self::new(Vec::new(), vec![c; n]).expect("finite density")
    }

    /// The normalized Lebesgue measure `m`.
    pub fn lebesgue(n: usize) -> Self {
        Self::uniform(1.0, n)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn is_purely_atomic(&self) -> bool {
        self.grid_size == 0
    }

    pub fn grid_point(&self, k: usize) -> CirclePoint {
        CirclePoint::grid(k, self.grid_size)
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Mass of the absolutely continuous part, by the periodic trapezoid rule.
    pub fn ac_mass(&self) -> f64 {
        if self.grid_size == 0 {
            return 0.0;
        }
        self.density.iter().sum::<f64>() / self.grid_size as f64
    }

    pub fn total_mass(&self) -> f64 {
        self.atom_mass() + self.ac_mass()
    }

    /// Mass of the atom at `p`, or zero.
    pub fn mass_at(&self, p: CirclePoint) -> f64 {
        self.atoms.iter().filter(|a| a.location.distance(p) <= ATOM_MERGE_TOL).map(|a| a.mass).sum()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            atoms: self.atoms.iter().map(|at| Atom::new(at.location, a * at.mass)).collect(),
            density: self.density.iter().map(|d| a * d).collect(),
            grid_size: self.grid_size,
        }
    }

    /// `a·μ1 + b·μ2`.
    ///
    /// The grids must agree unless one of the measures is purely atomic.
    pub fn linear_combine(a: f64, mu1: &Self, b: f64, mu2: &Self) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Parameter("coefficients must be finite".into()));
        }
        let density = match (mu1.grid_size, mu2.grid_size) {
            (0, 0) => Vec::new(),
            (_, 0) => mu1.density.iter().map(|d| a * d).collect(),
            (0, _) => mu2.density.iter().map(|d| b * d).collect(),
            (n1, n2) if n1 == n2 => mu1.density.iter().zip(&mu2.density).map(|(d1, d2)| a * d1 + b * d2).collect(),
            (n1, n2) => return Err(Error::Shape(format!("cannot combine grids of size {n1} and {n2}"))),
        };
        let atoms = mu1
            .atoms
            .iter()
            .map(|at| Atom::new(at.location, a * at.mass))
            .chain(mu2.atoms.iter().map(|at| Atom::new(at.location, b * at.mass)))
            .collect();
        Self::new(atoms, density)
    }

    /// `∫ P(ζ, z) dμ(ζ)`.
    pub fn poisson_integral(&self, z: Complex64) -> Result<f64> {
        check_interior(z)?;
        let atoms: f64 = self.atoms.iter().map(|a| a.mass * poisson_unchecked(a.location.to_complex(), z)).sum();
        Ok(atoms + self.trapezoid(|zeta| poisson_unchecked(zeta, z)))
    }

    /// `∫ (ζ + z)/(ζ - z) dμ(ζ) + i·imag_const`, without a sign check on μ.
    pub fn herglotz_transform(&self, imag_const: f64, z: Complex64) -> Result<Complex64> {
        check_interior(z)?;
        let atoms: Complex64 = self.atoms.iter().map(|a| a.mass * herglotz_unchecked(a.location.to_complex(), z)).sum();
        let dens = self.trapezoid_complex(|zeta| herglotz_unchecked(zeta, z));
        Ok(atoms + dens + Complex64::new(0.0, imag_const))
    }

    /// `∫ ζ^k dμ(ζ)`.
    pub fn fourier_moment(&self, k: i64) -> Complex64 {
        let atoms: Complex64 = self.atoms.iter().map(|a| a.mass * a.location.to_complex().powi(k as i32)).sum();
        atoms + self.trapezoid_complex(|zeta| zeta.powi(k as i32))
    }

    fn trapezoid(&self, f: impl Fn(Complex64) -> f64) -> f64 {
        if self.grid_size == 0 {
            return 0.0;
        }
        let n = self.grid_size;
        let s: f64 = self
            .density
            .iter()
            .enumerate()
            .filter(|(_, d)| **d != 0.0)
            .map(|(k, d)| d * f(CirclePoint::grid(k, n).to_complex()))
            .sum();
        s / n as f64
    }

    fn trapezoid_complex(&self, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
        if self.grid_size == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let n = self.grid_size;
        let s: Complex64 = self
            .density
            .iter()
            .enumerate()
            .filter(|(_, d)| **d != 0.0)
            .map(|(k, d)| *d * f(CirclePoint::grid(k, n).to_complex()))
            .sum();
        s / n as f64
    }

    pub fn is_nonnegative(&self) -> bool {
        self.atoms.iter().all(|a| a.mass >= 0.0) && self.density.iter().all(|d| *d >= DENSITY_FLOOR)
    }
}

fn merge_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.sort_by(|a, b| a.location.angle().total_cmp(&b.location.angle()));
    let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match merged.iter_mut().find(|m| m.location.distance(a.location) <= ATOM_MERGE_TOL) {
            Some(m) => m.mass += a.mass,
            None => merged.push(a),
        }
    }
    merged.retain(|a| a.mass != 0.0);
    merged
}

/// A nonnegative [`SignedBoundaryMeasure`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SignedBoundaryMeasure", into = "SignedBoundaryMeasure")]
pub struct BoundaryMeasure(SignedBoundaryMeasure);

impl BoundaryMeasure {
    pub fn zero() -> Self {
        Self(SignedBoundaryMeasure::zero())
    }

    pub fn dirac(location: CirclePoint, mass: f64) -> Result<Self> {
        SignedBoundaryMeasure::dirac(location, mass).try_into()
    }

    pub fn lebesgue(n: usize) -> Self {
        Self(SignedBoundaryMeasure::lebesgue(n))
    }

    pub fn uniform(c: f64, n: usize) -> Result<Self> {
        SignedBoundaryMeasure::uniform(c, n).try_into()
    }

    pub fn new(atoms: Vec<Atom>, density: Vec<f64>) -> Result<Self> {
        SignedBoundaryMeasure::new(atoms, density)?.try_into()
    }

    pub fn as_signed(&self) -> &SignedBoundaryMeasure {
        &self.0
    }

    pub fn into_signed(self) -> SignedBoundaryMeasure {
        self.0
    }

    /// `∫ (ζ + z)/(ζ - z) dμ(ζ) + i·imag_const`; the real part is nonnegative.
    pub fn herglotz_integral(&self, imag_const: f64, z: Complex64) -> Result<Complex64> {
        self.0.herglotz_transform(imag_const, z)
    }
}

impl Deref for BoundaryMeasure {
    type Target = SignedBoundaryMeasure;

    fn deref(&self) -> &SignedBoundaryMeasure {
        &self.0
    }
}

impl TryFrom<SignedBoundaryMeasure> for BoundaryMeasure {
    type Error = Error;

    fn try_from(mu: SignedBoundaryMeasure) -> Result<Self> {
        if !mu.is_nonnegative() {
            return Err(Error::Domain("measure has negative atoms or density".into()));
        }
        Ok(Self(mu))
    }
}

impl From<BoundaryMeasure> for SignedBoundaryMeasure {
    fn from(mu: BoundaryMeasure) -> Self {
        mu.0
    }
}
