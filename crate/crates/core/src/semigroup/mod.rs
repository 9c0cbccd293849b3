//! Infinitesimal generators of semigroups of holomorphic self-maps of the disc
//! written in boundary-fixed-point form
//!
//! `G(z) = (τ̄z - 1)(z - τ)[p(z) - (λ/2)(τ+z)/(τ-z)]`
//!
//! where `p` is a Herglotz function given by its boundary measure `ν ≥ 0` and an
//! imaginary constant.

mod analysis;
mod flow;
mod herglotz;

pub use analysis::{
    berkson_porta_check, beta_limit, brfp_analyze, decompose, dilatation_check, h_split, semigroup_law_check,
    BrfpReport, Decomposition, HSplit, SampleGrid,
};
pub use flow::{flow, flow_many, FlowOptions, FlowResult};
pub use herglotz::HerglotzSeries;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disc::{
    check_interior, Atom, BoundaryMeasure, CirclePoint, SignedBoundaryMeasure, ATOM_MERGE_TOL, DEFAULT_GRID,
};
use crate::error::{Error, Result};

/// A holomorphic vector field on the disc.
pub trait VectorField: Sync {
    /// Evaluates the field; callers are responsible for staying in the disc.
    fn value(&self, z: Complex64) -> Complex64;
}

/// Adapts a closure to [`VectorField`].
#[derive(Clone, Copy)]
pub struct FnField<F>(pub F);

impl<F> VectorField for FnField<F>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    fn value(&self, z: Complex64) -> Complex64 {
        (self.0)(z)
    }
}

impl<T: VectorField + ?Sized> VectorField for &T {
    fn value(&self, z: Complex64) -> Complex64 {
        (**self).value(z)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeneratorSpec", into = "GeneratorSpec")]
pub struct Generator {
    tau: CirclePoint,
    lambda: f64,
    nu: BoundaryMeasure,
    imag_const: f64,
    series: HerglotzSeries,
    /// atoms of ν other than the one at τ
    atoms: Vec<(Complex64, f64)>,
    tau_mass: f64,
}

impl Generator {
    /// Builds `G` from the Herglotz data `(ν, c)`, the boundary point `τ` and `λ`.
    ///
    /// Fails with a domain error when `ν` is not a nonnegative measure.
    pub fn new(nu: SignedBoundaryMeasure, imag_const: f64, tau: CirclePoint, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || !imag_const.is_finite() {
            return Err(Error::Parameter("λ and the imaginary constant must be finite".into()));
        }
        let nu = BoundaryMeasure::try_from(nu)?;
        let series = HerglotzSeries::from_density(&nu);
        let mut tau_mass = 0.0;
        let mut atoms = Vec::new();
        for a in nu.atoms() {
            if a.location.distance(tau) <= ATOM_MERGE_TOL {
                tau_mass += a.mass;
            } else {
                atoms.push((a.location.to_complex(), a.mass));
            }
        }
        Ok(Self { tau, lambda, nu, imag_const, series, atoms, tau_mass })
    }

    /// `G(z) = (λ/2)(τ̄z² - τ)`: hyperbolic automorphisms fixing `±τ`.
    pub fn hyperbolic(tau: CirclePoint, lambda: f64) -> Self {
        Self::new(SignedBoundaryMeasure::zero(), 0.0, tau, lambda).expect("valid generator")
    }

    /// `G(z) = c(τ̄z - 1)(z - τ)`, i.e. `p ≡ c`; for `τ = 1` this is `c(z - 1)²`.
    pub fn parabolic(tau: CirclePoint, c: f64) -> Result<Self> {
        Self::new(SignedBoundaryMeasure::uniform(c, DEFAULT_GRID), 0.0, tau, 0.0)
    }

    pub fn tau(&self) -> CirclePoint {
        self.tau
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn nu(&self) -> &BoundaryMeasure {
        &self.nu
    }

    pub fn imag_const(&self) -> f64 {
        self.imag_const
    }

    /// `β = -2ν({τ})`.
    pub fn beta(&self) -> f64 {
        -2.0 * self.tau_mass
    }

    /// Whether `∠lim (z-τ)p(z) = 0`, i.e. `ν` has no atom at `τ`.
    pub fn is_regular(&self) -> bool {
        self.tau_mass == 0.0
    }

    /// Boundary dilatation exponent: the semigroup satisfies `φ_t'(τ) = e^{(λ+β)t}`.
    pub fn dilatation_exponent(&self) -> f64 {
        self.lambda + self.beta()
    }

    pub fn p(&self, z: Complex64) -> Result<Complex64> {
        check_interior(z)?;
        Ok(self.p_unchecked(z))
    }

    fn p_unchecked(&self, z: Complex64) -> Complex64 {
        let tau = self.tau.to_complex();
        let mut s = self.series.eval(z) + Complex64::new(0.0, self.imag_const);
        if self.tau_mass != 0.0 {
            s += self.tau_mass * (tau + z) / (tau - z);
        }
        for &(zeta, w) in &self.atoms {
            s += w * (zeta + z) / (zeta - z);
        }
        s
    }

    /// `(z - τ)p(z)`, with the atom at `τ` simplified to `-ν({τ})(τ + z)`.
    pub(crate) fn z_minus_tau_p(&self, z: Complex64) -> Complex64 {
        let tau = self.tau.to_complex();
        let mut s = (z - tau) * (self.series.eval(z) + Complex64::new(0.0, self.imag_const));
        s -= self.tau_mass * (tau + z);
        for &(zeta, w) in &self.atoms {
            s += (z - tau) * w * (zeta + z) / (zeta - z);
        }
        s
    }

    /// `H1(z) = (τ̄z - 1)(z - τ)p(z)`.
    pub(crate) fn h1(&self, z: Complex64) -> Complex64 {
        let tau = self.tau.to_complex();
        (tau.conj() * z - 1.0) * self.z_minus_tau_p(z)
    }

    /// `H2(z) = (λ/2)(τ̄z² - τ)`.
    pub(crate) fn h2(&self, z: Complex64) -> Complex64 {
        let tau = self.tau.to_complex();
        0.5 * self.lambda * (tau.conj() * z * z - tau)
    }

    /// Evaluates `G` at an interior point.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        check_interior(z)?;
        Ok(self.value(z))
    }

    /// The generator `aG1 + bG2` of two generators at the same `τ`.
    ///
    /// Both Herglotz measures must share a grid (or be atomic).
    pub fn cone_combination(a: f64, g1: &Generator, b: f64, g2: &Generator) -> Result<Generator> {
        if a < 0.0 || b < 0.0 {
            return Err(Error::Parameter("cone coefficients must be nonnegative".into()));
        }
        if g1.tau.distance(g2.tau) > ATOM_MERGE_TOL {
            return Err(Error::Parameter("generators must share the boundary point".into()));
        }
        let nu = SignedBoundaryMeasure::linear_combine(a, &g1.nu, b, &g2.nu)?;
        Generator::new(nu, a * g1.imag_const + b * g2.imag_const, g1.tau, a * g1.lambda + b * g2.lambda)
    }
}

impl VectorField for Generator {
    fn value(&self, z: Complex64) -> Complex64 {
        self.h1(z) + self.h2(z)
    }
}

/// A few generators with closed-form flows at `τ = 1`, used by the
/// verification suite and the examples.
pub mod canonical {
    use super::*;

    /// `G(z) = (1 - z²)/2`: `ν = 0`, `λ = -1`.
    pub fn hyperbolic() -> Generator {
        Generator::hyperbolic(CirclePoint::ONE, -1.0)
    }

    /// `G(z) = -(1 - z²)/2`: `ν = 0`, `λ = +1`; `τ = 1` is repelling.
    pub fn repelling() -> Generator {
        Generator::hyperbolic(CirclePoint::ONE, 1.0)
    }

    /// `G(z) = (z - 1)²`: `ν = m`, `λ = 0`.
    pub fn parabolic() -> Generator {
        Generator::parabolic(CirclePoint::ONE, 1.0).expect("valid generator")
    }

    /// `G(z) = (z - 1)² + (1 - z²)/2`: `ν = m`, `λ = -1`.
    pub fn mixed() -> Generator {
        Generator::new(SignedBoundaryMeasure::lebesgue(DEFAULT_GRID), 0.0, CirclePoint::ONE, -1.0)
            .expect("valid generator")
    }

    /// `ν = δ₁/2`, `λ = 0`: the same field as [`hyperbolic`], reached through
    /// an atom of `ν` at `τ` (`β = -1`).
    pub fn atom_at_tau() -> Generator {
        Generator::new(SignedBoundaryMeasure::dirac(CirclePoint::ONE, 0.5), 0.0, CirclePoint::ONE, 0.0)
            .expect("valid generator")
    }

    /// `G ≡ 0`.
    pub fn zero() -> Generator {
        Generator::hyperbolic(CirclePoint::ONE, 0.0)
    }

    pub fn by_name(name: &str) -> Option<Generator> {
        Some(match name {
            "hyperbolic" => hyperbolic(),
            "repelling" => repelling(),
            "parabolic" => parabolic(),
            "mixed" => mixed(),
            "atom-at-tau" => atom_at_tau(),
            "zero" => zero(),
            _ => return None,
        })
    }
}

/// Density of `ν` in a generator spec: samples or a constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DensitySpec {
    Samples(Vec<f64>),
    Constant { constant: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HerglotzSpec {
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensitySpec>,
    #[serde(default)]
    pub imag_const: f64,
}

/// JSON form `{"tau": θ, "lambda": λ, "p": {"atoms": [...], "density": [...] | {"constant": c}, "imag_const": c0}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub tau: CirclePoint,
    pub lambda: f64,
    pub p: HerglotzSpec,
}

impl TryFrom<GeneratorSpec> for Generator {
    type Error = Error;

    fn try_from(spec: GeneratorSpec) -> Result<Self> {
        let density = match spec.p.density {
            None => Vec::new(),
            Some(DensitySpec::Samples(s)) => s,
            Some(DensitySpec::Constant { constant }) => vec![constant; DEFAULT_GRID],
        };
        let nu = SignedBoundaryMeasure::new(spec.p.atoms, density)?;
        Generator::new(nu, spec.p.imag_const, spec.tau, spec.lambda)
    }
}

impl From<Generator> for GeneratorSpec {
    fn from(g: Generator) -> Self {
        let density = (!g.nu.is_purely_atomic()).then(|| DensitySpec::Samples(g.nu.density().to_vec()));
        GeneratorSpec {
            tau: g.tau,
            lambda: g.lambda,
            p: HerglotzSpec { atoms: g.nu.atoms().to_vec(), density, imag_const: g.imag_const },
        }
    }
}
