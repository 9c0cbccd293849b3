//! Holomorphic self-maps of the disc with finite closed-form descriptions.

mod blaschke;
mod boundary;

pub use blaschke::Blaschke;
pub use boundary::{
    angular_derivative, boundary_dilatation, boundary_report, contact_points, radial_limit, AngularDerivative,
    BoundaryPointReport, DILATATION_CAP,
};
pub(crate) use boundary::{schedule_for, CONTACT_TOL};

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disc::{check_interior, CirclePoint};
use crate::error::{Error, Result};
use crate::semigroup::{flow, flow_many, FlowOptions, Generator, GeneratorSpec};

/// Zeros and automorphism parameters must satisfy `|a| ≤ 1 - ZERO_MARGIN`.
pub const ZERO_MARGIN: f64 = 1e-12;

/// `z ↦ e^{iθ}(z - a)/(1 - āz)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Automorphism {
    a: Complex64,
    rotation: CirclePoint,
}

impl Automorphism {
    pub fn new(a: Complex64, rotation: CirclePoint) -> Result<Self> {
        check_parameter(a)?;
        Ok(Self { a, rotation })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn rotation(&self) -> CirclePoint {
        self.rotation
    }

    fn eval_pair(&self, z: Complex64, defect: f64) -> (Complex64, f64) {
        let den = Complex64::new(1.0, 0.0) - self.a.conj() * z;
        let w = self.rotation.to_complex() * (z - self.a) / den;
        (w, (1.0 - self.a.norm_sqr()) * defect / den.norm_sqr())
    }

    fn derivative(&self, z: Complex64) -> Complex64 {
        let den = Complex64::new(1.0, 0.0) - self.a.conj() * z;
        self.rotation.to_complex() * (1.0 - self.a.norm_sqr()) / (den * den)
    }
}

/// The time-`t` map of the semigroup generated by a [`Generator`].
#[derive(Clone, Debug, PartialEq)]
pub struct FlowMap {
    generator: Arc<Generator>,
    t: f64,
    options: FlowOptions,
}

impl FlowMap {
    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn options(&self) -> &FlowOptions {
        &self.options
    }

    fn eval_pair(&self, z: Complex64) -> Result<(Complex64, f64)> {
        let w = flow(self.generator.as_ref(), self.t, z, &self.options)?.value;
        let m = w.norm();
        Ok((w, (1.0 - m) * (1.0 + m)))
    }

    /// Central difference on jointly integrated trajectories, with one
    /// Richardson step.
    fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let s = 1e-6 * (1.0 - z.norm());
        let pts = [z + s, z - s, z + s / 2.0, z - s / 2.0];
        let (w, _, _) = flow_many(self.generator.as_ref(), self.t, &pts, &self.options)?;
        let coarse = (w[0] - w[1]) / (2.0 * s);
        let fine = (w[2] - w[3]) / s;
        Ok((4.0 * fine - coarse) / 3.0)
    }
}

/// A holomorphic self-map of the unit disc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapSpec", into = "MapSpec")]
pub enum HoloMap {
    Identity,
    Automorphism(Automorphism),
    Blaschke(Blaschke),
    Flow(FlowMap),
    /// `[f1, f2, ..., fn]` is `f1 ∘ f2 ∘ ... ∘ fn`: the last map acts first.
    Composition(Vec<HoloMap>),
}

impl HoloMap {
    pub fn automorphism(a: Complex64, rotation: CirclePoint) -> Result<Self> {
        Ok(HoloMap::Automorphism(Automorphism::new(a, rotation)?))
    }

    pub fn blaschke(zeros: Vec<Complex64>, rotation: CirclePoint) -> Result<Self> {
        Ok(HoloMap::Blaschke(Blaschke::new(zeros, rotation)?))
    }

    /// `z ↦ z^n`.
    pub fn power(n: usize) -> Result<Self> {
        Self::blaschke(vec![Complex64::new(0.0, 0.0); n], CirclePoint::ONE)
    }

    pub fn flow(generator: Generator, t: f64) -> Result<Self> {
        Self::flow_with(generator, t, FlowOptions::default())
    }

    pub fn flow_with(generator: Generator, t: f64, options: FlowOptions) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Parameter(format!("flow time {t} must be finite and nonnegative")));
        }
        let map = HoloMap::Flow(FlowMap { generator: Arc::new(generator), t, options });
        map.check_self_map()?;
        Ok(map)
    }

    pub fn composition(maps: Vec<HoloMap>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::Parameter("empty composition".into()));
        }
        Ok(HoloMap::Composition(maps))
    }

    /// Checks `|f(z)| < 1` on a sample grid.
    pub fn check_self_map(&self) -> Result<()> {
        for r in [0.0, 0.3, 0.6, 0.9] {
            for j in 0..8 {
                let z = Complex64::from_polar(r, TAU * j as f64 / 8.0);
                let w = self.eval(z).map_err(|e| Error::Domain(format!("not a self-map of the disc: {e}")))?;
                if !(w.norm() < 1.0) {
                    return Err(Error::Domain(format!("f({z}) = {w} is outside the disc")));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        check_interior(z)?;
        let m = z.norm();
        Ok(self.eval_pair(z, (1.0 - m) * (1.0 + m))?.0)
    }

    /// `(f(z), 1 - |f(z)|²)` given `defect = 1 - |z|²`.
    ///
    /// For closed-form variants the output defect is propagated exactly through
    /// `1 - |b_a(z)|² = (1 - |a|²)(1 - |z|²)/|1 - āz|²`, which keeps relative
    /// accuracy near the circle.
    pub(crate) fn eval_pair(&self, z: Complex64, defect: f64) -> Result<(Complex64, f64)> {
        match self {
            HoloMap::Identity => Ok((z, defect)),
            HoloMap::Automorphism(m) => Ok(m.eval_pair(z, defect)),
            HoloMap::Blaschke(b) => Ok(b.eval_pair(z, defect)),
            HoloMap::Flow(f) => f.eval_pair(z),
            HoloMap::Composition(maps) => {
                let mut acc = (z, defect);
                for m in maps.iter().rev() {
                    acc = m.eval_pair(acc.0, acc.1)?;
                }
                Ok(acc)
            }
        }
    }

    /// `f'(z)`: exact for closed forms, finite differences for flows.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        check_interior(z)?;
        self.derivative_unchecked(z)
    }

    fn derivative_unchecked(&self, z: Complex64) -> Result<Complex64> {
        match self {
            HoloMap::Identity => Ok(Complex64::new(1.0, 0.0)),
            HoloMap::Automorphism(m) => Ok(m.derivative(z)),
            HoloMap::Blaschke(b) => Ok(b.derivative(z)),
            HoloMap::Flow(f) => f.derivative(z),
            HoloMap::Composition(maps) => {
                let (mut w, mut d) = (z, Complex64::new(1.0, 0.0));
                let mut defect = 1.0 - z.norm_sqr();
                for m in maps.iter().rev() {
                    d *= m.derivative_unchecked(w)?;
                    (w, defect) = m.eval_pair(w, defect)?;
                }
                Ok(d)
            }
        }
    }

    /// Whether every constituent has a closed form (no flows).
    pub fn is_closed_form(&self) -> bool {
        match self {
            HoloMap::Flow(_) => false,
            HoloMap::Composition(maps) => maps.iter().all(HoloMap::is_closed_form),
            _ => true,
        }
    }

    /// Absolute accuracy floor of evaluation near the circle.
    pub fn noise_floor(&self) -> f64 {
        match self {
            HoloMap::Flow(f) => 1e3 * f.options.rtol,
            HoloMap::Composition(maps) => maps.iter().map(HoloMap::noise_floor).fold(0.0, f64::max),
            _ => 0.0,
        }
    }

    /// Whether the map is univalent (one-to-one).
    pub fn is_univalent(&self) -> bool {
        match self {
            HoloMap::Identity | HoloMap::Automorphism(_) | HoloMap::Flow(_) => true,
            HoloMap::Blaschke(b) => b.degree() == 1,
            HoloMap::Composition(maps) => maps.iter().all(HoloMap::is_univalent),
        }
    }

    /// The map as a finite Blaschke product, when it is one.
    pub fn as_blaschke(&self) -> Result<Option<Blaschke>> {
        Ok(Some(match self {
            HoloMap::Identity => Blaschke::new(vec![Complex64::new(0.0, 0.0)], CirclePoint::ONE)?,
            HoloMap::Automorphism(m) => Blaschke::new(vec![m.a], m.rotation)?,
            HoloMap::Blaschke(b) => b.clone(),
            HoloMap::Flow(_) => return Ok(None),
            HoloMap::Composition(maps) => {
                let mut parts = Vec::with_capacity(maps.len());
                for m in maps {
                    match m.as_blaschke()? {
                        Some(b) => parts.push(b),
                        None => return Ok(None),
                    }
                }
                let mut acc = parts.pop().expect("nonempty composition");
                while let Some(outer) = parts.pop() {
                    acc = outer.compose(&acc)?;
                }
                acc
            }
        }))
    }
}

/// JSON description of a map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MapSpec {
    Identity,
    Blaschke {
        zeros: Vec<[f64; 2]>,
        #[serde(default)]
        rotation: f64,
    },
    Automorphism {
        a: [f64; 2],
        #[serde(default)]
        rotation: f64,
    },
    Flow {
        generator: GeneratorSpec,
        t: f64,
    },
    Composition {
        maps: Vec<MapSpec>,
    },
}

impl TryFrom<MapSpec> for HoloMap {
    type Error = Error;

    fn try_from(spec: MapSpec) -> Result<Self> {
        match spec {
            MapSpec::Identity => Ok(HoloMap::Identity),
            MapSpec::Blaschke { zeros, rotation } => HoloMap::blaschke(
                zeros.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
                CirclePoint::new(rotation)?,
            ),
            MapSpec::Automorphism { a: [re, im], rotation } => {
                HoloMap::automorphism(Complex64::new(re, im), CirclePoint::new(rotation)?)
            }
            MapSpec::Flow { generator, t } => HoloMap::flow(Generator::try_from(generator)?, t),
            MapSpec::Composition { maps } => {
                HoloMap::composition(maps.into_iter().map(HoloMap::try_from).collect::<Result<_>>()?)
            }
        }
    }
}

impl From<HoloMap> for MapSpec {
    fn from(map: HoloMap) -> Self {
        match map {
            HoloMap::Identity => MapSpec::Identity,
            HoloMap::Automorphism(m) => MapSpec::Automorphism { a: [m.a.re, m.a.im], rotation: m.rotation.angle() },
            HoloMap::Blaschke(b) => MapSpec::Blaschke {
                zeros: b.zeros().iter().map(|z| [z.re, z.im]).collect(),
                rotation: b.rotation().angle(),
            },
            HoloMap::Flow(f) => MapSpec::Flow { generator: (*f.generator).clone().into(), t: f.t },
            HoloMap::Composition(maps) => MapSpec::Composition { maps: maps.into_iter().map(MapSpec::from).collect() },
        }
    }
}

pub(crate) fn check_parameter(a: Complex64) -> Result<()> {
    if !a.is_finite() || a.norm() > 1.0 - ZERO_MARGIN {
        return Err(Error::Domain(format!("parameter {a} is not strictly inside the disc")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::pseudo_hyperbolic;
    use crate::semigroup::canonical;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `z ↦ (z + 1/2)/(1 + z/2)`, i.e. parameter `a = -1/2`.
    fn auto_half() -> HoloMap {
        HoloMap::automorphism(c(-0.5, 0.0), CirclePoint::ONE).unwrap()
    }

    #[test]
    fn eval_examples() {
        let z = c(0.3, 0.4);
        assert_eq!(HoloMap::Identity.eval(z).unwrap(), z);
        let sq = HoloMap::power(2).unwrap();
        assert!((sq.eval(z).unwrap() - z * z).norm() < 1e-15);
        assert!((auto_half().eval(c(0.0, 0.0)).unwrap() - 0.5).norm() < 1e-15);
        assert!(sq.eval(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn derivative_examples() {
        let sq = HoloMap::power(2).unwrap();
        assert!((sq.derivative(c(0.5, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        let m = HoloMap::automorphism(c(0.5, 0.0), CirclePoint::ONE).unwrap();
        assert!((m.derivative(c(0.0, 0.0)).unwrap() - 0.75).norm() < 1e-15);
        let comp = HoloMap::composition(vec![sq.clone(), sq]).unwrap();
        assert!((comp.derivative(c(0.5, 0.0)).unwrap() - 0.5).norm() < 1e-15);
    }

    #[test]
    fn flow_derivative_matches_closed_form() {
        // hyperbolic flow in the Cayley chart: w ↦ e^t w, so
        // φ_t(z) = ((1+z)e^t - (1-z)) / ((1+z)e^t + (1-z))
        let f = HoloMap::flow(canonical::hyperbolic(), 1.0).unwrap();
        let e = 1f64.exp();
        for z in [c(0.0, 0.0), c(0.3, -0.5), c(-0.8, 0.1)] {
            let num = (1.0 + z) * e - (1.0 - z);
            let den = (1.0 + z) * e + (1.0 - z);
            let exact = 4.0 * e / (den * den);
            assert!((f.eval(z).unwrap() - num / den).norm() < 1e-9);
            assert!((f.derivative(z).unwrap() - exact).norm() < 1e-6, "{z}");
        }
    }

    #[test]
    fn blaschke_defect_is_accurate_near_the_circle() {
        let b = HoloMap::blaschke(vec![c(0.3, 0.2), c(-0.5, 0.0)], CirclePoint::ONE).unwrap();
        let h = 1e-13;
        let zeta = CirclePoint::new(0.7).unwrap().to_complex();
        let (_, d) = b.eval_pair((1.0 - h) * zeta, h * (2.0 - h)).unwrap();
        // 1 - |B|² ≈ 2h Σ (1 - |a|²)/|ζ - a|²
        let dil: f64 = [c(0.3, 0.2), c(-0.5, 0.0)].iter().map(|a| (1.0 - a.norm_sqr()) / (zeta - a).norm_sqr()).sum();
        assert!((d / (2.0 * h) - dil).abs() < 1e-9 * dil);
    }

    #[test]
    fn schwarz_pick_contraction() {
        let maps = vec![
            HoloMap::Identity,
            auto_half(),
            HoloMap::automorphism(c(0.2, -0.6), CirclePoint::new(1.0).unwrap()).unwrap(),
            HoloMap::power(3).unwrap(),
            HoloMap::blaschke(vec![c(0.1, 0.5), c(-0.3, -0.3)], CirclePoint::new(2.0).unwrap()).unwrap(),
            HoloMap::flow(canonical::parabolic(), 0.7).unwrap(),
            HoloMap::flow(canonical::mixed(), 0.3).unwrap(),
            HoloMap::composition(vec![auto_half(), HoloMap::power(2).unwrap()]).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for f in &maps {
            for _ in 0..200 {
                let z = Complex64::from_polar(rng.gen::<f64>().sqrt() * 0.99, rng.gen_range(0.0..TAU));
                let w = Complex64::from_polar(rng.gen::<f64>().sqrt() * 0.99, rng.gen_range(0.0..TAU));
                let before = pseudo_hyperbolic(z, w);
                let after = pseudo_hyperbolic(f.eval(z).unwrap(), f.eval(w).unwrap());
                assert!(after <= before + 1e-10, "{f:?}: {after} > {before}");
            }
        }
    }

    #[test]
    fn construction_validates() {
        assert!(HoloMap::automorphism(c(1.0, 0.0), CirclePoint::ONE).is_err());
        assert!(HoloMap::blaschke(vec![c(0.0, 0.999_999_999_999_9)], CirclePoint::ONE).is_err());
        assert!(HoloMap::flow(canonical::hyperbolic(), -1.0).is_err());
        assert!(HoloMap::composition(vec![]).is_err());
    }

    #[test]
    fn composition_collapses_to_blaschke() {
        let comp = HoloMap::composition(vec![auto_half(), HoloMap::power(2).unwrap()]).unwrap();
        let b = comp.as_blaschke().unwrap().unwrap();
        assert_eq!(b.degree(), 2);
        let bm = HoloMap::Blaschke(b);
        for z in [c(0.1, 0.2), c(-0.7, 0.3), c(0.0, -0.9)] {
            assert!((bm.eval(z).unwrap() - comp.eval(z).unwrap()).norm() < 1e-12);
        }
        assert!(HoloMap::flow(canonical::parabolic(), 1.0).unwrap().as_blaschke().unwrap().is_none());
    }

    #[test]
    fn map_spec_json() {
        let cases = [
            (r#"{"type":"identity"}"#, c(0.2, 0.1), c(0.2, 0.1)),
            (r#"{"type":"blaschke","zeros":[[0,0],[0,0]],"rotation":0}"#, c(0.5, 0.0), c(0.25, 0.0)),
            (r#"{"type":"automorphism","a":[-0.5,0],"rotation":0}"#, c(0.0, 0.0), c(0.5, 0.0)),
            (
                r#"{"type":"flow","generator":{"tau":0,"lambda":0,"p":{"density":{"constant":1}}},"t":1}"#,
                c(0.0, 0.0),
                c(0.5, 0.0),
            ),
            (
                r#"{"type":"composition","maps":[{"type":"blaschke","zeros":[[0,0],[0,0]]},{"type":"blaschke","zeros":[[0,0],[0,0]]}]}"#,
                c(0.5, 0.0),
                c(0.0625, 0.0),
            ),
        ];
        for (text, z, expect) in cases {
            let m: HoloMap = serde_json::from_str(text).unwrap();
            assert!((m.eval(z).unwrap() - expect).norm() < 1e-9, "{text}");
            let again: HoloMap = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
            assert_eq!(again, m);
        }
        assert!(serde_json::from_str::<HoloMap>(r#"{"type":"automorphism","a":[2,0]}"#).is_err());
        assert!(serde_json::from_str::<HoloMap>(r#"{"type":"mobius"}"#).is_err());
    }
}
