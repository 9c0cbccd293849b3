//! Aleksandrov–Clark measures `μ_{f,τ}`, defined by
//! `Re((τ + f(z))/(τ - f(z))) = ∫ P(ζ, z) dμ_{f,τ}(ζ)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::disc::{check_interior, Atom, BoundaryMeasure, CirclePoint};
use crate::error::{Error, Result};
use crate::limits::{extrapolate_real, Radial};
use crate::maps::{angular_derivative, boundary_report, contact_points, schedule_for, HoloMap, CONTACT_TOL};

/// Mass residual above which the result is flagged incomplete.
pub const INCOMPLETE_RESIDUAL: f64 = 1e-2;

/// Density samples within this many grid cells of an atom are interpolated.
const ATOM_EXCLUSION_CELLS: f64 = 3.0;

/// Equality tolerance in the Cowen–Pommerenke inequality.
pub const CP_EQUALITY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClarkFlag {
    /// The mass residual exceeds [`INCOMPLETE_RESIDUAL`]: part of the
    /// singular measure may have been missed.
    Incomplete,
    /// Some density samples did not settle.
    Nonconvergent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClarkMeasure {
    pub measure: BoundaryMeasure,
    pub source_map: HoloMap,
    pub tau: CirclePoint,
    pub total_mass: f64,
    pub mass_residual: f64,
    pub flags: Vec<ClarkFlag>,
    /// Grid indices whose radial limit did not converge.
    pub nonconvergent: Vec<usize>,
}

#[derive(Serialize)]
struct ClarkMeasureJson<'a> {
    atoms: &'a [Atom],
    density: &'a [f64],
    grid_size: usize,
    tau: CirclePoint,
    total_mass: f64,
    mass_residual: f64,
    flags: &'a [ClarkFlag],
    nonconvergent: &'a [usize],
}

impl Serialize for ClarkMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ClarkMeasureJson {
            atoms: self.measure.atoms(),
            density: self.measure.density(),
            grid_size: self.measure.grid_size(),
            tau: self.tau,
            total_mass: self.total_mass,
            mass_residual: self.mass_residual,
            flags: &self.flags,
            nonconvergent: &self.nonconvergent,
        }
        .serialize(s)
    }
}

impl ClarkMeasure {
    pub fn is_incomplete(&self) -> bool {
        self.flags.contains(&ClarkFlag::Incomplete)
    }

    /// Largest deviation between the Poisson integral of the measure and
    /// `Re((τ + f(z))/(τ - f(z)))` over the probes.
    pub fn reconstruction_error(&self, probes: &[Complex64]) -> Result<f64> {
        let mut worst = 0.0f64;
        for &z in probes {
            let target = clark_harmonic(&self.source_map, self.tau, z)?;
            worst = worst.max((self.measure.poisson_integral(z)? - target).abs());
        }
        Ok(worst)
    }
}

/// `Re((τ + w)/(τ - w)) = (1 - |w|²)/|τ - w|²` from the pair `(w, 1 - |w|²)`.
fn clark_kernel(tau: Complex64, w: Complex64, defect: f64) -> f64 {
    defect / (tau - w).norm_sqr()
}

fn clark_harmonic(f: &HoloMap, tau: CirclePoint, z: Complex64) -> Result<f64> {
    check_interior(z)?;
    let (w, defect) = f.eval_pair(z, 1.0 - z.norm_sqr())?;
    Ok(clark_kernel(tau.to_complex(), w, defect))
}

/// `‖μ_{f,τ}‖ = Re((τ + f(0))/(τ - f(0)))`.
pub fn clark_total_mass(f: &HoloMap, tau: CirclePoint) -> Result<f64> {
    clark_harmonic(f, tau, Complex64::new(0.0, 0.0))
}

/// Points where an atom of `μ_{f,τ}` may sit, for maps that are not finite
/// Blaschke products: the boundary fixed point of a flow.
fn atom_candidates(f: &HoloMap) -> Result<Vec<CirclePoint>> {
    match f {
        HoloMap::Flow(fm) => Ok(vec![fm.generator().tau()]),
        _ => Err(Error::Unsupported("no atom candidates are known for this map".into())),
    }
}

/// Atoms `(ζ, 1/|f'(ζ)|)` at the points with `f*(ζ) = τ`.
///
/// Finite Blaschke products (and maps collapsing to one) are solved exactly;
/// flows are examined at the fixed point of their generator.
pub fn nevanlinna_atoms(f: &HoloMap, tau: CirclePoint, radial: &Radial) -> Result<Vec<Atom>> {
    if f.as_blaschke()?.is_some() {
        let mut atoms = Vec::new();
        for report in contact_points(f, tau, radial)? {
            if let Some(d) = report.angular_derivative.finite() {
                atoms.push(Atom::new(report.point, 1.0 / d.norm()));
            }
        }
        return Ok(atoms);
    }
    nevanlinna_atoms_at(f, tau, &atom_candidates(f)?, radial)
}

/// Atoms of `μ_{f,τ}` among explicit candidate points. Candidates that are
/// not contact points for `τ`, or whose dilatation diverges, are skipped.
pub fn nevanlinna_atoms_at(
    f: &HoloMap,
    tau: CirclePoint,
    candidates: &[CirclePoint],
    radial: &Radial,
) -> Result<Vec<Atom>> {
    let tol = CONTACT_TOL.max(f.noise_floor());
    let mut atoms = Vec::new();
    for &zeta in candidates {
        let report = boundary_report(f, zeta, radial)?;
        let hits = report.contact_for.is_some_and(|w| w.distance(tau) <= tol);
        if let (true, Some(d)) = (hits, report.angular_derivative.finite()) {
            atoms.push(Atom::new(zeta, 1.0 / d.norm()));
        }
    }
    Ok(atoms)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityEstimate {
    pub density: Vec<f64>,
    pub nonconvergent: Vec<usize>,
}

/// Radial limits of `Re((τ + f(rξ))/(τ - f(rξ)))` on the grid `ξ_k = e^{2πik/n}`.
///
/// Samples within three grid cells of an atom are linearly interpolated from
/// the nearest samples outside that window.
pub fn clark_density(
    f: &HoloMap,
    tau: CirclePoint,
    n: usize,
    atoms: &[Atom],
    radial: &Radial,
) -> Result<DensityEstimate> {
    if n == 0 {
        return Ok(DensityEstimate { density: Vec::new(), nonconvergent: Vec::new() });
    }
    let radial = schedule_for(f, radial);
    let window = ATOM_EXCLUSION_CELLS * TAU / n as f64;
    let excluded: Vec<bool> = (0..n)
        .map(|k| {
            let xi = CirclePoint::grid(k, n);
            atoms.iter().any(|a| a.location.distance(xi) <= window + 1e-12)
        })
        .collect();
    let t = tau.to_complex();

    let samples: Vec<Option<(f64, bool)>> = (0..n)
        .into_par_iter()
        .map(|k| {
            if excluded[k] {
                return Ok(None);
            }
            let xi = CirclePoint::grid(k, n).to_complex();
            let lim = extrapolate_real(&radial, None, |h| {
                let (w, defect) = f.eval_pair((1.0 - h) * xi, h * (2.0 - h))?;
                Ok(clark_kernel(t, w, defect))
            })?;
            let value = if lim.value.re.is_finite() { lim.value.re } else { lim.last_raw.re };
            Ok(Some((value.max(0.0), lim.converged())))
        })
        .collect::<Result<_>>()?;

    let nonconvergent =
        samples.iter().enumerate().filter_map(|(k, s)| matches!(s, Some((_, false))).then_some(k)).collect();
    let known: Vec<Option<f64>> = samples.iter().map(|s| s.map(|(v, _)| v)).collect();
    Ok(DensityEstimate { density: interpolate_gaps(&known), nonconvergent })
}

/// Fills `None` entries of a periodic sequence by linear interpolation.
pub(crate) fn interpolate_gaps(values: &[Option<f64>]) -> Vec<f64> {
    let n = values.len();
    if values.iter().all(Option::is_none) {
        return vec![0.0; n];
    }
    let mut out = vec![0.0; n];
    for k in 0..n {
        if let Some(v) = values[k] {
            out[k] = v;
            continue;
        }
        let mut left = k;
        while values[left].is_none() {
            left = (left + n - 1) % n;
        }
        let mut right = k;
        while values[right].is_none() {
            right = (right + 1) % n;
        }
        let dl = (k + n - left) % n;
        let dr = (right + n - k) % n;
        let (vl, vr) = (values[left].unwrap(), values[right].unwrap());
        out[k] = if left == right { vl } else { vl + (vr - vl) * dl as f64 / (dl + dr) as f64 };
    }
    out
}

/// Atoms plus density of `μ_{f,τ}` on an `n`-point grid, with mass accounting.
pub fn clark_measure(f: &HoloMap, tau: CirclePoint, n: usize, radial: &Radial) -> Result<ClarkMeasure> {
    let atoms = nevanlinna_atoms(f, tau, radial)?;
    let est = clark_density(f, tau, n, &atoms, radial)?;
    let measure = BoundaryMeasure::new(atoms, est.density)?;
    let total_mass = clark_total_mass(f, tau)?;
    let mass_residual = (measure.total_mass() - total_mass).abs();
    let mut flags = Vec::new();
    if mass_residual > INCOMPLETE_RESIDUAL {
        flags.push(ClarkFlag::Incomplete);
    }
    if !est.nonconvergent.is_empty() {
        flags.push(ClarkFlag::Nonconvergent);
    }
    Ok(ClarkMeasure {
        measure,
        source_map: f.clone(),
        tau,
        total_mass,
        mass_residual,
        flags,
        nonconvergent: est.nonconvergent,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularMassEstimate {
    pub value: f64,
    /// `(n, Σ log|w| / log|z_n|)` over the preimages `w` of `z_n = (1 - 2^{-n})τ`.
    pub sequence: Vec<(u32, f64)>,
}

/// Default deepest level of the preimage sequence.
pub const SINGULAR_K_MAX: u32 = 30;

/// Singular mass of `μ_{f,τ}` for a finite Blaschke product from the
/// preimages of `z_n = (1 - 2^{-n})τ`.
pub fn singular_mass_preimage(f: &HoloMap, tau: CirclePoint, k_max: u32) -> Result<SingularMassEstimate> {
    let b = f
        .as_blaschke()?
        .ok_or_else(|| Error::Unsupported("preimage singular mass needs a finite Blaschke product".into()))?;
    let radial = Radial { k_min: 4, k_max, tol: 1e-9 };
    let mut sequence = Vec::new();
    let mut n = radial.k_min;
    let lim = extrapolate_real(&radial, None, |h| {
        let z = (1.0 - h) * tau.to_complex();
        let log_z = (-h).ln_1p();
        let mut s = 0.0;
        for w in b.preimages(z)? {
            // log|w| = ½ log(1 - (1 - |w|²))
            s += 0.5 * (-(1.0 - w.norm_sqr())).ln_1p() / log_z;
        }
        sequence.push((n, s));
        n += 1;
        Ok(s)
    })?;
    let value = if lim.value.re.is_finite() { lim.value.re } else { lim.last_raw.re };
    Ok(SingularMassEstimate { value: value.max(0.0), sequence })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RejectedPoint {
    pub point: CirclePoint,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CowenPommerenkeReport {
    /// `Σ 1/|f'(ζ_j)|` over the accepted points.
    pub lhs: f64,
    /// `Re((τ + f(0))/(τ - f(0)))`.
    pub rhs: f64,
    pub equality: bool,
    pub accepted: Vec<Atom>,
    pub rejected: Vec<RejectedPoint>,
}

/// `Σ_j 1/|f'(ζ_j)| ≤ Re((τ + f(0))/(τ - f(0)))` over points with `f*(ζ_j) = τ`.
pub fn cowen_pommerenke(
    f: &HoloMap,
    tau: CirclePoint,
    points: &[CirclePoint],
    radial: &Radial,
) -> Result<CowenPommerenkeReport> {
    let tol = CONTACT_TOL.max(f.noise_floor());
    let mut accepted: Vec<Atom> = Vec::new();
    let mut rejected = Vec::new();
    for &zeta in points {
        let reject = |reason: String| RejectedPoint { point: zeta, reason };
        if accepted.iter().any(|a| a.location.distance(zeta) <= 1e-12) {
            rejected.push(reject("duplicate point".into()));
            continue;
        }
        let report = boundary_report(f, zeta, radial)?;
        match report.contact_for {
            Some(w) if w.distance(tau) <= tol => {}
            Some(w) => {
                rejected.push(reject(format!("radial limit {w} is not the target")));
                continue;
            }
            None => {
                rejected.push(reject("not a boundary contact point".into()));
                continue;
            }
        }
        match report.angular_derivative.finite() {
            Some(d) => accepted.push(Atom::new(zeta, 1.0 / d.norm())),
            None => rejected.push(reject("angular derivative is infinite".into())),
        }
    }
    let lhs: f64 = accepted.iter().map(|a| a.mass).sum();
    let rhs = clark_total_mass(f, tau)?;
    let slack = if f.is_closed_form() { 1e-9 } else { 1e-4 * rhs };
    if lhs > rhs + slack {
        return Err(Error::NumericalInconsistency(format!("Cowen–Pommerenke sum {lhs} exceeds the total mass {rhs}")));
    }
    let equality = (lhs - rhs).abs() < CP_EQUALITY_TOL.max(slack);
    Ok(CowenPommerenkeReport { lhs, rhs, equality, accepted, rejected })
}

/// Convenience check: every atom `(ζ, m)` satisfies `m |f'(ζ)| = 1`.
pub fn nevanlinna_consistency(f: &HoloMap, atoms: &[Atom], radial: &Radial) -> Result<f64> {
    let mut worst = 0.0f64;
    for a in atoms {
        let d = angular_derivative(f, a.location, radial)?.modulus();
        worst = worst.max((a.mass * d - 1.0).abs());
    }
    Ok(worst)
}
