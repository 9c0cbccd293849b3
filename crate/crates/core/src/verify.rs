//! Self-verification suite: every check compares a computed value against a
//! closed-form expectation and records the outcome as one report row.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clark::{
    clark_measure, cowen_pommerenke, nevanlinna_atoms, nevanlinna_consistency, singular_mass_preimage, SINGULAR_K_MAX,
};
use crate::config::RunConfig;
use crate::derivative::{derivative_convergence, mu_limit_density, sigma_ac_mass_limit};
use crate::disc::{CirclePoint, SignedBoundaryMeasure};
use crate::error::{Error, Result};
use crate::maps::{boundary_dilatation, HoloMap};
use crate::semigroup::{
    berkson_porta_check, brfp_analyze, canonical, decompose, dilatation_check, flow, semigroup_law_check, Generator,
    SampleGrid,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|computed - expected| ≤ tolerance`
    Approx,
    /// `computed ≤ expected + tolerance`
    AtMost,
    /// `computed ≥ expected - tolerance`
    AtLeast,
    /// `computed < expected`
    Below,
}

impl Relation {
    fn holds(self, computed: f64, expected: f64, tol: f64) -> bool {
        match self {
            Relation::Approx => (computed - expected).abs() <= tol,
            Relation::AtMost => computed <= expected + tol,
            Relation::AtLeast => computed >= expected - tol,
            Relation::Below => computed < expected,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: String,
    /// The mathematical statement being exercised.
    pub anchor: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: Suite,
    pub rows: Vec<CheckRow>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Mass,
    Nevanlinna,
    SingularMass,
    CowenPommerenke,
    Flow,
    SemigroupLaw,
    Dilatation,
    Derivative,
    AcMass,
    LimitDensity,
    Decompose,
    BerksonPorta,
    All,
}

impl Suite {
    pub const EACH: [Suite; 12] = [
        Suite::Mass,
        Suite::Nevanlinna,
        Suite::SingularMass,
        Suite::CowenPommerenke,
        Suite::Flow,
        Suite::SemigroupLaw,
        Suite::Dilatation,
        Suite::Derivative,
        Suite::AcMass,
        Suite::LimitDensity,
        Suite::Decompose,
        Suite::BerksonPorta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Mass => "mass",
            Suite::Nevanlinna => "nevanlinna",
            Suite::SingularMass => "singular-mass",
            Suite::CowenPommerenke => "cowen-pommerenke",
            Suite::Flow => "flow",
            Suite::SemigroupLaw => "semigroup-law",
            Suite::Dilatation => "dilatation",
            Suite::Derivative => "derivative",
            Suite::AcMass => "ac-mass",
            Suite::LimitDensity => "limit-density",
            Suite::Decompose => "decompose",
            Suite::BerksonPorta => "berkson-porta",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|suite| suite.name() == s)
            .copied()
            .ok_or_else(|| Error::Parameter(format!("unknown suite {s:?}")))
    }
}

struct Rows<'a> {
    cfg: &'a RunConfig,
    rows: Vec<CheckRow>,
}

impl Rows<'_> {
    fn push(&mut self, check: &str, anchor: &str, relation: Relation, expected: f64, tol: f64, computed: Result<f64>) {
        let (computed, error) = match computed {
            Ok(v) => (v, None),
            Err(e) => (f64::NAN, Some(e.to_string())),
        };
        let pass = error.is_none() && relation.holds(computed, expected, tol);
        self.rows.push(CheckRow {
            check: check.to_string(),
            anchor: anchor.to_string(),
            computed,
            expected,
            tolerance: tol,
            relation,
            pass,
            error,
        });
    }

    fn approx(&mut self, check: &str, anchor: &str, expected: f64, tol: f64, computed: Result<f64>) {
        self.push(check, anchor, Relation::Approx, expected, tol, computed);
    }

    fn flag(&mut self, check: &str, anchor: &str, expected: bool, computed: Result<bool>) {
        let b = |x: bool| if x { 1.0 } else { 0.0 };
        self.push(check, anchor, Relation::Approx, b(expected), 0.0, computed.map(b));
    }
}

/// 16 probes in `|z| ≤ 0.9` drawn from the configured seed.
pub fn seeded_probes(seed: u64, count: usize, max_radius: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = max_radius * rng.gen::<f64>().sqrt();
            Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect()
}

/// `z ↦ (z + 1/2)/(1 + z/2)`.
pub fn auto_half() -> HoloMap {
    HoloMap::automorphism(Complex64::new(-0.5, 0.0), CirclePoint::ONE).expect("valid automorphism")
}

fn cayley(z: Complex64) -> Complex64 {
    (1.0 + z) / (1.0 - z)
}

fn cayley_inv(w: Complex64) -> Complex64 {
    (w - 1.0) / (w + 1.0)
}

fn point(angle: f64) -> CirclePoint {
    CirclePoint::new(angle).expect("finite angle")
}

pub fn run(suite: Suite, cfg: &RunConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let mut rows = Rows { cfg, rows: Vec::new() };
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    for s in suites {
        match s {
            Suite::Mass => mass(&mut rows),
            Suite::Nevanlinna => nevanlinna(&mut rows),
            Suite::SingularMass => singular(&mut rows),
            Suite::CowenPommerenke => cp(&mut rows),
            Suite::Flow => flows(&mut rows),
            Suite::SemigroupLaw => semigroup_law(&mut rows),
            Suite::Dilatation => dilatation(&mut rows),
            Suite::Derivative => derivative(&mut rows),
            Suite::AcMass => ac_mass(&mut rows),
            Suite::LimitDensity => limit_density(&mut rows),
            Suite::Decompose => decomposition(&mut rows),
            Suite::BerksonPorta => berkson_porta(&mut rows),
            Suite::All => unreachable!("expanded above"),
        }
    }
    let pass = rows.rows.iter().all(|r| r.pass);
    Ok(VerificationReport { suite, rows: rows.rows, pass })
}

fn mass_test_maps() -> Vec<(&'static str, HoloMap)> {
    let flow = |g: Generator| HoloMap::flow(g, 1.0).expect("valid flow");
    vec![
        ("identity", HoloMap::Identity),
        ("z^2", HoloMap::power(2).expect("valid")),
        ("z^3", HoloMap::power(3).expect("valid")),
        ("auto_half", auto_half()),
        ("hyperbolic flow t=1", flow(canonical::hyperbolic())),
        ("parabolic flow t=1", flow(canonical::parabolic())),
        ("mixed flow t=1", flow(canonical::mixed())),
    ]
}

fn mass(rows: &mut Rows) {
    let (n, radial) = (rows.cfg.grid_size, rows.cfg.radial());
    for (name, f) in mass_test_maps() {
        let m = clark_measure(&f, CirclePoint::ONE, n, &radial);
        rows.approx(
            &format!("mass residual of {name}"),
            "total mass of the Clark measure equals Re((τ+f(0))/(τ-f(0)))",
            0.0,
            1e-4,
            m.as_ref().map(|m| m.mass_residual).map_err(Clone::clone),
        );
        let probes = seeded_probes(rows.cfg.seed, 24, 0.9);
        rows.approx(
            &format!("Poisson reconstruction of {name}"),
            "Poisson integral of the Clark measure",
            0.0,
            1e-4,
            m.and_then(|m| m.reconstruction_error(&probes)),
        );
    }
}

fn nevanlinna(rows: &mut Rows) {
    let radial = rows.cfg.radial();
    let anchor = "Nevanlinna: atoms at contact points with mass 1/|f'(ζ)|";
    let sq = HoloMap::power(2).expect("valid");
    let atoms = nevanlinna_atoms(&sq, CirclePoint::ONE, &radial);
    rows.approx("z^2 atom count", anchor, 2.0, 0.0, atoms.as_ref().map(|a| a.len() as f64).map_err(Clone::clone));
    for (label, angle) in [("1", 0.0), ("-1", PI)] {
        let mass = atoms
            .as_ref()
            .map_err(Clone::clone)
            .map(|a| a.iter().filter(|x| x.location.distance(point(angle)) < 1e-9).map(|x| x.mass).sum());
        rows.approx(&format!("z^2 atom at {label}"), anchor, 0.5, 1e-4, mass);
    }
    let f = auto_half();
    let atoms = nevanlinna_atoms(&f, CirclePoint::ONE, &radial);
    rows.approx(
        "auto_half atom count",
        "univalent maps have at most one atom",
        1.0,
        0.0,
        atoms.as_ref().map(|a| a.len() as f64).map_err(Clone::clone),
    );
    rows.approx(
        "auto_half atom at 1",
        anchor,
        3.0,
        1e-4,
        atoms.as_ref().map(|a| a.first().map_or(f64::NAN, |x| x.mass)).map_err(Clone::clone),
    );
    for (name, f) in [("z^2", sq), ("auto_half", f)] {
        let worst =
            nevanlinna_atoms(&f, CirclePoint::ONE, &radial).and_then(|a| nevanlinna_consistency(&f, &a, &radial));
        rows.approx(&format!("{name} mass times dilatation"), anchor, 0.0, 1e-5, worst);
    }
    let hyp = HoloMap::flow(canonical::hyperbolic(), 0.5).expect("valid flow");
    let atoms = nevanlinna_atoms(&hyp, CirclePoint::ONE, &radial);
    rows.approx(
        "hyperbolic flow atom at τ",
        anchor,
        0.5f64.exp(),
        1e-4,
        atoms.map(|a| a.first().map_or(f64::NAN, |x| x.mass)),
    );
}

fn singular(rows: &mut Rows) {
    let anchor = "singular mass as the limit of Σ log|w| / log|z_n| over preimages";
    let cases = [
        ("z^2, τ = 1", HoloMap::power(2).expect("valid"), CirclePoint::ONE, 1.0),
        ("auto_half, τ = 1", auto_half(), CirclePoint::ONE, 3.0),
        ("z^2, τ = i", HoloMap::power(2).expect("valid"), point(FRAC_PI_2), 1.0),
        ("z^3, τ = -1", HoloMap::power(3).expect("valid"), point(PI), 1.0),
    ];
    for (name, f, tau, expected) in cases {
        let est = singular_mass_preimage(&f, tau, SINGULAR_K_MAX).map(|s| s.value);
        rows.approx(&format!("preimage singular mass of {name}"), anchor, expected, 1e-3, est.clone());
        let atoms: Result<f64> = nevanlinna_atoms(&f, tau, &rows.cfg.radial()).map(|a| a.iter().map(|x| x.mass).sum());
        let gap = est.and_then(|e| atoms.map(|a| (e - a).abs()));
        rows.approx(&format!("preimage mass equals atom sum for {name}"), anchor, 0.0, 1e-3, gap);
    }
}

fn cp(rows: &mut Rows) {
    let radial = rows.cfg.radial();
    let anchor = "Cowen–Pommerenke inequality Σ 1/|f'(ζ_j)| ≤ Re((τ+f(0))/(τ-f(0)))";
    let flow = |g: Generator| HoloMap::flow(g, 1.0).expect("valid flow");
    let cases = [
        ("z^2 with {1, -1}", HoloMap::power(2).expect("valid"), vec![0.0, PI], true),
        ("z^2 with {1}", HoloMap::power(2).expect("valid"), vec![0.0], false),
        ("auto_half with {1}", auto_half(), vec![0.0], true),
        ("identity with {1}", HoloMap::Identity, vec![0.0], true),
        ("z^3 with two of three points", HoloMap::power(3).expect("valid"), vec![0.0, 2.0 * PI / 3.0], false),
        ("parabolic flow with {1}", flow(canonical::parabolic()), vec![0.0], false),
    ];
    for (name, f, pts, equality) in cases {
        let pts: Vec<CirclePoint> = pts.into_iter().map(point).collect();
        let report = cowen_pommerenke(&f, CirclePoint::ONE, &pts, &radial);
        rows.push(
            &format!("lhs - rhs for {name}"),
            anchor,
            Relation::AtMost,
            0.0,
            1e-9,
            report.as_ref().map(|r| r.lhs - r.rhs).map_err(Clone::clone),
        );
        rows.flag(&format!("equality flag for {name}"), anchor, equality, report.map(|r| r.equality));
    }
}

/// Closed-form flows in the Cayley chart `w = (1+z)/(1-z)`.
pub fn closed_form_flow(name: &str, t: f64, z: Complex64) -> Complex64 {
    let w = cayley(z);
    let wt = match name {
        "hyperbolic" => t.exp() * w,
        "parabolic" => w + 2.0 * t,
        "mixed" => (w + 2.0) * t.exp() - 2.0,
        other => panic!("no closed form for {other}"),
    };
    cayley_inv(wt)
}

fn flows(rows: &mut Rows) {
    let opts = rows.cfg.flow_options();
    let probes = seeded_probes(rows.cfg.seed, 16, 0.9);
    for name in ["hyperbolic", "parabolic"] {
        let g = canonical::by_name(name).expect("canonical generator");
        for t in [0.25, 1.0, 2.0] {
            let worst = probes.iter().try_fold(0.0f64, |acc, &z| {
                Ok(acc.max((flow(&g, t, z, &opts)?.value - closed_form_flow(name, t, z)).norm()))
            });
            rows.approx(&format!("{name} flow vs closed form, t = {t}"), "∂φ_t/∂t = G(φ_t)", 0.0, 1e-8, worst);
        }
    }
}

fn semigroup_law(rows: &mut Rows) {
    let opts = rows.cfg.flow_options();
    let probes = seeded_probes(rows.cfg.seed, 16, 0.9);
    for name in ["hyperbolic", "parabolic", "mixed"] {
        let g = canonical::by_name(name).expect("canonical generator");
        let mut worst: Result<f64> = Ok(0.0);
        for s in [0.1, 0.5, 1.0] {
            for t in [0.1, 0.5, 1.0] {
                worst = worst.and_then(|w| Ok(w.max(semigroup_law_check(&g, s, t, &probes, &opts)?)));
            }
        }
        rows.approx(&format!("{name} semigroup law"), "φ_{s+t} = φ_s ∘ φ_t", 0.0, 1e-7, worst);
    }
}

fn dilatation(rows: &mut Rows) {
    let (n, radial, opts) = (rows.cfg.grid_size, rows.cfg.radial(), rows.cfg.flow_options());
    let anchor = "univalent flows: dilatation e^{λt} and singular part e^{-λt}δ_τ";
    let g = canonical::hyperbolic();
    for t in [0.1, 0.5, 1.0] {
        let d = dilatation_check(&g, CirclePoint::ONE, t, &radial, &opts).map(|d| d.measured);
        rows.approx(&format!("hyperbolic dilatation, t = {t}"), anchor, (-t).exp(), 1e-4, d);
        let f = HoloMap::flow_with(g.clone(), t, opts);
        let m = f.and_then(|f| clark_measure(&f, CirclePoint::ONE, n, &radial));
        rows.approx(
            &format!("hyperbolic Clark atom, t = {t}"),
            anchor,
            t.exp(),
            1e-4,
            m.as_ref().map(|m| m.measure.mass_at(CirclePoint::ONE)).map_err(Clone::clone),
        );
        rows.approx(
            &format!("hyperbolic Clark singular part off τ, t = {t}"),
            anchor,
            0.0,
            1e-4,
            m.map(|m| m.measure.atom_mass() - m.measure.mass_at(CirclePoint::ONE)),
        );
    }
    let anchor = "atom of ν at τ: dilatation e^{(λ+β)t} with β = -2ν({τ})";
    let g = canonical::atom_at_tau();
    rows.approx(
        "λ estimate with ν({τ}) = 1/2",
        anchor,
        -1.0,
        1e-6,
        brfp_analyze(&g, CirclePoint::ONE, &radial).map(|b| b.lambda_est),
    );
    for t in [0.25, 0.5, 1.0] {
        let f = HoloMap::flow_with(g.clone(), t, opts);
        let d = f.and_then(|f| boundary_dilatation(&f, CirclePoint::ONE, &radial));
        rows.approx(&format!("dilatation with ν({{τ}}) = 1/2, t = {t}"), anchor, (-t).exp(), 1e-4, d);
    }
    let g = canonical::mixed();
    for t in [0.25, 1.0] {
        let d = dilatation_check(&g, CirclePoint::ONE, t, &radial, &opts).map(|d| d.measured);
        rows.approx(&format!("mixed dilatation, t = {t}"), anchor, (g.dilatation_exponent() * t).exp(), 1e-4, d);
    }
}

fn derivative(rows: &mut Rows) {
    let (n, radial) = (rows.cfg.grid_size, rows.cfg.radial());
    let family = match rows.cfg.family() {
        Ok(f) => f,
        Err(e) => {
            rows.approx("test family", "weak* convergence σ_t → -λδ_τ + μ", 0.0, 0.0, Err(e));
            return;
        }
    };
    let anchor = "weak* convergence σ_t → -λδ_τ + μ";
    for name in ["hyperbolic", "parabolic"] {
        let g = canonical::by_name(name).expect("canonical generator");
        let rep = derivative_convergence(&g, &rows.cfg.schedule(), &family, n, &radial);
        rows.flag(
            &format!("{name} weak* errors decrease"),
            anchor,
            true,
            rep.as_ref().map(|r| r.monotone).map_err(Clone::clone),
        );
        rows.push(
            &format!("{name} extrapolated weak* error"),
            anchor,
            Relation::AtMost,
            0.0,
            1e-3,
            rep.as_ref().map(|r| r.extrapolated_limit_error).map_err(Clone::clone),
        );
        rows.flag(&format!("{name} atom of σ_t equals (e^{{-λt}}-1)/t"), anchor, true, rep.map(|r| r.atom_exact));
    }
}

fn ac_mass(rows: &mut Rows) {
    let (n, radial) = (rows.cfg.grid_size, rows.cfg.radial());
    let anchor = "lim ‖σ_t^a‖ = 2 Re G(0) + λ";
    for (name, expected) in [("hyperbolic", 0.0), ("parabolic", 2.0), ("zero", 0.0)] {
        let g = canonical::by_name(name).expect("canonical generator");
        let lim = sigma_ac_mass_limit(&g, &rows.cfg.schedule(), n, &radial);
        rows.approx(&format!("{name} AC mass limit"), anchor, expected, 1e-3, lim.map(|l| l.limit));
    }
}

fn limit_density(rows: &mut Rows) {
    let (n, radial) = (rows.cfg.grid_size, rows.cfg.radial());
    let anchor = "limit density 2 Re[G(ξ)τ/(τ-ξ)²]";
    for (name, expected) in [("parabolic", 2.0), ("hyperbolic", 0.0)] {
        let g = canonical::by_name(name).expect("canonical generator");
        let sup = mu_limit_density(&g, n, &radial).map(|m| {
            // the sample at τ itself is interpolated
            m.measure
                .density()
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != 0)
                .map(|(_, d)| (d - expected).abs())
                .fold(0.0, f64::max)
        });
        rows.approx(&format!("{name} limit density sup-norm error"), anchor, 0.0, 1e-4, sup);
    }
    let g = canonical::mixed();
    let re_g0 = g.eval(Complex64::new(0.0, 0.0)).map(|g0| g0.re).unwrap_or(f64::NAN);
    let limit = mu_limit_density(&g, n, &radial);
    rows.approx(
        "mixed limit ‖μ‖",
        "lim ‖σ_t^a‖ = 2 Re G(0) + λ",
        2.0 * re_g0 + g.dilatation_exponent(),
        1e-3,
        limit.as_ref().map(|m| m.measure.total_mass()).map_err(Clone::clone),
    );
    rows.approx(
        "mixed limit mass -λ + ‖μ‖",
        "total mass of σ_t tends to 2 Re G(0)",
        2.0 * re_g0,
        1e-3,
        limit.map(|m| m.measure.total_mass() - m.lambda),
    );
}

fn decomposition(rows: &mut Rows) {
    let radial = rows.cfg.radial();
    let grid = SampleGrid::default();
    let anchor = "unique decomposition G = (τ̄z-1)(z-τ)[p - (λ/2)(τ+z)/(τ-z)]";
    let configs: [(&str, SignedBoundaryMeasure, f64); 3] = [
        ("ν = 0, λ = -1", SignedBoundaryMeasure::zero(), -1.0),
        ("ν = m, λ = 0", SignedBoundaryMeasure::lebesgue(rows.cfg.grid_size), 0.0),
        ("ν = m, λ = -1", SignedBoundaryMeasure::lebesgue(rows.cfg.grid_size), -1.0),
    ];
    for (name, nu, lambda) in configs {
        let g = match Generator::new(nu, 0.0, CirclePoint::ONE, lambda) {
            Ok(g) => g,
            Err(e) => {
                rows.approx(&format!("build {name}"), anchor, 0.0, 0.0, Err(e));
                continue;
            }
        };
        let d = decompose(&g, CirclePoint::ONE, &grid, &radial);
        rows.approx(&format!("λ of {name}"), anchor, lambda, 1e-6, d.as_ref().map(|d| d.lambda).map_err(Clone::clone));
        let p_err = d
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|d| d.samples.iter().try_fold(0.0f64, |acc, &(z, p)| Ok(acc.max((p - g.p(z)?).norm()))));
        rows.approx(&format!("p of {name}"), anchor, 0.0, 1e-8, p_err);
        rows.push(&format!("min Re p of {name}"), anchor, Relation::AtLeast, 0.0, 1e-9, d.map(|d| d.min_re_p));
    }
}

fn berkson_porta(rows: &mut Rows) {
    let grid = SampleGrid::dense();
    let anchor = "Berkson–Porta: Re[G/((τ̄z-1)(z-τ))] ≥ 0 at the Denjoy–Wolff point";
    for name in ["hyperbolic", "parabolic", "mixed", "atom-at-tau"] {
        let g = canonical::by_name(name).expect("canonical generator");
        let m = berkson_porta_check(&g, CirclePoint::ONE, &grid);
        rows.push(&format!("{name} Berkson–Porta minimum"), anchor, Relation::AtLeast, 0.0, 1e-9, Ok(m));
    }
    let m = berkson_porta_check(&canonical::repelling(), CirclePoint::ONE, &grid);
    rows.push("repelling Berkson–Porta minimum", anchor, Relation::Below, 0.0, 0.0, Ok(m));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.iter().chain(std::iter::once(&Suite::All)) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn relations() {
        assert!(Relation::Approx.holds(1.0, 1.0 + 1e-10, 1e-9));
        assert!(!Relation::Approx.holds(f64::NAN, 0.0, 1.0));
        assert!(Relation::AtMost.holds(1.0, 1.0, 0.0));
        assert!(Relation::AtLeast.holds(-1e-10, 0.0, 1e-9));
        assert!(!Relation::Below.holds(0.0, 0.0, 1.0));
    }

    #[test]
    fn probes_are_seeded() {
        let a = seeded_probes(7, 16, 0.9);
        assert_eq!(a, seeded_probes(7, 16, 0.9));
        assert_ne!(a, seeded_probes(8, 16, 0.9));
        assert!(a.iter().all(|z| z.norm() <= 0.9));
    }

    #[test]
    fn closed_form_flows_at_origin() {
        let e = std::f64::consts::E;
        assert!(
            (closed_form_flow("hyperbolic", 1.0, Complex64::new(0.0, 0.0)).re - (e - 1.0) / (e + 1.0)).abs() < 1e-15
        );
        assert!((closed_form_flow("parabolic", 1.0, Complex64::new(0.0, 0.0)).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cheap_suites_pass() {
        let cfg = RunConfig { grid_size: 128, ..RunConfig::default() };
        for suite in
            [Suite::Nevanlinna, Suite::SingularMass, Suite::CowenPommerenke, Suite::BerksonPorta, Suite::Decompose]
        {
            let rep = run(suite, &cfg).unwrap();
            let failed: Vec<_> = rep.failures().collect();
            assert!(rep.pass, "{suite}: {failed:#?}");
        }
    }
}
