use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;

use clarkflow::clark::{clark_measure, nevanlinna_atoms, nevanlinna_consistency, singular_mass_preimage};
use clarkflow::derivative::{mu_limit_density, sigma_t};
use clarkflow::disc::{pseudo_hyperbolic, Atom, BoundaryMeasure, CirclePoint, SignedBoundaryMeasure};
use clarkflow::limits::Radial;
use clarkflow::maps::{angular_derivative, boundary_dilatation, contact_points, HoloMap};
use clarkflow::semigroup::{decompose, flow, FlowOptions, Generator, SampleGrid};

fn pt(a: f64) -> CirclePoint {
    CirclePoint::new(a).unwrap()
}

fn interior(max_r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..max_r, 0.0..TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn blaschke() -> impl Strategy<Value = HoloMap> {
    (prop::collection::vec(interior(0.9), 1..5), 0.0..TAU)
        .prop_map(|(zeros, rot)| HoloMap::blaschke(zeros, pt(rot)).unwrap())
}

fn automorphism() -> impl Strategy<Value = HoloMap> {
    (interior(0.9), 0.0..TAU).prop_map(|(a, rot)| HoloMap::automorphism(a, pt(rot)).unwrap())
}

/// Smooth positive density `1 + a cos(kθ + φ)` with `|a| < 1`.
fn smooth_density(n: usize) -> impl Strategy<Value = Vec<f64>> {
    (0.0..0.9f64, 1..4usize, 0.0..TAU).prop_map(move |(a, k, phase)| {
        (0..n).map(|j| 1.0 + a * (k as f64 * TAU * j as f64 / n as f64 + phase).cos()).collect()
    })
}

/// Generators at τ = 1 with `ν({1}) = 0`, `λ ≤ 0` and an atom away from 1.
fn generator() -> impl Strategy<Value = Generator> {
    (smooth_density(256), 0.0..2.0f64, -2.0..0.0f64, 0.5..5.5f64, 0.0..0.5f64, -1.0..1.0f64).prop_map(
        |(density, scale, lambda, atom_at, atom_mass, imag)| {
            let density = density.into_iter().map(|d| scale * d).collect();
            let nu = SignedBoundaryMeasure::new(vec![Atom::new(pt(atom_at), atom_mass)], density).unwrap();
            Generator::new(nu, imag, CirclePoint::ONE, lambda).unwrap()
        },
    )
}

fn radial() -> Radial {
    Radial::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn poisson_integral_is_nonnegative_and_matches_herglotz(
        density in smooth_density(256),
        atoms in prop::collection::vec((0.0..TAU, 0.0..2.0f64), 0..3),
        z in interior(0.95),
    ) {
        let atoms = atoms.into_iter().map(|(a, m)| Atom::new(pt(a), m)).collect();
        let mu = BoundaryMeasure::new(atoms, density).unwrap();
        let p = mu.poisson_integral(z).unwrap();
        prop_assert!(p >= 0.0);
        prop_assert!((p - mu.herglotz_integral(0.0, z).unwrap().re).abs() < 1e-12 * (1.0 + p));
    }

    #[test]
    fn constant_density_quadrature(c in 0.0..10.0f64, z in interior(0.9), k in 8..12u32) {
        let mu = SignedBoundaryMeasure::uniform(c, 1 << k);
        prop_assert!((mu.poisson_integral(z).unwrap() - c).abs() < 1e-10 * (1.0 + c));
    }

    #[test]
    fn schwarz_pick(f in prop_oneof![blaschke(), automorphism()], z in interior(0.95), w in interior(0.95)) {
        let before = pseudo_hyperbolic(z, w);
        let after = pseudo_hyperbolic(f.eval(z).unwrap(), f.eval(w).unwrap());
        prop_assert!(after <= before + 1e-10);
    }

    #[test]
    fn blaschke_contact_points(f in blaschke(), tau in 0.0..TAU) {
        let reports = contact_points(&f, pt(tau), &radial()).unwrap();
        let degree = f.as_blaschke().unwrap().unwrap().degree();
        prop_assert_eq!(reports.len(), degree);
        for r in &reports {
            let d = r.dilatation;
            prop_assert!((r.angular_derivative.modulus() - d).abs() < 1e-6 * (1.0 + d));
        }
    }

    #[test]
    fn clark_mass_and_reconstruction(f in prop_oneof![blaschke(), automorphism()], tau in 0.0..TAU) {
        let m = clark_measure(&f, pt(tau), 256, &radial()).unwrap();
        prop_assert!(m.mass_residual.abs() < 1e-4);
        let probes: Vec<Complex64> = (0..24).map(|j| Complex64::from_polar(0.1 + 0.03 * j as f64, 0.7 * j as f64)).collect();
        prop_assert!(m.reconstruction_error(&probes).unwrap() < 1e-4);
    }

    #[test]
    fn automorphisms_have_one_atom(f in automorphism(), tau in 0.0..TAU) {
        let atoms = nevanlinna_atoms(&f, pt(tau), &radial()).unwrap();
        prop_assert!(atoms.len() <= 1);
        prop_assert!(nevanlinna_consistency(&f, &atoms, &radial()).unwrap() < 1e-5);
    }

    #[test]
    fn preimage_mass_equals_atom_sum(f in blaschke(), tau in 0.0..TAU) {
        let tau = pt(tau);
        let sum: f64 = nevanlinna_atoms(&f, tau, &radial()).unwrap().iter().map(|a| a.mass).sum();
        let est = singular_mass_preimage(&f, tau, 30).unwrap();
        prop_assert!((est.value - sum).abs() < 1e-3 * (1.0 + sum));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hyperbolic_automorphism_reciprocity(r in -0.95..0.95f64) {
        // z ↦ (z + r)/(1 + rz) fixes ±1
        let f = HoloMap::automorphism(Complex64::new(-r, 0.0), CirclePoint::ONE).unwrap();
        let p = angular_derivative(&f, pt(0.0), &radial()).unwrap().finite().unwrap();
        let q = angular_derivative(&f, pt(std::f64::consts::PI), &radial()).unwrap().finite().unwrap();
        prop_assert!(((p * q) - 1.0).norm() < 1e-8);
    }

    #[test]
    fn decomposition_round_trip(g in generator()) {
        let d = decompose(&g, CirclePoint::ONE, &SampleGrid::default(), &radial()).unwrap();
        prop_assert!((d.lambda - g.lambda()).abs() < 1e-6);
        for (z, p) in &d.samples {
            prop_assert!((p - g.p(*z).unwrap()).norm() < 1e-8);
        }
        prop_assert!(d.min_re_p >= -1e-9);
    }

    #[test]
    fn cone_combinations_stay_in_the_disc(g1 in generator(), g2 in generator(), a in 0.0..2.0f64, b in 0.0..2.0f64) {
        let g = Generator::cone_combination(a, &g1, b, &g2).unwrap();
        for j in 0..8 {
            let z = Complex64::from_polar(0.85, TAU * j as f64 / 8.0);
            let r = flow(&g, 1.0, z, &FlowOptions::default()).unwrap();
            prop_assert!(r.value.norm() < 1.0);
        }
    }

    #[test]
    fn flow_dilatation_follows_lambda(g in generator(), t in 0.25..1.0f64) {
        let f = HoloMap::flow(g.clone(), t).unwrap();
        let d = boundary_dilatation(&f, CirclePoint::ONE, &radial()).unwrap();
        let want = (g.dilatation_exponent() * t).exp();
        prop_assert!((d - want).abs() < 1e-4, "{} vs {}", d, want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn sigma_t_atom_is_exact(lambda in -2.0..0.0f64, c in 0.0..2.0f64, k in 2..7i32) {
        let t = 0.5f64.powi(k);
        let g = Generator::new(SignedBoundaryMeasure::uniform(c, 256), 0.0, CirclePoint::ONE, lambda).unwrap();
        let s = sigma_t(&g, t, 256, &radial()).unwrap();
        let want = ((-lambda * t).exp() - 1.0) / t;
        prop_assert!((s.atom - want).abs() < 1e-4);
        prop_assert!((s.reestimated_atom - (-lambda * t).exp()).abs() < 1e-4);
    }

    #[test]
    fn limit_measure_is_nonnegative(g in generator()) {
        let m = mu_limit_density(&g, 256, &radial()).unwrap();
        prop_assert!(m.measure.is_nonnegative());
        let g0 = g.eval(Complex64::new(0.0, 0.0)).unwrap();
        prop_assert!((m.measure.total_mass() - (2.0 * g0.re + g.dilatation_exponent())).abs() < 1e-3);
    }
}
