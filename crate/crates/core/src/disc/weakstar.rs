use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SignedBoundaryMeasure;
use crate::error::{Error, Result};

/// Largest probe modulus allowed in a test family.
pub const MAX_PROBE_RADIUS: f64 = 0.95;

/// Finite family of test functions used to compare measures weak*-wise:
/// Poisson kernels `P(·, z_j)` and Fourier modes `ζ^k`, `|k| ≤ K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionFamily {
    probes: Vec<Complex64>,
    fourier_degree: Option<u32>,
}

impl TestFunctionFamily {
    pub fn new(probes: Vec<Complex64>, fourier_degree: Option<u32>) -> Result<Self> {
        if let Some(z) = probes.iter().find(|z| !(z.norm() <= MAX_PROBE_RADIUS + 1e-12)) {
            return Err(Error::Parameter(format!(
                "probe {z} lies outside the closed disc of radius {MAX_PROBE_RADIUS}"
            )));
        }
        if probes.is_empty() && fourier_degree.is_none() {
            return Err(Error::Parameter("empty test-function family".into()));
        }
        Ok(Self { probes, fourier_degree })
    }

    /// Probes on the circles of the given radii, `angles` equally spaced on each.
    pub fn polar(radii: &[f64], angles: usize, fourier_degree: Option<u32>) -> Result<Self> {
        let probes = radii
            .iter()
            .flat_map(|&r| (0..angles).map(move |j| Complex64::from_polar(r, TAU * j as f64 / angles as f64)))
            .collect();
        Self::new(probes, fourier_degree)
    }

    pub fn probes(&self) -> &[Complex64] {
        &self.probes
    }

    pub fn fourier_degree(&self) -> Option<u32> {
        self.fourier_degree
    }

    fn pairings(&self, mu: &SignedBoundaryMeasure) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(self.probes.len() + 17);
        for &z in &self.probes {
            out.push(Complex64::new(mu.poisson_integral(z)?, 0.0));
        }
        // the measures are real, so modes k and -k pair to conjugate values
        if let Some(k_max) = self.fourier_degree {
            for k in 0..=i64::from(k_max) {
                out.push(mu.fourier_moment(k));
            }
        }
        Ok(out)
    }
}

impl Default for TestFunctionFamily {
    /// Radii {0.5, 0.8, 0.95} with 8 angles each, Fourier degree 16.
    fn default() -> Self {
        Self::polar(&[0.5, 0.8, 0.95], 8, Some(16)).expect("valid default family")
    }
}

/// `max_f |∫f dμ1 - ∫f dμ2|` over the family.
pub fn weakstar_distance(
    mu1: &SignedBoundaryMeasure,
    mu2: &SignedBoundaryMeasure,
    fam: &TestFunctionFamily,
) -> Result<f64> {
    let a = fam.pairings(mu1)?;
    let b = fam.pairings(mu2)?;
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::{Atom, CirclePoint};
    use proptest::prelude::*;

    #[test]
    fn identical_measures_are_at_distance_zero() {
        let fam = TestFunctionFamily::default();
        let mu =
            SignedBoundaryMeasure::new(vec![Atom::new(CirclePoint::new(1.0).unwrap(), 0.3)], vec![0.5; 128]).unwrap();
        assert_eq!(weakstar_distance(&mu, &mu, &fam).unwrap(), 0.0);
    }

    #[test]
    fn opposite_diracs_dominated_by_outer_probe() {
        // oracle: P(1, 0.9) = 0.19/0.01, P(-1, 0.9) = 0.19/3.61
        let p_plus = (1.0 - 0.81) / (0.1f64 * 0.1);
        let p_minus = (1.0 - 0.81) / (1.9f64 * 1.9);
        let expect = p_plus - p_minus;
        assert!((expect - (19.0 - 1.0 / 19.0)).abs() < 1e-12);

        let fam = TestFunctionFamily::new(vec![Complex64::new(0.9, 0.0)], Some(4)).unwrap();
        let d1 = SignedBoundaryMeasure::dirac(CirclePoint::ONE, 1.0);
        let dm1 = SignedBoundaryMeasure::dirac(CirclePoint::new(std::f64::consts::PI).unwrap(), 1.0);
        let d = weakstar_distance(&d1, &dm1, &fam).unwrap();
        assert!((d - expect).abs() < 1e-12, "{d}");
    }

    #[test]
    fn lebesgue_versus_zero_is_one() {
        let fam = TestFunctionFamily::new(vec![], Some(0)).unwrap();
        let m = SignedBoundaryMeasure::lebesgue(256);
        let d = weakstar_distance(&m, &SignedBoundaryMeasure::zero(), &fam).unwrap();
        assert!((d - 1.0).abs() < 1e-14);
    }

    #[test]
    fn family_validation() {
        assert!(TestFunctionFamily::new(vec![], None).is_err());
        assert!(TestFunctionFamily::new(vec![Complex64::new(0.96, 0.0)], None).is_err());
        assert_eq!(TestFunctionFamily::default().probes().len(), 24);
    }

    proptest! {
        #[test]
        fn triangle_inequality(
            w in prop::collection::vec((0.0..std::f64::consts::TAU, -2.0..2.0f64), 9),
            d in prop::collection::vec(-1.0..1.0f64, 3 * 64),
        ) {
            let fam = TestFunctionFamily::default();
            let mk = |i: usize| {
                let atoms = w[3 * i..3 * i + 3]
                    .iter()
                    .map(|&(t, m)| Atom::new(CirclePoint::new(t).unwrap(), m))
                    .collect();
                SignedBoundaryMeasure::new(atoms, d[64 * i..64 * i + 64].to_vec()).unwrap()
            };
            let (a, b, c) = (mk(0), mk(1), mk(2));
            let ab = weakstar_distance(&a, &b, &fam).unwrap();
            let bc = weakstar_distance(&b, &c, &fam).unwrap();
            let ac = weakstar_distance(&a, &c, &fam).unwrap();
            prop_assert!(ac <= ab + bc + 1e-9 * (1.0 + ab + bc));
            prop_assert!((ab - weakstar_distance(&b, &a, &fam).unwrap()).abs() < 1e-12 * (1.0 + ab));
        }
    }
}
