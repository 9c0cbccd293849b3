use nalgebra::DMatrix;
use num_complex::Complex64;

use super::check_parameter;
use crate::disc::{check_interior, CirclePoint};
use crate::error::{Error, Result};

/// Residual allowed in `|B(root) - w|` after polishing.
const RESIDUAL_TOL: f64 = 1e-10;

/// Finite Blaschke product `e^{iθ} Π (z - a_j)/(1 - ā_j z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Blaschke {
    zeros: Vec<Complex64>,
    rotation: CirclePoint,
}

impl Blaschke {
    pub fn new(zeros: Vec<Complex64>, rotation: CirclePoint) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::Parameter("a Blaschke product needs at least one zero".into()));
        }
        for &a in &zeros {
            check_parameter(a)?;
        }
        Ok(Self { zeros, rotation })
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn rotation(&self) -> CirclePoint {
        self.rotation
    }

    /// Number of zeros with multiplicity; the map is `degree`-to-one.
    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub(crate) fn eval_pair(&self, z: Complex64, defect: f64) -> (Complex64, f64) {
        let mut w = self.rotation.to_complex();
        // 1 - |B|² = 1 - Π(1 - e_j), accumulated in log space
        let mut log_modsq = 0.0;
        for &a in &self.zeros {
            let den = Complex64::new(1.0, 0.0) - a.conj() * z;
            w *= (z - a) / den;
            let e = ((1.0 - a.norm_sqr()) * defect / den.norm_sqr()).min(1.0);
            log_modsq += (-e).ln_1p();
        }
        (w, -log_modsq.exp_m1())
    }

    pub(crate) fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_pair(z, 1.0 - z.norm_sqr()).0
    }

    pub(crate) fn derivative(&self, z: Complex64) -> Complex64 {
        let factors: Vec<(Complex64, Complex64)> = self
            .zeros
            .iter()
            .map(|&a| {
                let den = Complex64::new(1.0, 0.0) - a.conj() * z;
                ((z - a) / den, (1.0 - a.norm_sqr()) / (den * den))
            })
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        for j in 0..factors.len() {
            let mut term = factors[j].1;
            for (k, f) in factors.iter().enumerate() {
                if k != j {
                    term *= f.0;
                }
            }
            total += term;
        }
        self.rotation.to_complex() * total
    }

    /// Coefficients (ascending) of `e^{iθ} Π(z - a_j) - w Π(1 - ā_j z)`,
    /// whose roots are the solutions of `B(z) = w`.
    fn preimage_polynomial(&self, w: Complex64) -> Vec<Complex64> {
        let mut num = vec![Complex64::new(1.0, 0.0)];
        let mut den = vec![Complex64::new(1.0, 0.0)];
        for &a in &self.zeros {
            num = poly_mul(&num, &[-a, Complex64::new(1.0, 0.0)]);
            den = poly_mul(&den, &[Complex64::new(1.0, 0.0), -a.conj()]);
        }
        let rot = self.rotation.to_complex();
        num.iter().zip(&den).map(|(n, d)| rot * n - w * d).collect()
    }

    fn solve(&self, w: Complex64) -> Result<Vec<Complex64>> {
        let coeffs = self.preimage_polynomial(w);
        let mut roots = polynomial_roots(&coeffs)?;
        for r in roots.iter_mut() {
            *r = newton_polish(&coeffs, *r);
        }
        Ok(roots)
    }

    /// All `n` solutions of `B(z) = w` (with multiplicity), `|w| < 1`.
    pub fn preimages(&self, w: Complex64) -> Result<Vec<Complex64>> {
        check_interior(w)?;
        let roots = self.solve(w)?;
        for &r in &roots {
            if !(r.norm() < 1.0) {
                return Err(Error::InternalConsistency(format!("preimage {r} of {w} is not in the disc")));
            }
            let res = (self.eval(r) - w).norm();
            if res > RESIDUAL_TOL {
                return Err(Error::InternalConsistency(format!("preimage {r} of {w} has residual {res}")));
            }
        }
        Ok(roots)
    }

    /// All `n` points `ζ` of the circle with `B(ζ) = τ`, sorted by angle.
    pub fn boundary_preimages(&self, tau: CirclePoint) -> Result<Vec<CirclePoint>> {
        let roots = self.solve(tau.to_complex())?;
        let mut pts = Vec::with_capacity(roots.len());
        for r in roots {
            if (r.norm() - 1.0).abs() > 1e-6 {
                return Err(Error::InternalConsistency(format!("boundary preimage {r} of {tau} is off the circle")));
            }
            pts.push(CirclePoint::from_complex(r)?);
        }
        pts.sort_by(|a, b| a.angle().total_cmp(&b.angle()));
        Ok(pts)
    }

    /// `self ∘ inner` as a Blaschke product: its zeros are the preimages
    /// under `inner` of the zeros of `self`.
    pub fn compose(&self, inner: &Blaschke) -> Result<Blaschke> {
        let mut zeros = Vec::with_capacity(self.degree() * inner.degree());
        for &a in &self.zeros {
            zeros.extend(inner.preimages(a)?);
        }
        let probe = pick_probe(&zeros);
        let target = self.eval(inner.eval(probe));
        let mut out = Blaschke { zeros, rotation: CirclePoint::ONE };
        let bare = out.eval(probe);
        out.rotation = CirclePoint::from_complex(target / bare)?;
        Ok(out)
    }
}

/// A point of modulus 1/2 away from every zero.
fn pick_probe(zeros: &[Complex64]) -> Complex64 {
    (0..64)
        .map(|j| Complex64::from_polar(0.5, 0.1 + j as f64))
        .max_by(|p, q| {
            let dp = zeros.iter().map(|a| (p - a).norm()).fold(f64::INFINITY, f64::min);
            let dq = zeros.iter().map(|a| (q - a).norm()).fold(f64::INFINITY, f64::min);
            dp.total_cmp(&dq)
        })
        .expect("nonempty candidate list")
}

fn poly_mul(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// `(p(z), p'(z))` by Horner's rule.
fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn newton_polish(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let (p, dp) = horner(coeffs, z);
    if dp.norm() == 0.0 {
        return z;
    }
    let next = z - p / dp;
    // keep the step only when it reduces the residual
    if next.is_finite() && horner(coeffs, next).0.norm() <= p.norm() {
        next
    } else {
        z
    }
}

/// Roots of `Σ c_k z^k` as eigenvalues of the companion matrix.
fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    if lead.norm() == 0.0 {
        return Err(Error::InternalConsistency("degenerate preimage polynomial".into()));
    }
    if n == 1 {
        return Ok(vec![-coeffs[0] / lead]);
    }
    let mut companion = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        companion[(i, n - 1)] = -coeffs[i] / lead;
    }
    let eig = companion
        .eigenvalues()
        .ok_or_else(|| Error::InternalConsistency("companion eigenvalue iteration failed".into()))?;
    Ok(eig.iter().copied().collect())
}
