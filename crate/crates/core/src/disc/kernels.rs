use num_complex::Complex64;

use super::{check_interior, CirclePoint};
use crate::error::Result;

/// Poisson kernel `P(ζ, z) = (1 - |z|²) / |z - ζ|²`.
pub fn poisson_kernel(zeta: CirclePoint, z: Complex64) -> Result<f64> {
    check_interior(z)?;
    Ok(poisson_unchecked(zeta.to_complex(), z))
}

/// Herglotz kernel `(ζ + z) / (ζ - z)`; its real part is the Poisson kernel.
pub fn herglotz_kernel(zeta: CirclePoint, z: Complex64) -> Result<Complex64> {
    check_interior(z)?;
    Ok(herglotz_unchecked(zeta.to_complex(), z))
}

#[inline]
pub(crate) fn poisson_unchecked(zeta: Complex64, z: Complex64) -> f64 {
    (1.0 - z.norm_sqr()) / (z - zeta).norm_sqr()
}

#[inline]
pub(crate) fn herglotz_unchecked(zeta: Complex64, z: Complex64) -> Complex64 {
    (zeta + z) / (zeta - z)
}
