//! Surface areas of n-spheres and of their polar caps.

use crate::Real;

use super::beta::IncBeta;
use super::SpecError;

fn check_dim(n: usize) -> Result<(), SpecError> {
    if n < 2 {
        Err(SpecError::Domain { what: "sphere dimension n", value: n as f64 })
    } else {
        Ok(())
    }
}

/// Surface area of the radius-`r` sphere in R^n: 2π^{n/2} r^{n-1} / Γ(n/2).
pub fn sphere_surface_area<T: Real>(n: usize, r: T) -> Result<T, SpecError> {
    check_dim(n)?;
    if !(r > T::zero()) || !r.is_finite() {
        return Err(SpecError::Domain { what: "sphere radius r", value: r.as_f64() });
    }
    let half_n = T::from_count(n) * T::half();
    let ln_area = T::LN_2() + half_n * T::PI().ln() - half_n.ln_gamma() + T::from_count(n - 1) * r.ln();
    Ok(ln_area.exp())
}

/// Fraction of the sphere's surface inside a polar cap of half-angle φ ≤ π/2,
/// given as sin²φ: (1/2) I_{sin²φ}((n−1)/2, 1/2). Independent of radius.
pub fn cap_area_fraction<T: Real>(n: usize, sin2_phi: T) -> Result<T, SpecError> {
    CapFraction::new(n)?.eval(sin2_phi)
}

/// [`cap_area_fraction`] for a fixed dimension.
#[derive(Debug, Clone, Copy)]
pub struct CapFraction<T> {
    beta: IncBeta<T>,
}

impl<T: Real> CapFraction<T> {
    pub fn new(n: usize) -> Result<Self, SpecError> {
        check_dim(n)?;
        let a = T::from_count(n - 1) * T::half();
        Ok(Self { beta: IncBeta::new(a, T::half())? })
    }

    #[inline]
    pub fn eval(&self, sin2_phi: T) -> Result<T, SpecError> {
        Ok(T::half() * self.beta.eval(sin2_phi)?)
    }
}
