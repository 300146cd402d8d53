//! Chi distribution and the radial density of n-dimensional Gaussian noise.

use crate::Real;

use super::gamma::{reg_gamma_p, reg_gamma_q};
use super::SpecError;

/// Tail mass beyond which [`tail_cutoff_radius`] truncates infinite integrals.
pub const TAIL_CUTOFF_MASS: f64 = 1e-18;

fn check_dim(n: usize) -> Result<(), SpecError> {
    if n == 0 {
        Err(SpecError::Domain { what: "dimension n", value: 0.0 })
    } else {
        Ok(())
    }
}

fn check_radius<T: Real>(t: T, what: &'static str) -> Result<(), SpecError> {
    if t >= T::zero() {
        Ok(())
    } else {
        Err(SpecError::Domain { what, value: t.as_f64() })
    }
}

// ln of 2^{1-n/2} / Γ(n/2)
fn ln_chi_norm<T: Real>(n: usize) -> T {
    let half_n = T::from_count(n) * T::half();
    (T::one() - half_n) * T::LN_2() - half_n.ln_gamma()
}

/// Density of the chi distribution with `n` degrees of freedom,
/// 2^{1-n/2} t^{n-1} e^{-t²/2} / Γ(n/2), evaluated in the log domain.
pub fn chi_pdf<T: Real>(t: T, n: usize) -> Result<T, SpecError> {
    check_dim(n)?;
    check_radius(t, "chi argument t")?;
    Ok(chi_pdf_unchecked(t, n, ln_chi_norm(n)))
}

fn chi_pdf_unchecked<T: Real>(t: T, n: usize, ln_norm: T) -> T {
    if t == T::zero() {
        return if n == 1 { ln_norm.exp() } else { T::zero() };
    }
    if t.is_infinite() {
        return T::zero();
    }
    let power = T::from_count(n - 1);
    (ln_norm + power * t.ln() - t * t * T::half()).exp()
}

/// Chi CDF, F(t, n) = 1 − Q(n/2, t²/2).
pub fn chi_cdf<T: Real>(t: T, n: usize) -> Result<T, SpecError> {
    check_dim(n)?;
    check_radius(t, "chi argument t")?;
    reg_gamma_p(T::from_count(n) * T::half(), t * t * T::half())
}

/// Chi survival function 1 − F(t, n) = Q(n/2, t²/2).
pub fn chi_sf<T: Real>(t: T, n: usize) -> Result<T, SpecError> {
    check_dim(n)?;
    check_radius(t, "chi argument t")?;
    reg_gamma_q(T::from_count(n) * T::half(), t * t * T::half())
}

/// Density of ‖N‖ for N with `n` i.i.d. N(0, σ²) components: (1/σ) f(r/σ, n).
pub fn radial_density<T: Real>(r: T, sigma: T, n: usize) -> Result<T, SpecError> {
    check_radius(r, "radius r")?;
    Ok(RadialDensity::new(sigma, n)?.eval(r))
}

/// [`radial_density`] with the normalizing constant hoisted out.
#[derive(Debug, Clone, Copy)]
pub struct RadialDensity<T> {
    sigma: T,
    n: usize,
    ln_norm: T,
}

impl<T: Real> RadialDensity<T> {
    pub fn new(sigma: T, n: usize) -> Result<Self, SpecError> {
        check_dim(n)?;
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(SpecError::Domain { what: "noise sigma", value: sigma.as_f64() });
        }
        Ok(Self { sigma, n, ln_norm: ln_chi_norm(n) })
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// p_0(r); zero for negative r.
    #[inline]
    pub fn eval(&self, r: T) -> T {
        if r < T::zero() {
            return T::zero();
        }
        chi_pdf_unchecked(r / self.sigma, self.n, self.ln_norm) / self.sigma
    }

    /// Pr(‖N‖ > r).
    pub fn tail(&self, r: T) -> Result<T, SpecError> {
        chi_sf(r / self.sigma, self.n)
    }
}

/// Smallest radius (to bisection resolution) whose noise-radius tail mass is
/// below [`TAIL_CUTOFF_MASS`]. Integrals over [x, ∞) of anything bounded by
/// the radial density are truncated here.
pub fn tail_cutoff_radius<T: Real>(sigma: T, n: usize) -> Result<T, SpecError> {
    let density = RadialDensity::new(sigma, n)?;
    let target = T::lit(TAIL_CUTOFF_MASS);
    let mut lo = T::zero();
    let mut hi = sigma * (T::from_count(n).sqrt() + T::lit(10.0));
    while density.tail(hi)? >= target {
        lo = hi;
        hi = hi * T::two();
    }
    for _ in 0..200 {
        let mid = T::half() * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        if density.tail(mid)? < target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= hi * T::lit(1e-12) {
            break;
        }
    }
    Ok(hi)
}
