//! Word error rate and undetected error rate bounds for bounded-distance
//! decoding of BPSK-modulated binary linear codes on the AWGN channel.
//!
//! With x₀ sent, r₀ = ‖y − x₀‖ is the noise radius and rᵢ = ‖y − xᵢ‖. For a
//! decoding radius r_d the three constituent probabilities are
//!
//! * `p_tot_gt`: Pr(r₀ > r_d) = Q(n/2, r_d²/2σ²), exact;
//! * `p_u_lt`: union bound on Pr(undetected, r₀ ≤ r_d), summing
//!   Pr(rᵢ ≤ r₀ ≤ r_d) over all incorrect codewords;
//! * `p_u_gt`: union bound on Pr(undetected, r₀ > r_d), summing
//!   Pr(rᵢ ≤ r_d < r₀).
//!
//! Each union term is a radial integral of the noise density p₀(r) times the
//! fraction of the radius-r sphere around x₀ that lies in the relevant region,
//! which is a polar cap. Codewords of equal weight contribute identically, so
//! the sums run over the weight enumerator. Then P_w ≤ p_u_lt + p_tot_gt and
//! P_u ≤ p_u_lt + p_u_gt.

use std::cell::Cell;

use rayon::prelude::*;
use thiserror::Error;

use crate::code::WeightEnumerator;
use crate::specfun::{
    gaussian_q, integrate, reg_gamma_q, tail_cutoff_radius, CapFraction, QuadError, QuadratureSpec,
    RadialDensity, SpecError,
};
use crate::Real;

/// sin²φ may leave [0, 1] by this much from rounding before it is an error.
pub const ANGLE_SPILL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("invalid channel: {0}")]
    Channel(&'static str),
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("enumerator block length {enumerator} does not match channel block length {channel}")]
    BlockLength { enumerator: usize, channel: usize },
    #[error("radius grid must be nonnegative and strictly increasing (index {index})")]
    Grid { index: usize },
    #[error(transparent)]
    Special(#[from] SpecError),
    #[error("cap half-angle out of range at r={r} (w={weight}): sin^2 = {sin2}")]
    Angle { r: f64, weight: usize, sin2: f64 },
    #[error("{bound} term for weight {weight} at r_d={r_d}: {source}")]
    Quadrature {
        bound: &'static str,
        weight: usize,
        r_d: f64,
        #[source]
        source: QuadError,
    },
}

/// BPSK over AWGN at a given E_b/N₀ and code rate.
///
/// σ² = 1 / (2·R·E_b/N₀) is derived at construction and cannot be set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams<T> {
    ebn0_db: T,
    rate: T,
    n: usize,
    sigma: T,
}

impl<T: Real> ChannelParams<T> {
    pub fn new(ebn0_db: T, rate: T, n: usize) -> Result<Self, BoundsError> {
        if !ebn0_db.is_finite() {
            return Err(BoundsError::Channel("E_b/N_0 must be finite"));
        }
        if !(rate > T::zero() && rate <= T::one()) {
            return Err(BoundsError::Channel("rate must be in (0, 1]"));
        }
        if n < 2 {
            return Err(BoundsError::Channel("block length must be at least 2"));
        }
        let ebn0 = T::lit(10.0).powf(ebn0_db / T::lit(10.0));
        let sigma = (T::one() / (T::two() * rate * ebn0)).sqrt();
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(BoundsError::Channel("E_b/N_0 gives a degenerate noise level"));
        }
        Ok(Self { ebn0_db, rate, n, sigma })
    }

    pub fn ebn0_db(&self) -> T {
        self.ebn0_db
    }

    /// E_b/N₀ as a power ratio.
    pub fn ebn0(&self) -> T {
        T::lit(10.0).powf(self.ebn0_db / T::lit(10.0))
    }

    pub fn rate(&self) -> T {
        self.rate
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Per-dimension noise standard deviation.
    pub fn sigma(&self) -> T {
        self.sigma
    }
}

/// All five quantities at one decoding radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsRow<T> {
    pub r_d: T,
    pub p_tot_gt: T,
    pub p_u_lt: T,
    pub p_u_gt: T,
    /// p_u_lt + p_tot_gt
    pub p_w: T,
    /// p_u_lt + p_u_gt
    pub p_u: T,
    /// Computed from a truncated enumerator: neither exact nor a certified bound.
    pub truncated_enumerator: bool,
}

/// Contribution of one weight class to a union bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightTerm<T> {
    pub weight: usize,
    pub value: T,
    pub abs_error: T,
}

/// Evaluates the bounds for one channel and enumerator, caching the density
/// normalization, the cap-area beta function and the tail cutoff radius.
#[derive(Debug, Clone)]
pub struct BoundCalculator<'a, T> {
    channel: ChannelParams<T>,
    enumerator: &'a WeightEnumerator,
    quad: QuadratureSpec<T>,
    density: RadialDensity<T>,
    cap: CapFraction<T>,
    cutoff: T,
}

fn check_radius<T: Real>(r_d: T) -> Result<(), BoundsError> {
    if r_d >= T::zero() {
        Ok(())
    } else {
        Err(BoundsError::Domain { what: "decoding radius r_d", value: r_d.as_f64() })
    }
}

fn count<T: Real>(a: u128) -> T {
    T::from_u128(a).unwrap_or_else(T::infinity)
}

impl<'a, T: Real> BoundCalculator<'a, T> {
    pub fn new(
        channel: ChannelParams<T>,
        enumerator: &'a WeightEnumerator,
        quad: QuadratureSpec<T>,
    ) -> Result<Self, BoundsError> {
        if enumerator.n() != channel.n() {
            return Err(BoundsError::BlockLength { enumerator: enumerator.n(), channel: channel.n() });
        }
        Ok(Self {
            density: RadialDensity::new(channel.sigma(), channel.n())?,
            cap: CapFraction::new(channel.n())?,
            cutoff: tail_cutoff_radius(channel.sigma(), channel.n())?,
            channel,
            enumerator,
            quad,
        })
    }

    pub fn channel(&self) -> &ChannelParams<T> {
        &self.channel
    }

    /// Radius beyond which the noise density carries less than 1e-18 mass;
    /// integrals are truncated here.
    pub fn cutoff_radius(&self) -> T {
        self.cutoff
    }

    /// Pr(r₀ > r_d), exact.
    pub fn p_tot_gt(&self, r_d: T) -> Result<T, BoundsError> {
        check_radius(r_d)?;
        let s = self.channel.sigma();
        Ok(reg_gamma_q(T::from_count(self.channel.n()) * T::half(), r_d * r_d / (T::two() * s * s))?)
    }

    /// Integrand of the r₀ ≤ r_d term: p₀(r)·(1/2)I_{1−w/r²}((n−1)/2, 1/2).
    /// Exactly zero at and below r = √w.
    pub fn p_u_lt_integrand(&self, weight: usize, r: T) -> Result<T, BoundsError> {
        let w = T::from_count(weight);
        if r <= w.sqrt() {
            return Ok(T::zero());
        }
        let x = T::one() - w / (r * r);
        Ok(self.density.eval(r) * self.cap.eval(x)?)
    }

    /// sin²φ_w(r) = 1 − ((r² − r_d² + 4w) / (4r√w))², clamped into [0, 1]
    /// when rounding spills by at most [`ANGLE_SPILL_TOL`].
    pub fn sin2_phi_gt(&self, weight: usize, r_d: T, r: T) -> Result<T, BoundsError> {
        let w = T::from_count(weight);
        let cos = (r * r - r_d * r_d + T::lit(4.0) * w) / (T::lit(4.0) * r * w.sqrt());
        let s2 = T::one() - cos * cos;
        let tol = T::lit(ANGLE_SPILL_TOL);
        if s2 >= T::zero() && s2 <= T::one() {
            Ok(s2)
        } else if s2 < T::zero() && s2 >= -tol {
            Ok(T::zero())
        } else if s2 > T::one() && s2 <= T::one() + tol {
            Ok(T::one())
        } else {
            Err(BoundsError::Angle { r: r.as_f64(), weight, sin2: s2.as_f64() })
        }
    }

    /// Integrand of the r₀ > r_d term: p₀(r)·(1/2)I_{sin²φ_w(r)}((n−1)/2, 1/2).
    /// Exactly zero outside the open interval (2√w − r_d, 2√w + r_d).
    pub fn p_u_gt_integrand(&self, weight: usize, r_d: T, r: T) -> Result<T, BoundsError> {
        let two_sqrt_w = T::two() * T::from_count(weight).sqrt();
        if r <= T::zero() || r <= two_sqrt_w - r_d || r >= two_sqrt_w + r_d {
            return Ok(T::zero());
        }
        let s2 = self.sin2_phi_gt(weight, r_d, r)?;
        if s2 == T::zero() {
            return Ok(T::zero());
        }
        Ok(self.density.eval(r) * self.cap.eval(s2)?)
    }

    /// Integration limits of the r₀ > r_d term for weight w, before truncation.
    pub fn p_u_gt_limits(&self, weight: usize, r_d: T) -> (T, T) {
        let two_sqrt_w = T::two() * T::from_count(weight).sqrt();
        (r_d.max(two_sqrt_w - r_d), two_sqrt_w + r_d)
    }

    fn integrate_term<F>(
        &self,
        bound: &'static str,
        weight: usize,
        r_d: T,
        lo: T,
        hi: T,
        integrand: F,
    ) -> Result<WeightTerm<T>, BoundsError>
    where
        F: Fn(T) -> Result<T, BoundsError>,
    {
        let hi = hi.min(self.cutoff);
        if !(hi > lo) {
            return Ok(WeightTerm { weight, value: T::zero(), abs_error: T::zero() });
        }
        let failure: Cell<Option<BoundsError>> = Cell::new(None);
        let f = |r: T| match integrand(r) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                T::nan()
            }
        };
        let result = integrate(f, lo, hi, &self.quad);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let integral = result.map_err(|source| BoundsError::Quadrature {
            bound,
            weight,
            r_d: r_d.as_f64(),
            source,
        })?;
        // The cap fraction already carries the factor 1/2 of A_w/2.
        let scale = count::<T>(self.enumerator.coeff(weight));
        Ok(WeightTerm { weight, value: scale * integral.value, abs_error: scale * integral.abs_error })
    }

    /// Per-weight terms of the union bound on Pr(undetected, r₀ ≤ r_d).
    /// Only weights with w ≤ r_d² contribute.
    pub fn p_u_lt_terms(&self, r_d: T) -> Result<Vec<WeightTerm<T>>, BoundsError> {
        check_radius(r_d)?;
        self.enumerator
            .nonzero_terms()
            .filter(|&(w, _)| T::from_count(w) <= r_d * r_d)
            .map(|(w, _)| {
                let lo = T::from_count(w).sqrt();
                self.integrate_term("p_u_lt", w, r_d, lo, r_d, |r| self.p_u_lt_integrand(w, r))
            })
            .collect()
    }

    /// Per-weight terms of the union bound on Pr(undetected, r₀ > r_d).
    pub fn p_u_gt_terms(&self, r_d: T) -> Result<Vec<WeightTerm<T>>, BoundsError> {
        check_radius(r_d)?;
        self.enumerator
            .nonzero_terms()
            .map(|(w, _)| {
                let (lo, hi) = self.p_u_gt_limits(w, r_d);
                self.integrate_term("p_u_gt", w, r_d, lo, hi, |r| self.p_u_gt_integrand(w, r_d, r))
            })
            .collect()
    }

    pub fn p_u_lt(&self, r_d: T) -> Result<T, BoundsError> {
        Ok(self.p_u_lt_terms(r_d)?.iter().fold(T::zero(), |acc, t| acc + t.value))
    }

    pub fn p_u_gt(&self, r_d: T) -> Result<T, BoundsError> {
        Ok(self.p_u_gt_terms(r_d)?.iter().fold(T::zero(), |acc, t| acc + t.value))
    }

    pub fn row(&self, r_d: T) -> Result<BoundsRow<T>, BoundsError> {
        let p_tot_gt = self.p_tot_gt(r_d)?;
        let p_u_lt = self.p_u_lt(r_d)?;
        let p_u_gt = self.p_u_gt(r_d)?;
        Ok(BoundsRow {
            r_d,
            p_tot_gt,
            p_u_lt,
            p_u_gt,
            p_w: p_u_lt + p_tot_gt,
            p_u: p_u_lt + p_u_gt,
            truncated_enumerator: self.enumerator.is_truncated(),
        })
    }
}

/// Pr(r₀ > r_d) = Q(n/2, r_d²/2σ²).
pub fn p_tot_gt<T: Real>(r_d: T, ch: &ChannelParams<T>) -> Result<T, BoundsError> {
    check_radius(r_d)?;
    let s = ch.sigma();
    Ok(reg_gamma_q(T::from_count(ch.n()) * T::half(), r_d * r_d / (T::two() * s * s))?)
}

/// Union bound on Pr(undetected error, r₀ ≤ r_d), default quadrature.
pub fn p_u_lt_bound<T: Real>(r_d: T, ch: &ChannelParams<T>, we: &WeightEnumerator) -> Result<T, BoundsError> {
    BoundCalculator::new(*ch, we, QuadratureSpec::default())?.p_u_lt(r_d)
}

/// Union bound on Pr(undetected error, r₀ > r_d), default quadrature.
pub fn p_u_gt_bound<T: Real>(r_d: T, ch: &ChannelParams<T>, we: &WeightEnumerator) -> Result<T, BoundsError> {
    BoundCalculator::new(*ch, we, QuadratureSpec::default())?.p_u_gt(r_d)
}

/// All five quantities at one radius, default quadrature.
pub fn compose<T: Real>(r_d: T, ch: &ChannelParams<T>, we: &WeightEnumerator) -> Result<BoundsRow<T>, BoundsError> {
    BoundCalculator::new(*ch, we, QuadratureSpec::default())?.row(r_d)
}

/// One row per radius, in grid order. Grid points are evaluated in parallel;
/// a failing point yields an `Err` in its slot without stopping the others.
pub fn sweep<T: Real>(
    ch: &ChannelParams<T>,
    we: &WeightEnumerator,
    r_d_grid: &[T],
    quad: &QuadratureSpec<T>,
) -> Result<Vec<Result<BoundsRow<T>, BoundsError>>, BoundsError> {
    for (i, &r) in r_d_grid.iter().enumerate() {
        if !(r >= T::zero()) || !r.is_finite() || (i > 0 && !(r > r_d_grid[i - 1])) {
            return Err(BoundsError::Grid { index: i });
        }
    }
    let calc = BoundCalculator::new(*ch, we, *quad)?;
    Ok(r_d_grid.par_iter().map(|&r| calc.row(r)).collect())
}

/// Pairwise union bound for maximum-likelihood decoding,
/// Σ_w A_w Q(√w/σ); the r_d → ∞ limit of the bounded-distance bounds.
pub fn ml_union_bound<T: Real>(ch: &ChannelParams<T>, we: &WeightEnumerator) -> T {
    we.nonzero_terms().fold(T::zero(), |acc, (w, a)| {
        acc + count::<T>(a) * gaussian_q(T::from_count(w).sqrt() / ch.sigma())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{builtin_extended_hamming_8_4, builtin_ldpc_128_64_weight_enum};

    fn hamming_setup() -> (ChannelParams<f64>, WeightEnumerator) {
        let code = builtin_extended_hamming_8_4();
        (ChannelParams::new(6.7, 0.5, 8).unwrap(), code.weight_enumerator().clone())
    }

    #[test]
    fn sigma_from_snr() {
        let ch = ChannelParams::new(6.7f64, 0.5, 8).unwrap();
        let expected = (1.0 / (10f64.powf(0.67))).sqrt();
        assert!((ch.sigma() - expected).abs() < 1e-15);
        assert!((ch.sigma() - 0.4624).abs() < 1e-4);
        assert!(ChannelParams::new(6.7, 0.0, 8).is_err());
        assert!(ChannelParams::new(6.7, 1.5, 8).is_err());
        assert!(ChannelParams::new(f64::NAN, 0.5, 8).is_err());
        assert!(ChannelParams::new(6.7, 0.5, 1).is_err());
    }

    #[test]
    fn zero_radius() {
        let (ch, we) = hamming_setup();
        let row = compose(0.0, &ch, &we).unwrap();
        assert_eq!(row.p_tot_gt, 1.0);
        assert_eq!(row.p_u_lt, 0.0);
        assert_eq!(row.p_u_gt, 0.0);
        assert_eq!(row.p_w, 1.0);
        assert_eq!(row.p_u, 0.0);
    }

    #[test]
    fn empty_sum_below_dmin() {
        let (ch, we) = hamming_setup();
        assert_eq!(p_u_lt_bound(1.9, &ch, &we).unwrap(), 0.0);
        // √w = r_d exactly: zero-width integral.
        assert_eq!(p_u_lt_bound(2.0, &ch, &we).unwrap(), 0.0);
        assert!(p_u_lt_bound(2.01, &ch, &we).unwrap() > 0.0);
    }

    #[test]
    fn large_radius_limits() {
        let (ch, we) = hamming_setup();
        assert!(p_tot_gt(50.0, &ch).unwrap() < 1e-300);
        assert!(p_u_gt_bound(50.0, &ch, &we).unwrap() < 1e-200);
    }

    #[test]
    fn negative_radius_rejected() {
        let (ch, we) = hamming_setup();
        assert!(matches!(compose(-0.1, &ch, &we), Err(BoundsError::Domain { .. })));
        assert!(p_tot_gt(f64::NAN, &ch).is_err());
    }

    #[test]
    fn block_length_mismatch() {
        let (_, we) = hamming_setup();
        let ch = ChannelParams::new(6.7, 0.5, 16).unwrap();
        assert!(matches!(compose(1.0, &ch, &we), Err(BoundsError::BlockLength { .. })));
    }

    #[test]
    fn gt_angle_is_zero_at_sphere_intersections() {
        let (ch, we) = hamming_setup();
        let calc = BoundCalculator::new(ch, &we, QuadratureSpec::default()).unwrap();
        for &w in &[4usize, 8] {
            for &r_d in &[0.3, 1.0, 1.7, 2.5] {
                let s = 2.0 * (w as f64).sqrt();
                assert!(calc.sin2_phi_gt(w, r_d, s + r_d).unwrap() < 1e-12, "w={w} r_d={r_d}");
                assert_eq!(calc.p_u_gt_integrand(w, r_d, s + r_d).unwrap(), 0.0);
                if s - r_d > 0.0 {
                    assert!(calc.sin2_phi_gt(w, r_d, s - r_d).unwrap() < 1e-12);
                    assert_eq!(calc.p_u_gt_integrand(w, r_d, s - r_d).unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn lt_integrand_vanishes_at_lower_limit() {
        let (ch, we) = hamming_setup();
        let calc = BoundCalculator::new(ch, &we, QuadratureSpec::default()).unwrap();
        assert_eq!(calc.p_u_lt_integrand(4, 2.0).unwrap(), 0.0);
        assert_eq!(calc.p_u_lt_integrand(8, 8f64.sqrt()).unwrap(), 0.0);
        assert!(calc.p_u_lt_integrand(4, 2.1).unwrap() > 0.0);
    }

    #[test]
    fn angle_spill_is_an_error() {
        let (ch, we) = hamming_setup();
        let calc = BoundCalculator::new(ch, &we, QuadratureSpec::default()).unwrap();
        // r far outside the interval [2√w - r_d, 2√w + r_d]
        assert!(matches!(calc.sin2_phi_gt(4, 0.5, 10.0), Err(BoundsError::Angle { .. })));
    }

    #[test]
    fn composition_identities() {
        let (ch, we) = hamming_setup();
        for &r_d in &[0.5, 1.5, 2.2, 3.0, 4.0] {
            let row = compose(r_d, &ch, &we).unwrap();
            assert_eq!(row.p_w, row.p_u_lt + row.p_tot_gt);
            assert_eq!(row.p_u, row.p_u_lt + row.p_u_gt);
            assert!(row.p_w >= row.p_tot_gt.max(row.p_u_lt));
            assert!(row.p_u_lt >= 0.0 && row.p_u_gt >= 0.0);
            assert!(!row.truncated_enumerator);
        }
    }

    #[test]
    fn ml_limit() {
        let (ch, we) = hamming_setup();
        let ml = ml_union_bound(&ch, &we);
        let direct = 14.0 * gaussian_q(2.0 / ch.sigma()) + gaussian_q(8f64.sqrt() / ch.sigma());
        assert_eq!(ml, direct);
        assert!((ml - 1.07e-4).abs() < 0.01e-4, "{ml}");
        let far = p_u_lt_bound(3.0 * 8f64.sqrt(), &ch, &we).unwrap();
        assert!((far - ml).abs() <= 1e-6 * ml, "{far} vs {ml}");
    }

    #[test]
    fn ml_bound_of_empty_enumerator() {
        let we = WeightEnumerator::from_terms(8, 4, &[], true).unwrap();
        let ch = ChannelParams::new(6.7, 0.5, 8).unwrap();
        assert_eq!(ml_union_bound(&ch, &we), 0.0);
        assert_eq!(compose(3.0, &ch, &we).unwrap().p_u, 0.0);
    }

    #[test]
    fn ldpc_ml_bound_uses_known_terms() {
        let we = builtin_ldpc_128_64_weight_enum();
        let ch = ChannelParams::new(4.0, 0.5, 128).unwrap();
        let ml = ml_union_bound(&ch, &we);
        let s = ch.sigma();
        let direct = 16.0 * gaussian_q(14f64.sqrt() / s)
            + 512.0 * gaussian_q(16f64.sqrt() / s)
            + 5344.0 * gaussian_q(18f64.sqrt() / s);
        assert!(ml.is_finite() && ml > 0.0);
        assert!((ml - direct).abs() <= 1e-15 * direct);
    }

    #[test]
    fn sweep_preserves_order_and_monotonicity() {
        let (ch, we) = hamming_setup();
        let grid: Vec<f64> = (0..50).map(|i| 1.0 + 3.0 * i as f64 / 49.0).collect();
        let rows: Vec<_> = sweep(&ch, &we, &grid, &QuadratureSpec::default())
            .unwrap()
            .into_iter()
            .map(Result::unwrap)
            .collect();
        assert_eq!(rows.len(), 50);
        for (pair, r) in rows.windows(2).zip(&grid[1..]) {
            assert_eq!(pair[1].r_d, *r);
            assert!(pair[1].p_tot_gt < pair[0].p_tot_gt);
            assert!(pair[1].p_u_lt >= pair[0].p_u_lt);
        }
    }

    #[test]
    fn sweep_rejects_bad_grid() {
        let (ch, we) = hamming_setup();
        let q = QuadratureSpec::default();
        assert!(matches!(sweep(&ch, &we, &[1.0, 1.0], &q), Err(BoundsError::Grid { index: 1 })));
        assert!(matches!(sweep(&ch, &we, &[-1.0], &q), Err(BoundsError::Grid { index: 0 })));
        let single = sweep(&ch, &we, &[0.0], &q).unwrap();
        assert_eq!(single[0].as_ref().unwrap().p_w, 1.0);
    }

    #[test]
    fn truncated_enumerator_is_flagged() {
        let we = builtin_ldpc_128_64_weight_enum();
        let ch = ChannelParams::new(4.0, 0.5, 128).unwrap();
        let row = compose(5.0, &ch, &we).unwrap();
        assert!(row.truncated_enumerator);
        assert!(row.p_u_lt > 0.0);
    }

    #[test]
    fn single_precision_agrees() {
        let (ch, we) = hamming_setup();
        let ch32 = ChannelParams::new(6.7f32, 0.5, 8).unwrap();
        for &r_d in &[1.5, 2.5, 3.5] {
            let a = compose(r_d, &ch, &we).unwrap();
            let b = compose(r_d as f32, &ch32, &we).unwrap();
            assert!(((b.p_w as f64) - a.p_w).abs() <= 1e-4 * a.p_w, "{r_d}");
            assert!(((b.p_u as f64) - a.p_u).abs() <= 1e-3 * a.p_u.max(1e-12), "{r_d}");
        }
    }
}
