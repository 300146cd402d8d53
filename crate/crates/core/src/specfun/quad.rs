//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::Real;

use super::QuadError;

// 15-point Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and work limit for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Maximum number of subintervals in the adaptive partition.
    pub max_subdivisions: usize,
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(rel_tol: T, abs_tol: T, max_subdivisions: usize) -> Result<Self, QuadError> {
        if !(rel_tol > T::zero()) || !rel_tol.is_finite() {
            return Err(QuadError::InvalidSpec("rel_tol must be positive and finite"));
        }
        if !(abs_tol >= T::zero()) || !abs_tol.is_finite() {
            return Err(QuadError::InvalidSpec("abs_tol must be nonnegative and finite"));
        }
        if max_subdivisions == 0 {
            return Err(QuadError::InvalidSpec("max_subdivisions must be at least 1"));
        }
        Ok(Self { rel_tol, abs_tol, max_subdivisions })
    }

    /// Same spec with a different relative tolerance.
    pub fn with_rel_tol(self, rel_tol: T) -> Result<Self, QuadError> {
        Self::new(rel_tol, self.abs_tol, self.max_subdivisions)
    }
}

impl<T: Real> Default for QuadratureSpec<T> {
    /// rel 1e-10, abs 1e-14, 10^4 subintervals. For `f32` the relative
    /// tolerance is raised to 100 ulp since 1e-10 is unreachable.
    fn default() -> Self {
        let floor = T::epsilon() * T::lit(100.0);
        Self {
            rel_tol: T::lit(1e-10).max(floor),
            abs_tol: T::lit(1e-14),
            max_subdivisions: 10_000,
        }
    }
}

/// Converged integral with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub abs_error: T,
    /// Subintervals in the final partition.
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Real> Eq for Segment<T> {}

impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.as_f64().total_cmp(&other.error.as_f64())
    }
}

// QUADPACK-style error rescaling of |K15 - G7|.
fn rescale_error<T: Real>(err: T, res_abs: T, res_asc: T) -> T {
    let mut scaled = err.abs();
    if res_asc != T::zero() && scaled != T::zero() {
        let scale = (T::lit(200.0) * scaled / res_asc).powf(T::lit(1.5));
        scaled = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let fifty_eps = T::lit(50.0) * T::epsilon();
    if res_abs > T::min_positive_value() / fifty_eps {
        scaled = scaled.max(fifty_eps * res_abs);
    }
    scaled
}

fn eval<T: Real, F: Fn(T) -> T>(f: &F, x: T) -> Result<T, QuadError> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(QuadError::NonFinite { at: x.as_f64() })
    }
}

fn gauss_kronrod_15<T: Real, F: Fn(T) -> T>(f: &F, lo: T, hi: T) -> Result<Segment<T>, QuadError> {
    let center = T::half() * (lo + hi);
    let half_len = T::half() * (hi - lo);

    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];

    let f_center = eval(f, center)?;
    let mut res_gauss = f_center * T::lit(WG[3]);
    let mut res_kronrod = f_center * T::lit(WGK[7]);
    let mut res_abs = res_kronrod.abs();

    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        let wk = T::lit(WGK[j]);
        res_kronrod = res_kronrod + wk * (f1 + f2);
        res_abs = res_abs + wk * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_gauss = res_gauss + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = res_kronrod * T::half();
    let mut res_asc = T::lit(WGK[7]) * (f_center - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let abs_half = half_len.abs();
    let err = (res_kronrod - res_gauss) * half_len;
    Ok(Segment {
        lo,
        hi,
        value: res_kronrod * half_len,
        error: rescale_error(err, res_abs * abs_half, res_asc * abs_half),
    })
}

/// Integrates `f` over `[lo, hi]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// error estimate is at most `max(abs_tol, rel_tol * |value|)`. Running out of
/// subintervals is an error carrying the best estimate, never a silent result.
pub fn integrate<T, F>(f: F, lo: T, hi: T, spec: &QuadratureSpec<T>) -> Result<Integral<T>, QuadError>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(QuadError::InvalidLimits { lo: lo.as_f64(), hi: hi.as_f64() });
    }
    if lo == hi {
        return Ok(Integral { value: T::zero(), abs_error: T::zero(), subdivisions: 1 });
    }

    let first = gauss_kronrod_15(&f, lo, hi)?;
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::with_capacity(64);
    heap.push(first);

    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        if heap.len() >= spec.max_subdivisions {
            return Err(QuadError::NotConverged {
                value: total.as_f64(),
                abs_error: total_err.as_f64(),
                subdivisions: heap.len(),
            });
        }
        let worst = heap.pop().expect("partition is never empty");
        let mid = T::half() * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            // Interval at machine resolution; cannot refine further.
            heap.push(worst);
            return Err(QuadError::NotConverged {
                value: total.as_f64(),
                abs_error: total_err.as_f64(),
                subdivisions: heap.len(),
            });
        }
        let left = gauss_kronrod_15(&f, worst.lo, mid)?;
        let right = gauss_kronrod_15(&f, mid, worst.hi)?;
        total = total - worst.value + left.value + right.value;
        total_err = total_err - worst.error + left.error + right.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the drift of the running totals.
    let (value, abs_error) = heap
        .iter()
        .fold((T::zero(), T::zero()), |(v, e), s| (v + s.value, e + s.error));
    Ok(Integral { value, abs_error, subdivisions: heap.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::default()
    }

    #[test]
    fn constant_and_sine() {
        let one = integrate(|_| 1.0, 0.0, 1.0, &spec()).unwrap();
        assert!((one.value - 1.0).abs() < 1e-15);
        let s = integrate(f64::sin, 0.0, PI, &spec()).unwrap();
        assert!((s.value - 2.0).abs() < 1e-13);
        assert!(s.abs_error <= 1e-10 * 2.0);
    }

    #[test]
    fn empty_interval_is_zero() {
        let r = integrate(|x: f64| x, 3.0, 3.0, &spec()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn endpoint_singularity_converges() {
        // ∫₀¹ x^{-1/2} = 2
        let r = integrate(|x: f64| if x > 0.0 { x.powf(-0.5) } else { 0.0 }, 0.0, 1.0, &spec()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            integrate(|x: f64| x, 1.0, 0.0, &spec()),
            Err(QuadError::InvalidLimits { .. })
        ));
        assert!(matches!(
            integrate(|x: f64| 1.0 / x, -1.0, 1.0, &spec()),
            Err(QuadError::NonFinite { .. })
        ));
        assert!(QuadratureSpec::new(0.0, 0.0, 10).is_err());
        assert!(QuadratureSpec::new(1e-8, -1.0, 10).is_err());
        assert!(QuadratureSpec::new(1e-8, 0.0, 0).is_err());
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let tight = QuadratureSpec::new(1e-15, 0.0, 2).unwrap();
        let r = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &tight);
        assert!(matches!(r, Err(QuadError::NotConverged { .. })), "{r:?}");
    }

    #[test]
    fn works_in_single_precision() {
        let r = integrate(|x: f32| x * x, 0.0, 3.0, &QuadratureSpec::default()).unwrap();
        assert!((r.value - 9.0).abs() < 1e-4);
    }
}
