//! Union-bound terms and the exact tail term checked against brute-force
//! noise sampling around the all-zero codeword. The sampler here (StdRng +
//! ziggurat normals) is unrelated to the simulator's.

use bdbound::bounds::{compose, ml_union_bound, p_tot_gt, p_u_gt_bound, p_u_lt_bound, BoundCalculator};
use bdbound::code::builtin_extended_hamming_8_4;
use bdbound::specfun::{chi_cdf, gaussian_q, QuadratureSpec};
use bdbound::ChannelParams64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

fn hamming_channel() -> ChannelParams64 {
    ChannelParams64::new(6.7, 0.5, 8).unwrap()
}

struct Estimate {
    mean: f64,
    se: f64,
}

fn estimate(sum: f64, sum_sq: f64, trials: u64) -> Estimate {
    let n = trials as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Estimate { mean, se: (var / n).sqrt() }
}

/// Per trial counts, over incorrect codewords i, the events
/// r_i ≤ r_0 ≤ lt_radius and r_i ≤ gt_radius < r_0.
fn union_summand_oracle(trials: u64, lt_radius: f64, gt_radius: f64) -> (Estimate, Estimate) {
    let code = builtin_extended_hamming_8_4();
    let list = code.codewords();
    let sigma = hamming_channel().sigma();
    // y − x_i = e + 2·1[bit set] when x_0 = (+1, …, +1).
    let offsets: Vec<[f64; 8]> = (1..list.len())
        .map(|i| {
            let bits = list.bits(i);
            std::array::from_fn(|j| 2.0 * bits[j] as f64)
        })
        .collect();
    let mut rng = StdRng::seed_from_u64(0x5eed_0b5e);
    let (mut lt, mut lt2, mut gt, mut gt2) = (0.0, 0.0, 0.0, 0.0);
    let (lt_r2, gt_r2) = (lt_radius * lt_radius, gt_radius * gt_radius);
    for _ in 0..trials {
        let e: [f64; 8] = std::array::from_fn(|_| sigma * rng.sample::<f64, _>(StandardNormal));
        let r0: f64 = e.iter().map(|v| v * v).sum();
        let (mut c_lt, mut c_gt) = (0u32, 0u32);
        for off in &offsets {
            let ri: f64 = e.iter().zip(off).map(|(a, b)| (a + b) * (a + b)).sum();
            if ri <= r0 && r0 <= lt_r2 {
                c_lt += 1;
            }
            if ri <= gt_r2 && gt_r2 < r0 {
                c_gt += 1;
            }
        }
        lt += c_lt as f64;
        lt2 += (c_lt * c_lt) as f64;
        gt += c_gt as f64;
        gt2 += (c_gt * c_gt) as f64;
    }
    (estimate(lt, lt2, trials), estimate(gt, gt2, trials))
}

#[test]
fn union_terms_match_direct_sampling() {
    let ch = hamming_channel();
    let we = builtin_extended_hamming_8_4().weight_enumerator().clone();
    let (lt, gt) = union_summand_oracle(100_000_000, 2.2, 1.8);

    let lt_bound = p_u_lt_bound(2.2, &ch, &we).unwrap();
    println!("p_u_lt(2.2) = {lt_bound:.6e}, sampled {:.6e} ± {:.2e}", lt.mean, lt.se);
    assert!((lt_bound - lt.mean).abs() <= 3.0 * lt.se);

    let gt_bound = p_u_gt_bound(1.8, &ch, &we).unwrap();
    println!("p_u_gt(1.8) = {gt_bound:.6e}, sampled {:.6e} ± {:.2e}", gt.mean, gt.se);
    assert!((gt_bound - gt.mean).abs() <= 3.0 * gt.se);
}

#[test]
fn exact_tail_matches_sampled_noise_norms() {
    let sigma = hamming_channel().sigma();
    let trials = 10_000_000u64;
    let mut rng = StdRng::seed_from_u64(2024);
    let mut outside = 0u64;
    for _ in 0..trials {
        let r2: f64 = (0..8).map(|_| (sigma * rng.sample::<f64, _>(StandardNormal)).powi(2)).sum();
        outside += u64::from(r2 > 4.0);
    }
    let p = p_tot_gt(2.0, &hamming_channel()).unwrap();
    let sampled = outside as f64 / trials as f64;
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    assert!((p - sampled).abs() <= 3.0 * se, "{p} vs {sampled} ± {se}");
}

#[test]
fn exact_tail_equals_chi_complement() {
    let ch = hamming_channel();
    for i in 0..=40 {
        let r_d = 0.1 * i as f64;
        let a = p_tot_gt(r_d, &ch).unwrap();
        let b = 1.0 - chi_cdf(r_d / ch.sigma(), 8).unwrap();
        assert!((a - b).abs() <= 1e-12, "r_d={r_d}");
    }
}

#[test]
fn ml_limit_and_gaussian_pairwise_terms() {
    let ch = hamming_channel();
    let we = builtin_extended_hamming_8_4().weight_enumerator().clone();
    // Σ A_w Q(√(2 R (E_b/N_0) w)), written without σ.
    let snr = 10f64.powf(0.67);
    let oracle = 14.0 * gaussian_q((2.0 * 0.5 * snr * 4.0).sqrt()) + gaussian_q((2.0 * 0.5 * snr * 8.0).sqrt());
    let ml = ml_union_bound(&ch, &we);
    assert!((ml - oracle).abs() <= 1e-12 * oracle);
    assert!((ml - 1.07e-4).abs() < 0.005e-4, "{ml}");

    let far = p_u_lt_bound(3.0 * 8f64.sqrt(), &ch, &we).unwrap();
    assert!((far - ml).abs() <= 1e-6 * ml);
    let row = compose(3.0 * 8f64.sqrt(), &ch, &we).unwrap();
    assert!((row.p_w - ml).abs() <= 1e-6 * ml);
    assert!((row.p_u - ml).abs() <= 1e-6 * ml);
}

#[test]
fn gt_integrand_vanishes_at_both_limits_inside_min_distance() {
    let ch = hamming_channel();
    let we = builtin_extended_hamming_8_4().weight_enumerator().clone();
    let calc = BoundCalculator::new(ch, &we, QuadratureSpec::default()).unwrap();
    for i in 0..=20 {
        let r_d = 2.0 * i as f64 / 20.0;
        for (w, _) in we.nonzero_terms() {
            let (lo, hi) = calc.p_u_gt_limits(w, r_d);
            assert_eq!(calc.p_u_gt_integrand(w, r_d, lo).unwrap(), 0.0, "w={w} r_d={r_d}");
            assert_eq!(calc.p_u_gt_integrand(w, r_d, hi).unwrap(), 0.0, "w={w} r_d={r_d}");
        }
    }
}

#[test]
fn bounds_are_monotone_and_nonnegative_on_fine_grid() {
    let ch = hamming_channel();
    let we = builtin_extended_hamming_8_4().weight_enumerator().clone();
    let calc = BoundCalculator::new(ch, &we, QuadratureSpec::default()).unwrap();
    let mut prev = calc.row(0.0).unwrap();
    for i in 1..=300 {
        let row = calc.row(0.02 * i as f64).unwrap();
        assert!(row.p_u_lt >= prev.p_u_lt, "p_u_lt decreased at {}", row.r_d);
        if prev.p_tot_gt > 1e-300 {
            assert!(row.p_tot_gt < prev.p_tot_gt, "p_tot_gt not decreasing at {}", row.r_d);
        }
        assert!(row.p_u_gt >= 0.0 && row.p_tot_gt >= 0.0);
        prev = row;
    }
}
