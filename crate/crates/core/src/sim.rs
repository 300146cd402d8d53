//! Monte Carlo simulation of the bounded-distance decoder on the AWGN channel.
//!
//! Every trial's randomness is a pure function of `(seed, trial index)`: a
//! ChaCha8 stream keyed by the seed is consumed at a fixed number of words per
//! trial, so trial `t` starts at word `t * words_per_trial`. Batches and
//! threads only partition the index range, and counts are merged by addition,
//! so results do not depend on either.

use std::ops::Range;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::{p_tot_gt, BoundsError, ChannelParams};
use crate::code::{bpsk_modulate, LinearCode};
use crate::specfun::gaussian_q;

pub const DEFAULT_TRIALS: u64 = 10_000_000;
pub const DEFAULT_BATCH_SIZE: u64 = 1 << 16;
pub const DEFAULT_CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("number of trials must be at least 1")]
    ZeroTrials,
    #[error("batch size must be at least 1")]
    ZeroBatch,
    #[error("decoding radius must be nonnegative and finite, got {0}")]
    Radius(f64),
    #[error("received vector has dimension {found}, code has n={expected}")]
    Dimension { expected: usize, found: usize },
    #[error("code block length {code} does not match channel block length {channel}")]
    BlockLength { code: usize, channel: usize },
    #[error("invalid confidence interval input: {0}")]
    Interval(&'static str),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// Which codeword each trial transmits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Transmit {
    /// The all-zero codeword (index 0) every trial.
    #[default]
    AllZero,
    /// A uniformly random codeword per trial; used to check that error rates
    /// do not depend on the transmitted word.
    RandomCodeword,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub r_d: f64,
    pub channel: ChannelParams<f64>,
    pub batch_size: u64,
    pub transmit: Transmit,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64, r_d: f64, channel: ChannelParams<f64>) -> Self {
        Self { trials, seed, r_d, channel, batch_size: DEFAULT_BATCH_SIZE, transmit: Transmit::AllZero }
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::ZeroTrials);
        }
        if self.batch_size == 0 {
            return Err(SimError::ZeroBatch);
        }
        check_radius(self.r_d)
    }
}

fn check_radius(r_d: f64) -> Result<(), SimError> {
    if r_d >= 0.0 && r_d.is_finite() {
        Ok(())
    } else {
        Err(SimError::Radius(r_d))
    }
}

/// Decoder output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Decoded(usize),
    Failure,
}

/// Bounded-distance decoder over the BPSK images of an enumerated code.
#[derive(Debug, Clone)]
pub struct BdDecoder {
    n: usize,
    points: Vec<f64>,
}

impl BdDecoder {
    pub fn new(code: &LinearCode) -> Self {
        let list = code.codewords();
        let points = (0..list.len()).flat_map(|i| bpsk_modulate::<f64>(&list.bits(i))).collect();
        Self { n: code.n(), points }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn codeword_count(&self) -> usize {
        self.points.len() / self.n
    }

    /// Modulated codeword `i`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.n..(i + 1) * self.n]
    }

    /// Closest codeword and its squared distance; ties go to the lowest index.
    pub fn nearest(&self, y: &[f64]) -> Result<(usize, f64), SimError> {
        if y.len() != self.n {
            return Err(SimError::Dimension { expected: self.n, found: y.len() });
        }
        Ok(self.nearest_unchecked(y))
    }

    #[inline]
    fn nearest_unchecked(&self, y: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, x) in self.points.chunks_exact(self.n).enumerate() {
            let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 < best.1 {
                best = (i, d2);
            }
        }
        best
    }

    /// Closest codeword if it lies within `r_d` of `y`, else failure.
    pub fn decode(&self, y: &[f64], r_d: f64) -> Result<Outcome, SimError> {
        check_radius(r_d)?;
        let (i, d2) = self.nearest(y)?;
        Ok(if d2 <= r_d * r_d { Outcome::Decoded(i) } else { Outcome::Failure })
    }
}

/// One-shot bounded-distance decode. Builds the modulated codebook on every
/// call; loops should hold a [`BdDecoder`].
pub fn bd_decode(y: &[f64], code: &LinearCode, r_d: f64) -> Result<Outcome, SimError> {
    BdDecoder::new(code).decode(y, r_d)
}

/// Counter-addressed Gaussian noise source.
struct NoiseStream {
    rng: ChaCha8Rng,
    n: usize,
}

impl NoiseStream {
    /// 32-bit ChaCha words used per trial: two u64 per Box–Muller pair plus
    /// one u64 codeword draw.
    fn words_per_trial(n: usize) -> u128 {
        (4 * n.div_ceil(2) + 2) as u128
    }

    fn at(seed: u64, n: usize, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_word_pos(trial as u128 * Self::words_per_trial(n));
        Self { rng, n }
    }

    #[inline]
    fn unit_open(&mut self) -> f64 {
        // (0, 1]
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fills `noise` with i.i.d. N(0, σ²) and returns the codeword draw.
    #[inline]
    fn next_trial(&mut self, sigma: f64, noise: &mut [f64]) -> u64 {
        debug_assert_eq!(noise.len(), self.n);
        let mut j = 0;
        while j < self.n {
            let radius = sigma * (-2.0 * self.unit_open().ln()).sqrt();
            let angle = std::f64::consts::TAU * self.unit_open();
            let (s, c) = angle.sin_cos();
            noise[j] = radius * c;
            if j + 1 < self.n {
                noise[j + 1] = radius * s;
            }
            j += 2;
        }
        self.rng.next_u64()
    }
}

/// Raw outcome counts. Merging is plain addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub trials: u64,
    pub correct: u64,
    pub undetected: u64,
    pub failure: u64,
    /// Trials whose noise norm exceeded r_d, regardless of decoding.
    pub radius_exceed: u64,
}

impl Counts {
    fn merge(self, o: Self) -> Self {
        Self {
            trials: self.trials + o.trials,
            correct: self.correct + o.correct,
            undetected: self.undetected + o.undetected,
            failure: self.failure + o.failure,
            radius_exceed: self.radius_exceed + o.radius_exceed,
        }
    }
}

/// Wilson score interval for a binomial proportion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilsonInterval {
    pub center: f64,
    pub half_width: f64,
    pub level: f64,
}

impl WilsonInterval {
    pub fn lower(&self) -> f64 {
        (self.center - self.half_width).max(0.0)
    }

    pub fn upper(&self) -> f64 {
        (self.center + self.half_width).min(1.0)
    }
}

/// Two-sided standard normal quantile for a confidence level, by bisection on
/// the Gaussian tail.
pub fn normal_quantile(level: f64) -> f64 {
    let tail = 0.5 * (1.0 - level);
    let (mut lo, mut hi) = (0.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gaussian_q(mid) > tail {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Wilson score interval. Stays nondegenerate at 0 and `trials` successes.
pub fn confidence_interval(successes: u64, trials: u64, level: f64) -> Result<WilsonInterval, SimError> {
    if trials == 0 {
        return Err(SimError::Interval("trials must be at least 1"));
    }
    if successes > trials {
        return Err(SimError::Interval("successes exceed trials"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(SimError::Interval("confidence level must be in (0, 1)"));
    }
    let z = normal_quantile(level);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2n = z * z / n;
    let denom = 1.0 + z2n;
    let center = (p + 0.5 * z2n) / denom;
    let half_width = z / denom * (p * (1.0 - p) / n + 0.25 * z2n / n).sqrt();
    Ok(WilsonInterval { center, half_width, level })
}

/// sqrt(p(1−p)/N).
pub fn binomial_se(p: f64, trials: u64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    (p * (1.0 - p) / trials as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub r_d: f64,
    pub counts: Counts,
    pub p_c: f64,
    pub p_u: f64,
    pub p_f: f64,
    /// p_u + p_f
    pub p_w: f64,
    /// Fraction of trials with noise norm above r_d.
    pub p_tot_gt: f64,
    pub ci_c: WilsonInterval,
    pub ci_u: WilsonInterval,
    pub ci_f: WilsonInterval,
    pub ci_w: WilsonInterval,
}

impl SimResult {
    fn from_counts(r_d: f64, counts: Counts) -> Self {
        let n = counts.trials as f64;
        let ci = |k: u64| confidence_interval(k, counts.trials, DEFAULT_CONFIDENCE).expect("counts are consistent");
        let errors = counts.undetected + counts.failure;
        Self {
            r_d,
            counts,
            p_c: counts.correct as f64 / n,
            p_u: counts.undetected as f64 / n,
            p_f: counts.failure as f64 / n,
            p_w: errors as f64 / n,
            p_tot_gt: counts.radius_exceed as f64 / n,
            ci_c: ci(counts.correct),
            ci_u: ci(counts.undetected),
            ci_f: ci(counts.failure),
            ci_w: ci(errors),
        }
    }
}

fn check_channel(code: &LinearCode, ch: &ChannelParams<f64>) -> Result<(), SimError> {
    if code.n() != ch.n() {
        return Err(SimError::BlockLength { code: code.n(), channel: ch.n() });
    }
    Ok(())
}

/// Shared trial loop: each trial is classified at every radius in `radii`.
fn simulate_batches(
    decoder: &BdDecoder,
    cfg: &SimConfig,
    radii: &[f64],
) -> Vec<Counts> {
    let n = decoder.n();
    let sigma = cfg.channel.sigma();
    let mask = decoder.codeword_count() as u64 - 1;
    let r2: Vec<f64> = radii.iter().map(|r| r * r).collect();
    let batches = cfg.trials.div_ceil(cfg.batch_size);

    let per_batch = |b: u64| -> Vec<Counts> {
        let start = b * cfg.batch_size;
        let end = (start + cfg.batch_size).min(cfg.trials);
        let mut stream = NoiseStream::at(cfg.seed, n, start);
        let mut noise = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut counts = vec![Counts::default(); radii.len()];
        for _ in start..end {
            let draw = stream.next_trial(sigma, &mut noise);
            let sent = match cfg.transmit {
                Transmit::AllZero => 0,
                Transmit::RandomCodeword => (draw & mask) as usize,
            };
            for ((yj, xj), nj) in y.iter_mut().zip(decoder.point(sent)).zip(&noise) {
                *yj = xj + nj;
            }
            let noise2: f64 = noise.iter().map(|v| v * v).sum();
            let (best, d2) = decoder.nearest_unchecked(&y);
            for (c, &rr) in counts.iter_mut().zip(&r2) {
                c.trials += 1;
                if noise2 > rr {
                    c.radius_exceed += 1;
                }
                if d2 > rr {
                    c.failure += 1;
                } else if best == sent {
                    c.correct += 1;
                } else {
                    c.undetected += 1;
                }
            }
        }
        counts
    };

    (0..batches)
        .into_par_iter()
        .map(per_batch)
        .reduce(
            || vec![Counts::default(); radii.len()],
            |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect(),
        )
}

/// Simulates `cfg.trials` transmissions and classifies each decode.
pub fn run(code: &LinearCode, cfg: &SimConfig) -> Result<SimResult, SimError> {
    Ok(run_grid(code, cfg, &[cfg.r_d])?.remove(0))
}

/// Like [`run`] at several radii over one shared set of noise realizations.
/// Entry `i` equals `run` with `r_d = radii[i]` and the same seed.
pub fn run_grid(code: &LinearCode, cfg: &SimConfig, radii: &[f64]) -> Result<Vec<SimResult>, SimError> {
    cfg.validate()?;
    check_channel(code, &cfg.channel)?;
    for &r in radii {
        check_radius(r)?;
    }
    let decoder = BdDecoder::new(code);
    let counts = simulate_batches(&decoder, cfg, radii);
    Ok(radii.iter().zip(counts).map(|(&r, c)| SimResult::from_counts(r, c)).collect())
}

/// Per-trial decoder outputs for a range of trial indices, replaying exactly
/// the noise [`run`] would draw for them. Also returns the transmitted index.
pub fn replay(
    code: &LinearCode,
    cfg: &SimConfig,
    trials: Range<u64>,
) -> Result<Vec<(usize, Outcome)>, SimError> {
    check_radius(cfg.r_d)?;
    check_channel(code, &cfg.channel)?;
    let decoder = BdDecoder::new(code);
    let n = decoder.n();
    let mask = decoder.codeword_count() as u64 - 1;
    let mut stream = NoiseStream::at(cfg.seed, n, trials.start);
    let mut noise = vec![0.0; n];
    let mut out = Vec::with_capacity((trials.end.saturating_sub(trials.start)) as usize);
    for _ in trials {
        let draw = stream.next_trial(cfg.channel.sigma(), &mut noise);
        let sent = match cfg.transmit {
            Transmit::AllZero => 0,
            Transmit::RandomCodeword => (draw & mask) as usize,
        };
        let y: Vec<f64> = decoder.point(sent).iter().zip(&noise).map(|(x, e)| x + e).collect();
        out.push((sent, decoder.decode(&y, cfg.r_d)?));
    }
    Ok(out)
}

/// Simulated vs analytic probability that the noise norm exceeds r_d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureRateCheck {
    pub r_d: f64,
    pub trials: u64,
    pub exceed: u64,
    pub simulated: f64,
    pub analytic: f64,
    /// (simulated − analytic) / sqrt(analytic(1 − analytic)/N)
    pub z: f64,
}

/// Counts raw noise norms above `cfg.r_d` (no decoding) and compares with
/// the exact chi tail.
pub fn failure_rate_check(cfg: &SimConfig) -> Result<FailureRateCheck, SimError> {
    Ok(failure_rate_grid(cfg, &[cfg.r_d])?.remove(0))
}

/// [`failure_rate_check`] at several radii over shared noise.
pub fn failure_rate_grid(cfg: &SimConfig, radii: &[f64]) -> Result<Vec<FailureRateCheck>, SimError> {
    cfg.validate()?;
    for &r in radii {
        check_radius(r)?;
    }
    let n = cfg.channel.n();
    let sigma = cfg.channel.sigma();
    let r2: Vec<f64> = radii.iter().map(|r| r * r).collect();
    let batches = cfg.trials.div_ceil(cfg.batch_size);
    let exceed = (0..batches)
        .into_par_iter()
        .map(|b| {
            let start = b * cfg.batch_size;
            let end = (start + cfg.batch_size).min(cfg.trials);
            let mut stream = NoiseStream::at(cfg.seed, n, start);
            let mut noise = vec![0.0; n];
            let mut counts = vec![0u64; radii.len()];
            for _ in start..end {
                stream.next_trial(sigma, &mut noise);
                let norm2: f64 = noise.iter().map(|v| v * v).sum();
                for (c, &rr) in counts.iter_mut().zip(&r2) {
                    *c += u64::from(norm2 > rr);
                }
            }
            counts
        })
        .reduce(|| vec![0; radii.len()], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());

    radii
        .iter()
        .zip(exceed)
        .map(|(&r_d, exceed)| {
            let analytic = p_tot_gt(r_d, &cfg.channel)?;
            let simulated = exceed as f64 / cfg.trials as f64;
            Ok(FailureRateCheck { r_d, trials: cfg.trials, exceed, simulated, analytic, z: z_score(simulated, analytic, cfg.trials) })
        })
        .collect()
}

/// Deviation of an observed proportion from an expected one in units of the
/// binomial standard error under the expected value.
pub fn z_score(observed: f64, expected: f64, trials: u64) -> f64 {
    let diff = observed - expected;
    let se = binomial_se(expected, trials);
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}
