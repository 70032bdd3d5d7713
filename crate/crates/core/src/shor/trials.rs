use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::modnum::{gcd, mod_mul, totient, ModCtx};
use crate::Variant;

use super::sampler::semiclassical_sample;
use super::{ConfigEcho, OrderFindConfig, Result, ShorError, TrialResult};

/// z for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ConfigEcho,
    pub trials: Vec<TrialResult>,
    pub successes: u64,
    pub success_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Wilson score interval for `successes` out of `n`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Runs `trials` independent samples. Trial `i` draws from ChaCha8 seeded
/// with the config seed on stream `i`, so results do not depend on `jobs`
/// (0 lets rayon choose).
pub fn run_trials(config: &OrderFindConfig, trials: u64, jobs: usize) -> Result<ExperimentResult> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ShorError::ThreadPool(e.to_string()))?;
    let results: Vec<TrialResult> = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(i);
                semiclassical_sample(config, i, &mut rng)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let successes = results.iter().filter(|t| t.success).count() as u64;
    let (ci_low, ci_high) = wilson_interval(successes, trials, Z95);
    Ok(ExperimentResult {
        config: config.echo(),
        trials: results,
        successes,
        success_rate: if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        },
        ci_low,
        ci_high,
    })
}

/// Period of `x -> a x mod N` starting from `v`.
fn orbit_period(v: u64, a: u64, n: u64) -> u64 {
    let mut x = mod_mul(v, a, n);
    let mut k = 1;
    while x != v {
        x = mod_mul(x, a, n);
        k += 1;
    }
    k
}

/// Fraction of uniformly random starting pairs `(alpha, beta)` in
/// `[0, N)^2` for which the register pair still cycles with the full order
/// of `a`. For initialized variants this is 1.
pub fn period_preserving_fraction(ctx: &ModCtx, variant: Variant) -> f64 {
    if !variant.uninitialized() {
        return 1.0;
    }
    let n = ctx.n_value();
    let r = ctx.order();
    let periods: Vec<u64> = (0..n).map(|v| orbit_period(v, ctx.base(), n)).collect();
    let mut good = 0u64;
    for &pa in &periods {
        for &pb in &periods {
            if pa / gcd(pa, pb) * pb == r {
                good += 1;
            }
        }
    }
    good as f64 / (n * n) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub modulus: u64,
    pub base: u64,
    pub variant: Variant,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `1 - phi(N)/N`: chance one random register shares a factor with `N`.
    pub gcd_penalty: f64,
    /// Chance a random register pair keeps the full period.
    pub period_preserving: f64,
    /// `period_preserving * standard success rate`.
    pub expected_rate: f64,
    pub difference: f64,
    /// Difference in combined standard errors.
    pub z_score: f64,
    /// Set when the rate falls more than three standard errors short.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
}

/// Success rates of each variant against the standard circuit on the same
/// instances, after correcting for the loss of period from uninitialized
/// registers.
pub fn variant_comparison(
    ctxs: &[ModCtx],
    variants: &[Variant],
    trials: u64,
    seed: u64,
    jobs: usize,
) -> Result<ComparisonReport> {
    let mut rows = Vec::new();
    for ctx in ctxs {
        let baseline = run_trials(
            &OrderFindConfig::new(ctx.clone(), Variant::Standard).with_seed(seed),
            trials,
            jobs,
        )?;
        let n = ctx.n_value();
        let gcd_penalty = 1.0 - totient(n) as f64 / n as f64;
        for &variant in variants {
            let result = if variant == Variant::Standard {
                baseline.clone()
            } else {
                run_trials(
                    &OrderFindConfig::new(ctx.clone(), variant).with_seed(seed),
                    trials,
                    jobs,
                )?
            };
            let rho = period_preserving_fraction(ctx, variant);
            let ps = baseline.success_rate;
            let pv = result.success_rate;
            let expected = rho * ps;
            let difference = if variant == Variant::Standard {
                0.0
            } else {
                pv - expected
            };
            let se = (pv * (1.0 - pv) / trials.max(1) as f64
                + rho * rho * ps * (1.0 - ps) / trials.max(1) as f64)
                .sqrt();
            let z_score = if difference == 0.0 {
                0.0
            } else if se == 0.0 {
                difference.signum() * f64::INFINITY
            } else {
                difference / se
            };
            rows.push(ComparisonRow {
                modulus: n,
                base: ctx.base(),
                variant,
                trials,
                successes: result.successes,
                success_rate: pv,
                ci_low: result.ci_low,
                ci_high: result.ci_high,
                gcd_penalty: if variant.uninitialized() {
                    gcd_penalty
                } else {
                    0.0
                },
                period_preserving: rho,
                expected_rate: expected,
                difference,
                z_score,
                flagged: z_score < -3.0,
            });
        }
    }
    Ok(ComparisonReport { rows })
}
