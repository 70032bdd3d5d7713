use rand::Rng;

use crate::modnum::continued_fraction_order;
use crate::simstate::{Direction, Dit, DitMatrix};

use super::machine::Machine;
use super::{OrderFindConfig, Result, TrialResult};

/// One semiclassical order-finding run.
pub fn semiclassical_sample<R: Rng + ?Sized>(
    config: &OrderFindConfig,
    index: u64,
    rng: &mut R,
) -> Result<TrialResult> {
    let mut machine = Machine::new(config, 1, rng)?;
    let p = config.radix as usize;
    let m = config.digit_count as usize;
    let control = Dit::new(machine.control, 0);
    let ctl = [machine.control];
    let dft = DitMatrix::dft(p);
    let dft_inv = dft.adjoint();
    let mut y: u64 = 0;
    let mut place: u64 = 1;
    let mut lsb_first = Vec::with_capacity(m);
    for j in 0..m {
        machine.state.apply_single_dit(control, &dft)?;
        machine.controlled_multiply(m - 1 - j, control)?;
        if y != 0 {
            let theta = y as f64 / (place * p as u64) as f64;
            let turns: Vec<f64> = (0..p).map(|d| -(d as f64) * theta).collect();
            machine
                .state
                .apply_single_dit(control, &DitMatrix::diagonal(&turns))?;
        }
        machine.state.apply_single_dit(control, &dft_inv)?;
        let outcome = machine.state.measure(control, rng)?.outcome;
        machine.state.apply_permutation(&ctl, |v| v[0] = 0)?;
        y += outcome as u64 * place;
        place *= p as u64;
        lsb_first.push(outcome);
    }
    let candidate = continued_fraction_order(y as u128, config.q() as u128, &config.ctx);
    lsb_first.reverse();
    Ok(TrialResult {
        index,
        digits: lsb_first,
        y,
        candidate,
        success: candidate == Some(config.ctx.order()),
        alpha: machine.alpha,
        beta: machine.beta,
        alpha_gcd: machine.alpha_gcd(),
        beta_gcd: machine.beta_gcd(),
        wraps: (config.variant == crate::Variant::Coset).then_some(machine.wraps),
        peak_footprint: machine.peak_footprint(),
    })
}

/// Exact distribution of `y` from the textbook circuit: a full exponent
/// register in uniform superposition, one controlled multiplication per
/// digit, then an inverse Fourier transform. Uninitialized variants draw
/// their register contents from `rng`.
pub fn monolithic_distribution<R: Rng + ?Sized>(
    config: &OrderFindConfig,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let m = config.digit_count as usize;
    let mut machine = Machine::new(config, m, rng)?;
    let x = machine.control;
    let dft = DitMatrix::dft(config.radix as usize);
    for k in 0..m {
        machine.state.apply_single_dit(Dit::new(x, k), &dft)?;
    }
    for k in 0..m {
        machine.controlled_multiply(k, Dit::new(x, k))?;
    }
    machine.state.qft(x, Direction::Inverse)?;
    let mut dist = vec![0.0; config.q() as usize];
    for (label, amp) in machine.state.iter() {
        dist[machine.state.layout().value(label, x) as usize] += amp.norm_sqr();
    }
    Ok(dist)
}

/// Total variation distance between two distributions on the same support.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    (0..n)
        .map(|i| (p.get(i).copied().unwrap_or(0.0) - q.get(i).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
        / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modnum::{gcd, ModCtx};
    use crate::Variant;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Closed form: `P(y) = Q^-2 sum_s |sum_{x: a^x = s} e^{-2 pi i x y / Q}|^2`.
    fn exact(ctx: &ModCtx, q: u64) -> Vec<f64> {
        let r = ctx.order();
        (0..q)
            .map(|y| {
                (0..r)
                    .map(|s| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        let mut x = s;
                        while x < q {
                            let t = ((x as u128 * y as u128) % q as u128) as f64 / q as f64;
                            acc += Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * t);
                            x += r;
                        }
                        acc.norm_sqr()
                    })
                    .sum::<f64>()
                    / (q as f64 * q as f64)
            })
            .collect()
    }

    #[test]
    fn monolithic_matches_closed_form() {
        for (n, a) in [(15, 7), (15, 2), (21, 2), (15, 4)] {
            let ctx = ModCtx::new(n, a).unwrap();
            let config = OrderFindConfig::new(ctx.clone(), Variant::Standard);
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let got = monolithic_distribution(&config, &mut rng).unwrap();
            let want = exact(&ctx, config.q());
            assert!(total_variation(&got, &want) < 1e-9, "N={n} a={a}");
        }
    }

    #[test]
    fn trinary_monolithic_matches_closed_form() {
        // coprime register contents leave the distribution unchanged
        let ctx = ModCtx::new(15, 7).unwrap();
        let config = OrderFindConfig::new(ctx.clone(), Variant::TrinaryUninit);
        let seed = (0..)
            .find(|&s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let (x, y) = (rng.gen_range(0..15u64), rng.gen_range(0..15u64));
                gcd(x, 15) == 1 && gcd(y, 15) == 1
            })
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let got = monolithic_distribution(&config, &mut rng).unwrap();
        assert!(total_variation(&got, &exact(&ctx, config.q())) < 1e-9);
    }

    #[test]
    fn semiclassical_digits_rebuild_y() {
        let ctx = ModCtx::new(15, 7).unwrap();
        for variant in Variant::ALL {
            let config = OrderFindConfig::new(ctx.clone(), variant);
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let t = semiclassical_sample(&config, 0, &mut rng).unwrap();
            let p = config.radix as u64;
            let y = t.digits.iter().fold(0u64, |acc, &d| acc * p + d as u64);
            assert_eq!(y, t.y, "{variant}");
            assert_eq!(t.digits.len(), config.digit_count as usize);
        }
    }
}
