use std::fmt::Write as _;
use std::fs;

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use shorlab::modnum::{bit_length, gcd, midpoint_split, mod_pow, ModCtx, Modulus};
use shorlab::resources::{qubit_count, report_all, ResourceParams, ResourceReport};
use shorlab::shor::{fidelity_experiment, run_trials, ExperimentResult, OrderFindConfig};
use shorlab::Variant;

use crate::{
    FactorArgs, FidelityArgs, Format, Output, ResourcesArgs, SizeGuard, SplitArgs, EXIT_FAILED,
};

/// Largest modulus bit length simulated without an override.
const DEFAULT_MAX_BITS: u32 = 10;

fn emit(output: &Output, body: &str) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn check_modulus(n: u64) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        bail!("modulus must be odd and at least 3, got {n}");
    }
    Ok(())
}

fn check_size(guard: &SizeGuard, variant: Variant, n: u64) -> Result<()> {
    let bits = bit_length(n);
    let over = match guard.max_qubits {
        Some(max) => qubit_count(variant, bits, &ResourceParams::default()) > max,
        None => bits > DEFAULT_MAX_BITS,
    };
    if over {
        if !guard.allow_large {
            bail!(
                "N = {n} exceeds the size guard ({}); pass --allow-large to run anyway",
                match guard.max_qubits {
                    Some(max) => format!("SHORLAB_MAX_QUBITS = {max}"),
                    None => format!("N < 2^{DEFAULT_MAX_BITS}"),
                }
            );
        }
        eprintln!(
            "warning: N = {n} is above the size guard; the simulation may need a lot of memory"
        );
    }
    Ok(())
}

/// Smallest integer `>= 2` coprime with `n`.
pub fn default_base(n: u64) -> u64 {
    (2..n).find(|&a| gcd(a, n) == 1).unwrap_or(1)
}

/// Nontrivial factors from an even multiple `d` of the order of `a`.
pub fn factors_from_order(a: u64, d: u64, n: u64) -> Option<(u64, u64)> {
    if !d.is_multiple_of(2) {
        return None;
    }
    let x = mod_pow(a, d / 2, n);
    if x == 1 || x == n - 1 {
        return None;
    }
    [x - 1, x + 1]
        .into_iter()
        .map(|y| gcd(y, n))
        .find(|&g| g > 1 && g < n)
        .map(|g| (g.min(n / g), g.max(n / g)))
}

#[derive(Debug, Serialize)]
struct FactorReport {
    experiment: ExperimentResult,
    order: u64,
    factors: Option<[u64; 2]>,
    factoring_successes: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
}

pub fn factor(args: &FactorArgs) -> Result<u8> {
    let n = args.modulus;
    check_modulus(n)?;
    let base = match args.base {
        Some(a) if a < 2 || a >= n => bail!("base must lie in [2, {n}), got {a}"),
        Some(a) if gcd(a, n) != 1 => bail!("base {a} shares the factor {} with {n}", gcd(a, n)),
        Some(a) => a,
        None => default_base(n),
    };
    if args.trials == 0 {
        bail!("--trials must be positive");
    }
    check_size(&args.guard, args.variant, n)?;
    let format = args.output.format.unwrap_or(Format::Json);
    if format == Format::Table {
        bail!("factor writes json or csv");
    }
    let ctx = ModCtx::new(n, base)?;
    let mut config = OrderFindConfig::new(ctx, args.variant)
        .with_seed(args.seed)
        .with_strict_footprint(args.strict_footprint);
    if let Some(x_max) = args.xmax {
        if x_max == 0 {
            bail!("--xmax must be positive");
        }
        config = config.with_x_max(x_max);
    }
    let experiment = run_trials(&config, args.trials, args.jobs)?;
    let order = config.ctx.order();

    let mut factors = None;
    let mut factoring_successes = 0;
    for t in &experiment.trials {
        if let Some(f) = t.candidate.and_then(|d| factors_from_order(base, d, n)) {
            factoring_successes += 1;
            factors.get_or_insert([f.0, f.1]);
        }
    }
    let failure = if factors.is_some() {
        None
    } else if experiment.successes == 0 {
        Some("the order was never recovered".to_string())
    } else if order % 2 == 1 {
        Some(format!("order {order} is odd"))
    } else if mod_pow(base, order / 2, n) == n - 1 {
        Some(format!("{base}^{} = -1 (mod {n})", order / 2))
    } else {
        Some(format!("{n} is a prime power or prime"))
    };

    eprintln!(
        "{}: order {order} recovered in {}/{} trials (95% CI {:.3}-{:.3}); {}",
        args.variant,
        experiment.successes,
        args.trials,
        experiment.ci_low,
        experiment.ci_high,
        match (&factors, &failure) {
            (Some([p, q]), _) => format!("{n} = {p} x {q}"),
            (None, Some(why)) => format!("no factors: {why}"),
            (None, None) => unreachable!(),
        }
    );

    let report = FactorReport {
        experiment,
        order,
        factors,
        factoring_successes,
        failure,
    };
    let body = match format {
        Format::Csv => {
            let mut s = String::from("index,y,digits,candidate,success\n");
            for t in &report.experiment.trials {
                let digits: String = t
                    .digits
                    .iter()
                    .map(|d| char::from_digit(*d, 36).unwrap_or('?'))
                    .collect();
                let cand = t.candidate.map(|c| c.to_string()).unwrap_or_default();
                let _ = writeln!(s, "{},{},{},{},{}", t.index, t.y, digits, cand, t.success);
            }
            s
        }
        _ => to_json(&report)?,
    };
    emit(&args.output, &body)?;
    Ok(if report.factors.is_some() {
        0
    } else {
        EXIT_FAILED
    })
}

pub fn fidelity(args: &FidelityArgs) -> Result<u8> {
    check_modulus(args.modulus)?;
    let modulus = Modulus::new(args.modulus)?;
    let n = modulus.bits() as u64;
    let x_max = args.xmax.unwrap_or(1000 * n * n);
    let adds = args.adds.unwrap_or((4 * n * n) as usize);
    if x_max == 0 {
        bail!("--xmax must be positive");
    }
    if x_max > 1 << 24 {
        bail!("--xmax above 2^24 would need too much memory");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let trace = fidelity_experiment(modulus, x_max, adds, &mut rng)?;
    eprintln!(
        "N = {}, x_max = {x_max}, {adds} additions: cumulative fidelity {:.6}",
        args.modulus,
        trace.final_cumulative()
    );
    let body = match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&trace)?,
        Format::Csv => trace.to_csv(),
        Format::Table => bail!("fidelity writes csv or json"),
    };
    emit(&args.output, &body)?;
    Ok(0)
}

#[derive(Debug, Serialize)]
struct ResourcesReport {
    n: u32,
    params: ResourceParams,
    variants: Vec<ResourceReport>,
}

pub fn resources(args: &ResourcesArgs) -> Result<u8> {
    if !(2..=64).contains(&args.bits) {
        bail!("--bits must lie in [2, 64]");
    }
    let params = ResourceParams {
        work_qubits: args.work_qubits,
        ..ResourceParams::default()
    };
    let rows = report_all(args.bits, &params);
    let body = match args.output.format.unwrap_or(Format::Table) {
        Format::Json => to_json(&ResourcesReport {
            n: args.bits,
            params,
            variants: rows,
        })?,
        Format::Csv => {
            let mut s =
                String::from("variant,n,qubits,multiplications,modular_additions,time_factor\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{:.4}",
                    r.variant, r.n, r.qubits, r.multiplications, r.modular_additions, r.time_factor
                );
            }
            s
        }
        Format::Table => {
            let mut s = format!(
                "{:<16} {:>7} {:>9} {:>10} {:>7}\n",
                "variant", "qubits", "mults", "mod adds", "time"
            );
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:<16} {:>7} {:>9} {:>10} {:>7.4}",
                    r.variant.name(),
                    r.qubits,
                    r.multiplications,
                    r.modular_additions,
                    r.time_factor
                );
            }
            s
        }
    };
    emit(&args.output, &body)?;
    Ok(0)
}

#[derive(Debug, Serialize)]
struct SplitReport {
    modulus: u64,
    base: u64,
    r: i128,
    r_prime: u64,
    n_prime: u32,
    below_sqrt: bool,
    /// `gcd(r, N)`; above 1 the split gives a factor instead of a multiplier.
    shared_factor: u64,
    verified: bool,
}

pub fn split(args: &SplitArgs) -> Result<u8> {
    let (n, a) = (args.modulus, args.base);
    check_modulus(n)?;
    if a == 0 || a >= n {
        bail!("base must lie in [1, {n}), got {a}");
    }
    if gcd(a, n) != 1 {
        bail!("base {a} shares the factor {} with {n}", gcd(a, n));
    }
    let s = midpoint_split(a, n)?;
    let lhs = s.r * a as i128;
    let verified = lhs.rem_euclid(n as i128) as u64 == s.r_prime % n
        && s.r.unsigned_abs() * (s.r_prime as u128) < n as u128;
    let report = SplitReport {
        modulus: n,
        base: a,
        r: s.r,
        r_prime: s.r_prime,
        n_prime: s.n_prime,
        below_sqrt: s.below_sqrt,
        shared_factor: s.shared_factor(n),
        verified,
    };
    let body = match args.output.format.unwrap_or(Format::Table) {
        Format::Json => to_json(&report)?,
        Format::Csv => format!(
            "modulus,base,r,r_prime,n_prime,below_sqrt,shared_factor,verified\n{n},{a},{},{},{},{},{},{verified}\n",
            s.r,
            s.r_prime,
            s.n_prime,
            s.below_sqrt,
            report.shared_factor
        ),
        Format::Table => format!(
            "a = {a}, N = {n}: r = {}, r' = {} ({} bits, both below sqrt(N): {})\ncheck: r * a = {lhs} = {} (mod {n}) and |r| * r' = {} < {n}: {}\n",
            s.r,
            s.r_prime,
            s.n_prime,
            s.below_sqrt,
            s.r_prime,
            s.r.unsigned_abs() * s.r_prime as u128,
            if verified { "ok" } else { "FAILED" }
        ),
    };
    emit(&args.output, &body)?;
    Ok(if verified { 0 } else { EXIT_FAILED })
}
