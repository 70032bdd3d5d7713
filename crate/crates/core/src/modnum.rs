//! Exact classical number theory used around the quantum circuits.
//!
//! Everything here is integer arithmetic: moduli are `u64`, intermediate
//! products are widened to `u128`, and the Euclid trace carries signed
//! `i128` coefficients. No floating point is used.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("{value} is not coprime with {modulus} (gcd = {gcd})")]
    NotCoprime { value: u64, modulus: u64, gcd: u64 },
    #[error("modulus {0} must be odd and at least 3")]
    InvalidModulus(u64),
    #[error("base {base} must lie in (0, {modulus})")]
    BaseOutOfRange { base: u64, modulus: u64 },
    #[error("{value} does not fit in {count} digits of radix {radix}")]
    Overflow { value: u128, radix: u32, count: u32 },
    #[error("radix must be at least 2, got {0}")]
    InvalidRadix(u32),
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Number of bits needed to write `x` (0 for `x = 0`).
pub fn bit_length(x: u64) -> u32 {
    u64::BITS - x.leading_zeros()
}

/// Smallest `k` with `2^k >= x`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        bit_length(x - 1)
    }
}

pub fn mod_mul(a: u64, b: u64, modulus: u64) -> u64 {
    ((a as u128 * b as u128) % modulus as u128) as u64
}

/// `base^exp mod modulus` by square-and-multiply.
pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    assert!(modulus >= 2, "modulus must be at least 2");
    let mut acc = 1u64;
    let mut sq = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, sq, modulus);
        }
        sq = mod_mul(sq, sq, modulus);
        exp >>= 1;
    }
    acc
}

/// Modular inverse via the extended Euclidean algorithm.
pub fn mod_inv(a: u64, modulus: u64) -> Result<u64, NumError> {
    assert!(modulus >= 2, "modulus must be at least 2");
    let (mut old_r, mut r) = (a as i128 % modulus as i128, modulus as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(NumError::NotCoprime {
            value: a,
            modulus,
            gcd: old_r as u64,
        });
    }
    Ok(old_s.rem_euclid(modulus as i128) as u64)
}

/// Smallest `d > 0` with `a^d = 1 (mod modulus)`, by brute force.
pub fn multiplicative_order(a: u64, modulus: u64) -> Option<u64> {
    if gcd(a, modulus) != 1 {
        return None;
    }
    let mut x = a % modulus;
    for d in 1..=modulus {
        if x == 1 {
            return Some(d);
        }
        x = mod_mul(x, a, modulus);
    }
    None
}

/// Euler's totient by enumeration.
pub fn totient(modulus: u64) -> u64 {
    (1..=modulus).filter(|&k| gcd(k, modulus) == 1).count() as u64
}

/// An odd modulus `N >= 3` together with its bit count `n = ceil(log2 N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Modulus {
    value: u64,
    bits: u32,
}

impl Modulus {
    pub fn new(value: u64) -> Result<Self, NumError> {
        if value < 3 || value.is_multiple_of(2) || value >= 1 << 62 {
            return Err(NumError::InvalidModulus(value));
        }
        Ok(Self {
            value,
            bits: ceil_log2(value),
        })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn inv(&self, a: u64) -> Result<u64, NumError> {
        mod_inv(a, self.value)
    }

    pub fn reduce(&self, x: i128) -> u64 {
        x.rem_euclid(self.value as i128) as u64
    }
}

/// Classical context of one order-finding run: modulus, base, and the
/// repeated-squaring tables `a^(2^i)` with their inverses for `i < 2n`.
#[derive(Debug, Clone)]
pub struct ModCtx {
    modulus: Modulus,
    base: u64,
    pow_table: Vec<u64>,
    inv_table: Vec<u64>,
}

impl ModCtx {
    pub fn new(modulus: u64, base: u64) -> Result<Self, NumError> {
        let modulus = Modulus::new(modulus)?;
        let n = modulus.value();
        if base == 0 || base >= n {
            return Err(NumError::BaseOutOfRange { base, modulus: n });
        }
        let base_inv = modulus.inv(base)?;
        let len = 2 * modulus.bits() as usize;
        let mut pow_table = Vec::with_capacity(len);
        let mut inv_table = Vec::with_capacity(len);
        let (mut p, mut q) = (base, base_inv);
        for _ in 0..len {
            pow_table.push(p);
            inv_table.push(q);
            p = mod_mul(p, p, n);
            q = mod_mul(q, q, n);
        }
        let ctx = Self {
            modulus,
            base,
            pow_table,
            inv_table,
        };
        debug_assert!(ctx.tables_consistent());
        Ok(ctx)
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// The modulus `N` as an integer.
    pub fn n_value(&self) -> u64 {
        self.modulus.value()
    }

    pub fn bits(&self) -> u32 {
        self.modulus.bits()
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn pow_table(&self) -> &[u64] {
        &self.pow_table
    }

    pub fn inv_table(&self) -> &[u64] {
        &self.inv_table
    }

    /// `a^(p^k) mod N`, the multiplier controlled by digit `k` of a radix-`p`
    /// exponent register.
    pub fn digit_multiplier(&self, radix: u32, k: u32) -> u64 {
        let mut m = self.base;
        for _ in 0..k {
            m = mod_pow(m, radix as u64, self.n_value());
        }
        m
    }

    pub fn order(&self) -> u64 {
        multiplicative_order(self.base, self.n_value()).expect("base is coprime by construction")
    }

    pub fn tables_consistent(&self) -> bool {
        let n = self.n_value();
        self.pow_table
            .iter()
            .zip(&self.inv_table)
            .all(|(&p, &q)| mod_mul(p, q, n) == 1)
            && self
                .pow_table
                .windows(2)
                .all(|w| w[1] == mod_mul(w[0], w[0], n))
    }
}

/// One row `r*a + k*N = r'` of the extended Euclid trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EuclidRow {
    pub r: i128,
    pub k: i128,
    pub r_prime: i128,
}

/// Full extended-Euclid trace for `(a, N)`, starting from `(0, 1, N)` and
/// `(1, 0, a)` and stopping at the row with `r' = 1`.
pub fn euclid_trace(a: u64, modulus: u64) -> Result<Vec<EuclidRow>, NumError> {
    let g = gcd(a, modulus);
    if a == 0 || a >= modulus || g != 1 {
        return Err(NumError::NotCoprime {
            value: a,
            modulus,
            gcd: g,
        });
    }
    let mut rows = vec![
        EuclidRow {
            r: 0,
            k: 1,
            r_prime: modulus as i128,
        },
        EuclidRow {
            r: 1,
            k: 0,
            r_prime: a as i128,
        },
    ];
    while rows[rows.len() - 1].r_prime != 1 {
        let prev = rows[rows.len() - 2];
        let cur = rows[rows.len() - 1];
        let q = prev.r_prime / cur.r_prime;
        rows.push(EuclidRow {
            r: prev.r - q * cur.r,
            k: prev.k - q * cur.k,
            r_prime: prev.r_prime - q * cur.r_prime,
        });
    }
    Ok(rows)
}

/// A pair with `r * a = r' (mod N)` where both sides are about `sqrt(N)`,
/// so that multiplying by `a` can be done as multiplying by `r'` and then
/// dividing by `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MidpointSplit {
    pub r: i128,
    pub r_prime: u64,
    pub n_prime: u32,
    /// Whether both `|r|` and `r'` were strictly below `sqrt(N)`.
    pub below_sqrt: bool,
}

impl MidpointSplit {
    /// Recovers the multiplier `r' / r mod N`. Fails when `gcd(r, N) > 1`,
    /// which happens for some minimal rows; the gcd is then a factor of `N`.
    pub fn multiplier(&self, modulus: u64) -> Result<u64, NumError> {
        let r = self.r.rem_euclid(modulus as i128) as u64;
        let inv = mod_inv(r, modulus)?;
        Ok(mod_mul(self.r_prime, inv, modulus))
    }

    /// `gcd(|r|, N)`; 1 when the split can drive a reversible multiplier.
    pub fn shared_factor(&self, modulus: u64) -> u64 {
        gcd(self.r.unsigned_abs() as u64 % modulus, modulus)
    }

    fn from_row(row: &EuclidRow, modulus: u64) -> Self {
        let abs_r = row.r.unsigned_abs() as u64;
        let r_prime = row.r_prime as u64;
        let n = modulus as u128;
        Self {
            r: row.r,
            r_prime,
            n_prime: bit_length(abs_r).max(bit_length(r_prime)),
            below_sqrt: (abs_r as u128).pow(2) < n && (r_prime as u128).pow(2) < n,
        }
    }
}

fn split_key(row: &EuclidRow) -> i128 {
    row.r.abs().max(row.r_prime)
}

/// The trace row minimizing `max(|r|, r')`, earliest row on ties.
pub fn midpoint_split(a: u64, modulus: u64) -> Result<MidpointSplit, NumError> {
    let rows = euclid_trace(a, modulus)?;
    let best = rows
        .iter()
        .filter(|row| row.r != 0)
        // min_by_key keeps the first of equal keys
        .min_by_key(|row| split_key(row))
        .expect("trace always contains the (1, 0, a) row");
    Ok(MidpointSplit::from_row(best, modulus))
}

/// Like [`midpoint_split`] but restricted to rows with `gcd(r, N) = 1`, so
/// that multiplying by `r'` and dividing by `r` are both reversible. The
/// `(1, 0, a)` row always qualifies.
pub fn invertible_split(a: u64, modulus: u64) -> Result<MidpointSplit, NumError> {
    let rows = euclid_trace(a, modulus)?;
    let best = rows
        .iter()
        .filter(|row| row.r != 0 && gcd(row.r.unsigned_abs() as u64 % modulus, modulus) == 1)
        .min_by_key(|row| split_key(row))
        .expect("trace always contains the (1, 0, a) row");
    Ok(MidpointSplit::from_row(best, modulus))
}

/// Order candidate from a measured phase `y / q`: the smallest continued
/// fraction denominator `d < N` with `a^d = 1 (mod N)`.
///
/// At most `2 * ceil(log2 q)` convergents are examined. `y = 0` is the
/// fraction `0/1` and only yields order 1.
pub fn continued_fraction_order(y: u128, q: u128, ctx: &ModCtx) -> Option<u64> {
    if y >= q {
        return None;
    }
    if y == 0 {
        return (ctx.base() % ctx.n_value() == 1).then_some(1);
    }
    let cap = 2 * (u128::BITS - (q - 1).leading_zeros()) as usize;
    let n = ctx.n_value();
    let (mut num, mut den) = (y, q);
    // convergent denominators start from k_{-2} = 1, k_{-1} = 0
    let (mut k_prev, mut k_cur) = (1u128, 0u128);
    for _ in 0..cap {
        let term = num / den;
        let k_next = term.checked_mul(k_cur)?.checked_add(k_prev)?;
        (k_prev, k_cur) = (k_cur, k_next);
        if k_cur >= n as u128 {
            return None;
        }
        if k_cur > 0 && mod_pow(ctx.base(), k_cur as u64, n) == 1 {
            return Some(k_cur as u64);
        }
        let rem = num % den;
        if rem == 0 {
            break;
        }
        (num, den) = (den, rem);
    }
    None
}

/// Radix-`radix` digits of `x`, least significant first.
pub fn digits(x: u128, radix: u32, count: u32) -> Result<Vec<u32>, NumError> {
    if radix < 2 {
        return Err(NumError::InvalidRadix(radix));
    }
    let mut rest = x;
    let out: Vec<u32> = (0..count)
        .map(|_| {
            let d = (rest % radix as u128) as u32;
            rest /= radix as u128;
            d
        })
        .collect();
    if rest != 0 {
        return Err(NumError::Overflow {
            value: x,
            radix,
            count,
        });
    }
    Ok(out)
}
