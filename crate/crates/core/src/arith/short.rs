//! In-place multiplication by a short odd factor using `n + n'` register
//! qubits and one work qubit.
//!
//! For `alpha < N` and an odd `a < 2^n'`:
//!
//! 1. Compute `a * alpha` non-modularly in place, walking the bits of
//!    `alpha` from the top. Bit `j` is moved into the work qubit, cleared,
//!    and replaced by the controlled addition of `a 2^j`; since `a` is odd
//!    that addition sets bit `j` back to the control value, which uncomputes
//!    the work qubit.
//! 2. Restoring division by `N`: for `i = n'-1 .. 0` compare against
//!    `2^i N`, subtract on success and park the quotient bit above the
//!    remainder. The register now holds `q * 2^n + (a alpha mod N)`.
//! 3. Since `a alpha = q N + rem` and `q < a`, the quotient is
//!    `q = rem * (-N)^-1 mod a`. Subtracting `2^i (-N)^-1 mod a` from `q`
//!    (mod `a`) for every set bit `i` of the remainder clears it.
//!
//! Every stage is a list of self-describing [`Step`]s; running the list
//! backwards with each step inverted divides by `a`.

use crate::modnum::{bit_length, gcd, mod_inv, mod_mul, MidpointSplit, Modulus, NumError};
use crate::simstate::{Control, Dit, RegId, SparseState};

use super::{
    mask, require_below, require_clean_ancilla, require_width, toggle, ArithError, Result,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortMulParams {
    a_short: u64,
    n_prime: u32,
    modulus: Modulus,
    uncompute_consts: Vec<u64>,
}

impl ShortMulParams {
    pub fn new(a_short: u64, modulus: Modulus) -> Result<Self> {
        let n = modulus.value();
        if a_short.is_multiple_of(2) {
            return Err(ArithError::EvenMultiplier(a_short));
        }
        let g = gcd(a_short, n);
        if a_short >= n || g != 1 {
            return Err(NumError::NotCoprime {
                value: a_short,
                modulus: n,
                gcd: g,
            }
            .into());
        }
        let uncompute_consts = if a_short == 1 {
            vec![0; modulus.bits() as usize]
        } else {
            let neg_n = (a_short - n % a_short) % a_short;
            let base = mod_inv(neg_n, a_short)?;
            (0..modulus.bits())
                .map(|i| mod_mul(base, mod_pow2(i, a_short), a_short))
                .collect()
        };
        Ok(Self {
            a_short,
            n_prime: bit_length(a_short),
            modulus,
            uncompute_consts,
        })
    }

    pub fn a_short(&self) -> u64 {
        self.a_short
    }

    pub fn n_prime(&self) -> u32 {
        self.n_prime
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// `2^i (-N)^-1 mod a` for each remainder bit `i`.
    pub fn uncompute_consts(&self) -> &[u64] {
        &self.uncompute_consts
    }
}

fn mod_pow2(i: u32, m: u64) -> u64 {
    (0..i).fold(1 % m, |acc, _| mod_mul(acc, 2, m))
}

/// Tracks the largest live footprint (register bit length plus the work
/// qubit) seen after any sub-step, and fails once it passes `limit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FootprintMonitor {
    limit: u32,
    peak: u32,
}

impl FootprintMonitor {
    pub fn new(limit: u32) -> Self {
        Self { limit, peak: 0 }
    }

    pub fn limit(&self) -> u32 {
        self.limit
    }

    pub fn peak(&self) -> u32 {
        self.peak
    }

    fn observe(&mut self, state: &SparseState, reg: RegId) -> Result<()> {
        let footprint = bit_length(state.max_value(reg).unwrap_or(0)) + 1;
        self.peak = self.peak.max(footprint);
        if footprint > self.limit {
            return Err(ArithError::FootprintExceeded {
                footprint,
                limit: self.limit,
            });
        }
        Ok(())
    }
}

/// Footprint limit `n + n' + 1` for a split multiplier.
pub fn short_mul_pair_footprint_bound(modulus: Modulus, split: &MidpointSplit) -> u32 {
    modulus.bits() + split.n_prime + 1
}

#[derive(Debug, Clone, Copy)]
enum Ctl {
    Work,
    Bit(usize),
}

#[derive(Debug, Clone, Copy)]
enum Step {
    /// work ^= bit j
    WorkXorBit(usize),
    /// bit j ^= work
    BitXorWork(usize),
    /// field += c (mod 2^width)
    Add {
        lo: usize,
        width: usize,
        c: u64,
        ctrl: Option<Ctl>,
    },
    /// work ^= [field >= c]
    CompareGe {
        lo: usize,
        width: usize,
        c: u64,
        ctrl: Option<Ctl>,
    },
    SwapWorkBit(usize),
    NotWork(Option<Ctl>),
    /// rotate field(0, width) one place towards the top, or back
    Rotl(usize),
    Rotr(usize),
    /// v -> (N - v) mod N on field(0, n)
    Negate(u64),
}

impl Step {
    fn inverse(self) -> Step {
        match self {
            Step::Add { lo, width, c, ctrl } => Step::Add {
                lo,
                width,
                c: c.wrapping_neg() & mask(width),
                ctrl,
            },
            Step::Rotl(w) => Step::Rotr(w),
            Step::Rotr(w) => Step::Rotl(w),
            s => s,
        }
    }
}

#[inline]
fn field(v: u64, lo: usize, width: usize) -> u64 {
    (v >> lo) & mask(width)
}

#[inline]
fn set_field(v: u64, lo: usize, width: usize, x: u64) -> u64 {
    let m = mask(width) << lo;
    (v & !m) | ((x << lo) & m)
}

fn odd_mul_steps(params: &ShortMulParams) -> Vec<Step> {
    let n = params.modulus.bits() as usize;
    let np = params.n_prime as usize;
    let a = params.a_short;
    let big_n = params.modulus.value();
    let mut steps = Vec::new();
    if a == 1 {
        return steps;
    }
    for j in (0..n).rev() {
        steps.push(Step::WorkXorBit(j));
        steps.push(Step::BitXorWork(j));
        steps.push(Step::Add {
            lo: 0,
            width: n + np,
            c: (a << j) & mask(n + np),
            ctrl: Some(Ctl::Work),
        });
        steps.push(Step::WorkXorBit(j));
    }
    for i in (0..np).rev() {
        let width = n + i + 1;
        let d = big_n << i;
        steps.push(Step::CompareGe {
            lo: 0,
            width,
            c: d,
            ctrl: None,
        });
        steps.push(Step::Add {
            lo: 0,
            width,
            c: d.wrapping_neg() & mask(width),
            ctrl: Some(Ctl::Work),
        });
        steps.push(Step::SwapWorkBit(n + i));
    }
    for (i, &uc) in params.uncompute_consts.iter().enumerate() {
        let d = (a - uc) % a;
        if d == 0 {
            continue;
        }
        let ctl = Some(Ctl::Bit(i));
        steps.push(Step::CompareGe {
            lo: n,
            width: np,
            c: a - d,
            ctrl: ctl,
        });
        steps.push(Step::Add {
            lo: n,
            width: np,
            c: a.wrapping_neg() & mask(np),
            ctrl: Some(Ctl::Work),
        });
        steps.push(Step::Add {
            lo: n,
            width: np,
            c: d,
            ctrl: ctl,
        });
        steps.push(Step::CompareGe {
            lo: n,
            width: np,
            c: d,
            ctrl: ctl,
        });
        steps.push(Step::NotWork(ctl));
    }
    steps
}

/// `v -> 2v mod N` in place: shift, reduce, and uncompute the reduction flag
/// from the parity of the result (`2v - N` is odd, `2v` is even).
fn doubling_steps(modulus: Modulus) -> Vec<Step> {
    let n = modulus.bits() as usize;
    let big_n = modulus.value();
    vec![
        Step::Rotl(n + 1),
        Step::CompareGe {
            lo: 0,
            width: n + 1,
            c: big_n,
            ctrl: None,
        },
        Step::Add {
            lo: 0,
            width: n + 1,
            c: big_n.wrapping_neg() & mask(n + 1),
            ctrl: Some(Ctl::Work),
        },
        Step::WorkXorBit(0),
    ]
}

/// Steps multiplying by any factor coprime with `N`: the odd part with the
/// short multiplier, then one modular doubling per factor of two.
fn factor_steps(factor: u64, modulus: Modulus) -> Result<Vec<Step>> {
    let twos = factor.trailing_zeros();
    let mut steps = odd_mul_steps(&ShortMulParams::new(factor >> twos, modulus)?);
    for _ in 0..twos {
        steps.extend(doubling_steps(modulus));
    }
    Ok(steps)
}

fn run_steps(
    state: &mut SparseState,
    ctrls: &[Control],
    reg: RegId,
    work: Dit,
    steps: &[Step],
    mut monitor: Option<&mut FootprintMonitor>,
) -> Result<()> {
    let work_reg = state.layout().register(work.reg).clone();
    let wp = work.pos;
    if let Some(m) = monitor.as_deref_mut() {
        m.observe(state, reg)?;
    }
    let mut all = ctrls.to_vec();
    for &step in steps {
        all.truncate(ctrls.len());
        let ctl = match step {
            Step::Add { ctrl, .. } | Step::CompareGe { ctrl, .. } | Step::NotWork(ctrl) => ctrl,
            _ => None,
        };
        match ctl {
            Some(Ctl::Work) => all.push(Control::on(work)),
            Some(Ctl::Bit(i)) => all.push(Control::on(Dit::new(reg, i))),
            None => {}
        }
        let regs = [reg, work.reg];
        state.apply_controlled_permutation(&all, &regs, |v| {
            let w = work_reg.digit(v[1], wp) as u64;
            match step {
                Step::WorkXorBit(j) => {
                    if v[0] >> j & 1 == 1 {
                        v[1] = toggle(&work_reg, v[1], wp);
                    }
                }
                Step::BitXorWork(j) => v[0] ^= w << j,
                Step::Add { lo, width, c, .. } => {
                    let x = field(v[0], lo, width).wrapping_add(c);
                    v[0] = set_field(v[0], lo, width, x);
                }
                Step::CompareGe { lo, width, c, .. } => {
                    if field(v[0], lo, width) >= c {
                        v[1] = toggle(&work_reg, v[1], wp);
                    }
                }
                Step::SwapWorkBit(j) => {
                    let b = v[0] >> j & 1;
                    if b != w {
                        v[0] ^= 1 << j;
                        v[1] = toggle(&work_reg, v[1], wp);
                    }
                }
                Step::NotWork(_) => v[1] = toggle(&work_reg, v[1], wp),
                Step::Rotl(width) => {
                    let x = field(v[0], 0, width);
                    let x = ((x << 1) | (x >> (width - 1))) & mask(width);
                    v[0] = set_field(v[0], 0, width, x);
                }
                Step::Rotr(width) => {
                    let x = field(v[0], 0, width);
                    let x = ((x >> 1) | ((x & 1) << (width - 1))) & mask(width);
                    v[0] = set_field(v[0], 0, width, x);
                }
                Step::Negate(n) => {
                    if v[0] != 0 && v[0] < n {
                        v[0] = n - v[0];
                    }
                }
            }
        })?;
        if let Some(m) = monitor.as_deref_mut() {
            m.observe(state, reg)?;
        }
    }
    Ok(())
}

fn check_inputs(
    state: &SparseState,
    reg: RegId,
    work: Dit,
    modulus: Modulus,
    n_prime: u32,
) -> Result<()> {
    require_width(state, reg, (modulus.bits() + n_prime) as usize)?;
    require_below(state, reg, modulus.value())?;
    require_clean_ancilla(state, work, &[reg])
}

/// `alpha -> a_short alpha mod N` in place on a register of at least
/// `n + n'` qubits, with one clean work qubit.
pub fn short_mul(
    state: &mut SparseState,
    ctrls: &[Control],
    reg: RegId,
    work: Dit,
    params: &ShortMulParams,
    monitor: Option<&mut FootprintMonitor>,
) -> Result<()> {
    check_inputs(state, reg, work, params.modulus, params.n_prime)?;
    run_steps(state, ctrls, reg, work, &odd_mul_steps(params), monitor)
}

/// `alpha -> a alpha mod N` for `a = r' / r`: multiply by `r'`, divide by
/// `|r|` (the multiplication run backwards) and negate if `r < 0`. Both
/// factors have at most `split.n_prime` bits; even factors are handled by
/// modular doublings. The split must satisfy `gcd(r, N) = 1`.
pub fn short_mul_pair(
    state: &mut SparseState,
    ctrls: &[Control],
    reg: RegId,
    work: Dit,
    split: &MidpointSplit,
    modulus: Modulus,
    monitor: Option<&mut FootprintMonitor>,
) -> Result<()> {
    let n = modulus.value();
    let r_abs = split.r.unsigned_abs() as u64;
    if r_abs == 0 || gcd(r_abs % n, n) != 1 || gcd(split.r_prime, n) != 1 {
        return Err(NumError::NotCoprime {
            value: r_abs,
            modulus: n,
            gcd: gcd(r_abs % n, n),
        }
        .into());
    }
    check_inputs(state, reg, work, modulus, split.n_prime)?;
    let mut steps = factor_steps(split.r_prime, modulus)?;
    steps.extend(
        factor_steps(r_abs, modulus)?
            .into_iter()
            .rev()
            .map(Step::inverse),
    );
    if split.r < 0 {
        steps.push(Step::Negate(n));
    }
    run_steps(state, ctrls, reg, work, &steps, monitor)
}
