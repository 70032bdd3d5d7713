//! Coset representation of residues: `b in Z_N` is stored as the ladder
//! `x_max^(-1/2) sum_{x < x_max} |b + xN>` in a register a few bits wider
//! than `N`. Plain (non-modular) addition of `c` then approximates modular
//! addition; a wrap past `N` shifts the ladder by one rung and costs
//! `1/x_max` of overlap.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::modnum::{bit_length, ceil_log2, mod_mul, Modulus};
use crate::simstate::{
    with_control, Control, Dit, RegId, RegisterLayout, SparseState, C64, NORM_TOL,
};

use super::adder::{add_const, compare_ge_flag};
use super::{bit, mask, require_below, require_width, ArithError, Result};

/// Headroom bits added above `ceil(log2 x_max)` by default.
pub const DEFAULT_HEADROOM: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetParams {
    pub x_max: u64,
    pub pad_bits: u32,
}

impl CosetParams {
    pub fn new(x_max: u64) -> Self {
        Self::with_headroom(x_max, DEFAULT_HEADROOM)
    }

    pub fn with_headroom(x_max: u64, headroom: u32) -> Self {
        assert!(x_max >= 1, "x_max must be positive");
        Self {
            x_max,
            pad_bits: ceil_log2(x_max) + headroom,
        }
    }

    /// Width of a value register for an `n`-bit modulus.
    pub fn value_width(&self, n_bits: u32) -> usize {
        (n_bits + self.pad_bits) as usize
    }

    /// Qubits needed to hold a rung index `x < x_max`.
    pub fn work_width(&self) -> usize {
        ceil_log2(self.x_max).max(1) as usize
    }

    /// Minimum support value above which [`maybe_recenter`] subtracts.
    pub fn recenter_threshold(&self, modulus: u64) -> u64 {
        self.x_max / 2 * modulus
    }
}

/// How the control register of a multiply-accumulate stores its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ControlRep {
    /// A plain residue below `N`; `n` controlled additions.
    Usual,
    /// A coset ladder; one controlled addition per register bit.
    Coset,
}

/// The ladder `sum_{x < x_max} |b + (first_rung + x) N>` in register `reg`,
/// with every other register fixed to `values`.
pub fn coset_state(
    layout: impl Into<Arc<RegisterLayout>>,
    values: &[u64],
    reg: RegId,
    b: u64,
    modulus: u64,
    x_max: u64,
    first_rung: u64,
) -> Result<SparseState> {
    let terms = (0..x_max).map(|x| {
        let mut v = values.to_vec();
        v[reg.index()] = b + (first_rung + x) * modulus;
        (v, C64::new(1.0, 0.0))
    });
    Ok(SparseState::from_terms(layout, terms)?)
}

fn check_value_width(
    state: &SparseState,
    value: RegId,
    modulus: Modulus,
    x_max: u64,
) -> Result<usize> {
    let top = (x_max as u128 * modulus.value() as u128 - 1) as u64;
    require_width(state, value, bit_length(top) as usize)
}

/// `|b>|0> -> |ladder of b>|0>` for `b < N`: a uniform superposition of rung
/// indices in `work`, then for each bit `x_i` add `2^i N` and uncompute `x_i`
/// by testing whether the value reached `2^i N`.
pub fn coset_encode(
    state: &mut SparseState,
    value: RegId,
    work: RegId,
    modulus: Modulus,
    params: &CosetParams,
) -> Result<()> {
    let n = modulus.value();
    check_value_width(state, value, modulus, params.x_max)?;
    let bits = ceil_log2(params.x_max) as usize;
    require_width(state, work, bits.max(1))?;
    require_below(state, value, n)?;
    if !state.is_zero(work) {
        return Err(ArithError::AncillaNotZero(
            state.layout().register(work).name().to_string(),
        ));
    }
    state.prepare_uniform(work, params.x_max)?;
    for i in 0..bits {
        let step = (1u64 << i) * n;
        add_const(state, &[bit(work, i)], value, step as i128)?;
        compare_ge_flag(state, &[], value, step, Dit::new(work, i))?;
    }
    Ok(())
}

/// Inverse of [`coset_encode`]. Anything that is not an exact ladder leaves
/// weight on nonzero rung indices or on values `>= N`; if that residual
/// exceeds the normalization tolerance the state is left untouched and
/// `NotCosetState` is returned.
pub fn coset_decode(
    state: &mut SparseState,
    value: RegId,
    work: RegId,
    modulus: Modulus,
    params: &CosetParams,
) -> Result<()> {
    let n = modulus.value();
    check_value_width(state, value, modulus, params.x_max)?;
    let bits = ceil_log2(params.x_max) as usize;
    require_width(state, work, bits.max(1))?;
    let mut s = state.clone();
    for i in (0..bits).rev() {
        let step = (1u64 << i) * n;
        compare_ge_flag(&mut s, &[], value, step, Dit::new(work, i))?;
        add_const(&mut s, &[bit(work, i)], value, -(step as i128))?;
    }
    s.unprepare_uniform(work, params.x_max)?;
    let layout = s.layout();
    let residual: f64 = s
        .iter()
        .filter(|&(l, _)| layout.value(l, work) != 0 || layout.value(l, value) >= n)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    if residual > NORM_TOL {
        return Err(ArithError::NotCosetState { residual });
    }
    *state = s;
    Ok(())
}

/// Non-modular `v -> v + c (mod 2^w)`. Returns how many active support
/// labels wrapped past `2^w`; zero in the intended operating regime.
pub fn coset_add_const(
    state: &mut SparseState,
    ctrls: &[Control],
    value: RegId,
    c: u64,
) -> Result<usize> {
    let w = require_width(state, value, 1)?;
    let m = mask(w);
    let c = c & m;
    if c == 0 {
        return Ok(0);
    }
    let mut wraps = 0;
    state.apply_controlled_permutation(ctrls, &[value], |v| {
        let (sum, _) = v[0].overflowing_add(c);
        if sum > m || sum < v[0] {
            wraps += 1;
        }
        v[0] = sum & m;
    })?;
    Ok(wraps)
}

/// Subtracts `m N` from every label, relabeling the ladder `m` rungs down.
pub fn coset_recenter(
    state: &mut SparseState,
    value: RegId,
    modulus: Modulus,
    m: u64,
) -> Result<()> {
    let sub = m
        .checked_mul(modulus.value())
        .ok_or(ArithError::Underflow {
            min: 0,
            sub: u64::MAX,
        })?;
    if sub == 0 {
        return Ok(());
    }
    let min = state.min_value(value).unwrap_or(0);
    if sub > min {
        return Err(ArithError::Underflow { min, sub });
    }
    add_const(state, &[], value, -(sub as i128))
}

/// Recentering policy: once the smallest support value passes
/// `(x_max / 2) N`, subtract the largest multiple of `N` below it. Returns
/// the number of rungs removed.
pub fn maybe_recenter(
    state: &mut SparseState,
    value: RegId,
    modulus: Modulus,
    params: &CosetParams,
) -> Result<u64> {
    let min = state.min_value(value).unwrap_or(0);
    if min <= params.recenter_threshold(modulus.value()) {
        return Ok(0);
    }
    let m = min / modulus.value();
    coset_recenter(state, value, modulus, m)?;
    Ok(m)
}

/// `accum += a * control (mod N)` approximately, with `accum` in coset
/// representation: one controlled non-modular addition of `a 2^j mod N` per
/// control bit. A coset-represented control uses all its bits; the extra
/// rungs contribute multiples of `N` and so leave the residue unchanged.
/// Returns the number of wrapped labels.
pub fn coset_mod_mul_accumulate(
    state: &mut SparseState,
    ctrls: &[Control],
    control: RegId,
    accum: RegId,
    a: u64,
    modulus: Modulus,
    rep: ControlRep,
) -> Result<usize> {
    let n = modulus.value();
    let control_width = require_width(state, control, 1)?;
    let bits = match rep {
        ControlRep::Usual => {
            require_below(state, control, n)?;
            (modulus.bits() as usize).min(control_width)
        }
        ControlRep::Coset => control_width,
    };
    let mut wraps = 0;
    let mut c = a % n;
    for j in 0..bits {
        if c != 0 {
            wraps += coset_add_const(state, &with_control(ctrls, bit(control, j)), accum, c)?;
        }
        c = mod_mul(c, 2, n);
    }
    Ok(wraps)
}
