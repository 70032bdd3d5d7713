use crate::modnum::{mod_mul, Modulus};
use crate::simstate::{with_control, Control, Dit, RegId, SparseState};

use super::{
    bit, mask, qubit_width, require_below, require_clean_ancilla, require_width, toggle,
    ArithError, Result,
};

/// `v -> (v + c) mod 2^w` on a `w`-qubit register. Negative `c` subtracts.
pub fn add_const(state: &mut SparseState, ctrls: &[Control], reg: RegId, c: i128) -> Result<()> {
    let w = qubit_width(state, reg)?;
    let m = mask(w);
    let c = (c.rem_euclid(m as i128 + 1)) as u64;
    if c == 0 {
        return Ok(());
    }
    state.apply_controlled_permutation(ctrls, &[reg], |v| v[0] = v[0].wrapping_add(c) & m)?;
    Ok(())
}

/// Adds `c` to a register that has been put through the forward QFT, using
/// only diagonal phases: Fourier mode `x` picks up `exp(2 pi i c x / 2^w)`.
/// Conjugating by the QFT gives [`add_const`].
pub fn fourier_add_const(
    state: &mut SparseState,
    ctrls: &[Control],
    reg: RegId,
    c: i128,
) -> Result<()> {
    let w = qubit_width(state, reg)?;
    let q = mask(w) as u128 + 1;
    let c = c.rem_euclid(q as i128) as u128;
    if c == 0 {
        return Ok(());
    }
    // one rotation per qubit: bit k of x contributes c 2^k / 2^w turns
    let turns: Vec<f64> = (0..w).map(|k| ((c << k) % q) as f64 / q as f64).collect();
    state.apply_phase(ctrls, &[reg], |v| {
        let x = v[0];
        turns
            .iter()
            .enumerate()
            .filter(|&(k, _)| x >> k & 1 == 1)
            .map(|(_, t)| t)
            .sum()
    })?;
    Ok(())
}

/// Toggles `flag` on every label where the register value is `>= c`.
pub fn compare_ge_flag(
    state: &mut SparseState,
    ctrls: &[Control],
    reg: RegId,
    c: u64,
    flag: Dit,
) -> Result<()> {
    qubit_width(state, reg)?;
    if flag.reg == reg {
        return Err(ArithError::BadAncilla);
    }
    let flag_reg = state.layout().register(flag.reg).clone();
    if flag.pos >= flag_reg.width() || flag_reg.radix(flag.pos) != 2 {
        return Err(ArithError::BadAncilla);
    }
    state.apply_controlled_permutation(ctrls, &[reg, flag.reg], |v| {
        if v[0] >= c {
            v[1] = toggle(&flag_reg, v[1], flag.pos);
        }
    })?;
    Ok(())
}

/// Exact `v -> (v + c) mod N` for `v < N`, using one clean ancilla qubit:
/// compare against `N - c`, conditionally subtract `N`, add `c`, then
/// uncompute the ancilla with a comparison against `c`.
pub fn mod_add_const_exact(
    state: &mut SparseState,
    ctrls: &[Control],
    reg: RegId,
    c: u64,
    modulus: Modulus,
    anc: Dit,
) -> Result<()> {
    let n = modulus.value();
    require_width(state, reg, modulus.bits() as usize)?;
    require_below(state, reg, n)?;
    require_clean_ancilla(state, anc, &[reg])?;
    let c = c % n;
    if c == 0 {
        return Ok(());
    }
    mod_add_unchecked(state, ctrls, reg, c, n, anc)
}

pub(crate) fn mod_add_unchecked(
    state: &mut SparseState,
    ctrls: &[Control],
    reg: RegId,
    c: u64,
    n: u64,
    anc: Dit,
) -> Result<()> {
    compare_ge_flag(state, ctrls, reg, n - c, anc)?;
    add_const(
        state,
        &with_control(ctrls, Control::on(anc)),
        reg,
        -(n as i128),
    )?;
    add_const(state, ctrls, reg, c as i128)?;
    compare_ge_flag(state, ctrls, reg, c, anc)?;
    let anc_reg = state.layout().register(anc.reg).clone();
    state.apply_controlled_permutation(ctrls, &[anc.reg], |v| {
        v[0] = toggle(&anc_reg, v[0], anc.pos)
    })?;
    Ok(())
}

/// `dst += factor * src (mod N)`, as one controlled modular addition of
/// `factor 2^j mod N` per source bit `j`.
pub fn mod_mul_add(
    state: &mut SparseState,
    ctrls: &[Control],
    src: RegId,
    dst: RegId,
    factor: u64,
    modulus: Modulus,
    anc: Dit,
) -> Result<()> {
    let n = modulus.value();
    let bits = modulus.bits() as usize;
    let src_width = require_width(state, src, 1)?;
    require_width(state, dst, bits)?;
    require_below(state, dst, n)?;
    require_below(state, src, n)?;
    require_clean_ancilla(state, anc, &[src, dst])?;
    let mut c = factor % n;
    for j in 0..bits.min(src_width) {
        if c != 0 {
            mod_add_unchecked(state, &with_control(ctrls, bit(src, j)), dst, c, n, anc)?;
        }
        c = mod_mul(c, 2, n);
    }
    Ok(())
}
