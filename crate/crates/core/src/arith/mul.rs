use crate::modnum::Modulus;
use crate::simstate::{with_control, Control, Dit, RegId, SparseState};

use super::adder::mod_mul_add;
use super::{require_below, require_width, ArithError, Result};

/// Swaps the values of two registers of equal width.
pub fn ctrl_swap(state: &mut SparseState, ctrls: &[Control], a: RegId, b: RegId) -> Result<()> {
    let wa = require_width(state, a, 1)?;
    require_width(state, b, wa)?;
    state.apply_controlled_permutation(ctrls, &[a, b], |v| v.swap(0, 1))?;
    Ok(())
}

/// Multiplication by `-1`: `v -> (N - v) mod N`, fixing 0.
pub fn negate_mod(
    state: &mut SparseState,
    ctrls: &[Control],
    reg: RegId,
    modulus: Modulus,
) -> Result<()> {
    let n = modulus.value();
    require_width(state, reg, modulus.bits() as usize)?;
    require_below(state, reg, n)?;
    state.apply_controlled_permutation(ctrls, &[reg], |v| {
        if v[0] != 0 {
            v[0] = n - v[0];
        }
    })?;
    Ok(())
}

/// `|alpha, 0> -> |a alpha mod N, 0>` with a zeroed helper register:
/// `B += a A`, `A -= a^-1 B`, swap.
pub fn mul_two_step(
    state: &mut SparseState,
    ctrls: &[Control],
    reg_a: RegId,
    reg_b: RegId,
    a: u64,
    modulus: Modulus,
    anc: Dit,
) -> Result<()> {
    let n = modulus.value();
    let a_inv = modulus.inv(a % n)?;
    if !state.is_zero(reg_b) {
        return Err(ArithError::AncillaNotZero(
            state.layout().register(reg_b).name().to_string(),
        ));
    }
    mod_mul_add(state, ctrls, reg_a, reg_b, a, modulus, anc)?;
    mod_mul_add(state, ctrls, reg_b, reg_a, n - a_inv, modulus, anc)?;
    ctrl_swap(state, ctrls, reg_a, reg_b)
}

/// `|alpha, beta> -> |a alpha, a^-1 beta>` (mod N) with no zeroed register:
/// three cross multiply-adds, a swap and a negation. On the column
/// `(alpha, beta)` this is the matrix product
///
/// ```text
/// [1  0] [0 1] [1 0] [1 -a^-1] [1 0]   [a  0   ]
/// [0 -1] [1 0] [a 1] [0  1   ] [a 1] = [0  a^-1]
/// ```
pub fn mul_three_step_uninit(
    state: &mut SparseState,
    ctrls: &[Control],
    reg_a: RegId,
    reg_b: RegId,
    a: u64,
    modulus: Modulus,
    anc: Dit,
) -> Result<()> {
    let n = modulus.value();
    let a = a % n;
    let a_inv = modulus.inv(a)?;
    // (alpha, beta) -> (alpha, beta + a alpha)
    mod_mul_add(state, ctrls, reg_a, reg_b, a, modulus, anc)?;
    // -> (-a^-1 beta, beta + a alpha)
    mod_mul_add(state, ctrls, reg_b, reg_a, n - a_inv, modulus, anc)?;
    // -> (-a^-1 beta, a alpha)
    mod_mul_add(state, ctrls, reg_a, reg_b, a, modulus, anc)?;
    ctrl_swap(state, ctrls, reg_a, reg_b)?;
    negate_mod(state, ctrls, reg_b, modulus)
}

/// Qutrit-controlled multiplication with balanced digits: control digit `d`
/// multiplies `A` by `a^(d-1)` and `B` by `a^(1-d)`. Digit 0 is handled by
/// swapping the registers around the same three-step circuit.
#[allow(clippy::too_many_arguments)]
pub fn ctrl_mul_trinary(
    state: &mut SparseState,
    ctrls: &[Control],
    control: Dit,
    reg_a: RegId,
    reg_b: RegId,
    a: u64,
    modulus: Modulus,
    anc: Dit,
) -> Result<()> {
    let on_zero = with_control(ctrls, Control::is(control, 0));
    let on_outer = with_control(ctrls, Control::any_of(control, &[0, 2]));
    ctrl_swap(state, &on_zero, reg_a, reg_b)?;
    mul_three_step_uninit(state, &on_outer, reg_a, reg_b, a, modulus, anc)?;
    ctrl_swap(state, &on_zero, reg_a, reg_b)
}
