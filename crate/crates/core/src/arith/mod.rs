//! Reversible arithmetic on [`SparseState`] registers.
//!
//! Every operation here is a basis permutation (or, for the Fourier adder, a
//! diagonal phase) acting in place. Each takes a list of [`Control`]s that
//! gates the whole operation, so any circuit built from these pieces can be
//! controlled by a Shor exponent dit without extra work.
//!
//! Registers holding integers must be qubit registers; value `v` is stored
//! little-endian across the register's bits.

mod adder;
mod coset;
mod mul;
mod short;

use thiserror::Error;

use crate::modnum::NumError;
use crate::simstate::{Control, Dit, RegId, Register, SimError, SparseState};

pub use adder::{add_const, compare_ge_flag, fourier_add_const, mod_add_const_exact, mod_mul_add};
pub use coset::{
    coset_add_const, coset_decode, coset_encode, coset_mod_mul_accumulate, coset_recenter,
    coset_state, maybe_recenter, ControlRep, CosetParams,
};
pub use mul::{ctrl_mul_trinary, ctrl_swap, mul_three_step_uninit, mul_two_step, negate_mod};
pub use short::{
    short_mul, short_mul_pair, short_mul_pair_footprint_bound, FootprintMonitor, ShortMulParams,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArithError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("register `{register}` holds {value}, expected below {bound}")]
    InputOutOfRange {
        register: String,
        value: u64,
        bound: u64,
    },
    #[error("ancilla `{0}` is not |0> on the support")]
    AncillaNotZero(String),
    #[error("state is not a coset ladder (residual weight {residual:e})")]
    NotCosetState { residual: f64 },
    #[error("cannot subtract {sub} from a register whose minimum is {min}")]
    Underflow { min: u64, sub: u64 },
    #[error("short multiplier {0} is even")]
    EvenMultiplier(u64),
    #[error("register `{register}` has {width} qubits, needs {needed}")]
    RegisterTooSmall {
        register: String,
        width: usize,
        needed: usize,
    },
    #[error("register footprint {footprint} exceeds the limit {limit}")]
    FootprintExceeded { footprint: u32, limit: u32 },
    #[error("`{0}` must be a qubit register")]
    NotQubitRegister(String),
    #[error("ancilla must be a qubit outside the target registers")]
    BadAncilla,
}

pub type Result<T> = std::result::Result<T, ArithError>;

/// Width of a register that must consist of qubits.
pub(crate) fn qubit_width(state: &SparseState, reg: RegId) -> Result<usize> {
    let r = state
        .layout()
        .registers()
        .get(reg.index())
        .ok_or_else(|| SimError::InvalidRegister(format!("#{}", reg.index())))?;
    match r.uniform_radix() {
        Some(2) => Ok(r.width()),
        _ => Err(ArithError::NotQubitRegister(r.name().to_string())),
    }
}

pub(crate) fn require_width(state: &SparseState, reg: RegId, needed: usize) -> Result<usize> {
    let w = qubit_width(state, reg)?;
    if w < needed {
        return Err(ArithError::RegisterTooSmall {
            register: state.layout().register(reg).name().to_string(),
            width: w,
            needed,
        });
    }
    Ok(w)
}

/// Fails unless every support value of `reg` is below `bound`.
pub(crate) fn require_below(state: &SparseState, reg: RegId, bound: u64) -> Result<()> {
    match state.max_value(reg) {
        Some(v) if v >= bound => Err(ArithError::InputOutOfRange {
            register: state.layout().register(reg).name().to_string(),
            value: v,
            bound,
        }),
        _ => Ok(()),
    }
}

/// Checks that `anc` is a qubit outside `targets` holding 0 everywhere.
pub(crate) fn require_clean_ancilla(
    state: &SparseState,
    anc: Dit,
    targets: &[RegId],
) -> Result<()> {
    if targets.contains(&anc.reg) {
        return Err(ArithError::BadAncilla);
    }
    let reg = state
        .layout()
        .registers()
        .get(anc.reg.index())
        .ok_or(ArithError::BadAncilla)?;
    if anc.pos >= reg.width() || reg.radix(anc.pos) != 2 {
        return Err(ArithError::BadAncilla);
    }
    let dirty = state
        .register_values(anc.reg)
        .any(|v| reg.digit(v, anc.pos) != 0);
    if dirty {
        return Err(ArithError::AncillaNotZero(reg.name().to_string()));
    }
    Ok(())
}

/// Toggles qubit `pos` of a register value.
#[inline]
pub(crate) fn toggle(reg: &Register, value: u64, pos: usize) -> u64 {
    reg.with_digit(value, pos, 1 - reg.digit(value, pos))
}

/// Qubit control on bit `j` of `reg`.
pub(crate) fn bit(reg: RegId, j: usize) -> Control {
    Control::on(Dit::new(reg, j))
}

#[inline]
pub(crate) fn mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}
