//! Sparse statevector simulation over mixed-radix registers.
//!
//! A [`SparseState`] stores only the nonzero amplitudes, keyed by a packed
//! basis label (see [`RegisterLayout`]). Arithmetic circuits act as basis
//! permutations, which keeps the support small: a Shor intermediate state
//! has at most (number of exponent values) x (coset terms) labels, far fewer
//! than the full Hilbert space.
//!
//! Qubits and qutrits are both native dits here; a register may even mix
//! radices, although the QFT requires a uniform one.

mod layout;
mod qft;
mod state;

pub mod probe;

use num_complex::Complex64;
use thiserror::Error;

pub use layout::{Dit, RegId, Register, RegisterLayout};
pub use qft::Direction;
pub use state::{MeasurementRecord, SparseState};

pub type C64 = Complex64;

/// Amplitudes with magnitude below this are dropped after dense gates.
pub const PRUNE_EPS: f64 = 1e-14;

/// Tolerance used for unitarity and normalization checks.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid register `{0}`")]
    InvalidRegister(String),
    #[error("register `{0}` appears twice")]
    DuplicateRegister(String),
    #[error("no register named `{0}`")]
    UnknownRegister(String),
    #[error("basis label space does not fit in 63 bits")]
    LabelSpaceTooLarge,
    #[error("expected {expected} register values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("value {value} out of range for register `{register}` of size {size}")]
    ValueOutOfRange {
        register: String,
        value: u64,
        size: u64,
    },
    #[error("no dit {pos} in register #{reg}")]
    InvalidDit { reg: usize, pos: usize },
    #[error("map is not injective on the support (collision at label {label})")]
    NotInjective { label: u64 },
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("matrix dimension {got} does not match dit radix {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("register `{0}` mixes radices")]
    MixedRadix(String),
    #[error("register `{0}` is not |0> on the support")]
    NotZeroed(String),
    #[error("superposition size {x_max} exceeds register size {size}")]
    TooLarge { x_max: u64, size: u64 },
    #[error("states have different layouts")]
    LayoutMismatch,
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("operation did not act as a basis permutation")]
    NotPermutation,
}

/// Activates an operation only on labels whose control dit holds one of the
/// digits in `mask` (bit `d` set means digit `d` activates).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub dit: Dit,
    pub mask: u32,
}

impl Control {
    /// Active when the dit equals `digit`.
    pub fn is(dit: Dit, digit: u32) -> Self {
        Self {
            dit,
            mask: 1 << digit,
        }
    }

    /// Active when the dit is one of `digits`.
    pub fn any_of(dit: Dit, digits: &[u32]) -> Self {
        Self {
            dit,
            mask: digits.iter().fold(0, |m, &d| m | 1 << d),
        }
    }

    /// Active on qubit value 1.
    pub fn on(dit: Dit) -> Self {
        Self::is(dit, 1)
    }
}

/// Appends `extra` to a control list.
pub fn with_control(ctrls: &[Control], extra: Control) -> Vec<Control> {
    let mut v = Vec::with_capacity(ctrls.len() + 1);
    v.extend_from_slice(ctrls);
    v.push(extra);
    v
}

/// A dense `d x d` matrix acting on one dit; column `x` is the image of `|x>`.
#[derive(Debug, Clone, PartialEq)]
pub struct DitMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl DitMatrix {
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self, SimError> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(SimError::DimensionMismatch {
                expected: dim,
                got: bad.len(),
            });
        }
        Ok(Self {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![0.0; dim])
    }

    /// Diagonal matrix with entries `exp(2 pi i t)` for the given turns `t`.
    pub fn diagonal(turns: &[f64]) -> Self {
        let dim = turns.len();
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for (i, &t) in turns.iter().enumerate() {
            data[i * dim + i] = cis_turns(t);
        }
        Self { dim, data }
    }

    /// The generalized Hadamard: `|x> -> d^(-1/2) sum_y w^(xy) |y>`, `w = e^(2 pi i / d)`.
    pub fn dft(dim: usize) -> Self {
        let scale = 1.0 / (dim as f64).sqrt();
        let mut data = Vec::with_capacity(dim * dim);
        for y in 0..dim {
            for x in 0..dim {
                data.push(cis_turns(((x * y) % dim) as f64 / dim as f64) * scale);
            }
        }
        Self { dim, data }
    }

    pub fn hadamard() -> Self {
        Self::dft(2)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                data[c * d + r] = self.data[r * d + c].conj();
            }
        }
        Self { dim: d, data }
    }

    /// Largest entrywise deviation of `U^dagger U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..d {
                    acc += self.data[k * d + i].conj() * self.data[k * d + j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }
}

/// `exp(2 pi i t)`.
pub fn cis_turns(t: f64) -> C64 {
    C64::from_polar(1.0, std::f64::consts::TAU * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dft_is_unitary() {
        for d in 2..9 {
            assert!(DitMatrix::dft(d).unitarity_deviation() < 1e-12);
            let m = DitMatrix::dft(d);
            let back = m.adjoint();
            assert!(back.unitarity_deviation() < 1e-12);
        }
        let bad = DitMatrix::from_rows(vec![
            vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        ])
        .unwrap();
        assert!(bad.unitarity_deviation() > 0.5);
        assert!(DitMatrix::from_rows(vec![vec![C64::new(1.0, 0.0)], vec![]]).is_err());
    }

    #[test]
    fn control_masks() {
        let d = Dit::new(RegId(0), 0);
        assert_eq!(Control::is(d, 2).mask, 0b100);
        assert_eq!(Control::any_of(d, &[0, 2]).mask, 0b101);
        assert_eq!(Control::on(d).mask, 0b10);
    }
}
