//! Closed-form qubit and step counts per circuit variant.

use serde::{Deserialize, Serialize};

use crate::modnum::ceil_log2;
use crate::Variant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceParams {
    /// Work qubits of the modular adder.
    pub work_qubits: u32,
    /// Depth charged per addition when additions run back to back.
    pub addition_unit_cost: u64,
}

impl Default for ResourceParams {
    fn default() -> Self {
        Self {
            work_qubits: 1,
            addition_unit_cost: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub variant: Variant,
    pub n: u32,
    pub qubits: u64,
    pub multiplications: u64,
    pub modular_additions: u64,
    /// Running time relative to the standard circuit, to 4 decimals.
    pub time_factor: f64,
}

/// Number of trits covering `n` bits: the smallest `n'` with `3^n' >= 2^n`,
/// i.e. `ceil(n / log2 3)`.
pub fn trinary_width(n: u32) -> u32 {
    let target = 1u128 << n.min(126);
    let mut p = 1u128;
    let mut k = 0;
    while p < target {
        p *= 3;
        k += 1;
    }
    k
}

/// Register plus work qubit plus control for one short multiplication.
pub fn short_mul_qubits(n: u32, n_prime: u32) -> u64 {
    (n + n_prime + 2) as u64
}

pub fn qubit_count(variant: Variant, n: u32, params: &ResourceParams) -> u64 {
    let n64 = n as u64;
    let work = params.work_qubits as u64;
    match variant {
        Variant::Standard | Variant::Uninit => 2 * n64 + 2 + work,
        // a qutrit control is stored in two qubits
        Variant::TrinaryUninit => 2 * n64 + 3 + work,
        Variant::Coset => 2 * (n64 + ceil_log2(n64 * n64) as u64 + 10) + 1,
        Variant::ShortFactor => short_mul_qubits(n, n.div_ceil(2)) - 1 + work,
    }
}

/// `(controlled multiplications, modular additions)`.
pub fn step_counts(variant: Variant, n: u32) -> (u64, u64) {
    let n64 = n as u64;
    match variant {
        Variant::Standard | Variant::Coset => (2 * n64, 4 * n64 * n64),
        Variant::Uninit => (2 * n64, 6 * n64 * n64),
        Variant::TrinaryUninit => {
            let muls = 2 * trinary_width(n) as u64;
            (muls, 3 * n64 * muls)
        }
        // two short multiplications per step, about three passes of n' each
        Variant::ShortFactor => (2 * n64, 2 * n64 * 6 * n.div_ceil(2) as u64),
    }
}

/// Asymptotic running time relative to the standard circuit: addition
/// counts with the digit count taken as the real number `2n / log2 p`.
pub fn time_factor(variant: Variant) -> f64 {
    let raw = match variant {
        Variant::Standard | Variant::Coset => 1.0,
        Variant::Uninit => 1.5,
        Variant::TrinaryUninit => 1.5 / 3f64.log2(),
        Variant::ShortFactor => 1.5,
    };
    (raw * 1e4).round() / 1e4
}

pub fn report(variant: Variant, n: u32, params: &ResourceParams) -> ResourceReport {
    let (multiplications, modular_additions) = step_counts(variant, n);
    ResourceReport {
        variant,
        n,
        qubits: qubit_count(variant, n, params),
        multiplications,
        modular_additions,
        time_factor: time_factor(variant),
    }
}

pub fn report_all(n: u32, params: &ResourceParams) -> Vec<ResourceReport> {
    Variant::ALL.iter().map(|&v| report(v, n, params)).collect()
}

/// Circuit depth. With a Fourier-space target each addition is one layer
/// and the transforms at both ends of a multiplication cost `n` layers
/// each; otherwise every addition is a ripple of depth `n`.
pub fn depth_estimate(
    variant: Variant,
    n: u32,
    parallel_fourier: bool,
    params: &ResourceParams,
) -> u64 {
    let (muls, adds) = step_counts(variant, n);
    let unit = params.addition_unit_cost;
    if parallel_fourier {
        adds * unit + muls * 2 * n as u64
    } else {
        adds * unit * n as u64
    }
}
