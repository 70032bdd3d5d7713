use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{coset_add_const, coset_state};
use crate::modnum::{bit_length, Modulus};
use crate::simstate::{RegId, Register, RegisterLayout};

use super::{Result, ShorError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityStep {
    pub step: usize,
    pub c: u64,
    /// Running residue after this step.
    pub value: u64,
    /// |<exact modular add of the previous state | coset add>|
    pub per_step: f64,
    /// |<ideal ladder of the running residue | state>|
    pub cumulative: f64,
    pub expected_per_step: f64,
    pub expected_cumulative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityTrace {
    pub modulus: u64,
    pub x_max: u64,
    pub start: u64,
    pub steps: Vec<FidelityStep>,
    pub wraps: u64,
}

impl FidelityTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,c,value,per_step,cumulative\n");
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                s.step, s.c, s.value, s.per_step, s.cumulative
            );
        }
        out
    }

    pub fn final_cumulative(&self) -> f64 {
        self.steps.last().map_or(1.0, |s| s.cumulative)
    }
}

/// Repeated non-modular addition of random constants to a coset ladder of
/// a random residue, compared step by step with exact modular addition.
pub fn fidelity_experiment<R: Rng + ?Sized>(
    modulus: Modulus,
    x_max: u64,
    adds: usize,
    rng: &mut R,
) -> Result<FidelityTrace> {
    if x_max == 0 {
        return Err(ShorError::InvalidConfig("x_max must be positive".into()));
    }
    let n = modulus.value();
    let top = (x_max as u128 + adds as u128 + 1) * n as u128;
    if top >= 1u128 << 62 {
        return Err(ShorError::InvalidConfig("ladder too large".into()));
    }
    let width = bit_length(top as u64) as usize;
    let layout = Arc::new(RegisterLayout::new(vec![Register::qubits("v", width)?])?);
    let reg = RegId(0);
    let start = rng.gen_range(0..n);
    let mut state = coset_state(layout.clone(), &[0], reg, start, n, x_max, 0)?;
    let mut value = start;
    let mut shifts = 0u64;
    let mut wraps = 0u64;
    let mut steps = Vec::with_capacity(adds);
    for step in 1..=adds {
        let c = rng.gen_range(0..n);
        let mut ideal_step = state.clone();
        ideal_step.apply_permutation(&[reg], |v| v[0] = (v[0] % n + c) % n + v[0] / n * n)?;
        wraps += coset_add_const(&mut state, &[], reg, c)? as u64;
        let shifted = value + c >= n;
        value = (value + c) % n;
        if shifted {
            shifts += 1;
        }
        let ideal = coset_state(layout.clone(), &[0], reg, value, n, x_max, 0)?;
        let xf = x_max as f64;
        steps.push(FidelityStep {
            step,
            c,
            value,
            per_step: ideal_step.overlap(&state)?.norm(),
            cumulative: ideal.overlap(&state)?.norm(),
            expected_per_step: if shifted { (xf - 1.0) / xf } else { 1.0 },
            expected_cumulative: (x_max.saturating_sub(shifts)) as f64 / xf,
        });
    }
    Ok(FidelityTrace {
        modulus: n,
        x_max,
        start,
        steps,
        wraps,
    })
}
