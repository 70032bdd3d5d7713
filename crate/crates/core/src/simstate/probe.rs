//! Exhaustive testing of basis permutations in a single pass.
//!
//! A probe loads every input of interest into one (unnormalized)
//! superposition where input `k` carries amplitude `k + 1`. A basis
//! permutation only moves amplitudes, never mixes them, so after the
//! operation the amplitude found at each output label names the input that
//! landed there, bit for bit.

use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::{RegisterLayout, SimError, SparseState, C64};

pub struct PermutationProbe {
    inputs: Vec<Vec<u64>>,
    state: SparseState,
}

impl PermutationProbe {
    /// `inputs` are full register-value tuples; they must be distinct.
    pub fn new(
        layout: impl Into<Arc<RegisterLayout>>,
        inputs: Vec<Vec<u64>>,
    ) -> Result<Self, SimError> {
        let layout = layout.into();
        let mut amps = FxHashMap::with_capacity_and_hasher(inputs.len(), Default::default());
        for (k, values) in inputs.iter().enumerate() {
            let label = layout.pack(values)?;
            if amps.insert(label, C64::new(k as f64 + 1.0, 0.0)).is_some() {
                return Err(SimError::NotInjective { label });
            }
        }
        Ok(Self {
            inputs,
            state: SparseState::from_raw(layout, amps),
        })
    }

    pub fn inputs(&self) -> &[Vec<u64>] {
        &self.inputs
    }

    pub fn state(&self) -> &SparseState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut SparseState {
        &mut self.state
    }

    /// Image of every input, in input order. Fails if the operation changed
    /// any amplitude instead of only moving it.
    pub fn outputs(&self) -> Result<Vec<Vec<u64>>, SimError> {
        let n = self.inputs.len();
        if self.state.len() != n {
            return Err(SimError::NotPermutation);
        }
        let mut out: Vec<Option<Vec<u64>>> = vec![None; n];
        for (label, amp) in self.state.iter() {
            let k = amp.re - 1.0;
            if amp.im != 0.0 || k.fract() != 0.0 || k < 0.0 || k as usize >= n {
                return Err(SimError::NotPermutation);
            }
            let slot = &mut out[k as usize];
            if slot.is_some() {
                return Err(SimError::NotPermutation);
            }
            *slot = Some(self.state.layout().values(label));
        }
        Ok(out
            .into_iter()
            .map(|o| o.expect("all slots filled"))
            .collect())
    }
}
