//! Semiclassical order finding for every circuit variant, and the
//! experiments built on it.
//!
//! A single control dit is reused for every exponent digit: it is put in
//! uniform superposition, drives one controlled multiplication, receives a
//! phase correction computed from the digits measured so far, is measured
//! in the Fourier basis, and is reset. Digits come out least significant
//! first, so multiplications run from the highest power down.

mod fidelity;
mod machine;
mod sampler;
mod trials;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{ArithError, CosetParams};
use crate::modnum::{ceil_log2, ModCtx, NumError};
use crate::resources::trinary_width;
use crate::simstate::SimError;
use crate::Variant;

pub use fidelity::{fidelity_experiment, FidelityStep, FidelityTrace};
pub use sampler::{monolithic_distribution, semiclassical_sample, total_variation};
pub use trials::{
    period_preserving_fraction, run_trials, variant_comparison, wilson_interval, ComparisonReport,
    ComparisonRow, ExperimentResult,
};

/// Default number of coset rungs for the coset variant.
pub const DEFAULT_SHOR_X_MAX: u64 = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShorError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

pub type Result<T> = std::result::Result<T, ShorError>;

#[derive(Debug, Clone)]
pub struct OrderFindConfig {
    pub ctx: ModCtx,
    pub variant: Variant,
    pub radix: u32,
    pub digit_count: u32,
    /// Rung count and register padding for the coset variant.
    pub coset: CosetParams,
    pub seed: u64,
    /// Check the short-factor register footprint after every sub-step.
    pub strict_footprint: bool,
}

impl OrderFindConfig {
    pub fn new(ctx: ModCtx, variant: Variant) -> Self {
        let n = ctx.bits();
        let radix = variant.radix();
        let digit_count = if radix == 3 {
            2 * trinary_width(n)
        } else {
            2 * n
        };
        let coset = shor_coset_params(n, digit_count, DEFAULT_SHOR_X_MAX);
        Self {
            ctx,
            variant,
            radix,
            digit_count,
            coset,
            seed: 0,
            strict_footprint: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Sets the rung count; padding is sized so the ladders do not wrap.
    pub fn with_x_max(mut self, x_max: u64) -> Self {
        self.coset = shor_coset_params(self.ctx.bits(), self.digit_count, x_max);
        self
    }

    pub fn with_strict_footprint(mut self, strict: bool) -> Self {
        self.strict_footprint = strict;
        self
    }

    /// `Q = radix^digit_count`.
    pub fn q(&self) -> u64 {
        (self.radix as u64).pow(self.digit_count)
    }

    pub fn validate(&self) -> Result<()> {
        if self.radix != self.variant.radix() {
            return Err(ShorError::InvalidConfig(format!(
                "variant {} needs radix {}",
                self.variant,
                self.variant.radix()
            )));
        }
        let q_bits = (self.radix as f64).log2() * self.digit_count as f64;
        if q_bits + 1e-9 < (2 * self.ctx.bits()) as f64 - 1.0 {
            return Err(ShorError::InvalidConfig(format!(
                "{} digits of radix {} give too little phase resolution",
                self.digit_count, self.radix
            )));
        }
        if q_bits > 62.0 {
            return Err(ShorError::InvalidConfig("phase register too large".into()));
        }
        Ok(())
    }

    pub fn echo(&self) -> ConfigEcho {
        let coset = self.variant == Variant::Coset;
        ConfigEcho {
            modulus: self.ctx.n_value(),
            base: self.ctx.base(),
            order: self.ctx.order(),
            variant: self.variant,
            radix: self.radix,
            digit_count: self.digit_count,
            x_max: coset.then_some(self.coset.x_max),
            pad_bits: coset.then_some(self.coset.pad_bits),
            seed: self.seed,
        }
    }
}

/// Coset padding for a full run: room for `x_max` rungs plus the drift of
/// two coset-controlled accumulations per digit between recenterings.
fn shor_coset_params(n: u32, digit_count: u32, x_max: u64) -> CosetParams {
    let base = CosetParams::new(x_max);
    let adds_per_mul = (n + base.pad_bits + 8) as u64;
    let span = x_max + x_max / 2 + 4 * digit_count as u64 * adds_per_mul;
    CosetParams {
        x_max,
        pad_bits: ceil_log2(span) + 1,
    }
}

/// Serializable summary of a configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub modulus: u64,
    pub base: u64,
    pub order: u64,
    pub variant: Variant,
    pub radix: u32,
    pub digit_count: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pad_bits: Option<u32>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub index: u64,
    /// Measured digits, most significant first.
    pub digits: Vec<u32>,
    pub y: u64,
    pub candidate: Option<u64>,
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_gcd: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_gcd: Option<u64>,
    /// Coset additions that wrapped past the register top.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wraps: Option<u64>,
    /// Largest short-multiplication footprint seen in strict mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_footprint: Option<u32>,
}
