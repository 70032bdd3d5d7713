//! Simulation and resource estimation for space-optimized Shor
//! order-finding circuits.
//!
//! - [`modnum`]: exact classical number theory (inverses, Euclid traces,
//!   midpoint splits, continued fractions).
//! - [`simstate`]: a sparse statevector over mixed-radix registers.
//! - [`arith`]: reversible arithmetic built from basis permutations.
//! - [`shor`]: semiclassical order finding for every circuit variant, plus
//!   the fidelity and success-rate experiments.
//! - [`resources`]: closed-form qubit and step counts.

pub mod arith;
pub mod modnum;
pub mod resources;
pub mod shor;
pub mod simstate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The order-finding circuit families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Two-step multiplication with a zeroed helper register.
    Standard,
    /// Three-step multiplication on two uninitialized registers.
    Uninit,
    /// Qutrit control digits driving the three-step multiplication.
    TrinaryUninit,
    /// Both registers in coset representation.
    Coset,
    /// Half-width multipliers from a midpoint split.
    ShortFactor,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Standard,
        Variant::Uninit,
        Variant::TrinaryUninit,
        Variant::Coset,
        Variant::ShortFactor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::Uninit => "uninit",
            Variant::TrinaryUninit => "trinary_uninit",
            Variant::Coset => "coset",
            Variant::ShortFactor => "short_factor",
        }
    }

    /// Radix of the exponent digits.
    pub fn radix(self) -> u32 {
        match self {
            Variant::TrinaryUninit => 3,
            _ => 2,
        }
    }

    /// Whether the target registers start in a random basis state.
    pub fn uninitialized(self) -> bool {
        matches!(self, Variant::Uninit | Variant::TrinaryUninit)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error(
    "unknown variant `{0}` (expected one of standard, uninit, trinary_uninit, coset, short_factor)"
)]
pub struct UnknownVariant(pub String);

impl FromStr for Variant {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "standard" | "baseline" => Ok(Variant::Standard),
            "uninit" => Ok(Variant::Uninit),
            "trinary_uninit" | "trinary" => Ok(Variant::TrinaryUninit),
            "coset" => Ok(Variant::Coset),
            "short_factor" | "short" => Ok(Variant::ShortFactor),
            _ => Err(UnknownVariant(s.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
            assert_eq!(
                serde_json::to_string(&v).unwrap(),
                format!("\"{}\"", v.name())
            );
        }
        assert_eq!("baseline".parse::<Variant>().unwrap(), Variant::Standard);
        assert!("quaternary".parse::<Variant>().is_err());
    }
}
