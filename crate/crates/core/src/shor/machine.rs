use std::sync::Arc;

use rand::Rng;

use crate::arith::{
    coset_encode, coset_mod_mul_accumulate, ctrl_mul_trinary, ctrl_swap, maybe_recenter,
    mul_three_step_uninit, mul_two_step, short_mul_pair, short_mul_pair_footprint_bound,
    ControlRep, CosetParams, FootprintMonitor,
};
use crate::modnum::{gcd, invertible_split, MidpointSplit, Modulus};
use crate::simstate::{Control, Dit, RegId, Register, RegisterLayout, SparseState};
use crate::Variant;

use super::{OrderFindConfig, Result};

enum Kind {
    TwoStep {
        a: RegId,
        b: RegId,
        anc: Dit,
    },
    ThreeStep {
        a: RegId,
        b: RegId,
        anc: Dit,
    },
    Trinary {
        a: RegId,
        b: RegId,
        anc: Dit,
    },
    Coset {
        a: RegId,
        b: RegId,
        params: CosetParams,
    },
    Short {
        x: RegId,
        work: Dit,
        splits: Vec<MidpointSplit>,
        strict: bool,
        peak: u32,
    },
}

/// Registers and circuit for one trial of one variant. Register 0 is the
/// control register of `control_width` dits.
pub(super) struct Machine {
    pub state: SparseState,
    pub control: RegId,
    modulus: Modulus,
    multipliers: Vec<u64>,
    kind: Kind,
    pub alpha: Option<u64>,
    pub beta: Option<u64>,
    pub wraps: u64,
}

fn layout(regs: Vec<Register>) -> Result<Arc<RegisterLayout>> {
    Ok(Arc::new(RegisterLayout::new(regs)?))
}

impl Machine {
    pub fn new<R: Rng + ?Sized>(
        config: &OrderFindConfig,
        control_width: usize,
        rng: &mut R,
    ) -> Result<Self> {
        config.validate()?;
        let ctx = &config.ctx;
        let modulus = ctx.modulus();
        let n = modulus.bits() as usize;
        let big_n = modulus.value();
        let multipliers: Vec<u64> = (0..config.digit_count)
            .map(|k| ctx.digit_multiplier(config.radix, k))
            .collect();
        let control_reg = Register::uniform("ctl", config.radix, control_width)?;
        let control = RegId(0);
        let (a, b) = (RegId(1), RegId(2));
        let anc = Dit::new(RegId(3), 0);
        let mut alpha = None;
        let mut beta = None;
        let (state, kind) = match config.variant {
            Variant::Standard | Variant::Uninit | Variant::TrinaryUninit => {
                let lay = layout(vec![
                    control_reg,
                    Register::qubits("a", n)?,
                    Register::qubits("b", n)?,
                    Register::qubits("anc", 1)?,
                ])?;
                let (va, vb) = if config.variant == Variant::Standard {
                    (1, 0)
                } else {
                    let va = rng.gen_range(0..big_n);
                    let vb = rng.gen_range(0..big_n);
                    alpha = Some(va);
                    beta = Some(vb);
                    (va, vb)
                };
                let state = SparseState::new_basis_state(lay, &[0, va, vb, 0])?;
                let kind = match config.variant {
                    Variant::Standard => Kind::TwoStep { a, b, anc },
                    Variant::Uninit => Kind::ThreeStep { a, b, anc },
                    _ => Kind::Trinary { a, b, anc },
                };
                (state, kind)
            }
            Variant::Coset => {
                let params = config.coset;
                let w = params.value_width(modulus.bits());
                let lay = layout(vec![
                    control_reg,
                    Register::qubits("a", w)?,
                    Register::qubits("b", w)?,
                    Register::qubits("work", params.work_width())?,
                ])?;
                let work = RegId(3);
                let mut state = SparseState::new_basis_state(lay, &[0, 1, 0, 0])?;
                coset_encode(&mut state, a, work, modulus, &params)?;
                coset_encode(&mut state, b, work, modulus, &params)?;
                (state, Kind::Coset { a, b, params })
            }
            Variant::ShortFactor => {
                let splits = multipliers
                    .iter()
                    .map(|&m| invertible_split(m, big_n))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                let n_prime = splits.iter().map(|s| s.n_prime).max().unwrap_or(1);
                let lay = layout(vec![
                    control_reg,
                    Register::qubits("x", n + n_prime as usize)?,
                    Register::qubits("work", 1)?,
                ])?;
                let state = SparseState::new_basis_state(lay, &[0, 1, 0])?;
                let kind = Kind::Short {
                    x: a,
                    work: Dit::new(b, 0),
                    splits,
                    strict: config.strict_footprint,
                    peak: 0,
                };
                (state, kind)
            }
        };
        Ok(Self {
            state,
            control,
            modulus,
            multipliers,
            kind,
            alpha,
            beta,
            wraps: 0,
        })
    }

    pub fn alpha_gcd(&self) -> Option<u64> {
        self.alpha.map(|a| gcd(a, self.modulus.value()))
    }

    pub fn beta_gcd(&self) -> Option<u64> {
        self.beta.map(|b| gcd(b, self.modulus.value()))
    }

    pub fn peak_footprint(&self) -> Option<u32> {
        match &self.kind {
            Kind::Short {
                strict: true, peak, ..
            } => Some(*peak),
            _ => None,
        }
    }

    /// Multiplication by the multiplier of exponent digit `k`, controlled by
    /// `control`.
    pub fn controlled_multiply(&mut self, k: usize, control: Dit) -> Result<()> {
        let m = self.multipliers[k];
        let modulus = self.modulus;
        let on = [Control::on(control)];
        let state = &mut self.state;
        match &mut self.kind {
            Kind::TwoStep { a, b, anc } => mul_two_step(state, &on, *a, *b, m, modulus, *anc)?,
            Kind::ThreeStep { a, b, anc } => {
                mul_three_step_uninit(state, &on, *a, *b, m, modulus, *anc)?
            }
            Kind::Trinary { a, b, anc } => {
                ctrl_mul_trinary(state, &[], control, *a, *b, m, modulus, *anc)?
            }
            Kind::Coset { a, b, params } => {
                let n = modulus.value();
                let m_inv = modulus.inv(m)?;
                self.wraps +=
                    coset_mod_mul_accumulate(state, &on, *a, *b, m, modulus, ControlRep::Coset)?
                        as u64;
                maybe_recenter(state, *b, modulus, params)?;
                self.wraps += coset_mod_mul_accumulate(
                    state,
                    &on,
                    *b,
                    *a,
                    n - m_inv,
                    modulus,
                    ControlRep::Coset,
                )? as u64;
                maybe_recenter(state, *a, modulus, params)?;
                ctrl_swap(state, &on, *a, *b)?;
            }
            Kind::Short {
                x,
                work,
                splits,
                strict,
                peak,
            } => {
                let split = splits[k];
                if *strict {
                    let mut monitor =
                        FootprintMonitor::new(short_mul_pair_footprint_bound(modulus, &split));
                    short_mul_pair(state, &on, *x, *work, &split, modulus, Some(&mut monitor))?;
                    *peak = (*peak).max(monitor.peak());
                } else {
                    short_mul_pair(state, &on, *x, *work, &split, modulus, None)?;
                }
            }
        }
        Ok(())
    }
}
