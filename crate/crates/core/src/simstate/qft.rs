use super::{Dit, DitMatrix, RegId, SimError, SparseState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

impl SparseState {
    /// Quantum Fourier transform of order `Q = p^w` on a uniform-radix
    /// register:
    ///
    /// `|b> -> Q^(-1/2) sum_x exp(2 pi i b x / Q) |x>`
    ///
    /// built from one DFT of order `p` per dit, controlled phase rotations and
    /// a final dit reversal. [`Direction::Inverse`] applies the adjoint.
    pub fn qft(&mut self, id: RegId, direction: Direction) -> Result<(), SimError> {
        if id.0 >= self.layout().len() {
            return Err(SimError::InvalidRegister(format!("#{}", id.0)));
        }
        let reg = self.layout().register(id).clone();
        let p = reg
            .uniform_radix()
            .ok_or_else(|| SimError::MixedRadix(reg.name().to_string()))?;
        let w = reg.width();
        let pf = p as f64;
        let dft = DitMatrix::dft(p as usize);
        let dit = |pos| Dit::new(id, pos);
        let reverse = |v: &mut [u64]| {
            let mut out = 0u64;
            let mut x = v[0];
            for _ in 0..w {
                out = out * p as u64 + x % p as u64;
                x /= p as u64;
            }
            v[0] = out;
        };
        match direction {
            Direction::Forward => {
                for j in (0..w).rev() {
                    self.apply_single_dit(dit(j), &dft)?;
                    for m in 0..j {
                        let theta = pf.powi(-((j - m + 1) as i32));
                        self.controlled_phase(dit(m), dit(j), theta)?;
                    }
                }
                self.apply_permutation(&[id], reverse)?;
            }
            Direction::Inverse => {
                let dft_inv = dft.adjoint();
                self.apply_permutation(&[id], reverse)?;
                for j in 0..w {
                    for m in (0..j).rev() {
                        let theta = pf.powi(-((j - m + 1) as i32));
                        self.controlled_phase(dit(m), dit(j), -theta)?;
                    }
                    self.apply_single_dit(dit(j), &dft_inv)?;
                }
            }
        }
        Ok(())
    }
}
