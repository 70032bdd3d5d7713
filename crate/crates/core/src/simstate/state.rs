use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use rustc_hash::FxHashMap;
use serde::Serialize;

use super::{
    cis_turns, Control, Dit, DitMatrix, RegId, RegisterLayout, SimError, C64, NORM_TOL, PRUNE_EPS,
};

const MAX_PERM_REGS: usize = 8;

/// Outcome of measuring one dit, with the full pre-measurement distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub register: String,
    pub position: usize,
    pub outcome: u32,
    pub probabilities: Vec<f64>,
}

#[derive(Clone, Copy)]
struct CompiledControl {
    unit: u64,
    radix: u64,
    mask: u32,
}

impl CompiledControl {
    #[inline]
    fn active(&self, label: u64) -> bool {
        let d = (label / self.unit) % self.radix;
        self.mask & (1 << d) != 0
    }
}

/// A normalized superposition over the basis labels of a layout.
///
/// Amplitudes live in an `FxHashMap`, whose iteration order depends only on
/// the insertion history, so identical operation sequences give bit-identical
/// results.
#[derive(Debug, Clone)]
pub struct SparseState {
    layout: Arc<RegisterLayout>,
    amps: FxHashMap<u64, C64>,
}

impl SparseState {
    pub fn new_basis_state(
        layout: impl Into<Arc<RegisterLayout>>,
        values: &[u64],
    ) -> Result<Self, SimError> {
        let layout = layout.into();
        let label = layout.pack(values)?;
        let mut amps = FxHashMap::default();
        amps.insert(label, C64::new(1.0, 0.0));
        Ok(Self { layout, amps })
    }

    /// Builds a state from explicit terms and normalizes it. Repeated labels
    /// add up.
    pub fn from_terms<I>(layout: impl Into<Arc<RegisterLayout>>, terms: I) -> Result<Self, SimError>
    where
        I: IntoIterator<Item = (Vec<u64>, C64)>,
    {
        let layout = layout.into();
        let mut amps: FxHashMap<u64, C64> = FxHashMap::default();
        for (values, amp) in terms {
            *amps.entry(layout.pack(&values)?).or_default() += amp;
        }
        let mut state = Self { layout, amps };
        state.prune();
        let norm = state.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(SimError::ZeroNorm);
        }
        for a in state.amps.values_mut() {
            *a /= norm;
        }
        Ok(state)
    }

    /// Unnormalized state, for probing permutations.
    pub(crate) fn from_raw(layout: Arc<RegisterLayout>, amps: FxHashMap<u64, C64>) -> Self {
        Self { layout, amps }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn shared_layout(&self) -> Arc<RegisterLayout> {
        Arc::clone(&self.layout)
    }

    pub fn reg(&self, name: &str) -> Result<RegId, SimError> {
        self.layout.id(name)
    }

    /// Number of stored amplitudes.
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, C64)> + '_ {
        self.amps.iter().map(|(&l, &a)| (l, a))
    }

    /// Amplitude of the basis state with the given register values.
    pub fn amplitude(&self, values: &[u64]) -> C64 {
        self.layout
            .pack(values)
            .ok()
            .and_then(|l| self.amps.get(&l).copied())
            .unwrap_or_default()
    }

    /// Values of one register over the support, in no particular order.
    pub fn register_values(&self, id: RegId) -> impl Iterator<Item = u64> + '_ {
        self.amps.keys().map(move |&l| self.layout.value(l, id))
    }

    pub fn min_value(&self, id: RegId) -> Option<u64> {
        self.register_values(id).min()
    }

    pub fn max_value(&self, id: RegId) -> Option<u64> {
        self.register_values(id).max()
    }

    /// True when the register holds 0 on every label of the support.
    pub fn is_zero(&self, id: RegId) -> bool {
        self.register_values(id).all(|v| v == 0)
    }

    pub fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm() >= PRUNE_EPS);
    }

    fn compile(&self, ctrls: &[Control]) -> Result<Vec<CompiledControl>, SimError> {
        ctrls
            .iter()
            .map(|c| {
                self.layout.check_dit(c.dit)?;
                Ok(CompiledControl {
                    unit: self.layout.dit_unit(c.dit),
                    radix: self.layout.dit_radix(c.dit) as u64,
                    mask: c.mask,
                })
            })
            .collect()
    }

    fn check_regs(&self, regs: &[RegId]) -> Result<(), SimError> {
        if regs.len() > MAX_PERM_REGS {
            return Err(SimError::ArityMismatch {
                expected: MAX_PERM_REGS,
                got: regs.len(),
            });
        }
        for (i, r) in regs.iter().enumerate() {
            if r.0 >= self.layout.len() {
                return Err(SimError::InvalidRegister(format!("#{}", r.0)));
            }
            if regs[..i].contains(r) {
                return Err(SimError::DuplicateRegister(
                    self.layout.register(*r).name().to_string(),
                ));
            }
        }
        Ok(())
    }

    /// Moves the amplitude of every label `L` to `f(L)`, where `f` rewrites
    /// the values of `regs` in place. Fails without touching the state if
    /// `f` leaves a register's range or sends two support labels to the same
    /// label.
    pub fn apply_permutation<F>(&mut self, regs: &[RegId], f: F) -> Result<(), SimError>
    where
        F: FnMut(&mut [u64]),
    {
        self.apply_controlled_permutation(&[], regs, f)
    }

    /// [`apply_permutation`](Self::apply_permutation) restricted to labels
    /// where every control is active; other labels stay put.
    pub fn apply_controlled_permutation<F>(
        &mut self,
        ctrls: &[Control],
        regs: &[RegId],
        mut f: F,
    ) -> Result<(), SimError>
    where
        F: FnMut(&mut [u64]),
    {
        self.check_regs(regs)?;
        let ctrls = self.compile(ctrls)?;
        let layout = &*self.layout;
        let mut buf = [0u64; MAX_PERM_REGS];
        let vals = &mut buf[..regs.len()];
        let mut out: FxHashMap<u64, C64> =
            FxHashMap::with_capacity_and_hasher(self.amps.len(), Default::default());
        for (&label, &amp) in &self.amps {
            let mut new_label = label;
            if ctrls.iter().all(|c| c.active(label)) {
                for (v, &r) in vals.iter_mut().zip(regs) {
                    *v = layout.value(label, r);
                }
                f(vals);
                for (&v, &r) in vals.iter().zip(regs) {
                    let reg = layout.register(r);
                    if v >= reg.size() {
                        return Err(SimError::ValueOutOfRange {
                            register: reg.name().to_string(),
                            value: v,
                            size: reg.size(),
                        });
                    }
                    new_label = layout.set_value(new_label, r, v);
                }
            }
            if out.insert(new_label, amp).is_some() {
                return Err(SimError::NotInjective { label: new_label });
            }
        }
        self.amps = out;
        Ok(())
    }

    /// Multiplies every amplitude by `exp(2 pi i f(values))` where `f` sees
    /// the values of `regs`; restricted to labels with active controls.
    pub fn apply_phase<F>(
        &mut self,
        ctrls: &[Control],
        regs: &[RegId],
        mut f: F,
    ) -> Result<(), SimError>
    where
        F: FnMut(&[u64]) -> f64,
    {
        self.check_regs(regs)?;
        let ctrls = self.compile(ctrls)?;
        let layout = &*self.layout;
        let mut buf = [0u64; MAX_PERM_REGS];
        let vals = &mut buf[..regs.len()];
        for (&label, amp) in self.amps.iter_mut() {
            if !ctrls.iter().all(|c| c.active(label)) {
                continue;
            }
            for (v, &r) in vals.iter_mut().zip(regs) {
                *v = layout.value(label, r);
            }
            *amp *= cis_turns(f(vals));
        }
        Ok(())
    }

    /// Applies a unitary to a single dit.
    pub fn apply_single_dit(&mut self, dit: Dit, u: &DitMatrix) -> Result<(), SimError> {
        self.layout.check_dit(dit)?;
        let radix = self.layout.dit_radix(dit) as usize;
        if u.dim() != radix {
            return Err(SimError::DimensionMismatch {
                expected: radix,
                got: u.dim(),
            });
        }
        let deviation = u.unitarity_deviation();
        if deviation > NORM_TOL {
            return Err(SimError::NotUnitary { deviation });
        }
        let unit = self.layout.dit_unit(dit);
        // gather amplitudes into groups sharing every digit but this one
        let mut index: FxHashMap<u64, usize> = FxHashMap::default();
        let mut groups: Vec<u64> = Vec::new();
        let mut vecs: Vec<C64> = Vec::new();
        for (&label, &amp) in &self.amps {
            let d = ((label / unit) % radix as u64) as usize;
            let base = label - d as u64 * unit;
            let g = *index.entry(base).or_insert_with(|| {
                groups.push(base);
                vecs.extend(std::iter::repeat_n(C64::default(), radix));
                groups.len() - 1
            });
            vecs[g * radix + d] = amp;
        }
        let mut out: FxHashMap<u64, C64> =
            FxHashMap::with_capacity_and_hasher(self.amps.len(), Default::default());
        for (g, &base) in groups.iter().enumerate() {
            let v = &vecs[g * radix..(g + 1) * radix];
            for row in 0..radix {
                let mut acc = C64::default();
                for (col, &a) in v.iter().enumerate() {
                    if a != C64::default() {
                        acc += u.get(row, col) * a;
                    }
                }
                if acc.norm() >= PRUNE_EPS {
                    out.insert(base + row as u64 * unit, acc);
                }
            }
        }
        self.amps = out;
        Ok(())
    }

    /// Diagonal phase `exp(2 pi i c t theta)` where `c`, `t` are the control
    /// and target digits.
    pub fn controlled_phase(
        &mut self,
        control: Dit,
        target: Dit,
        theta: f64,
    ) -> Result<(), SimError> {
        self.layout.check_dit(control)?;
        self.layout.check_dit(target)?;
        if theta == 0.0 {
            return Ok(());
        }
        let layout = &*self.layout;
        for (&label, amp) in self.amps.iter_mut() {
            let c = layout.digit(label, control) as f64;
            let t = layout.digit(label, target) as f64;
            if c != 0.0 && t != 0.0 {
                *amp *= cis_turns(c * t * theta);
            }
        }
        Ok(())
    }

    /// Puts a register holding `|0>` into `x_max^(-1/2) sum_{x < x_max} |x>`.
    pub fn prepare_uniform(&mut self, id: RegId, x_max: u64) -> Result<(), SimError> {
        let reg = self.layout.register(id);
        if x_max == 0 || x_max > reg.size() {
            return Err(SimError::TooLarge {
                x_max,
                size: reg.size(),
            });
        }
        if !self.is_zero(id) {
            return Err(SimError::NotZeroed(reg.name().to_string()));
        }
        let stride = self.layout.stride(id);
        let scale = 1.0 / (x_max as f64).sqrt();
        let mut out: FxHashMap<u64, C64> = FxHashMap::with_capacity_and_hasher(
            self.amps.len() * x_max as usize,
            Default::default(),
        );
        for (&label, &amp) in &self.amps {
            for x in 0..x_max {
                out.insert(label + x * stride, amp * scale);
            }
        }
        self.amps = out;
        Ok(())
    }

    /// Inverse of [`prepare_uniform`](Self::prepare_uniform): applies the
    /// inverse DFT of order `x_max` on the subspace `{0..x_max}` of the
    /// register. The uniform superposition maps back to `|0>`; anything else
    /// leaves weight on nonzero values.
    pub fn unprepare_uniform(&mut self, id: RegId, x_max: u64) -> Result<(), SimError> {
        let reg = self.layout.register(id);
        if x_max == 0 || x_max > reg.size() {
            return Err(SimError::TooLarge {
                x_max,
                size: reg.size(),
            });
        }
        let stride = self.layout.stride(id);
        let dim = x_max as usize;
        let mut index: FxHashMap<u64, usize> = FxHashMap::default();
        let mut groups: Vec<u64> = Vec::new();
        let mut vecs: Vec<C64> = Vec::new();
        let mut out: FxHashMap<u64, C64> = FxHashMap::default();
        for (&label, &amp) in &self.amps {
            let v = self.layout.value(label, id);
            if v >= x_max {
                out.insert(label, amp);
                continue;
            }
            let base = label - v * stride;
            let g = *index.entry(base).or_insert_with(|| {
                groups.push(base);
                vecs.extend(std::iter::repeat_n(C64::default(), dim));
                groups.len() - 1
            });
            vecs[g * dim + v as usize] = amp;
        }
        let roots: Vec<C64> = (0..dim)
            .map(|k| cis_turns(-(k as f64) / dim as f64))
            .collect();
        let scale = 1.0 / (dim as f64).sqrt();
        for (g, &base) in groups.iter().enumerate() {
            let v = &vecs[g * dim..(g + 1) * dim];
            for y in 0..dim {
                let mut acc = C64::default();
                for (x, &a) in v.iter().enumerate() {
                    if a != C64::default() {
                        acc += roots[(x * y) % dim] * a;
                    }
                }
                acc *= scale;
                if acc.norm() >= PRUNE_EPS {
                    out.insert(base + y as u64 * stride, acc);
                }
            }
        }
        self.amps = out;
        Ok(())
    }

    /// Probability of each digit value of one dit.
    pub fn dit_distribution(&self, dit: Dit) -> Result<Vec<f64>, SimError> {
        self.layout.check_dit(dit)?;
        let radix = self.layout.dit_radix(dit) as usize;
        let mut probs = vec![0.0; radix];
        for (&label, amp) in &self.amps {
            probs[self.layout.digit(label, dit) as usize] += amp.norm_sqr();
        }
        Ok(probs)
    }

    /// Measures one dit in the computational basis and collapses the state.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        dit: Dit,
        rng: &mut R,
    ) -> Result<MeasurementRecord, SimError> {
        let mut probabilities = self.dit_distribution(dit)?;
        let total: f64 = probabilities.iter().sum();
        if total == 0.0 {
            return Err(SimError::ZeroNorm);
        }
        for p in &mut probabilities {
            *p /= total;
        }
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut outcome = probabilities.len() - 1;
        for (d, &p) in probabilities.iter().enumerate() {
            acc += p;
            if u < acc && p > 0.0 {
                outcome = d;
                break;
            }
        }
        // guard against u landing in rounding slack past the last nonzero bin
        while probabilities[outcome] == 0.0 {
            outcome -= 1;
        }
        let layout = &*self.layout;
        self.amps
            .retain(|&label, _| layout.digit(label, dit) as usize == outcome);
        let norm = (probabilities[outcome] * total).sqrt();
        for a in self.amps.values_mut() {
            *a /= norm;
        }
        Ok(MeasurementRecord {
            register: layout.register(dit.reg).name().to_string(),
            position: dit.pos,
            outcome: outcome as u32,
            probabilities,
        })
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &SparseState) -> Result<C64, SimError> {
        if !Arc::ptr_eq(&self.layout, &other.layout) && *self.layout != *other.layout {
            return Err(SimError::LayoutMismatch);
        }
        let (small, large, flip) = if self.amps.len() <= other.amps.len() {
            (&self.amps, &other.amps, false)
        } else {
            (&other.amps, &self.amps, true)
        };
        let mut acc = C64::default();
        for (label, &a) in small {
            if let Some(&b) = large.get(label) {
                acc += if flip { b.conj() * a } else { a.conj() * b };
            }
        }
        Ok(acc)
    }

    /// Text dump, one line `v1,v2,...: re,im` per label, sorted by register
    /// values.
    pub fn dump(&self) -> String {
        let mut rows: Vec<(Vec<u64>, C64)> = self
            .amps
            .iter()
            .map(|(&l, &a)| (self.layout.values(l), a))
            .collect();
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        let mut s = String::new();
        for (vals, amp) in rows {
            let labels: Vec<String> = vals.iter().map(u64::to_string).collect();
            writeln!(s, "{}: {},{}", labels.join(","), amp.re, amp.im).unwrap();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::super::Register;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn qubits(name: &str, w: usize) -> Register {
        Register::qubits(name, w).unwrap()
    }

    fn approx(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-10
    }

    #[test]
    fn basis_states() {
        let layout =
            RegisterLayout::new(vec![qubits("a", 3), Register::uniform("t", 3, 2).unwrap()])
                .unwrap();
        let s = SparseState::new_basis_state(layout.clone(), &[0, 0]).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        let s = SparseState::new_basis_state(layout.clone(), &[0, 5]).unwrap();
        let t = s.reg("t").unwrap();
        let (label, _) = s.iter().next().unwrap();
        assert_eq!(s.layout().digit(label, Dit::new(t, 0)), 2);
        assert_eq!(s.layout().digit(label, Dit::new(t, 1)), 1);
        assert!(matches!(
            SparseState::new_basis_state(layout, &[8, 0]),
            Err(SimError::ValueOutOfRange { .. })
        ));
    }

    #[test]
    fn permutation_examples() {
        let layout = RegisterLayout::new(vec![qubits("x", 4)]).unwrap();
        let mut s = SparseState::new_basis_state(layout, &[7]).unwrap();
        let x = s.reg("x").unwrap();
        let before = s.dump();
        s.apply_permutation(&[x], |_| {}).unwrap();
        assert_eq!(s.dump(), before);
        s.apply_permutation(&[x], |v| v[0] = (v[0] + 1) % 16)
            .unwrap();
        assert_eq!(s.amplitude(&[8]), C64::new(1.0, 0.0));

        s.apply_single_dit(Dit::new(x, 0), &DitMatrix::hadamard())
            .unwrap();
        let snapshot = s.dump();
        let err = s.apply_permutation(&[x], |v| v[0] = 0);
        assert!(matches!(err, Err(SimError::NotInjective { .. })));
        assert_eq!(
            s.dump(),
            snapshot,
            "failed permutation must leave the state untouched"
        );
        assert!(matches!(
            s.apply_permutation(&[x], |v| v[0] += 16),
            Err(SimError::ValueOutOfRange { .. })
        ));
    }

    #[test]
    fn controlled_permutation_only_touches_active_labels() {
        let layout = RegisterLayout::new(vec![qubits("c", 1), qubits("x", 3)]).unwrap();
        let mut s = SparseState::new_basis_state(layout, &[0, 2]).unwrap();
        let c = s.reg("c").unwrap();
        let x = s.reg("x").unwrap();
        s.apply_single_dit(Dit::new(c, 0), &DitMatrix::hadamard())
            .unwrap();
        s.apply_controlled_permutation(&[Control::on(Dit::new(c, 0))], &[x], |v| {
            v[0] = (v[0] + 3) % 8
        })
        .unwrap();
        assert!(approx(s.amplitude(&[0, 2]), C64::new(FRAC_1_SQRT_2, 0.0)));
        assert!(approx(s.amplitude(&[1, 5]), C64::new(FRAC_1_SQRT_2, 0.0)));
    }

    #[test]
    fn single_dit_examples() {
        let layout =
            RegisterLayout::new(vec![qubits("q", 1), Register::uniform("t", 3, 1).unwrap()])
                .unwrap();
        let mut s = SparseState::new_basis_state(layout, &[0, 1]).unwrap();
        let q = Dit::new(s.reg("q").unwrap(), 0);
        let t = Dit::new(s.reg("t").unwrap(), 0);
        let before = s.dump();
        s.apply_single_dit(q, &DitMatrix::identity(2)).unwrap();
        assert_eq!(s.dump(), before);

        s.apply_single_dit(q, &DitMatrix::hadamard()).unwrap();
        assert!(approx(s.amplitude(&[0, 1]), C64::new(FRAC_1_SQRT_2, 0.0)));
        assert!(approx(s.amplitude(&[1, 1]), C64::new(FRAC_1_SQRT_2, 0.0)));

        s.apply_single_dit(t, &DitMatrix::dft(3)).unwrap();
        let w = cis_turns(1.0 / 3.0);
        let r3 = 1.0 / 3f64.sqrt();
        for (k, phase) in [C64::new(1.0, 0.0), w, w * w].into_iter().enumerate() {
            assert!(approx(
                s.amplitude(&[0, k as u64]),
                phase * r3 * FRAC_1_SQRT_2
            ));
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);

        let bad = DitMatrix::from_rows(vec![
            vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            s.apply_single_dit(q, &bad),
            Err(SimError::NotUnitary { .. })
        ));
        assert!(matches!(
            s.apply_single_dit(t, &DitMatrix::hadamard()),
            Err(SimError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn controlled_phase_examples() {
        let layout = RegisterLayout::new(vec![qubits("a", 1), qubits("b", 1)]).unwrap();
        let a = Dit::new(RegId(0), 0);
        let b = Dit::new(RegId(1), 0);
        let mut s = SparseState::new_basis_state(layout.clone(), &[1, 1]).unwrap();
        s.controlled_phase(a, b, 0.0).unwrap();
        assert_eq!(s.amplitude(&[1, 1]), C64::new(1.0, 0.0));
        s.controlled_phase(a, b, 0.25).unwrap();
        assert!(approx(s.amplitude(&[1, 1]), C64::new(0.0, 1.0)));
        for (x, y) in [(0, 0), (0, 1), (1, 0)] {
            let mut s = SparseState::new_basis_state(layout.clone(), &[x, y]).unwrap();
            s.controlled_phase(a, b, 0.3).unwrap();
            assert_eq!(s.amplitude(&[x, y]), C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn uniform_preparation() {
        let layout = Arc::new(RegisterLayout::new(vec![qubits("x", 2)]).unwrap());
        let x = RegId(0);
        let mut s = SparseState::new_basis_state(layout.clone(), &[0]).unwrap();
        s.prepare_uniform(x, 1).unwrap();
        assert_eq!(s.amplitude(&[0]), C64::new(1.0, 0.0));

        let mut s = SparseState::new_basis_state(layout.clone(), &[0]).unwrap();
        s.prepare_uniform(x, 3).unwrap();
        let r3 = 1.0 / 3f64.sqrt();
        for v in 0..3 {
            assert!(approx(s.amplitude(&[v]), C64::new(r3, 0.0)));
        }
        assert_eq!(s.amplitude(&[3]), C64::default());
        assert!(matches!(
            s.prepare_uniform(x, 2),
            Err(SimError::NotZeroed(_))
        ));

        let mut s = SparseState::new_basis_state(layout.clone(), &[0]).unwrap();
        s.prepare_uniform(x, 4).unwrap();
        let mut h = SparseState::new_basis_state(layout.clone(), &[0]).unwrap();
        h.apply_single_dit(Dit::new(x, 0), &DitMatrix::hadamard())
            .unwrap();
        h.apply_single_dit(Dit::new(x, 1), &DitMatrix::hadamard())
            .unwrap();
        assert!((s.overlap(&h).unwrap() - 1.0).norm() < 1e-10);

        let mut s = SparseState::new_basis_state(layout, &[0]).unwrap();
        assert!(matches!(
            s.prepare_uniform(x, 5),
            Err(SimError::TooLarge { .. })
        ));
    }

    #[test]
    fn unprepare_inverts_prepare() {
        let layout = Arc::new(RegisterLayout::new(vec![qubits("x", 3), qubits("y", 2)]).unwrap());
        for x_max in 1..=8 {
            let mut s = SparseState::new_basis_state(layout.clone(), &[0, 3]).unwrap();
            s.prepare_uniform(RegId(0), x_max).unwrap();
            s.unprepare_uniform(RegId(0), x_max).unwrap();
            assert_eq!(s.len(), 1);
            assert!(approx(s.amplitude(&[0, 3]), C64::new(1.0, 0.0)));
        }
    }

    #[test]
    fn measurement_collapses() {
        let layout = Arc::new(RegisterLayout::new(vec![qubits("q", 2)]).unwrap());
        let q = RegId(0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut s = SparseState::new_basis_state(layout.clone(), &[2]).unwrap();
        let rec = s.measure(Dit::new(q, 1), &mut rng).unwrap();
        assert_eq!(rec.outcome, 1);
        assert_eq!(rec.probabilities, vec![0.0, 1.0]);

        let mut ones = 0;
        let trials = 10_000;
        for _ in 0..trials {
            let mut s = SparseState::new_basis_state(layout.clone(), &[0]).unwrap();
            s.apply_single_dit(Dit::new(q, 0), &DitMatrix::hadamard())
                .unwrap();
            let rec = s.measure(Dit::new(q, 0), &mut rng).unwrap();
            assert!((rec.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            ones += rec.outcome as usize;
        }
        // 3 sigma of Binomial(10^4, 1/2) is 150
        assert!((ones as i64 - 5000).abs() < 150, "{ones}");
    }

    #[test]
    fn overlap_examples() {
        let layout = Arc::new(RegisterLayout::new(vec![qubits("x", 3)]).unwrap());
        let mut s = SparseState::new_basis_state(layout.clone(), &[0]).unwrap();
        s.prepare_uniform(RegId(0), 5).unwrap();
        assert!((s.overlap(&s).unwrap() - 1.0).norm() < 1e-10);
        let a = SparseState::new_basis_state(layout.clone(), &[1]).unwrap();
        let b = SparseState::new_basis_state(layout, &[2]).unwrap();
        assert_eq!(a.overlap(&b).unwrap(), C64::default());
        let other = Arc::new(RegisterLayout::new(vec![qubits("y", 3)]).unwrap());
        let c = SparseState::new_basis_state(other, &[1]).unwrap();
        assert!(matches!(a.overlap(&c), Err(SimError::LayoutMismatch)));
    }

    #[test]
    fn shifted_window_overlap_closed_form() {
        // windows {b + xN : x < m} and {b + xN : 1 <= x <= m} share m - 1 terms
        let n = 15u64;
        let layout = Arc::new(RegisterLayout::new(vec![qubits("v", 10)]).unwrap());
        for m in 1..=12u64 {
            let ladder = |shift: u64| {
                SparseState::from_terms(
                    layout.clone(),
                    (0..m).map(|x| (vec![4 + (x + shift) * n], C64::new(1.0, 0.0))),
                )
                .unwrap()
            };
            let ov = ladder(0).overlap(&ladder(1)).unwrap();
            assert!((ov.re - (m - 1) as f64 / m as f64).abs() < 1e-12);
            assert!(ov.im.abs() < 1e-12);
        }
    }

    #[test]
    fn dump_format() {
        let layout = Arc::new(RegisterLayout::new(vec![qubits("a", 1), qubits("b", 2)]).unwrap());
        let mut s = SparseState::new_basis_state(layout, &[0, 2]).unwrap();
        s.apply_single_dit(Dit::new(RegId(0), 0), &DitMatrix::hadamard())
            .unwrap();
        let dump = s.dump();
        let lines: Vec<&str> = dump.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("0,2: 0.707"), "{}", lines[0]);
        assert!(lines[1].starts_with("1,2: 0.707"), "{}", lines[1]);
    }
}
