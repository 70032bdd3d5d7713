use std::fmt;

use super::SimError;

/// One named register: an ordered list of dits, least significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    name: String,
    radices: Vec<u32>,
    // place value of each dit inside the register value
    places: Vec<u64>,
    size: u64,
}

impl Register {
    pub fn uniform(name: impl Into<String>, radix: u32, width: usize) -> Result<Self, SimError> {
        Self::mixed(name, vec![radix; width])
    }

    pub fn qubits(name: impl Into<String>, width: usize) -> Result<Self, SimError> {
        Self::uniform(name, 2, width)
    }

    pub fn mixed(name: impl Into<String>, radices: Vec<u32>) -> Result<Self, SimError> {
        let name = name.into();
        if radices.is_empty() || radices.iter().any(|&p| p < 2) {
            return Err(SimError::InvalidRegister(name));
        }
        let mut places = Vec::with_capacity(radices.len());
        let mut size: u64 = 1;
        for &p in &radices {
            places.push(size);
            size = size
                .checked_mul(p as u64)
                .filter(|&s| s < 1 << 62)
                .ok_or(SimError::LabelSpaceTooLarge)?;
        }
        Ok(Self {
            name,
            radices,
            places,
            size,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn width(&self) -> usize {
        self.radices.len()
    }

    pub fn radix(&self, pos: usize) -> u32 {
        self.radices[pos]
    }

    pub fn radices(&self) -> &[u32] {
        &self.radices
    }

    /// Number of distinct values, `prod p_i`.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn place(&self, pos: usize) -> u64 {
        self.places[pos]
    }

    /// The common radix, if every dit has the same one.
    pub fn uniform_radix(&self) -> Option<u32> {
        let p = self.radices[0];
        self.radices.iter().all(|&q| q == p).then_some(p)
    }

    pub fn digit(&self, value: u64, pos: usize) -> u32 {
        ((value / self.places[pos]) % self.radices[pos] as u64) as u32
    }

    pub fn with_digit(&self, value: u64, pos: usize, digit: u32) -> u64 {
        let old = self.digit(value, pos) as u64;
        value - old * self.places[pos] + digit as u64 * self.places[pos]
    }
}

/// Index of a register inside a [`RegisterLayout`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegId(pub(crate) usize);

impl RegId {
    /// Id of the register at position `index`; checked on use.
    pub const fn new(index: usize) -> Self {
        Self(index)
    }

    pub fn index(self) -> usize {
        self.0
    }
}

/// A single dit: register plus position inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dit {
    pub reg: RegId,
    pub pos: usize,
}

impl Dit {
    pub fn new(reg: RegId, pos: usize) -> Self {
        Self { reg, pos }
    }
}

/// Ordered registers. A basis label is the tuple of register values, packed
/// into one `u64` as a mixed-radix number with register 0 least significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    strides: Vec<u64>,
    total: u64,
}

impl RegisterLayout {
    pub fn new(registers: Vec<Register>) -> Result<Self, SimError> {
        if registers.is_empty() {
            return Err(SimError::InvalidRegister("<empty layout>".into()));
        }
        for (i, r) in registers.iter().enumerate() {
            if registers[..i].iter().any(|o| o.name == r.name) {
                return Err(SimError::DuplicateRegister(r.name.clone()));
            }
        }
        let mut strides = Vec::with_capacity(registers.len());
        let mut total: u64 = 1;
        for r in &registers {
            strides.push(total);
            total = total
                .checked_mul(r.size)
                .filter(|&t| t < 1 << 63)
                .ok_or(SimError::LabelSpaceTooLarge)?;
        }
        Ok(Self {
            registers,
            strides,
            total,
        })
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn len(&self) -> usize {
        self.registers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registers.is_empty()
    }

    /// Size of the full basis, `prod p^w` over all registers.
    pub fn total_size(&self) -> u64 {
        self.total
    }

    pub fn id(&self, name: &str) -> Result<RegId, SimError> {
        self.registers
            .iter()
            .position(|r| r.name == name)
            .map(RegId)
            .ok_or_else(|| SimError::UnknownRegister(name.to_string()))
    }

    pub fn register(&self, id: RegId) -> &Register {
        &self.registers[id.0]
    }

    pub(crate) fn stride(&self, id: RegId) -> u64 {
        self.strides[id.0]
    }

    pub fn value(&self, label: u64, id: RegId) -> u64 {
        (label / self.strides[id.0]) % self.registers[id.0].size
    }

    pub fn values(&self, label: u64) -> Vec<u64> {
        (0..self.registers.len())
            .map(|i| self.value(label, RegId(i)))
            .collect()
    }

    pub fn digit(&self, label: u64, dit: Dit) -> u32 {
        self.registers[dit.reg.0].digit(self.value(label, dit.reg), dit.pos)
    }

    /// Replaces the value of one register inside a packed label.
    pub fn set_value(&self, label: u64, id: RegId, value: u64) -> u64 {
        let old = self.value(label, id);
        label - old * self.strides[id.0] + value * self.strides[id.0]
    }

    /// Packs one value per register into a label.
    pub fn pack(&self, values: &[u64]) -> Result<u64, SimError> {
        if values.len() != self.registers.len() {
            return Err(SimError::ArityMismatch {
                expected: self.registers.len(),
                got: values.len(),
            });
        }
        let mut label = 0;
        for ((r, &v), &s) in self.registers.iter().zip(values).zip(&self.strides) {
            if v >= r.size {
                return Err(SimError::ValueOutOfRange {
                    register: r.name.clone(),
                    value: v,
                    size: r.size,
                });
            }
            label += v * s;
        }
        Ok(label)
    }

    /// Stride of one dit inside a packed label.
    pub(crate) fn dit_unit(&self, dit: Dit) -> u64 {
        self.strides[dit.reg.0] * self.registers[dit.reg.0].places[dit.pos]
    }

    pub(crate) fn dit_radix(&self, dit: Dit) -> u32 {
        self.registers[dit.reg.0].radices[dit.pos]
    }

    pub(crate) fn check_dit(&self, dit: Dit) -> Result<(), SimError> {
        match self.registers.get(dit.reg.0) {
            Some(r) if dit.pos < r.width() => Ok(()),
            _ => Err(SimError::InvalidDit {
                reg: dit.reg.0,
                pos: dit.pos,
            }),
        }
    }
}

impl fmt::Display for RegisterLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.registers.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match r.uniform_radix() {
                Some(p) => write!(f, "{}[{}x{}]", r.name, r.width(), p)?,
                None => write!(f, "{}{:?}", r.name, r.radices)?,
            }
        }
        Ok(())
    }
}
