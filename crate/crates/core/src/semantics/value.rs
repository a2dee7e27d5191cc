use std::fmt;

/// Largest supported bit width.
pub const MAX_WIDTH: u32 = 64;

/// Bit mask selecting the low `width` bits.
#[inline]
pub fn mask(width: u32) -> u64 {
    debug_assert!((1..=MAX_WIDTH).contains(&width));
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// A fixed-width unsigned bitvector. `bits` is always reduced modulo `2^width`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVecValue {
    width: u32,
    bits: u64,
}

impl BitVecValue {
    /// Builds a value, truncating `bits` to the low `width` bits.
    ///
    /// Panics if `width` is outside `1..=64`.
    pub fn new(width: u32, bits: u64) -> Self {
        assert!(
            (1..=MAX_WIDTH).contains(&width),
            "bitvector width {width} outside 1..=64"
        );
        BitVecValue {
            width,
            bits: bits & mask(width),
        }
    }

    pub fn zero(width: u32) -> Self {
        Self::new(width, 0)
    }

    pub fn one(width: u32) -> Self {
        Self::new(width, 1)
    }

    pub fn width(self) -> u32 {
        self.width
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    /// SMT-LIB literal: `#x` with `width / 4` zero-padded lower-case digits, or `#b`
    /// when the width is not a multiple of four and has no exact `#x` spelling.
    pub fn to_literal(self) -> String {
        if self.width.is_multiple_of(4) {
            format!("#x{:0w$x}", self.bits, w = (self.width / 4) as usize)
        } else {
            format!("#b{:0w$b}", self.bits, w = self.width as usize)
        }
    }

    /// Parses an `#x…` or `#b…` literal. The width is implied by the digit count.
    pub fn parse_literal(text: &str) -> Option<Self> {
        let (radix, digits, per_digit) = match text.strip_prefix("#x") {
            Some(d) => (16, d, 4),
            None => (2, text.strip_prefix("#b")?, 1),
        };
        if digits.is_empty() {
            return None;
        }
        let width = digits.len() as u32 * per_digit;
        if width > MAX_WIDTH {
            return None;
        }
        let bits = u64::from_str_radix(digits, radix).ok()?;
        Some(BitVecValue::new(width, bits))
    }
}

impl fmt::Display for BitVecValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}
