use std::fmt;

use super::value::mask;

/// The operator catalogue. Grammars refer to these by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    BvNot,
    BvAnd,
    BvOr,
    BvXor,
    BvAdd,
    BvSub,
    BvShl,
    BvLshr,
    BvAshr,
    Shl1,
    Shr1,
    Shr4,
    Shr16,
    /// `if0(c, t, e)`: `t` when `c == 1`, otherwise `e`.
    If0,
}

impl Op {
    pub const ALL: [Op; 14] = [
        Op::BvNot,
        Op::BvAnd,
        Op::BvOr,
        Op::BvXor,
        Op::BvAdd,
        Op::BvSub,
        Op::BvShl,
        Op::BvLshr,
        Op::BvAshr,
        Op::Shl1,
        Op::Shr1,
        Op::Shr4,
        Op::Shr16,
        Op::If0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Op::BvNot => "bvnot",
            Op::BvAnd => "bvand",
            Op::BvOr => "bvor",
            Op::BvXor => "bvxor",
            Op::BvAdd => "bvadd",
            Op::BvSub => "bvsub",
            Op::BvShl => "bvshl",
            Op::BvLshr => "bvlshr",
            Op::BvAshr => "bvashr",
            Op::Shl1 => "shl1",
            Op::Shr1 => "shr1",
            Op::Shr4 => "shr4",
            Op::Shr16 => "shr16",
            Op::If0 => "if0",
        }
    }

    pub fn from_name(name: &str) -> Option<Op> {
        Op::ALL.iter().copied().find(|op| op.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Op::BvNot | Op::Shl1 | Op::Shr1 | Op::Shr4 | Op::Shr16 => 1,
            Op::If0 => 3,
            _ => 2,
        }
    }

    /// Applies the operator to raw bits of the given width.
    ///
    /// `args` must hold exactly `arity()` values, each already reduced to `width`.
    /// The result is reduced to `width` as well.
    #[inline]
    pub fn apply(self, width: u32, args: &[u64]) -> u64 {
        let m = mask(width);
        let w = u64::from(width);
        match self {
            Op::BvNot => !args[0] & m,
            Op::BvAnd => args[0] & args[1],
            Op::BvOr => args[0] | args[1],
            Op::BvXor => args[0] ^ args[1],
            Op::BvAdd => args[0].wrapping_add(args[1]) & m,
            Op::BvSub => args[0].wrapping_sub(args[1]) & m,
            Op::BvShl => {
                if args[1] >= w {
                    0
                } else {
                    (args[0] << args[1]) & m
                }
            }
            Op::BvLshr => {
                if args[1] >= w {
                    0
                } else {
                    args[0] >> args[1]
                }
            }
            Op::BvAshr => {
                let negative = (args[0] >> (width - 1)) & 1 == 1;
                if args[1] >= w {
                    if negative {
                        m
                    } else {
                        0
                    }
                } else {
                    let shifted = args[0] >> args[1];
                    if negative {
                        shifted | (m & !(m >> args[1]))
                    } else {
                        shifted
                    }
                }
            }
            Op::Shl1 => (args[0] << 1) & m,
            Op::Shr1 => args[0] >> 1,
            Op::Shr4 => args[0] >> 4,
            Op::Shr16 => args[0] >> 16,
            Op::If0 => {
                if args[0] == 1 {
                    args[1]
                } else {
                    args[2]
                }
            }
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
