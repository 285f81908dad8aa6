//! Integer semantics shared by the interpreter and the symbolic encodings.
//!
//! Arithmetic wraps modulo 2^32. Division and remainder truncate toward
//! zero; `i32::MIN / -1` wraps to `i32::MIN` and `i32::MIN % -1` is 0. Shift
//! amounts are taken modulo 32 and `>>` is arithmetic.

use crate::ast::{BinOp, UnOp};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ArithError {
    DivByZero,
}

pub fn truth(b: bool) -> i32 {
    b as i32
}

pub fn eval_unop(op: UnOp, a: i32) -> i32 {
    match op {
        UnOp::Neg => a.wrapping_neg(),
        UnOp::Not => truth(a == 0),
        UnOp::BitNot => !a,
    }
}

/// Strict binary operators; `&&`/`||` are evaluated here on already computed
/// operands (callers short-circuit where it matters).
pub fn eval_binop(op: BinOp, a: i32, b: i32) -> Result<i32, ArithError> {
    use BinOp::*;
    Ok(match op {
        Add => a.wrapping_add(b),
        Sub => a.wrapping_sub(b),
        Mul => a.wrapping_mul(b),
        Div => {
            if b == 0 {
                return Err(ArithError::DivByZero);
            }
            a.wrapping_div(b)
        }
        Rem => {
            if b == 0 {
                return Err(ArithError::DivByZero);
            }
            a.wrapping_rem(b)
        }
        Lt => truth(a < b),
        Le => truth(a <= b),
        Gt => truth(a > b),
        Ge => truth(a >= b),
        Eq => truth(a == b),
        Ne => truth(a != b),
        And => truth(a != 0 && b != 0),
        Or => truth(a != 0 || b != 0),
        BitAnd => a & b,
        BitOr => a | b,
        BitXor => a ^ b,
        Shl => a.wrapping_shl(b as u32 & 31),
        Shr => a.wrapping_shr(b as u32 & 31),
    })
}

pub fn abs(a: i32) -> i32 {
    a.wrapping_abs()
}

/// Reads byte `i` of a string constant; index `len` yields the terminator.
pub fn string_byte(s: &[u8], i: i32) -> Option<i32> {
    if i < 0 || i as usize > s.len() {
        return None;
    }
    Some(s.get(i as usize).map_or(0, |&b| b as i32))
}
