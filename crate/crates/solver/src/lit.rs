use std::fmt;
use std::ops::Not;

/// A propositional variable, zero-based internally.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn pos(self) -> Lit {
        Lit(self.0 << 1)
    }

    #[inline]
    pub fn neg(self) -> Lit {
        Lit((self.0 << 1) | 1)
    }

    /// One-based DIMACS index.
    pub fn dimacs(self) -> i32 {
        self.0 as i32 + 1
    }
}

/// A literal: variable plus polarity, packed as `var << 1 | negated`.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(pub u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Self {
        if positive {
            var.pos()
        } else {
            var.neg()
        }
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        !self.is_negated()
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_dimacs(lit: i32) -> Self {
        debug_assert!(lit != 0);
        let var = Var(lit.unsigned_abs() - 1);
        Lit::new(var, lit > 0)
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var().dimacs();
        if self.is_negated() {
            -v
        } else {
            v
        }
    }
}

impl Not for Lit {
    type Output = Lit;
    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}
