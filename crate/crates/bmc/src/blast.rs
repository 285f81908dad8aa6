//! Gate-level CNF builder with constant propagation and structural hashing,
//! plus 32-bit word circuits.
//!
//! Literals are DIMACS integers. Variable 1 is the constant true, so `TRUE`
//! is 1 and `FALSE` is -1; gates fold constants instead of emitting clauses.

use std::collections::HashMap;

pub const TRUE: i32 = 1;
pub const FALSE: i32 = -1;
pub const WIDTH: usize = 32;

pub type Word = [i32; WIDTH];

#[derive(Debug)]
pub struct Blaster {
    num_vars: u32,
    clauses: Vec<Vec<i32>>,
    and_cache: HashMap<(i32, i32), i32>,
    xor_cache: HashMap<(i32, i32), i32>,
    ite_cache: HashMap<(i32, i32, i32), i32>,
}

impl Default for Blaster {
    fn default() -> Self {
        Self::new()
    }
}

pub fn is_const(l: i32) -> bool {
    l == TRUE || l == FALSE
}

pub fn const_bit(b: bool) -> i32 {
    if b {
        TRUE
    } else {
        FALSE
    }
}

pub fn const_word(v: i32) -> Word {
    std::array::from_fn(|i| const_bit((v >> i) & 1 == 1))
}

/// The constant value of a word, if every bit is constant.
pub fn word_value(w: &Word) -> Option<i32> {
    let mut v: u32 = 0;
    for (i, &b) in w.iter().enumerate() {
        match b {
            TRUE => v |= 1 << i,
            FALSE => {}
            _ => return None,
        }
    }
    Some(v as i32)
}

impl Blaster {
    pub fn new() -> Self {
        Blaster {
            num_vars: 1,
            clauses: vec![vec![TRUE]],
            and_cache: HashMap::new(),
            xor_cache: HashMap::new(),
            ite_cache: HashMap::new(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn into_parts(self) -> (u32, Vec<Vec<i32>>) {
        (self.num_vars, self.clauses)
    }

    pub fn fresh(&mut self) -> i32 {
        self.num_vars += 1;
        self.num_vars as i32
    }

    pub fn fresh_word(&mut self) -> Word {
        std::array::from_fn(|_| self.fresh())
    }

    /// Adds a clause, dropping satisfied ones and false literals. A clause
    /// of only false literals is kept as the unit `FALSE`.
    pub fn clause(&mut self, lits: &[i32]) {
        if lits.contains(&TRUE) {
            return;
        }
        let c: Vec<i32> = lits.iter().copied().filter(|&l| l != FALSE).collect();
        self.clauses
            .push(if c.is_empty() { vec![FALSE] } else { c });
    }

    pub fn and(&mut self, a: i32, b: i32) -> i32 {
        if a == FALSE || b == FALSE || a == -b {
            return FALSE;
        }
        if a == TRUE || a == b {
            return b;
        }
        if b == TRUE {
            return a;
        }
        let key = (a.min(b), a.max(b));
        if let Some(&g) = self.and_cache.get(&key) {
            return g;
        }
        let g = self.fresh();
        self.clauses.push(vec![-g, a]);
        self.clauses.push(vec![-g, b]);
        self.clauses.push(vec![g, -a, -b]);
        self.and_cache.insert(key, g);
        g
    }

    pub fn or(&mut self, a: i32, b: i32) -> i32 {
        -self.and(-a, -b)
    }

    pub fn xor(&mut self, a: i32, b: i32) -> i32 {
        if a == FALSE {
            return b;
        }
        if a == TRUE {
            return -b;
        }
        if b == FALSE {
            return a;
        }
        if b == TRUE {
            return -a;
        }
        if a == b {
            return FALSE;
        }
        if a == -b {
            return TRUE;
        }
        let sign = (a < 0) != (b < 0);
        let (x, y) = (a.abs(), b.abs());
        let key = (x.min(y), x.max(y));
        let g = match self.xor_cache.get(&key) {
            Some(&g) => g,
            None => {
                let g = self.fresh();
                self.clauses.push(vec![-g, x, y]);
                self.clauses.push(vec![-g, -x, -y]);
                self.clauses.push(vec![g, -x, y]);
                self.clauses.push(vec![g, x, -y]);
                self.xor_cache.insert(key, g);
                g
            }
        };
        if sign {
            -g
        } else {
            g
        }
    }

    pub fn iff(&mut self, a: i32, b: i32) -> i32 {
        -self.xor(a, b)
    }

    pub fn ite(&mut self, c: i32, t: i32, e: i32) -> i32 {
        if c == TRUE || t == e {
            return t;
        }
        if c == FALSE {
            return e;
        }
        if t == -e {
            return self.iff(c, t);
        }
        if t == TRUE || t == c {
            return self.or(c, e);
        }
        if t == FALSE || t == -c {
            return self.and(-c, e);
        }
        if e == TRUE || e == -c {
            return self.or(-c, t);
        }
        if e == FALSE || e == c {
            return self.and(c, t);
        }
        let key = (c, t, e);
        if let Some(&g) = self.ite_cache.get(&key) {
            return g;
        }
        let g = self.fresh();
        self.clauses.push(vec![-g, -c, t]);
        self.clauses.push(vec![-g, c, e]);
        self.clauses.push(vec![g, -c, -t]);
        self.clauses.push(vec![g, c, -e]);
        // Redundant but helps propagation.
        self.clauses.push(vec![-g, t, e]);
        self.clauses.push(vec![g, -t, -e]);
        self.ite_cache.insert(key, g);
        g
    }

    pub fn and_all(&mut self, lits: &[i32]) -> i32 {
        lits.iter().fold(TRUE, |acc, &l| self.and(acc, l))
    }

    pub fn or_all(&mut self, lits: &[i32]) -> i32 {
        lits.iter().fold(FALSE, |acc, &l| self.or(acc, l))
    }

    /// Sum and carry of a full adder.
    fn full_add(&mut self, a: i32, b: i32, c: i32) -> (i32, i32) {
        let ab = self.xor(a, b);
        let sum = self.xor(ab, c);
        let g = self.and(a, b);
        let p = self.and(ab, c);
        (sum, self.or(g, p))
    }

    fn add_bits(&mut self, a: &[i32], b: &[i32], mut carry: i32) -> (Vec<i32>, i32) {
        let mut out = Vec::with_capacity(a.len());
        for (&x, &y) in a.iter().zip(b) {
            let (s, c) = self.full_add(x, y, carry);
            out.push(s);
            carry = c;
        }
        (out, carry)
    }

    pub fn add(&mut self, a: &Word, b: &Word) -> Word {
        let (s, _) = self.add_bits(a, b, FALSE);
        s.try_into().expect("width")
    }

    pub fn not_word(&mut self, a: &Word) -> Word {
        a.map(|l| -l)
    }

    pub fn sub(&mut self, a: &Word, b: &Word) -> Word {
        let nb = self.not_word(b);
        let (s, _) = self.add_bits(a, &nb, TRUE);
        s.try_into().expect("width")
    }

    pub fn neg(&mut self, a: &Word) -> Word {
        self.sub(&const_word(0), a)
    }

    pub fn mul(&mut self, a: &Word, b: &Word) -> Word {
        // Put the operand with more constant bits second: its zero bits
        // drop whole partial products.
        let consts = |w: &Word| w.iter().filter(|&&l| is_const(l)).count();
        let (a, b) = if consts(a) > consts(b) {
            (b, a)
        } else {
            (a, b)
        };
        let mut acc = const_word(0);
        for i in 0..WIDTH {
            if b[i] == FALSE {
                continue;
            }
            let mut pp = const_word(0);
            for j in 0..WIDTH - i {
                pp[i + j] = self.and(a[j], b[i]);
            }
            acc = self.add(&acc, &pp);
        }
        acc
    }

    pub fn eq(&mut self, a: &Word, b: &Word) -> i32 {
        let bits: Vec<i32> = (0..WIDTH).map(|i| self.iff(a[i], b[i])).collect();
        self.and_all(&bits)
    }

    /// Unsigned `a < b` over equal-length bit slices (LSB first).
    fn ult_bits(&mut self, a: &[i32], b: &[i32]) -> i32 {
        let mut lt = FALSE;
        for (&x, &y) in a.iter().zip(b) {
            // lt' = (!x & y) | (x == y) & lt
            let here = self.and(-x, y);
            let same = self.iff(x, y);
            let keep = self.and(same, lt);
            lt = self.or(here, keep);
        }
        lt
    }

    pub fn slt(&mut self, a: &Word, b: &Word) -> i32 {
        // Flipping the sign bits turns signed order into unsigned order.
        let mut a2 = *a;
        let mut b2 = *b;
        a2[WIDTH - 1] = -a[WIDTH - 1];
        b2[WIDTH - 1] = -b[WIDTH - 1];
        self.ult_bits(&a2, &b2)
    }

    pub fn ite_word(&mut self, c: i32, t: &Word, e: &Word) -> Word {
        std::array::from_fn(|i| self.ite(c, t[i], e[i]))
    }

    pub fn bool_word(&self, l: i32) -> Word {
        let mut w = const_word(0);
        w[0] = l;
        w
    }

    /// Non-zero test.
    pub fn truth(&mut self, a: &Word) -> i32 {
        self.or_all(a)
    }

    pub fn shl(&mut self, a: &Word, amount: &Word) -> Word {
        let mut cur = *a;
        for (k, &bit) in amount.iter().take(5).enumerate() {
            let s = 1 << k;
            let shifted: Word = std::array::from_fn(|i| if i >= s { cur[i - s] } else { FALSE });
            cur = self.ite_word(bit, &shifted, &cur);
        }
        cur
    }

    /// Arithmetic right shift.
    pub fn shr(&mut self, a: &Word, amount: &Word) -> Word {
        let mut cur = *a;
        for (k, &bit) in amount.iter().take(5).enumerate() {
            let s = 1 << k;
            let shifted: Word = std::array::from_fn(|i| {
                if i + s < WIDTH {
                    cur[i + s]
                } else {
                    cur[WIDTH - 1]
                }
            });
            cur = self.ite_word(bit, &shifted, &cur);
        }
        cur
    }

    /// Unsigned restoring division.
    fn udivrem(&mut self, n: &Word, d: &Word) -> (Word, Word) {
        let mut q = const_word(0);
        let mut r: Vec<i32> = vec![FALSE; WIDTH + 1];
        let mut d33: Vec<i32> = d.to_vec();
        d33.push(FALSE);
        let nd: Vec<i32> = d33.iter().map(|&l| -l).collect();
        for i in (0..WIDTH).rev() {
            // r = (r << 1) | n[i]
            r.pop();
            r.insert(0, n[i]);
            let (diff, carry) = self.add_bits(&r, &nd, TRUE);
            // carry out of r + !d + 1 means r >= d
            q[i] = carry;
            r = (0..=WIDTH)
                .map(|j| self.ite(carry, diff[j], r[j]))
                .collect();
        }
        (q, r[..WIDTH].try_into().expect("width"))
    }

    fn abs_word(&mut self, a: &Word) -> Word {
        let n = self.neg(a);
        self.ite_word(a[WIDTH - 1], &n, a)
    }

    /// Signed truncating division and remainder; the result for a zero
    /// divisor is unconstrained garbage (callers check it separately).
    pub fn sdivrem(&mut self, a: &Word, b: &Word) -> (Word, Word) {
        if let Some(d) = word_value(b) {
            if let Some(r) = self.divrem_by_const(a, d) {
                return r;
            }
        }
        let na = self.abs_word(a);
        let nb = self.abs_word(b);
        let (q, r) = self.udivrem(&na, &nb);
        let sign_q = self.xor(a[WIDTH - 1], b[WIDTH - 1]);
        let nq = self.neg(&q);
        let nr = self.neg(&r);
        let q = self.ite_word(sign_q, &nq, &q);
        let r = self.ite_word(a[WIDTH - 1], &nr, &r);
        (q, r)
    }

    /// Cheap circuits for divisors 1, -1 and positive powers of two.
    fn divrem_by_const(&mut self, a: &Word, d: i32) -> Option<(Word, Word)> {
        match d {
            1 => Some((*a, const_word(0))),
            -1 => Some((self.neg(a), const_word(0))),
            d if d > 1 && d.count_ones() == 1 => {
                let k = d.trailing_zeros() as usize;
                // Bias negative dividends by d-1 so the shift truncates toward zero.
                let sign = a[WIDTH - 1];
                let bias: Word = std::array::from_fn(|i| if i < k { sign } else { FALSE });
                let biased = self.add(a, &bias);
                let q: Word = std::array::from_fn(|i| {
                    if i + k < WIDTH {
                        biased[i + k]
                    } else {
                        biased[WIDTH - 1]
                    }
                });
                let back: Word = std::array::from_fn(|i| if i >= k { q[i - k] } else { FALSE });
                let r = self.sub(a, &back);
                Some((q, r))
            }
            _ => None,
        }
    }

    /// Byte `idx` of `bytes`, with index `len` reading 0 and anything out of
    /// range reading 0.
    pub fn select_byte(&mut self, bytes: &[u8], idx: &Word) -> Word {
        let mut out = const_word(0);
        for (j, &b) in bytes.iter().enumerate() {
            if b == 0 {
                continue;
            }
            let hit = self.eq(idx, &const_word(j as i32));
            for (bit, o) in out.iter_mut().enumerate().take(8) {
                if (b >> bit) & 1 == 1 {
                    *o = self.or(*o, hit);
                }
            }
        }
        out
    }
}

/// Reads a word's value from a model indexed by zero-based variable.
pub fn decode_word(w: &Word, model: &[bool]) -> i32 {
    let mut v: u32 = 0;
    for (i, &l) in w.iter().enumerate() {
        if lit_value(l, model) {
            v |= 1 << i;
        }
    }
    v as i32
}

pub fn lit_value(l: i32, model: &[bool]) -> bool {
    let val = model
        .get(l.unsigned_abs() as usize - 1)
        .copied()
        .unwrap_or(false);
    if l > 0 {
        val
    } else {
        !val
    }
}
