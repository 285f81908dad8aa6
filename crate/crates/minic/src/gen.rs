//! Random MiniC programs for differential testing.
//!
//! Generated programs always type check and always terminate: loops are
//! counted `for` loops over dedicated counters with at most `max_trip`
//! iterations. Inputs come from `nondet_int` and are pinned to a small
//! range with `assume`.

use rand::seq::IndexedRandom;
use rand::Rng;

#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Program variables besides loop counters.
    pub vars: usize,
    /// How many of the variables are read from `nondet_int`.
    pub inputs: usize,
    /// Inputs range over `-input_range..input_range`.
    pub input_range: i32,
    pub max_stmts: usize,
    pub max_depth: u32,
    pub max_trip: i32,
    /// Emit a helper function and calls to it.
    pub helper: bool,
    /// Occasionally use constants near the 32-bit limits. When off, every
    /// literal stays within `-256..=256`.
    pub big_constants: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            vars: 3,
            inputs: 0,
            input_range: 4,
            max_stmts: 6,
            max_depth: 2,
            max_trip: 3,
            helper: true,
            big_constants: true,
        }
    }
}

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    cfg: GenConfig,
    out: String,
    counters: u32,
    in_loop: bool,
}

const OPS: &[&str] = &[
    "+", "-", "*", "/", "%", "<", "<=", ">", ">=", "==", "!=", "&&", "||", "&", "|", "^", "<<",
    ">>",
];

impl<R: Rng> Gen<'_, R> {
    fn line(&mut self, indent: usize, text: &str) {
        for _ in 0..indent {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn var(&mut self) -> String {
        format!("v{}", self.rng.random_range(0..self.cfg.vars))
    }

    fn constant(&mut self) -> String {
        match self.rng.random_range(0..10) {
            0 if self.cfg.big_constants => ["2147483647", "(-2147483647 - 1)", "65536"]
                .choose(self.rng)
                .unwrap()
                .to_string(),
            0 => ["256", "-256", "255"].choose(self.rng).unwrap().to_string(),
            _ => self.rng.random_range(-5..=5).to_string(),
        }
    }

    fn expr(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.random_bool(0.3) {
            return if self.rng.random_bool(0.6) {
                self.var()
            } else {
                self.constant()
            };
        }
        match self.rng.random_range(0..12) {
            0 => {
                let op = ["-", "!", "~"].choose(self.rng).unwrap();
                format!("{op}({})", self.expr(depth - 1))
            }
            1 => format!(
                "({} ? {} : {})",
                self.expr(depth - 1),
                self.expr(depth - 1),
                self.expr(depth - 1)
            ),
            2 if self.cfg.helper => {
                format!("helper({}, {})", self.expr(depth - 1), self.expr(depth - 1))
            }
            3 => {
                let e = self.expr(depth - 1);
                if self.rng.random_bool(0.8) {
                    format!("\"xyz\"[({e}) & 3]")
                } else {
                    format!("\"xyz\"[{e}]")
                }
            }
            4 => {
                let f = ["abs", "min", "max"].choose(self.rng).unwrap();
                if *f == "abs" {
                    format!("abs({})", self.expr(depth - 1))
                } else {
                    format!("{f}({}, {})", self.expr(depth - 1), self.expr(depth - 1))
                }
            }
            _ => {
                let op = OPS.choose(self.rng).unwrap();
                format!("({} {op} {})", self.expr(depth - 1), self.expr(depth - 1))
            }
        }
    }

    fn block(&mut self, indent: usize, depth: u32) {
        let n = self.rng.random_range(1..=self.cfg.max_stmts.max(1));
        for _ in 0..n {
            self.stmt(indent, depth);
        }
    }

    fn stmt(&mut self, indent: usize, depth: u32) {
        let choice = self.rng.random_range(0..12);
        match choice {
            0 | 1 if depth > 0 => {
                let c = self.expr(2);
                self.line(indent, &format!("if ({c}) {{"));
                self.block(indent + 1, depth - 1);
                if self.rng.random_bool(0.5) {
                    self.line(indent, "} else {");
                    self.block(indent + 1, depth - 1);
                }
                self.line(indent, "}");
            }
            2 if depth > 0 => {
                let i = format!("i{}", self.counters);
                self.counters += 1;
                let trip = self.rng.random_range(0..=self.cfg.max_trip);
                self.line(
                    indent,
                    &format!("for (int {i} = 0; {i} < {trip}; {i}++) {{"),
                );
                let was = std::mem::replace(&mut self.in_loop, true);
                self.block(indent + 1, depth - 1);
                self.in_loop = was;
                self.line(indent, "}");
            }
            3 if self.in_loop => {
                let c = self.expr(1);
                let jump = if self.rng.random_bool(0.5) {
                    "break"
                } else {
                    "continue"
                };
                self.line(indent, &format!("if ({c}) {jump};"));
            }
            4 => {
                let c = self.expr(2);
                self.line(indent, &format!("assert({c});"));
            }
            5 => {
                let v = self.var();
                let op = ["+=", "-=", "*=", "/=", "%=", "^=", "<<="]
                    .choose(self.rng)
                    .unwrap();
                let e = self.expr(1);
                self.line(indent, &format!("{v} {op} {e};"));
            }
            _ => {
                let v = self.var();
                let e = self.expr(2);
                self.line(indent, &format!("{v} = {e};"));
            }
        }
    }
}

/// A random closed-world MiniC program as source text.
pub fn random_program<R: Rng>(rng: &mut R, cfg: &GenConfig) -> String {
    let mut g = Gen {
        rng,
        cfg: cfg.clone(),
        out: String::new(),
        counters: 0,
        in_loop: false,
    };
    if cfg.helper {
        g.line(0, "int helper(int a, int b) {");
        let c = g.rng.random_range(0..4);
        match c {
            0 => g.line(1, "if (a < b) return b - a;"),
            1 => g.line(1, "if (a == b) return 7;"),
            _ => {}
        }
        let op = ["+", "-", "*", "^", "&", "|"].choose(g.rng).unwrap();
        g.line(1, &format!("return a {op} b;"));
        g.line(0, "}");
        g.line(0, "");
    }
    g.line(0, "int main() {");
    for v in 0..cfg.vars {
        if v < cfg.inputs {
            let r = cfg.input_range;
            g.line(1, &format!("int v{v} = nondet_int();"));
            g.line(1, &format!("assume(v{v} >= {} && v{v} < {r});", -r));
        } else {
            let c = g.rng.random_range(-5..=5);
            g.line(1, &format!("int v{v} = {c};"));
        }
    }
    g.block(1, cfg.max_depth);
    let tail = g.expr(2);
    g.line(1, &format!("assert({tail});"));
    g.line(1, "return 0;");
    g.line(0, "}");
    g.out
}
