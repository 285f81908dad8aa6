//! Renders abstract syntax back to MiniC text that reparses to the same tree.

use std::fmt::Write;

use crate::ast::*;

pub fn pretty_print(p: &MiniCProgram) -> String {
    let mut out = String::new();
    for (i, f) in p.functions.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let params: Vec<String> = f
            .params
            .iter()
            .map(|p| match p.ty {
                Type::Str => format!("const char *{}", p.name),
                _ => format!("int {}", p.name),
            })
            .collect();
        let ret = if f.ret == Type::Void { "void" } else { "int" };
        let _ = writeln!(out, "{ret} {}({}) {{", f.name, params.join(", "));
        stmts(&mut out, &f.body.stmts, 1);
        out.push_str("}\n");
    }
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn stmts(out: &mut String, ss: &[Stmt], level: usize) {
    for s in ss {
        stmt(out, s, level);
    }
}

fn block(out: &mut String, b: &Block, level: usize) {
    out.push_str("{\n");
    stmts(out, &b.stmts, level + 1);
    indent(out, level);
    out.push('}');
}

/// Statement text without the terminating semicolon, for `for` headers.
fn simple(s: &Stmt) -> String {
    match &s.kind {
        StmtKind::Declare { ty, name, init } => {
            let t = if *ty == Type::Str {
                "const char *"
            } else {
                "int "
            };
            match init {
                Some(e) => format!("{t}{name} = {}", expr(e)),
                None => format!("{t}{name}"),
            }
        }
        StmtKind::Assign { target, value } => format!("{target} = {}", expr(value)),
        StmtKind::CompoundAssign { target, op, value } => {
            format!("{target} {}= {}", op.symbol(), expr(value))
        }
        StmtKind::Expr(e) => expr(e),
        _ => unreachable!("not a simple statement"),
    }
}

fn stmt(out: &mut String, s: &Stmt, level: usize) {
    indent(out, level);
    match &s.kind {
        StmtKind::Declare { .. }
        | StmtKind::Assign { .. }
        | StmtKind::CompoundAssign { .. }
        | StmtKind::Expr(_) => {
            out.push_str(&simple(s));
            out.push(';');
        }
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            let _ = write!(out, "if ({}) ", expr(&cond.expr));
            block(out, then_branch, level);
            if let Some(e) = else_branch {
                out.push_str(" else ");
                block(out, e, level);
            }
        }
        StmtKind::While { cond, body } => {
            let _ = write!(out, "while ({}) ", expr(&cond.expr));
            block(out, body, level);
        }
        StmtKind::For {
            init,
            cond,
            update,
            body,
        } => {
            let init: Vec<String> = init.iter().map(simple).collect();
            // Several declarators share one specifier list in C.
            let init = if init.len() > 1 && init[0].starts_with("int ") {
                let rest: Vec<&str> = init[1..]
                    .iter()
                    .map(|s| s.trim_start_matches("int "))
                    .collect();
                format!("{}, {}", init[0], rest.join(", "))
            } else {
                init.join(", ")
            };
            let cond = cond.as_ref().map(|c| expr(&c.expr)).unwrap_or_default();
            let update: Vec<String> = update.iter().map(simple).collect();
            let _ = write!(out, "for ({init}; {cond}; {}) ", update.join(", "));
            block(out, body, level);
        }
        StmtKind::Break => out.push_str("break;"),
        StmtKind::Continue => out.push_str("continue;"),
        StmtKind::Return(None) => out.push_str("return;"),
        StmtKind::Return(Some(e)) => {
            let _ = write!(out, "return {};", expr(e));
        }
        StmtKind::Assert(e) => {
            let _ = write!(out, "assert({});", expr(e));
        }
        StmtKind::Assume(e) => {
            let _ = write!(out, "assume({});", expr(e));
        }
        StmtKind::Block(b) => block(out, b, level),
    }
    out.push('\n');
}

fn escape_bytes(bytes: &[u8]) -> String {
    let mut s = String::new();
    for &b in bytes {
        match b {
            b'"' => s.push_str("\\\""),
            b'\\' => s.push_str("\\\\"),
            b'\n' => s.push_str("\\n"),
            b'\t' => s.push_str("\\t"),
            0x20..=0x7e => s.push(b as char),
            _ => {
                let _ = write!(s, "\\{b:03o}");
            }
        }
    }
    s
}

pub fn expr(e: &Expr) -> String {
    match &e.kind {
        // Unsigned rendering keeps i32::MIN a literal rather than a negation.
        ExprKind::Int(v) => (*v as u32).to_string(),
        ExprKind::Str(s) => format!("\"{}\"", escape_bytes(s)),
        ExprKind::Var(n) => n.clone(),
        ExprKind::Index(a, b) => format!("{}[{}]", expr(a), expr(b)),
        ExprKind::Unary(op, a) => {
            let sym = match op {
                UnOp::Neg => "-",
                UnOp::Not => "!",
                UnOp::BitNot => "~",
            };
            format!("{sym}({})", expr(a))
        }
        ExprKind::Binary(op, a, b) => format!("({} {} {})", expr(a), op.symbol(), expr(b)),
        ExprKind::Ternary(c, a, b) => format!("({} ? {} : {})", expr(c), expr(a), expr(b)),
        ExprKind::Call(n, args) => {
            let args: Vec<String> = args.iter().map(expr).collect();
            format!("{n}({})", args.join(", "))
        }
    }
}
