//! Statements that write the value an assertion inspects.
//!
//! Relaxing such a statement always repairs a failing check, so diagnoses
//! containing one carry little information. They are reported but flagged.

use std::collections::{BTreeSet, HashMap};

use minic::{Block, CheckedProgram, Expr, ExprKind, StatementId, Stmt, StmtKind};

#[derive(Default)]
struct Facts {
    /// (statement, variable written), in source order.
    writes: Vec<(StatementId, String)>,
    /// (statement, variables read, functions called) for asserts.
    asserts: Vec<(StatementId, BTreeSet<String>, BTreeSet<String>)>,
    /// (statement, variables read) for value returns.
    returns: Vec<(StatementId, BTreeSet<String>)>,
}

fn reads(e: &Expr, vars: &mut BTreeSet<String>, calls: &mut BTreeSet<String>) {
    match &e.kind {
        ExprKind::Int(_) | ExprKind::Str(_) => {}
        ExprKind::Var(v) => {
            vars.insert(v.clone());
        }
        ExprKind::Index(a, b) | ExprKind::Binary(_, a, b) => {
            reads(a, vars, calls);
            reads(b, vars, calls);
        }
        ExprKind::Unary(_, a) => reads(a, vars, calls),
        ExprKind::Ternary(a, b, c) => {
            reads(a, vars, calls);
            reads(b, vars, calls);
            reads(c, vars, calls);
        }
        ExprKind::Call(f, args) => {
            calls.insert(f.clone());
            for a in args {
                reads(a, vars, calls);
            }
        }
    }
}

fn block(b: &Block, f: &mut Facts) {
    for s in &b.stmts {
        stmt(s, f);
    }
}

fn stmt(s: &Stmt, f: &mut Facts) {
    let Some(id) = s.id else {
        // Compound statements carry ids on their conditions only.
        match &s.kind {
            StmtKind::Block(b) => block(b, f),
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                block(then_branch, f);
                if let Some(e) = else_branch {
                    block(e, f);
                }
            }
            StmtKind::While { body, .. } => block(body, f),
            StmtKind::For {
                init, update, body, ..
            } => {
                for st in init {
                    stmt(st, f);
                }
                block(body, f);
                for st in update {
                    stmt(st, f);
                }
            }
            _ => {}
        }
        return;
    };
    match &s.kind {
        StmtKind::Declare {
            name,
            init: Some(_),
            ..
        } => f.writes.push((id, name.clone())),
        StmtKind::Assign { target, .. } | StmtKind::CompoundAssign { target, .. } => {
            f.writes.push((id, target.clone()))
        }
        StmtKind::Assert(e) => {
            let (mut vars, mut calls) = (BTreeSet::new(), BTreeSet::new());
            reads(e, &mut vars, &mut calls);
            f.asserts.push((id, vars, calls));
        }
        StmtKind::Return(Some(e)) => {
            let (mut vars, mut calls) = (BTreeSet::new(), BTreeSet::new());
            reads(e, &mut vars, &mut calls);
            f.returns.push((id, vars));
        }
        _ => {}
    }
}

/// Last write to `var` with an id below `before`.
fn last_write(f: &Facts, var: &str, before: StatementId) -> Option<StatementId> {
    f.writes
        .iter()
        .filter(|(id, v)| v == var && *id < before)
        .map(|(id, _)| *id)
        .max()
}

/// Output sinks: value returns of functions called from an assertion, the
/// last writes to variables those returns or the assertion read.
pub fn output_sinks(prog: &CheckedProgram) -> BTreeSet<StatementId> {
    let facts: HashMap<&str, Facts> = prog
        .program()
        .functions
        .iter()
        .map(|func| {
            let mut f = Facts::default();
            block(&func.body, &mut f);
            (func.name.as_str(), f)
        })
        .collect();
    let mut sinks = BTreeSet::new();
    for f in facts.values() {
        for (aid, vars, calls) in &f.asserts {
            sinks.extend(vars.iter().filter_map(|v| last_write(f, v, *aid)));
            for callee in calls {
                let Some(g) = facts.get(callee.as_str()) else {
                    continue;
                };
                for (rid, rvars) in &g.returns {
                    sinks.insert(*rid);
                    sinks.extend(rvars.iter().filter_map(|v| last_write(g, v, *rid)));
                }
            }
        }
    }
    sinks
}
