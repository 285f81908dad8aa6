//! Conflict-driven clause learning with two watched literals, VSIDS branching,
//! phase saving, Luby restarts, LBD-based learnt-clause reduction and
//! assumption-based incremental solving with final-conflict cores.

use crate::lit::{Lit, Var};
use crate::SolverError;

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;

type ClauseRef = u32;

#[derive(Debug)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    lbd: u32,
    activity: f64,
    deleted: bool,
}

#[derive(Copy, Clone, Debug)]
struct Watcher {
    cref: ClauseRef,
    blocker: Lit,
}

/// Answer of a single `solve` call.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Answer {
    Sat,
    Unsat,
}

#[derive(Default, Debug, Clone, Copy)]
pub struct Stats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

/// Binary max-heap over variables keyed by activity.
#[derive(Default, Debug)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<i32>,
}

impl VarHeap {
    fn grow(&mut self, n: usize) {
        self.pos.resize(n, -1);
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] >= 0
    }

    fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v as usize] = self.heap.len() as i32;
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn bumped(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            let i = self.pos[v as usize] as usize;
            self.up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap[0];
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = -1;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let pv = self.heap[parent];
            if act[pv as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = pv;
            self.pos[pv as usize] = i as i32;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let child = if r < n && act[self.heap[r] as usize] > act[self.heap[l] as usize] {
                r
            } else {
                l
            };
            let cv = self.heap[child];
            if act[cv as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = cv;
            self.pos[cv as usize] = i as i32;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }
}

/// Incremental CDCL solver.
#[derive(Debug)]
pub struct Solver {
    ok: bool,
    clauses: Vec<Clause>,
    free_crefs: Vec<ClauseRef>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<i8>,
    levels: Vec<u32>,
    reasons: Vec<Option<ClauseRef>>,
    phase: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    seen: Vec<bool>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    num_learnts: usize,
    max_learnts: f64,
    model: Vec<bool>,
    core: Vec<Lit>,
    conflict_budget: Option<u64>,
    stats: Stats,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Solver {
            ok: true,
            clauses: Vec::new(),
            free_crefs: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            levels: Vec::new(),
            reasons: Vec::new(),
            phase: Vec::new(),
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            seen: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            num_learnts: 0,
            max_learnts: 0.0,
            model: Vec::new(),
            core: Vec::new(),
            conflict_budget: None,
            stats: Stats::default(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses
            .iter()
            .filter(|c| !c.deleted && !c.learnt)
            .count()
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    /// `false` once the clause set is known to be unsatisfiable without assumptions.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    /// Maximum number of conflicts per `solve` call; `None` is unbounded.
    pub fn set_conflict_budget(&mut self, budget: Option<u64>) {
        self.conflict_budget = budget;
    }

    pub fn new_var(&mut self) -> Var {
        let v = self.assigns.len() as u32;
        self.assigns.push(UNDEF);
        self.levels.push(0);
        self.reasons.push(None);
        self.phase.push(false);
        self.activity.push(0.0);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.grow(self.assigns.len());
        self.heap.insert(v, &self.activity);
        Var(v)
    }

    /// Ensures variables `0..n` exist.
    pub fn reserve_vars(&mut self, n: usize) {
        while self.num_vars() < n {
            self.new_var();
        }
    }

    /// Preferred polarity for the first decision on `var`.
    pub fn set_phase(&mut self, var: Var, value: bool) {
        self.phase[var.index()] = value;
    }

    #[inline]
    fn value(&self, lit: Lit) -> i8 {
        let v = self.assigns[lit.var().index()];
        if lit.is_negated() {
            -v
        } else {
            v
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    /// Adds a clause. Returns `false` if the solver became trivially unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        if self.decision_level() > 0 {
            self.backtrack(0);
        }
        for l in lits {
            self.reserve_vars(l.var().index() + 1);
        }
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        let mut out = Vec::with_capacity(c.len());
        for (i, &l) in c.iter().enumerate() {
            if i + 1 < c.len() && c[i + 1] == !l {
                return true; // tautology
            }
            match self.value(l) {
                TRUE => return true,
                FALSE => {}
                _ => out.push(l),
            }
        }
        match out.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(out[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(out, false, 0);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> ClauseRef {
        let w0 = Watcher {
            cref: 0,
            blocker: lits[1],
        };
        let w1 = Watcher {
            cref: 0,
            blocker: lits[0],
        };
        let (n0, n1) = (!lits[0], !lits[1]);
        let clause = Clause {
            lits,
            learnt,
            lbd,
            activity: 0.0,
            deleted: false,
        };
        let cref = if let Some(r) = self.free_crefs.pop() {
            self.clauses[r as usize] = clause;
            r
        } else {
            self.clauses.push(clause);
            (self.clauses.len() - 1) as ClauseRef
        };
        self.watches[n0.code()].push(Watcher { cref, ..w0 });
        self.watches[n1.code()].push(Watcher { cref, ..w1 });
        if learnt {
            self.num_learnts += 1;
        }
        cref
    }

    fn enqueue(&mut self, lit: Lit, reason: Option<ClauseRef>) {
        let v = lit.var().index();
        debug_assert_eq!(self.assigns[v], UNDEF);
        self.assigns[v] = if lit.is_negated() { FALSE } else { TRUE };
        self.levels[v] = self.decision_level() as u32;
        self.reasons[v] = reason;
        self.trail.push(lit);
    }

    fn propagate(&mut self) -> Option<ClauseRef> {
        let mut conflict = None;
        while self.qhead < self.trail.len() && conflict.is_none() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                if self.value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    i += 1;
                    continue;
                }
                let cref = w.cref;
                let first;
                {
                    let lits = &mut self.clauses[cref as usize].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                    first = lits[0];
                }
                let nw = Watcher {
                    cref,
                    blocker: first,
                };
                if first != w.blocker && self.value(first) == TRUE {
                    ws[j] = nw;
                    j += 1;
                    i += 1;
                    continue;
                }
                let mut moved = false;
                let len = self.clauses[cref as usize].lits.len();
                for k in 2..len {
                    let lk = self.clauses[cref as usize].lits[k];
                    if self.value(lk) != FALSE {
                        self.clauses[cref as usize].lits.swap(1, k);
                        self.watches[(!lk).code()].push(nw);
                        moved = true;
                        break;
                    }
                }
                i += 1;
                if moved {
                    continue;
                }
                ws[j] = nw;
                j += 1;
                if self.value(first) == FALSE {
                    conflict = Some(cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(cref));
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
        }
        if conflict.is_some() {
            self.qhead = self.trail.len();
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cref: ClauseRef) {
        let c = &mut self.clauses[cref as usize];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn analyze(&mut self, mut confl: ClauseRef) -> (Vec<Lit>, usize, u32) {
        let mut learnt = vec![Lit(0)];
        let mut path_c = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let level = self.decision_level() as u32;
        let mut to_clear = Vec::new();
        loop {
            if self.clauses[confl as usize].learnt {
                self.bump_clause(confl);
            }
            let start = if p.is_some() { 1 } else { 0 };
            let n = self.clauses[confl as usize].lits.len();
            for k in start..n {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var().index();
                if !self.seen[v] && self.levels[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    to_clear.push(v);
                    if self.levels[v] >= level {
                        path_c += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            self.seen[lit.var().index()] = false;
            path_c -= 1;
            if path_c == 0 {
                break;
            }
            confl = self.reasons[lit.var().index()].expect("non-decision on conflict path");
        }
        learnt[0] = !p.unwrap();

        // Drop literals implied by other literals of the clause.
        let mut kept = 1;
        for k in 1..learnt.len() {
            let l = learnt[k];
            let redundant = match self.reasons[l.var().index()] {
                None => false,
                Some(r) => self.clauses[r as usize].lits[1..].iter().all(|q| {
                    let v = q.var().index();
                    self.seen[v] || self.levels[v] == 0
                }),
            };
            if !redundant {
                learnt[kept] = l;
                kept += 1;
            }
        }
        learnt.truncate(kept);
        for v in to_clear {
            self.seen[v] = false;
        }

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.levels[learnt[k].var().index()] > self.levels[learnt[max_i].var().index()] {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            self.levels[learnt[1].var().index()] as usize
        };
        let mut lv: Vec<u32> = learnt
            .iter()
            .map(|l| self.levels[l.var().index()])
            .collect();
        lv.sort_unstable();
        lv.dedup();
        (learnt, bt, lv.len() as u32)
    }

    /// Collects the assumptions responsible for `p` being false.
    fn analyze_final(&mut self, failed: Lit) {
        self.core.clear();
        self.core.push(failed);
        if self.decision_level() == 0 {
            return;
        }
        let fv = failed.var().index();
        self.seen[fv] = true;
        for i in (self.trail_lim[0]..self.trail.len()).rev() {
            let lit = self.trail[i];
            let v = lit.var().index();
            if self.seen[v] {
                match self.reasons[v] {
                    // Decisions below the assumption prefix are assumptions.
                    None => self.core.push(lit),
                    Some(r) => {
                        let n = self.clauses[r as usize].lits.len();
                        for k in 1..n {
                            let q = self.clauses[r as usize].lits[k];
                            if self.levels[q.var().index()] > 0 {
                                self.seen[q.var().index()] = true;
                            }
                        }
                    }
                }
                self.seen[v] = false;
            }
        }
        self.seen[fv] = false;
    }

    fn backtrack(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level];
        for i in (lim..self.trail.len()).rev() {
            let lit = self.trail[i];
            let v = lit.var().index();
            self.assigns[v] = UNDEF;
            self.reasons[v] = None;
            self.phase[v] = lit.is_positive();
            self.heap.insert(v as u32, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while !self.heap.is_empty() {
            let v = self.heap.pop(&self.activity)?;
            if self.assigns[v as usize] == UNDEF {
                return Some(Lit::new(Var(v), self.phase[v as usize]));
            }
        }
        None
    }

    fn locked(&self, cref: ClauseRef) -> bool {
        let c = &self.clauses[cref as usize];
        let l0 = c.lits[0];
        self.value(l0) == TRUE && self.reasons[l0.var().index()] == Some(cref)
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<ClauseRef> = (0..self.clauses.len() as ClauseRef)
            .filter(|&r| {
                let c = &self.clauses[r as usize];
                c.learnt && !c.deleted && c.lbd > 2 && c.lits.len() > 2
            })
            .filter(|&r| !self.locked(r))
            .collect();
        cands.sort_by(|&a, &b| {
            let ca = &self.clauses[a as usize];
            let cb = &self.clauses[b as usize];
            cb.lbd.cmp(&ca.lbd).then(
                ca.activity
                    .partial_cmp(&cb.activity)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
        });
        let remove = cands.len() / 2;
        if remove == 0 {
            return;
        }
        for &r in &cands[..remove] {
            let c = &mut self.clauses[r as usize];
            c.deleted = true;
            c.lits = Vec::new();
            self.num_learnts -= 1;
            self.free_crefs.push(r);
        }
        let clauses = &self.clauses;
        for ws in self.watches.iter_mut() {
            ws.retain(|w| !clauses[w.cref as usize].deleted);
        }
    }

    fn luby(y: f64, mut x: u64) -> f64 {
        let mut size = 1u64;
        let mut seq = 0i32;
        while size < x + 1 {
            seq += 1;
            size = 2 * size + 1;
        }
        while size - 1 != x {
            size = (size - 1) >> 1;
            seq -= 1;
            x %= size;
        }
        y.powi(seq)
    }

    /// Solves under `assumptions`. On `Unsat`, [`Solver::core`] holds a subset
    /// of the assumptions that is unsatisfiable together with the clauses.
    pub fn solve(&mut self, assumptions: &[Lit]) -> Result<Answer, SolverError> {
        self.core.clear();
        self.model.clear();
        if !self.ok {
            return Ok(Answer::Unsat);
        }
        for a in assumptions {
            self.reserve_vars(a.var().index() + 1);
        }
        if self.max_learnts == 0.0 {
            self.max_learnts = (self.clauses.len() as f64 / 3.0).max(2000.0);
        }
        let start_conflicts = self.stats.conflicts;
        let mut restart_no = 0u64;
        let result = loop {
            let budget = (Self::luby(2.0, restart_no) * 100.0) as u64;
            match self.search(assumptions, budget, start_conflicts) {
                Some(r) => break r,
                None => {
                    restart_no += 1;
                    self.stats.restarts += 1;
                }
            }
        };
        if let Ok(Answer::Sat) = result {
            self.model = self.assigns.iter().map(|&a| a == TRUE).collect();
        }
        self.backtrack(0);
        result
    }

    fn search(
        &mut self,
        assumptions: &[Lit],
        restart_budget: u64,
        start_conflicts: u64,
    ) -> Option<Result<Answer, SolverError>> {
        let mut local_conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                local_conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(Ok(Answer::Unsat));
                }
                let (learnt, bt, lbd) = self.analyze(confl);
                self.backtrack(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let first = learnt[0];
                    let cref = self.attach(learnt, true, lbd);
                    self.bump_clause(cref);
                    self.enqueue(first, Some(cref));
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                if let Some(b) = self.conflict_budget {
                    if self.stats.conflicts - start_conflicts > b {
                        return Some(Err(SolverError::ResourceLimit {
                            conflicts: self.stats.conflicts - start_conflicts,
                        }));
                    }
                }
            } else {
                if local_conflicts >= restart_budget {
                    self.backtrack(0);
                    return None;
                }
                if self.num_learnts as f64 >= self.max_learnts + self.trail.len() as f64 {
                    self.reduce_db();
                    self.max_learnts *= 1.1;
                }
                let mut next = None;
                while self.decision_level() < assumptions.len() {
                    let a = assumptions[self.decision_level()];
                    match self.value(a) {
                        TRUE => self.trail_lim.push(self.trail.len()),
                        FALSE => {
                            self.analyze_final(a);
                            return Some(Ok(Answer::Unsat));
                        }
                        _ => {
                            next = Some(a);
                            break;
                        }
                    }
                }
                let lit = match next {
                    Some(a) => a,
                    None => match self.pick_branch() {
                        Some(l) => l,
                        None => return Some(Ok(Answer::Sat)),
                    },
                };
                self.stats.decisions += 1;
                self.trail_lim.push(self.trail.len());
                self.enqueue(lit, None);
            }
        }
    }

    /// Model of the last satisfiable call, indexed by variable.
    pub fn model(&self) -> &[bool] {
        &self.model
    }

    pub fn model_value(&self, lit: Lit) -> bool {
        let v = self.model.get(lit.var().index()).copied().unwrap_or(false);
        v != lit.is_negated()
    }

    /// Failed assumptions of the last unsatisfiable call.
    pub fn core(&self) -> &[Lit] {
        &self.core
    }
}
