//! Conflict-driven clause-learning engine with native pseudo-Boolean
//! propagation.
//!
//! Clauses use two watched literals. Normalized `>=` constraints keep a
//! running slack (`sum of non-false weights - degree`) and propagate every
//! unassigned literal whose weight exceeds it. Conflict analysis is purely
//! clausal: a PB reason is the set of its literals that were false before the
//! propagated literal.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::formula::{Lit, PbGe, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Sat,
    Unsat,
    /// Conflict budget or deadline reached.
    Unknown,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Limits {
    pub conflicts: Option<u64>,
    pub deadline: Option<Instant>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolverStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
    pub calls: u64,
}

const UNDEF: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reason {
    Decision,
    Clause(u32),
    Pb(u32),
}

#[derive(Debug)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f64,
}

#[derive(Debug)]
struct Pb {
    terms: Vec<(u64, Lit)>,
    degree: u64,
    slack: i64,
    max_coef: u64,
}

/// Indexed max-heap over variable activities.
#[derive(Debug, Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn grow(&mut self, n: usize) {
        self.pos.resize(n, None);
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize].is_some()
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v as usize] = Some(self.heap.len());
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = Some(0);
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn bumped(&mut self, v: u32, act: &[f64]) {
        if let Some(i) = self.pos[v as usize] {
            self.sift_up(i, act);
        }
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if act[p as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = p;
            self.pos[p as usize] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let child = if r < self.heap.len()
                && act[self.heap[r] as usize] > act[self.heap[l] as usize]
            {
                r
            } else {
                l
            };
            let c = self.heap[child];
            if act[c as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = c;
            self.pos[c as usize] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = Some(i);
    }
}

/// Incremental CDCL solver over clauses and normalized PB constraints.
#[derive(Debug)]
pub struct Solver {
    values: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<Reason>,
    trail_pos: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,

    clauses: Vec<Clause>,
    watches: Vec<Vec<u32>>,
    pbs: Vec<Pb>,
    pb_occ: Vec<Vec<(u32, u64)>>,

    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    order: VarHeap,
    phase: Vec<bool>,

    seen: Vec<bool>,
    level_seen: Vec<u64>,
    level_stamp: u64,
    scratch: Vec<Lit>,

    num_learnts: usize,
    max_learnts: f64,
    ok: bool,
    model: Vec<bool>,
    core: Vec<Lit>,
    pub stats: SolverStats,
}

impl Solver {
    pub fn new(num_vars: usize, seed: u64) -> Self {
        let mut s = Solver {
            values: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail_pos: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            clauses: Vec::new(),
            watches: Vec::new(),
            pbs: Vec::new(),
            pb_occ: Vec::new(),
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            order: VarHeap::default(),
            phase: Vec::new(),
            seen: Vec::new(),
            level_seen: Vec::new(),
            level_stamp: 0,
            scratch: Vec::new(),
            num_learnts: 0,
            max_learnts: 2000.0,
            ok: true,
            model: Vec::new(),
            core: Vec::new(),
            stats: SolverStats::default(),
        };
        s.reserve_vars(num_vars);
        // Tiny seeded perturbation of the initial branching order.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for a in s.activity.iter_mut() {
            *a = rng.gen::<f64>() * 1e-5;
        }
        for v in 0..num_vars as u32 {
            s.order.bumped(v, &s.activity);
        }
        s
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    /// Ensures variables `0..n` exist.
    pub fn reserve_vars(&mut self, n: usize) {
        let old = self.values.len();
        if n <= old {
            return;
        }
        self.values.resize(n, UNDEF);
        self.level.resize(n, 0);
        self.reason.resize(n, Reason::Decision);
        self.trail_pos.resize(n, 0);
        self.activity.resize(n, 0.0);
        self.phase.resize(n, false);
        self.seen.resize(n, false);
        self.watches.resize(2 * n, Vec::new());
        self.pb_occ.resize(2 * n, Vec::new());
        self.order.grow(n);
        for v in old..n {
            self.order.insert(v as u32, &self.activity);
        }
    }

    pub fn new_var(&mut self) -> Var {
        let v = self.values.len();
        self.reserve_vars(v + 1);
        Var(v as u32)
    }

    /// Preferred polarity for the first decision on `v`.
    pub fn set_phase(&mut self, v: Var, positive: bool) {
        self.phase[v.index()] = positive;
    }

    #[inline]
    fn value(&self, l: Lit) -> u8 {
        let v = self.values[l.var().index()];
        if v == UNDEF {
            UNDEF
        } else {
            v ^ u8::from(!l.is_positive())
        }
    }

    #[inline]
    fn is_true(&self, l: Lit) -> bool {
        self.value(l) == 1
    }

    #[inline]
    fn is_false(&self, l: Lit) -> bool {
        self.value(l) == 0
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Value of `l` in the last model.
    pub fn model_value(&self, l: Lit) -> bool {
        self.model.get(l.var().index()).copied().unwrap_or(false) == l.is_positive()
    }

    pub fn model(&self) -> &[bool] {
        &self.model
    }

    /// Failed assumptions of the last UNSAT answer.
    pub fn core(&self) -> &[Lit] {
        &self.core
    }

    pub fn is_ok(&self) -> bool {
        self.ok
    }

    fn enqueue(&mut self, l: Lit, reason: Reason) {
        let v = l.var().index();
        debug_assert_eq!(self.values[v], UNDEF);
        self.values[v] = u8::from(l.is_positive());
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail_pos[v] = self.trail.len() as u32;
        self.trail.push(l);
        let f = !l;
        for i in 0..self.pb_occ[f.code()].len() {
            let (pb, coef) = self.pb_occ[f.code()][i];
            self.pbs[pb as usize].slack -= coef as i64;
        }
    }

    fn backtrack(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let start = self.trail_lim[lvl as usize];
        for i in (start..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var().index();
            self.values[v] = UNDEF;
            self.phase[v] = l.is_positive();
            let f = !l;
            for j in 0..self.pb_occ[f.code()].len() {
                let (pb, coef) = self.pb_occ[f.code()][j];
                self.pbs[pb as usize].slack += coef as i64;
            }
            self.order.insert(v as u32, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = start;
    }

    /// Adds a clause at decision level 0. Returns `false` once the clause set
    /// is unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        self.backtrack(0);
        let mut ls: Vec<Lit> = Vec::with_capacity(lits.len());
        for &l in lits {
            self.reserve_vars(l.var().index() + 1);
            if self.is_true(l) || ls.contains(&!l) {
                return true;
            }
            if !self.is_false(l) && !ls.contains(&l) {
                ls.push(l);
            }
        }
        match ls.len() {
            0 => {
                self.ok = false;
            }
            1 => {
                self.enqueue(ls[0], Reason::Decision);
                self.ok = self.propagate().is_none();
            }
            _ => {
                self.attach_clause(ls, false, 0);
            }
        }
        self.ok
    }

    fn attach_clause(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> u32 {
        let idx = self.clauses.len() as u32;
        self.watches[lits[0].code()].push(idx);
        self.watches[lits[1].code()].push(idx);
        if learnt {
            self.num_learnts += 1;
        }
        self.clauses.push(Clause {
            lits,
            learnt,
            deleted: false,
            lbd,
            activity: 0.0,
        });
        idx
    }

    /// Adds `sum(w * l) >= degree` with positive weights at level 0.
    pub fn add_pb(&mut self, pb: &PbGe) -> bool {
        if !self.ok {
            return false;
        }
        if pb.degree == 0 {
            return true;
        }
        if pb.terms.iter().all(|&(w, _)| w >= pb.degree) {
            let lits: Vec<Lit> = pb.terms.iter().map(|&(_, l)| l).collect();
            return self.add_clause(&lits);
        }
        self.backtrack(0);
        let idx = self.pbs.len() as u32;
        let mut slack = -(pb.degree as i64);
        let mut max_coef = 0;
        for &(w, l) in &pb.terms {
            self.reserve_vars(l.var().index() + 1);
            self.pb_occ[l.code()].push((idx, w));
            if !self.is_false(l) {
                slack += w as i64;
            }
            max_coef = max_coef.max(w);
        }
        self.pbs.push(Pb {
            terms: pb.terms.clone(),
            degree: pb.degree,
            slack,
            max_coef,
        });
        if slack < 0 {
            self.ok = false;
            return false;
        }
        if self.pb_propagate(idx).is_some() || self.propagate().is_some() {
            self.ok = false;
        }
        self.ok
    }

    /// Enqueues everything PB `idx` implies; returns it if it is conflicting.
    fn pb_propagate(&mut self, idx: u32) -> Option<Reason> {
        let pb = &self.pbs[idx as usize];
        if pb.slack < 0 {
            return Some(Reason::Pb(idx));
        }
        if (pb.slack as u64) >= pb.max_coef {
            return None;
        }
        let slack = pb.slack as u64;
        for i in 0..self.pbs[idx as usize].terms.len() {
            let (w, l) = self.pbs[idx as usize].terms[i];
            if w > slack && self.value(l) == UNDEF {
                self.enqueue(l, Reason::Pb(idx));
                self.stats.propagations += 1;
            }
        }
        None
    }

    /// Unit propagation; returns the conflicting constraint, if any.
    fn propagate(&mut self) -> Option<Reason> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let f = !p;

            let mut ws = std::mem::take(&mut self.watches[f.code()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                i += 1;
                let c = &mut self.clauses[ci as usize];
                if c.deleted {
                    continue;
                }
                if c.lits[0] == f {
                    c.lits.swap(0, 1);
                }
                let first = c.lits[0];
                let first_val = {
                    let v = self.values[first.var().index()];
                    if v == UNDEF {
                        UNDEF
                    } else {
                        v ^ u8::from(!first.is_positive())
                    }
                };
                if first_val == 1 {
                    ws[j] = ci;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.lits.len() {
                    let l = c.lits[k];
                    let v = self.values[l.var().index()];
                    let lv = if v == UNDEF {
                        UNDEF
                    } else {
                        v ^ u8::from(!l.is_positive())
                    };
                    if lv != 0 {
                        c.lits.swap(1, k);
                        let w = c.lits[1];
                        self.watches[w.code()].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = ci;
                j += 1;
                if first_val == 0 {
                    conflict = Some(Reason::Clause(ci));
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Reason::Clause(ci));
                    self.stats.propagations += 1;
                }
            }
            ws.truncate(j);
            let extra = std::mem::replace(&mut self.watches[f.code()], ws);
            self.watches[f.code()].extend(extra);
            if conflict.is_some() {
                return conflict;
            }

            for k in 0..self.pb_occ[f.code()].len() {
                let (pb, _) = self.pb_occ[f.code()][k];
                if let Some(c) = self.pb_propagate(pb) {
                    return Some(c);
                }
            }
        }
        None
    }

    /// Literals of the reason for `lit` (excluding `lit` itself), all false.
    fn reason_lits(&self, reason: Reason, lit: Option<Lit>, out: &mut Vec<Lit>) {
        out.clear();
        match reason {
            Reason::Decision => {}
            Reason::Clause(ci) => {
                out.extend(
                    self.clauses[ci as usize]
                        .lits
                        .iter()
                        .copied()
                        .filter(|&l| Some(l) != lit),
                );
            }
            Reason::Pb(pi) => {
                let pb = &self.pbs[pi as usize];
                let limit = lit.map(|l| self.trail_pos[l.var().index()]);
                // Keep the heaviest early false literals until they alone force
                // the propagation (or the conflict).
                let mut cands: Vec<(u64, Lit)> = pb
                    .terms
                    .iter()
                    .copied()
                    .filter(|&(_, l)| {
                        self.is_false(l)
                            && limit.is_none_or(|lim| self.trail_pos[l.var().index()] < lim)
                    })
                    .collect();
                cands.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
                let total: u64 = pb.terms.iter().map(|t| t.0).sum();
                let need_w = lit
                    .and_then(|l| pb.terms.iter().find(|t| t.1 == l).map(|t| t.0))
                    .unwrap_or(0);
                // Remaining weight once the chosen literals are false must drop
                // below degree (+ weight of the implied literal).
                let mut remaining = total;
                for (w, l) in cands {
                    if remaining < pb.degree + need_w {
                        break;
                    }
                    remaining -= w;
                    out.push(l);
                }
            }
        }
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in self.activity.iter_mut() {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.bumped(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, ci: u32) {
        let c = &mut self.clauses[ci as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP analysis; returns the learnt clause (asserting literal first)
    /// and the backjump level.
    fn analyze(&mut self, conflict: Reason) -> (Vec<Lit>, u32) {
        let mut learnt: Vec<Lit> = vec![Lit::from_code(0)];
        let mut path = 0usize;
        let mut reason = conflict;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let mut buf = std::mem::take(&mut self.scratch);
        let cur = self.decision_level();
        loop {
            if let Reason::Clause(ci) = reason {
                self.bump_clause(ci);
            }
            self.reason_lits(reason, p, &mut buf);
            for &q in &buf {
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= cur {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().index()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            self.seen[lit.var().index()] = false;
            path -= 1;
            p = Some(lit);
            reason = self.reason[lit.var().index()];
            if path == 0 {
                break;
            }
        }
        learnt[0] = !p.unwrap();

        // Drop literals whose reason is already covered by the clause.
        let mut keep = vec![learnt[0]];
        for &q in &learnt[1..] {
            let r = self.reason[q.var().index()];
            let redundant = r != Reason::Decision && {
                self.reason_lits(r, Some(!q), &mut buf);
                buf.iter().all(|&x| {
                    let v = x.var().index();
                    self.seen[v] || self.level[v] == 0
                })
            };
            if !redundant {
                keep.push(q);
            }
        }
        for &q in &learnt[1..] {
            self.seen[q.var().index()] = false;
        }
        let mut learnt = keep;
        self.scratch = buf;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().index()] > self.level[learnt[max_i].var().index()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().index()]
        };
        (learnt, bt)
    }

    fn lbd(&mut self, lits: &[Lit]) -> u32 {
        self.level_stamp += 1;
        let top = lits.iter().map(|l| self.level[l.var().index()]).max().unwrap_or(0);
        if self.level_seen.len() <= top as usize {
            self.level_seen.resize(top as usize + 1, 0);
        }
        let mut n = 0;
        for l in lits {
            let lv = self.level[l.var().index()] as usize;
            if self.level_seen[lv] != self.level_stamp {
                self.level_seen[lv] = self.level_stamp;
                n += 1;
            }
        }
        n
    }

    /// Assumption literals responsible for assumption `p` being false.
    fn analyze_final(&mut self, p: Lit) {
        self.core.clear();
        self.core.push(p);
        if self.decision_level() == 0 {
            return;
        }
        self.seen[p.var().index()] = true;
        let mut buf = std::mem::take(&mut self.scratch);
        for i in (self.trail_lim[0]..self.trail.len()).rev() {
            let x = self.trail[i];
            let v = x.var().index();
            if !self.seen[v] {
                continue;
            }
            match self.reason[v] {
                Reason::Decision => self.core.push(x),
                r => {
                    self.reason_lits(r, Some(x), &mut buf);
                    for &q in &buf {
                        if self.level[q.var().index()] > 0 {
                            self.seen[q.var().index()] = true;
                        }
                    }
                }
            }
            self.seen[v] = false;
        }
        self.seen[p.var().index()] = false;
        self.scratch = buf;
    }

    fn reduce_db(&mut self) {
        let locked: Vec<bool> = {
            let mut l = vec![false; self.clauses.len()];
            for &t in &self.trail {
                if let Reason::Clause(ci) = self.reason[t.var().index()] {
                    l[ci as usize] = true;
                }
            }
            l
        };
        let mut cands: Vec<u32> = (0..self.clauses.len() as u32)
            .filter(|&i| {
                let c = &self.clauses[i as usize];
                c.learnt && !c.deleted && c.lbd > 2 && !locked[i as usize]
            })
            .collect();
        cands.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd
                .cmp(&ca.lbd)
                .then(ca.activity.total_cmp(&cb.activity))
        });
        for &ci in cands.iter().take(cands.len() / 2) {
            let c = &mut self.clauses[ci as usize];
            c.deleted = true;
            c.lits = Vec::new();
            self.num_learnts -= 1;
        }
        for ws in self.watches.iter_mut() {
            ws.retain(|&ci| !self.clauses[ci as usize].deleted);
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.values[v as usize] == UNDEF {
                return Some(Lit::new(Var(v), self.phase[v as usize]));
            }
        }
        None
    }

    /// Solves under `assumptions`. On UNSAT, [`Solver::core`] holds the
    /// responsible subset of the assumptions.
    pub fn solve(&mut self, assumptions: &[Lit], limits: Limits) -> Outcome {
        self.stats.calls += 1;
        self.core.clear();
        if !self.ok {
            return Outcome::Unsat;
        }
        for &a in assumptions {
            self.reserve_vars(a.var().index() + 1);
        }
        self.backtrack(0);
        if self.propagate().is_some() {
            self.ok = false;
            return Outcome::Unsat;
        }
        let start_conflicts = self.stats.conflicts;
        let mut restart = 0u32;
        let outcome = loop {
            let budget = luby(restart) * 100.0;
            restart += 1;
            match self.search(assumptions, budget as u64, start_conflicts, &limits) {
                Some(o) => break o,
                None => continue,
            }
        };
        if outcome == Outcome::Sat {
            self.model = self.values.iter().map(|&v| v == 1).collect();
        }
        self.backtrack(0);
        outcome
    }

    fn search(
        &mut self,
        assumptions: &[Lit],
        restart_budget: u64,
        start_conflicts: u64,
        limits: &Limits,
    ) -> Option<Outcome> {
        let mut conflicts_here = 0u64;
        loop {
            if let Some(conflict) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts_here += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(Outcome::Unsat);
                }
                let (learnt, bt) = self.analyze(conflict);
                self.backtrack(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], Reason::Decision);
                } else {
                    let lbd = self.lbd(&learnt);
                    let asserting = learnt[0];
                    let ci = self.attach_clause(learnt, true, lbd);
                    self.bump_clause(ci);
                    self.enqueue(asserting, Reason::Clause(ci));
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                let used = self.stats.conflicts - start_conflicts;
                if limits.conflicts.is_some_and(|c| used >= c) {
                    return Some(Outcome::Unknown);
                }
                if used.is_multiple_of(64) && limits.deadline.is_some_and(|d| Instant::now() >= d) {
                    return Some(Outcome::Unknown);
                }
                continue;
            }
            if conflicts_here >= restart_budget {
                self.backtrack(0);
                return None;
            }
            if self.num_learnts as f64 >= self.max_learnts + self.trail.len() as f64 {
                self.reduce_db();
                self.max_learnts *= 1.1;
            }
            let mut next = None;
            while (self.decision_level() as usize) < assumptions.len() {
                let a = assumptions[self.decision_level() as usize];
                match self.value(a) {
                    1 => self.trail_lim.push(self.trail.len()),
                    0 => {
                        self.analyze_final(a);
                        self.core.retain(|l| assumptions.contains(l));
                        self.core.sort();
                        self.core.dedup();
                        return Some(Outcome::Unsat);
                    }
                    _ => {
                        next = Some(a);
                        break;
                    }
                }
            }
            let lit = match next {
                Some(a) => a,
                None => {
                    self.stats.decisions += 1;
                    match self.pick_branch() {
                        Some(l) => l,
                        None => return Some(Outcome::Sat),
                    }
                }
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(lit, Reason::Decision);
        }
    }
}

fn luby(mut x: u32) -> f64 {
    let mut size = 1u32;
    let mut seq = 0;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    2f64.powi(seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> Var {
        Var(i)
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<f64> = (0..15).map(luby).collect();
        assert_eq!(
            seq,
            vec![1., 1., 2., 1., 1., 2., 4., 1., 1., 2., 1., 1., 2., 4., 8.]
        );
    }

    #[test]
    fn simple_sat_and_unsat() {
        let mut s = Solver::new(2, 0);
        s.add_clause(&[v(0).pos(), v(1).pos()]);
        s.add_clause(&[v(0).neg(), v(1).pos()]);
        assert_eq!(s.solve(&[], Limits::default()), Outcome::Sat);
        assert!(s.model_value(v(1).pos()));
        s.add_clause(&[v(1).neg()]);
        assert_eq!(s.solve(&[], Limits::default()), Outcome::Unsat);
    }

    #[test]
    fn assumption_core() {
        // a -> x, b -> ~x, c free
        let mut s = Solver::new(4, 0);
        let (a, b, c, x) = (v(0), v(1), v(2), v(3));
        s.add_clause(&[a.neg(), x.pos()]);
        s.add_clause(&[b.neg(), x.neg()]);
        assert_eq!(
            s.solve(&[c.pos(), a.pos(), b.pos()], Limits::default()),
            Outcome::Unsat
        );
        let mut core = s.core().to_vec();
        core.sort();
        assert_eq!(core, vec![a.pos(), b.pos()]);
        assert_eq!(s.solve(&[a.pos(), c.pos()], Limits::default()), Outcome::Sat);
    }

    #[test]
    fn cardinality_propagation() {
        // x0 + x1 + x2 >= 2 with x0 false forces x1, x2.
        let mut s = Solver::new(3, 0);
        s.add_pb(&PbGe {
            terms: vec![(1, v(0).pos()), (1, v(1).pos()), (1, v(2).pos())],
            degree: 2,
        });
        s.add_clause(&[v(0).neg()]);
        assert_eq!(s.solve(&[], Limits::default()), Outcome::Sat);
        assert!(s.model_value(v(1).pos()) && s.model_value(v(2).pos()));
        assert_eq!(s.solve(&[v(1).neg()], Limits::default()), Outcome::Unsat);
        assert_eq!(s.core(), &[v(1).neg()]);
    }

    #[test]
    fn conflict_budget_reports_unknown() {
        // Pigeonhole 6 -> 5 in clauses: needs many conflicts.
        let (p, h) = (6u32, 5u32);
        let mut s = Solver::new((p * h) as usize, 0);
        let x = |i: u32, j: u32| Var(i * h + j);
        for i in 0..p {
            let c: Vec<Lit> = (0..h).map(|j| x(i, j).pos()).collect();
            s.add_clause(&c);
        }
        for j in 0..h {
            for i in 0..p {
                for k in i + 1..p {
                    s.add_clause(&[x(i, j).neg(), x(k, j).neg()]);
                }
            }
        }
        let lim = Limits {
            conflicts: Some(3),
            deadline: None,
        };
        assert_eq!(s.solve(&[], lim), Outcome::Unknown);
        assert_eq!(s.solve(&[], Limits::default()), Outcome::Unsat);
    }
}
