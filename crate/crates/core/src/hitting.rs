//! Hitting sets over constraint ids.
//!
//! Variable `c` (for `c < n`) stands for "constraint `c` is in the set";
//! side clauses may use auxiliary variables `n..`. [`HittingInstance::solve_min`]
//! is an exact branch-and-bound; [`HittingInstance::solve_seed`] runs the
//! CDCL solver as a MARCO map and returns maximal unexplored seeds.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{ConstraintSet, Lit, Var};
use crate::solver::{Limits, Outcome, Solver};
use crate::symmetry::BreakingConstraints;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HittingError {
    #[error("sets to hit must be non-empty")]
    EmptySet,
    #[error("weights must be positive")]
    ZeroWeight,
    #[error("element {0} outside the universe")]
    OutOfUniverse(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct HittingStats {
    pub min_calls: u64,
    pub seed_calls: u64,
    pub nodes: u64,
    /// Lower bound at the root of the most recent `solve_min`.
    pub root_bound: u64,
}

#[derive(Debug)]
pub struct HittingInstance {
    n: usize,
    weights: Vec<u64>,
    sets: Vec<ConstraintSet>,
    seen_sets: HashSet<ConstraintSet>,
    /// Side clauses and blocking clauses, in insertion order.
    clauses: Vec<Vec<Lit>>,
    num_aux: usize,
    map: Option<Solver>,
    map_clauses: usize,
    map_sets: usize,
    exhausted: bool,
    pub stats: HittingStats,
}

impl HittingInstance {
    /// Unit weights over `0..n`.
    pub fn new(n: usize) -> Self {
        HittingInstance {
            n,
            weights: vec![1; n],
            sets: Vec::new(),
            seen_sets: HashSet::new(),
            clauses: Vec::new(),
            num_aux: 0,
            map: None,
            map_clauses: 0,
            map_sets: 0,
            exhausted: false,
            stats: HittingStats::default(),
        }
    }

    pub fn with_weights(weights: Vec<u64>) -> Result<Self, HittingError> {
        if weights.contains(&0) {
            return Err(HittingError::ZeroWeight);
        }
        let mut h = Self::new(weights.len());
        h.weights = weights;
        Ok(h)
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn sets(&self) -> &[ConstraintSet] {
        &self.sets
    }

    pub fn contains_set(&self, s: &ConstraintSet) -> bool {
        self.seen_sets.contains(s)
    }

    pub fn weight(&self, s: &ConstraintSet) -> u64 {
        s.iter().map(|&c| self.weights[c]).sum()
    }

    /// Adds a set every solution must intersect. Returns false when it was
    /// already present.
    pub fn add_set(&mut self, s: &ConstraintSet) -> Result<bool, HittingError> {
        if s.is_empty() {
            return Err(HittingError::EmptySet);
        }
        if let Some(&c) = s.iter().find(|&&c| c >= self.n) {
            return Err(HittingError::OutOfUniverse(c));
        }
        if !self.seen_sets.insert(s.clone()) {
            return Ok(false);
        }
        self.sets.push(s.clone());
        Ok(true)
    }

    /// Adds a clause over element variables and auxiliaries.
    pub fn add_side(&mut self, clause: &[Lit]) {
        for l in clause {
            let v = l.var().index();
            if v >= self.n {
                self.num_aux = self.num_aux.max(v + 1 - self.n);
            }
        }
        self.clauses.push(clause.to_vec());
    }

    pub fn add_breaking(&mut self, b: &BreakingConstraints) {
        for c in &b.clauses {
            let lits: Vec<Lit> = c.terms.iter().map(|t| t.lit).collect();
            self.add_side(&lits);
        }
    }

    /// Forbids every superset of `u`.
    pub fn block_up(&mut self, u: &ConstraintSet) {
        let lits: Vec<Lit> = u.iter().map(|&c| Var(c as u32).neg()).collect();
        self.add_side(&lits);
    }

    /// Forbids every subset of the complement of `c`: some element of `c`
    /// must be included.
    pub fn block_down(&mut self, c: &ConstraintSet) {
        let lits: Vec<Lit> = c.iter().map(|&x| Var(x as u32).pos()).collect();
        self.add_side(&lits);
    }

    fn all_clauses(&self) -> impl Iterator<Item = Vec<Lit>> + '_ {
        self.sets
            .iter()
            .map(|s| s.iter().map(|&c| Var(c as u32).pos()).collect())
            .chain(self.clauses.iter().cloned())
    }

    /// Minimum-weight set hitting every set and satisfying every clause;
    /// ties go to the lexicographically smallest sorted id list.
    pub fn solve_min(&mut self) -> Option<ConstraintSet> {
        self.stats.min_calls += 1;
        let clauses: Vec<Vec<Lit>> = self.all_clauses().collect();
        let mut bb = BranchBound {
            n: self.n,
            total: self.n + self.num_aux,
            weights: &self.weights,
            clauses: &clauses,
            sets: &self.sets,
            best: None,
            best_from_search: false,
            nodes: 0,
        };
        if let Some(g) = bb.greedy() {
            bb.best = Some((bb.cost(&g), g));
        }
        let mut vals = vec![None; self.n + self.num_aux];
        let out = if bb.propagate(&mut vals) {
            self.stats.root_bound = bb.bound(&vals).unwrap_or(u64::MAX);
            bb.search(vals, 0);
            bb.best.map(|(_, v)| to_set(&v, self.n))
        } else {
            None
        };
        self.stats.nodes += bb.nodes;
        if let Some(s) = &out {
            debug_assert!(self.sets.iter().all(|h| !h.is_disjoint(s)));
        }
        out
    }

    /// A maximal set that avoids every block and satisfies the side
    /// clauses, or `None` once the map is exhausted.
    pub fn solve_seed(&mut self) -> Option<ConstraintSet> {
        self.stats.seed_calls += 1;
        if self.exhausted {
            return None;
        }
        let total = self.n + self.num_aux;
        let solver = self.map.get_or_insert_with(|| Solver::new(total, 0));
        solver.reserve_vars(total);
        for v in 0..self.n {
            solver.set_phase(Var(v as u32), true);
        }
        for v in self.n..total {
            solver.set_phase(Var(v as u32), false);
        }
        for s in &self.sets[self.map_sets..] {
            let lits: Vec<Lit> = s.iter().map(|&c| Var(c as u32).pos()).collect();
            solver.add_clause(&lits);
        }
        self.map_sets = self.sets.len();
        for c in &self.clauses[self.map_clauses..] {
            solver.add_clause(c);
        }
        self.map_clauses = self.clauses.len();

        if solver.solve(&[], Limits::default()) != Outcome::Sat {
            self.exhausted = true;
            return None;
        }
        let read = |s: &Solver| -> ConstraintSet {
            (0..self.n)
                .filter(|&c| s.model_value(Var(c as u32).pos()))
                .collect()
        };
        let mut seed = read(solver);
        for c in 0..self.n {
            if seed.contains(&c) {
                continue;
            }
            let mut assume: Vec<Lit> = seed.iter().map(|&s| Var(s as u32).pos()).collect();
            assume.push(Var(c as u32).pos());
            if solver.solve(&assume, Limits::default()) == Outcome::Sat {
                seed = read(solver);
            }
        }
        Some(seed)
    }
}

fn to_set(vals: &[Option<bool>], n: usize) -> ConstraintSet {
    (0..n).filter(|&c| vals[c] == Some(true)).collect()
}

fn lit_value(vals: &[Option<bool>], l: Lit) -> Option<bool> {
    vals[l.var().index()].map(|b| b == l.is_positive())
}

struct BranchBound<'a> {
    n: usize,
    total: usize,
    weights: &'a [u64],
    clauses: &'a [Vec<Lit>],
    sets: &'a [ConstraintSet],
    best: Option<(u64, Vec<Option<bool>>)>,
    best_from_search: bool,
    nodes: u64,
}

impl BranchBound<'_> {
    fn cost(&self, vals: &[Option<bool>]) -> u64 {
        (0..self.n)
            .filter(|&c| vals[c] == Some(true))
            .map(|c| self.weights[c])
            .sum()
    }

    /// Unit propagation to a fixpoint; false on conflict.
    fn propagate(&self, vals: &mut [Option<bool>]) -> bool {
        loop {
            let mut changed = false;
            for cl in self.clauses {
                let mut free = None;
                let mut count = 0;
                let mut sat = false;
                for &l in cl {
                    match lit_value(vals, l) {
                        Some(true) => {
                            sat = true;
                            break;
                        }
                        Some(false) => {}
                        None => {
                            count += 1;
                            free = Some(l);
                        }
                    }
                }
                if sat {
                    continue;
                }
                match (count, free) {
                    (0, _) => return false,
                    (1, Some(l)) => {
                        vals[l.var().index()] = Some(l.is_positive());
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Cost so far plus a disjoint-sets bound for the sets not yet hit;
    /// `None` if some set can no longer be hit.
    fn bound(&self, vals: &[Option<bool>]) -> Option<u64> {
        let mut open: Vec<Vec<usize>> = Vec::new();
        for s in self.sets {
            if s.iter().any(|&c| vals[c] == Some(true)) {
                continue;
            }
            let free: Vec<usize> = s.iter().copied().filter(|&c| vals[c].is_none()).collect();
            if free.is_empty() {
                return None;
            }
            open.push(free);
        }
        open.sort_by_key(Vec::len);
        let mut used = vec![false; self.n];
        let mut lb = self.cost(vals);
        for s in open {
            if s.iter().any(|&c| used[c]) {
                continue;
            }
            lb += s.iter().map(|&c| self.weights[c]).min().unwrap_or(0);
            for c in s {
                used[c] = true;
            }
        }
        Some(lb)
    }

    /// Sets every free element false, propagates, sets remaining
    /// auxiliaries false, and checks all clauses.
    fn complete(&self, vals: &[Option<bool>]) -> Option<Vec<Option<bool>>> {
        let mut v = vals.to_vec();
        for x in v.iter_mut().take(self.n) {
            x.get_or_insert(false);
        }
        if !self.propagate(&mut v) {
            return None;
        }
        for x in v.iter_mut() {
            x.get_or_insert(false);
        }
        self.clauses
            .iter()
            .all(|cl| cl.iter().any(|&l| lit_value(&v, l) == Some(true)))
            .then_some(v)
    }

    /// Repeatedly includes the element hitting the most open sets.
    fn greedy(&self) -> Option<Vec<Option<bool>>> {
        let mut vals = vec![None; self.total];
        if !self.propagate(&mut vals) {
            return None;
        }
        loop {
            if let Some(done) = self.complete(&vals) {
                return Some(done);
            }
            // element hitting the most open sets
            let mut score = vec![0u32; self.n];
            for s in self.sets {
                if s.iter().any(|&c| vals[c] == Some(true)) {
                    continue;
                }
                for &c in s {
                    if vals[c].is_none() {
                        score[c] += 1;
                    }
                }
            }
            let pick = (0..self.n)
                .filter(|&c| vals[c].is_none())
                .max_by_key(|&c| (score[c], std::cmp::Reverse(c)))?;
            vals[pick] = Some(true);
            if !self.propagate(&mut vals) {
                return None;
            }
        }
    }

    /// Include-first search over element ids.
    fn search(&mut self, vals: Vec<Option<bool>>, next: usize) {
        self.nodes += 1;
        let Some(lb) = self.bound(&vals) else {
            return;
        };
        if let Some((best, _)) = &self.best {
            if lb > *best || (lb == *best && self.best_from_search) {
                return;
            }
        }
        if let Some(done) = self.complete(&vals) {
            let cost = self.cost(&done);
            let better = match &self.best {
                None => true,
                Some((b, _)) => cost < *b || (cost == *b && !self.best_from_search),
            };
            if better {
                self.best = Some((cost, done));
                self.best_from_search = true;
            }
            return;
        }
        let Some(x) = (next..self.n).find(|&c| vals[c].is_none()) else {
            return;
        };
        for value in [true, false] {
            let mut child = vals.clone();
            child[x] = Some(value);
            if self.propagate(&mut child) {
                self.search(child, x + 1);
            }
        }
    }
}
