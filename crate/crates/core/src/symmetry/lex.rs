//! Lex-leader breaking clauses over constraint-inclusion bits.
//!
//! A subset `U` is read as a bit string over constraints in the given order,
//! with `1` meaning "included". The clauses admit `U` only if no generator
//! maps it to a strictly larger string, so sets containing earlier
//! constraints are preferred.

use crate::formula::{LinConstraint, Lit, Var};

use super::SymGroup;

/// Clauses over variables `0..n` (constraint `c` is variable `c`) and
/// auxiliary variables `n..n + num_aux`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BreakingConstraints {
    pub clauses: Vec<LinConstraint>,
    pub num_constraints: usize,
    pub num_aux: usize,
}

impl BreakingConstraints {
    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Whether `u` extends to an assignment of the auxiliaries satisfying
    /// every clause. Auxiliaries take the least values the chain
    /// definitions force.
    pub fn admits(&self, u: &crate::formula::ConstraintSet) -> bool {
        let n = self.num_constraints;
        let mut val: Vec<Option<bool>> = (0..n + self.num_aux)
            .map(|v| if v < n { Some(u.contains(&v)) } else { None })
            .collect();
        loop {
            let mut changed = false;
            for c in &self.clauses {
                let mut unassigned = None;
                let mut count = 0;
                let mut sat = false;
                for t in &c.terms {
                    match val[t.lit.var().index()] {
                        Some(b) if b == t.lit.is_positive() => sat = true,
                        Some(_) => {}
                        None => {
                            count += 1;
                            unassigned = Some(t.lit);
                        }
                    }
                }
                if sat {
                    continue;
                }
                match (count, unassigned) {
                    (0, _) => return false,
                    (1, Some(l)) if l.is_positive() => {
                        val[l.var().index()] = Some(true);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        // remaining aux false; every clause must now hold
        self.clauses.iter().all(|c| {
            c.terms
                .iter()
                .any(|t| val[t.lit.var().index()].unwrap_or(false) == t.lit.is_positive())
        })
    }
}

pub fn natural_order(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Lex-leader clauses for every generator not already summarized by a row
/// matrix, plus successive-row clauses for every matrix. `order` lists the
/// constraint ids from most to least significant.
pub fn lex_leader_constraints(group: &SymGroup, order: &[usize]) -> BreakingConstraints {
    let n = group.num_constraints;
    let mut rank = vec![usize::MAX; n];
    for (i, &c) in order.iter().enumerate() {
        rank[c] = i;
    }
    for (c, r) in rank.iter_mut().enumerate() {
        if *r == usize::MAX {
            *r = order.len() + c;
        }
    }
    let mut out = BreakingConstraints {
        num_constraints: n,
        ..Default::default()
    };
    let cv = |c: usize| Var(c as u32);
    let push = |out: &mut BreakingConstraints, lits: Vec<Lit>| {
        let id = out.clauses.len();
        out.clauses
            .push(LinConstraint::clause(id, &lits).expect("distinct variables"));
    };

    for g in &group.generators {
        if group.matrices.iter().any(|m| m.covers(g)) {
            continue;
        }
        let inv = g.inverse();
        let mut positions: Vec<usize> = g.support().into_iter().collect();
        positions.sort_by_key(|&c| rank[c]);
        let mut compared: Vec<(usize, usize)> = Vec::new();
        for s in positions {
            let p = inv.image(s);
            if compared.contains(&(p, s)) {
                continue;
            }
            compared.push((s, p));
        }
        let mut prev: Option<Var> = None;
        let last = compared.len().saturating_sub(1);
        for (t, &(s, p)) in compared.iter().enumerate() {
            let guard: Vec<Lit> = prev.map(|e| e.neg()).into_iter().collect();
            let mut lits = guard.clone();
            lits.extend([cv(s).pos(), cv(p).neg()]);
            push(&mut out, lits);
            if t < last {
                let e = Var((n + out.num_aux) as u32);
                out.num_aux += 1;
                let mut both = guard.clone();
                both.extend([cv(s).neg(), cv(p).neg(), e.pos()]);
                push(&mut out, both);
                let mut neither = guard;
                neither.extend([cv(s).pos(), cv(p).pos(), e.pos()]);
                push(&mut out, neither);
                prev = Some(e);
            }
        }
    }

    for m in &group.matrices {
        let mut rows: Vec<&Vec<usize>> = m.rows().iter().collect();
        rows.sort_by_key(|r| r.iter().map(|&c| rank[c]).min());
        for w in rows.windows(2) {
            let (j, _) = w[0]
                .iter()
                .enumerate()
                .min_by_key(|&(_, &c)| rank[c])
                .expect("rows are non-empty");
            push(&mut out, vec![cv(w[0][j]).pos(), cv(w[1][j]).neg()]);
        }
    }
    out
}
