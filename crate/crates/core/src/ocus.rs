//! Optimal constrained unsatisfiable subsets by implicit hitting sets.

use serde::Serialize;
use thiserror::Error;

use crate::formula::{eval_constraint, Assignment, ConstraintSet, Truth};
use crate::hitting::{HittingInstance, HittingStats};
use crate::oracle::{OracleError, SatResult, SolverCtx};
use crate::symmetry::{lex_leader_constraints, natural_order, RowMatrix, SymGroup};

pub const DEFAULT_ENUM_CAP: usize = 50;
pub const DEFAULT_LEX_ENUM_CAP: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OcusError {
    #[error("the specification is satisfiable")]
    Sat,
    #[error("no subset satisfies the breaking constraints")]
    Infeasible,
    #[error("resource limit reached after {iterations} iterations ({h_size} correction subsets)")]
    Budget { iterations: u64, h_size: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Oracle(OracleError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OcusConfig {
    /// Restrict hitting sets with lex-leader clauses.
    pub use_lex: bool,
    /// Add symmetric images of each correction subset.
    pub dynamic: bool,
    /// Maximum number of symmetric images added per iteration.
    pub mcs_cap: usize,
    /// Per-constraint costs; unit costs when absent.
    pub weights: Option<Vec<u64>>,
    /// Constraint order for the lex-leader clauses; id order when absent.
    pub order: Option<Vec<usize>>,
    /// Check every correction subset with an extra oracle call.
    pub verify: bool,
}

impl Default for OcusConfig {
    fn default() -> Self {
        OcusConfig {
            use_lex: false,
            dynamic: false,
            mcs_cap: DEFAULT_ENUM_CAP,
            weights: None,
            order: None,
            verify: false,
        }
    }
}

impl OcusConfig {
    pub fn lex() -> Self {
        OcusConfig {
            use_lex: true,
            ..Default::default()
        }
    }

    pub fn enumerate(cap: usize) -> Self {
        OcusConfig {
            dynamic: true,
            mcs_cap: cap,
            ..Default::default()
        }
    }

    pub fn lex_enumerate(cap: usize) -> Self {
        OcusConfig {
            use_lex: true,
            dynamic: true,
            mcs_cap: cap,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OcusOutcome {
    pub mus: ConstraintSet,
    pub cost: u64,
    pub iterations: u64,
    pub h_size: usize,
    pub oracle_calls: u64,
    pub symmetric_mcses: u64,
    pub hitting: HittingStats,
}

fn oracle(ctx: &mut SolverCtx, s: &ConstraintSet, it: u64, h: usize) -> Result<SatResult, OcusError> {
    ctx.solve(s).map_err(|e| match e {
        OracleError::Budget => OcusError::Budget {
            iterations: it,
            h_size: h,
        },
        e => OcusError::Oracle(e),
    })
}

/// Constraints of the whole specification that `alpha` violates.
fn violated(ctx: &SolverCtx, alpha: &Assignment) -> ConstraintSet {
    ctx.spec()
        .base
        .constraints
        .iter()
        .filter(|c| eval_constraint(c, alpha) != Truth::Satisfied)
        .map(|c| c.id)
        .collect()
}

/// An unsatisfiable subset of minimum cost among those admitted by the
/// lex-leader clauses (when enabled).
pub fn ocus(ctx: &mut SolverCtx, group: &SymGroup, cfg: &OcusConfig) -> Result<OcusOutcome, OcusError> {
    if cfg.dynamic && cfg.mcs_cap == 0 {
        return Err(OcusError::Config("a symmetric-image cap of 0 disables enumeration".into()));
    }
    let n = ctx.spec().len();
    let mut h = match &cfg.weights {
        Some(w) if w.len() != n => {
            return Err(OcusError::Config(format!("{} weights for {n} constraints", w.len())))
        }
        Some(w) => HittingInstance::with_weights(w.clone())
            .map_err(|e| OcusError::Config(e.to_string()))?,
        None => HittingInstance::new(n),
    };
    if cfg.use_lex {
        let order = cfg.order.clone().unwrap_or_else(|| natural_order(n));
        h.add_breaking(&lex_leader_constraints(group, &order));
    }
    let calls_before = ctx.calls();
    let mut iterations = 0u64;
    let mut symmetric = 0u64;
    loop {
        iterations += 1;
        let s = h.solve_min().ok_or(OcusError::Infeasible)?;
        let alpha = match oracle(ctx, &s, iterations, h.sets().len())? {
            SatResult::Unsat(_) => {
                return Ok(OcusOutcome {
                    cost: h.weight(&s),
                    mus: s,
                    iterations,
                    h_size: h.sets().len(),
                    oracle_calls: ctx.calls() - calls_before,
                    symmetric_mcses: symmetric,
                    hitting: h.stats,
                })
            }
            SatResult::Sat(alpha) => alpha,
        };
        let cap = if cfg.dynamic { cfg.mcs_cap } else { 0 };
        let k = grow_corrections(ctx, &s, alpha, group, cap, &h, iterations)?;
        for (c, is_image) in k {
            if cfg.verify {
                let rest: ConstraintSet = (0..n).filter(|x| !c.contains(x)).collect();
                assert!(ctx.is_sat(&rest).map_err(OcusError::Oracle)?, "{c:?} is not a correction subset");
            }
            if h.add_set(&c).map_err(|_| OcusError::Sat)? && is_image {
                symmetric += 1;
            }
        }
    }
}

/// Correction subsets from repeatedly growing `s` (disjoint by
/// construction), each followed by up to `cap` symmetric images in total.
/// Sets already in `known` are skipped.
pub fn corr_subsets(
    ctx: &mut SolverCtx,
    s: &ConstraintSet,
    group: &SymGroup,
    cap: usize,
    known: &HittingInstance,
) -> Result<Vec<ConstraintSet>, OcusError> {
    let alpha = match oracle(ctx, s, 0, known.sets().len())? {
        SatResult::Sat(a) => a,
        SatResult::Unsat(_) => {
            return Err(OcusError::Config("the subset to grow is unsatisfiable".into()))
        }
    };
    Ok(grow_corrections(ctx, s, alpha, group, cap, known, 0)?
        .into_iter()
        .map(|(c, _)| c)
        .collect())
}

fn grow_corrections(
    ctx: &mut SolverCtx,
    s: &ConstraintSet,
    mut alpha: Assignment,
    group: &SymGroup,
    cap: usize,
    known: &HittingInstance,
    iteration: u64,
) -> Result<Vec<(ConstraintSet, bool)>, OcusError> {
    let mut out: Vec<(ConstraintSet, bool)> = Vec::new();
    let mut grown = s.clone();
    let mut budget = cap;
    loop {
        let c = violated(ctx, &alpha);
        if c.is_empty() {
            return Err(OcusError::Sat);
        }
        grown.extend(&c);
        let fresh = |x: &ConstraintSet, out: &[(ConstraintSet, bool)]| {
            !known.contains_set(x) && out.iter().all(|(y, _)| y != x)
        };
        if fresh(&c, &out) {
            out.push((c.clone(), false));
        }
        let imgs = mcs_images(group, &c, budget, |x| !fresh(x, &out));
        budget -= imgs.len();
        for img in imgs {
            grown.extend(&img);
            out.push((img, true));
        }
        match oracle(ctx, &grown, iteration, known.sets().len())? {
            SatResult::Sat(a) => alpha = a,
            SatResult::Unsat(_) => return Ok(out),
        }
    }
}

/// Up to `cap` distinct symmetric images of correction subset `c`, other
/// than `c` itself and sets for which `skip` holds.
pub fn mcs_images(
    group: &SymGroup,
    c: &ConstraintSet,
    cap: usize,
    skip: impl Fn(&ConstraintSet) -> bool,
) -> Vec<ConstraintSet> {
    let mut out: Vec<ConstraintSet> = Vec::new();
    if cap == 0 {
        return out;
    }
    for img in images(group, c) {
        if !skip(&img) && !out.contains(&img) {
            out.push(img);
            if out.len() == cap {
                break;
            }
        }
    }
    out
}

/// Lazily enumerated images of `c`: all row rearrangements within each
/// matrix, then one application of each generator.
fn images<'a>(group: &'a SymGroup, c: &'a ConstraintSet) -> impl Iterator<Item = ConstraintSet> + 'a {
    group
        .matrices
        .iter()
        .flat_map(move |m| MatrixImages::new(m, c))
        .chain(group.generators.iter().map(move |g| g.apply(c)))
        .filter(move |img| img != c)
}

/// Every set obtained from `c` by permuting the rows of `m`, in
/// lexicographic order of the row-pattern sequence.
struct MatrixImages<'a> {
    m: &'a RowMatrix,
    outside: ConstraintSet,
    patterns: Vec<Vec<bool>>,
    done: bool,
}

impl<'a> MatrixImages<'a> {
    fn new(m: &'a RowMatrix, c: &ConstraintSet) -> Self {
        let mut patterns: Vec<Vec<bool>> = m
            .rows()
            .iter()
            .map(|row| row.iter().map(|x| c.contains(x)).collect())
            .collect();
        let touched = patterns.iter().any(|p| p.iter().any(|&b| b));
        patterns.sort();
        let cells: ConstraintSet = m.cells().collect();
        MatrixImages {
            m,
            outside: c.difference(&cells).copied().collect(),
            patterns,
            done: !touched,
        }
    }
}

impl Iterator for MatrixImages<'_> {
    type Item = ConstraintSet;

    fn next(&mut self) -> Option<ConstraintSet> {
        if self.done {
            return None;
        }
        let mut out = self.outside.clone();
        for (row, pat) in self.m.rows().iter().zip(&self.patterns) {
            out.extend(row.iter().zip(pat).filter(|(_, &b)| b).map(|(&x, _)| x));
        }
        self.done = !next_permutation(&mut self.patterns);
        Some(out)
    }
}

fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
