//! Assumption-based satisfiability oracle over a half-reified spec.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::formula::{
    eval_constraint, subset_assumptions, Assignment, ConstraintSet, FormulaError,
    HalfReifiedSpec, Lit, Spec, Truth, Var,
};
use crate::solver::{Limits, Outcome, Solver, SolverStats};

/// Conflicts spent by the search before the linear relaxation is tried.
const LP_PROBE_CONFLICTS: u64 = 1_000;
/// Right-hand sides are loosened by this much so that rounding in the LP
/// solver can only hide infeasibility, never invent it.
const LP_SLACK: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("resource limit reached before the oracle could decide")]
    Budget,
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// Outcome of one oracle call: a model of the assumed constraints, or a
/// subset of them that is already unsatisfiable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(Assignment),
    Unsat(ConstraintSet),
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn alpha(&self) -> Option<&Assignment> {
        match self {
            SatResult::Sat(a) => Some(a),
            SatResult::Unsat(_) => None,
        }
    }

    pub fn core(&self) -> Option<&ConstraintSet> {
        match self {
            SatResult::Unsat(c) => Some(c),
            SatResult::Sat(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub seed: u64,
    /// Also assume `~a_c` for every constraint outside the subset.
    pub negative_assumptions: bool,
    /// Per-call conflict budget.
    pub conflict_budget: Option<u64>,
    /// Re-solve every returned core and check it is unsatisfiable.
    pub check_cores: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            seed: 0,
            negative_assumptions: true,
            conflict_budget: None,
            check_cores: false,
        }
    }
}

/// Incremental oracle: learnt clauses persist across calls.
#[derive(Debug)]
pub struct SolverCtx {
    spec: Arc<HalfReifiedSpec>,
    solver: Solver,
    config: OracleConfig,
    deadline: Option<std::time::Instant>,
    calls: u64,
    lp_refutations: u64,
}

pub fn new_ctx(h: &HalfReifiedSpec) -> SolverCtx {
    SolverCtx::with_config(Arc::new(h.clone()), OracleConfig::default())
}

impl SolverCtx {
    pub fn with_config(spec: Arc<HalfReifiedSpec>, config: OracleConfig) -> Self {
        let mut solver = Solver::new(spec.num_vars() as usize, config.seed);
        for c in 0..spec.len() {
            for form in spec.guarded_forms(c) {
                solver.add_pb(&form);
            }
        }
        SolverCtx {
            spec,
            solver,
            config,
            deadline: None,
            calls: 0,
            lp_refutations: 0,
        }
    }

    pub fn spec(&self) -> &HalfReifiedSpec {
        &self.spec
    }

    pub fn shared_spec(&self) -> Arc<HalfReifiedSpec> {
        Arc::clone(&self.spec)
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    pub fn num_vars(&self) -> usize {
        self.solver.num_vars()
    }

    pub fn set_deadline(&mut self, deadline: Option<std::time::Instant>) {
        self.deadline = deadline;
    }

    pub fn deadline(&self) -> Option<std::time::Instant> {
        self.deadline
    }

    /// Number of `solve` calls issued through this context.
    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn solver_stats(&self) -> SolverStats {
        self.solver.stats
    }

    /// Calls answered by the linear relaxation rather than the search.
    pub fn lp_refutations(&self) -> u64 {
        self.lp_refutations
    }

    /// Search with a short conflict budget; if undecided, try refuting the
    /// linear relaxation of `subset`; otherwise keep searching.
    fn decide(&mut self, subset: &ConstraintSet, assumptions: &[Lit]) -> Decision {
        let budget = self.config.conflict_budget;
        let probe = budget.map_or(LP_PROBE_CONFLICTS, |b| b.min(LP_PROBE_CONFLICTS));
        let first = self.solver.solve(
            assumptions,
            Limits {
                conflicts: Some(probe),
                deadline: self.deadline,
            },
        );
        let outcome = match first {
            Outcome::Unknown if budget.is_none_or(|b| b > probe) => {
                if lp_infeasible(&self.spec.base, subset) {
                    self.lp_refutations += 1;
                    return Decision::Unsat(subset.clone());
                }
                self.solver.solve(
                    assumptions,
                    Limits {
                        conflicts: budget.map(|b| b - probe),
                        deadline: self.deadline,
                    },
                )
            }
            o => o,
        };
        match outcome {
            Outcome::Sat => Decision::Sat,
            Outcome::Unknown => Decision::Unknown,
            Outcome::Unsat => {
                let by_var: HashMap<Var, usize> = subset
                    .iter()
                    .map(|&c| (self.spec.indicator(c), c))
                    .collect();
                Decision::Unsat(
                    self.solver
                        .core()
                        .iter()
                        .filter(|l| l.is_positive())
                        .filter_map(|l| by_var.get(&l.var()).copied())
                        .collect(),
                )
            }
        }
    }

    /// Tests whether the constraints in `subset` are jointly satisfiable.
    pub fn solve(&mut self, subset: &ConstraintSet) -> Result<SatResult, OracleError> {
        let assumptions = subset_assumptions(&self.spec, subset, self.config.negative_assumptions)?;
        if self.deadline.is_some_and(|d| std::time::Instant::now() >= d) {
            return Err(OracleError::Budget);
        }
        self.calls += 1;
        match self.decide(subset, &assumptions) {
            Decision::Unknown => Err(OracleError::Budget),
            Decision::Sat => {
                let n = self.spec.num_base_vars();
                let alpha = Assignment::from_lits(
                    (0..n).map(|v| Lit::new(Var(v), self.solver.model_value(Var(v).pos()))),
                )
                .expect("a model assigns each variable once");
                debug_assert!(subset.iter().all(|&c| {
                    eval_constraint(&self.spec.base.constraints[c], &alpha) == Truth::Satisfied
                }));
                Ok(SatResult::Sat(alpha))
            }
            Decision::Unsat(core) => {
                debug_assert!(core.is_subset(subset));
                if self.config.check_cores && core != *subset {
                    let again = subset_assumptions(&self.spec, &core, false)?;
                    let check = self.decide(&core, &again);
                    assert!(!matches!(check, Decision::Sat), "oracle core {core:?} is satisfiable");
                }
                Ok(SatResult::Unsat(core))
            }
        }
    }

    /// Satisfiability only, for callers that do not need the model or core.
    pub fn is_sat(&mut self, subset: &ConstraintSet) -> Result<bool, OracleError> {
        Ok(self.solve(subset)?.is_sat())
    }
}

enum Decision {
    Sat,
    Unsat(ConstraintSet),
    Unknown,
}

/// True when the 0/1 linear relaxation of `subset` has no solution, which
/// refutes the subset itself.
fn lp_infeasible(spec: &Spec, subset: &ConstraintSet) -> bool {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let mut vars = HashMap::new();
    for &c in subset {
        for form in spec.constraints[c].ge_forms() {
            let mut rhs = form.degree as f64 - LP_SLACK;
            let mut expr = Vec::with_capacity(form.terms.len());
            for &(w, l) in &form.terms {
                let x = *vars
                    .entry(l.var())
                    .or_insert_with(|| lp.add_var(0.0, (0.0, 1.0)));
                if l.is_positive() {
                    expr.push((x, w as f64));
                } else {
                    rhs -= w as f64;
                    expr.push((x, -(w as f64)));
                }
            }
            lp.add_constraint(expr, ComparisonOp::Ge, rhs);
        }
    }
    matches!(lp.solve(), Err(microlp::Error::Infeasible))
}
