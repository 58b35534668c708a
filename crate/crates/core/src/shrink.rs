//! Deletion-based MUS extraction, plain and with symmetric marking.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::formula::ConstraintSet;
use crate::oracle::{OracleError, SatResult, SolverCtx};
use crate::symmetry::{
    detect_restricted, stabilizes, symmetric_images, SymGroup, DEFAULT_NODE_BUDGET,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShrinkError {
    #[error("the seed subset is satisfiable")]
    Sat,
    #[error("resource limit reached; current core has {} constraints", core.len())]
    Budget { core: ConstraintSet },
    #[error(transparent)]
    Oracle(OracleError),
}

/// Which unmarked constraint is tested next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Descending,
    Ascending,
    Random(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShrinkConfig {
    pub order: Order,
    /// Re-detect symmetries of the current core after each mark.
    pub recompute: bool,
    /// Check every symmetric mark and the final result with extra oracle
    /// calls (not counted in the statistics).
    pub verify: bool,
}

impl Default for ShrinkConfig {
    fn default() -> Self {
        ShrinkConfig {
            order: Order::Descending,
            recompute: false,
            verify: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ShrinkStats {
    pub oracle_calls: u64,
    pub marks_direct: u64,
    pub marks_symmetric: u64,
    pub refinements: u64,
    pub detections: u64,
}

/// Working state: `marked` holds constraints known to be transition
/// constraints of `core`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ShrinkState {
    pub core: ConstraintSet,
    pub marked: ConstraintSet,
    pub stats: ShrinkStats,
}

fn rank_of(order: Order, n: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..n).collect();
    match order {
        Order::Descending => ids.reverse(),
        Order::Ascending => {}
        Order::Random(seed) => ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
    }
    let mut rank = vec![0; n];
    for (i, c) in ids.into_iter().enumerate() {
        rank[c] = i;
    }
    rank
}

fn call(
    ctx: &mut SolverCtx,
    st: &mut ShrinkState,
    subset: &ConstraintSet,
) -> Result<SatResult, ShrinkError> {
    st.stats.oracle_calls += 1;
    ctx.solve(subset).map_err(|e| match e {
        OracleError::Budget => ShrinkError::Budget {
            core: st.core.clone(),
        },
        e => ShrinkError::Oracle(e),
    })
}

fn without(u: &ConstraintSet, c: usize) -> ConstraintSet {
    let mut s = u.clone();
    s.remove(&c);
    s
}

/// Deletion-based shrinking: returns an MUS contained in `seed`.
pub fn shrink(
    ctx: &mut SolverCtx,
    seed: &ConstraintSet,
    cfg: &ShrinkConfig,
) -> Result<ShrinkState, ShrinkError> {
    run(ctx, seed, None, cfg)
}

/// Shrinking that also marks the images of each transition constraint under
/// the symmetries stabilizing the current core.
pub fn symm_shrink(
    ctx: &mut SolverCtx,
    seed: &ConstraintSet,
    group: &SymGroup,
    cfg: &ShrinkConfig,
) -> Result<ShrinkState, ShrinkError> {
    run(ctx, seed, Some(group), cfg)
}

fn run(
    ctx: &mut SolverCtx,
    seed: &ConstraintSet,
    group: Option<&SymGroup>,
    cfg: &ShrinkConfig,
) -> Result<ShrinkState, ShrinkError> {
    let rank = rank_of(cfg.order, ctx.spec().len());
    let mut st = ShrinkState {
        core: seed.clone(),
        ..Default::default()
    };
    match call(ctx, &mut st, seed)? {
        SatResult::Sat(_) => return Err(ShrinkError::Sat),
        SatResult::Unsat(core) => {
            if core != st.core {
                st.stats.refinements += 1;
            }
            st.core = core;
        }
    }
    let mut local: Option<SymGroup> = None;
    if group.is_some() && cfg.recompute {
        local = Some(redetect(ctx, &st.core, &mut st.stats));
    }

    while let Some(c) = st
        .core
        .iter()
        .copied()
        .filter(|c| !st.marked.contains(c))
        .min_by_key(|&c| rank[c])
    {
        let rest = without(&st.core, c);
        match call(ctx, &mut st, &rest)? {
            SatResult::Sat(_) => {
                st.marked.insert(c);
                st.stats.marks_direct += 1;
                if let Some(g) = local.as_ref().or(group) {
                    let images = images_of(g, &st.core, c);
                    for d in images {
                        if st.marked.insert(d) {
                            st.stats.marks_symmetric += 1;
                            if cfg.verify {
                                let check = ctx.is_sat(&without(&st.core, d)).map_err(ShrinkError::Oracle)?;
                                assert!(check, "symmetric mark {d} is not a transition constraint");
                            }
                        }
                    }
                    if cfg.recompute {
                        local = Some(redetect(ctx, &st.core, &mut st.stats));
                    }
                }
            }
            SatResult::Unsat(core) => {
                st.stats.refinements += 1;
                st.core = core;
                st.marked.retain(|m| st.core.contains(m));
            }
        }
    }

    if cfg.verify {
        for &c in &st.core {
            let sat = ctx.is_sat(&without(&st.core, c)).map_err(ShrinkError::Oracle)?;
            assert!(sat, "result is not minimal at {c}");
        }
    }
    Ok(st)
}

fn redetect(ctx: &SolverCtx, core: &ConstraintSet, stats: &mut ShrinkStats) -> SymGroup {
    stats.detections += 1;
    detect_restricted(ctx.spec(), core, DEFAULT_NODE_BUDGET / 10)
}

/// Images of transition constraint `c` of `u`: matrix cells first, then
/// generators that stabilize `u`.
fn images_of(g: &SymGroup, u: &ConstraintSet, c: usize) -> ConstraintSet {
    let mut out = ConstraintSet::new();
    for m in &g.matrices {
        out.extend(symmetric_images(m, u, c));
    }
    for pi in &g.generators {
        if stabilizes(pi, u) {
            out.insert(pi.image(c));
        }
    }
    out.remove(&c);
    out
}
