//! MUS enumeration with a map solver, optionally restricted to lex-leader
//! seeds and unrolled afterwards.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{eval_constraint, ConstraintSet, Truth};
use crate::hitting::HittingInstance;
use crate::oracle::{OracleError, SatResult, SolverCtx};
use crate::shrink::{shrink, symm_shrink, ShrinkConfig, ShrinkError};
use crate::symmetry::{lex_leader_constraints, natural_order, orbit, BreakingConstraints, SymGroup};

pub const DEFAULT_UNROLL_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MarcoError {
    #[error("grow called on an unsatisfiable subset")]
    GrowUnsat,
    #[error("lex restriction requested without a symmetry group")]
    NoGroup,
    #[error(transparent)]
    Oracle(OracleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShrinkBackend {
    Plain,
    Symm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarcoConfig {
    pub lex: bool,
    /// Constraint order for the lex-leader clauses; id order when absent.
    pub order: Option<Vec<usize>>,
    pub shrink: ShrinkBackend,
    pub max_muses: Option<usize>,
    pub deadline: Option<Instant>,
    /// Check every reported MUS for minimality with extra oracle calls.
    pub verify: bool,
}

impl Default for MarcoConfig {
    fn default() -> Self {
        MarcoConfig {
            lex: false,
            order: None,
            shrink: ShrinkBackend::Plain,
            max_muses: None,
            deadline: None,
            verify: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EnumStats {
    pub seeds: u64,
    pub grows: u64,
    pub shrinks: u64,
    pub oracle_calls: u64,
    /// Shrink results whose lex-leader representative could not be found
    /// within the orbit cap and were reported as is.
    pub uncanonical: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EnumResult {
    pub muses: Vec<ConstraintSet>,
    /// The map was exhausted.
    pub complete: bool,
    pub unrolled: Option<Vec<ConstraintSet>>,
    pub unroll_truncated: bool,
    pub stats: EnumStats,
}

fn oracle_err(e: OracleError) -> Option<MarcoError> {
    match e {
        OracleError::Budget => None,
        e => Some(MarcoError::Oracle(e)),
    }
}

/// Enumerates MUSes until the map is exhausted or a limit is reached.
/// `on_mus` sees each MUS as soon as it is found.
pub fn marco(
    ctx: &mut SolverCtx,
    group: Option<&SymGroup>,
    cfg: &MarcoConfig,
    mut on_mus: impl FnMut(&ConstraintSet),
) -> Result<EnumResult, MarcoError> {
    let n = ctx.spec().len();
    let calls_before = ctx.calls();
    let old_deadline = ctx.deadline();
    if cfg.deadline.is_some() {
        ctx.set_deadline(cfg.deadline);
    }
    let mut map = HittingInstance::new(n);
    let breaking = if cfg.lex {
        let g = group.ok_or(MarcoError::NoGroup)?;
        let order = cfg.order.clone().unwrap_or_else(|| natural_order(n));
        let b = lex_leader_constraints(g, &order);
        map.add_breaking(&b);
        Some(b)
    } else {
        None
    };
    let shrink_cfg = ShrinkConfig {
        verify: cfg.verify,
        ..Default::default()
    };
    let mut out = EnumResult::default();
    let mut seen = BTreeSet::new();
    let result = loop {
        if cfg.max_muses.is_some_and(|m| out.muses.len() >= m)
            || cfg.deadline.is_some_and(|d| Instant::now() >= d)
        {
            break Ok(());
        }
        let Some(seed) = map.solve_seed() else {
            out.complete = true;
            break Ok(());
        };
        out.stats.seeds += 1;
        let sat = match ctx.solve(&seed) {
            Ok(r) => r,
            Err(e) => break oracle_err(e).map_or(Ok(()), Err),
        };
        match sat {
            SatResult::Sat(_) => {
                out.stats.grows += 1;
                match grow(ctx, &seed) {
                    Ok(c) => map.block_down(&c),
                    Err(MarcoError::Oracle(OracleError::Budget)) => break Ok(()),
                    Err(e) => break Err(e),
                }
            }
            SatResult::Unsat(_) => {
                out.stats.shrinks += 1;
                let shrunk = match (cfg.shrink, group) {
                    (ShrinkBackend::Symm, Some(g)) => symm_shrink(ctx, &seed, g, &shrink_cfg),
                    _ => shrink(ctx, &seed, &shrink_cfg),
                };
                let mus = match shrunk {
                    Ok(st) => st.core,
                    Err(ShrinkError::Budget { .. }) => break Ok(()),
                    Err(ShrinkError::Oracle(e)) => break Err(MarcoError::Oracle(e)),
                    Err(ShrinkError::Sat) => unreachable!("seed was just found unsatisfiable"),
                };
                map.block_up(&mus);
                let report = match (&breaking, group) {
                    (Some(b), Some(g)) if !b.admits(&mus) => match lex_representative(&mus, g, b) {
                        Some(r) => {
                            map.block_up(&r);
                            r
                        }
                        None => {
                            out.stats.uncanonical += 1;
                            mus
                        }
                    },
                    _ => mus,
                };
                if seen.insert(report.clone()) {
                    on_mus(&report);
                    out.muses.push(report);
                }
            }
        }
    };
    out.stats.oracle_calls = ctx.calls() - calls_before;
    ctx.set_deadline(old_deadline);
    result?;
    if cfg.verify {
        for m in &out.muses {
            assert!(!ctx.is_sat(m).map_err(MarcoError::Oracle)?, "{m:?} is satisfiable");
            for &c in m {
                let mut rest = m.clone();
                rest.remove(&c);
                assert!(ctx.is_sat(&rest).map_err(MarcoError::Oracle)?, "{m:?} is not minimal");
            }
        }
    }
    Ok(out)
}

/// A member of the orbit of `u` admitted by the breaking clauses.
fn lex_representative(u: &ConstraintSet, g: &SymGroup, b: &BreakingConstraints) -> Option<ConstraintSet> {
    orbit(u, g, DEFAULT_UNROLL_CAP).sets.into_iter().find(|s| b.admits(s))
}

/// Greedily extends satisfiable `s` in id order and returns the complement
/// of the extension.
pub fn grow(ctx: &mut SolverCtx, s: &ConstraintSet) -> Result<ConstraintSet, MarcoError> {
    let mut alpha = match ctx.solve(s).map_err(MarcoError::Oracle)? {
        SatResult::Sat(a) => a,
        SatResult::Unsat(_) => return Err(MarcoError::GrowUnsat),
    };
    let mut m = s.clone();
    for c in 0..ctx.spec().len() {
        if m.contains(&c) {
            continue;
        }
        if eval_constraint(&ctx.spec().base.constraints[c], &alpha) == Truth::Satisfied {
            m.insert(c);
            continue;
        }
        m.insert(c);
        match ctx.solve(&m).map_err(MarcoError::Oracle)? {
            SatResult::Sat(a) => alpha = a,
            SatResult::Unsat(_) => {
                m.remove(&c);
            }
        }
    }
    Ok((0..ctx.spec().len()).filter(|c| !m.contains(c)).collect())
}

/// Union of the orbits of `muses`, deduplicated and sorted. The flag is set
/// when some orbit hit `cap`.
pub fn unroll(muses: &[ConstraintSet], group: &SymGroup, cap: usize) -> (Vec<ConstraintSet>, bool) {
    let mut all = BTreeSet::new();
    let mut truncated = false;
    for u in muses {
        let o = orbit(u, group, cap);
        truncated |= o.truncated;
        all.extend(o.sets);
    }
    (all.into_iter().collect(), truncated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::gen_php;
    use crate::formula::{half_reify, parse_spec};
    use crate::oracle::new_ctx;
    use crate::symmetry::detect;

    fn set(ids: &[usize]) -> ConstraintSet {
        ids.iter().copied().collect()
    }

    fn php42_muses() -> BTreeSet<ConstraintSet> {
        [
            set(&[0, 1, 2, 4, 5]),
            set(&[0, 1, 3, 4, 5]),
            set(&[0, 2, 3, 4, 5]),
            set(&[1, 2, 3, 4, 5]),
        ]
        .into()
    }

    #[test]
    fn php42_all_muses() {
        let h = half_reify(&gen_php(4, 2).unwrap().spec);
        let cfg = MarcoConfig {
            verify: true,
            ..Default::default()
        };
        let mut streamed = 0;
        let r = marco(&mut new_ctx(&h), None, &cfg, |_| streamed += 1).unwrap();
        assert!(r.complete);
        assert_eq!(streamed, 4);
        assert_eq!(r.muses.into_iter().collect::<BTreeSet<_>>(), php42_muses());
    }

    #[test]
    fn php42_lex_then_unroll() {
        let h = half_reify(&gen_php(4, 2).unwrap().spec);
        let g = detect(&h);
        for shrink in [ShrinkBackend::Plain, ShrinkBackend::Symm] {
            let cfg = MarcoConfig {
                lex: true,
                shrink,
                verify: true,
                ..Default::default()
            };
            let r = marco(&mut new_ctx(&h), Some(&g), &cfg, |_| {}).unwrap();
            assert!(r.complete);
            assert_eq!(r.muses, vec![set(&[0, 1, 2, 4, 5])]);
            let (all, truncated) = unroll(&r.muses, &g, DEFAULT_UNROLL_CAP);
            assert!(!truncated);
            assert_eq!(all.into_iter().collect::<BTreeSet<_>>(), php42_muses());
        }
    }

    #[test]
    fn satisfiable_spec_has_no_muses() {
        let h = half_reify(&parse_spec("+1 x1 >= 1 ;\n+1 x2 >= 1 ;").unwrap());
        let r = marco(&mut new_ctx(&h), None, &MarcoConfig::default(), |_| {}).unwrap();
        assert!(r.complete);
        assert!(r.muses.is_empty());
        assert_eq!(r.stats.seeds, 1);
        assert_eq!(r.stats.grows, 1);
    }

    #[test]
    fn max_muses_stops_early() {
        let h = half_reify(&gen_php(4, 2).unwrap().spec);
        let cfg = MarcoConfig {
            max_muses: Some(2),
            ..Default::default()
        };
        let r = marco(&mut new_ctx(&h), None, &cfg, |_| {}).unwrap();
        assert!(!r.complete);
        assert_eq!(r.muses.len(), 2);
    }

    #[test]
    fn lex_needs_group() {
        let h = half_reify(&gen_php(3, 2).unwrap().spec);
        let cfg = MarcoConfig {
            lex: true,
            ..Default::default()
        };
        assert_eq!(marco(&mut new_ctx(&h), None, &cfg, |_| {}), Err(MarcoError::NoGroup));
    }

    #[test]
    fn grow_leaves_satisfiable_complement() {
        let h = half_reify(&gen_php(4, 2).unwrap().spec);
        let mut ctx = new_ctx(&h);
        let c = grow(&mut ctx, &set(&[0, 1, 4, 5])).unwrap();
        assert!(c.is_subset(&set(&[2, 3])));
        assert!(matches!(c.len(), 1 | 2));
        let rest: ConstraintSet = (0..6).filter(|x| !c.contains(x)).collect();
        assert!(ctx.is_sat(&rest).unwrap());
        assert_eq!(grow(&mut ctx, &set(&[0, 1, 2, 4, 5])), Err(MarcoError::GrowUnsat));
        let sat = half_reify(&parse_spec("+1 x1 >= 1 ;").unwrap());
        assert!(grow(&mut new_ctx(&sat), &set(&[])).unwrap().is_empty());
    }

    #[test]
    fn unroll_identity_and_cap() {
        let u = vec![set(&[0, 1, 2, 4, 5])];
        assert_eq!(unroll(&u, &SymGroup::identity(6), 10), (u.clone(), false));
        let h = half_reify(&gen_php(4, 2).unwrap().spec);
        let (sets, truncated) = unroll(&u, &detect(&h), 2);
        assert!(truncated);
        assert_eq!(sets.len(), 2);
    }
}
