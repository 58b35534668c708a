//! Property tests against the exhaustive reference in `common`.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::{mask, Brute};
use symmus::formula::{half_reify, parse_spec, write_spec, ConstraintSet, Relation, Spec, Term, Var};
use symmus::hitting::HittingInstance;
use symmus::marco::{marco, unroll, MarcoConfig};
use symmus::ocus::{ocus, OcusConfig};
use symmus::oracle::{new_ctx, SatResult};
use symmus::shrink::{shrink, symm_shrink, ShrinkConfig};
use symmus::symmetry::{
    detect, lex_leader_constraints, natural_order, orbit, parse_symmetries, write_symmetries, ConstraintPerm,
    SymGroup,
};

type RawConstraint = (Vec<(u32, i64, bool)>, u8, i64);

fn raw_constraint(vars: u32) -> impl Strategy<Value = RawConstraint> {
    (
        prop::collection::vec((0..vars, 1i64..=3, prop::bool::weighted(0.7)), 1..=4),
        0u8..5,
        0i64..=12,
    )
}

fn build(vars: u32, raw: &[RawConstraint]) -> Spec {
    let mut spec = Spec::new(vars);
    for (terms, rel, bound) in raw {
        let mut seen = BTreeSet::new();
        let terms: Vec<Term> = terms
            .iter()
            .filter(|(v, _, _)| seen.insert(*v))
            .map(|&(v, coef, pos)| Term {
                coef,
                lit: if pos { Var(v).pos() } else { Var(v).neg() },
            })
            .collect();
        let total: i64 = terms.iter().map(|t| t.coef).sum();
        let rel = match rel {
            0 => Relation::Le,
            1 => Relation::Eq,
            _ => Relation::Ge,
        };
        spec.add(terms, rel, bound % (total + 1), None).unwrap();
    }
    spec
}

/// Random specifications, some satisfiable.
fn any_spec() -> impl Strategy<Value = Spec> {
    (2u32..=6).prop_flat_map(|vars| {
        prop::collection::vec(raw_constraint(vars), 2..=8).prop_map(move |raw| build(vars, &raw))
    })
}

/// Specifications closed under a variable permutation: every constraint
/// also appears with its variables relabeled, so detection has something
/// to find.
fn symmetric_spec() -> impl Strategy<Value = Spec> {
    (3u32..=6).prop_flat_map(|vars| {
        (
            prop::collection::vec(raw_constraint(vars), 1..=4),
            Just((0..vars).collect::<Vec<u32>>()).prop_shuffle(),
        )
            .prop_map(move |(raw, perm)| {
                let mut all = raw.clone();
                for (terms, rel, bound) in &raw {
                    let image = terms.iter().map(|&(v, c, p)| (perm[v as usize], c, p)).collect();
                    all.push((image, *rel, *bound));
                }
                build(vars, &all)
            })
    })
}

fn unsat_spec() -> impl Strategy<Value = Spec> {
    any_spec().prop_filter("unsatisfiable", |s| !Brute::new(s).is_sat(&s.all_ids()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn oracle_agrees_with_truth_table(spec in any_spec(), picks in prop::collection::vec(any::<u64>(), 8)) {
        let brute = Brute::new(&spec);
        let h = half_reify(&spec);
        let mut ctx = new_ctx(&h);
        for p in picks {
            let s: ConstraintSet = (0..spec.len()).filter(|i| p >> i & 1 == 1).collect();
            match ctx.solve(&s).unwrap() {
                SatResult::Sat(alpha) => {
                    prop_assert!(brute.is_sat(&s));
                    for &c in &s {
                        prop_assert_eq!(
                            symmus::formula::eval_constraint(&spec.constraints[c], &alpha),
                            symmus::formula::Truth::Satisfied
                        );
                    }
                }
                SatResult::Unsat(core) => {
                    prop_assert!(!brute.is_sat(&s));
                    prop_assert!(core.is_subset(&s));
                    prop_assert!(!brute.is_sat(&core));
                }
            }
        }
    }

    #[test]
    fn detected_generators_preserve_satisfiability(spec in symmetric_spec(), picks in prop::collection::vec(any::<u64>(), 200)) {
        let brute = Brute::new(&spec);
        let g = detect(&half_reify(&spec));
        for lg in &g.literal_generators {
            prop_assert!(lg.commutes_with_negation());
        }
        for pi in g.all_generators() {
            for &p in &picks {
                let c: ConstraintSet = (0..spec.len()).filter(|i| p >> i & 1 == 1).collect();
                prop_assert_eq!(brute.is_sat(&c), brute.is_sat(&pi.apply(&c)));
            }
        }
    }

    #[test]
    fn symmetric_images_of_muses_are_muses(spec in symmetric_spec()) {
        let brute = Brute::new(&spec);
        prop_assume!(!brute.is_sat(&spec.all_ids()));
        let g = detect(&half_reify(&spec));
        for m in brute.muses() {
            for img in orbit(&m, &g, 200).sets {
                prop_assert!(brute.is_mus(&img));
            }
        }
    }

    #[test]
    fn shrink_returns_muses(spec in unsat_spec()) {
        let brute = Brute::new(&spec);
        let h = half_reify(&spec);
        let g = detect(&h);
        let cfg = ShrinkConfig { verify: true, ..Default::default() };
        let a = shrink(&mut new_ctx(&h), &spec.all_ids(), &cfg).unwrap();
        prop_assert!(brute.is_mus(&a.core));
        let b = symm_shrink(&mut new_ctx(&h), &spec.all_ids(), &g, &cfg).unwrap();
        prop_assert!(brute.is_mus(&b.core));
    }

    #[test]
    fn ocus_is_optimal(spec in unsat_spec(), weights in prop::collection::vec(1u64..=4, 8)) {
        let brute = Brute::new(&spec);
        let h = half_reify(&spec);
        let n = spec.len();
        let r = ocus(&mut new_ctx(&h), &SymGroup::identity(n), &OcusConfig::default()).unwrap();
        prop_assert_eq!(Some(r.mus.len()), brute.min_mus_size());
        prop_assert!(!brute.is_sat(&r.mus));

        let w = weights[..n].to_vec();
        let cfg = OcusConfig { weights: Some(w.clone()), verify: true, ..Default::default() };
        let r = ocus(&mut new_ctx(&h), &SymGroup::identity(n), &cfg).unwrap();
        let cost = |m: usize| (0..n).filter(|i| m >> i & 1 == 1).map(|i| w[i]).sum::<u64>();
        let best = (0..1usize << n)
            .filter(|&m| !brute.is_sat(&common::unmask(m)))
            .map(cost)
            .min();
        prop_assert_eq!(Some(r.cost), best);
        prop_assert_eq!(cost(mask(&r.mus)), r.cost);
    }

    #[test]
    fn lex_ocus_keeps_the_optimum(spec in symmetric_spec()) {
        let brute = Brute::new(&spec);
        prop_assume!(!brute.is_sat(&spec.all_ids()));
        let h = half_reify(&spec);
        let g = detect(&h);
        let b = lex_leader_constraints(&g, &natural_order(spec.len()));
        for cfg in [OcusConfig::lex(), OcusConfig::lex_enumerate(5), OcusConfig::enumerate(50)] {
            let r = ocus(&mut new_ctx(&h), &g, &cfg).unwrap();
            prop_assert_eq!(Some(r.mus.len()), brute.min_mus_size());
            prop_assert!(!brute.is_sat(&r.mus));
            if cfg.use_lex {
                prop_assert!(b.admits(&r.mus));
            }
        }
    }

    #[test]
    fn marco_enumerates_every_mus(spec in unsat_spec()) {
        let brute = Brute::new(&spec);
        let h = half_reify(&spec);
        let r = marco(&mut new_ctx(&h), None, &MarcoConfig::default(), |_| {}).unwrap();
        prop_assert!(r.complete);
        let got: BTreeSet<ConstraintSet> = r.muses.iter().cloned().collect();
        prop_assert_eq!(got.len(), r.muses.len());
        prop_assert_eq!(got, brute.muses());
    }

    #[test]
    fn lex_marco_unrolls_to_every_mus(spec in symmetric_spec()) {
        let brute = Brute::new(&spec);
        prop_assume!(!brute.is_sat(&spec.all_ids()));
        let h = half_reify(&spec);
        let g = detect(&h);
        let cfg = MarcoConfig { lex: true, verify: true, ..Default::default() };
        let r = marco(&mut new_ctx(&h), Some(&g), &cfg, |_| {}).unwrap();
        prop_assert!(r.complete);
        let b = lex_leader_constraints(&g, &natural_order(spec.len()));
        if r.stats.uncanonical == 0 {
            for m in &r.muses {
                prop_assert!(b.admits(m));
            }
        }
        let (all, truncated) = unroll(&r.muses, &g, 100_000);
        prop_assert!(!truncated);
        let all: BTreeSet<ConstraintSet> = all.into_iter().collect();
        prop_assert_eq!(all, brute.muses());
    }

    #[test]
    fn hitting_sets_are_minimum(
        n in 2usize..=9,
        sets in prop::collection::vec(prop::collection::btree_set(0usize..9, 1..=4), 1..=8),
        weights in prop::collection::vec(1u64..=5, 9),
        cycle in prop::collection::vec(0usize..9, 2..=4),
    ) {
        let sets: Vec<ConstraintSet> = sets
            .into_iter()
            .map(|s| s.into_iter().filter(|&x| x < n).collect::<ConstraintSet>())
            .filter(|s| !s.is_empty())
            .collect();
        let mut cyc: Vec<usize> = Vec::new();
        for x in cycle.into_iter().filter(|&x| x < n) {
            if !cyc.contains(&x) {
                cyc.push(x);
            }
        }
        let w = weights[..n].to_vec();
        let mut gens = Vec::new();
        if cyc.len() >= 2 {
            gens.push(ConstraintPerm::from_cycles(n, &[cyc]).unwrap());
        }
        let group = SymGroup { num_constraints: n, generators: gens, ..Default::default() };
        let b = lex_leader_constraints(&group, &natural_order(n));
        for lex in [false, true] {
            let mut hs = HittingInstance::with_weights(w.clone()).unwrap();
            for s in &sets {
                hs.add_set(s).unwrap();
            }
            if lex {
                hs.add_breaking(&b);
            }
            let feasible = |m: usize| {
                let u = common::unmask(m);
                sets.iter().all(|s| !s.is_disjoint(&u)) && (!lex || b.admits(&u))
            };
            let cost = |m: usize| (0..n).filter(|i| m >> i & 1 == 1).map(|i| w[i]).sum::<u64>();
            let best = (0..1usize << n).filter(|&m| feasible(m)).map(cost).min();
            let got = hs.solve_min();
            prop_assert_eq!(got.as_ref().map(|u| hs.weight(u)), best);
            if let Some(u) = got {
                prop_assert!(feasible(mask(&u)));
            }
        }
    }

    #[test]
    fn lex_clauses_admit_every_orbit_leader(
        n in 3usize..=7,
        raw in prop::collection::vec(prop::collection::vec(0usize..7, 2..=4), 1..=3),
        order_seed in Just((0..7usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let gens: Vec<ConstraintPerm> = raw
            .into_iter()
            .filter_map(|c| {
                let mut cyc = Vec::new();
                for x in c.into_iter().filter(|&x| x < n) {
                    if !cyc.contains(&x) {
                        cyc.push(x);
                    }
                }
                (cyc.len() >= 2).then(|| ConstraintPerm::from_cycles(n, &[cyc]).unwrap())
            })
            .collect();
        let group = SymGroup { num_constraints: n, generators: gens, ..Default::default() };
        let order: Vec<usize> = order_seed.into_iter().filter(|&x| x < n).collect();
        let b = lex_leader_constraints(&group, &order);
        for m in 0..1usize << n {
            let u = common::unmask(m);
            let o = orbit(&u, &group, 10_000);
            let key = |s: &ConstraintSet| order.iter().map(|c| s.contains(c)).collect::<Vec<_>>();
            let leader = o.sets.iter().max_by_key(|s| key(s)).unwrap();
            prop_assert!(b.admits(leader));
        }
    }

    #[test]
    fn spec_and_symmetry_files_round_trip(spec in symmetric_spec()) {
        let text = write_spec(&spec);
        let back = parse_spec(&text).unwrap();
        prop_assert_eq!(&back.constraints, &spec.constraints);
        let g = detect(&half_reify(&spec));
        let sym = write_symmetries(&g, &spec);
        let g2 = parse_symmetries(&sym, &spec).unwrap();
        prop_assert_eq!(&g2.generators, &g.generators);
        prop_assert_eq!(g2.matrices.len(), g.matrices.len());
    }
}
