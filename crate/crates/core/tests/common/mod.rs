//! Exhaustive reference implementations: truth tables over all assignments
//! and all constraint subsets. Only for tiny instances.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symmus::bench::{gen_binpack, gen_php, gen_queens};
use symmus::formula::{ConstraintSet, Relation, Spec, Term, Var};

/// Satisfiability of every constraint subset, indexed by bit mask.
pub struct Brute {
    pub n: usize,
    sat: Vec<bool>,
}

fn holds(spec: &Spec, c: usize, assignment: u64) -> bool {
    let con = &spec.constraints[c];
    let lhs: i64 = con
        .terms
        .iter()
        .filter(|t| (assignment >> t.lit.var().index() & 1 == 1) == t.lit.is_positive())
        .map(|t| t.coef)
        .sum();
    match con.relation {
        Relation::Ge => lhs >= con.bound,
        Relation::Le => lhs <= con.bound,
        Relation::Eq => lhs == con.bound,
    }
}

pub fn mask(s: &ConstraintSet) -> usize {
    s.iter().fold(0, |m, &c| m | 1 << c)
}

pub fn unmask(m: usize) -> ConstraintSet {
    (0..usize::BITS as usize).filter(|i| m >> i & 1 == 1).collect()
}

impl Brute {
    pub fn new(spec: &Spec) -> Self {
        let n = spec.len();
        let v = spec.num_vars as usize;
        assert!(n <= 24 && v <= 20, "instance too large for exhaustive checks");
        let mut sat = vec![false; 1 << n];
        for a in 0u64..1 << v {
            let m = (0..n).filter(|&c| holds(spec, c, a)).fold(0, |m, c| m | 1 << c);
            sat[m] = true;
        }
        for i in 0..n {
            for m in 0..1usize << n {
                if m >> i & 1 == 1 && sat[m] {
                    sat[m & !(1 << i)] = true;
                }
            }
        }
        Brute { n, sat }
    }

    pub fn is_sat(&self, s: &ConstraintSet) -> bool {
        self.sat[mask(s)]
    }

    fn is_mus_mask(&self, m: usize) -> bool {
        !self.sat[m] && (0..self.n).all(|i| m >> i & 1 == 0 || self.sat[m & !(1 << i)])
    }

    pub fn is_mus(&self, s: &ConstraintSet) -> bool {
        self.is_mus_mask(mask(s))
    }

    pub fn muses(&self) -> BTreeSet<ConstraintSet> {
        (0..1usize << self.n)
            .filter(|&m| self.is_mus_mask(m))
            .map(unmask)
            .collect()
    }

    pub fn min_mus_size(&self) -> Option<usize> {
        (0..1usize << self.n)
            .filter(|&m| !self.sat[m])
            .map(|m| m.count_ones() as usize)
            .min()
    }

    /// Whether removing `c` from the full set restores satisfiability.
    pub fn is_correction(&self, c: &ConstraintSet) -> bool {
        self.sat[((1 << self.n) - 1) & !mask(c)]
    }

    pub fn is_mcs(&self, c: &ConstraintSet) -> bool {
        self.is_correction(c)
            && c.iter().all(|&x| {
                let mut smaller = c.clone();
                smaller.remove(&x);
                !self.is_correction(&smaller)
            })
    }
}

/// Small unsatisfiable specification with random coefficients.
pub fn random_unsat(seed: u64) -> Spec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let vars = rng.gen_range(3..=7u32);
        let m = rng.gen_range(4..=9);
        let mut spec = Spec::new(vars);
        for _ in 0..m {
            let k = rng.gen_range(1..=vars.min(4));
            let mut chosen: Vec<u32> = (0..vars).collect();
            for i in 0..k as usize {
                let j = rng.gen_range(i..chosen.len());
                chosen.swap(i, j);
            }
            let terms: Vec<Term> = chosen[..k as usize]
                .iter()
                .map(|&v| Term {
                    coef: rng.gen_range(1..=3),
                    lit: if rng.gen_bool(0.7) { Var(v).pos() } else { Var(v).neg() },
                })
                .collect();
            let total: i64 = terms.iter().map(|t| t.coef).sum();
            let rel = match rng.gen_range(0..5) {
                0 => Relation::Le,
                1 => Relation::Eq,
                _ => Relation::Ge,
            };
            let bound = rng.gen_range(0..=total);
            spec.add(terms, rel, bound, None).expect("distinct variables");
        }
        if !Brute::new(&spec).is_sat(&spec.all_ids()) {
            return spec;
        }
    }
}

/// The exhaustively checkable corpus: named unsatisfiable specifications.
pub fn corpus() -> Vec<(String, Spec)> {
    let mut out = Vec::new();
    for (p, h) in [(2, 1), (3, 1), (3, 2), (4, 1), (4, 2), (4, 3), (5, 2), (5, 3)] {
        let b = gen_php(p, h).unwrap();
        out.push((b.name(), b.spec));
    }
    for k in 1..=3 {
        let b = gen_queens(4, k).unwrap();
        out.push((b.name(), b.spec));
    }
    for (ratio, seed) in [(70, 0), (80, 1), (90, 2)] {
        let b = gen_binpack(2, ratio, seed).unwrap();
        out.push((b.name(), b.spec));
    }
    for seed in 0..10 {
        out.push((format!("random_{seed}"), random_unsat(seed)));
    }
    out
}

pub fn set(ids: &[usize]) -> ConstraintSet {
    ids.iter().copied().collect()
}
