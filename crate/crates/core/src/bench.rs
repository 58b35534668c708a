//! Unsatisfiable benchmark families with their symmetry groups.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::formula::{half_reify, Relation, Spec, Term, Var};
use crate::oracle::{OracleConfig, SolverCtx};
use crate::symmetry::{ConstraintPerm, RowMatrix, SymGroup};

/// Instances with at most this many variables are also refuted by the
/// oracle at generation time; larger ones rely on their counting argument.
const ORACLE_CHECK_VARS: u32 = 40;
const BINPACK_CAPACITY: i64 = 25;
const BINPACK_RETRIES: usize = 32;
const BINPACK_CONFLICTS: u64 = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BenchError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("generated instance is satisfiable")]
    Satisfiable,
    #[error("no unsatisfiable instance after {0} attempts")]
    RetriesExhausted(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Php,
    Queens,
    Binpack,
}

#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub family: Family,
    pub params: Vec<u64>,
    pub seed: u64,
    pub spec: Spec,
    pub known_group: SymGroup,
}

impl BenchInstance {
    pub fn name(&self) -> String {
        let family = match self.family {
            Family::Php => "php",
            Family::Queens => "queens",
            Family::Binpack => "binpack",
        };
        let mut name = family.to_string();
        for p in &self.params {
            name.push('_');
            name.push_str(&p.to_string());
        }
        if self.family == Family::Binpack {
            name.push_str(&format!("_s{}", self.seed));
        }
        name
    }
}

fn unit(v: u32) -> Term {
    Term {
        coef: 1,
        lit: Var(v).pos(),
    }
}

/// `Some(true)` when refuted, `Some(false)` when satisfiable, `None` when
/// the conflict budget ran out.
fn oracle_unsat(spec: &Spec, budget: Option<u64>) -> Option<bool> {
    let h = half_reify(spec);
    let cfg = OracleConfig {
        conflict_budget: budget,
        ..OracleConfig::default()
    };
    let mut ctx = SolverCtx::with_config(std::sync::Arc::new(h), cfg);
    ctx.is_sat(&spec.all_ids()).ok().map(|sat| !sat)
}

fn adjacent_swaps(n: usize, ids: &[usize]) -> Vec<ConstraintPerm> {
    ids.windows(2)
        .map(|w| ConstraintPerm::swaps(n, [(w[0], w[1])]))
        .collect()
}

fn single_column(ids: &[usize]) -> RowMatrix {
    RowMatrix::new(ids.iter().map(|&c| vec![c]).collect()).expect("distinct ids")
}

/// Pigeonhole: `p` pigeons (`P1..Pp`, at least one hole each) and `h`
/// holes (`H1..Hh`, at most one pigeon each). Variable `x_ij` is
/// `(i - 1) * h + (j - 1)`.
pub fn gen_php(p: usize, h: usize) -> Result<BenchInstance, BenchError> {
    if h < 1 || p <= h {
        return Err(BenchError::InvalidParams(format!("need p > h >= 1, got p={p}, h={h}")));
    }
    let x = |i: usize, j: usize| (i * h + j) as u32;
    let mut spec = Spec::new((p * h) as u32);
    for i in 0..p {
        let terms = (0..h).map(|j| unit(x(i, j))).collect();
        spec.add(terms, Relation::Ge, 1, Some(format!("P{}", i + 1)))
            .expect("well-formed");
    }
    for j in 0..h {
        let terms = (0..p).map(|i| unit(x(i, j))).collect();
        spec.add(terms, Relation::Le, 1, Some(format!("H{}", j + 1)))
            .expect("well-formed");
    }
    if spec.num_vars <= ORACLE_CHECK_VARS && oracle_unsat(&spec, None) != Some(true) {
        return Err(BenchError::Satisfiable);
    }
    let n = p + h;
    let pigeons: Vec<usize> = (0..p).collect();
    let holes: Vec<usize> = (p..n).collect();
    let mut generators = adjacent_swaps(n, &pigeons);
    generators.extend(adjacent_swaps(n, &holes));
    let mut matrices = vec![single_column(&pigeons)];
    if h > 1 {
        matrices.push(single_column(&holes));
    }
    Ok(BenchInstance {
        family: Family::Php,
        params: vec![p as u64, h as u64],
        seed: 0,
        spec,
        known_group: SymGroup {
            num_constraints: n,
            generators,
            matrices,
            ..Default::default()
        },
    })
}

/// n+k queens on an `n x n` board: columns, rows and the four diagonal
/// families (each at most one queen), and exactly `n + k` queens in total.
/// Variable `x_ij` (row `i`, column `j`, 1-based) is `(i - 1) * n + (j - 1)`.
pub fn gen_queens(n: usize, k: usize) -> Result<BenchInstance, BenchError> {
    if n < 4 || k < 1 {
        return Err(BenchError::InvalidParams(format!("need n >= 4, k >= 1, got n={n}, k={k}")));
    }
    let x = |i: usize, j: usize| ((i - 1) * n + (j - 1)) as u32;
    let mut spec = Spec::new((n * n) as u32);
    let mut cells: Vec<Vec<u32>> = Vec::new();
    let mut add = |spec: &mut Spec, vars: Vec<u32>, name: String| {
        let terms = vars.iter().map(|&v| unit(v)).collect();
        spec.add(terms, Relation::Le, 1, Some(name)).expect("well-formed");
        let mut sorted = vars;
        sorted.sort_unstable();
        cells.push(sorted);
    };
    for j in 1..=n {
        add(&mut spec, (1..=n).map(|i| x(i, j)).collect(), format!("C{j}"));
    }
    for i in 1..=n {
        add(&mut spec, (1..=n).map(|j| x(i, j)).collect(), format!("R{i}"));
    }
    for j in 1..=n {
        let v = (1..=n - j + 1).map(|i| x(i + j - 1, i)).collect();
        add(&mut spec, v, format!("D1_{j}"));
    }
    for j in 1..=n {
        let v = (1..=n - j + 1).map(|i| x(n + 2 - i - j, i)).collect();
        add(&mut spec, v, format!("D2_{j}"));
    }
    for j in 2..=n {
        let v = (1..=n - j + 1).map(|i| x(i + j - 1, n - i + 1)).collect();
        add(&mut spec, v, format!("D3_{j}"));
    }
    for j in 2..=n {
        let v = (1..=n - j + 1).map(|i| x(n + 2 - i - j, n - i + 1)).collect();
        add(&mut spec, v, format!("D4_{j}"));
    }
    let all: Vec<Term> = (0..(n * n) as u32).map(unit).collect();
    let total = spec
        .add(all, Relation::Eq, (n + k) as i64, Some("TOTAL".into()))
        .expect("well-formed");
    cells.push((0..(n * n) as u32).collect());
    if spec.num_vars <= ORACLE_CHECK_VARS && oracle_unsat(&spec, None) != Some(true) {
        return Err(BenchError::Satisfiable);
    }

    let m = spec.len();
    let by_cells: HashMap<&Vec<u32>, usize> = cells
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != total)
        .map(|(c, v)| (v, c))
        .collect();
    let project = |f: &dyn Fn(usize, usize) -> (usize, usize)| {
        let map: Vec<usize> = (0..m)
            .map(|c| {
                if c == total {
                    return c;
                }
                let mut img: Vec<u32> = cells[c]
                    .iter()
                    .map(|&v| {
                        let (r, col) = f(v as usize / n, v as usize % n);
                        (r * n + col) as u32
                    })
                    .collect();
                img.sort_unstable();
                by_cells[&img]
            })
            .collect();
        ConstraintPerm::from_vec(map).expect("board symmetries permute lines")
    };
    let rotate = project(&|r, c| (c, n - 1 - r));
    let reflect = project(&|r, c| (r, n - 1 - c));
    Ok(BenchInstance {
        family: Family::Queens,
        params: vec![n as u64, k as u64],
        seed: 0,
        spec,
        known_group: SymGroup {
            num_constraints: m,
            generators: vec![rotate, reflect],
            ..Default::default()
        },
    })
}

/// Number of bins first-fit-decreasing uses.
pub fn first_fit_decreasing(items: &[i64], capacity: i64) -> usize {
    let mut sorted = items.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut bins: Vec<i64> = Vec::new();
    for w in sorted {
        match bins.iter_mut().find(|load| **load + w <= capacity) {
            Some(load) => *load += w,
            None => bins.push(w),
        }
    }
    bins.len()
}

/// Items of size U(5, 10) that fill `needed` bins of capacity 25 under
/// first-fit-decreasing, with only `floor(ratio% * needed)` bins available.
/// Capacity constraints `CAP1..CAPb` come first, then `ITEM1..ITEMm`, each
/// item placed in exactly one bin. Variable `x_ij` is `i * b + j` (0-based).
pub fn gen_binpack(needed: usize, ratio_pct: u32, seed: u64) -> Result<BenchInstance, BenchError> {
    let bins = ((ratio_pct as usize * needed) / 100).max(1);
    if needed == 0 || bins >= needed {
        return Err(BenchError::InvalidParams(format!(
            "{ratio_pct}% of {needed} bins leaves no shortage"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..BINPACK_RETRIES {
        let mut items: Vec<i64> = Vec::new();
        loop {
            let w = rng.gen_range(5..=10);
            items.push(w);
            if first_fit_decreasing(&items, BINPACK_CAPACITY) > needed {
                items.pop();
                break;
            }
        }
        let spec = binpack_spec(&items, bins);
        let total: i64 = items.iter().sum();
        let certified = total > BINPACK_CAPACITY * bins as i64;
        if certified || oracle_unsat(&spec, Some(BINPACK_CONFLICTS)) == Some(true) {
            let caps: Vec<usize> = (0..bins).collect();
            let mut matrices = Vec::new();
            if bins > 1 {
                matrices.push(single_column(&caps));
            }
            return Ok(BenchInstance {
                family: Family::Binpack,
                params: vec![needed as u64, ratio_pct as u64],
                seed,
                known_group: SymGroup {
                    num_constraints: spec.len(),
                    generators: adjacent_swaps(spec.len(), &caps),
                    matrices,
                    ..Default::default()
                },
                spec,
            });
        }
    }
    Err(BenchError::RetriesExhausted(BINPACK_RETRIES))
}

fn binpack_spec(items: &[i64], bins: usize) -> Spec {
    let x = |i: usize, j: usize| (i * bins + j) as u32;
    let mut spec = Spec::new((items.len() * bins) as u32);
    for j in 0..bins {
        let terms = items
            .iter()
            .enumerate()
            .map(|(i, &w)| Term {
                coef: w,
                lit: Var(x(i, j)).pos(),
            })
            .collect();
        spec.add(terms, Relation::Le, BINPACK_CAPACITY, Some(format!("CAP{}", j + 1)))
            .expect("well-formed");
    }
    for i in 0..items.len() {
        let terms = (0..bins).map(|j| unit(x(i, j))).collect();
        spec.add(terms, Relation::Eq, 1, Some(format!("ITEM{}", i + 1)))
            .expect("well-formed");
    }
    spec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::ConstraintSet;
    use crate::oracle::new_ctx;
    use rand::seq::SliceRandom;

    #[test]
    fn php_shapes() {
        let i = gen_php(4, 2).unwrap();
        assert_eq!(i.spec.len(), 6);
        assert_eq!(i.spec.num_vars, 8);
        assert_eq!(
            i.spec.labels(&i.spec.all_ids()),
            vec!["P1", "P2", "P3", "P4", "H1", "H2"]
        );
        assert_eq!(gen_php(2, 1).unwrap().spec.len(), 3);
        assert!(gen_php(2, 2).is_err());
        assert!(gen_php(3, 0).is_err());
    }

    #[test]
    fn queens_shapes() {
        let i = gen_queens(4, 2).unwrap();
        // 4 columns, 4 rows, 4 + 4 + 3 + 3 diagonals, total
        assert_eq!(i.spec.len(), 23);
        assert_eq!(i.spec.num_vars, 16);
        assert!(gen_queens(3, 1).is_err());
        let g = &i.known_group;
        assert_eq!(crate::symmetry::orbit(&[0].into(), g, 100).sets.len(), 4);
        // total-count constraint is fixed by every board symmetry
        for p in &g.generators {
            assert_eq!(p.image(22), 22);
        }
    }

    #[test]
    fn queens_diagonals_cover_each_cell_once_per_direction() {
        let n = 5;
        let i = gen_queens(n, 1).unwrap();
        let mut down = vec![0; n * n];
        let mut up = vec![0; n * n];
        for c in &i.spec.constraints[2 * n..i.spec.len() - 1] {
            let label = i.spec.label(c.id);
            let fam = if label.starts_with("D1") || label.starts_with("D4") {
                &mut down
            } else {
                &mut up
            };
            for t in &c.terms {
                fam[t.lit.var().index()] += 1;
            }
        }
        assert!(down.iter().all(|&k| k == 1));
        assert!(up.iter().all(|&k| k == 1));
    }

    #[test]
    fn binpack_shapes() {
        let i = gen_binpack(5, 70, 0).unwrap();
        let caps = i.spec.labels(&i.spec.all_ids());
        assert_eq!(&caps[..3], &["CAP1", "CAP2", "CAP3"]);
        assert!(caps[3].starts_with("ITEM"));
        let j = gen_binpack(5, 70, 0).unwrap();
        assert_eq!(i.spec, j.spec);
        assert!(gen_binpack(1, 90, 0).is_err());
        let b = &i.known_group;
        assert_eq!(b.generators[0].cycles(), vec![vec![0, 1]]);
    }

    #[test]
    fn ffd() {
        assert_eq!(first_fit_decreasing(&[], 25), 0);
        assert_eq!(first_fit_decreasing(&[10, 10, 5], 25), 1);
        assert_eq!(first_fit_decreasing(&[10, 10, 10], 25), 2);
    }

    /// Random subsets keep their satisfiability status under each known
    /// generator.
    fn check_known_group(inst: &BenchInstance, samples: usize) {
        let h = half_reify(&inst.spec);
        let mut ctx = new_ctx(&h);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ids: Vec<usize> = (0..h.len()).collect();
        for g in &inst.known_group.all_generators() {
            for _ in 0..samples {
                let k = rng.gen_range(0..=ids.len());
                let u: ConstraintSet = ids.choose_multiple(&mut rng, k).copied().collect();
                assert_eq!(
                    ctx.is_sat(&u).unwrap(),
                    ctx.is_sat(&g.apply(&u)).unwrap(),
                    "{} generator {:?}",
                    inst.name(),
                    g.cycles()
                );
            }
        }
    }

    #[test]
    fn known_groups_are_symmetries() {
        check_known_group(&gen_php(5, 3).unwrap(), 40);
        check_known_group(&gen_queens(4, 1).unwrap(), 40);
        check_known_group(&gen_binpack(3, 70, 1).unwrap(), 20);
    }

    #[test]
    fn all_unsat() {
        for inst in [gen_php(3, 2).unwrap(), gen_queens(4, 1).unwrap(), gen_binpack(4, 80, 3).unwrap()] {
            let h = half_reify(&inst.spec);
            assert!(!new_ctx(&h).is_sat(&h.base.all_ids()).unwrap());
        }
    }
}
