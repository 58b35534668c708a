//! Constraint symmetries of half-reified specifications.
//!
//! Detection works on the literal level (automorphisms of a colored graph
//! built from the guarded forms), restricts the result to indicator literals
//! and reads it as a permutation of constraint ids.

mod graph;
mod io;
mod lex;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{half_reify, ConstraintSet, HalfReifiedSpec, Lit, PbGe, Var};

pub use graph::{automorphisms, AutomorphismResult, ColoredGraph};
pub use io::{parse_symmetries, write_symmetries};
pub use lex::{lex_leader_constraints, natural_order, BreakingConstraints};

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("permutation maps {from} to {to}, crossing polarity")]
    PolarityCrossing { from: Lit, to: Lit },
    #[error("literal {0} is not an indicator literal")]
    NotIndicator(Lit),
    #[error("mapping is not a bijection")]
    NotBijective,
    #[error("permutation does not commute with negation at {0}")]
    NegationMismatch(Lit),
    #[error("constraint id {0} out of range")]
    OutOfRange(usize),
    #[error("matrix rows must be non-empty, equally long and pairwise disjoint")]
    BadMatrix,
    #[error("line {line}: unknown constraint label `{label}`")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// Literal permutation commuting with negation; identity outside its support.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: BTreeMap<Lit, Lit>,
}

impl Permutation {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds a permutation from explicit `l -> m` pairs. Fixed points are
    /// dropped. The pairs must form a bijection on their support and commute
    /// with negation.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Lit, Lit)>) -> Result<Self, SymmetryError> {
        let mut map = BTreeMap::new();
        for (l, m) in pairs {
            if l != m && map.insert(l, m).is_some_and(|old| old != m) {
                return Err(SymmetryError::NotBijective);
            }
        }
        let p = Permutation { map };
        p.validate()?;
        Ok(p)
    }

    /// Builds a permutation from cycles over literals; the negated cycles are
    /// added automatically.
    pub fn from_cycles(cycles: &[Vec<Lit>]) -> Result<Self, SymmetryError> {
        let mut pairs = Vec::new();
        for cyc in cycles {
            for (i, &l) in cyc.iter().enumerate() {
                let m = cyc[(i + 1) % cyc.len()];
                pairs.push((l, m));
                pairs.push((!l, !m));
            }
        }
        Self::from_pairs(pairs)
    }

    fn validate(&self) -> Result<(), SymmetryError> {
        let images: BTreeSet<Lit> = self.map.values().copied().collect();
        if images.len() != self.map.len() || images.iter().any(|l| !self.map.contains_key(l)) {
            return Err(SymmetryError::NotBijective);
        }
        match self.map.keys().find(|&&l| self.apply(!l) != !self.apply(l)) {
            Some(&l) => Err(SymmetryError::NegationMismatch(l)),
            None => Ok(()),
        }
    }

    pub fn apply(&self, l: Lit) -> Lit {
        self.map.get(&l).copied().unwrap_or(l)
    }

    pub fn support(&self) -> impl Iterator<Item = Lit> + '_ {
        self.map.keys().copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Lit, Lit)> + '_ {
        self.map.iter().map(|(&l, &m)| (l, m))
    }

    pub fn is_identity(&self) -> bool {
        self.map.is_empty()
    }

    pub fn commutes_with_negation(&self) -> bool {
        self.map.keys().all(|&l| self.apply(!l) == !self.apply(l))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let mut map = BTreeMap::new();
        for l in self.support().chain(other.support()) {
            let m = self.apply(other.apply(l));
            if m != l {
                map.insert(l, m);
            }
        }
        Permutation { map }
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            map: self.map.iter().map(|(&l, &m)| (m, l)).collect(),
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.map.is_empty() {
            return write!(f, "()");
        }
        let mut seen = BTreeSet::new();
        for &start in self.map.keys() {
            if !seen.insert(start) {
                continue;
            }
            write!(f, "({start}")?;
            let mut l = self.apply(start);
            while l != start {
                seen.insert(l);
                write!(f, " {l}")?;
                l = self.apply(l);
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Bijection on constraint ids `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ConstraintPerm {
    map: Vec<usize>,
}

impl ConstraintPerm {
    pub fn identity(n: usize) -> Self {
        ConstraintPerm {
            map: (0..n).collect(),
        }
    }

    pub fn from_vec(map: Vec<usize>) -> Result<Self, SymmetryError> {
        let mut seen = vec![false; map.len()];
        for &m in &map {
            if m >= map.len() {
                return Err(SymmetryError::OutOfRange(m));
            }
            if std::mem::replace(&mut seen[m], true) {
                return Err(SymmetryError::NotBijective);
            }
        }
        Ok(ConstraintPerm { map })
    }

    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self, SymmetryError> {
        let mut map: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cyc in cycles {
            for (i, &c) in cyc.iter().enumerate() {
                if c >= n {
                    return Err(SymmetryError::OutOfRange(c));
                }
                if std::mem::replace(&mut touched[c], true) {
                    return Err(SymmetryError::NotBijective);
                }
                map[c] = cyc[(i + 1) % cyc.len()];
            }
        }
        Ok(ConstraintPerm { map })
    }

    /// A product of the transpositions `(a b)` for each given pair.
    pub fn swaps(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        for (a, b) in pairs {
            map.swap(a, b);
        }
        ConstraintPerm { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn image(&self, c: usize) -> usize {
        self.map.get(c).copied().unwrap_or(c)
    }

    pub fn apply(&self, u: &ConstraintSet) -> ConstraintSet {
        u.iter().map(|&c| self.image(c)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn is_involution(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &m)| self.map[m] == i)
    }

    pub fn support(&self) -> ConstraintSet {
        self.map
            .iter()
            .enumerate()
            .filter(|&(i, &m)| i != m)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn inverse(&self) -> ConstraintPerm {
        let mut inv = vec![0; self.map.len()];
        for (i, &m) in self.map.iter().enumerate() {
            inv[m] = i;
        }
        ConstraintPerm { map: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &ConstraintPerm) -> ConstraintPerm {
        ConstraintPerm {
            map: (0..self.map.len().max(other.map.len()))
                .map(|c| self.image(other.image(c)))
                .collect(),
        }
    }

    /// Non-trivial cycles, each starting at its smallest element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.map.len()];
        let mut out = Vec::new();
        for start in 0..self.map.len() {
            if seen[start] || self.map[start] == start {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut c = self.map[start];
            while c != start {
                seen[c] = true;
                cyc.push(c);
                c = self.map[c];
            }
            out.push(cyc);
        }
        out
    }
}

pub fn apply(pi: &ConstraintPerm, u: &ConstraintSet) -> ConstraintSet {
    pi.apply(u)
}

pub fn stabilizes(pi: &ConstraintPerm, u: &ConstraintSet) -> bool {
    u.iter().all(|&c| u.contains(&pi.image(c)))
}

/// Constraints arranged so that every permutation of the rows, applied
/// column by column, is a constraint symmetry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowMatrix {
    rows: Vec<Vec<usize>>,
}

impl RowMatrix {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self, SymmetryError> {
        let k = rows.first().map_or(0, Vec::len);
        if k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(SymmetryError::BadMatrix);
        }
        let cells: BTreeSet<usize> = rows.iter().flatten().copied().collect();
        if cells.len() != rows.len() * k {
            return Err(SymmetryError::BadMatrix);
        }
        Ok(RowMatrix { rows })
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.rows[0].len()
    }

    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().flatten().copied()
    }

    /// `(row, column)` of constraint `c`.
    pub fn position(&self, c: usize) -> Option<(usize, usize)> {
        self.rows
            .iter()
            .enumerate()
            .find_map(|(r, row)| row.iter().position(|&x| x == c).map(|j| (r, j)))
    }

    /// The symmetry swapping rows `r` and `s`.
    pub fn row_swap(&self, r: usize, s: usize, n: usize) -> ConstraintPerm {
        ConstraintPerm::swaps(
            n,
            self.rows[r].iter().copied().zip(self.rows[s].iter().copied()),
        )
    }

    /// True when `pi` maps every row onto a row, column by column, and
    /// moves nothing outside the matrix.
    pub fn covers(&self, pi: &ConstraintPerm) -> bool {
        let cells: BTreeSet<usize> = self.cells().collect();
        if !pi.support().is_subset(&cells) {
            return false;
        }
        self.rows.iter().all(|row| {
            let img: Vec<usize> = row.iter().map(|&c| pi.image(c)).collect();
            self.rows.contains(&img)
        })
    }
}

/// Generators of a group of constraint symmetries, plus row-interchangeable
/// blocks of it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymGroup {
    pub num_constraints: usize,
    pub generators: Vec<ConstraintPerm>,
    pub matrices: Vec<RowMatrix>,
    /// Literal-level automorphisms; `literal_generators[i]` projects to
    /// `generators[i]` when detected, empty when read from a file.
    pub literal_generators: Vec<Permutation>,
    /// Detection stopped at its node budget.
    pub truncated: bool,
    pub nodes: u64,
}

impl SymGroup {
    pub fn identity(n: usize) -> Self {
        SymGroup {
            num_constraints: n,
            ..Default::default()
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty() && self.matrices.iter().all(|m| m.num_rows() < 2)
    }

    /// Generators together with the adjacent row swaps of every matrix.
    pub fn all_generators(&self) -> Vec<ConstraintPerm> {
        let mut out = self.generators.clone();
        for m in &self.matrices {
            for r in 1..m.num_rows() {
                let swap = m.row_swap(r - 1, r, self.num_constraints);
                if !out.contains(&swap) {
                    out.push(swap);
                }
            }
        }
        out
    }
}

/// Node indices: literal `l` is `l.code()`; form nodes follow.
fn build_graph(h: &HalfReifiedSpec) -> ColoredGraph {
    const NEG_EDGE: u64 = u64::MAX;
    let nv = h.num_vars() as usize;
    let base = h.num_base_vars() as usize;
    let forms: Vec<PbGe> = (0..h.len()).flat_map(|c| h.guarded_forms(c)).collect();

    // (kind, degree), ranked so the graph does not depend on raw values
    let mut keys: Vec<(u8, u64)> = Vec::with_capacity(2 * nv + forms.len());
    for v in 0..nv {
        let (p, n) = if v < base { (2, 2) } else { (3, 4) };
        keys.push((p, 0));
        keys.push((n, 0));
    }
    for f in &forms {
        keys.push((0, f.degree));
    }
    let distinct: BTreeSet<(u8, u64)> = keys.iter().copied().collect();
    let rank: HashMap<(u8, u64), u64> = distinct
        .into_iter()
        .enumerate()
        .map(|(i, k)| (k, i as u64))
        .collect();

    let mut g = ColoredGraph::new();
    for k in &keys {
        g.add_vertex(rank[k]);
    }
    for v in 0..nv {
        g.add_edge(2 * v as u32, 2 * v as u32 + 1, NEG_EDGE);
    }
    for (i, f) in forms.iter().enumerate() {
        let node = (2 * nv + i) as u32;
        for &(w, l) in &f.terms {
            g.add_edge(node, l.code() as u32, w);
        }
    }
    g
}

/// Checks that `pi` maps the multiset of guarded forms of `h` onto itself.
pub fn is_syntactic_symmetry(h: &HalfReifiedSpec, pi: &Permutation) -> bool {
    fn canon(f: &PbGe) -> (u64, Vec<(u64, Lit)>) {
        let mut t = f.terms.clone();
        t.sort_unstable();
        (f.degree, t)
    }
    let forms: Vec<PbGe> = (0..h.len()).flat_map(|c| h.guarded_forms(c)).collect();
    let mut a: Vec<_> = forms.iter().map(canon).collect();
    let mut b: Vec<_> = forms
        .iter()
        .map(|f| {
            canon(&PbGe {
                terms: f.terms.iter().map(|&(w, l)| (w, pi.apply(l))).collect(),
                degree: f.degree,
            })
        })
        .collect();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

/// Restriction of `pi` to `t` when `pi` maps `t` onto itself.
pub fn derive_partial(pi: &Permutation, t: &BTreeSet<Lit>) -> Option<Permutation> {
    if t.iter().any(|&l| !t.contains(&pi.apply(l))) {
        return None;
    }
    Some(Permutation {
        map: pi
            .pairs()
            .filter(|(l, _)| t.contains(l))
            .collect(),
    })
}

/// Reads a permutation of indicator literals as a permutation of constraints.
pub fn to_constraint_perm(
    pi_on_a: &Permutation,
    h: &HalfReifiedSpec,
) -> Result<ConstraintPerm, SymmetryError> {
    let mut map: Vec<usize> = (0..h.len()).collect();
    for (l, m) in pi_on_a.pairs() {
        let (Some(c), Some(d)) = (h.constraint_of(l.var()), h.constraint_of(m.var())) else {
            let bad = if h.constraint_of(l.var()).is_none() { l } else { m };
            return Err(SymmetryError::NotIndicator(bad));
        };
        if l.is_positive() != m.is_positive() {
            return Err(SymmetryError::PolarityCrossing { from: l, to: m });
        }
        if l.is_positive() {
            map[c] = d;
        }
    }
    ConstraintPerm::from_vec(map)
}

fn indicator_literals(h: &HalfReifiedSpec) -> BTreeSet<Lit> {
    h.indicators.iter().flat_map(|v| [v.pos(), v.neg()]).collect()
}

/// Detects constraint symmetries with the default node budget.
pub fn detect(h: &HalfReifiedSpec) -> SymGroup {
    detect_with_budget(h, DEFAULT_NODE_BUDGET)
}

pub fn detect_with_budget(h: &HalfReifiedSpec, node_budget: u64) -> SymGroup {
    let g = build_graph(h);
    let res = automorphisms(&g, node_budget);
    let nlits = 2 * h.num_vars() as usize;
    let t = indicator_literals(h);
    let mut group = SymGroup {
        num_constraints: h.len(),
        truncated: res.truncated,
        nodes: res.nodes,
        ..Default::default()
    };
    for perm in &res.generators {
        let lit_perm = Permutation {
            map: (0..nlits)
                .filter(|&c| perm[c] as usize != c)
                .map(|c| (Lit::from_code(c), Lit::from_code(perm[c] as usize)))
                .collect(),
        };
        debug_assert!(lit_perm.commutes_with_negation());
        let Some(partial) = derive_partial(&lit_perm, &t) else {
            continue;
        };
        let Ok(cp) = to_constraint_perm(&partial, h) else {
            continue;
        };
        if cp.is_identity() || group.generators.contains(&cp) {
            continue;
        }
        group.generators.push(cp);
        group.literal_generators.push(lit_perm);
    }
    group.matrices = detect_row_matrices(&group, h);
    group
}

/// Detects the symmetries of the sub-specification `u` and expresses them
/// over the constraint ids of `h`.
pub fn detect_restricted(h: &HalfReifiedSpec, u: &ConstraintSet, node_budget: u64) -> SymGroup {
    let (sub, back) = h.base.restrict(u);
    let local = detect_with_budget(&half_reify(&sub), node_budget);
    let n = h.len();
    let lift = |p: &ConstraintPerm| {
        let mut map: Vec<usize> = (0..n).collect();
        for (i, &orig) in back.iter().enumerate() {
            map[orig] = back[p.image(i)];
        }
        ConstraintPerm { map }
    };
    SymGroup {
        num_constraints: n,
        generators: local.generators.iter().map(lift).collect(),
        matrices: local
            .matrices
            .iter()
            .map(|m| RowMatrix {
                rows: m
                    .rows
                    .iter()
                    .map(|r| r.iter().map(|&c| back[c]).collect())
                    .collect(),
            })
            .collect(),
        literal_generators: Vec::new(),
        truncated: local.truncated,
        nodes: local.nodes,
    }
}

/// Matrix under construction; `edges` records which generator swaps which
/// pair of rows.
struct Draft {
    rows: Vec<Vec<usize>>,
    edges: Vec<(usize, usize, usize)>,
}

fn row_order_key(row: &[usize]) -> usize {
    row.iter().copied().min().unwrap_or(usize::MAX)
}

/// Greedy row-interchangeability detection from involutive generators.
pub fn detect_row_matrices(group: &SymGroup, h: &HalfReifiedSpec) -> Vec<RowMatrix> {
    let n = group.num_constraints;
    let invols: Vec<(usize, Vec<(usize, usize)>)> = group
        .generators
        .iter()
        .enumerate()
        .filter(|(_, g)| g.is_involution() && !g.is_identity())
        .map(|(i, g)| {
            let pairs = g
                .cycles()
                .into_iter()
                .map(|c| (c[0], c[1]))
                .collect::<Vec<_>>();
            (i, pairs)
        })
        .collect();

    let mut drafts: Vec<Draft> = Vec::new();
    let mut used = vec![false; invols.len()];
    let mut changed = true;
    while changed {
        changed = false;
        for (k, (gi, pairs)) in invols.iter().enumerate() {
            if used[k] {
                continue;
            }
            let g = &group.generators[*gi];
            let support = g.support();
            let owner = drafts
                .iter()
                .position(|d| d.rows.iter().flatten().any(|c| support.contains(c)));
            match owner {
                None => {
                    let a: Vec<usize> = pairs.iter().map(|p| p.0).collect();
                    let b: Vec<usize> = pairs.iter().map(|p| p.1).collect();
                    drafts.push(Draft {
                        rows: vec![a, b],
                        edges: vec![(0, 1, *gi)],
                    });
                    used[k] = true;
                    changed = true;
                }
                Some(d) => {
                    if let Some(edge) = extend(&mut drafts, d, g, *gi) {
                        drafts[d].edges.push(edge);
                        used[k] = true;
                        changed = true;
                    }
                }
            }
        }
    }

    let mut out = Vec::new();
    for d in drafts {
        if !group.literal_generators.is_empty() && !validate(&d, group, h) {
            continue;
        }
        let mut rows = d.rows;
        rows.sort_by_key(|r| row_order_key(r));
        if let Ok(m) = RowMatrix::new(rows) {
            out.push(m);
        }
    }
    let _ = n;
    out
}

/// Tries to use `g` as a swap between an existing row of `drafts[d]` and a
/// new row, or between two existing rows.
fn extend(
    drafts: &mut [Draft],
    d: usize,
    g: &ConstraintPerm,
    gi: usize,
) -> Option<(usize, usize, usize)> {
    let all_cells: BTreeSet<usize> = drafts.iter().flat_map(|d| d.rows.iter().flatten().copied()).collect();
    let support = g.support();
    let draft = &mut drafts[d];
    for r in 0..draft.rows.len() {
        let row = &draft.rows[r];
        if !row.iter().all(|c| support.contains(c)) {
            continue;
        }
        let img: Vec<usize> = row.iter().map(|&c| g.image(c)).collect();
        let cover: ConstraintSet = row.iter().chain(img.iter()).copied().collect();
        if cover != support {
            continue;
        }
        if let Some(s) = draft.rows.iter().position(|x| *x == img) {
            return Some((r, s, gi));
        }
        if img.iter().all(|c| !all_cells.contains(c)) {
            draft.rows.push(img);
            return Some((r, draft.rows.len() - 1, gi));
        }
    }
    None
}

/// Checks sampled row transpositions by composing literal generators along
/// a path of row swaps and testing the result on the guarded forms.
fn validate(d: &Draft, group: &SymGroup, h: &HalfReifiedSpec) -> bool {
    let n = group.num_constraints;
    let rows = d.rows.len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); rows];
    for &(a, b, gi) in &d.edges {
        adj[a].push((b, gi));
        adj[b].push((a, gi));
    }
    let mut samples: Vec<(usize, usize)> = (1..rows).map(|s| (0, s)).collect();
    samples.extend((1..rows).map(|r| (r - 1, r)));
    samples.sort_unstable();
    samples.dedup();
    samples.truncate(16);
    for (r, s) in samples {
        // BFS path r -> s over the swap edges
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; rows];
        let mut seen = vec![false; rows];
        seen[r] = true;
        let mut queue = VecDeque::from([r]);
        while let Some(x) = queue.pop_front() {
            for &(y, gi) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    prev[y] = Some((x, gi));
                    queue.push_back(y);
                }
            }
        }
        if !seen[s] {
            return false;
        }
        let mut path = Vec::new();
        let mut x = s;
        while let Some((p, gi)) = prev[x] {
            path.push(gi);
            x = p;
        }
        path.reverse();
        // (u0 um) = t1 t2 .. tm .. t2 t1
        let mut lit = Permutation::identity();
        let seq: Vec<usize> = path
            .iter()
            .chain(path.iter().rev().skip(1))
            .copied()
            .collect();
        for gi in seq {
            lit = group.literal_generators[gi].compose(&lit);
        }
        let expected = ConstraintPerm::swaps(
            n,
            d.rows[r].iter().copied().zip(d.rows[s].iter().copied()),
        );
        let t = indicator_literals(h);
        let projected = derive_partial(&lit, &t).and_then(|p| to_constraint_perm(&p, h).ok());
        if projected.as_ref() != Some(&expected) || !is_syntactic_symmetry(h, &lit) {
            return false;
        }
    }
    true
}

/// Constraints of column `j` whose rows meet `u` in the same columns as the
/// row of `a`, where `(i, j)` is the position of `a`.
pub fn symmetric_images(m: &RowMatrix, u: &ConstraintSet, a: usize) -> ConstraintSet {
    let Some((i, j)) = m.position(a) else {
        return ConstraintSet::new();
    };
    let pattern = |r: usize| -> Vec<bool> { m.rows[r].iter().map(|c| u.contains(c)).collect() };
    let cols = pattern(i);
    (0..m.num_rows())
        .filter(|&r| pattern(r) == cols)
        .map(|r| m.rows[r][j])
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub sets: BTreeSet<ConstraintSet>,
    pub truncated: bool,
}

/// Breadth-first closure of `{u}` under the group generators, stopping at
/// `cap` sets.
pub fn orbit(u: &ConstraintSet, group: &SymGroup, cap: usize) -> Orbit {
    let gens = group.all_generators();
    let mut sets = BTreeSet::from([u.clone()]);
    let mut queue = VecDeque::from([u.clone()]);
    let mut truncated = false;
    'outer: while let Some(s) = queue.pop_front() {
        for g in &gens {
            let img = g.apply(&s);
            if sets.contains(&img) {
                continue;
            }
            if sets.len() >= cap {
                truncated = true;
                break 'outer;
            }
            sets.insert(img.clone());
            queue.push_back(img);
        }
    }
    Orbit { sets, truncated }
}

/// Indicator variable of constraint `c` in the encoding used by breaking
/// clauses: constraint ids double as variable ids.
pub fn constraint_var(c: usize) -> Var {
    Var(c as u32)
}
