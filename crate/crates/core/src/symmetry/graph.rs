//! Automorphisms of vertex-colored, edge-labeled graphs.
//!
//! Equitable partition refinement plus individualization, in the style of
//! nauty: a first path of individualizations down to a discrete partition,
//! then, level by level from the bottom, one search per vertex of the
//! target cell that is not already in the orbit of the first-path vertex.
//! Every reported permutation is checked edge by edge.

use std::collections::HashSet;

/// Undirected graph; `adj[v]` holds `(neighbor, label)` pairs.
#[derive(Debug, Clone, Default)]
pub struct ColoredGraph {
    pub colors: Vec<u64>,
    pub adj: Vec<Vec<(u32, u64)>>,
}

impl ColoredGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, color: u64) -> u32 {
        self.colors.push(color);
        self.adj.push(Vec::new());
        (self.colors.len() - 1) as u32
    }

    pub fn add_edge(&mut self, a: u32, b: u32, label: u64) {
        self.adj[a as usize].push((b, label));
        self.adj[b as usize].push((a, label));
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    fn sorted_adjacency(&self) -> Vec<Vec<(u32, u64)>> {
        self.adj
            .iter()
            .map(|a| {
                let mut a = a.clone();
                a.sort_unstable();
                a
            })
            .collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct AutomorphismResult {
    /// Generators as vertex permutations (`perm[v]` is the image of `v`).
    pub generators: Vec<Vec<u32>>,
    pub nodes: u64,
    /// The node budget ran out; the generators span a subgroup only.
    pub truncated: bool,
}

/// Cell index of every vertex; cells are numbered canonically.
type Partition = Vec<u32>;

fn rank_by<K: Ord + Clone>(keys: &[K]) -> Partition {
    let mut idx: Vec<u32> = (0..keys.len() as u32).collect();
    idx.sort_by(|&a, &b| keys[a as usize].cmp(&keys[b as usize]));
    let mut out = vec![0u32; keys.len()];
    let mut rank = 0u32;
    for w in 0..idx.len() {
        if w > 0 && keys[idx[w] as usize] != keys[idx[w - 1] as usize] {
            rank += 1;
        }
        out[idx[w] as usize] = rank;
    }
    out
}

fn num_cells(p: &Partition) -> usize {
    p.iter().max().map_or(0, |&m| m as usize + 1)
}

fn refine(g: &ColoredGraph, mut p: Partition) -> Partition {
    let mut cells = num_cells(&p);
    loop {
        let keys: Vec<(u32, Vec<(u64, u32)>)> = (0..g.len())
            .map(|v| {
                let mut sig: Vec<(u64, u32)> =
                    g.adj[v].iter().map(|&(u, l)| (l, p[u as usize])).collect();
                sig.sort_unstable();
                (p[v], sig)
            })
            .collect();
        let next = rank_by(&keys);
        let n = num_cells(&next);
        p = next;
        if n == cells {
            return p;
        }
        cells = n;
    }
}

fn individualize(g: &ColoredGraph, p: &Partition, v: u32) -> Partition {
    let keys: Vec<(u32, bool)> = (0..p.len())
        .map(|u| (p[u], u as u32 != v))
        .collect();
    refine(g, rank_by(&keys))
}

/// Cell sizes in cell order.
fn shape(p: &Partition) -> Vec<u32> {
    let mut s = vec![0u32; num_cells(p)];
    for &c in p {
        s[c as usize] += 1;
    }
    s
}

/// First non-singleton cell.
fn target_cell(p: &Partition) -> Option<u32> {
    shape(p).iter().position(|&n| n > 1).map(|c| c as u32)
}

fn members(p: &Partition, cell: u32) -> Vec<u32> {
    (0..p.len() as u32).filter(|&v| p[v as usize] == cell).collect()
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n as u32).collect())
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut r = x;
        while self.0[r as usize] != r {
            r = self.0[r as usize];
        }
        let mut c = x;
        while self.0[c as usize] != r {
            let n = self.0[c as usize];
            self.0[c as usize] = r;
            c = n;
        }
        r
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi as usize] = lo;
        }
    }
}

struct Search<'a> {
    g: &'a ColoredGraph,
    sorted_adj: Vec<Vec<(u32, u64)>>,
    edges: HashSet<(u32, u32, u64)>,
    path: Vec<u32>,
    parts: Vec<Partition>,
    shapes: Vec<Vec<u32>>,
    leaf_order: Vec<u32>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl Search<'_> {
    fn is_automorphism(&self, perm: &[u32]) -> bool {
        if perm.iter().enumerate().any(|(v, &w)| self.g.colors[v] != self.g.colors[w as usize]) {
            return false;
        }
        self.sorted_adj.iter().enumerate().all(|(v, nbrs)| {
            let pv = perm[v];
            nbrs.iter()
                .all(|&(u, l)| self.edges.contains(&(pv, perm[u as usize], l)))
        })
    }

    fn leaf_perm(&self, leaf: &Partition) -> Vec<u32> {
        // vertex holding cell r in `leaf` is the image of the first-leaf vertex
        // holding cell r
        let mut by_cell = vec![0u32; leaf.len()];
        for (v, &c) in leaf.iter().enumerate() {
            by_cell[c as usize] = v as u32;
        }
        (0..leaf.len())
            .map(|v| by_cell[self.leaf_order[v] as usize])
            .collect()
    }

    /// Looks for an automorphism under node `p` sitting at depth `depth`.
    fn explore(&mut self, depth: usize, p: Partition) -> Option<Vec<u32>> {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return None;
        }
        if shape(&p) != self.shapes[depth] {
            return None;
        }
        let Some(cell) = target_cell(&p) else {
            let perm = self.leaf_perm(&p);
            return self.is_automorphism(&perm).then_some(perm);
        };
        let mut cands = members(&p, cell);
        if let Some(&first) = self.path.get(depth) {
            if let Some(i) = cands.iter().position(|&v| v == first) {
                cands.remove(i);
                cands.insert(0, first);
            }
        }
        for v in cands {
            let q = individualize(self.g, &p, v);
            if let Some(perm) = self.explore(depth + 1, q) {
                return Some(perm);
            }
            if self.exhausted {
                return None;
            }
        }
        None
    }
}

/// Generators of the automorphism group of `g` (or of a subgroup when the
/// node budget is exhausted).
pub fn automorphisms(g: &ColoredGraph, node_budget: u64) -> AutomorphismResult {
    let n = g.len();
    if n == 0 {
        return AutomorphismResult::default();
    }
    let mut edges = HashSet::new();
    for (v, nbrs) in g.adj.iter().enumerate() {
        for &(u, l) in nbrs {
            edges.insert((v as u32, u, l));
        }
    }
    let mut search = Search {
        g,
        sorted_adj: g.sorted_adjacency(),
        edges,
        path: Vec::new(),
        parts: Vec::new(),
        shapes: Vec::new(),
        leaf_order: Vec::new(),
        nodes: 0,
        budget: node_budget,
        exhausted: false,
    };

    let mut p = refine(g, rank_by(&g.colors));
    loop {
        search.shapes.push(shape(&p));
        search.parts.push(p.clone());
        match target_cell(&p) {
            None => break,
            Some(cell) => {
                let v = members(&p, cell)[0];
                search.path.push(v);
                p = individualize(g, &p, v);
                search.nodes += 1;
            }
        }
    }
    search.leaf_order = p;

    let mut generators: Vec<Vec<u32>> = Vec::new();
    let mut orbits = UnionFind::new(n);
    for depth in (0..search.path.len()).rev() {
        let base = search.path[depth];
        let parent = search.parts[depth].clone();
        let cell = parent[base as usize];
        let mut failed: Vec<u32> = Vec::new();
        for w in members(&parent, cell) {
            if w == base || orbits.find(w) == orbits.find(base) {
                continue;
            }
            if failed.iter().any(|&f| orbits.find(f) == orbits.find(w)) {
                continue;
            }
            let q = individualize(g, &parent, w);
            match search.explore(depth + 1, q) {
                Some(perm) => {
                    for (v, &img) in perm.iter().enumerate() {
                        orbits.union(v as u32, img);
                    }
                    generators.push(perm);
                }
                None => failed.push(w),
            }
            if search.exhausted {
                break;
            }
        }
        if search.exhausted {
            break;
        }
    }
    AutomorphismResult {
        generators,
        nodes: search.nodes,
        truncated: search.exhausted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_of_group(n: usize, gens: &[Vec<u32>]) -> usize {
        // brute-force closure, small groups only
        let id: Vec<u32> = (0..n as u32).collect();
        let mut seen: HashSet<Vec<u32>> = HashSet::from([id.clone()]);
        let mut queue = vec![id];
        while let Some(p) = queue.pop() {
            for g in gens {
                let q: Vec<u32> = (0..n).map(|v| g[p[v] as usize]).collect();
                if seen.insert(q.clone()) {
                    queue.push(q);
                }
            }
        }
        seen.len()
    }

    fn cycle(n: u32) -> ColoredGraph {
        let mut g = ColoredGraph::new();
        for _ in 0..n {
            g.add_vertex(0);
        }
        for i in 0..n {
            g.add_edge(i, (i + 1) % n, 0);
        }
        g
    }

    #[test]
    fn cycle_has_dihedral_group() {
        for n in 3..8 {
            let g = cycle(n);
            let r = automorphisms(&g, 1_000_000);
            assert!(!r.truncated);
            assert_eq!(order_of_group(n as usize, &r.generators), 2 * n as usize);
        }
    }

    #[test]
    fn complete_graph_is_symmetric_group() {
        let mut g = ColoredGraph::new();
        for _ in 0..5 {
            g.add_vertex(0);
        }
        for i in 0..5 {
            for j in i + 1..5 {
                g.add_edge(i, j, 0);
            }
        }
        let r = automorphisms(&g, 1_000_000);
        assert_eq!(order_of_group(5, &r.generators), 120);
    }

    #[test]
    fn colors_and_labels_break_symmetry() {
        let mut g = cycle(4);
        g.colors[0] = 1;
        let r = automorphisms(&g, 1_000_000);
        assert_eq!(order_of_group(4, &r.generators), 2);

        let mut g = ColoredGraph::new();
        for _ in 0..3 {
            g.add_vertex(0);
        }
        g.add_edge(0, 1, 1);
        g.add_edge(1, 2, 2);
        let r = automorphisms(&g, 1_000_000);
        assert!(r.generators.is_empty());
    }

    #[test]
    fn petersen_graph_order() {
        let mut g = ColoredGraph::new();
        for _ in 0..10 {
            g.add_vertex(0);
        }
        for i in 0..5 {
            g.add_edge(i, (i + 1) % 5, 0);
            g.add_edge(i, i + 5, 0);
            g.add_edge(5 + i, 5 + (i + 2) % 5, 0);
        }
        let r = automorphisms(&g, 1_000_000);
        assert_eq!(order_of_group(10, &r.generators), 120);
    }

    #[test]
    fn budget_truncates() {
        let g = cycle(6);
        let r = automorphisms(&g, 2);
        assert!(r.truncated);
    }
}
