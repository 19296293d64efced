//! Undirected graphs on bitset rows and an exact chromatic-number solver.

use serde::Serialize;

/// Simple undirected graph with a dense bit-matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

impl Graph {
    pub fn new(n: usize) -> Graph {
        let words = n.div_ceil(64).max(1);
        Graph { n, words, adj: vec![0; n * words] }
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "self-loop at {u}");
        self.adj[u * self.words + v / 64] |= 1 << (v % 64);
        self.adj[v * self.words + u / 64] |= 1 << (u % 64);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub(crate) fn row(&self, u: usize) -> &[u64] {
        &self.adj[u * self.words..(u + 1) * self.words]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(u).iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + b)
                }
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
            .collect()
    }

    /// Subgraph induced by `vertices`, relabelled `0..k` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut g = Graph::new(vertices.len());
        for (a, &u) in vertices.iter().enumerate() {
            for (b, &v) in vertices.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    /// Checks that `color` is a proper coloring.
    pub fn is_proper(&self, color: &[u32]) -> bool {
        color.len() == self.n && self.edges().iter().all(|&(u, v)| color[u] != color[v])
    }
}

/// Outcome of a chromatic-number computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chromatic {
    pub lower: usize,
    pub upper: usize,
    /// `lower == upper` and the search finished within budget.
    pub exact: bool,
    /// A proper coloring with `upper` colors.
    pub coloring: Vec<u32>,
}

impl Chromatic {
    pub fn value(&self) -> Option<usize> {
        self.exact.then_some(self.upper)
    }
}

/// Default branch-and-bound node budget.
pub const DEFAULT_NODE_LIMIT: u64 = 20_000_000;

pub fn chromatic_number(g: &Graph) -> Chromatic {
    chromatic_number_with_limit(g, DEFAULT_NODE_LIMIT)
}

/// DSATUR upper bound, greedy clique lower bound, then DSATUR branch and bound.
/// Over budget the bounds are returned with `exact == false`.
pub fn chromatic_number_with_limit(g: &Graph, node_limit: u64) -> Chromatic {
    let n = g.n();
    if n == 0 {
        return Chromatic { lower: 0, upper: 0, exact: true, coloring: Vec::new() };
    }
    let lower = greedy_clique(g).len();
    let coloring = dsatur_greedy(g);
    let upper = coloring.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut res = Chromatic { lower, upper, exact: lower == upper, coloring };
    if res.exact {
        return res;
    }
    let mut bb = BranchAndBound::new(g, res.upper, res.lower, node_limit);
    bb.run();
    if let Some(best) = bb.best_coloring {
        res.upper = best.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        res.coloring = best;
    }
    if bb.completed {
        res.lower = res.upper;
        res.exact = true;
    }
    res
}

fn greedy_clique(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let seeds = if n <= 512 { n } else { 64 };
    let mut best: Vec<usize> = Vec::new();
    for &seed in order.iter().take(seeds) {
        let mut clique = vec![seed];
        let mut cand: Vec<u64> = g.row(seed).to_vec();
        loop {
            // Extend by the candidate with most neighbours among candidates.
            let mut pick = None;
            let mut pick_deg = 0usize;
            for v in ones(&cand) {
                let d: usize = g
                    .row(v)
                    .iter()
                    .zip(&cand)
                    .map(|(a, b)| (a & b).count_ones() as usize)
                    .sum();
                if pick.is_none() || d > pick_deg {
                    pick = Some(v);
                    pick_deg = d;
                }
            }
            let Some(v) = pick else { break };
            clique.push(v);
            for (c, r) in cand.iter_mut().zip(g.row(v)) {
                *c &= r;
            }
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best
}

fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            }
        })
    })
}

/// Colors are numbered in order of first use.
fn dsatur_greedy(g: &Graph) -> Vec<u32> {
    let n = g.n();
    let mut color = vec![u32::MAX; n];
    let mut seen: Vec<Vec<bool>> = vec![Vec::new(); n];
    let mut sat = vec![0usize; n];
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| color[v] == u32::MAX)
            .max_by_key(|&v| (sat[v], g.degree(v), std::cmp::Reverse(v)))
            .expect("uncolored vertex left");
        let c = (0..).find(|&c| seen[v].get(c).is_none_or(|&s| !s)).unwrap();
        color[v] = c as u32;
        for w in g.neighbors(v) {
            if seen[w].len() <= c {
                seen[w].resize(c + 1, false);
            }
            if !seen[w][c] {
                seen[w][c] = true;
                sat[w] += 1;
            }
        }
    }
    color
}

struct BranchAndBound<'a> {
    g: &'a Graph,
    n: usize,
    /// Colors allowed: strictly fewer than `best` are sought.
    best: usize,
    lower: usize,
    color: Vec<u32>,
    /// `count[v * width + c]`: neighbours of `v` colored `c`.
    count: Vec<u16>,
    width: usize,
    sat: Vec<usize>,
    udeg: Vec<usize>,
    nodes: u64,
    node_limit: u64,
    best_coloring: Option<Vec<u32>>,
    completed: bool,
}

impl<'a> BranchAndBound<'a> {
    fn new(g: &'a Graph, upper: usize, lower: usize, node_limit: u64) -> BranchAndBound<'a> {
        let n = g.n();
        let width = upper;
        BranchAndBound {
            g,
            n,
            best: upper,
            lower,
            color: vec![u32::MAX; n],
            count: vec![0; n * width],
            width,
            sat: vec![0; n],
            udeg: (0..n).map(|v| g.degree(v)).collect(),
            nodes: 0,
            node_limit,
            best_coloring: None,
            completed: false,
        }
    }

    fn run(&mut self) {
        if self.n.saturating_mul(self.width) > 64_000_000 {
            return;
        }
        self.completed = self.search(0, 0);
    }

    fn assign(&mut self, v: usize, c: usize) {
        self.color[v] = c as u32;
        for w in self.g.neighbors(v) {
            let k = w * self.width + c;
            if self.count[k] == 0 {
                self.sat[w] += 1;
            }
            self.count[k] += 1;
            self.udeg[w] -= 1;
        }
    }

    fn unassign(&mut self, v: usize, c: usize) {
        self.color[v] = u32::MAX;
        for w in self.g.neighbors(v) {
            let k = w * self.width + c;
            self.count[k] -= 1;
            if self.count[k] == 0 {
                self.sat[w] -= 1;
            }
            self.udeg[w] += 1;
        }
    }

    /// Returns false when the node budget ran out.
    fn search(&mut self, colored: usize, used: usize) -> bool {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return false;
        }
        if colored == self.n {
            self.best = used;
            self.best_coloring = Some(self.color.clone());
            return true;
        }
        let mut v = usize::MAX;
        for u in 0..self.n {
            if self.color[u] != u32::MAX {
                continue;
            }
            if v == usize::MAX || (self.sat[u], self.udeg[u]) > (self.sat[v], self.udeg[v]) {
                v = u;
            }
        }
        for c in 0..=used {
            // Only colorings strictly better than the incumbent are of interest.
            if used.max(c + 1) >= self.best {
                break;
            }
            if self.count[v * self.width + c] != 0 {
                continue;
            }
            self.assign(v, c);
            let ok = self.search(colored + 1, used.max(c + 1));
            self.unassign(v, c);
            if !ok {
                return false;
            }
            if self.best <= self.lower {
                return true;
            }
        }
        true
    }
}
