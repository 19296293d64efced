//! Multi-sender coloring search shared by the two-sender and multi-sender
//! optimizers, plus the block-product construction used as a fallback.
//!
//! The labeling of the confusion graph must have one group per sender followed
//! by the common group. Sender `s` colors pairs `(b_s, b_common)`; a coloring is
//! stored as `maps[s][k][i]` for common sub-label `k` and private sub-label `i`.

use std::collections::HashSet;

use crate::confusion::ConfusionGraph;
use crate::error::{Error, Result};
use crate::graph::{chromatic_number, chromatic_number_with_limit};
use crate::rate::ceil_log2;

pub(crate) type Maps = Vec<Vec<Vec<u32>>>;

/// Result of an optimization run.
#[derive(Clone, Debug)]
pub(crate) struct Searched {
    pub maps: Maps,
    /// True when every smaller bit budget was refuted within the node budget.
    pub exact: bool,
}

pub(crate) fn sender_count(g: &ConfusionGraph) -> usize {
    g.labeling().groups().len() - 1
}

/// Number of distinct colors each sender uses.
pub(crate) fn palette_sizes(maps: &Maps) -> Vec<usize> {
    maps.iter()
        .map(|m| m.iter().flatten().collect::<HashSet<_>>().len())
        .collect()
}

pub(crate) fn bits_of(maps: &Maps) -> Vec<u32> {
    palette_sizes(maps).into_iter().map(|p| ceil_log2(p as u64)).collect()
}

/// Checks shape of `maps` against the labeling.
pub(crate) fn check_shape(g: &ConfusionGraph, maps: &Maps) -> Result<()> {
    let l = g.labeling();
    let k = sender_count(g);
    let lc = l.group_size(k);
    if maps.len() != k {
        return Err(Error::InvalidColoring(format!("{} sender maps for {k} senders", maps.len())));
    }
    for (s, m) in maps.iter().enumerate() {
        if m.len() != lc || m.iter().any(|row| row.len() != l.group_size(s)) {
            return Err(Error::InvalidColoring(format!(
                "map of sender {} must be {} x {}",
                s + 1,
                lc,
                l.group_size(s)
            )));
        }
    }
    Ok(())
}

/// Color tuple of vertex `v`.
pub(crate) fn tuple_of(g: &ConfusionGraph, maps: &Maps, v: usize) -> Vec<u32> {
    let l = g.labeling();
    let k = sender_count(g);
    let c = l.sub_label(v, k);
    (0..k).map(|s| maps[s][c][l.sub_label(v, s)]).collect()
}

/// First edge whose endpoints receive equal color tuples.
pub(crate) fn first_conflict(g: &ConfusionGraph, maps: &Maps) -> Result<Option<(usize, usize)>> {
    let graph = g.explicit()?;
    for (u, v) in graph.edges() {
        if tuple_of(g, maps, u) == tuple_of(g, maps, v) {
            return Ok(Some((u, v)));
        }
    }
    Ok(None)
}

struct Model {
    k: usize,
    lc: usize,
    ls: Vec<usize>,
    offs: Vec<usize>,
    stride: usize,
    nvars: usize,
    sender: Vec<usize>,
    /// Later variables that must differ from this one.
    forward: Vec<Vec<u32>>,
    /// Clauses whose last variable is this one; each is satisfied when any
    /// listed pair differs.
    clauses: Vec<Vec<Vec<(u32, u32)>>>,
}

impl Model {
    fn var(&self, s: usize, i: usize, c: usize) -> usize {
        c * self.stride + self.offs[s] + i
    }

    fn new(g: &ConfusionGraph) -> Result<Model> {
        let l = g.labeling();
        let k = sender_count(g);
        let lc = l.group_size(k);
        let ls: Vec<usize> = (0..k).map(|s| l.group_size(s)).collect();
        let mut offs = vec![0; k];
        for s in 1..k {
            offs[s] = offs[s - 1] + ls[s - 1];
        }
        let stride: usize = ls.iter().sum();
        let nvars = stride * lc;
        let mut model = Model {
            k,
            lc,
            ls,
            offs,
            stride,
            nvars,
            sender: vec![0; nvars],
            forward: vec![Vec::new(); nvars],
            clauses: vec![Vec::new(); nvars],
        };
        for c in 0..lc {
            for s in 0..k {
                for i in 0..model.ls[s] {
                    let x = model.var(s, i, c);
                    model.sender[x] = s;
                }
            }
        }
        let mut seen_bin: HashSet<(u32, u32)> = HashSet::new();
        let mut seen_clause: HashSet<Vec<(u32, u32)>> = HashSet::new();
        for (u, v) in g.explicit()?.edges() {
            let (cu, cv) = (l.sub_label(u, k), l.sub_label(v, k));
            let mut pairs: Vec<(u32, u32)> = (0..k)
                .filter_map(|s| {
                    let a = model.var(s, l.sub_label(u, s), cu);
                    let b = model.var(s, l.sub_label(v, s), cv);
                    (a != b).then(|| (a.min(b) as u32, a.max(b) as u32))
                })
                .collect();
            pairs.sort_unstable();
            match pairs.len() {
                0 => unreachable!("adjacent vertices share every sender label"),
                1 => {
                    if seen_bin.insert(pairs[0]) {
                        let (a, b) = pairs[0];
                        model.forward[a as usize].push(b);
                    }
                }
                _ => {
                    if seen_clause.insert(pairs.clone()) {
                        let last = pairs.iter().map(|&(_, b)| b).max().unwrap() as usize;
                        model.clauses[last].push(pairs);
                    }
                }
            }
        }
        Ok(model)
    }
}

/// Outcome of one feasibility run.
enum Feasible {
    Yes(Vec<u32>),
    No,
    Unknown,
}

struct Solver<'m> {
    m: &'m Model,
    palette: Vec<usize>,
    words: usize,
    domain: Vec<u64>,
    color: Vec<u32>,
    max_used: Vec<i64>,
    trail: Vec<(u32, u32)>,
    nodes: u64,
    node_limit: u64,
}

impl<'m> Solver<'m> {
    fn new(m: &'m Model, bits: &[u32], node_limit: u64) -> Solver<'m> {
        let palette = palettes(m, bits);
        let words = palette.iter().max().copied().unwrap_or(1).div_ceil(64).max(1);
        let mut domain = vec![0u64; m.nvars * words];
        for x in 0..m.nvars {
            let p = palette[m.sender[x]];
            for c in 0..p {
                domain[x * words + c / 64] |= 1 << (c % 64);
            }
        }
        Solver {
            m,
            palette,
            words,
            domain,
            color: vec![u32::MAX; m.nvars],
            max_used: vec![-1; m.k],
            trail: Vec::new(),
            nodes: 0,
            node_limit,
        }
    }

    fn has(&self, x: usize, c: usize) -> bool {
        self.domain[x * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    fn empty(&self, x: usize) -> bool {
        self.domain[x * self.words..(x + 1) * self.words].iter().all(|&w| w == 0)
    }

    fn remove(&mut self, x: usize, c: usize) {
        self.domain[x * self.words + c / 64] &= !(1 << (c % 64));
        self.trail.push((x as u32, c as u32));
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (x, c) = self.trail.pop().unwrap();
            let (x, c) = (x as usize, c as usize);
            self.domain[x * self.words + c / 64] |= 1 << (c % 64);
        }
    }

    fn solve(&mut self) -> Feasible {
        match self.dfs(0) {
            Some(true) => Feasible::Yes(self.color.clone()),
            Some(false) => Feasible::No,
            None => Feasible::Unknown,
        }
    }

    /// `None` when the node budget is exhausted.
    fn dfs(&mut self, x: usize) -> Option<bool> {
        if x == self.m.nvars {
            return Some(true);
        }
        let s = self.m.sender[x];
        let top = ((self.max_used[s] + 1) as usize).min(self.palette[s] - 1);
        for c in 0..=top {
            if !self.has(x, c) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.node_limit {
                return None;
            }
            self.color[x] = c as u32;
            let ok = self.m.clauses[x].iter().all(|cl| {
                cl.iter().any(|&(a, b)| self.color[a as usize] != self.color[b as usize])
            });
            let mark = self.trail.len();
            let mut alive = ok;
            if alive {
                for &y in &self.m.forward[x] {
                    let y = y as usize;
                    if self.has(y, c) {
                        self.remove(y, c);
                        if self.empty(y) {
                            alive = false;
                            break;
                        }
                    }
                }
            }
            if alive {
                let saved = self.max_used[s];
                self.max_used[s] = saved.max(c as i64);
                let r = self.dfs(x + 1);
                self.max_used[s] = saved;
                match r {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
            }
            self.undo_to(mark);
            self.color[x] = u32::MAX;
        }
        Some(false)
    }
}

/// All vectors `bits` with the given sum, each within `[lo[s], hi[s]]`, in
/// lexicographic order.
fn splits(total: u32, lo: &[u32], hi: &[u32]) -> Vec<Vec<u32>> {
    fn rec(s: usize, left: u32, lo: &[u32], hi: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if s == lo.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rest_lo: u32 = lo[s + 1..].iter().sum();
        let rest_hi: u32 = hi[s + 1..].iter().sum();
        for b in lo[s]..=hi[s].min(left) {
            if left - b < rest_lo || left - b > rest_hi {
                continue;
            }
            cur.push(b);
            rec(s + 1, left - b, lo, hi, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, total, lo, hi, &mut Vec::new(), &mut out);
    out
}

/// Vertices where only group `g` varies (others fixed at sub-label 0).
fn slice(g: &ConfusionGraph, group: usize) -> Vec<usize> {
    let ng = g.labeling().groups().len();
    let fixed: Vec<Option<usize>> = (0..ng).map(|h| if h == group { None } else { Some(0) }).collect();
    g.vertices_with(&fixed)
}

/// Minimum bits for each sender: its private slice must be properly colored.
fn sender_lower_bounds(g: &ConfusionGraph) -> Result<Vec<u32>> {
    let graph = g.explicit()?;
    (0..sender_count(g))
        .map(|s| {
            let chi = chromatic_number(&graph.induced(&slice(g, s)));
            Ok(ceil_log2(chi.lower as u64))
        })
        .collect()
}

/// Bits forced by blocks that are pairwise fully adjacent. Inside block `k`
/// the tuples form the product of the senders' images, each at least as large
/// as the chromatic number of that sender's slice of the block, and fully
/// adjacent blocks share no tuple.
fn block_clique_bound(g: &ConfusionGraph) -> Result<u32> {
    let graph = g.explicit()?;
    let l = g.labeling();
    let k = sender_count(g);
    let nb = l.group_size(k);
    let blocks: Vec<Vec<usize>> = (0..nb)
        .map(|b| {
            let mut fixed = vec![None; k + 1];
            fixed[k] = Some(b);
            g.vertices_with(&fixed)
        })
        .collect();
    let full = |a: usize, b: usize| blocks[a].iter().all(|&u| blocks[b].iter().all(|&v| graph.has_edge(u, v)));
    let adj: Vec<Vec<bool>> = (0..nb).map(|a| (0..nb).map(|b| a != b && full(a, b)).collect()).collect();
    // Greedy clique from each start; any clique gives a valid bound.
    let mut best: Vec<usize> = vec![0];
    for start in 0..nb {
        let mut clique = vec![start];
        for b in 0..nb {
            if b != start && clique.iter().all(|&c| adj[c][b]) {
                clique.push(b);
            }
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    if best.len() < 2 {
        return Ok(0);
    }
    let mut tuples = 0u64;
    for &b in &best {
        let mut product = 1u64;
        for s in 0..k {
            let mut fixed = vec![Some(0); k + 1];
            fixed[s] = None;
            fixed[k] = Some(b);
            product *= chromatic_number(&graph.induced(&g.vertices_with(&fixed))).lower as u64;
        }
        tuples += product;
    }
    Ok(ceil_log2(tuples))
}

/// Exact minimization of the summed bit cost.
pub(crate) fn minimize_senders(g: &ConfusionGraph, node_limit: u64) -> Result<Searched> {
    let model = Model::new(g)?;
    let k = model.k;
    let lo = sender_lower_bounds(g)?;
    let hi: Vec<u32> = (0..k)
        .map(|s| ceil_log2((model.ls[s] * model.lc) as u64))
        .collect();
    let whole = chromatic_number_with_limit(g.explicit()?, 100_000);
    let start = lo
        .iter()
        .sum::<u32>()
        .max(ceil_log2(whole.lower as u64))
        .max(block_clique_bound(g)?);
    let mut exact = true;
    for total in start..=hi.iter().sum::<u32>() {
        for bits in splits(total, &lo, &hi) {
            let outcome = match single_sender_graph(&model, &bits) {
                Some(reduced) => solve_reduced(reduced, &model, &bits, node_limit),
                None => Solver::new(&model, &bits, node_limit).solve(),
            };
            match outcome {
                Feasible::Yes(color) => {
                    let maps = (0..k)
                        .map(|s| {
                            (0..model.lc)
                                .map(|c| (0..model.ls[s]).map(|i| color[model.var(s, i, c)]).collect())
                                .collect()
                        })
                        .collect();
                    return Ok(Searched { maps, exact });
                }
                Feasible::No => {}
                Feasible::Unknown => exact = false,
            }
        }
    }
    // The identity coloring always fits in the largest budget, so reaching this
    // point means every run was cut short.
    Ok(Searched { maps: product_maps(g)?, exact: false })
}

/// Palette size of each sender under `bits`.
fn palettes(m: &Model, bits: &[u32]) -> Vec<usize> {
    (0..m.k).map(|s| (1usize << bits[s]).min(m.ls[s] * m.lc)).collect()
}

/// When at most one sender has more than one color, every constraint keeps at
/// most one pair that can differ, so the run is a plain graph coloring of that
/// sender's variables. `Err(())` marks a constraint no pair can satisfy.
fn single_sender_graph(m: &Model, bits: &[u32]) -> Option<std::result::Result<(usize, crate::graph::Graph), ()>> {
    let pal = palettes(m, bits);
    let free: Vec<usize> = (0..m.k).filter(|&s| pal[s] > 1).collect();
    let s = match free.as_slice() {
        [] => 0,
        [s] => *s,
        _ => return None,
    };
    let vars: Vec<usize> = (0..m.nvars).filter(|&x| m.sender[x] == s).collect();
    let mut index = vec![usize::MAX; m.nvars];
    for (i, &x) in vars.iter().enumerate() {
        index[x] = i;
    }
    let mut graph = crate::graph::Graph::new(vars.len());
    let mut add = |pairs: &mut dyn Iterator<Item = (u32, u32)>| -> bool {
        let mut live = pairs.filter(|&(a, _)| m.sender[a as usize] == s);
        match live.next() {
            Some((a, b)) => {
                graph.add_edge(index[a as usize], index[b as usize]);
                true
            }
            None => false,
        }
    };
    for x in 0..m.nvars {
        for &y in &m.forward[x] {
            if !add(&mut std::iter::once((x as u32, y))) {
                return Some(Err(()));
            }
        }
        for cl in &m.clauses[x] {
            if !add(&mut cl.iter().copied()) {
                return Some(Err(()));
            }
        }
    }
    Some(Ok((s, graph)))
}

fn solve_reduced(
    reduced: std::result::Result<(usize, crate::graph::Graph), ()>,
    m: &Model,
    bits: &[u32],
    node_limit: u64,
) -> Feasible {
    let Ok((s, graph)) = reduced else { return Feasible::No };
    let pal = palettes(m, bits);
    let chi = chromatic_number_with_limit(&graph, node_limit);
    let mut color = vec![0u32; m.nvars];
    if chi.upper <= pal[s] {
        for (i, x) in (0..m.nvars).filter(|&x| m.sender[x] == s).enumerate() {
            color[x] = chi.coloring[i];
        }
        Feasible::Yes(color)
    } else if chi.lower > pal[s] {
        Feasible::No
    } else {
        Feasible::Unknown
    }
}

/// Best factorization `f` with `prod f >= chi_common` minimizing
/// `sum ceil(log2(chi_s * f_s))`; ties favour larger factors for earlier senders.
pub(crate) fn factor_split(chi_private: &[usize], chi_common: usize) -> Vec<usize> {
    fn rec(s: usize, need: usize, chi: &[usize], cur: &mut Vec<usize>, best: &mut Option<(u32, Vec<usize>)>) {
        if s == chi.len() {
            if need > 1 {
                return;
            }
            let cost: u32 = chi.iter().zip(cur.iter()).map(|(&c, &f)| ceil_log2((c * f) as u64)).sum();
            let better = match best {
                None => true,
                Some((bc, bf)) => cost < *bc || (cost == *bc && *cur > *bf),
            };
            if better {
                *best = Some((cost, cur.clone()));
            }
            return;
        }
        for f in 1..=need.max(1) {
            // Only the last sender must absorb whatever is left.
            if s + 1 == chi.len() && f < need {
                continue;
            }
            cur.push(f);
            rec(s + 1, need.div_ceil(f), chi, cur, best);
            cur.pop();
        }
    }
    let mut best = None;
    rec(0, chi_common.max(1), chi_private, &mut Vec::new(), &mut best);
    best.expect("a split always exists").1
}

/// Block-product coloring: sender `s` colors `(b_s, b_c)` by
/// `c_s(b_s) + chi_s * digit_s(c_c(b_c))`, where the digits are a mixed-radix
/// expansion of an optimal coloring of the common sub-problem.
pub(crate) fn product_maps(g: &ConfusionGraph) -> Result<Maps> {
    let l = g.labeling();
    let k = sender_count(g);
    let graph = g.explicit()?;
    let color_of = |group: usize| {
        let vs = slice(g, group);
        let chi = chromatic_number(&graph.induced(&vs));
        // `vs` is ascending in the group's sub-label, so position = sub-label.
        (chi.upper.max(1), chi.coloring)
    };
    let private: Vec<(usize, Vec<u32>)> = (0..k).map(color_of).collect();
    let (chi_c, col_c) = color_of(k);
    let chis: Vec<usize> = private.iter().map(|p| p.0).collect();
    let f = factor_split(&chis, chi_c);
    let lc = l.group_size(k);
    let mut maps: Maps = Vec::with_capacity(k);
    for s in 0..k {
        let radix: usize = f[..s].iter().product();
        let (chi_s, col_s) = &private[s];
        let m: Vec<Vec<u32>> = (0..lc)
            .map(|c| {
                let cc = col_c.get(c).copied().unwrap_or(0) as usize;
                let digit = (cc / radix) % f[s];
                (0..l.group_size(s))
                    .map(|i| (col_s.get(i).copied().unwrap_or(0) as usize + chi_s * digit) as u32)
                    .collect()
            })
            .collect();
        maps.push(m);
    }
    Ok(maps)
}
