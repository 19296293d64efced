//! Confusion graphs, their block structure, and single-sender rates.
//!
//! A vertex is a realization of all `t*N` message bits. Vertex indices follow a
//! grouped labeling: the first group (`D1` messages) is the most significant,
//! the last group (common messages) the least significant, so the last group's
//! sub-label selects the block. Inside a group the lowest receiver index is the
//! least significant message, and inside a message bit 0 is least significant.

use std::fmt::Write as _;

use serde::Serialize;

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::graph::{chromatic_number, Chromatic, Graph};
use crate::problem_model::{partition, Problem};
use crate::rate::{ceil_log2, Rate};

/// Largest `t*N` for which the adjacency is materialized.
pub const EXPLICIT_LIMIT_TN: usize = 12;
/// Largest `t*N` accepted at all (label arithmetic stays in `u64`).
pub const IMPLICIT_LIMIT_TN: usize = 24;

/// Bijection between vertex indices and message realizations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    t: u32,
    n: usize,
    groups: Vec<Vec<usize>>,
    shifts: Vec<u32>,
}

impl Labeling {
    pub fn new(t: u32, n: usize, groups: Vec<Vec<usize>>) -> Labeling {
        let mut seen = vec![false; n];
        for g in &groups {
            for &m in g {
                assert!(m < n && !seen[m], "groups must partition 0..n");
                seen[m] = true;
            }
        }
        assert!(seen.iter().all(|&s| s), "groups must partition 0..n");
        let mut shifts = vec![0u32; groups.len()];
        let mut acc = 0u32;
        for (g, grp) in groups.iter().enumerate().rev() {
            shifts[g] = acc;
            acc += t * grp.len() as u32;
        }
        Labeling { t, n, groups, shifts }
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn bits(&self) -> u32 {
        self.t * self.n as u32
    }

    pub fn vertex_count(&self) -> usize {
        1usize << self.bits()
    }

    fn tmask(&self) -> u64 {
        (1u64 << self.t) - 1
    }

    /// Number of sub-labels of group `g`.
    pub fn group_size(&self, g: usize) -> usize {
        1usize << (self.t as usize * self.groups[g].len())
    }

    pub fn sub_label(&self, v: usize, g: usize) -> usize {
        (v >> self.shifts[g]) & (self.group_size(g) - 1)
    }

    pub fn vertex_of(&self, sub_labels: &[usize]) -> usize {
        assert_eq!(sub_labels.len(), self.groups.len());
        sub_labels
            .iter()
            .enumerate()
            .fold(0, |v, (g, &s)| v | s << self.shifts[g])
    }

    /// Packed realization: message `m` occupies bits `m*t .. m*t+t`.
    pub fn realization(&self, v: usize) -> u64 {
        let mut x = 0u64;
        let t = self.t as usize;
        for (g, grp) in self.groups.iter().enumerate() {
            let s = self.sub_label(v, g) as u64;
            for (q, &m) in grp.iter().enumerate() {
                x |= (s >> (q * t) & self.tmask()) << (m * t);
            }
        }
        x
    }

    pub fn vertex_of_realization(&self, x: u64) -> usize {
        let t = self.t as usize;
        let mut v = 0usize;
        for (g, grp) in self.groups.iter().enumerate() {
            let mut s = 0usize;
            for (q, &m) in grp.iter().enumerate() {
                s |= ((x >> (m * t) & self.tmask()) as usize) << (q * t);
            }
            v |= s << self.shifts[g];
        }
        v
    }

    /// Bit string of a sub-label, messages in ascending order, each message's
    /// bits from bit 0 upward. Empty groups print as `-`.
    pub fn sub_label_string(&self, g: usize, s: usize) -> String {
        if self.groups[g].is_empty() {
            return "-".to_string();
        }
        (0..self.t as usize * self.groups[g].len())
            .map(|b| if s >> b & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// `(b1,b2,b3)`-style label of vertex `v`.
    pub fn label_string(&self, v: usize) -> String {
        let parts: Vec<String> = (0..self.groups.len())
            .map(|g| self.sub_label_string(g, self.sub_label(v, g)))
            .collect();
        format!("({})", parts.join(","))
    }
}

/// Which part of a block to select.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockSel {
    Whole,
    /// Fixes the `D2` sub-label (1-based) inside the block.
    Row(usize),
    /// Fixes the `D1` sub-label (1-based) inside the block.
    Column(usize),
}

/// A block (1-based index over common sub-labels) or one of its sub-blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockRef {
    pub k: usize,
    pub sel: BlockSel,
}

impl BlockRef {
    pub fn block(k: usize) -> BlockRef {
        BlockRef { k, sel: BlockSel::Whole }
    }

    pub fn row(k: usize, j: usize) -> BlockRef {
        BlockRef { k, sel: BlockSel::Row(j) }
    }

    pub fn column(k: usize, i: usize) -> BlockRef {
        BlockRef { k, sel: BlockSel::Column(i) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EdgeKind {
    IntraBlock,
    InterBlock,
}

/// `Γ_t(D)` with a grouped labeling.
#[derive(Clone, Debug)]
pub struct ConfusionGraph {
    labeling: Labeling,
    /// Realization-space mask of the side information of each receiver.
    side: Vec<u64>,
    graph: Option<Graph>,
}

impl ConfusionGraph {
    /// Two-sender labeling `(b1, b2, b3)` of a problem's confusion graph.
    pub fn build(p: &Problem) -> Result<ConfusionGraph> {
        let mp = partition(p);
        ConfusionGraph::build_grouped(&p.digraph(), vec![mp.p1, mp.p2, mp.p3], p.t())
    }

    /// Single-group labeling; vertex index equals the packed realization.
    pub fn build_ssuic(d: &Digraph, t: u32) -> Result<ConfusionGraph> {
        ConfusionGraph::build_grouped(d, vec![(0..d.n()).collect()], t)
    }

    pub fn build_grouped(d: &Digraph, groups: Vec<Vec<usize>>, t: u32) -> Result<ConfusionGraph> {
        let mut g = ConfusionGraph::implicit(d, groups, t)?;
        let tn = g.labeling.bits() as usize;
        if tn > EXPLICIT_LIMIT_TN {
            return Err(Error::Guardrail { tn, limit: EXPLICIT_LIMIT_TN });
        }
        g.graph = Some(g.materialize());
        Ok(g)
    }

    /// Adjacency evaluated on demand; only block-local queries are practical.
    pub fn implicit(d: &Digraph, groups: Vec<Vec<usize>>, t: u32) -> Result<ConfusionGraph> {
        let tn = t as usize * d.n();
        if t < 1 {
            return Err(Error::InvalidProblem("t must be at least 1".into()));
        }
        if tn > IMPLICIT_LIMIT_TN {
            return Err(Error::Guardrail { tn, limit: IMPLICIT_LIMIT_TN });
        }
        let labeling = Labeling::new(t, d.n(), groups);
        let tm = (1u64 << t) - 1;
        let side = (0..d.n())
            .map(|r| {
                d.out_neighbors(r)
                    .into_iter()
                    .fold(0u64, |m, j| m | tm << (j * t as usize))
            })
            .collect();
        Ok(ConfusionGraph { labeling, side, graph: None })
    }

    fn materialize(&self) -> Graph {
        let l = &self.labeling;
        let nv = l.vertex_count();
        let real: Vec<u64> = (0..nv).map(|v| l.realization(v)).collect();
        let mut vert = vec![0usize; nv];
        for (v, &x) in real.iter().enumerate() {
            vert[x as usize] = v;
        }
        let all = if l.bits() == 64 { u64::MAX } else { (1u64 << l.bits()) - 1 };
        let tm = l.tmask();
        let t = l.t as usize;
        let mut g = Graph::new(nv);
        for x in 0..nv as u64 {
            for (r, &side) in self.side.iter().enumerate() {
                let own = tm << (r * t);
                let free = all & !side & !own;
                // Partners differ at x_r and possibly at messages r does not know.
                let mut sub = free;
                loop {
                    let mut o = own;
                    while o != 0 {
                        let delta = sub | o;
                        let y = x ^ delta;
                        if y > x {
                            g.add_edge(vert[x as usize], vert[y as usize]);
                        }
                        o = (o - 1) & own;
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & free;
                }
            }
        }
        g
    }

    pub fn labeling(&self) -> &Labeling {
        &self.labeling
    }

    pub fn t(&self) -> u32 {
        self.labeling.t
    }

    pub fn n(&self) -> usize {
        self.labeling.n
    }

    pub fn vertex_count(&self) -> usize {
        self.labeling.vertex_count()
    }

    /// The materialized graph; `None` for implicit graphs.
    pub fn graph(&self) -> Option<&Graph> {
        self.graph.as_ref()
    }

    /// Materialized graph or a guardrail error.
    pub fn explicit(&self) -> Result<&Graph> {
        self.graph.as_ref().ok_or(Error::Guardrail {
            tn: self.labeling.bits() as usize,
            limit: EXPLICIT_LIMIT_TN,
        })
    }

    /// Receivers at which the realizations of `u` and `v` are confused.
    pub fn confusing_receivers(&self, u: usize, v: usize) -> Vec<usize> {
        let x = self.labeling.realization(u) ^ self.labeling.realization(v);
        let t = self.labeling.t as usize;
        let tm = self.labeling.tmask();
        (0..self.side.len())
            .filter(|&r| x >> (r * t) & tm != 0 && x & self.side[r] == 0)
            .collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        match &self.graph {
            Some(g) => u != v && g.has_edge(u, v),
            None => !self.confusing_receivers(u, v).is_empty(),
        }
    }

    /// Vertices whose sub-labels match `fixed` (one optional value per group),
    /// ascending.
    pub fn vertices_with(&self, fixed: &[Option<usize>]) -> Vec<usize> {
        let l = &self.labeling;
        assert_eq!(fixed.len(), l.groups.len());
        (0..l.vertex_count())
            .filter(|&v| {
                fixed
                    .iter()
                    .enumerate()
                    .all(|(g, f)| f.is_none_or(|s| l.sub_label(v, g) == s))
            })
            .collect()
    }

    pub fn block_count(&self) -> usize {
        self.labeling.group_size(self.labeling.groups.len() - 1)
    }

    /// Vertex set of a block or sub-block (two-sender labeling only).
    pub fn block_vertices(&self, r: BlockRef) -> Result<Vec<usize>> {
        let l = &self.labeling;
        let ng = l.groups.len();
        if r.k < 1 || r.k > self.block_count() {
            return Err(Error::OutOfRange(format!("block {} of {}", r.k, self.block_count())));
        }
        let mut fixed = vec![None; ng];
        fixed[ng - 1] = Some(r.k - 1);
        match r.sel {
            BlockSel::Whole => {}
            BlockSel::Row(j) | BlockSel::Column(j) => {
                if ng != 3 {
                    return Err(Error::Dimension("sub-blocks need a three-group labeling".into()));
                }
                let g = if matches!(r.sel, BlockSel::Row(_)) { 1 } else { 0 };
                if j < 1 || j > l.group_size(g) {
                    return Err(Error::OutOfRange(format!("sub-block {j} of {}", l.group_size(g))));
                }
                fixed[g] = Some(j - 1);
            }
        }
        Ok(self.vertices_with(&fixed))
    }

    /// Induced subgraph on a block or sub-block, vertices in ascending order.
    pub fn block(&self, r: BlockRef) -> Result<(Vec<usize>, Graph)> {
        let vs = self.block_vertices(r)?;
        Ok((vs.clone(), self.induced(&vs)?))
    }

    /// Induced subgraph on arbitrary vertices; works for implicit graphs too.
    pub fn induced(&self, vs: &[usize]) -> Result<Graph> {
        if let Some(g) = &self.graph {
            return Ok(g.induced(vs));
        }
        if vs.len() > 1 << EXPLICIT_LIMIT_TN {
            return Err(Error::Guardrail { tn: self.labeling.bits() as usize, limit: EXPLICIT_LIMIT_TN });
        }
        let mut g = Graph::new(vs.len());
        for a in 0..vs.len() {
            for b in a + 1..vs.len() {
                if self.has_edge(vs[a], vs[b]) {
                    g.add_edge(a, b);
                }
            }
        }
        Ok(g)
    }

    /// Whether an edge stays inside one block.
    pub fn classify_edge(&self, u: usize, v: usize) -> Result<EdgeKind> {
        let nv = self.vertex_count();
        if u >= nv || v >= nv {
            return Err(Error::OutOfRange(format!("vertex out of range 0..{nv}")));
        }
        if !self.has_edge(u, v) {
            return Err(Error::NotAnEdge(u, v));
        }
        let last = self.labeling.groups.len() - 1;
        if self.labeling.sub_label(u, last) == self.labeling.sub_label(v, last) {
            Ok(EdgeKind::IntraBlock)
        } else {
            Ok(EdgeKind::InterBlock)
        }
    }

    /// Graphviz rendering with one cluster per block.
    pub fn to_dot(&self) -> Result<String> {
        let g = self.explicit()?;
        let l = &self.labeling;
        let last = l.groups.len() - 1;
        let mut out = String::from("graph confusion {\n  node [shape=box, fontname=\"monospace\"];\n");
        for k in 0..self.block_count() {
            let _ = writeln!(out, "  subgraph cluster_block{} {{", k + 1);
            let _ = writeln!(out, "    label=\"block {} ({})\";", k + 1, l.sub_label_string(last, k));
            for v in (0..l.vertex_count()).filter(|&v| l.sub_label(v, last) == k) {
                let _ = writeln!(out, "    v{} [label=\"{}\"];", v, l.label_string(v));
            }
            out.push_str("  }\n");
        }
        for (u, v) in g.edges() {
            let _ = writeln!(out, "  v{u} -- v{v};");
        }
        out.push_str("}\n");
        Ok(out)
    }

    /// One line per vertex: label, then neighbour labels.
    pub fn adjacency_dump(&self) -> Result<String> {
        let g = self.explicit()?;
        let l = &self.labeling;
        let mut out = String::new();
        for v in 0..l.vertex_count() {
            let nb: Vec<String> = g.neighbors(v).map(|w| l.label_string(w)).collect();
            let _ = writeln!(out, "{}: {}", l.label_string(v), nb.join(" "));
        }
        Ok(out)
    }
}

/// Whether two message tuples (one `t`-bit value per receiver) are confused at
/// some receiver of `d`.
pub fn confusable(u: &[u64], v: &[u64], d: &Digraph) -> Result<bool> {
    if u.len() != d.n() || v.len() != d.n() {
        return Err(Error::Dimension(format!(
            "tuples of length {} and {} for {} receivers",
            u.len(),
            v.len(),
            d.n()
        )));
    }
    Ok((0..d.n()).any(|r| u[r] != v[r] && d.out_neighbors(r).iter().all(|&j| u[j] == v[j])))
}

/// Exact chromatic number of `Γ_t(D)` with bounds when over budget.
pub fn chromatic_ssuic(d: &Digraph, t: u32) -> Result<Chromatic> {
    let g = ConfusionGraph::build_ssuic(d, t)?;
    Ok(chromatic_number(g.explicit()?))
}

/// Finite-length single-sender rate `ceil(log2 χ(Γ_t(D))) / t`.
pub fn beta_t_ssuic(d: &Digraph, t: u32) -> Result<Rate> {
    let c = chromatic_ssuic(d, t)?;
    match c.value() {
        Some(chi) => Ok(Rate::from_bits(ceil_log2(chi as u64), t)),
        None => Err(Error::BudgetExceeded(format!(
            "chromatic number only bounded in [{}, {}]",
            c.lower, c.upper
        ))),
    }
}

/// Lower and upper bounds on the single-sender rate; equal when exact.
pub fn beta_t_ssuic_bounds(d: &Digraph, t: u32) -> Result<(Rate, Rate)> {
    let c = chromatic_ssuic(d, t)?;
    Ok((
        Rate::from_bits(ceil_log2(c.lower as u64), t),
        Rate::from_bits(ceil_log2(c.upper as u64), t),
    ))
}
