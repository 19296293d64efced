//! Two-sender colorings of confusion graphs: validation, exact optimization and
//! the block-product construction.

use std::collections::HashSet;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::confusion::ConfusionGraph;
use crate::error::{Error, Result};
use crate::problem_model::{classify_problem, CaseLabel, Problem};
use crate::rate::{ceil_log2, Rate};
use crate::search::{self, Maps};

/// Default cap on `t*N` for the exact search.
pub const SEARCH_LIMIT_TN: usize = 8;
/// Default node budget per feasibility run.
pub const DEFAULT_SEARCH_NODES: u64 = 5_000_000;

/// Sender colorings indexed `[common sub-label][private sub-label]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSenderColoring {
    pub j1: Vec<Vec<u32>>,
    pub j2: Vec<Vec<u32>>,
}

impl TwoSenderColoring {
    pub(crate) fn from_maps(mut maps: Maps) -> TwoSenderColoring {
        assert_eq!(maps.len(), 2);
        let j2 = maps.pop().unwrap();
        let j1 = maps.pop().unwrap();
        TwoSenderColoring { j1, j2 }
    }

    pub(crate) fn to_maps(&self) -> Maps {
        vec![self.j1.clone(), self.j2.clone()]
    }

    /// Colors of sender 1 for `(b1, b3)`.
    pub fn color1(&self, b1: usize, b3: usize) -> u32 {
        self.j1[b3][b1]
    }

    pub fn color2(&self, b2: usize, b3: usize) -> u32 {
        self.j2[b3][b2]
    }

    pub fn palette_sizes(&self) -> (usize, usize) {
        let p = search::palette_sizes(&self.to_maps());
        (p[0], p[1])
    }

    /// Color pair of a vertex.
    pub fn pair_of(&self, g: &ConfusionGraph, v: usize) -> (u32, u32) {
        let l = g.labeling();
        let (b1, b2, b3) = (l.sub_label(v, 0), l.sub_label(v, 1), l.sub_label(v, 2));
        (self.color1(b1, b3), self.color2(b2, b3))
    }

    /// Number of distinct ordered pairs over all vertices.
    pub fn pair_count(&self, g: &ConfusionGraph) -> usize {
        (0..g.vertex_count())
            .map(|v| self.pair_of(g, v))
            .collect::<HashSet<_>>()
            .len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("colorings serialize")
    }

    pub fn from_json(s: &str) -> Result<TwoSenderColoring> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Bit cost of a coloring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ColoringCost {
    pub bits1: u32,
    pub bits2: u32,
    pub rate: Rate,
}

pub fn coloring_cost(c: &TwoSenderColoring, t: u32) -> ColoringCost {
    let (p1, p2) = c.palette_sizes();
    cost_from_palettes(p1, p2, t)
}

pub fn cost_from_palettes(p1: usize, p2: usize, t: u32) -> ColoringCost {
    let bits1 = ceil_log2(p1 as u64);
    let bits2 = ceil_log2(p2 as u64);
    ColoringCost { bits1, bits2, rate: Rate::from_bits(bits1 + bits2, t) }
}

/// Which necessary condition an offending edge falls under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EdgeCondition {
    /// Endpoints share `(b2, b3)`: sender 1 colors must differ.
    PrivateOne,
    /// Endpoints share `(b1, b3)`: sender 2 colors must differ.
    PrivateTwo,
    /// Same block, confused inside both private parts: both colors must differ.
    BothPrivate,
    /// Endpoints share `(b1, b2)`: at least one color must differ.
    Common,
    /// Any other edge: the pairs must differ.
    General,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub u: usize,
    pub v: usize,
    pub u_label: String,
    pub v_label: String,
    pub condition: EdgeCondition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Valid,
    Invalid(Witness),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

fn edge_condition(g: &ConfusionGraph, u: usize, v: usize) -> EdgeCondition {
    let l = g.labeling();
    let same = |grp: usize| l.sub_label(u, grp) == l.sub_label(v, grp);
    if same(1) && same(2) {
        EdgeCondition::PrivateOne
    } else if same(0) && same(2) {
        EdgeCondition::PrivateTwo
    } else if same(0) && same(1) {
        EdgeCondition::Common
    } else if same(2) {
        let groups = l.groups();
        let rs = g.confusing_receivers(u, v);
        let in1 = rs.iter().any(|r| groups[0].contains(r));
        let in2 = rs.iter().any(|r| groups[1].contains(r));
        if in1 && in2 {
            EdgeCondition::BothPrivate
        } else {
            EdgeCondition::General
        }
    } else {
        EdgeCondition::General
    }
}

fn condition_holds(cond: EdgeCondition, a: (u32, u32), b: (u32, u32)) -> bool {
    match cond {
        EdgeCondition::PrivateOne => a.0 != b.0 && a.1 == b.1,
        EdgeCondition::PrivateTwo => a.0 == b.0 && a.1 != b.1,
        EdgeCondition::BothPrivate => a.0 != b.0 && a.1 != b.1,
        EdgeCondition::Common | EdgeCondition::General => a != b,
    }
}

/// Checks that adjacent vertices get distinct pairs and that every edge meets
/// the necessary condition of its kind. Returns the first offending edge.
pub fn validate(g: &ConfusionGraph, c: &TwoSenderColoring) -> Result<Verdict> {
    if g.labeling().groups().len() != 3 {
        return Err(Error::Dimension("two-sender colorings need a three-group labeling".into()));
    }
    search::check_shape(g, &c.to_maps())?;
    let graph = g.explicit()?;
    for (u, v) in graph.edges() {
        let cond = edge_condition(g, u, v);
        if !condition_holds(cond, c.pair_of(g, u), c.pair_of(g, v)) {
            let l = g.labeling();
            return Ok(Verdict::Invalid(Witness {
                u,
                v,
                u_label: l.label_string(u),
                v_label: l.label_string(v),
                condition: cond,
            }));
        }
    }
    Ok(Verdict::Valid)
}

/// Optimal coloring together with its cost.
#[derive(Clone, Debug)]
pub struct Minimized {
    pub coloring: TwoSenderColoring,
    pub cost: ColoringCost,
    /// False when a search budget cut the proof of optimality short.
    pub exact: bool,
}

/// Minimizes `ceil(log2|J1|) + ceil(log2|J2|)` with the default budgets.
pub fn minimize(g: &ConfusionGraph) -> Result<Minimized> {
    minimize_with(g, SEARCH_LIMIT_TN, DEFAULT_SEARCH_NODES)
}

/// Bit budgets are tried in ascending total, splits in ascending `bits1`; each
/// feasibility run backtracks over the label colors block by block with
/// first-use color symmetry breaking. The first coloring found is returned.
pub fn minimize_with(g: &ConfusionGraph, max_tn: usize, node_limit: u64) -> Result<Minimized> {
    if g.labeling().groups().len() != 3 {
        return Err(Error::Dimension("two-sender colorings need a three-group labeling".into()));
    }
    let tn = g.labeling().bits() as usize;
    let (maps, exact) = if tn > max_tn {
        (search::product_maps(g)?, false)
    } else {
        let s = search::minimize_senders(g, node_limit)?;
        (s.maps, s.exact)
    };
    let coloring = TwoSenderColoring::from_maps(maps);
    let cost = coloring_cost(&coloring, g.t());
    Ok(Minimized { coloring, cost, exact })
}

/// Block-product coloring for instances whose common part has no out-arcs or
/// whose interaction is acyclic.
pub fn structured_product_coloring(p: &Problem, g: &ConfusionGraph) -> Result<TwoSenderColoring> {
    let class = classify_problem(p);
    if !(class.common_is_sink() || class.case_label == CaseLabel::I) {
        return Err(Error::Precondition(format!(
            "block-product coloring needs an acyclic interaction or no arcs out of D3, got {class}"
        )));
    }
    Ok(TwoSenderColoring::from_maps(search::product_maps(g)?))
}

/// `ceil(a + b)` and `eps = ceil(a + b) - ceil(a) - ceil(b)`, which lies in `{-1, 0}`.
pub fn ceil_sum_epsilon(a: Ratio<i64>, b: Ratio<i64>) -> (i64, i64) {
    let s = (a + b).ceil().to_integer();
    (s, s - a.ceil().to_integer() - b.ceil().to_integer())
}
