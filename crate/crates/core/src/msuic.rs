//! Multi-sender instances where every shared message is held by all senders:
//! `N'` private pools plus one common pool.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::confusion::ConfusionGraph;
use crate::digraph::Digraph;
use crate::error::{invalid, Error, Result};
use crate::parse;
use crate::problem_model::{join1, side_info_from_records, sender_set_from_records, Problem};
use crate::rate::Rate;
use crate::search::{self, Maps};
use crate::two_sender_coloring::{DEFAULT_SEARCH_NODES, SEARCH_LIMIT_TN};

/// Receivers, `N'` private pools and the common pool (all 0-based).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MsProblem {
    side_info: Vec<Vec<usize>>,
    pools: Vec<Vec<usize>>,
    common: Vec<usize>,
    t: u32,
}

impl MsProblem {
    /// Builds an instance from the sender message sets. Every message must be
    /// held by exactly one sender or by all of them, and each sender needs at
    /// least one private message.
    pub fn new(side_info: Vec<Vec<usize>>, sets: Vec<Vec<usize>>, t: u32) -> Result<MsProblem> {
        let k = sets.len();
        if k < 2 {
            return Err(invalid("at least two senders are required"));
        }
        // Receiver records and the size guardrail are checked as for one sender.
        let n = side_info.len();
        let side_info = Problem::new(side_info, (0..n).collect(), Vec::new(), t)?.side_info().to_vec();
        let mut holders = vec![Vec::new(); n];
        for (s, set) in sets.iter().enumerate() {
            for &j in set {
                if j >= n {
                    return Err(invalid(format!("M{} contains unknown message {}", s + 1, j + 1)));
                }
                if holders[j].last() != Some(&s) {
                    holders[j].push(s);
                }
            }
        }
        let mut pools = vec![Vec::new(); k];
        let mut common = Vec::new();
        for (j, h) in holders.iter().enumerate() {
            match h.len() {
                0 => return Err(invalid(format!("message {} is held by no sender", j + 1))),
                1 => pools[h[0]].push(j),
                c if c == k => common.push(j),
                _ => {
                    return Err(invalid(format!(
                        "message {} is shared by some but not all senders",
                        j + 1
                    )))
                }
            }
        }
        if let Some(s) = pools.iter().position(|p| p.is_empty()) {
            return Err(invalid(format!("sender {} has no private message", s + 1)));
        }
        Ok(MsProblem { side_info, pools, common, t })
    }

    /// The same instance viewed with two senders.
    pub fn from_problem(p: &Problem) -> Result<MsProblem> {
        MsProblem::new(p.side_info().to_vec(), vec![p.m1().to_vec(), p.m2().to_vec()], p.t())
    }

    pub fn n(&self) -> usize {
        self.side_info.len()
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn n_senders(&self) -> usize {
        self.pools.len()
    }

    pub fn side_info(&self) -> &[Vec<usize>] {
        &self.side_info
    }

    /// Private pool of sender `s` (0-based).
    pub fn pool(&self, s: usize) -> &[usize] {
        &self.pools[s]
    }

    pub fn common(&self) -> &[usize] {
        &self.common
    }

    /// Messages held by sender `s` (0-based), ascending.
    pub fn sender_set(&self, s: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.pools[s].iter().chain(&self.common).copied().collect();
        v.sort_unstable();
        v
    }

    pub fn digraph(&self) -> Digraph {
        Digraph::from_out_lists(&self.side_info)
    }

    /// Labeling groups: the private pools in sender order, then the common pool.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut g = self.pools.clone();
        g.push(self.common.clone());
        g
    }

    /// True when no common-pool receiver knows a private message.
    pub fn common_is_sink(&self) -> bool {
        self.common
            .iter()
            .all(|&r| self.side_info[r].iter().all(|j| self.common.contains(j)))
    }

    pub fn to_text(&self) -> String {
        let recs: Vec<String> = self
            .side_info
            .iter()
            .enumerate()
            .map(|(r, k)| if k.is_empty() { format!("({})", r + 1) } else { format!("({}|{})", r + 1, join1(k)) })
            .collect();
        let sets: Vec<String> = (0..self.n_senders())
            .map(|s| format!("M{}={{{}}}", s + 1, join1(&self.sender_set(s))))
            .collect();
        format!("{}; {}; t={}", recs.join(","), sets.join("; "), self.t)
    }
}

impl fmt::Display for MsProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses the multi-sender format, e.g.
/// `(1|4),(2|4),(3|4),(4); M1={1,4}; M2={2,4}; M3={3,4}; t=1`.
pub fn parse_ms_problem(text: &str) -> Result<MsProblem> {
    let rec = parse::records(text)?;
    let side_info = side_info_from_records(&rec)?;
    let n = side_info.len();
    let k = rec.senders.len();
    if let Some((&s, &(_, line))) = rec.senders.iter().enumerate().find(|(i, (&s, _))| s != i + 1).map(|(_, e)| e) {
        return Err(Error::Parse { line, msg: format!("sender sets must be numbered 1..{k}, found M{s}") });
    }
    let sets = (1..=k).map(|s| sender_set_from_records(&rec, s, n)).collect::<Result<Vec<_>>>()?;
    MsProblem::new(side_info, sets, rec.t.unwrap_or(1))
}

/// Confusion graph labeled by the private pools and the common pool.
pub fn ms_confusion_graph(p: &MsProblem) -> Result<ConfusionGraph> {
    ConfusionGraph::build_grouped(&p.digraph(), p.groups(), p.t())
}

/// Sender maps indexed `[sender][common sub-label][private sub-label]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MsColoring {
    pub maps: Vec<Vec<Vec<u32>>>,
}

impl MsColoring {
    pub fn n_senders(&self) -> usize {
        self.maps.len()
    }

    pub fn palette_sizes(&self) -> Vec<usize> {
        search::palette_sizes(&self.maps)
    }

    pub fn bits(&self) -> Vec<u32> {
        search::bits_of(&self.maps)
    }

    pub fn rate(&self, t: u32) -> Rate {
        Rate::from_bits(self.bits().iter().sum(), t)
    }

    /// Color tuple of a vertex.
    pub fn tuple_of(&self, g: &ConfusionGraph, v: usize) -> Vec<u32> {
        search::tuple_of(g, &self.maps, v)
    }

    /// Number of distinct tuples over all vertices.
    pub fn tuple_count(&self, g: &ConfusionGraph) -> usize {
        let mut seen: Vec<Vec<u32>> = (0..g.vertex_count()).map(|v| self.tuple_of(g, v)).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

/// Kind of an offending edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MsEdgeCondition {
    /// Endpoints differ only in the private pool of this sender (1-based), so
    /// that sender's colors must differ.
    Private(usize),
    /// Any other edge: the tuples must differ.
    General,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MsWitness {
    pub u: usize,
    pub v: usize,
    pub u_label: String,
    pub v_label: String,
    pub condition: MsEdgeCondition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MsVerdict {
    Valid,
    Invalid(MsWitness),
}

impl MsVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, MsVerdict::Valid)
    }
}

fn ms_condition(g: &ConfusionGraph, u: usize, v: usize) -> MsEdgeCondition {
    let l = g.labeling();
    let differ: Vec<usize> = (0..l.groups().len()).filter(|&h| l.sub_label(u, h) != l.sub_label(v, h)).collect();
    match differ.as_slice() {
        [s] if *s + 1 < l.groups().len() => MsEdgeCondition::Private(s + 1),
        _ => MsEdgeCondition::General,
    }
}

/// Checks that adjacent vertices receive distinct tuples.
pub fn ms_validate(g: &ConfusionGraph, c: &MsColoring) -> Result<MsVerdict> {
    search::check_shape(g, &c.maps)?;
    Ok(match search::first_conflict(g, &c.maps)? {
        None => MsVerdict::Valid,
        Some((u, v)) => {
            let l = g.labeling();
            MsVerdict::Invalid(MsWitness {
                u,
                v,
                u_label: l.label_string(u),
                v_label: l.label_string(v),
                condition: ms_condition(g, u, v),
            })
        }
    })
}

/// Optimal multi-sender coloring.
#[derive(Clone, Debug)]
pub struct MsMinimized {
    pub coloring: MsColoring,
    pub bits: Vec<u32>,
    pub rate: Rate,
    pub exact: bool,
}

/// Minimizes `sum_s ceil(log2|J_s|)` over proper colorings.
pub fn ms_minimize(g: &ConfusionGraph) -> Result<MsMinimized> {
    let tn = g.labeling().bits() as usize;
    if tn > SEARCH_LIMIT_TN {
        return Err(Error::BudgetExceeded(format!(
            "multi-sender search is limited to t*N <= {SEARCH_LIMIT_TN}, got {tn}"
        )));
    }
    let s = search::minimize_senders(g, DEFAULT_SEARCH_NODES)?;
    Ok(finish(s.maps, g.t(), s.exact))
}

fn finish(maps: Maps, t: u32, exact: bool) -> MsMinimized {
    let coloring = MsColoring { maps };
    let bits = coloring.bits();
    let rate = coloring.rate(t);
    MsMinimized { coloring, bits, rate, exact }
}

/// Product coloring: each private pool colored optimally, the common pool's
/// colors split across senders as mixed-radix digits so the bit sum is least.
pub fn ms_structured_coloring(p: &MsProblem, g: &ConfusionGraph) -> Result<MsColoring> {
    if !p.common_is_sink() {
        return Err(Error::Precondition("product coloring needs no arcs out of the common pool".into()));
    }
    if g.labeling().groups() != p.groups().as_slice() {
        return Err(Error::Dimension("confusion graph labeling does not match the instance pools".into()));
    }
    Ok(MsColoring { maps: search::product_maps(g)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem_model::parse_problem;
    use crate::two_sender_coloring::{minimize, structured_product_coloring, validate, TwoSenderColoring};

    pub(crate) fn three_pools() -> MsProblem {
        parse_ms_problem("(1|2,3,4,5),(2|1,3,4,5),(3|1,2,4,5),(4|5),(5|4); M1={1,4,5}; M2={2,4,5}; M3={3,4,5}; t=1")
            .unwrap()
    }

    #[test]
    fn parse_and_pools() {
        let p = three_pools();
        assert_eq!(p.n_senders(), 3);
        assert_eq!(p.pool(2), &[2]);
        assert_eq!(p.common(), &[3, 4]);
        assert!(p.common_is_sink());
        assert_eq!(parse_ms_problem(&p.to_text()).unwrap(), p);
        for bad in [
            "(1),(2),(3); M1={1,3}; M2={2,3}; M3={3}; t=1",
            "(1),(2),(3); M1={1,3}; M2={2}; M3={3}; t=1",
            "(1),(2); M1={1,2}; M3={2}; t=1",
            "(1),(2); M1={1,2}; t=1",
        ] {
            assert!(parse_ms_problem(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn three_pools_product_coloring_is_valid_and_optimal() {
        let p = three_pools();
        let g = ms_confusion_graph(&p).unwrap();
        let c = ms_structured_coloring(&p, &g).unwrap();
        assert!(ms_validate(&g, &c).unwrap().is_valid());
        // 2 * 2 * 2 private colors times 2 for the common 2-cycle
        assert_eq!(c.tuple_count(&g), 16);
        let m = ms_minimize(&g).unwrap();
        assert!(m.exact);
        assert_eq!(m.rate, c.rate(1));
        assert_eq!(m.rate, Rate::integer(4));
    }

    #[test]
    fn constant_tuples_are_rejected() {
        let p = three_pools();
        let g = ms_confusion_graph(&p).unwrap();
        let c = MsColoring { maps: (0..3).map(|_| vec![vec![0; 2]; 4]).collect() };
        match ms_validate(&g, &c).unwrap() {
            MsVerdict::Invalid(w) => assert!(g.has_edge(w.u, w.v)),
            MsVerdict::Valid => panic!("constant coloring accepted"),
        }
        let short = MsColoring { maps: vec![vec![vec![0; 2]; 4]; 2] };
        assert!(ms_validate(&g, &short).is_err());
    }

    #[test]
    fn single_common_message_without_side_info_costs_three() {
        let p = parse_ms_problem("(1),(2),(3); M1={1,3}; M2={2,3}; t=1").unwrap();
        let m = ms_minimize(&ms_confusion_graph(&p).unwrap()).unwrap();
        assert_eq!(m.rate, Rate::integer(3));
    }

    #[test]
    fn full_side_info_costs_one() {
        let p = parse_ms_problem("(1|2,3),(2|1,3),(3|1,2); M1={1}; M2={2}; M3={3}; t=1").unwrap();
        let g = ms_confusion_graph(&p).unwrap();
        let m = ms_minimize(&g).unwrap();
        // each sender must still resolve its own receiver
        assert_eq!(m.bits, vec![1, 1, 1]);
        let c = ms_structured_coloring(&p, &g).unwrap();
        assert_eq!(c.bits(), vec![1, 1, 1]);
    }

    #[test]
    fn two_senders_match_the_two_sender_path() {
        let p = parse_problem("(1|2),(2|1),(3|4),(4|3); M1={1,3,4}; M2={2,3,4}; t=1").unwrap();
        let mp = MsProblem::from_problem(&p).unwrap();
        let g2 = ConfusionGraph::build(&p).unwrap();
        let gm = ms_confusion_graph(&mp).unwrap();
        let a = minimize(&g2).unwrap();
        let b = ms_minimize(&gm).unwrap();
        assert_eq!(a.coloring.to_maps(), b.coloring.maps);
        let sa = structured_product_coloring(&p, &g2).unwrap();
        let sb = ms_structured_coloring(&mp, &gm).unwrap();
        assert_eq!(sa.to_maps(), sb.maps);
        let bad = TwoSenderColoring { j1: vec![vec![0, 0]; 4], j2: vec![vec![0, 0]; 4] };
        assert_eq!(
            validate(&g2, &bad).unwrap().is_valid(),
            ms_validate(&gm, &MsColoring { maps: bad.to_maps() }).unwrap().is_valid()
        );
    }
}
