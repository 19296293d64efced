//! Two-sender instances, their three sub-problems and the interaction taxonomy.
//!
//! Indices are 0-based in the API and 1-based in the text format.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::digraph::{mask_of, Digraph, MAX_VERTICES};
use crate::error::{invalid, Error, Result};
use crate::parse;

/// Default cap on `t * N`; confusion graphs have `2^(tN)` vertices.
pub const DEFAULT_MAX_TN: usize = 16;

/// A two-sender unicast instance: receiver `r` requests `x_r` and knows `side_info[r]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Problem {
    n: usize,
    side_info: Vec<Vec<usize>>,
    m1: Vec<usize>,
    m2: Vec<usize>,
    t: u32,
}

impl Problem {
    pub fn new(side_info: Vec<Vec<usize>>, m1: Vec<usize>, m2: Vec<usize>, t: u32) -> Result<Problem> {
        Problem::with_limit(side_info, m1, m2, t, DEFAULT_MAX_TN)
    }

    /// Like [`Problem::new`] with an explicit `t * N` guardrail.
    pub fn with_limit(
        mut side_info: Vec<Vec<usize>>,
        m1: Vec<usize>,
        m2: Vec<usize>,
        t: u32,
        max_tn: usize,
    ) -> Result<Problem> {
        let n = side_info.len();
        if t < 1 {
            return Err(invalid("t must be at least 1"));
        }
        if n > MAX_VERTICES {
            return Err(invalid(format!("at most {MAX_VERTICES} receivers are supported")));
        }
        if n * t as usize > max_tn {
            return Err(Error::Guardrail { tn: n * t as usize, limit: max_tn });
        }
        for (r, known) in side_info.iter_mut().enumerate() {
            known.sort_unstable();
            known.dedup();
            if let Some(&bad) = known.iter().find(|&&j| j >= n) {
                return Err(invalid(format!("receiver {} knows unknown message {}", r + 1, bad + 1)));
            }
            if known.contains(&r) {
                return Err(invalid(format!("receiver {} already knows its own request", r + 1)));
            }
        }
        let m1 = normalize_set(m1, n, "M1")?;
        let m2 = normalize_set(m2, n, "M2")?;
        let held = mask_of(&m1) | mask_of(&m2);
        if let Some(missing) = (0..n).find(|&j| held >> j & 1 == 0) {
            return Err(invalid(format!("message {} is held by neither sender", missing + 1)));
        }
        Ok(Problem { n, side_info, m1, m2, t })
    }

    pub fn from_digraph(d: &Digraph, m1: Vec<usize>, m2: Vec<usize>, t: u32) -> Result<Problem> {
        let side_info = (0..d.n()).map(|u| d.out_neighbors(u)).collect();
        Problem::new(side_info, m1, m2, t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn tn(&self) -> usize {
        self.n * self.t as usize
    }

    pub fn side_info(&self) -> &[Vec<usize>] {
        &self.side_info
    }

    pub fn m1(&self) -> &[usize] {
        &self.m1
    }

    pub fn m2(&self) -> &[usize] {
        &self.m2
    }

    /// Message set of sender `s` in `{1, 2}`.
    pub fn sender_set(&self, s: usize) -> &[usize] {
        match s {
            1 => &self.m1,
            2 => &self.m2,
            _ => panic!("sender index must be 1 or 2"),
        }
    }

    pub fn digraph(&self) -> Digraph {
        Digraph::from_out_lists(&self.side_info)
    }

    /// Same instance with a different message length, subject to `max_tn`.
    pub fn with_t(&self, t: u32, max_tn: usize) -> Result<Problem> {
        Problem::with_limit(self.side_info.clone(), self.m1.clone(), self.m2.clone(), t, max_tn)
    }

    /// Same instance without the arc `(u, v)`.
    pub fn without_arc(&self, u: usize, v: usize) -> Problem {
        let mut p = self.clone();
        p.side_info[u].retain(|&j| j != v);
        p
    }

    /// Relabels the senders (M1 and M2 exchanged).
    pub fn swap_senders(&self) -> Problem {
        let mut p = self.clone();
        std::mem::swap(&mut p.m1, &mut p.m2);
        p
    }

    /// Text form accepted by [`parse_problem`].
    pub fn to_text(&self) -> String {
        let recv: Vec<String> = self
            .side_info
            .iter()
            .enumerate()
            .map(|(r, k)| format!("({}|{})", r + 1, join1(k)))
            .collect();
        format!(
            "{}; M1={{{}}}; M2={{{}}}; t={}",
            recv.join(","),
            join1(&self.m1),
            join1(&self.m2),
            self.t
        )
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Comma-joined 1-based indices.
pub(crate) fn join1(v: &[usize]) -> String {
    v.iter().map(|j| (j + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn normalize_set(mut v: Vec<usize>, n: usize, name: &str) -> Result<Vec<usize>> {
    v.sort_unstable();
    v.dedup();
    if let Some(&bad) = v.iter().find(|&&j| j >= n) {
        return Err(invalid(format!("{name} contains unknown message {}", bad + 1)));
    }
    Ok(v)
}

/// Converts tokenized receiver records into 0-based side-information lists.
pub(crate) fn side_info_from_records(rec: &parse::Records) -> Result<Vec<Vec<usize>>> {
    let n = rec.receivers.len();
    let mut side_info: Vec<Option<Vec<usize>>> = vec![None; n];
    for (r, known, line) in &rec.receivers {
        let line = *line;
        if *r < 1 || *r > n {
            return Err(Error::Parse { line, msg: format!("receiver {r} out of range 1..{n}") });
        }
        if side_info[r - 1].is_some() {
            return Err(Error::Parse { line, msg: format!("receiver {r} listed twice") });
        }
        let mut set = Vec::with_capacity(known.len());
        for &j in known {
            if j < 1 || j > n {
                return Err(Error::Parse { line, msg: format!("message {j} out of range 1..{n}") });
            }
            if j == *r {
                return Err(Error::Parse { line, msg: format!("receiver {r} cannot know its own request") });
            }
            set.push(j - 1);
        }
        side_info[r - 1] = Some(set);
    }
    Ok(side_info.into_iter().map(|s| s.unwrap_or_default()).collect())
}

pub(crate) fn sender_set_from_records(rec: &parse::Records, k: usize, n: usize) -> Result<Vec<usize>> {
    let (list, line) = rec
        .senders
        .get(&k)
        .ok_or_else(|| Error::Parse { line: 0, msg: format!("missing M{k}") })?;
    list.iter()
        .map(|&j| {
            if j < 1 || j > n {
                Err(Error::Parse { line: *line, msg: format!("M{k} message {j} out of range 1..{n}") })
            } else {
                Ok(j - 1)
            }
        })
        .collect()
}

/// Parses the text format, e.g. `(1|2),(2|1),(3|1); M1={1,3}; M2={2,3}; t=1`.
pub fn parse_problem(text: &str) -> Result<Problem> {
    parse_problem_with_limit(text, DEFAULT_MAX_TN)
}

pub fn parse_problem_with_limit(text: &str, max_tn: usize) -> Result<Problem> {
    let rec = parse::records(text)?;
    if let Some((&k, &(_, line))) = rec.senders.iter().find(|(&k, _)| k != 1 && k != 2) {
        return Err(Error::Parse { line, msg: format!("unexpected M{k} in a two-sender instance") });
    }
    let side_info = side_info_from_records(&rec)?;
    let n = side_info.len();
    let m1 = sender_set_from_records(&rec, 1, n)?;
    let m2 = sender_set_from_records(&rec, 2, n)?;
    Problem::with_limit(side_info, m1, m2, rec.t.unwrap_or(1), max_tn)
}

/// Private and common message classes; `p[i]` doubles as `V(D_{i+1})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessagePartition {
    pub p1: Vec<usize>,
    pub p2: Vec<usize>,
    pub p3: Vec<usize>,
}

impl MessagePartition {
    /// Vertex set of sub-digraph `i` in `{1, 2, 3}`.
    pub fn part(&self, i: usize) -> &[usize] {
        match i {
            1 => &self.p1,
            2 => &self.p2,
            3 => &self.p3,
            _ => panic!("sub-digraph index must be 1, 2 or 3"),
        }
    }

    pub fn d1(&self) -> &[usize] {
        &self.p1
    }

    pub fn d2(&self) -> &[usize] {
        &self.p2
    }

    pub fn d3(&self) -> &[usize] {
        &self.p3
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.p1.len(), self.p2.len(), self.p3.len()]
    }

    /// Which sub-digraph (1, 2 or 3) contains vertex `v`.
    pub fn part_of(&self, v: usize) -> usize {
        (1..=3).find(|&i| self.part(i).contains(&v)).expect("vertex not in any part")
    }

    /// Induced sub-digraph `D_i` of `d`.
    pub fn sub_digraph(&self, d: &Digraph, i: usize) -> Digraph {
        d.induced(self.part(i))
    }
}

pub fn partition(p: &Problem) -> MessagePartition {
    let in1 = mask_of(&p.m1);
    let in2 = mask_of(&p.m2);
    let (mut p1, mut p2, mut p3) = (Vec::new(), Vec::new(), Vec::new());
    for j in 0..p.n {
        match (in1 >> j & 1 == 1, in2 >> j & 1 == 1) {
            (true, false) => p1.push(j),
            (false, true) => p2.push(j),
            (true, true) => p3.push(j),
            (false, false) => unreachable!("validated problem"),
        }
    }
    MessagePartition { p1, p2, p3 }
}

/// Complete bipartite graph between the two private classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SenderConstraintGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

pub fn sender_constraint_graph(mp: &MessagePartition) -> SenderConstraintGraph {
    let n = mp.p1.len() + mp.p2.len() + mp.p3.len();
    let mut edges: Vec<(usize, usize)> = mp
        .p1
        .iter()
        .flat_map(|&i| mp.p2.iter().map(move |&j| (i.min(j), i.max(j))))
        .collect();
    edges.sort_unstable();
    SenderConstraintGraph { n, edges }
}

/// The six possible arcs on `{1, 2, 3}`, in bit order.
pub const ARCS: [(u8, u8); 6] = [(1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)];

fn arc_bit(i: u8, j: u8) -> u8 {
    let k = ARCS.iter().position(|&a| a == (i, j)).expect("not an arc on {1,2,3}");
    1 << k
}

/// Three-vertex digraph obtained by contracting `D1`, `D2`, `D3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InteractionDigraph(u8);

impl InteractionDigraph {
    pub fn from_word(word: u8) -> InteractionDigraph {
        assert!(word < 64, "arc word has six bits");
        InteractionDigraph(word)
    }

    pub fn from_arcs(arcs: &[(u8, u8)]) -> InteractionDigraph {
        InteractionDigraph(arcs.iter().fold(0, |w, &(i, j)| w | arc_bit(i, j)))
    }

    pub fn word(&self) -> u8 {
        self.0
    }

    pub fn has(&self, i: u8, j: u8) -> bool {
        self.0 & arc_bit(i, j) != 0
    }

    pub fn both(&self, i: u8, j: u8) -> bool {
        self.has(i, j) && self.has(j, i)
    }

    pub fn arcs(&self) -> Vec<(u8, u8)> {
        ARCS.iter().copied().filter(|&(i, j)| self.has(i, j)).collect()
    }

    pub fn out_degree(&self, v: u8) -> usize {
        (1..=3).filter(|&w| w != v && self.has(v, w)).count()
    }

    /// Image under exchanging vertices 1 and 2.
    pub fn swap12(&self) -> InteractionDigraph {
        let s = |v: u8| match v {
            1 => 2,
            2 => 1,
            x => x,
        };
        InteractionDigraph::from_arcs(
            &self.arcs().into_iter().map(|(i, j)| (s(i), s(j))).collect::<Vec<_>>(),
        )
    }

    pub fn canonical(&self) -> InteractionDigraph {
        (*self).min(self.swap12())
    }

    pub fn is_acyclic(&self) -> bool {
        let two_cycle = self.both(1, 2) || self.both(1, 3) || self.both(2, 3);
        let three_cycle = (self.has(1, 2) && self.has(2, 3) && self.has(3, 1))
            || (self.has(2, 1) && self.has(1, 3) && self.has(3, 2));
        !two_cycle && !three_cycle
    }

    pub fn case_label(&self) -> CaseLabel {
        if self.is_acyclic() {
            CaseLabel::I
        } else if self.out_degree(3) == 0 {
            CaseLabel::IIA
        } else {
            match (self.both(1, 3), self.both(2, 3)) {
                (true, true) => CaseLabel::IIB,
                (true, false) | (false, true) => CaseLabel::IIC,
                (false, false) => CaseLabel::IID,
            }
        }
    }
}

impl fmt::Display for InteractionDigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arcs: Vec<String> = self.arcs().iter().map(|(i, j)| format!("{i}->{j}")).collect();
        write!(f, "{{{}}}", arcs.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "II-A")]
    IIA,
    #[serde(rename = "II-B")]
    IIB,
    #[serde(rename = "II-C")]
    IIC,
    #[serde(rename = "II-D")]
    IID,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseLabel::I => "I",
            CaseLabel::IIA => "II-A",
            CaseLabel::IIB => "II-B",
            CaseLabel::IIC => "II-C",
            CaseLabel::IID => "II-D",
        })
    }
}

/// Conventional `H_k` name of a class. `anchored` is false when the name was
/// inferred from the rate results rather than pinned by a worked example.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperLabel {
    pub number: u8,
    pub anchored: bool,
}

impl fmt::Display for PaperLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H_{}", self.number)?;
        if !self.anchored {
            f.write_str(" (inferred)")?;
        }
        Ok(())
    }
}

const LABEL_TABLE: &[(u8, bool, &[(u8, u8)])] = &[
    (1, true, &[]),
    (7, true, &[(1, 2), (1, 3), (2, 3)]),
    (15, true, &[(1, 2), (2, 1)]),
    (16, true, &[(1, 2), (2, 1), (1, 3), (2, 3)]),
    (17, false, &[(1, 2), (2, 1), (1, 3)]),
    (18, true, &[(1, 3), (3, 1), (2, 3), (3, 2)]),
    (19, false, &[(1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)]),
    (20, false, &[(1, 2), (1, 3), (3, 1), (2, 3), (3, 2)]),
    (23, true, &[(1, 3), (3, 1), (2, 1)]),
    (28, false, &[(1, 3), (3, 1), (1, 2), (2, 3)]),
    (29, false, &[(1, 3), (3, 1), (2, 1), (3, 2)]),
    (30, false, &[(1, 3), (3, 1), (1, 2), (2, 1)]),
    (31, false, &[(1, 3), (3, 1), (1, 2), (2, 1), (3, 2)]),
    (32, false, &[(1, 3), (3, 1), (1, 2), (2, 1), (2, 3)]),
    (33, true, &[(1, 2), (2, 1), (3, 1)]),
    (34, false, &[(1, 2), (2, 1), (3, 1), (3, 2)]),
    (35, false, &[(1, 2), (2, 1), (3, 1), (2, 3)]),
    (36, false, &[(1, 2), (2, 3), (3, 1)]),
];

/// Conventional label of a class, if one is known.
pub fn paper_label(h: InteractionDigraph) -> Option<PaperLabel> {
    let c = h.canonical();
    LABEL_TABLE
        .iter()
        .find(|(_, _, arcs)| InteractionDigraph::from_arcs(arcs).canonical() == c)
        .map(|&(number, anchored, _)| PaperLabel { number, anchored })
}

/// Interaction digraph of `D` for the given partition.
pub fn interaction_map(p: &Problem, mp: &MessagePartition) -> InteractionDigraph {
    let d = p.digraph();
    let arcs: Vec<(u8, u8)> = ARCS
        .iter()
        .copied()
        .filter(|&(i, j)| d.interacts(mp.part(i as usize), mp.part(j as usize)))
        .collect();
    InteractionDigraph::from_arcs(&arcs)
}

/// For every arc `(i, j)` of `f(D)`, every vertex of `D_i` knows all of `V(D_j)`.
pub fn is_fully_participated(p: &Problem, mp: &MessagePartition) -> bool {
    let d = p.digraph();
    let h = interaction_map(p, mp);
    h.arcs()
        .iter()
        .all(|&(i, j)| d.fully_knows(mp.part(i as usize), mp.part(j as usize)))
}

/// One of the 36 interaction classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionClass {
    pub canonical_arcs: InteractionDigraph,
    pub class_id: u8,
    pub case_label: CaseLabel,
    pub paper_label: Option<PaperLabel>,
    /// Known only when classifying a concrete instance.
    pub fully_participated: Option<bool>,
}

impl InteractionClass {
    /// Vertex 3 has no out-arc (CASE I classes of that kind, and all of II-A).
    pub fn common_is_sink(&self) -> bool {
        self.canonical_arcs.out_degree(3) == 0
    }
}

impl fmt::Display for InteractionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case {} (class {}", self.case_label, self.class_id)?;
        if let Some(l) = self.paper_label {
            write!(f, ", {l}")?;
        }
        write!(f, ") {}", self.canonical_arcs)?;
        match self.fully_participated {
            Some(true) => write!(f, ", fully participated"),
            Some(false) => write!(f, ", partially participated"),
            None => Ok(()),
        }
    }
}

fn class_table() -> &'static [InteractionClass] {
    static TABLE: OnceLock<Vec<InteractionClass>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut canon: Vec<InteractionDigraph> =
            (0..64u8).map(|w| InteractionDigraph::from_word(w).canonical()).collect();
        canon.sort_unstable();
        canon.dedup();
        canon
            .into_iter()
            .enumerate()
            .map(|(k, h)| InteractionClass {
                canonical_arcs: h,
                class_id: k as u8 + 1,
                case_label: h.case_label(),
                paper_label: paper_label(h),
                fully_participated: None,
            })
            .collect()
    })
}

/// All classes of arc subsets on `{1, 2, 3}` modulo exchanging vertices 1 and 2.
pub fn enumerate_classes() -> Vec<InteractionClass> {
    class_table().to_vec()
}

pub fn classify(h: InteractionDigraph) -> InteractionClass {
    let c = h.canonical();
    *class_table()
        .iter()
        .find(|k| k.canonical_arcs == c)
        .expect("every arc word has a class")
}

/// Classifies a concrete instance, filling in participation.
pub fn classify_problem(p: &Problem) -> InteractionClass {
    let mp = partition(p);
    let mut c = classify(interaction_map(p, &mp));
    c.fully_participated = Some(is_fully_participated(p, &mp));
    c
}

/// Builds the fully participated instance with sub-digraphs `parts` (placed in
/// that order, `D1` first) and cross arcs dictated by `h`.
pub fn compose(h: InteractionDigraph, parts: [&Digraph; 3], t: u32, max_tn: usize) -> Result<Problem> {
    let offs = [0, parts[0].n(), parts[0].n() + parts[1].n()];
    let n = offs[2] + parts[2].n();
    let range = |i: usize| offs[i]..offs[i] + parts[i].n();
    let mut d = Digraph::empty(n);
    for (i, part) in parts.iter().enumerate() {
        for (u, v) in part.arcs() {
            d.add_arc(offs[i] + u, offs[i] + v);
        }
    }
    for (i, j) in h.arcs() {
        for u in range(i as usize - 1) {
            for v in range(j as usize - 1) {
                d.add_arc(u, v);
            }
        }
    }
    let m1: Vec<usize> = range(0).chain(range(2)).collect();
    let m2: Vec<usize> = range(1).chain(range(2)).collect();
    let side_info = (0..n).map(|u| d.out_neighbors(u)).collect();
    Problem::with_limit(side_info, m1, m2, t, max_tn)
}
