//! Exhaustive ground truth for small instances.
//!
//! The search here enumerates encoder tables directly and shares no code with
//! the coloring search. Realizations are visited in increasing packed order
//! (message `m` occupies bits `m*t..m*t+t`); when a realization is reached, the
//! table entries it reads are assigned if still free, and the realization is
//! checked against every earlier realization it can be confused with. A free
//! entry of sender `s` may take any value up to one more than the largest value
//! sender `s` has used so far, which removes relabelings of each sender's
//! codewords. Bit budgets `(p1, p2)` are tried in ascending `p1 + p2`, then
//! ascending `p1`.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::bitops::pext;
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::problem_model::Problem;
use crate::rate::Rate;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    /// Largest `t*N` the oracle accepts.
    pub max_tn: usize,
    /// Search nodes allowed per run.
    pub max_nodes: u64,
    pub time_cap: Option<Duration>,
}

impl Default for OracleBudget {
    fn default() -> OracleBudget {
        OracleBudget { max_tn: 5, max_nodes: 200_000_000, time_cap: None }
    }
}

/// Receiver `r` as bit masks over a packed realization.
#[derive(Clone, Copy)]
struct Receiver {
    want: u64,
    side: u64,
}

fn message_mask(m: usize, t: u32) -> u64 {
    ((1u64 << t) - 1) << (m as u32 * t)
}

fn receivers(side_info: impl Iterator<Item = Vec<usize>>, t: u32) -> Vec<Receiver> {
    side_info
        .enumerate()
        .map(|(r, known)| Receiver {
            want: message_mask(r, t),
            side: known.iter().fold(0, |acc, &m| acc | message_mask(m, t)),
        })
        .collect()
}

fn confused(x: u64, y: u64, rs: &[Receiver]) -> bool {
    let d = x ^ y;
    rs.iter().any(|r| d & r.want != 0 && d & r.side == 0)
}

struct Encoders {
    total: usize,
    /// `inputs[x][s]` is the table index sender `s` reads on realization `x`.
    inputs: Vec<Vec<usize>>,
    table_len: Vec<usize>,
    /// `earlier[x]` lists the realizations `y < x` confusable with `x`.
    earlier: Vec<Vec<usize>>,
}

impl Encoders {
    fn new(rs: &[Receiver], sender_masks: &[u64], bits: u32) -> Encoders {
        let total = 1usize << bits;
        let inputs = (0..total as u64)
            .map(|x| sender_masks.iter().map(|&m| pext(x, m) as usize).collect())
            .collect();
        let table_len = sender_masks.iter().map(|m| 1usize << m.count_ones()).collect();
        let earlier = (0..total as u64)
            .map(|x| (0..x).filter(|&y| confused(x, y, rs)).map(|y| y as usize).collect())
            .collect();
        Encoders { total, inputs, table_len, earlier }
    }
}

struct Run<'a> {
    enc: &'a Encoders,
    limits: Vec<u32>,
    tables: Vec<Vec<Option<u32>>>,
    used: Vec<u32>,
    nodes: u64,
    max_nodes: u64,
    deadline: Option<Instant>,
}

enum Outcome {
    Found,
    Exhausted,
    OutOfBudget,
}

impl Run<'_> {
    fn codeword(&self, x: usize) -> Vec<u32> {
        self.enc.inputs[x].iter().enumerate().map(|(s, &i)| self.tables[s][i].unwrap()).collect()
    }

    fn consistent(&self, x: usize) -> bool {
        let cx = self.codeword(x);
        self.enc.earlier[x].iter().all(|&y| self.codeword(y) != cx)
    }

    /// Assigns free entries of realization `x` starting from sender `s`.
    fn assign(&mut self, x: usize, s: usize) -> Outcome {
        self.nodes += 1;
        if self.nodes > self.max_nodes
            || (self.nodes % 4096 == 0 && self.deadline.is_some_and(|d| Instant::now() > d))
        {
            return Outcome::OutOfBudget;
        }
        if s == self.tables.len() {
            if !self.consistent(x) {
                return Outcome::Exhausted;
            }
            return if x + 1 == self.enc.total { Outcome::Found } else { self.assign(x + 1, 0) };
        }
        let i = self.enc.inputs[x][s];
        if self.tables[s][i].is_some() {
            return self.assign(x, s + 1);
        }
        let saved = self.used[s];
        let top = saved.min(self.limits[s] - 1);
        for v in 0..=top {
            self.tables[s][i] = Some(v);
            self.used[s] = saved.max(v + 1);
            match self.assign(x, s + 1) {
                Outcome::Exhausted => {}
                other => return other,
            }
        }
        self.tables[s][i] = None;
        self.used[s] = saved;
        Outcome::Exhausted
    }
}

/// Whether encoders with the given output bit lengths exist; `None` when the
/// budget ran out.
fn feasible(enc: &Encoders, bits: &[u32], budget: &OracleBudget, deadline: Option<Instant>) -> Option<bool> {
    let mut run = Run {
        enc,
        limits: bits.iter().map(|&b| 1u32 << b).collect(),
        tables: enc.table_len.iter().map(|&l| vec![None; l]).collect(),
        used: vec![0; bits.len()],
        nodes: 0,
        max_nodes: budget.max_nodes,
        deadline,
    };
    match run.assign(0, 0) {
        Outcome::Found => Some(true),
        Outcome::Exhausted => Some(false),
        Outcome::OutOfBudget => None,
    }
}

fn check_budget(tn: usize, budget: &OracleBudget) -> Result<()> {
    if tn > budget.max_tn {
        return Err(Error::Guardrail { tn, limit: budget.max_tn });
    }
    Ok(())
}

fn exhausted(what: &str) -> Error {
    Error::BudgetExceeded(format!("oracle ran out of budget on {what}"))
}

/// Optimal two-sender sub-codeword lengths `(p1, p2)` and the rate.
pub fn brute_force_code_lengths(p: &Problem, budget: &OracleBudget) -> Result<(u32, u32)> {
    check_budget(p.tn(), budget)?;
    let t = p.t();
    let rs = receivers(p.side_info().iter().cloned(), t);
    let masks: Vec<u64> = (1..=2)
        .map(|s| p.sender_set(s).iter().fold(0, |acc, &m| acc | message_mask(m, t)))
        .collect();
    let enc = Encoders::new(&rs, &masks, p.tn() as u32);
    let cap = [masks[0].count_ones(), masks[1].count_ones()];
    // Realizations differing only in one requested message are pairwise
    // confusable, so `t` bits are needed overall, and by a sender alone when
    // it holds a message the other lacks.
    let floor = |s: usize| if masks[s] & !masks[1 - s] != 0 { t } else { 0 };
    let lo = [floor(0), floor(1)];
    let start = if p.n() == 0 { 0 } else { t.max(lo[0] + lo[1]) };
    let deadline = budget.time_cap.map(|d| Instant::now() + d);
    for total in start..=cap[0] + cap[1] {
        let first = total.saturating_sub(cap[1]).max(lo[0]);
        let last = total.min(cap[0]).min(total.saturating_sub(lo[1]));
        for p1 in first..=last {
            match feasible(&enc, &[p1, total - p1], budget, deadline) {
                Some(true) => return Ok((p1, total - p1)),
                Some(false) => {}
                None => return Err(exhausted("a two-sender instance")),
            }
        }
    }
    unreachable!("sending every message uncoded is always decodable")
}

/// Exact two-sender `beta_t` by encoder-table enumeration.
pub fn brute_force_beta_t(p: &Problem, budget: &OracleBudget) -> Result<Rate> {
    let (p1, p2) = brute_force_code_lengths(p, budget)?;
    Ok(Rate::from_bits(p1 + p2, p.t()))
}

/// Exact single-sender `beta_t` by encoder-table enumeration.
pub fn brute_force_beta_t_ssuic(d: &Digraph, t: u32, budget: &OracleBudget) -> Result<Rate> {
    if t == 0 {
        return Err(Error::InvalidProblem("t must be at least 1".into()));
    }
    let tn = t as usize * d.n();
    check_budget(tn, budget)?;
    let rs = receivers((0..d.n()).map(|v| d.out_neighbors(v)), t);
    let all = if tn == 0 { 0 } else { u64::MAX >> (64 - tn) };
    let enc = Encoders::new(&rs, &[all], tn as u32);
    let deadline = budget.time_cap.map(|d| Instant::now() + d);
    let start = if d.n() == 0 { 0 } else { t };
    for bits in start..=tn as u32 {
        match feasible(&enc, &[bits], budget, deadline) {
            Some(true) => return Ok(Rate::from_bits(bits, t)),
            Some(false) => {}
            None => return Err(exhausted("a single-sender instance")),
        }
    }
    unreachable!("sending every message uncoded is always decodable")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// One line of a sweep report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRecord {
    pub instance: String,
    pub expected: String,
    pub got: String,
    pub status: Status,
}

/// What a check reports for one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub expected: String,
    pub got: String,
    pub pass: bool,
}

impl CheckOutcome {
    pub fn compare<T: ToString + PartialEq>(expected: T, got: T) -> CheckOutcome {
        CheckOutcome { pass: expected == got, expected: expected.to_string(), got: got.to_string() }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
}

impl SweepReport {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn failures(&self) -> impl Iterator<Item = &SweepRecord> {
        self.records.iter().filter(|r| r.status != Status::Pass)
    }

    pub fn all_pass(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn to_json_lines(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
            .collect()
    }
}

/// Runs `check` on every instance in parallel; records keep the input order.
pub fn sweep<F>(family: &[Problem], check: F) -> SweepReport
where
    F: Fn(&Problem) -> Result<CheckOutcome> + Sync,
{
    let records = family
        .par_iter()
        .map(|p| {
            let instance = p.to_text();
            match check(p) {
                Ok(o) => SweepRecord {
                    instance,
                    expected: o.expected,
                    got: o.got,
                    status: if o.pass { Status::Pass } else { Status::Fail },
                },
                Err(e) => SweepRecord { instance, expected: String::new(), got: e.to_string(), status: Status::Error },
            }
        })
        .collect();
    SweepReport { records }
}
