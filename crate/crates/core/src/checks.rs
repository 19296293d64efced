//! Named instance families and per-instance checks for sweeps.

use std::fmt;
use std::str::FromStr;

use crate::confusion::{beta_t_ssuic, ConfusionGraph};
use crate::error::{Error, Result};
use crate::families;
use crate::index_codes::{code_to_coloring, coloring_to_code, construct_case_iib, optimal_sub_codes, verify};
use crate::msuic::{ms_confusion_graph, ms_minimize, ms_structured_coloring, ms_validate, MsColoring, MsProblem};
use crate::oracle::{brute_force_beta_t, brute_force_beta_t_ssuic, CheckOutcome, OracleBudget};
use crate::problem_model::{classify_problem, partition, CaseLabel, Problem};
use crate::rate::Rate;
use crate::rate_engine::dispatch;
use crate::two_sender_coloring::{coloring_cost, minimize, structured_product_coloring, validate};

/// Instance families available to sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// All 36 classes, fully participated, every internal pattern at small sizes.
    Fp36,
    /// Two-way common-part classes with two common messages.
    Iib,
    /// No-arc and two-way-private shapes with a sink common part.
    Corners,
    /// Every instance with `t*N <= 5` up to three messages plus seeded samples.
    Small,
    Empty,
}

impl Family {
    pub const NAMES: [&'static str; 5] = ["fp36", "iib", "corners", "small", "empty"];

    pub fn instances(self, seed: u64) -> Vec<Problem> {
        match self {
            Family::Fp36 => families::fp36(),
            Family::Iib => families::iib(),
            Family::Corners => families::common_sink_corners(),
            Family::Small => families::small_two_sender(seed, 200),
            Family::Empty => Vec::new(),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Ok(match s {
            "fp36" => Family::Fp36,
            "iib" => Family::Iib,
            "corners" => Family::Corners,
            "small" => Family::Small,
            "empty" => Family::Empty,
            _ => return Err(Error::OutOfRange(format!("unknown family {s}; expected one of {:?}", Family::NAMES))),
        })
    }
}

/// Per-instance predicates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    /// Dispatch bounds contain the oracle value and exact results equal it.
    DispatchVsOracle,
    /// The exact coloring search equals the oracle.
    MinimizeVsOracle,
    /// Single-sender oracle on `D` equals `ceil(log2 chi)/t`.
    ChromaticVsOracle,
    /// Two-way common-part classes: dispatch equals `max{b3, b1 + b2}` from
    /// sub-problem chromatic numbers and the constructed code achieves it.
    TwoWayCommonMax,
    /// Sink common part: `t * (beta_t - sum of sub-rates)` lies in `{-2, -1, 0}`.
    Epsilon,
    /// Coloring to code and back keeps validity and rate.
    RoundTrip,
    /// The multi-sender path with two senders reproduces the two-sender results.
    MsReduction,
}

impl Check {
    pub const NAMES: [&'static str; 7] =
        ["dispatch-vs-oracle", "minimize-vs-oracle", "chromatic-vs-oracle", "two-way-common-max", "epsilon", "round-trip", "ms-reduction"];

    pub fn run(self, p: &Problem) -> Result<CheckOutcome> {
        match self {
            Check::DispatchVsOracle => dispatch_vs_oracle(p),
            Check::MinimizeVsOracle => minimize_vs_oracle(p),
            Check::ChromaticVsOracle => chromatic_vs_oracle(p),
            Check::TwoWayCommonMax => two_way_common_max(p),
            Check::Epsilon => epsilon_range(p),
            Check::RoundTrip => round_trip(p),
            Check::MsReduction => ms_reduction(p),
        }
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Check> {
        let i = Check::NAMES
            .iter()
            .position(|&n| n == s)
            .ok_or_else(|| Error::OutOfRange(format!("unknown check {s}; expected one of {:?}", Check::NAMES)))?;
        Ok([
            Check::DispatchVsOracle,
            Check::MinimizeVsOracle,
            Check::ChromaticVsOracle,
            Check::TwoWayCommonMax,
            Check::Epsilon,
            Check::RoundTrip,
            Check::MsReduction,
        ][i])
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize;
        f.write_str(Check::NAMES[i])
    }
}

fn oracle(p: &Problem) -> Result<Rate> {
    brute_force_beta_t(p, &OracleBudget::default())
}

fn outcome(expected: impl ToString, got: impl ToString, pass: bool) -> CheckOutcome {
    CheckOutcome { expected: expected.to_string(), got: got.to_string(), pass }
}

pub fn dispatch_vs_oracle(p: &Problem) -> Result<CheckOutcome> {
    let o = oracle(p)?;
    let r = dispatch(p)?;
    let pass = r.bounds.contains(o) && r.value().is_none_or(|v| v == o);
    Ok(outcome(o, r.bounds, pass))
}

pub fn minimize_vs_oracle(p: &Problem) -> Result<CheckOutcome> {
    let o = oracle(p)?;
    let m = minimize(&ConfusionGraph::build(p)?)?;
    let got = if m.exact { m.cost.rate.to_string() } else { format!("{} (inexact)", m.cost.rate) };
    Ok(outcome(o, got, m.exact && m.cost.rate == o))
}

pub fn chromatic_vs_oracle(p: &Problem) -> Result<CheckOutcome> {
    let d = p.digraph();
    let o = brute_force_beta_t_ssuic(&d, p.t(), &OracleBudget::default())?;
    Ok(CheckOutcome::compare(o, beta_t_ssuic(&d, p.t())?))
}

fn sub_betas(p: &Problem) -> Result<[Rate; 3]> {
    let mp = partition(p);
    let d = p.digraph();
    let b = |i: usize| beta_t_ssuic(&mp.sub_digraph(&d, i), p.t());
    Ok([b(1)?, b(2)?, b(3)?])
}

pub fn two_way_common_max(p: &Problem) -> Result<CheckOutcome> {
    let class = classify_problem(p);
    if class.case_label != CaseLabel::IIB || class.fully_participated != Some(true) {
        return Err(Error::Precondition(format!("needs a fully participated two-way common class, got {class}")));
    }
    let [b1, b2, b3] = sub_betas(p)?;
    let want = b3.max(b1 + b2);
    let r = dispatch(p)?;
    let code = construct_case_iib(p, &optimal_sub_codes(p)?)?;
    let ok_code = verify(p, &code)?.is_valid() && code.rate() == want;
    let got = format!("{} (code {})", r.bounds, code.rate());
    Ok(outcome(want, got, r.value() == Some(want) && ok_code))
}

pub fn epsilon_range(p: &Problem) -> Result<CheckOutcome> {
    if !classify_problem(p).common_is_sink() {
        return Err(Error::Precondition("needs a common part without out-arcs".into()));
    }
    let g = ConfusionGraph::build(p)?;
    let m = minimize(&g)?;
    if !m.exact {
        return Err(Error::BudgetExceeded("coloring search did not finish".into()));
    }
    let [b1, b2, b3] = sub_betas(p)?;
    let eps = ((m.cost.rate - (b1 + b2 + b3)).ratio() * p.t() as i64).to_integer();
    let product = structured_product_coloring(p, &g)?;
    let ok_product = validate(&g, &product)?.is_valid();
    Ok(outcome("-2..=0", eps, (-2..=0).contains(&eps) && ok_product))
}

pub fn round_trip(p: &Problem) -> Result<CheckOutcome> {
    let g = ConfusionGraph::build(p)?;
    let c = minimize(&g)?.coloring;
    let rate = coloring_cost(&c, p.t()).rate;
    let code = coloring_to_code(&g, &c)?;
    let code_ok = verify(p, &code)?.is_valid();
    let back = code_to_coloring(&g, &code)?;
    let back_ok = validate(&g, &back)?.is_valid();
    let back_rate = coloring_cost(&back, p.t()).rate;
    let got = format!("code {} valid={code_ok}, coloring {back_rate} valid={back_ok}", code.rate());
    Ok(outcome(rate, got, code_ok && back_ok && code.rate() == rate && back_rate == rate))
}

pub fn ms_reduction(p: &Problem) -> Result<CheckOutcome> {
    let mp = MsProblem::from_problem(p)?;
    let g2 = ConfusionGraph::build(p)?;
    let gm = ms_confusion_graph(&mp)?;
    let a = minimize(&g2)?;
    let b = ms_minimize(&gm)?;
    let mut same = a.coloring.j1 == b.coloring.maps[0] && a.coloring.j2 == b.coloring.maps[1];
    same &= a.cost.rate == b.rate && a.exact == b.exact;
    let ms = MsColoring { maps: vec![a.coloring.j1.clone(), a.coloring.j2.clone()] };
    same &= validate(&g2, &a.coloring)?.is_valid() == ms_validate(&gm, &ms)?.is_valid();
    if classify_problem(p).common_is_sink() {
        let s2 = structured_product_coloring(p, &g2)?;
        let sm = ms_structured_coloring(&mp, &gm)?;
        same &= s2.j1 == sm.maps[0] && s2.j2 == sm.maps[1];
    }
    Ok(outcome(a.cost.rate, b.rate, same))
}

/// `t * (beta_t - sum of pool rates)` for a multi-sender instance with a sink
/// common pool, from the exact search.
pub fn ms_epsilon(p: &MsProblem) -> Result<i64> {
    let g = ms_confusion_graph(p)?;
    let m = ms_minimize(&g)?;
    if !m.exact {
        return Err(Error::BudgetExceeded("coloring search did not finish".into()));
    }
    let d = p.digraph();
    let mut sum = Rate::zero();
    for group in p.groups() {
        sum = sum + beta_t_ssuic(&d.induced(&group), p.t())?;
    }
    Ok(((m.rate - sum).ratio() * p.t() as i64).to_integer())
}
