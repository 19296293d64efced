//! Rate bounds and exact rates by interaction class, with the single-sender
//! structural rules as building blocks.

use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::confusion::{beta_t_ssuic_bounds, ConfusionGraph, EXPLICIT_LIMIT_TN};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::oracle::{brute_force_beta_t, OracleBudget};
use crate::problem_model::{classify_problem, interaction_map, partition, CaseLabel, InteractionClass, Problem};
use crate::rate::Rate;
use crate::two_sender_coloring::{minimize, SEARCH_LIMIT_TN};

/// Closed interval of rates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub lower: Rate,
    pub upper: Rate,
}

impl Bounds {
    pub fn exact(r: Rate) -> Bounds {
        Bounds { lower: r, upper: r }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn value(&self) -> Option<Rate> {
        self.is_exact().then_some(self.lower)
    }

    pub fn contains(&self, r: Rate) -> bool {
        self.lower <= r && r <= self.upper
    }

    fn map2(a: Bounds, b: Bounds, f: impl Fn(Rate, Rate) -> Rate) -> Bounds {
        Bounds { lower: f(a.lower, b.lower), upper: f(a.upper, b.upper) }
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lower)
        } else {
            write!(f, "[{}, {}]", self.lower, self.upper)
        }
    }
}

/// The rule that produced a rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Common part without out-arcs: sum of sub-rates up to `-2/t`, resolved by search.
    CommonSinkSearch,
    /// Same class, search over budget: the `[sum - 2/t, sum]` window.
    CommonSinkWindow,
    /// Acyclic interaction with arcs out of the common part.
    AcyclicSum,
    /// Two-way interaction of the common part with both private parts.
    TwoWayCommonMax,
    /// Two-way interaction of the common part with one private part.
    OneSidedXor,
    /// Remaining cyclic classes: common code XORed into both senders.
    DoubleXor,
    /// No class rule applies: generic lower and upper bounds.
    GenericBounds,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::CommonSinkSearch => "common-sink class, exact by coloring search",
            Provenance::CommonSinkWindow => "common-sink class, window [sum-2/t, sum]",
            Provenance::AcyclicSum => "acyclic interaction, sum of sub-rates asymptotically",
            Provenance::TwoWayCommonMax => "two-way common part, max{b3, b1+b2}",
            Provenance::OneSidedXor => "one-sided two-way common part, XOR construction",
            Provenance::DoubleXor => "double XOR construction",
            Provenance::GenericBounds => "generic bounds",
        };
        f.write_str(s)
    }
}

/// Finite-`t` rate with its asymptotic counterpart when derivable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateResult {
    pub t: u32,
    pub bounds: Bounds,
    pub provenance: Provenance,
    /// `t * (beta_t - sum of sub-rates)` for common-sink classes.
    pub epsilon: Option<i64>,
    /// Bounds on the limit rate; present only when every input is derivable.
    pub asymptotic: Option<Bounds>,
    pub notes: Vec<String>,
}

impl RateResult {
    pub fn exact(&self) -> bool {
        self.bounds.is_exact()
    }

    pub fn value(&self) -> Option<Rate> {
        self.bounds.value()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("results serialize")
    }
}

impl Serialize for RateResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            t: u32,
            #[serde(skip_serializing_if = "Option::is_none")]
            value: Option<Rate>,
            #[serde(skip_serializing_if = "Option::is_none")]
            interval: Option<[Rate; 2]>,
            exact: bool,
            provenance: Provenance,
            #[serde(skip_serializing_if = "Option::is_none")]
            epsilon: Option<i64>,
            #[serde(skip_serializing_if = "Option::is_none")]
            asymptotic: Option<&'a Bounds>,
            notes: &'a [String],
        }
        View {
            t: self.t,
            value: self.value(),
            interval: (!self.exact()).then_some([self.bounds.lower, self.bounds.upper]),
            exact: self.exact(),
            provenance: self.provenance,
            epsilon: self.epsilon,
            asymptotic: self.asymptotic.as_ref(),
            notes: &self.notes,
        }
        .serialize(s)
    }
}

/// `beta(D)` from the sum rule (no or one-way interaction, applied along the
/// condensation) and the max rule (fully participated two-way interaction).
/// `None` when some irreducible piece has more than one vertex.
pub fn structural_beta(d: &Digraph) -> Option<Rate> {
    structural_on(d, &(0..d.n()).collect::<Vec<_>>())
}

fn structural_on(d: &Digraph, vs: &[usize]) -> Option<Rate> {
    match vs.len() {
        0 => return Some(Rate::zero()),
        1 => return Some(Rate::integer(1)),
        _ => {}
    }
    let sub = d.induced(vs);
    let sccs = sub.sccs();
    if sccs.len() > 1 {
        return sccs
            .iter()
            .map(|c| structural_on(d, &c.iter().map(|&i| vs[i]).collect::<Vec<_>>()))
            .sum();
    }
    // Components of "not joined both ways": distinct components are fully
    // joined both ways, so the max rule applies across them.
    let comps = not_mutual_components(&sub);
    if comps.len() == 1 {
        return None;
    }
    comps
        .iter()
        .map(|c| structural_on(d, &c.iter().map(|&i| vs[i]).collect::<Vec<_>>()))
        .try_fold(Rate::zero(), |acc, r| r.map(|r| acc.max(r)))
}

fn not_mutual_components(d: &Digraph) -> Vec<Vec<usize>> {
    let n = d.n();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut stack = vec![s];
        comp[s] = id;
        let mut members = Vec::new();
        while let Some(u) = stack.pop() {
            members.push(u);
            for v in 0..n {
                if v != u && comp[v] == usize::MAX && !(d.has_arc(u, v) && d.has_arc(v, u)) {
                    comp[v] = id;
                    stack.push(v);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// One application of the sum or max rule to the split `(a, b)`.
pub fn ssuic_structural_beta(d: &Digraph, a: &[usize], b: &[usize]) -> Result<Rate> {
    let mut all: Vec<usize> = a.iter().chain(b).copied().collect();
    all.sort_unstable();
    if all != (0..d.n()).collect::<Vec<_>>() {
        return Err(Error::Precondition("split must partition the vertices".into()));
    }
    let part = |vs: &[usize]| {
        structural_on(d, vs)
            .ok_or_else(|| Error::Precondition("a part has no structurally derivable rate".into()))
    };
    let (ab, ba) = (d.interacts(a, b), d.interacts(b, a));
    if !(ab && ba) {
        Ok(part(a)? + part(b)?)
    } else if d.fully_knows(a, b) && d.fully_knows(b, a) {
        Ok(part(a)?.max(part(b)?))
    } else {
        Err(Error::Precondition("two-way interaction is not fully participated".into()))
    }
}

/// Single-sender `beta_t` bounds; uncoded transmission when over budget.
fn ssuic_bounds(d: &Digraph, t: u32) -> Bounds {
    if t as usize * d.n() <= EXPLICIT_LIMIT_TN {
        if let Ok((lower, upper)) = beta_t_ssuic_bounds(d, t) {
            return Bounds { lower, upper };
        }
    }
    let lower = structural_beta(d).unwrap_or(Rate::zero());
    Bounds { lower, upper: Rate::integer(d.n() as i64) }
}

/// `beta_t(D)` as a lower bound on the two-sender rate.
pub fn lower_bound_single(p: &Problem) -> Bounds {
    ssuic_bounds(&p.digraph(), p.t())
}

/// `beta_t(D1) + beta_t(D2)`.
pub fn lower_bound_private_sum(p: &Problem) -> Bounds {
    let [b1, b2, _] = sub_rates(p);
    Bounds::map2(b1, b2, |x, y| x + y)
}

/// `beta_t(D1)`, `beta_t(D2)`, `beta_t(D3)`.
pub fn sub_rates(p: &Problem) -> [Bounds; 3] {
    let mp = partition(p);
    let d = p.digraph();
    [1, 2, 3].map(|i| ssuic_bounds(&mp.sub_digraph(&d, i), p.t()))
}

fn structural_parts(p: &Problem) -> Option<[Rate; 3]> {
    let mp = partition(p);
    let d = p.digraph();
    Some([
        structural_beta(&mp.sub_digraph(&d, 1))?,
        structural_beta(&mp.sub_digraph(&d, 2))?,
        structural_beta(&mp.sub_digraph(&d, 3))?,
    ])
}

fn sat_sub(a: Rate, b: Rate) -> Rate {
    if a > b {
        a - b
    } else {
        Rate::zero()
    }
}

/// Applies the most specific rule for the instance's class.
pub fn dispatch(p: &Problem) -> Result<RateResult> {
    let t = p.t();
    let class = classify_problem(p);
    let fully = class.fully_participated == Some(true);
    let [b1, b2, b3] = sub_rates(p);
    let single = lower_bound_single(p);
    let naive = b1.upper + b2.upper + b3.upper;
    let mut lower = single.lower.max(b1.lower + b2.lower);
    let mut upper = naive;
    let mut notes = Vec::new();
    let mut epsilon = None;
    let asym = structural_parts(p);
    let mut asymptotic = None;
    let h = interaction_map(p, &partition(p));
    let provenance;

    if partition(p).p3.is_empty() {
        notes.push("P3 empty: the instance separates into two single-sender problems".into());
    }

    if class.common_is_sink() {
        let sum = b1.upper + b2.upper + b3.upper;
        let window_low = sat_sub(b1.lower + b2.lower + b3.lower, Rate::from_bits(2, t));
        lower = lower.max(window_low);
        upper = upper.min(sum);
        let searched = if p.tn() <= SEARCH_LIMIT_TN { Some(minimize(&ConfusionGraph::build(p)?)?) } else { None };
        match searched {
            Some(m) if m.exact => {
                lower = m.cost.rate;
                upper = m.cost.rate;
                provenance = Provenance::CommonSinkSearch;
            }
            Some(m) => {
                upper = upper.min(m.cost.rate);
                provenance = Provenance::CommonSinkWindow;
                notes.push("coloring search hit its budget".into());
            }
            None => provenance = Provenance::CommonSinkWindow,
        }
        if lower == upper && b1.is_exact() && b2.is_exact() && b3.is_exact() {
            let diff = lower.ratio() - (b1.lower + b2.lower + b3.lower).ratio();
            epsilon = Some((diff * t as i64).to_integer());
        }
        asymptotic = asym.map(|a| Bounds::exact(a[0] + a[1] + a[2]));
    } else if class.case_label == CaseLabel::I {
        provenance = Provenance::AcyclicSum;
        asymptotic = asym.map(|a| Bounds::exact(a[0] + a[1] + a[2]));
        notes.push("finite-t value bounded only; the limit rate is the sum of sub-rates".into());
    } else if fully && class.case_label == CaseLabel::IIB {
        provenance = Provenance::TwoWayCommonMax;
        let f = Bounds::map2(b3, Bounds::map2(b1, b2, |x, y| x + y), Rate::max);
        lower = lower.max(f.lower);
        upper = upper.min(f.upper);
        asymptotic = asym.map(|a| Bounds::exact(a[2].max(a[0] + a[1])));
    } else if fully && class.case_label == CaseLabel::IIC {
        provenance = Provenance::OneSidedXor;
        // `a` is the private part joined both ways with the common part.
        let (ba, bo, side) = if h.both(1, 3) { (b1, b2, 1) } else { (b2, b1, 2) };
        let f = Bounds::map2(bo, Bounds::map2(ba, b3, Rate::max), |x, y| x + y);
        upper = upper.min(f.upper);
        if ba.lower >= b3.upper {
            notes.push(format!("beta_t(D{side}) >= beta_t(D3): upper bound is tight"));
            lower = lower.max(ba.lower + bo.lower);
        }
        asymptotic = asym.map(|a| {
            let (aa, ao) = if side == 1 { (a[0], a[1]) } else { (a[1], a[0]) };
            Bounds::exact(ao + aa.max(a[2]))
        });
    } else if fully && class.case_label == CaseLabel::IID {
        provenance = Provenance::DoubleXor;
        let f = Bounds::map2(Bounds::map2(b1, b3, Rate::max), Bounds::map2(b2, b3, Rate::max), |x, y| x + y);
        upper = upper.min(f.upper);
        if b3.upper <= b1.lower.min(b2.lower) {
            notes.push("beta_t(D3) <= min: upper bound is tight".into());
        }
        let label = class.paper_label.map(|l| l.number);
        asymptotic = asym.map(|a| {
            let up = a[0].max(a[2]) + a[1].max(a[2]);
            let (lo, hi) = (a[0].min(a[1]), a[0].max(a[1]));
            if a[2] <= lo {
                Bounds::exact(a[0] + a[1])
            } else if matches!(label, Some(33 | 34)) && a[2] <= hi {
                Bounds::exact(a[2] + hi)
            } else {
                Bounds { lower: (a[0] + a[1]).max(a[2] + hi), upper: up }
            }
        });
    } else {
        provenance = Provenance::GenericBounds;
        if !fully {
            notes.push("cyclic partially participated interaction: only bounds are known".into());
        }
    }

    if lower > upper {
        return Err(Error::Precondition(format!("bounds crossed: {lower} > {upper}")));
    }
    Ok(RateResult { t, bounds: Bounds { lower, upper }, provenance, epsilon, asymptotic, notes })
}

/// Criticality of one arc of `D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArcReport {
    /// 1-based arc `(u, v)`: receiver `u` knows `x_v`.
    pub arc: (usize, usize),
    pub before: Bounds,
    pub after: Bounds,
    /// `None` when the bounds do not decide.
    pub critical: Option<bool>,
    pub method: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalityReport {
    pub class: InteractionClass,
    /// True when the verdicts concern the limit rate rather than `beta_t`.
    pub asymptotic: bool,
    pub arcs: Vec<ArcReport>,
}

fn best_bounds(p: &Problem) -> Result<(Bounds, &'static str)> {
    if p.tn() <= OracleBudget::default().max_tn {
        return Ok((Bounds::exact(brute_force_beta_t(p, &OracleBudget::default())?), "oracle"));
    }
    if p.tn() <= SEARCH_LIMIT_TN {
        let m = minimize(&ConfusionGraph::build(p)?)?;
        if m.exact {
            return Ok((Bounds::exact(m.cost.rate), "coloring"));
        }
    }
    Ok((dispatch(p)?.bounds, "dispatch"))
}

/// Which arcs raise the rate when removed. Common-sink classes have no
/// critical cross arcs in the limit, which is reported without computation.
pub fn criticality_report(p: &Problem) -> Result<CriticalityReport> {
    let class = classify_problem(p);
    let d = p.digraph();
    let mp = partition(p);
    if class.common_is_sink() {
        let r = dispatch(p)?;
        let limit = r.asymptotic.unwrap_or(r.bounds);
        let arcs = d
            .arcs()
            .into_iter()
            .filter(|&(u, v)| mp.part_of(u) != mp.part_of(v))
            .map(|(u, v)| ArcReport {
                arc: (u + 1, v + 1),
                before: limit,
                after: limit,
                critical: Some(false),
                method: "limit rate is the sum of sub-rates".into(),
            })
            .collect();
        return Ok(CriticalityReport { class, asymptotic: true, arcs });
    }
    let (before, method) = best_bounds(p)?;
    let arcs = d
        .arcs()
        .into_par_iter()
        .map(|(u, v)| {
            let (after, m2) = best_bounds(&p.without_arc(u, v))?;
            let critical = if after.lower > before.upper {
                Some(true)
            } else if before.is_exact() && after.is_exact() {
                Some(false)
            } else {
                None
            };
            let method = if m2 == method { method.to_string() } else { format!("{method}/{m2}") };
            Ok(ArcReport { arc: (u + 1, v + 1), before, after, critical, method })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CriticalityReport { class, asymptotic: false, arcs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem_model::parse_problem;

    fn double_xor() -> Problem {
        parse_problem("(1|2),(2|1),(3|1); M1={1,3}; M2={2,3}").unwrap()
    }

    fn acyclic_chain() -> Problem {
        parse_problem("(1),(2|1,4,5),(3|1,2,4,5),(4|1,5),(5|1,4); M1={1,2,3}; M2={1,4,5}").unwrap()
    }

    fn two_way_common() -> Problem {
        parse_problem("(1|3,4),(2|3,4),(3|1,2,4),(4|1,2); M1={1,3,4}; M2={2,3,4}").unwrap()
    }

    fn one_sided_common() -> Problem {
        parse_problem("(1|2,4,5),(2|4,5),(3|1,2),(4|1,2,5),(5|1,2,4); M1={1,2,4,5}; M2={3,4,5}").unwrap()
    }

    fn two_way_private() -> Problem {
        parse_problem("(1|2),(2|1),(3|4),(4|3); M1={1,3,4}; M2={2,3,4}").unwrap()
    }

    #[test]
    fn structural_rules() {
        let d = acyclic_chain().digraph();
        assert_eq!(structural_beta(&d), Some(Rate::integer(4)));
        assert_eq!(ssuic_structural_beta(&d, &[1, 2], &[0, 3, 4]).unwrap(), Rate::integer(4));
        assert_eq!(ssuic_structural_beta(&Digraph::empty(2), &[0], &[1]).unwrap(), Rate::integer(2));
        // 1 and 2 ignore each other but are joined both ways with 3: max{2, 1}.
        let pair = Digraph::from_arcs(3, &[(0, 2), (2, 0), (1, 2), (2, 1)]);
        assert_eq!(ssuic_structural_beta(&pair, &[0, 1], &[2]).unwrap(), Rate::integer(2));
        let cycle = Digraph::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(structural_beta(&cycle), None);
        assert!(ssuic_structural_beta(&cycle, &[0], &[1, 2]).is_err());
        assert!(ssuic_structural_beta(&cycle, &[0], &[1]).is_err());
        assert_eq!(structural_beta(&Digraph::complete(4)), Some(Rate::integer(1)));
    }

    #[test]
    fn lower_bounds() {
        assert_eq!(lower_bound_single(&acyclic_chain()).value(), Some(Rate::integer(4)));
        assert_eq!(lower_bound_single(&double_xor()).value(), Some(Rate::integer(2)));
        assert_eq!(lower_bound_private_sum(&double_xor()).value(), Some(Rate::integer(2)));
        assert_eq!(lower_bound_private_sum(&one_sided_common()).value(), Some(Rate::integer(3)));
        let shared = parse_problem("(1|2),(2|1); M1={1,2}; M2={1,2}").unwrap();
        assert_eq!(lower_bound_private_sum(&shared).value(), Some(Rate::zero()));
        let empty = Problem::new(vec![], vec![], vec![], 1).unwrap();
        assert_eq!(lower_bound_single(&empty).value(), Some(Rate::zero()));
    }

    #[test]
    fn worked_dispatch() {
        let r = dispatch(&double_xor()).unwrap();
        assert_eq!(r.value(), Some(Rate::integer(2)));
        assert_eq!(r.provenance, Provenance::DoubleXor);
        let r = dispatch(&acyclic_chain()).unwrap();
        assert_eq!(r.value(), Some(Rate::integer(4)));
        assert_eq!(r.asymptotic, Some(Bounds::exact(Rate::integer(4))));
        let r = dispatch(&two_way_common()).unwrap();
        assert_eq!(r.value(), Some(Rate::integer(2)));
        assert_eq!(r.provenance, Provenance::TwoWayCommonMax);
        assert_eq!(r.asymptotic, Some(Bounds::exact(Rate::integer(2))));
        let r = dispatch(&one_sided_common()).unwrap();
        assert_eq!(r.value(), Some(Rate::integer(3)));
        assert_eq!(r.asymptotic, Some(Bounds::exact(Rate::integer(3))));
        let r = dispatch(&two_way_private()).unwrap();
        assert_eq!(r.value(), Some(Rate::integer(3)));
        assert_eq!(r.epsilon, Some(0));
        assert!(r.to_json().contains("\"value\":\"3\""));
    }

    #[test]
    fn criticality() {
        let rep = criticality_report(&double_xor()).unwrap();
        let a = rep.arcs.iter().find(|a| a.arc == (3, 1)).unwrap();
        assert_eq!(a.critical, Some(true));
        assert_eq!(a.after.value(), Some(Rate::integer(3)));
        let rep = criticality_report(&two_way_private()).unwrap();
        assert!(rep.asymptotic && rep.arcs.iter().all(|a| a.critical == Some(false)));
        let arcless = parse_problem("(1),(2); M1={1}; M2={2}").unwrap();
        assert!(criticality_report(&arcless).unwrap().arcs.is_empty());
    }
}
