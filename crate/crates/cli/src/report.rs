//! JSON and text views of analysis results.

use serde::Serialize;

use tsuic_core::index_codes::{verify, IndexCode};
use tsuic_core::msuic::MsProblem;
use tsuic_core::rate_engine::{Bounds, CriticalityReport, RateResult};
use tsuic_core::{classify_problem, partition, CaseLabel, InteractionClass, Problem, Rate};

#[derive(Debug, Default, Serialize)]
pub struct Report {
    pub instance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pools: Option<PoolsView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<ClassView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<RateView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<CodeView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criticality: Option<CriticalityReport>,
    pub notes: Vec<String>,
    /// Only filled in on request so reports stay byte-stable by default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

/// Message classes, 1-based.
#[derive(Debug, Serialize)]
pub struct PartitionView {
    pub p1: Vec<usize>,
    pub p2: Vec<usize>,
    pub p3: Vec<usize>,
}

/// Private pools and the common pool of a multi-sender instance, 1-based.
#[derive(Debug, Serialize)]
pub struct PoolsView {
    pub private: Vec<Vec<usize>>,
    pub common: Vec<usize>,
    pub common_is_sink: bool,
}

#[derive(Debug, Serialize)]
pub struct ClassView {
    pub id: u8,
    pub case: CaseLabel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label_anchored: Option<bool>,
    pub arcs: String,
    pub fully_participated: bool,
    pub summary: String,
}

#[derive(Debug, Serialize)]
pub struct RateView {
    pub method: &'static str,
    pub t: u32,
    pub lower: Rate,
    pub upper: Rate,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotic: Option<Bounds>,
    /// Codeword length per sender when the rate comes from a coloring.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bits: Option<Vec<u32>>,
}

impl RateView {
    pub fn from_dispatch(r: &RateResult) -> RateView {
        RateView {
            method: "dispatch",
            t: r.t,
            lower: r.bounds.lower,
            upper: r.bounds.upper,
            exact: r.exact(),
            provenance: Some(r.provenance.to_string()),
            epsilon: r.epsilon,
            asymptotic: r.asymptotic,
            bits: None,
        }
    }

    pub fn exact(method: &'static str, t: u32, value: Rate, bits: Option<Vec<u32>>) -> RateView {
        RateView {
            method,
            t,
            lower: value,
            upper: value,
            exact: true,
            provenance: None,
            epsilon: None,
            asymptotic: None,
            bits,
        }
    }

    pub fn text(&self) -> String {
        let mut s = if self.exact {
            format!("beta_{} = {}", self.t, self.lower)
        } else {
            format!("beta_{} in [{}, {}]", self.t, self.lower, self.upper)
        };
        s.push_str(&format!(" ({}", self.method));
        if let Some(p) = &self.provenance {
            s.push_str(&format!(": {p}"));
        }
        if let Some(b) = &self.bits {
            let b: Vec<String> = b.iter().map(|x| x.to_string()).collect();
            s.push_str(&format!("; bits {}", b.join("+")));
        }
        s.push(')');
        if let Some(e) = self.epsilon {
            s.push_str(&format!("\nepsilon = {e}"));
        }
        if let Some(a) = &self.asymptotic {
            s.push_str(&format!("\nlimit rate: {a}"));
        }
        s
    }
}

#[derive(Debug, Serialize)]
pub struct CodeView {
    pub method: &'static str,
    pub description: String,
    pub rate: Rate,
    pub bits: [u32; 2],
    pub valid: bool,
    pub code: serde_json::Value,
}

impl CodeView {
    pub fn new(p: &Problem, code: &IndexCode, method: &'static str) -> anyhow::Result<CodeView> {
        Ok(CodeView {
            method,
            description: code.describe(),
            rate: code.rate(),
            bits: [code.p1(), code.p2()],
            valid: verify(p, code)?.is_valid(),
            code: serde_json::from_str(&code.to_json())?,
        })
    }
}

/// One-line class description, e.g. `case II-D (H_33), fully participated`.
pub fn class_summary(c: &InteractionClass) -> String {
    let name = match c.paper_label {
        Some(l) if l.anchored => format!("H_{}", l.number),
        Some(l) => format!("H_{}, inferred label", l.number),
        None => format!("class {}", c.class_id),
    };
    let mut s = format!("case {} ({name})", c.case_label);
    match c.fully_participated {
        Some(true) => s.push_str(", fully participated"),
        Some(false) => s.push_str(", partially participated"),
        None => {}
    }
    s
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|j| j + 1).collect()
}

/// Instance echo, partition and class of a two-sender instance.
pub fn base_report(p: &Problem) -> Report {
    let mp = partition(p);
    let c = classify_problem(p);
    let mut notes = Vec::new();
    if mp.p3.is_empty() {
        notes.push("P3 empty: the instance separates into two single-sender problems".into());
    }
    Report {
        instance: p.to_text(),
        partition: Some(PartitionView { p1: one_based(&mp.p1), p2: one_based(&mp.p2), p3: one_based(&mp.p3) }),
        class: Some(ClassView {
            id: c.class_id,
            case: c.case_label,
            label: c.paper_label.map(|l| format!("H_{}", l.number)),
            label_anchored: c.paper_label.map(|l| l.anchored),
            arcs: c.canonical_arcs.to_string(),
            fully_participated: c.fully_participated == Some(true),
            summary: class_summary(&c),
        }),
        notes,
        ..Report::default()
    }
}

pub fn base_ms_report(p: &MsProblem) -> Report {
    let private = (0..p.n_senders()).map(|s| one_based(p.pool(s))).collect();
    Report {
        instance: p.to_text(),
        pools: Some(PoolsView { private, common: one_based(p.common()), common_is_sink: p.common_is_sink() }),
        ..Report::default()
    }
}

impl Report {
    pub fn add_note(&mut self, note: String) {
        if !self.notes.contains(&note) {
            self.notes.push(note);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Human-readable rendering of whatever sections are present.
    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        if let Some(c) = &self.class {
            out.push(c.summary.clone());
            out.push(format!("f(D) = {} (class {})", c.arcs, c.id));
        }
        if let Some(p) = &self.partition {
            out.push(format!("P1 = {}, P2 = {}, P3 = {}", set_text(&p.p1), set_text(&p.p2), set_text(&p.p3)));
        }
        if let Some(p) = &self.pools {
            out.push(format!("{} senders", p.private.len()));
            for (s, pool) in p.private.iter().enumerate() {
                out.push(format!("P{} = {}", s + 1, set_text(pool)));
            }
            let sink = if p.common_is_sink { "no arcs out" } else { "arcs out" };
            out.push(format!("common = {} ({sink})", set_text(&p.common)));
        }
        if let Some(r) = &self.rate {
            out.push(r.text());
        }
        if let Some(c) = &self.code {
            out.push(c.description.clone());
            out.push(format!("rate {} ({} + {} bits), {}", c.rate, c.bits[0], c.bits[1], if c.valid { "valid" } else { "INVALID" }));
        }
        if let Some(cr) = &self.criticality {
            let scope = if cr.asymptotic { "limit rate" } else { "finite t" };
            out.push(format!("arc criticality ({scope}):"));
            for a in &cr.arcs {
                let verdict = match a.critical {
                    Some(true) => "critical",
                    Some(false) => "not critical",
                    None => "undecided",
                };
                out.push(format!("  ({},{}) {verdict}: {} -> {} [{}]", a.arc.0, a.arc.1, a.before, a.after, a.method));
            }
        }
        for n in &self.notes {
            out.push(format!("note: {n}"));
        }
        if let Some(ms) = self.elapsed_ms {
            out.push(format!("elapsed {ms} ms"));
        }
        out.join("\n") + "\n"
    }
}

/// Prints already 1-based indices as a set.
fn set_text(v: &[usize]) -> String {
    let v: Vec<String> = v.iter().map(|j| j.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tsuic_core::parse_problem;

    #[test]
    fn summaries_name_anchored_and_inferred_labels() {
        let double_xor = parse_problem("(1|2),(2|1),(3|1); M1={1,3}; M2={2,3}").unwrap();
        assert_eq!(class_summary(&classify_problem(&double_xor)), "case II-D (H_33), fully participated");
        let c = tsuic_core::classify(tsuic_core::InteractionDigraph::from_arcs(&[(1, 2), (2, 3), (3, 1)]));
        assert_eq!(class_summary(&c), "case II-D (H_36, inferred label)");
    }

    #[test]
    fn text_rendering_lists_rate_and_notes() {
        let p = parse_problem("(1|2),(2|1),(3); M1={1,2}; M2={3}").unwrap();
        let mut r = base_report(&p);
        r.rate = Some(RateView::exact("oracle", 1, Rate::integer(2), None));
        let text = r.to_text();
        assert!(text.contains("beta_1 = 2 (oracle)"));
        assert!(text.contains("note: P3 empty"));
        r.add_note("P3 empty: the instance separates into two single-sender problems".into());
        assert_eq!(r.notes.len(), 1);
    }
}
