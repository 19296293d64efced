//! Two-sender index codes: tables, verification, conversion to and from
//! colorings, and the XOR constructions for the cyclic cases.
//!
//! Codewords are `u64` values whose bit `k` is the `k`-th transmitted bit. A
//! sender's table is indexed by its packed inputs: input `j` (in ascending
//! message order) occupies bits `j*t .. j*t+t`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitops::{low_mask, message_bits, pdep, pext};
use crate::confusion::{chromatic_ssuic, ConfusionGraph};
use crate::digraph::Digraph;
use crate::error::{invalid, Error, Result};
use crate::problem_model::{classify_problem, partition, CaseLabel, Problem};
use crate::rate::{ceil_log2, Rate};
use crate::two_sender_coloring::TwoSenderColoring;

/// Largest `t*N` for which codes are tabulated and verified.
pub const CODE_LIMIT_TN: usize = 20;

/// Finite bit string, printed as `(101)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitWord(pub Vec<bool>);

impl BitWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The low `len` bits of `value`, bit 0 first.
    pub fn from_value(value: u64, len: u32) -> BitWord {
        BitWord((0..len).map(|k| value >> k & 1 == 1).collect())
    }

    pub fn value(&self) -> u64 {
        self.0.iter().enumerate().fold(0, |acc, (k, &b)| acc | (b as u64) << k)
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(f, "({s})")
    }
}

impl FromStr for BitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<BitWord> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        inner
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(invalid(format!("not a bit: {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitWord)
    }
}

/// XOR after appending zeros to the shorter word.
pub fn xor_pad(a: &BitWord, b: &BitWord) -> BitWord {
    let n = a.len().max(b.len());
    let bit = |w: &BitWord, k: usize| w.0.get(k).copied().unwrap_or(false);
    BitWord((0..n).map(|k| bit(a, k) ^ bit(b, k)).collect())
}

/// One sender's encoding function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SenderEncoder {
    /// Messages read by the table, ascending, 0-based.
    pub inputs: Vec<usize>,
    /// Sub-codeword length in bits.
    pub p: u32,
    pub table: Vec<u64>,
}

impl SenderEncoder {
    fn check(&self, t: u32, n: usize) -> Result<()> {
        if self.inputs.windows(2).any(|w| w[0] >= w[1]) || self.inputs.iter().any(|&m| m >= n) {
            return Err(Error::Dimension(format!("inputs {:?} must be ascending and below {n}", self.inputs)));
        }
        let width = t as usize * self.inputs.len();
        if width > CODE_LIMIT_TN {
            return Err(Error::Guardrail { tn: width, limit: CODE_LIMIT_TN });
        }
        if self.table.len() != 1 << width {
            return Err(Error::Dimension(format!(
                "table has {} entries, expected 2^{width}",
                self.table.len()
            )));
        }
        if self.p > 63 || self.table.iter().any(|&w| w > low_mask(self.p)) {
            return Err(Error::Dimension(format!("table entries exceed {} bits", self.p)));
        }
        Ok(())
    }

    fn encode(&self, x: u64, t: u32) -> u64 {
        self.table[pext(x, message_bits(&self.inputs, t)) as usize]
    }

    /// Tabulates a function of the full realization restricted to `inputs`.
    fn tabulate(inputs: Vec<usize>, t: u32, p: u32, f: impl Fn(u64) -> u64) -> SenderEncoder {
        let mask = message_bits(&inputs, t);
        let len = 1usize << (t as usize * inputs.len());
        let table = (0..len as u64).map(|a| f(pdep(a, mask))).collect();
        SenderEncoder { inputs, p, table }
    }

    /// A message in `inputs` outside `allowed` whose value changes the output.
    fn depends_outside(&self, allowed: &[usize], t: u32) -> Option<usize> {
        self.inputs.iter().enumerate().find_map(|(j, &m)| {
            if allowed.contains(&m) {
                return None;
            }
            let flips = (0..t).map(|b| 1usize << (j as u32 * t + b));
            let depends = flips
                .into_iter()
                .any(|f| (0..self.table.len()).any(|a| self.table[a] != self.table[a ^ f]));
            depends.then_some(m)
        })
    }

    /// XOR clauses over message indices when the table is linear and `t = 1`.
    pub fn linear_form(&self, t: u32) -> Option<Vec<Vec<usize>>> {
        if t != 1 || self.table.first() != Some(&0) {
            return None;
        }
        let k = self.inputs.len();
        let basis: Vec<u64> = (0..k).map(|j| self.table[1 << j]).collect();
        let linear = (0..self.table.len())
            .all(|a| self.table[a] == (0..k).filter(|j| a >> j & 1 == 1).fold(0, |acc, j| acc ^ basis[j]));
        linear.then(|| {
            (0..self.p)
                .map(|bit| (0..k).filter(|&j| basis[j] >> bit & 1 == 1).map(|j| self.inputs[j]).collect())
                .collect()
        })
    }
}

/// A pair of sender encoders at block length `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCode {
    pub t: u32,
    pub s1: SenderEncoder,
    pub s2: SenderEncoder,
}

fn clause_string(c: &[usize]) -> String {
    if c.is_empty() {
        return "0".into();
    }
    c.iter().map(|m| format!("x{}", m + 1)).collect::<Vec<_>>().join("⊕")
}

impl IndexCode {
    pub fn p1(&self) -> u32 {
        self.s1.p
    }

    pub fn p2(&self) -> u32 {
        self.s2.p
    }

    pub fn rate(&self) -> Rate {
        Rate::from_bits(self.s1.p + self.s2.p, self.t)
    }

    pub fn sender(&self, s: usize) -> &SenderEncoder {
        match s {
            1 => &self.s1,
            2 => &self.s2,
            _ => panic!("sender index must be 1 or 2"),
        }
    }

    /// Sub-codewords sent on the packed realization `x`.
    pub fn codeword(&self, x: u64) -> (u64, u64) {
        (self.s1.encode(x, self.t), self.s2.encode(x, self.t))
    }

    /// Builds a code from XOR clauses (0-based message indices). Each clause
    /// contributes `t` bits: bit `j` is the XOR of bit `j` of every message in
    /// the clause. Sender inputs are its message set plus anything referenced.
    pub fn from_linear(p: &Problem, l1: &[Vec<usize>], l2: &[Vec<usize>]) -> Result<IndexCode> {
        let t = p.t();
        let enc = |s: usize, clauses: &[Vec<usize>]| -> Result<SenderEncoder> {
            let mut inputs: Vec<usize> = p.sender_set(s).to_vec();
            for &m in clauses.iter().flatten() {
                if m >= p.n() {
                    return Err(Error::Dimension(format!("clause message {} out of range", m + 1)));
                }
                inputs.push(m);
            }
            inputs.sort_unstable();
            inputs.dedup();
            let bits = t * clauses.len() as u32;
            if t as usize * inputs.len() > CODE_LIMIT_TN || bits > 63 {
                return Err(Error::Guardrail { tn: t as usize * inputs.len(), limit: CODE_LIMIT_TN });
            }
            let tm = low_mask(t);
            Ok(SenderEncoder::tabulate(inputs, t, bits, |x| {
                clauses.iter().enumerate().fold(0, |acc, (k, c)| {
                    let v = c.iter().fold(0, |v, &m| v ^ (x >> (m as u32 * t) & tm));
                    acc | v << (k as u32 * t)
                })
            }))
        };
        Ok(IndexCode { t, s1: enc(1, l1)?, s2: enc(2, l2)? })
    }

    pub fn linear_forms(&self) -> Option<(Vec<Vec<usize>>, Vec<Vec<usize>>)> {
        Some((self.s1.linear_form(self.t)?, self.s2.linear_form(self.t)?))
    }

    /// Short human-readable form, e.g. `S1: {x1⊕x3}; S2: {x2⊕x4}`.
    pub fn describe(&self) -> String {
        match self.linear_forms() {
            Some((a, b)) => {
                let side = |l: &[Vec<usize>]| l.iter().map(|c| clause_string(c)).collect::<Vec<_>>().join(", ");
                format!("S1: {{{}}}; S2: {{{}}}", side(&a), side(&b))
            }
            None => format!("S1: {}-bit table; S2: {}-bit table", self.s1.p, self.s2.p),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CodeJson::from(self)).expect("codes serialize")
    }

    /// Loads linear forms when both senders give one and tables otherwise;
/// message indices are 1-based.
    pub fn from_json(p: &Problem, text: &str) -> Result<IndexCode> {
        let j: CodeJson = serde_json::from_str(text)?;
        if j.t.is_some_and(|t| t != p.t()) {
            return Err(Error::Dimension(format!("code has t={}, problem has t={}", j.t.unwrap(), p.t())));
        }
        match (&j.s1.linear, &j.s2.linear) {
            (Some(a), Some(b)) => IndexCode::from_linear(p, &zero_based(a)?, &zero_based(b)?),
            // Mixed or table-only: every sender must then carry its table.
            _ => {
                let enc = |s: &SenderJson| -> Result<SenderEncoder> {
                    let inputs = zero_based(&[s.inputs.clone().unwrap_or_default()])?.remove(0);
                    let e = SenderEncoder {
                        inputs,
                        p: s.p.ok_or_else(|| invalid("table form needs p"))?,
                        table: s.table.clone().ok_or_else(|| invalid("missing table"))?,
                    };
                    e.check(p.t(), p.n())?;
                    Ok(e)
                };
                Ok(IndexCode { t: p.t(), s1: enc(&j.s1)?, s2: enc(&j.s2)? })
            }
        }
    }
}

fn zero_based(clauses: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    clauses
        .iter()
        .map(|c| c.iter().map(|&m| m.checked_sub(1).ok_or_else(|| invalid("messages are 1-based"))).collect())
        .collect()
}

#[derive(Serialize, Deserialize)]
struct SenderJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inputs: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    linear: Option<Vec<Vec<usize>>>,
}

#[derive(Serialize, Deserialize)]
struct CodeJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<u32>,
    s1: SenderJson,
    s2: SenderJson,
}

impl From<&IndexCode> for CodeJson {
    fn from(c: &IndexCode) -> CodeJson {
        let s = |e: &SenderEncoder| SenderJson {
            p: Some(e.p),
            inputs: Some(e.inputs.iter().map(|m| m + 1).collect()),
            table: Some(e.table.clone()),
            linear: e.linear_form(c.t).map(|l| l.iter().map(|cl| cl.iter().map(|m| m + 1).collect()).collect()),
        };
        CodeJson { t: Some(c.t), s1: s(&c.s1), s2: s(&c.s2) }
    }
}

/// Why a code fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CodeVerdict {
    Valid,
    /// Receiver `receiver` sees the same codewords and side information on
    /// realizations `x` and `y`, which differ in its wanted message.
    Undecodable { receiver: usize, x: u64, y: u64 },
    /// Sender `sender` reads `message`, which it does not hold.
    OutsideSenderSet { sender: usize, message: usize },
}

impl CodeVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, CodeVerdict::Valid)
    }
}

fn first_collision(
    n: usize,
    t: u32,
    side: &[Vec<usize>],
    word: impl Fn(u64) -> (u64, u64) + Sync,
) -> Option<(usize, u64, u64)> {
    let total = 1u64 << (t as usize * n);
    (0..n).into_par_iter().find_map_first(|r| {
        let known = message_bits(&side[r], t);
        let want = message_bits(&[r], t);
        let mut seen: HashMap<(u64, u64, u64), u64> = HashMap::new();
        for x in 0..total {
            let (a, b) = word(x);
            match seen.entry((a, b, x & known)) {
                std::collections::hash_map::Entry::Occupied(e) => {
                    let y = *e.get();
                    if (x ^ y) & want != 0 {
                        return Some((r, y, x));
                    }
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(x);
                }
            }
        }
        None
    })
}

/// Checks the sender constraint and decodability at every receiver.
pub fn verify(p: &Problem, code: &IndexCode) -> Result<CodeVerdict> {
    if code.t != p.t() {
        return Err(Error::Dimension(format!("code has t={}, problem has t={}", code.t, p.t())));
    }
    if p.tn() > CODE_LIMIT_TN {
        return Err(Error::Guardrail { tn: p.tn(), limit: CODE_LIMIT_TN });
    }
    for s in 1..=2 {
        let e = code.sender(s);
        e.check(p.t(), p.n())?;
        if let Some(message) = e.depends_outside(p.sender_set(s), p.t()) {
            return Ok(CodeVerdict::OutsideSenderSet { sender: s, message });
        }
    }
    Ok(match first_collision(p.n(), p.t(), p.side_info(), |x| code.codeword(x)) {
        Some((receiver, x, y)) => CodeVerdict::Undecodable { receiver, x, y },
        None => CodeVerdict::Valid,
    })
}

/// Sender message sets implied by a two-sender labeling.
fn labeled_sender_sets(g: &ConfusionGraph) -> Result<[Vec<usize>; 2]> {
    let groups = g.labeling().groups();
    if groups.len() != 3 {
        return Err(Error::Dimension("two-sender codes need a three-group labeling".into()));
    }
    let join = |a: &[usize], b: &[usize]| {
        let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
        v.sort_unstable();
        v
    };
    Ok([join(&groups[0], &groups[2]), join(&groups[1], &groups[2])])
}

/// Indexes each sender's colors in order of first appearance over vertices.
pub fn coloring_to_code(g: &ConfusionGraph, c: &TwoSenderColoring) -> Result<IndexCode> {
    if !crate::two_sender_coloring::validate(g, c)?.is_valid() {
        return Err(Error::InvalidColoring("coloring does not validate".into()));
    }
    let t = g.t();
    let sets = labeled_sender_sets(g)?;
    let l = g.labeling();
    let mut encoders = Vec::with_capacity(2);
    for (s, inputs) in sets.into_iter().enumerate() {
        let mask = message_bits(&inputs, t);
        let mut index: HashMap<u32, u64> = HashMap::new();
        let mut table = vec![0u64; 1 << (t as usize * inputs.len())];
        for v in 0..g.vertex_count() {
            let (b_own, b3) = (l.sub_label(v, s), l.sub_label(v, 2));
            let color = if s == 0 { c.color1(b_own, b3) } else { c.color2(b_own, b3) };
            let next = index.len() as u64;
            let id = *index.entry(color).or_insert(next);
            table[pext(l.realization(v), mask) as usize] = id;
        }
        let p = ceil_log2(index.len() as u64);
        encoders.push(SenderEncoder { inputs, p, table });
    }
    let s2 = encoders.pop().unwrap();
    let s1 = encoders.pop().unwrap();
    Ok(IndexCode { t, s1, s2 })
}

/// Uses each sub-codeword as a color.
pub fn code_to_coloring(g: &ConfusionGraph, code: &IndexCode) -> Result<TwoSenderColoring> {
    let sets = labeled_sender_sets(g)?;
    if code.t != g.t() {
        return Err(Error::Dimension("block lengths differ".into()));
    }
    for (s, allowed) in sets.iter().enumerate() {
        let e = code.sender(s + 1);
        e.check(code.t, g.n())?;
        if let Some(m) = e.depends_outside(allowed, code.t) {
            return Err(Error::Precondition(format!("sender {} reads x{}", s + 1, m + 1)));
        }
    }
    let l = g.labeling();
    let mut j1 = vec![vec![0u32; l.group_size(0)]; l.group_size(2)];
    let mut j2 = vec![vec![0u32; l.group_size(1)]; l.group_size(2)];
    for v in 0..g.vertex_count() {
        let (a, b) = code.codeword(l.realization(v));
        let (b1, b2, b3) = (l.sub_label(v, 0), l.sub_label(v, 1), l.sub_label(v, 2));
        j1[b3][b1] = a as u32;
        j2[b3][b2] = b as u32;
    }
    Ok(TwoSenderColoring { j1, j2 })
}

/// Single-sender code for the sub-digraph induced on `messages`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubCode {
    /// Messages covered, ascending, 0-based in the parent problem.
    pub messages: Vec<usize>,
    pub t: u32,
    pub len: u32,
    pub table: Vec<u64>,
}

impl SubCode {
    /// Optimal code from an exact coloring of `Γ_t` of the induced sub-digraph,
    /// colors renumbered by first appearance over realizations.
    pub fn optimal(d: &Digraph, messages: &[usize], t: u32) -> Result<SubCode> {
        let sub = d.induced(messages);
        let chi = chromatic_ssuic(&sub, t)?;
        if !chi.exact {
            return Err(Error::BudgetExceeded("sub-digraph chromatic number not resolved".into()));
        }
        let mut index: HashMap<u32, u64> = HashMap::new();
        let table = chi
            .coloring
            .iter()
            .map(|&c| {
                let next = index.len() as u64;
                *index.entry(c).or_insert(next)
            })
            .collect();
        Ok(SubCode { messages: messages.to_vec(), t, len: ceil_log2(index.len() as u64), table })
    }

    /// Linear sub-code from XOR clauses over parent message indices.
    pub fn from_linear(messages: &[usize], t: u32, clauses: &[Vec<usize>]) -> Result<SubCode> {
        let width = t as usize * messages.len();
        if width > CODE_LIMIT_TN {
            return Err(Error::Guardrail { tn: width, limit: CODE_LIMIT_TN });
        }
        let local = |m: usize| messages.iter().position(|&q| q == m);
        let tm = low_mask(t);
        let mut table = vec![0u64; 1 << width];
        for (a, w) in table.iter_mut().enumerate() {
            for (k, c) in clauses.iter().enumerate() {
                let mut v = 0;
                for &m in c {
                    let j = local(m).ok_or_else(|| invalid(format!("x{} not in the sub-digraph", m + 1)))?;
                    v ^= (a as u64) >> (j as u32 * t) & tm;
                }
                *w |= v << (k as u32 * t);
            }
        }
        Ok(SubCode { messages: messages.to_vec(), t, len: t * clauses.len() as u32, table })
    }

    fn word(&self, x: u64) -> u64 {
        self.table[pext(x, message_bits(&self.messages, self.t)) as usize]
    }

    /// Decodability for the receivers of the sub-digraph using only its messages.
    pub fn is_decodable(&self, d: &Digraph) -> bool {
        let sub = d.induced(&self.messages);
        let side: Vec<Vec<usize>> = (0..sub.n()).map(|v| sub.out_neighbors(v)).collect();
        first_collision(sub.n(), self.t, &side, |a| (self.table[a as usize], 0)).is_none()
    }
}

/// Optimal single-sender codes for `D1`, `D2`, `D3`.
pub fn optimal_sub_codes(p: &Problem) -> Result<[SubCode; 3]> {
    let mp = partition(p);
    let d = p.digraph();
    Ok([
        SubCode::optimal(&d, mp.d1(), p.t())?,
        SubCode::optimal(&d, mp.d2(), p.t())?,
        SubCode::optimal(&d, mp.d3(), p.t())?,
    ])
}

fn check_construction(p: &Problem, subs: &[SubCode; 3], want: CaseLabel) -> Result<()> {
    let class = classify_problem(p);
    if class.case_label != want || class.fully_participated != Some(true) {
        return Err(Error::Precondition(format!("construction for {want} applied to {class}")));
    }
    if p.tn() > CODE_LIMIT_TN {
        return Err(Error::Guardrail { tn: p.tn(), limit: CODE_LIMIT_TN });
    }
    let mp = partition(p);
    let d = p.digraph();
    for (i, s) in subs.iter().enumerate() {
        if s.messages != mp.part(i + 1) || s.t != p.t() {
            return Err(Error::Dimension(format!("sub-code {} does not cover D{}", i + 1, i + 1)));
        }
        if !s.is_decodable(&d) {
            return Err(Error::Precondition(format!("sub-code for D{} is not decodable", i + 1)));
        }
    }
    Ok(())
}

/// Assembles encoders from per-sender word functions of the realization.
fn assemble(p: &Problem, p1: u32, p2: u32, f1: impl Fn(u64) -> u64, f2: impl Fn(u64) -> u64) -> IndexCode {
    IndexCode {
        t: p.t(),
        s1: SenderEncoder::tabulate(p.m1().to_vec(), p.t(), p1, f1),
        s2: SenderEncoder::tabulate(p.m2().to_vec(), p.t(), p2, f2),
    }
}

/// CASE II-B: split or XOR the common code into the private codes depending on
/// the sub-code lengths.
pub fn construct_case_iib(p: &Problem, subs: &[SubCode; 3]) -> Result<IndexCode> {
    check_construction(p, subs, CaseLabel::IIB)?;
    let [c1, c2, c3] = subs;
    let (l1, l2, l3) = (c1.len, c2.len, c3.len);
    if l3 >= l1 + l2 || l3 >= l1.max(l2) {
        // The first `l1` bits of the common code ride on sender 1, the rest on sender 2.
        let lo = low_mask(l1);
        Ok(assemble(
            p,
            l1,
            l2.max(l3 - l1),
            |x| c1.word(x) ^ (c3.word(x) & lo),
            |x| c2.word(x) ^ (c3.word(x) >> l1),
        ))
    } else if l3 <= l1 {
        Ok(assemble(p, l1, l2, |x| c1.word(x) ^ c3.word(x), |x| c2.word(x)))
    } else {
        Ok(assemble(p, l1, l2, |x| c1.word(x), |x| c2.word(x) ^ c3.word(x)))
    }
}

/// CASE II-C: the common code is XORed onto the sender whose private part has
/// a two-way interaction with the common part.
pub fn construct_case_iic(p: &Problem, subs: &[SubCode; 3]) -> Result<IndexCode> {
    check_construction(p, subs, CaseLabel::IIC)?;
    let h = crate::problem_model::interaction_map(p, &partition(p));
    let [c1, c2, c3] = subs;
    if h.both(1, 3) {
        Ok(assemble(p, c1.len.max(c3.len), c2.len, |x| c1.word(x) ^ c3.word(x), |x| c2.word(x)))
    } else {
        Ok(assemble(p, c1.len, c2.len.max(c3.len), |x| c1.word(x), |x| c2.word(x) ^ c3.word(x)))
    }
}

/// CASE II-D: the common code is XORed onto both senders.
pub fn construct_case_iid(p: &Problem, subs: &[SubCode; 3]) -> Result<IndexCode> {
    check_construction(p, subs, CaseLabel::IID)?;
    let [c1, c2, c3] = subs;
    Ok(assemble(
        p,
        c1.len.max(c3.len),
        c2.len.max(c3.len),
        |x| c1.word(x) ^ c3.word(x),
        |x| c2.word(x) ^ c3.word(x),
    ))
}

/// Concatenation of the three sub-codes; the common one goes to sender 1.
pub fn construct_concatenated(p: &Problem, subs: &[SubCode; 3]) -> IndexCode {
    let [c1, c2, c3] = subs;
    assemble(p, c1.len + c3.len, c2.len, |x| c1.word(x) | c3.word(x) << c1.len, |x| c2.word(x))
}

/// The case-specific construction for fully participated cyclic instances with
/// a non-sink common part, otherwise concatenation.
pub fn construct(p: &Problem, subs: &[SubCode; 3]) -> Result<IndexCode> {
    let class = classify_problem(p);
    if class.fully_participated == Some(true) {
        match class.case_label {
            CaseLabel::IIB => return construct_case_iib(p, subs),
            CaseLabel::IIC => return construct_case_iic(p, subs),
            CaseLabel::IID => return construct_case_iid(p, subs),
            _ => {}
        }
    }
    Ok(construct_concatenated(p, subs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem_model::parse_problem;
    use crate::two_sender_coloring::{minimize, validate};

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

    #[test]
    fn xor_pad_appends_zeros() {
        let a: BitWord = "(101)".parse().unwrap();
        let b: BitWord = "(001101)".parse().unwrap();
        assert_eq!(xor_pad(&a, &b).to_string(), "(100101)");
        assert_eq!(xor_pad(&a, &BitWord::default()), a);
        assert_eq!(xor_pad(&a, &a).to_string(), "(000)");
        assert_eq!(BitWord::from_value(a.value(), 3), a);
    }

    #[test]
    fn worked_codes_verify() {
        let c = IndexCode::from_linear(&two_way_common(), &[vec![0, 2]], &[vec![1, 3]]).unwrap();
        assert!(verify(&two_way_common(), &c).unwrap().is_valid());
        assert_eq!(c.rate(), Rate::integer(2));
        let c = IndexCode::from_linear(&acyclic_chain(), &[vec![0], vec![1], vec![2]], &[vec![3, 4]]).unwrap();
        assert!(verify(&acyclic_chain(), &c).unwrap().is_valid());
        assert_eq!(c.rate(), Rate::integer(4));
        let c = IndexCode::from_linear(&double_xor(), &[vec![0, 2]], &[vec![1, 2]]).unwrap();
        assert!(verify(&double_xor(), &c).unwrap().is_valid());
        assert_eq!(c.describe(), "S1: {x1⊕x3}; S2: {x2⊕x3}");
        let c = IndexCode::from_linear(&one_sided_common(), &[vec![0, 3, 4], vec![1]], &[vec![2]]).unwrap();
        assert!(verify(&one_sided_common(), &c).unwrap().is_valid());
    }

    #[test]
    fn failures_have_witnesses() {
        let c = IndexCode::from_linear(&double_xor(), &[vec![0, 2]], &[vec![1]]).unwrap();
        match verify(&double_xor(), &c).unwrap() {
            CodeVerdict::Undecodable { receiver, x, y } => {
                // Receiver 1 knows only x2 and cannot strip x3 from x1⊕x3.
                assert_eq!(receiver, 0);
                assert_ne!((x ^ y) & 0b001, 0);
            }
            v => panic!("unexpected {v:?}"),
        }
        let c = IndexCode::from_linear(&double_xor(), &[vec![0, 1]], &[vec![1, 2]]).unwrap();
        assert_eq!(verify(&double_xor(), &c).unwrap(), CodeVerdict::OutsideSenderSet { sender: 1, message: 1 });
    }

    #[test]
    fn worked_coloring_gives_four_codewords() {
        let p = double_xor();
        let g = ConfusionGraph::build(&p).unwrap();
        let col = TwoSenderColoring { j1: vec![vec![0, 1], vec![1, 0]], j2: vec![vec![0, 1], vec![1, 0]] };
        let code = coloring_to_code(&g, &col).unwrap();
        assert!(verify(&p, &code).unwrap().is_valid());
        let words: std::collections::BTreeSet<_> = (0..8).map(|x| code.codeword(x)).collect();
        assert_eq!(words.len(), 4);
        assert_eq!(code.describe(), "S1: {x1⊕x3}; S2: {x2⊕x3}");
    }

    #[test]
    fn round_trips() {
        for p in [double_xor(), two_way_common(), one_sided_common()] {
            let g = ConfusionGraph::build(&p).unwrap();
            let m = minimize(&g).unwrap();
            let code = coloring_to_code(&g, &m.coloring).unwrap();
            assert!(verify(&p, &code).unwrap().is_valid());
            assert_eq!(code.rate(), m.cost.rate);
            let back = code_to_coloring(&g, &code).unwrap();
            assert!(validate(&g, &back).unwrap().is_valid());
        }
        let p = parse_problem("(1|2),(2|1); M1={1,2}; M2={1,2}").unwrap();
        let g = ConfusionGraph::build(&p).unwrap();
        let col = TwoSenderColoring { j1: vec![vec![0]; 4], j2: vec![vec![0]; 4] };
        assert!(coloring_to_code(&g, &col).is_err());
    }

    #[test]
    fn empty_code_on_edgeless_graph() {
        // Only the message-free instance has an edgeless confusion graph.
        let p = Problem::new(vec![], vec![], vec![], 1).unwrap();
        let g = ConfusionGraph::build(&p).unwrap();
        let col = TwoSenderColoring { j1: vec![vec![0]], j2: vec![vec![0]] };
        let code = coloring_to_code(&g, &col).unwrap();
        assert_eq!((code.p1(), code.p2()), (0, 0));
        assert!(verify(&p, &code).unwrap().is_valid());
    }

    #[test]
    fn two_way_common_construction() {
        let p = two_way_common();
        let subs = optimal_sub_codes(&p).unwrap();
        assert_eq!(subs.iter().map(|s| s.len).collect::<Vec<_>>(), vec![1, 1, 2]);
        let c = construct_case_iib(&p, &subs).unwrap();
        assert!(verify(&p, &c).unwrap().is_valid());
        assert_eq!(c.rate(), Rate::integer(2));
        assert_eq!(c.describe(), "S1: {x1⊕x3}; S2: {x2⊕x4}");
        let hand = [
            SubCode::from_linear(&[0], 1, &[vec![0]]).unwrap(),
            SubCode::from_linear(&[1], 1, &[vec![1]]).unwrap(),
            SubCode::from_linear(&[2, 3], 1, &[vec![2], vec![3]]).unwrap(),
        ];
        assert_eq!(construct_case_iib(&p, &hand).unwrap().describe(), "S1: {x1⊕x3}; S2: {x2⊕x4}");
    }

    #[test]
    fn one_sided_common_construction() {
        let p = one_sided_common();
        let subs = optimal_sub_codes(&p).unwrap();
        let c = construct_case_iic(&p, &subs).unwrap();
        assert!(verify(&p, &c).unwrap().is_valid());
        assert_eq!(c.rate(), Rate::integer(3));
        assert_eq!(c.describe(), "S1: {x1⊕x4⊕x5, x2}; S2: {x3}");
    }

    #[test]
    fn double_xor_construction() {
        let p = double_xor();
        let subs = optimal_sub_codes(&p).unwrap();
        let c = construct_case_iid(&p, &subs).unwrap();
        assert!(verify(&p, &c).unwrap().is_valid());
        assert_eq!(c.describe(), "S1: {x1⊕x3}; S2: {x2⊕x3}");
        assert!(matches!(construct_case_iib(&p, &subs), Err(Error::Precondition(_))));
    }

    #[test]
    fn undecodable_sub_code_rejected() {
        let p = double_xor();
        let mut subs = optimal_sub_codes(&p).unwrap();
        subs[0] = SubCode::from_linear(&[0], 1, &[]).unwrap();
        assert!(matches!(construct_case_iid(&p, &subs), Err(Error::Precondition(_))));
    }

    #[test]
    fn json_forms() {
        let p = two_way_common();
        let lin = IndexCode::from_json(&p, r#"{"s1":{"linear":[[1,3]]},"s2":{"linear":[[2,4]]}}"#).unwrap();
        assert!(verify(&p, &lin).unwrap().is_valid());
        let back = IndexCode::from_json(&p, &lin.to_json()).unwrap();
        assert_eq!(back, lin);
        assert!(IndexCode::from_json(&p, r#"{"s1":{"linear":[[1]]},"s2":{"p":0,"table":[0]}}"#).is_err());
    }
}
