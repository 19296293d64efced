//! Instance generators for sweeps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::digraph::Digraph;
use crate::error::Result;
use crate::msuic::MsProblem;
use crate::problem_model::{compose, enumerate_classes, CaseLabel, InteractionDigraph, Problem};

/// Every digraph on `n` labeled vertices (`2^(n(n-1))` of them).
pub fn all_digraphs(n: usize) -> Vec<Digraph> {
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    (0..1u64 << pairs.len())
        .map(|w| {
            let arcs: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(k, _)| w >> k & 1 == 1).map(|(_, &a)| a).collect();
            Digraph::from_arcs(n, &arcs)
        })
        .collect()
}

/// Fully participated instances of `h` for every choice of internal
/// side information with the given part sizes.
pub fn composed(h: InteractionDigraph, sizes: [usize; 3], t: u32) -> Result<Vec<Problem>> {
    let [a, b, c] = sizes.map(all_digraphs);
    let mut out = Vec::new();
    for d1 in &a {
        for d2 in &b {
            for d3 in &c {
                out.push(compose(h, [d1, d2, d3], t, usize::MAX)?);
            }
        }
    }
    Ok(out)
}

/// Part sizes used by the class-consistency sweep.
pub const FP36_SIZES: [[usize; 3]; 4] = [[1, 1, 1], [2, 1, 1], [1, 2, 1], [1, 1, 2]];

/// All 36 classes, fully participated, at `t = 1` with every internal side
/// information pattern for the part sizes in [`FP36_SIZES`].
pub fn fp36() -> Vec<Problem> {
    let mut out = Vec::new();
    for class in enumerate_classes() {
        for sizes in FP36_SIZES {
            out.extend(composed(class.canonical_arcs, sizes, 1).expect("small instances"));
        }
    }
    out
}

/// Two-way common-part classes with a two-vertex common part.
pub fn iib() -> Vec<Problem> {
    let mut out = Vec::new();
    for class in enumerate_classes().into_iter().filter(|c| c.case_label == CaseLabel::IIB) {
        for sizes in [[1, 1, 2], [2, 1, 2], [1, 2, 2]] {
            out.extend(composed(class.canonical_arcs, sizes, 1).expect("small instances"));
        }
    }
    out
}

/// Classes whose common part has no out-arcs and whose private parts have no
/// arcs between them or arcs both ways (the no-arc and two-way-private shapes).
pub fn common_sink_corners() -> Vec<Problem> {
    let corner = [InteractionDigraph::from_arcs(&[]), InteractionDigraph::from_arcs(&[(1, 2), (2, 1), (1, 3), (2, 3)])];
    let mut out = Vec::new();
    for h in corner {
        for sizes in [[1, 1, 1], [2, 1, 1], [1, 1, 2], [2, 2, 1], [2, 1, 2], [1, 2, 2], [2, 2, 2]] {
            out.extend(composed(h, sizes, 1).expect("small instances"));
        }
        for sizes in [[1, 1, 1], [2, 1, 1], [1, 1, 2]] {
            out.extend(composed(h, sizes, 2).expect("small instances"));
        }
    }
    out
}

/// Every two-sender instance on `n` messages at block length `t`: all side
/// information digraphs times all assignments of messages to P1, P2, P3.
pub fn exhaustive(n: usize, t: u32) -> Vec<Problem> {
    let mut out = Vec::new();
    for d in all_digraphs(n) {
        for code in 0..3usize.pow(n as u32) {
            let (m1, m2) = assignment(n, code);
            out.push(Problem::from_digraph(&d, m1, m2, t).expect("valid by construction"));
        }
    }
    out
}

/// Message sets for the base-3 digit string `code` (0 = P1, 1 = P2, 2 = P3).
fn assignment(n: usize, mut code: usize) -> (Vec<usize>, Vec<usize>) {
    let (mut m1, mut m2) = (Vec::new(), Vec::new());
    for m in 0..n {
        match code % 3 {
            0 => m1.push(m),
            1 => m2.push(m),
            _ => {
                m1.push(m);
                m2.push(m);
            }
        }
        code /= 3;
    }
    (m1, m2)
}

/// Arcs included independently with probability 1/2, parts uniform.
pub fn random_problem(rng: &mut impl Rng, n: usize, t: u32) -> Problem {
    let mut d = Digraph::empty(n);
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(0.5) {
                d.add_arc(u, v);
            }
        }
    }
    let (m1, m2) = assignment(n, rng.gen_range(0..3usize.pow(n as u32)));
    Problem::from_digraph(&d, m1, m2, t).expect("valid by construction")
}

/// `count` seeded random instances.
pub fn random_family(seed: u64, count: usize, n: usize, t: u32) -> Vec<Problem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_problem(&mut rng, n, t)).collect()
}

/// Instances with `t*N <= 5`: exhaustive for one message at every `t`, up to
/// three messages at `t = 1` and two at `t = 2`; seeded samples with four and
/// five messages.
pub fn small_two_sender(seed: u64, samples: usize) -> Vec<Problem> {
    let mut out = Vec::new();
    for t in 1..=5 {
        out.extend(exhaustive(1, t));
    }
    for n in 2..=3 {
        out.extend(exhaustive(n, 1));
    }
    out.extend(exhaustive(2, 2));
    out.extend(random_family(seed, samples, 4, 1));
    out.extend(random_family(seed ^ 0x5eed, samples, 5, 1));
    out
}

/// Digraphs with `t*N <= 5` for single-sender checks: the single vertex at every
/// `t`, all digraphs up to three vertices at `t = 1` and two at `t = 2`, plus
/// seeded samples.
pub fn small_digraphs(seed: u64, samples: usize) -> Vec<(Digraph, u32)> {
    let mut out: Vec<(Digraph, u32)> = (1..=5).map(|t| (Digraph::empty(1), t)).collect();
    out.extend((2..=3).flat_map(|n| all_digraphs(n).into_iter().map(|d| (d, 1))));
    out.extend(all_digraphs(2).into_iter().map(|d| (d, 2)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in [4, 5] {
        for _ in 0..samples {
            out.push((random_problem(&mut rng, n, 1).digraph(), 1));
        }
    }
    out
}

/// Three senders with one private message each and one common message whose
/// receiver knows nothing private: all 512 side-information patterns.
pub fn ms_one_per_pool() -> Vec<MsProblem> {
    let pairs: Vec<(usize, usize)> =
        (0..4).flat_map(|u| (0..4).filter(move |&v| v != u).map(move |v| (u, v))).filter(|&(u, _)| u != 3).collect();
    (0..1u64 << pairs.len())
        .map(|w| {
            let mut side = vec![Vec::new(); 4];
            for (k, &(u, v)) in pairs.iter().enumerate() {
                if w >> k & 1 == 1 {
                    side[u].push(v);
                }
            }
            MsProblem::new(side, vec![vec![0, 3], vec![1, 3], vec![2, 3]], 1).expect("valid by construction")
        })
        .collect()
}
