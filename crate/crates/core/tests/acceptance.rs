//! End-to-end acceptance checks, one line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tsuic_core::checks::{ms_epsilon, Check};
use tsuic_core::confusion::{beta_t_ssuic, chromatic_ssuic, BlockRef, ConfusionGraph};
use tsuic_core::families;
use tsuic_core::index_codes::{construct_case_iib, construct_case_iic, optimal_sub_codes, verify, IndexCode};
use tsuic_core::oracle::{brute_force_beta_t, brute_force_beta_t_ssuic, sweep, OracleBudget, SweepReport};
use tsuic_core::rate_engine::{criticality_report, dispatch};
use tsuic_core::two_sender_coloring::{ceil_sum_epsilon, coloring_cost, minimize, structured_product_coloring};
use tsuic_core::{classify_problem, enumerate_classes, interaction_map, parse_problem, partition, CaseLabel, Problem, Rate};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn p(text: &str) -> Problem {
    parse_problem(text).expect("fixture parses")
}

fn double_xor() -> Problem {
    p("(1|2),(2|1),(3|1); M1={1,3}; M2={2,3}; t=1")
}

fn acyclic_chain() -> Problem {
    p("(1),(2|1,4,5),(3|1,2,4,5),(4|1,5),(5|1,4); M1={1,2,3}; M2={1,4,5}; t=1")
}

fn two_way_common() -> Problem {
    p("(1|3,4),(2|3,4),(3|1,2,4),(4|1,2); M1={1,3,4}; M2={2,3,4}; t=1")
}

fn one_sided_common() -> Problem {
    p("(1|2,4,5),(2|4,5),(3|1,2),(4|1,2,5),(5|1,2,4); M1={1,2,4,5}; M2={3,4,5}; t=1")
}

fn two_way_private() -> Problem {
    p("(1|2),(2|1),(3|4),(4|3); M1={1,3,4}; M2={2,3,4}; t=1")
}

fn oracle(p: &Problem) -> Rate {
    brute_force_beta_t(p, &OracleBudget::default()).expect("oracle within budget")
}

fn label(p: &Problem) -> (CaseLabel, Option<u8>) {
    let c = classify_problem(p);
    (c.case_label, c.paper_label.map(|l| l.number))
}

fn summarize(name: &str, r: &SweepReport) -> Outcome {
    match r.failures().next() {
        None => Ok(format!("{name}: {} instances", r.len())),
        Some(f) => Err(format!(
            "{name}: {} of {} failed, first {} expected {} got {}",
            r.failures().count(),
            r.len(),
            f.instance,
            f.expected,
            f.got
        )),
    }
}

fn criterion_1() -> Outcome {
    let p = double_xor();
    let o = oracle(&p);
    let m = minimize(&ConfusionGraph::build(&p).unwrap()).unwrap();
    let d = dispatch(&p).unwrap();
    let two = Rate::integer(2);
    ensure(o == two, format!("oracle {o}"))?;
    ensure(m.exact && m.cost.rate == two, format!("minimize {}", m.cost.rate))?;
    ensure(d.value() == Some(two), format!("dispatch {}", d.bounds))?;
    Ok("oracle = minimize = dispatch = 2".into())
}

fn criterion_2() -> Outcome {
    let p = acyclic_chain();
    ensure(label(&p) == (CaseLabel::I, Some(7)), format!("class {:?}", label(&p)))?;
    let d = dispatch(&p).unwrap();
    let four = Rate::integer(4);
    ensure(d.value() == Some(four), format!("dispatch {}", d.bounds))?;
    ensure(d.asymptotic.and_then(|a| a.value()) == Some(four), "asymptotic rate is not 4")?;
    let code = IndexCode::from_linear(&p, &[vec![0], vec![1], vec![2]], &[vec![3, 4]]).unwrap();
    ensure(verify(&p, &code).unwrap().is_valid(), "published code rejected")?;
    ensure(code.rate() == four, format!("code rate {}", code.rate()))?;
    Ok(format!("beta_1 = beta = 4, code {} verified", code.describe()))
}

fn criterion_3() -> Outcome {
    let p = two_way_common();
    ensure(label(&p) == (CaseLabel::IIB, Some(18)), format!("class {:?}", label(&p)))?;
    let two = Rate::integer(2);
    let d = dispatch(&p).unwrap();
    ensure(d.value() == Some(two), format!("dispatch {}", d.bounds))?;
    ensure(d.asymptotic.and_then(|a| a.value()) == Some(two), "asymptotic rate is not 2")?;
    let built = construct_case_iib(&p, &optimal_sub_codes(&p).unwrap()).unwrap();
    ensure(verify(&p, &built).unwrap().is_valid() && built.rate() == two, "constructed code")?;
    let published = IndexCode::from_linear(&p, &[vec![0, 2]], &[vec![1, 3]]).unwrap();
    ensure(verify(&p, &published).unwrap().is_valid() && published.rate() == two, "published code")?;
    Ok(format!("beta_1 = beta = 2, constructed {}", built.describe()))
}

fn criterion_4() -> Outcome {
    let p = one_sided_common();
    ensure(label(&p) == (CaseLabel::IIC, Some(23)), format!("class {:?}", label(&p)))?;
    let three = Rate::integer(3);
    let d = dispatch(&p).unwrap();
    ensure(d.value() == Some(three), format!("dispatch {}", d.bounds))?;
    ensure(d.asymptotic.and_then(|a| a.value()) == Some(three), "asymptotic rate is not 3")?;
    let built = construct_case_iic(&p, &optimal_sub_codes(&p).unwrap()).unwrap();
    ensure(verify(&p, &built).unwrap().is_valid() && built.rate() == three, "constructed code")?;
    let published = IndexCode::from_linear(&p, &[vec![0, 3, 4], vec![1]], &[vec![2]]).unwrap();
    ensure(verify(&p, &published).unwrap().is_valid() && published.rate() == three, "published code")?;
    Ok(format!("beta = 3, constructed {}", built.describe()))
}

fn criterion_5() -> Outcome {
    let p = two_way_private();
    ensure(label(&p) == (CaseLabel::IIA, Some(15)), format!("class {:?}", label(&p)))?;
    let three = Rate::integer(3);
    let g = ConfusionGraph::build(&p).unwrap();
    let m = minimize(&g).unwrap();
    ensure(m.exact && m.cost.rate == three, format!("minimize {}", m.cost.rate))?;
    ensure(oracle(&p) == three, "oracle")?;
    let s = structured_product_coloring(&p, &g).unwrap();
    ensure(s.pair_count(&g) == 8, format!("{} ordered pairs", s.pair_count(&g)))?;
    ensure(coloring_cost(&s, 1).rate == three, "structured coloring rate")?;
    Ok("minimize = oracle = 3, product coloring uses 8 ordered pairs".into())
}

fn criterion_6() -> Outcome {
    let p = double_xor();
    let q = p.without_arc(2, 0);
    let b = OracleBudget::default();
    ensure(oracle(&p) == Rate::integer(2), "two-sender rate with the arc")?;
    ensure(oracle(&q) == Rate::integer(3), format!("two-sender rate without the arc: {}", oracle(&q)))?;
    for d in [p.digraph(), q.digraph()] {
        ensure(brute_force_beta_t_ssuic(&d, 1, &b).unwrap() == Rate::integer(2), "single-sender oracle")?;
        ensure(beta_t_ssuic(&d, 1).unwrap() == Rate::integer(2), "single-sender chromatic")?;
    }
    let report = criticality_report(&p).unwrap();
    let arc = report.arcs.iter().find(|a| a.arc == (3, 1)).ok_or("arc (3,1) missing from the report")?;
    ensure(arc.critical == Some(true), "criticality report disagrees")?;
    Ok("removing (3,1): two-sender 2 -> 3, single-sender stays 2".into())
}

fn criterion_7() -> Outcome {
    let classes = enumerate_classes();
    let count = |c: CaseLabel| classes.iter().filter(|x| x.case_label == c).count();
    let acyclic = classes.iter().filter(|c| c.canonical_arcs.is_acyclic()).count();
    let split = [count(CaseLabel::IIA), count(CaseLabel::IIB), count(CaseLabel::IIC), count(CaseLabel::IID)];
    ensure(classes.len() == 36, format!("{} classes", classes.len()))?;
    ensure(acyclic == 14 && count(CaseLabel::I) == 14, format!("{acyclic} acyclic"))?;
    ensure(split == [3, 3, 12, 4], format!("cyclic split {split:?}"))?;
    Ok("36 classes: 14 acyclic, 22 cyclic split 3/3/12/4".into())
}

fn criterion_8() -> Outcome {
    let fam = families::fp36();
    let r = sweep(&fam, |p| Check::DispatchVsOracle.run(p));
    let exact = fam.iter().filter(|p| dispatch(p).map(|d| d.exact()).unwrap_or(false)).count();
    summarize("dispatch vs oracle", &r).map(|s| format!("{s}, {exact} exact"))
}

fn criterion_9() -> Outcome {
    let fam = families::small_two_sender(9, 150);
    let two = summarize("coloring vs oracle", &sweep(&fam, |p| Check::MinimizeVsOracle.run(p)))?;
    let b = OracleBudget::default();
    let ds = families::small_digraphs(9, 150);
    for (d, t) in &ds {
        let o = brute_force_beta_t_ssuic(d, *t, &b).map_err(|e| e.to_string())?;
        let c = beta_t_ssuic(d, *t).map_err(|e| e.to_string())?;
        ensure(o == c, format!("single sender {d:?} t={t}: oracle {o} chromatic {c}"))?;
    }
    Ok(format!("{two}; single sender: {} digraphs", ds.len()))
}

/// Set partitions of `0..n` as restricted growth strings.
fn partitions(n: usize) -> Vec<Vec<u32>> {
    fn rec(cur: &mut Vec<u32>, n: usize, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let top = cur.iter().max().map_or(0, |m| m + 1);
        for c in 0..=top {
            cur.push(c);
            rec(cur, n, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n, &mut out);
    out
}

/// Least number of ordered pairs over valid colorings of block `k`.
fn block_minimum(g: &ConfusionGraph, k: usize) -> usize {
    let l = g.labeling();
    let (l1, l2) = (l.group_size(0), l.group_size(1));
    let v = |i: usize, j: usize| l.vertex_of(&[i, j, k]);
    let mut edges = Vec::new();
    for a in 0..l1 * l2 {
        for b in a + 1..l1 * l2 {
            if g.has_edge(v(a % l1, a / l1), v(b % l1, b / l1)) {
                edges.push(((a % l1, a / l1), (b % l1, b / l1)));
            }
        }
    }
    let (p1, p2) = (partitions(l1), partitions(l2));
    let mut best = usize::MAX;
    for a in &p1 {
        for b in &p2 {
            let n = (*a.iter().max().unwrap() as usize + 1) * (*b.iter().max().unwrap() as usize + 1);
            if n < best && edges.iter().all(|&((i, j), (x, y))| (a[i], b[j]) != (a[x], b[y])) {
                best = n;
            }
        }
    }
    best
}

fn criterion_10() -> Outcome {
    let mut fam = families::fp36();
    fam.extend(families::common_sink_corners().into_iter().filter(|p| p.t() == 1));
    let mut blocks = 0;
    let mut copies = 0;
    let mut inter = 0;
    for p in &fam {
        let g = ConfusionGraph::build(p).unwrap();
        let l = g.labeling();
        let mp = partition(p);
        let d = p.digraph();
        let chi = |i: usize| chromatic_ssuic(&mp.sub_digraph(&d, i), 1).unwrap().value().unwrap();
        // Minimum ordered pairs per block.
        let want = chi(1) * chi(2);
        for k in 0..l.group_size(2) {
            let got = block_minimum(&g, k);
            ensure(got == want, format!("{p}: block {k} needs {got} pairs, expected {want}"))?;
            blocks += 1;
        }
        // Copying a block's coloring onto a block with no common-part confusion between them.
        let c = minimize(&g).unwrap().coloring;
        let nb = l.group_size(2);
        let graph = g.explicit().unwrap();
        for k1 in 0..nb {
            for k2 in 0..nb {
                if k1 == k2 {
                    continue;
                }
                let vs: Vec<usize> = [k1, k2]
                    .iter()
                    .flat_map(|&k| g.block_vertices(BlockRef::block(k + 1)).unwrap())
                    .collect();
                let common_edge = graph.edges().into_iter().any(|(u, v)| {
                    vs.contains(&u)
                        && vs.contains(&v)
                        && l.sub_label(u, 2) != l.sub_label(v, 2)
                        && g.confusing_receivers(u, v).iter().any(|r| mp.p3.contains(r))
                });
                if common_edge {
                    continue;
                }
                let mut copy = c.clone();
                copy.j1[k2] = c.j1[k1].clone();
                copy.j2[k2] = c.j2[k1].clone();
                let ok = graph
                    .edges()
                    .into_iter()
                    .filter(|(u, v)| vs.contains(u) && vs.contains(v))
                    .all(|(u, v)| copy.pair_of(&g, u) != copy.pair_of(&g, v));
                ensure(ok, format!("{p}: copying block {k1} onto {k2} is invalid"))?;
                copies += 1;
            }
        }
        // Private receivers that know the whole common part cause no inter-block edges.
        let h = interaction_map(p, &mp);
        if classify_problem(p).fully_participated == Some(true) {
            for (u, v) in graph.edges() {
                if l.sub_label(u, 2) == l.sub_label(v, 2) {
                    continue;
                }
                let rs = g.confusing_receivers(u, v);
                if h.has(1, 3) {
                    ensure(!rs.iter().any(|r| mp.p1.contains(r)), format!("{p}: D1 inter-block edge"))?;
                }
                if h.has(2, 3) {
                    ensure(!rs.iter().any(|r| mp.p2.contains(r)), format!("{p}: D2 inter-block edge"))?;
                }
                inter += 1;
            }
        }
    }
    ensure(copies > 0, "no block pair qualified for copying")?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..10_000 {
        let a = Ratio::new(rng.gen_range(-1000..=1000), rng.gen_range(1..=60));
        let b = Ratio::new(rng.gen_range(-1000..=1000), rng.gen_range(1..=60));
        let (s, e) = ceil_sum_epsilon(a, b);
        ensure((e == -1 || e == 0) && s == (a + b).ceil().to_integer(), format!("ceil split of {a} + {b}"))?;
    }
    let corners = families::common_sink_corners();
    let eps = summarize("epsilon", &sweep(&corners, |p| Check::Epsilon.run(p)))?;
    Ok(format!(
        "{blocks} block minima, {copies} block copies, {inter} inter-block edges, 10^4 ceil splits, {eps}"
    ))
}

fn criterion_11() -> Outcome {
    let mut fam = families::fp36();
    fam.extend(families::small_two_sender(11, 50));
    fam.extend(families::common_sink_corners());
    summarize("coloring/code round trip", &sweep(&fam, |p| Check::RoundTrip.run(p)))
}

fn criterion_12() -> Outcome {
    let shared: Vec<Problem> = families::small_two_sender(12, 100)
        .into_iter()
        .filter(|p| {
            let mp = partition(p);
            !mp.p1.is_empty() && !mp.p2.is_empty() && p.n() >= 3
        })
        .take(50)
        .collect();
    ensure(shared.len() == 50, format!("only {} shared instances", shared.len()))?;
    let red = summarize("two-sender reduction", &sweep(&shared, |p| Check::MsReduction.run(p)))?;
    let ms = families::ms_one_per_pool();
    let mut seen = [0usize; 4];
    for q in &ms {
        let e = ms_epsilon(q).map_err(|e| format!("{q}: {e}"))?;
        ensure((-3..=0).contains(&e), format!("{q}: epsilon {e}"))?;
        seen[(-e) as usize] += 1;
    }
    Ok(format!("{red}; {} three-sender instances, epsilon 0/-1/-2/-3 counts {seen:?}", ms.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("worked example, three methods", criterion_1),
        ("acyclic class with sub-rate sum", criterion_2),
        ("two-way common part", criterion_3),
        ("one-sided common part", criterion_4),
        ("two-way private parts, product coloring", criterion_5),
        ("arc criticality", criterion_6),
        ("class taxonomy", criterion_7),
        ("dispatch against oracle", criterion_8),
        ("coloring and chromatic against oracle", criterion_9),
        ("block-level properties", criterion_10),
        ("coloring/code round trip", criterion_11),
        ("multi-sender reduction and epsilon range", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 12 acceptance criteria pass");
}
