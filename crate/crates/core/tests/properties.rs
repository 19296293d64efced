use num_rational::Ratio;
use proptest::prelude::*;

use tsuic_core::confusion::{beta_t_ssuic, ConfusionGraph};
use tsuic_core::index_codes::{coloring_to_code, verify, xor_pad, BitWord, IndexCode};
use tsuic_core::msuic::{parse_ms_problem, MsProblem};
use tsuic_core::oracle::{brute_force_beta_t, OracleBudget};
use tsuic_core::rate_engine::{dispatch, lower_bound_private_sum, lower_bound_single, sub_rates};
use tsuic_core::two_sender_coloring::{ceil_sum_epsilon, minimize, validate, TwoSenderColoring};
use tsuic_core::{parse_problem, Digraph, Problem, Rate};

/// Two-sender instances with up to `max_n` messages at `t = 1`.
fn problems(max_n: usize) -> impl Strategy<Value = Problem> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1);
        (Just(n), 0u64..1 << pairs, 0usize..3usize.pow(n as u32))
    })
    .prop_map(|(n, arcs, mut code)| {
        let all: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
        let chosen: Vec<(usize, usize)> =
            all.iter().enumerate().filter(|(k, _)| arcs >> k & 1 == 1).map(|(_, &a)| a).collect();
        let d = Digraph::from_arcs(n, &chosen);
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
        Problem::from_digraph(&d, m1, m2, 1).unwrap()
    })
}

fn words() -> impl Strategy<Value = BitWord> {
    prop::collection::vec(any::<bool>(), 0..12).prop_map(BitWord)
}

fn oracle(p: &Problem) -> Rate {
    brute_force_beta_t(p, &OracleBudget::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minimized_colorings_are_valid_codes(p in problems(4)) {
        let g = ConfusionGraph::build(&p).unwrap();
        let m = minimize(&g).unwrap();
        prop_assert!(validate(&g, &m.coloring).unwrap().is_valid());
        let code = coloring_to_code(&g, &m.coloring).unwrap();
        prop_assert!(verify(&p, &code).unwrap().is_valid());
        prop_assert_eq!(code.rate(), m.cost.rate);
    }

    #[test]
    fn rates_are_sandwiched(p in problems(4)) {
        let o = oracle(&p);
        let single = lower_bound_single(&p);
        let private = lower_bound_private_sum(&p);
        let naive: Rate = sub_rates(&p).iter().map(|b| b.upper).sum();
        prop_assert!(single.lower <= o && private.lower <= o && o <= naive);
        let d = dispatch(&p).unwrap();
        prop_assert!(d.bounds.contains(o), "{} not in {}", o, d.bounds);
        prop_assert!(beta_t_ssuic(&p.digraph(), 1).unwrap() <= o);
    }

    #[test]
    fn removing_an_arc_never_helps(p in problems(4), pick in any::<prop::sample::Index>()) {
        let arcs = p.digraph().arcs();
        prop_assume!(!arcs.is_empty());
        let (u, v) = arcs[pick.index(arcs.len())];
        prop_assert!(oracle(&p.without_arc(u, v)) >= oracle(&p));
    }

    #[test]
    fn swapping_senders_keeps_the_rate(p in problems(4)) {
        prop_assert_eq!(oracle(&p.swap_senders()), oracle(&p));
    }

    #[test]
    fn problem_text_round_trips(p in problems(5)) {
        prop_assert_eq!(parse_problem(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn coloring_and_code_json_round_trip(p in problems(3)) {
        let g = ConfusionGraph::build(&p).unwrap();
        let c = minimize(&g).unwrap().coloring;
        prop_assert_eq!(&TwoSenderColoring::from_json(&c.to_json()).unwrap(), &c);
        let code = coloring_to_code(&g, &c).unwrap();
        let back = IndexCode::from_json(&p, &code.to_json()).unwrap();
        for x in 0..1u64 << p.n() {
            prop_assert_eq!(back.codeword(x), code.codeword(x));
        }
    }

    #[test]
    fn two_sender_view_of_multi_sender_round_trips(p in problems(4)) {
        if let Ok(m) = MsProblem::from_problem(&p) {
            prop_assert_eq!(parse_ms_problem(&m.to_text()).unwrap(), m);
        }
    }

    #[test]
    fn xor_pad_laws(a in words(), b in words(), c in words()) {
        prop_assert_eq!(xor_pad(&a, &b), xor_pad(&b, &a));
        prop_assert_eq!(xor_pad(&xor_pad(&a, &b), &c), xor_pad(&a, &xor_pad(&b, &c)));
        prop_assert_eq!(xor_pad(&a, &BitWord::default()), a.clone());
        prop_assert_eq!(xor_pad(&a, &b).len(), a.len().max(b.len()));
        prop_assert!(xor_pad(&a, &a).0.iter().all(|&x| !x));
        prop_assert_eq!(xor_pad(&a, &b).value(), a.value() ^ b.value());
    }

    #[test]
    fn bit_words_print_and_parse(a in words()) {
        prop_assert_eq!(a.to_string().parse::<BitWord>().unwrap(), a.clone());
        prop_assert_eq!(BitWord::from_value(a.value(), a.len() as u32), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn ceil_split_loses_at_most_one(an in -10_000i64..10_000, ad in 1i64..500, bn in -10_000i64..10_000, bd in 1i64..500) {
        let (a, b) = (Ratio::new(an, ad), Ratio::new(bn, bd));
        let (s, e) = ceil_sum_epsilon(a, b);
        prop_assert_eq!(s, (a + b).ceil().to_integer());
        prop_assert!(e == -1 || e == 0);
        prop_assert_eq!(s, a.ceil().to_integer() + b.ceil().to_integer() + e);
    }
}
