mod report;

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use tsuic_core::checks::{Check, Family};
use tsuic_core::confusion::ConfusionGraph;
use tsuic_core::index_codes::{coloring_to_code, construct, optimal_sub_codes, verify, CodeVerdict, IndexCode};
use tsuic_core::msuic::{ms_confusion_graph, ms_minimize, parse_ms_problem, MsProblem};
use tsuic_core::oracle::{brute_force_beta_t, sweep, OracleBudget};
use tsuic_core::rate_engine::{criticality_report, dispatch};
use tsuic_core::two_sender_coloring::{minimize_with, DEFAULT_SEARCH_NODES, SEARCH_LIMIT_TN};
use tsuic_core::{parse_problem_with_limit, Problem, DEFAULT_MAX_TN};

use report::{base_ms_report, base_report, CodeView, RateView, Report};

/// Broadcast rates and index codes for two-sender unicast index coding.
#[derive(Parser)]
#[command(name = "tsuic", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Override the block length given in the instance file.
    #[arg(long, global = true)]
    t: Option<u32>,

    /// Raise the t*N guardrail (also lifts the oracle and search limits).
    #[arg(long, global = true)]
    max_tn: Option<usize>,

    /// Seed for sampled sweep families.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Add wall-clock time to the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Partition the messages and name the interaction class.
    Classify { file: PathBuf },
    /// Compute beta_t exactly or as an interval.
    Beta {
        file: PathBuf,
        /// Defaults to dispatch for two senders and coloring for more.
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// Also report which arcs raise the rate when removed.
        #[arg(long)]
        criticality: bool,
    },
    /// Build an index code and verify it.
    Code {
        file: PathBuf,
        /// Use the class construction from optimal sub-codes instead of the
        /// optimal two-sender coloring.
        #[arg(long)]
        construct: bool,
    },
    /// Check a code given as JSON against an instance.
    Verify { file: PathBuf, code: PathBuf },
    /// Print the confusion graph.
    Confusion {
        file: PathBuf,
        /// Graphviz output with one cluster per block.
        #[arg(long)]
        dot: bool,
    },
    /// Run a check over an instance family and print JSON lines.
    Sweep {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        check: Check,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Dispatch,
    Coloring,
    Oracle,
}

enum Instance {
    Two(Problem),
    Multi(MsProblem),
}

fn read_input(path: &Path) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

impl Cli {
    fn guardrail(&self) -> usize {
        self.max_tn.unwrap_or(DEFAULT_MAX_TN)
    }

    /// Two-sender text first; files with three or more sender sets fall back
    /// to the multi-sender format.
    fn load(&self, path: &Path) -> anyhow::Result<Instance> {
        let text = read_input(path)?;
        let two = parse_problem_with_limit(&text, self.guardrail());
        let inst = match two {
            Ok(p) => Instance::Two(p),
            Err(e) => match parse_ms_problem(&text) {
                Ok(m) if m.n_senders() > 2 => Instance::Multi(m),
                _ => return Err(e).with_context(|| format!("parsing {}", path.display())),
            },
        };
        Ok(match (inst, self.t) {
            (Instance::Two(p), Some(t)) => Instance::Two(p.with_t(t, self.guardrail())?),
            (Instance::Multi(m), Some(t)) => {
                let sets = (0..m.n_senders()).map(|s| m.sender_set(s)).collect();
                Instance::Multi(MsProblem::new(m.side_info().to_vec(), sets, t)?)
            }
            (inst, None) => inst,
        })
    }

    fn load_two(&self, path: &Path, what: &str) -> anyhow::Result<Problem> {
        match self.load(path)? {
            Instance::Two(p) => Ok(p),
            Instance::Multi(_) => bail!("{what} needs a two-sender instance"),
        }
    }

    fn emit(&self, mut r: Report, start: Instant) {
        if self.timing {
            r.elapsed_ms = Some(start.elapsed().as_millis());
        }
        if self.json {
            println!("{}", r.to_json());
        } else {
            print!("{}", r.to_text());
        }
    }
}

fn rate_of(cli: &Cli, p: &Problem, method: Method, r: &mut Report) -> anyhow::Result<RateView> {
    Ok(match method {
        Method::Dispatch => {
            let d = dispatch(p)?;
            for n in &d.notes {
                r.add_note(n.clone());
            }
            RateView::from_dispatch(&d)
        }
        Method::Coloring => {
            let g = ConfusionGraph::build(p)?;
            let m = minimize_with(&g, cli.max_tn.unwrap_or(SEARCH_LIMIT_TN), DEFAULT_SEARCH_NODES)?;
            let bits = vec![m.cost.bits1, m.cost.bits2];
            if m.exact {
                RateView::exact("coloring", p.t(), m.cost.rate, Some(bits))
            } else {
                r.add_note("coloring search did not finish; lower bound from dispatch".into());
                let mut v = RateView::exact("coloring", p.t(), m.cost.rate, Some(bits));
                v.lower = dispatch(p)?.bounds.lower.min(m.cost.rate);
                v.exact = v.lower == v.upper;
                v
            }
        }
        Method::Oracle => {
            let mut budget = OracleBudget::default();
            if let Some(m) = cli.max_tn {
                budget.max_tn = m;
            }
            RateView::exact("oracle", p.t(), brute_force_beta_t(p, &budget)?, None)
        }
    })
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let start = Instant::now();
    match &cli.command {
        Command::Classify { file } => {
            let r = match cli.load(file)? {
                Instance::Two(p) => base_report(&p),
                Instance::Multi(m) => base_ms_report(&m),
            };
            cli.emit(r, start);
        }
        Command::Beta { file, method, criticality } => match cli.load(file)? {
            Instance::Two(p) => {
                let mut r = base_report(&p);
                r.rate = Some(rate_of(cli, &p, method.unwrap_or(Method::Dispatch), &mut r)?);
                if *criticality {
                    r.criticality = Some(criticality_report(&p)?);
                }
                cli.emit(r, start);
            }
            Instance::Multi(m) => {
                if method.is_some_and(|x| x != Method::Coloring) || *criticality {
                    bail!("multi-sender instances support only --method coloring");
                }
                let mut r = base_ms_report(&m);
                let s = ms_minimize(&ms_confusion_graph(&m)?)?;
                let mut v = RateView::exact("coloring", m.t(), s.rate, Some(s.bits));
                if !s.exact {
                    v.exact = false;
                    v.lower = tsuic_core::Rate::zero();
                    r.add_note("coloring search did not finish; the rate is an upper bound".into());
                }
                r.rate = Some(v);
                cli.emit(r, start);
            }
        },
        Command::Code { file, construct: by_class } => {
            let p = cli.load_two(file, "code")?;
            let mut r = base_report(&p);
            let (code, method) = if *by_class {
                (construct(&p, &optimal_sub_codes(&p)?)?, "construction")
            } else {
                let g = ConfusionGraph::build(&p)?;
                let m = minimize_with(&g, cli.max_tn.unwrap_or(SEARCH_LIMIT_TN), DEFAULT_SEARCH_NODES)?;
                if !m.exact {
                    r.add_note("coloring search did not finish; the code may not be optimal".into());
                }
                (coloring_to_code(&g, &m.coloring)?, "coloring")
            };
            let view = CodeView::new(&p, &code, method)?;
            let valid = view.valid;
            if cli.json {
                r.code = Some(view);
                cli.emit(r, start);
            } else {
                let json = code.to_json();
                r.code = Some(view);
                cli.emit(r, start);
                println!("{json}");
            }
            return Ok(valid);
        }
        Command::Verify { file, code } => {
            let p = cli.load_two(file, "verify")?;
            let c = IndexCode::from_json(&p, &read_input(code)?)?;
            let verdict = verify(&p, &c)?;
            if cli.json {
                println!("{}", serde_json::to_string(&verdict)?);
            } else {
                match &verdict {
                    CodeVerdict::Valid => println!("valid, rate {}", c.rate()),
                    CodeVerdict::Undecodable { receiver, x, y } => println!(
                        "receiver {} cannot tell realizations {x:#b} and {y:#b} apart",
                        receiver + 1
                    ),
                    CodeVerdict::OutsideSenderSet { sender, message } => {
                        println!("sender {} reads x{}, which it does not hold", sender + 1, message + 1)
                    }
                }
            }
            return Ok(verdict.is_valid());
        }
        Command::Confusion { file, dot } => {
            let g = match cli.load(file)? {
                Instance::Two(p) => ConfusionGraph::build(&p)?,
                Instance::Multi(m) => ms_confusion_graph(&m)?,
            };
            if *dot {
                print!("{}", g.to_dot()?);
            } else if cli.json {
                let e = g.explicit()?;
                let v = serde_json::json!({
                    "vertices": g.vertex_count(),
                    "edges": e.edges().len(),
                    "blocks": g.block_count(),
                });
                println!("{v}");
            } else {
                print!("{}", g.adjacency_dump()?);
            }
        }
        Command::Sweep { family, check } => {
            let instances = family.instances(cli.seed);
            let check = *check;
            let report = sweep(&instances, |p| check.run(p));
            print!("{}", report.to_json_lines());
            let failed = report.failures().count();
            eprintln!("{} instances, {} passed, {failed} failed", report.len(), report.len() - failed);
            return Ok(failed == 0);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
