use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;

use idcode_core::bounds::{counting_inequality_check, density_lower_bound};
use idcode_core::discharge::{check_average_bound, run_discharging};
use idcode_core::localver::{verify_bound, Statement, Status, DEFAULT_BUDGET};
use idcode_core::pairs::{aux_graph, pair_report, quotient_aux_graph};
use idcode_core::pattern::{self, Pattern};
use idcode_core::torus::{heuristic_upper, min_code_exact, TorusInstance, TorusOutcome};
use idcode_core::{decimal, fraction, GridKind, Violation, Window};

const OK: u8 = 0;
const FAILED: u8 = 1;
const USAGE: u8 = 2;
const INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "idcode",
    version,
    about = "Identifying codes on the square and hexagonal grids"
)]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report format. Only `text` is implemented.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Compact,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a pattern file describes an identifying code.
    Verify { file: PathBuf },
    /// Exact density of a pattern file.
    Density { file: PathBuf },
    /// Witnesses and pair counts of a pattern inside `[-m, m]^2`.
    Pairs {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        m: u32,
    },
    /// The density bound `6 / (2b + 4 + k)`.
    Bound {
        #[arg(long)]
        b: u32,
        /// Integer or `p/q`.
        #[arg(long, value_parser = parse_rational)]
        k: Rational64,
    },
    /// Exhaustively verify a local statement.
    Lemma {
        #[arg(value_parser = parse_statement)]
        statement: Statement,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Run the discharging rules on the auxiliary graph of a pattern.
    ///
    /// Without `--m` the graph is taken on one period, enlarged if needed;
    /// with `--m` it is the subgraph on the codewords of `[-m, m]^2`.
    Discharge {
        file: PathBuf,
        #[arg(long)]
        m: Option<u32>,
    },
    /// Smallest identifying code on the n x n torus.
    TorusMin {
        #[arg(long, value_parser = parse_grid)]
        grid: GridKind,
        #[arg(long)]
        r: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
        /// Randomized search instead of the exact one.
        #[arg(long)]
        heuristic: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        iters: u32,
    },
}

fn parse_rational(s: &str) -> Result<Rational64, String> {
    let bad = || format!("`{s}` is not a nonnegative rational");
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (
            p.parse::<i64>().map_err(|_| bad())?,
            q.parse::<i64>().map_err(|_| bad())?,
        ),
        None => (s.parse::<i64>().map_err(|_| bad())?, 1),
    };
    if p < 0 || q <= 0 {
        return Err(bad());
    }
    Ok(Rational64::new(p, q))
}

fn parse_statement(s: &str) -> Result<Statement, String> {
    s.parse()
        .map_err(|e: idcode_core::LocalError| e.to_string())
}

fn parse_grid(s: &str) -> Result<GridKind, String> {
    s.parse()
}

fn approx(q: Rational64) -> String {
    format!("{} ≈ {}", fraction(q), decimal(q))
}

struct Failure(u8, String);

fn load(file: &PathBuf) -> Result<Pattern, Failure> {
    let text = fs::read_to_string(file)
        .map_err(|e| Failure(USAGE, format!("error: {}: {e}", file.display())))?;
    pattern::parse(&text).map_err(|e| Failure(USAGE, format!("error: {}: {e}", file.display())))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if cli.format == Format::Compact {
        return Err(Failure(
            USAGE,
            "error: --format compact is reserved and not implemented".into(),
        ));
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure(USAGE, format!("error: {e}")))?;
    }
    match cli.command {
        Command::Verify { file } => {
            let pat = load(&file)?;
            let report = pat.code.is_identifying_code(pat.r);
            print_header(&pat);
            match report.violation {
                Violation::None => println!("valid true"),
                Violation::EmptyIdSet(v) => {
                    println!("valid false");
                    println!("violation empty {} {}", v.i, v.j);
                }
                Violation::Indistinct(u, v) => {
                    println!("valid false");
                    println!("violation indistinct {} {} {} {}", u.i, u.j, v.i, v.j);
                }
            }
            Ok(if report.valid { OK } else { FAILED })
        }
        Command::Density { file } => {
            let pat = load(&file)?;
            print_header(&pat);
            println!("codewords {}", pat.code.offsets().len());
            println!("density {}", approx(pat.code.density()));
            Ok(OK)
        }
        Command::Pairs { file, m } => {
            let pat = load(&file)?;
            if m <= pat.r {
                return Err(Failure(
                    USAGE,
                    format!("error: --m must exceed r = {}", pat.r),
                ));
            }
            let window = Window::new(pat.code.kind(), m);
            print!("{}", pair_report(&pat.code, pat.r, window).to_text());
            let (holds, t) = counting_inequality_check(&pat.code, pat.r, m);
            println!(
                "counting b_r {} k {} inner {} p_m {} holds {}",
                t.b_r, t.k, t.inner, t.p_m, holds
            );
            Ok(if holds { OK } else { FAILED })
        }
        Command::Bound { b, k } => {
            if b == 0 {
                return Err(Failure(USAGE, "error: --b must be positive".into()));
            }
            println!("{}", approx(density_lower_bound(b, k)));
            Ok(OK)
        }
        Command::Lemma { statement, budget } => {
            let cert = verify_bound(statement, budget)
                .map_err(|e| Failure(FAILED, format!("error: {e}")))?;
            print!("{}", cert.to_text());
            Ok(match cert.status {
                Status::Pass => OK,
                Status::Fail => FAILED,
                Status::Inconclusive => INCONCLUSIVE,
            })
        }
        Command::Discharge { file, m } => {
            let pat = load(&file)?;
            let valid = pat.code.is_identifying_code(pat.r).valid;
            let graph = match m {
                Some(m) => aux_graph(&pat.code, pat.r, Window::new(pat.code.kind(), m)),
                None => {
                    let need = 4 * pat.r + 1;
                    let (px, py) = pat.code.period();
                    let code = pat
                        .code
                        .with_period_multiple(need.div_ceil(px), need.div_ceil(py))
                        .map_err(|e| Failure(USAGE, format!("error: {e}")))?;
                    quotient_aux_graph(&code, pat.r)
                        .map_err(|e| Failure(USAGE, format!("error: {e}")))?
                }
            };
            println!("valid {valid}");
            println!("vertices {}", graph.vertices.len());
            println!("edges {}", graph.edge_count());
            println!("max_degree {}", graph.max_degree());
            let avg = check_average_bound(&graph);
            let ledger = run_discharging(&graph);
            match &ledger {
                Ok(l) => {
                    print!("{}", l.to_text());
                    println!("final_nonpositive {}", l.all_nonpositive());
                }
                Err(e) => println!("discharging_error {}", e.to_string().replace(' ', "_")),
            }
            println!(
                "degree_sum {} bound {} holds {}",
                avg.lhs, avg.rhs, avg.holds
            );
            let ok = valid && avg.holds && ledger.as_ref().is_ok_and(|l| l.all_nonpositive());
            Ok(if ok { OK } else { FAILED })
        }
        Command::TorusMin {
            grid,
            r,
            n,
            budget,
            heuristic,
            seed,
            iters,
        } => {
            let inst = TorusInstance::new(grid, n, r)
                .map_err(|e| Failure(USAGE, format!("error: {e}")))?;
            let (code, status, code_exit) = if heuristic {
                eprintln!("mode heuristic seed {seed} iters {iters}");
                (heuristic_upper(&inst, seed, iters), "heuristic", OK)
            } else {
                let res = min_code_exact(&inst, budget);
                eprintln!("mode exact budget {budget} nodes {}", res.nodes);
                match res.outcome {
                    TorusOutcome::Optimal(c) => (Some(c), "optimal", OK),
                    TorusOutcome::Inconclusive(c) => (c, "inconclusive", INCONCLUSIVE),
                    TorusOutcome::NoCode => (None, "no_code", FAILED),
                }
            };
            let Some(code) = code else {
                eprintln!("status {status}");
                return Ok(if code_exit == INCONCLUSIVE {
                    INCONCLUSIVE
                } else {
                    FAILED
                });
            };
            let periodic = inst
                .to_periodic(&code)
                .map_err(|e| Failure(FAILED, format!("error: {e}")))?;
            if !periodic.is_identifying_code(r).valid {
                eprintln!("status {status}");
                return Err(Failure(
                    FAILED,
                    "error: the torus code does not identify as a periodic code of the grid".into(),
                ));
            }
            eprintln!("status {status}");
            eprintln!("size {}", code.len());
            eprintln!("density {}", approx(periodic.density()));
            print!("{}", pattern::format(&Pattern { code: periodic, r }));
            Ok(code_exit)
        }
    }
}

fn print_header(pat: &Pattern) {
    let (px, py) = pat.code.period();
    println!("grid {}", pat.code.kind());
    println!("r {}", pat.r);
    println!("period {px} {py}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("{msg}");
            ExitCode::from(code)
        }
    }
}
