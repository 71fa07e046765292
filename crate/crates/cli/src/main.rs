use std::process::ExitCode;

use clap::{Parser, Subcommand};
use trianguline_cli::job::{Defaults, DEFAULT_PRECISION, PRECISION_ENV};
use trianguline_cli::{corpus, explain, parse_job_with, run_job_with, suites, RunOptions};

#[derive(Parser)]
#[command(name = "trianguline", version, about = "Periods, Sen theory and triangulations of (φ, Γ)-modules")]
struct Cli {
    /// Worker threads for sample-point scans.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Default working precision of p-adic scalars.
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = DEFAULT_PRECISION)]
    precision: i64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a job file (`-` reads stdin, `corpus:<name>` a bundled job).
    Run {
        job: String,
        /// Re-check every certificate independently.
        #[arg(long)]
        verify: bool,
    },
    /// Run the verification suites.
    Selftest {
        #[arg(long, default_value_t = suites::DEFAULT_SEED)]
        seed: u64,
        /// Suites to run (1 to 7); all by default.
        #[arg(long, value_delimiter = ',')]
        suites: Vec<u8>,
    },
    /// Describe an operation; without an anchor, list the anchors.
    Explain { anchor: Option<String> },
}

fn read_job(src: &str) -> Result<String, String> {
    if src == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(|e| e.to_string())?;
        return Ok(s);
    }
    if let Some(name) = src.strip_prefix("corpus:") {
        return corpus::get(name).map(str::to_string).ok_or_else(|| format!("no bundled job '{name}'"));
    }
    std::fs::read_to_string(src).map_err(|e| format!("{src}: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    pool.install(|| match cli.command {
        Command::Run { job, verify } => {
            let text = match read_job(&job) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let doc = match parse_job_with(&text, Defaults { precision: cli.precision }) {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            let report = run_job_with(&doc, RunOptions { verify });
            print!("{}", report.render());
            ExitCode::from(report.exit_code() as u8)
        }
        Command::Selftest { seed, suites: which } => {
            let which = if which.is_empty() { vec![1, 2, 3, 4, 5, 6, 7] } else { which };
            if which.iter().any(|&s| s == 0 || s > 7) {
                eprintln!("error: suites are numbered 1 to 7");
                return ExitCode::from(2);
            }
            let reports = suites::run_suites(&which, seed);
            let mut failed = 0;
            for r in &reports {
                let verdict = if r.passed() { "PASS" } else { "FAIL" };
                println!("suite {} {:<18} {verdict} checks={} failures={}", r.id, r.name, r.checks, r.failures.len());
                for f in r.failures.iter().take(5) {
                    println!("    {f}");
                }
                failed += r.failures.len();
            }
            println!("selftest: {} suites, {failed} failures", reports.len());
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Command::Explain { anchor } => match anchor {
            None => {
                for a in explain::anchors() {
                    println!("{a}");
                }
                ExitCode::SUCCESS
            }
            Some(a) => match explain::lookup(&a) {
                Some(e) => {
                    print!("{}", explain::render(e));
                    ExitCode::SUCCESS
                }
                None => {
                    eprintln!("error: unknown anchor '{a}'; known: {}", explain::anchors().join(", "));
                    ExitCode::from(2)
                }
            },
        },
    })
}
