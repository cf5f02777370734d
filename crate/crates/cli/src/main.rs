use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use enhom::runner::{self, Command, ComputeArgs, Overrides, RunReport, RunnerError};
use enhom::Field;

const GRAMMAR: &str = "\
Algebra grammar (--algebra):
  S(x:2)            free graded-commutative algebra, field from --field
  Q[x:0] F2[x:-1]   the same with an explicit field
  Q[x:0]/x^3        truncated polynomial algebra
  T(x:0,y:0)        tensor algebra
  group C3          group algebra of a cyclic group
  sqzero:2          k plus a square-zero module of dimension 2 in degree -1
  prod:3            product of 3 copies of the field
A generator is name:degree or name:degree:weight (weight defaults to 1).

Lie algebras (--lie): der-outer, may, free, abelian, abelian-restricted,
and periodic:j (tor only). --gens takes generators as above.

Windows: --deg a..b and --weight a..b are inclusive.
Exit codes: 0 pass, 1 mismatch or failed computation, 2 usage error,
3 resolution budget exceeded.";

#[derive(Parser)]
#[command(name = "enhom", version, about = "Exact E_n, Hochschild and Lie algebra homology over Q and F2", after_help = GRAMMAR)]
struct Cli {
    /// output format
    #[arg(long, value_enum, global = true, default_value_t = Out::Text)]
    out: Out,
    /// worker threads (defaults to all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Out {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// run a registered scenario, or `all`
    Scenario {
        id: String,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// list registered scenarios
    List,
    /// run one computation without expectations
    Compute {
        #[arg(value_parser = ["bar", "hochschild", "ce", "tor", "hodge", "indec"])]
        what: String,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        algebra: Option<String>,
        /// bar: E_n order; hochschild: sphere dimension
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        lie: Option<String>,
        #[arg(long)]
        gens: Option<String>,
        #[arg(long)]
        weight_filter: Option<u32>,
        /// Hodge summands, e.g. 1,2
        #[arg(long, value_delimiter = ',')]
        l: Vec<usize>,
        /// resolution variant for indec: SI, nL, nG, nrL
        #[arg(long)]
        variant: Option<String>,
        /// top homological or simplicial index
        #[arg(long)]
        s_max: Option<usize>,
    },
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long)]
    field: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    deg: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    weight: Option<String>,
    /// basis elements allowed per resolution level
    #[arg(long)]
    budget: Option<usize>,
}

impl WindowArgs {
    fn overrides(&self) -> Result<Overrides, RunnerError> {
        Ok(Overrides {
            field: self
                .field
                .as_deref()
                .map(|f| f.parse::<Field>().map_err(|e| RunnerError::Usage(e.to_string())))
                .transpose()?,
            degrees: self.deg.as_deref().map(runner::parse_range).transpose()?,
            weights: self.weight.as_deref().map(runner::parse_range).transpose()?,
            budget: self.budget,
        })
    }
}

fn emit(r: &RunReport, out: Out) {
    let s = match out {
        Out::Json => r.to_json() + "\n",
        Out::Csv => r.to_csv(),
        Out::Text => r.to_text(),
    };
    // a closed pipe (`| head`) is not an error
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn run(cli: Cli) -> Result<i32, RunnerError> {
    match cli.cmd {
        Cmd::List => {
            for s in runner::scenarios() {
                println!("{:<16} {}", s.id, s.summary);
            }
            Ok(0)
        }
        Cmd::Scenario { id, window } => {
            let ov = window.overrides()?;
            if id == "all" {
                let mut code = 0;
                for s in runner::scenarios() {
                    let r = runner::run_scenario(s.id, &ov)?;
                    emit(&r, cli.out);
                    code = code.max(r.exit_code());
                }
                return Ok(code);
            }
            let r = runner::run_scenario(&id, &ov)?;
            emit(&r, cli.out);
            Ok(r.exit_code())
        }
        Cmd::Compute { what, window, algebra, n, lie, gens, weight_filter, l, variant, s_max } => {
            let ov = window.overrides()?;
            let args = ComputeArgs {
                field: ov.field,
                algebra,
                n,
                degrees: ov.degrees,
                weights: ov.weights,
                lie,
                gens,
                weight_filter,
                l,
                variant,
                s_max,
                budget: ov.budget,
            };
            let r = runner::compute(what.parse::<Command>()?, &args)?;
            emit(&r, cli.out);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
