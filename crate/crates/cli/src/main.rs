//! `absum`: sieve arithmetic function tables, sum them, decompose the 1/n
//! weighted sums, and run the asymptotic claim catalog.
//!
//! Exit codes: 0 success, 1 a claim was violated, 2 usage error, 3 runtime error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use absum_core::asymptotics::{ClaimReport, Verdict, DEFAULT_WINDOW};
use absum_core::cache::TableCache;
use absum_core::claims::{list_claims, Runner, DEFAULT_N_MAX, GRID_POINTS, GRID_START};
use absum_core::summation::{
    abel_decompose, format_sig17, partial_sums, prime_restricted_sums, weighted_sums,
    write_abel_csv, write_series_csv,
};
use absum_core::{CheckpointGrid, Error, FunctionSpec, FunctionTable, Series, SieveConfig};

#[derive(Parser)]
#[command(
    name = "absum",
    version,
    about = "Summatory arithmetic functions and asymptotic residual checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a table of f(n).
    Sieve {
        #[arg(long)]
        function: String,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Print Σ_{n≤x} f(n)/n^k (or over primes with --primes).
    Sum {
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = 0)]
        k: u32,
        /// Restrict the sum to primes.
        #[arg(long)]
        primes: bool,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Print the boundary/integral split of Σ_{n≤x} f(n)/n.
    Abel {
        #[arg(long)]
        function: String,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run one claim and print its JSON report.
    ClaimRun {
        claim_id: String,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: f64,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// List the claim catalog.
    ClaimList {
        #[arg(long)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every claim and print a JSON array of reports.
    RunAll {
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: f64,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long = "nmax", default_value_t = DEFAULT_N_MAX)]
    n_max: usize,
    #[arg(long)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value_t = 1 << 20)]
    segment_size: usize,
    /// Directory for cached tables.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Progress messages on stderr.
    #[arg(long, short)]
    verbose: bool,
}

#[derive(Args)]
struct GridArgs {
    /// Number of geometric checkpoints.
    #[arg(long, conflicts_with = "at")]
    grid: Option<usize>,
    /// Explicit checkpoints, comma separated.
    #[arg(long, value_delimiter = ',')]
    at: Option<Vec<f64>>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Usage(_)
            | Error::UnknownFunction(_)
            | Error::UnknownClaim(_)
            | Error::Sizing(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

impl Common {
    fn check(&self) -> CliResult<()> {
        if self.n_max < 2 {
            return Err(Failure::Usage(format!(
                "--nmax must be at least 2, got {}",
                self.n_max
            )));
        }
        if self.segment_size == 0 {
            return Err(Failure::Usage("--segment-size must be positive".into()));
        }
        Ok(())
    }

    fn sieve(&self) -> SieveConfig {
        SieveConfig {
            segment_size: self.segment_size,
            threads: self.threads,
            ..SieveConfig::default()
        }
    }

    fn table(&self, function: &str) -> CliResult<FunctionTable> {
        self.check()?;
        let spec: FunctionSpec = function.parse()?;
        if self.verbose {
            eprintln!("building {spec} up to {}", self.n_max);
        }
        let table = match &self.cache_dir {
            Some(dir) => TableCache::new(dir).load_or_build(spec, self.n_max, &self.sieve())?,
            None => spec.build(self.n_max, &self.sieve())?,
        };
        Ok(table)
    }

    fn runner(&self, window: f64) -> Runner {
        Runner {
            sieve: self.sieve(),
            window,
            cache: self.cache_dir.as_ref().map(TableCache::new),
        }
    }

    fn emit(&self, text: &str) -> CliResult<()> {
        emit(self.out.as_ref(), text)
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

impl GridArgs {
    /// The explicit or geometric grid; `None` when neither flag was given.
    fn explicit(&self, n_max: usize) -> CliResult<Option<CheckpointGrid>> {
        if let Some(points) = &self.at {
            return Ok(Some(CheckpointGrid::new(points.clone())?));
        }
        match self.grid {
            Some(count) => Ok(Some(default_grid(n_max, count)?)),
            None => Ok(None),
        }
    }

    fn or_default(&self, n_max: usize) -> CliResult<CheckpointGrid> {
        match self.explicit(n_max)? {
            Some(g) => Ok(g),
            None => Ok(default_grid(n_max, GRID_POINTS)?),
        }
    }
}

fn default_grid(n_max: usize, count: usize) -> Result<CheckpointGrid, Error> {
    let top = n_max as f64;
    CheckpointGrid::geometric(GRID_START.min(top), top, count)
}

fn series_output(series: &Series, format: Format) -> CliResult<String> {
    Ok(match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_series_csv(&mut buf, series)?;
            String::from_utf8(buf).unwrap()
        }
        Format::Json => {
            let mut v = json!({
                "source": series.source,
                "weight": series.weight,
                "x": series.grid.points(),
                "sum": series.sums,
            });
            if let Some(exact) = &series.exact {
                v["exact"] = Value::from(exact.iter().map(|e| e.to_string()).collect::<Vec<_>>());
            }
            pretty(&v)
        }
    })
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn value_text(table: &FunctionTable, n: usize) -> String {
    match table.int_at(n) {
        Some(v) => v.to_string(),
        None => format_sig17(table.real_at(n)),
    }
}

fn cmd_sieve(function: &str, common: &Common, grid: &GridArgs) -> CliResult<()> {
    let table = common.table(function)?;
    let xs: Vec<usize> = match grid.explicit(common.n_max)? {
        Some(g) => g
            .points()
            .iter()
            .map(|&x| {
                if x > common.n_max as f64 {
                    Err(Failure::Runtime(
                        Error::Range {
                            x,
                            n_max: common.n_max,
                        }
                        .to_string(),
                    ))
                } else {
                    Ok(x.floor() as usize)
                }
            })
            .collect::<CliResult<_>>()?,
        None => (1..=common.n_max).collect(),
    };
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("x,value\n");
            for n in xs {
                s.push_str(&format!("{n},{}\n", value_text(&table, n)));
            }
            s
        }
        Format::Json => {
            let values: Vec<Value> = xs
                .iter()
                .map(|&n| match table.int_at(n) {
                    Some(v) => Value::from(v as i64),
                    None => Value::from(table.real_at(n)),
                })
                .collect();
            pretty(
                &json!({ "name": table.name(), "n_max": table.n_max(), "x": xs, "value": values }),
            )
        }
    };
    common.emit(&text)
}

fn cmd_sum(
    function: &str,
    k: u32,
    primes: bool,
    common: &Common,
    grid: &GridArgs,
) -> CliResult<()> {
    let table = common.table(function)?;
    let grid = grid.or_default(common.n_max)?;
    let series: Series = if primes {
        let indicator = common.table("prime")?;
        prime_restricted_sums(&table, &indicator, k, &grid)?
    } else if k == 0 {
        partial_sums(&table, &grid)?
    } else {
        weighted_sums(&table, k, &grid)?
    };
    common.emit(&series_output(
        &series,
        common.format.unwrap_or(Format::Csv),
    )?)
}

fn cmd_abel(function: &str, common: &Common, grid: &GridArgs) -> CliResult<()> {
    let table = common.table(function)?;
    let grid = grid.or_default(common.n_max)?;
    let d = abel_decompose::<f64>(&table, &grid)?;
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut buf = Vec::new();
            write_abel_csv(&mut buf, &d)?;
            String::from_utf8(buf).unwrap()
        }
        Format::Json => pretty(&json!({
            "source": table.name(),
            "x": d.grid.points(),
            "boundary": d.boundary,
            "integral": d.integral,
            "total": d.total,
        })),
    };
    common.emit(&text)
}

fn reports_exit(reports: &[ClaimReport]) -> ExitCode {
    if reports.iter().any(|r| r.verdict == Verdict::Violated) {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn check_format(format: Option<Format>) -> CliResult<()> {
    if format == Some(Format::Csv) {
        return Err(Failure::Usage("reports are JSON only".into()));
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Sieve {
            function,
            common,
            grid,
        } => cmd_sieve(&function, &common, &grid)?,
        Command::Sum {
            function,
            k,
            primes,
            common,
            grid,
        } => cmd_sum(&function, k, primes, &common, &grid)?,
        Command::Abel {
            function,
            common,
            grid,
        } => cmd_abel(&function, &common, &grid)?,
        Command::ClaimRun {
            claim_id,
            window,
            common,
            grid,
        } => {
            common.check()?;
            check_format(common.format)?;
            let grid = grid.explicit(common.n_max)?;
            if common.verbose {
                eprintln!("running {claim_id} up to {}", common.n_max);
            }
            let report = common
                .runner(window)
                .run_claim(&claim_id, common.n_max, grid.as_ref())?;
            common.emit(&pretty(&report))?;
            return Ok(reports_exit(std::slice::from_ref(&report)));
        }
        Command::ClaimList { format, out } => {
            let claims = list_claims();
            let text = match format.unwrap_or(Format::Json) {
                Format::Csv => {
                    let mut s = String::from("claim_id,weight,prime_restricted,default_n_max\n");
                    for c in &claims {
                        s.push_str(&format!(
                            "{},{},{},{}\n",
                            c.claim_id, c.weight, c.prime_restricted, c.default_n_max
                        ));
                    }
                    s
                }
                Format::Json => pretty(
                    &claims
                        .iter()
                        .map(|c| {
                            json!({
                                "claim_id": c.claim_id,
                                "anchor": c.anchor,
                                "tables": c.tables.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                                "weight": c.weight,
                                "prime_restricted": c.prime_restricted,
                                "default_n_max": c.default_n_max,
                            })
                        })
                        .collect::<Vec<_>>(),
                ),
            };
            emit(out.as_ref(), &text)?;
        }
        Command::RunAll {
            window,
            common,
            grid,
        } => {
            common.check()?;
            check_format(common.format)?;
            let grid = grid.explicit(common.n_max)?;
            if common.verbose {
                eprintln!(
                    "running {} claims up to {}",
                    list_claims().len(),
                    common.n_max
                );
            }
            let reports = common.runner(window).run_all(common.n_max, grid.as_ref())?;
            common.emit(&pretty(&reports))?;
            return Ok(reports_exit(&reports));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("absum: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("absum: {msg}");
            ExitCode::from(3)
        }
    }
}
