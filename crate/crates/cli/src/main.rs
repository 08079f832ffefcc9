use std::process::ExitCode;

use clap::{Parser, Subcommand};

use multimoments_cli::args::{parse_range, parse_list};
use multimoments_cli::moment::{cmd_moment, Kind, MomentRequest};
use multimoments_cli::verify::{self, Oracle, VerifyConfig};
use multimoments_cli::{CliError, Format, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "multimoments", version, about = "Joint moments of the multinomial distribution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one raw, central or factorial moment.
    Moment {
        #[arg(value_enum)]
        kind: Kind,
        /// Number of trials.
        #[arg(long)]
        m: u64,
        /// Category probabilities, e.g. `1/2,1/4` or `0.5,0.25`.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// 1-based category indices (raw, central).
        #[arg(long)]
        indices: Option<String>,
        /// Per-category falling-factorial orders (factorial).
        #[arg(long)]
        orders: Option<String>,
        /// Exact rational arithmetic; values print as `p/q`.
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Compare the closed forms against independent oracles over a grid.
    Verify {
        /// Comma-separated subset of enum, mgf, expansion, mc.
        #[arg(long, default_value = "enum,mgf,expansion")]
        oracles: String,
        /// Category counts, `a..b` or a single value.
        #[arg(long, default_value = "1..3")]
        d: String,
        /// Trial counts, `a..b` or a single value.
        #[arg(long, default_value = "1..5")]
        m: String,
        /// Probability lattice resolution: x_i = k_i / grid with Σk_i ≤ grid.
        #[arg(long, default_value_t = 4)]
        grid: u64,
        #[arg(long)]
        exact: bool,
        /// Monte Carlo draws per grid cell.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest support the enumeration oracle will sum over.
        #[arg(long, default_value_t = multimoments::enum_oracle::DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn parse_oracles(s: &str) -> Result<Vec<Oracle>, CliError> {
    let names: Vec<String> = parse_list(s, "oracle")?;
    let mut out = Vec::new();
    for name in names {
        let o = match name.as_str() {
            "enum" => Oracle::Enum,
            "mgf" => Oracle::Mgf,
            "expansion" => Oracle::Expansion,
            "mc" => Oracle::Mc,
            other => return Err(CliError::usage(format!("unknown oracle {other:?}"))),
        };
        if !out.contains(&o) {
            out.push(o);
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Moment {
            kind,
            m,
            x,
            indices,
            orders,
            exact,
            format,
        } => {
            let req = MomentRequest {
                kind,
                m,
                x,
                indices,
                orders,
                exact,
                format,
            };
            println!("{}", cmd_moment(&req)?);
            Ok(EXIT_OK)
        }
        Command::Verify {
            oracles,
            d,
            m,
            grid,
            exact,
            samples,
            seed,
            budget,
            format,
        } => {
            let cfg = VerifyConfig {
                oracles: parse_oracles(&oracles)?,
                d: parse_range(&d, "d")?,
                m: parse_range(&m, "m")?,
                grid,
                exact,
                samples,
                seed,
                budget,
                keep_rows: format == Format::Csv,
            };
            let report = verify::run(&cfg)?;
            println!("{}", report.render(format));
            if report.passed() {
                Ok(EXIT_OK)
            } else {
                eprintln!("{} mismatches", report.mismatches.len());
                Ok(EXIT_MISMATCH)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
