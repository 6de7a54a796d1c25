use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use z2cover_core::cover::PointType;
use z2cover_core::families::{build_family, theorem_table, Construction, MAX_N, MIN_N};
use z2cover_core::render::{self, Format};
use z2cover_core::search::{enumerate_point_types, scan_configs, DEFAULT_MAX_MULT};
use z2cover_core::verify::{self, Fault};

#[derive(Parser)]
#[command(
    name = "z2cover",
    version,
    about = "Z2^3-covers of blown-up Hirzebruch surfaces with canonical map of degree 8"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Format {
        match f {
            OutputFormat::Text => Format::Text,
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseChoice {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultChoice {
    FlipSign,
}

fn parse_n(s: &str) -> Result<i64, String> {
    let n: i64 = s
        .trim()
        .parse()
        .map_err(|_| format!("not an integer: {s}"))?;
    if (MIN_N..=MAX_N).contains(&n) {
        Ok(n)
    } else {
        Err(format!("n must be in {MIN_N}..={MAX_N}"))
    }
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {s}"))?;
    let (a, b) = (parse_n(a)?, parse_n(b)?);
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok((a, b))
}

#[derive(Subcommand)]
enum Command {
    /// Full report for one family.
    Family {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=9))]
        id: u32,
        #[arg(long, value_parser = parse_n)]
        n: i64,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// The nine-row table.
    Table {
        #[arg(long, value_parser = parse_n)]
        n: i64,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Run every self-check over an inclusive range of n.
    Verify {
        #[arg(long = "n-range", value_parser = parse_range, default_value = "2..10")]
        n_range: (i64, i64),
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultChoice>,
    },
    /// Scan imposed points on one of the two base constructions.
    Search {
        #[arg(long, value_enum)]
        construction: BaseChoice,
        #[arg(long, value_parser = parse_n)]
        n: i64,
        #[arg(long, default_value_t = DEFAULT_MAX_MULT, value_parser = clap::value_parser!(i64).range(0..=8))]
        max_mult: i64,
        #[arg(long)]
        allow_exceptional: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// List the point types satisfying the parity constraints.
    Points {
        #[arg(long, default_value_t = DEFAULT_MAX_MULT, value_parser = clap::value_parser!(i64).range(0..=8))]
        max_mult: i64,
        #[arg(long)]
        allow_exceptional: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Double-cover tower and fixed part of one family.
    Tower {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=9))]
        id: u32,
        #[arg(long, value_parser = parse_n)]
        n: i64,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
}

fn run(cli: Cli) -> z2cover_core::Result<(String, bool)> {
    Ok(match cli.command {
        Command::Family { id, n, format } => {
            (render::family(&build_family(id, n)?, format.into()), true)
        }
        Command::Table { n, format } => (render::table(&theorem_table(n)?, format.into()), true),
        Command::Verify {
            n_range: (lo, hi),
            format,
            inject_fault,
        } => {
            let fault = inject_fault.map(|FaultChoice::FlipSign| Fault::FlipIntersectionSign);
            let summary = verify::run(lo, hi, fault)?;
            (
                render::verify(&summary, format.into()),
                summary.all_passed(),
            )
        }
        Command::Search {
            construction,
            n,
            max_mult,
            allow_exceptional,
            format,
        } => {
            let base = match construction {
                BaseChoice::One => Construction::One,
                BaseChoice::Two => Construction::Two,
            };
            let points = enumerate_point_types(-1, max_mult, allow_exceptional)
                .into_iter()
                .map(PointType::new)
                .collect::<z2cover_core::Result<Vec<_>>>()?;
            (
                render::search(&scan_configs(base, n, &points), format.into()),
                true,
            )
        }
        Command::Points {
            max_mult,
            allow_exceptional,
            format,
        } => (
            render::points(
                &enumerate_point_types(-1, max_mult, allow_exceptional),
                format.into(),
            ),
            true,
        ),
        Command::Tower { id, n, format } => {
            (render::tower(&build_family(id, n)?, format.into()), true)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
