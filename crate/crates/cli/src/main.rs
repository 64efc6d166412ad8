//! `edconst`: exact values, sampled estimates, and certified lower
//! bounds for the expected edit distance between random k-ary strings.

mod records;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use edconst::bound::{
    ball_upper_bound, beta_hat_analytic, beta_star_traced, css_count, ecc_lower_bound,
    g_bracket_with, m_constant_bracket, sign_g_with, BracketStatus, Precision,
};
use edconst::exact::{eccentricity_cdp, enumerate_classes, expected_distance_exact};
use edconst::montecarlo::{
    ci_alpha_limit, ci_alpha_n, delta_radius, estimate_alpha_n, estimate_c_alpha, q_rate_bound,
};
use edconst::SymbolString;
use records::{Format, Record, Sink};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "edconst", version, about)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Write records to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact rational values for small lengths.
    #[command(subcommand)]
    Exact(ExactCmd),
    /// Monte Carlo estimate with confidence intervals.
    Mc(McArgs),
    /// Certified analytic lower-bound machinery.
    #[command(subcommand)]
    Lb(LbCmd),
    /// Convergence-rate and confidence-radius calculator.
    Rate(RateArgs),
    /// Rescaled defect (1 - alpha) k for large alphabets.
    Conjecture(ConjectureArgs),
    /// Reference sweeps at desk scale.
    Tables(TablesArgs),
}

#[derive(Subcommand)]
enum ExactCmd {
    /// Expected distance e_k(n) and alpha_k(n) as exact rationals.
    Alpha {
        #[arg(short)]
        k: u64,
        #[arg(short)]
        n: usize,
    },
    /// Eccentricity of one string: its mean distance to a uniform draw.
    Ecc {
        #[arg(short)]
        k: u64,
        /// String as letters: 'a'..'z' or digits map to symbols.
        #[arg(short = 'x', conflicts_with = "symbols")]
        letters: Option<String>,
        /// String as comma-separated symbol values.
        #[arg(long)]
        symbols: Option<String>,
    },
    /// Equivalence classes of strings under relabeling and reversal.
    Classes {
        #[arg(short)]
        k: u64,
        #[arg(short)]
        n: usize,
        /// Also compute each representative's eccentricity.
        #[arg(long)]
        with_ecc: bool,
    },
}

#[derive(Args)]
struct McArgs {
    #[arg(short)]
    k: u64,
    #[arg(short)]
    n: usize,
    /// Number of sampled pairs.
    #[arg(short = 'N', long = "samples", default_value_t = 1024)]
    nsamples: u64,
    #[arg(long, default_value_t = 0.999)]
    lambda: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses the ambient pool.
    #[arg(long, env = "EDCONST_WORKERS", default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum LbCmd {
    /// Certified bracket for the largest beta with negative rate maximum.
    BetaStar {
        #[arg(short)]
        k: u64,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
        /// Evaluation budget per sign test.
        #[arg(long, default_value_t = 64)]
        budget: u32,
        /// Interval mantissa bits; 0 evaluates in double precision.
        #[arg(long, default_value_t = 0)]
        precision_bits: u32,
        /// Also emit the nested bracket after every bisection step.
        #[arg(long)]
        trace: bool,
    },
    /// Enclosure of the rate-function maximum at a fixed beta.
    GBracket {
        #[arg(short)]
        k: u64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        precision_bits: u32,
    },
    /// Certified sign of the rate-function maximum at a fixed beta.
    Sign {
        #[arg(short)]
        k: u64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 64)]
        budget: u32,
        #[arg(long, default_value_t = 0)]
        precision_bits: u32,
    },
    /// Closed-form threshold bound for large alphabets.
    ClosedForm {
        #[arg(short)]
        k: u64,
    },
    /// Counting bound on the size of an edit ball.
    Ball {
        #[arg(short)]
        k: u64,
        #[arg(short)]
        n: u64,
        #[arg(short)]
        r: u64,
    },
    /// Counting lower bound on every string's eccentricity.
    Floor {
        #[arg(short)]
        k: u64,
        #[arg(short)]
        n: u64,
        #[arg(long)]
        r_star: u64,
    },
}

#[derive(Args)]
struct RateArgs {
    #[arg(short)]
    n: usize,
    /// Sample count; adds the sampling radius to the report.
    #[arg(short = 'N', long = "samples")]
    nsamples: Option<u64>,
    #[arg(long, default_value_t = 0.999)]
    lambda: f64,
}

#[derive(Args)]
struct ConjectureArgs {
    #[arg(short)]
    k: u64,
    #[arg(short)]
    n: usize,
    #[arg(short = 'N', long = "samples", default_value_t = 1)]
    nsamples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(long, value_enum)]
    which: Table,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Table {
    /// alpha_4(n) across string lengths.
    Length,
    /// alpha_k(n) across alphabet sizes at a fixed length.
    Alphabet,
    /// The rescaled defect for a large alphabet.
    Defect,
}

fn precision_of(bits: u32) -> Precision {
    if bits == 0 {
        Precision::Double
    } else {
        Precision::Bits(bits)
    }
}

fn parse_string(k: u64, letters: Option<&str>, symbols: Option<&str>) -> anyhow::Result<SymbolString> {
    match (letters, symbols) {
        (Some(s), None) => Ok(SymbolString::from_letters(k, s)?),
        (None, Some(csv)) => {
            let parsed: Vec<u64> = csv
                .split(',')
                .map(|t| t.trim().parse::<u64>().context("symbol values are integers"))
                .collect::<anyhow::Result<_>>()?;
            Ok(SymbolString::new(k, parsed)?)
        }
        _ => bail!("provide the string either as -x letters or as --symbols values"),
    }
}

fn run(cmd: Cmd, sink: &mut Sink) -> anyhow::Result<u8> {
    match cmd {
        Cmd::Exact(ExactCmd::Alpha { k, n }) => {
            let (e, alpha) = expected_distance_exact(k, n)?;
            sink.emit(Record::ExactAlpha { k, n, e, alpha });
        }
        Cmd::Exact(ExactCmd::Ecc { k, letters, symbols }) => {
            let x = parse_string(k, letters.as_deref(), symbols.as_deref())?;
            let ecc = eccentricity_cdp(&x)?;
            sink.emit(Record::Eccentricity { k, x: x.to_string(), ecc });
        }
        Cmd::Exact(ExactCmd::Classes { k, n, with_ecc }) => {
            for class in enumerate_classes(k, n)? {
                let ecc = if with_ecc {
                    Some(eccentricity_cdp(&class.representative)?)
                } else {
                    None
                };
                sink.emit(Record::Class {
                    k,
                    n,
                    representative: class.representative.to_string(),
                    size: class.size.to_string(),
                    ecc,
                });
            }
        }
        Cmd::Mc(args) => {
            let stats = estimate_alpha_n(args.k, args.n, args.nsamples, args.seed, args.workers)?;
            let ci_n = ci_alpha_n(&stats, args.lambda)?;
            let ci_limit = ci_alpha_limit(&stats, args.lambda)?;
            sink.emit(Record::Stats(stats));
            sink.emit(Record::Interval(ci_n));
            sink.emit(Record::Interval(ci_limit));
        }
        Cmd::Lb(LbCmd::BetaStar { k, eps, budget, precision_bits, trace }) => {
            let (bracket, steps) =
                beta_star_traced(k, eps, budget, precision_of(precision_bits))?;
            if trace {
                for (step, (lower, upper)) in steps.into_iter().enumerate() {
                    sink.emit(Record::TraceStep { step, lower, upper });
                }
            }
            let exhausted = bracket.status == BracketStatus::BudgetExhausted;
            sink.emit(Record::Bracket { k, eps, budget, precision_bits, bracket });
            if exhausted {
                return Ok(4);
            }
        }
        Cmd::Lb(LbCmd::GBracket { k, beta, eps, precision_bits }) => {
            let (lo, hi) = g_bracket_with(k, beta, eps, precision_of(precision_bits))?;
            sink.emit(Record::GBracket { k, beta, eps, lo, hi });
        }
        Cmd::Lb(LbCmd::Sign { k, beta, budget, precision_bits }) => {
            let sign = sign_g_with(k, beta, budget, precision_of(precision_bits))?;
            sink.emit(Record::Sign { k, beta, budget, sign });
        }
        Cmd::Lb(LbCmd::ClosedForm { k }) => {
            let beta_hat = beta_hat_analytic(k)?;
            let (m_lo, m_hi) = m_constant_bracket()?;
            sink.emit(Record::ClosedForm { k, beta_hat, m_lo, m_hi });
        }
        Cmd::Lb(LbCmd::Ball { k, n, r }) => {
            let ball = ball_upper_bound(k, n, r)?;
            let css = css_count(k, n, r)?;
            sink.emit(Record::Ball {
                k,
                n,
                r,
                u: ball.u.to_string(),
                css: css.to_string(),
            });
        }
        Cmd::Lb(LbCmd::Floor { k, n, r_star }) => {
            let value = ecc_lower_bound(k, n, r_star)?;
            sink.emit(Record::Floor { k, n, r_star, value });
        }
        Cmd::Rate(args) => {
            let q = q_rate_bound(args.n)?;
            let delta = args
                .nsamples
                .map(|nn| delta_radius(args.n, nn, args.lambda))
                .transpose()?;
            sink.emit(Record::Rate {
                n: args.n,
                q,
                half_q: q / 2.0,
                delta,
                radius: delta.map(|d| d + q / 2.0),
            });
        }
        Cmd::Conjecture(args) => {
            let (c_alpha, stats) = estimate_c_alpha(args.k, args.n, args.nsamples, args.seed)?;
            sink.emit(Record::Defect {
                k: args.k,
                n: args.n,
                nsamples: args.nsamples,
                seed: args.seed,
                alpha_tilde: stats.alpha_tilde,
                c_alpha,
            });
        }
        Cmd::Tables(args) => run_tables(args, sink)?,
    }
    Ok(0)
}

fn run_tables(args: TablesArgs, sink: &mut Sink) -> anyhow::Result<()> {
    let row = |table: &str, k: u64, n: usize, nsamples: u64, metric: &str, value: f64| {
        Record::TableRow {
            table: table.to_string(),
            k,
            n,
            nsamples,
            metric: metric.to_string(),
            value,
            provenance: "computed".to_string(),
        }
    };
    match args.which {
        Table::Length => {
            for exp in 8..=13u32 {
                let n = 1usize << exp;
                let nsamples = (1u64 << 22) / n as u64;
                let nsamples = nsamples.max(16);
                let stats = estimate_alpha_n(4, n, nsamples, args.seed, 0)?;
                sink.emit(row("length", 4, n, nsamples, "alpha_tilde", stats.alpha_tilde));
                let d = delta_radius(n, nsamples, 0.999)?;
                sink.emit(row("length", 4, n, nsamples, "delta", d));
            }
        }
        Table::Alphabet => {
            let n = 1usize << 12;
            let nsamples = 64;
            for k in [2u64, 3, 4, 5, 6, 7, 8, 16, 32] {
                let stats = estimate_alpha_n(k, n, nsamples, args.seed, 0)?;
                sink.emit(row("alphabet", k, n, nsamples, "alpha_tilde", stats.alpha_tilde));
            }
        }
        Table::Defect => {
            let (k, n) = (1u64 << 7, 1usize << 17);
            let (c_alpha, stats) = estimate_c_alpha(k, n, 1, args.seed)?;
            sink.emit(row("defect", k, n, 1, "alpha_tilde", stats.alpha_tilde));
            sink.emit(row("defect", k, n, 1, "c_alpha", c_alpha));
        }
    }
    Ok(())
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<edconst::Error>() {
        Some(edconst::Error::ResourceGuard(_)) | Some(edconst::Error::PrecisionFloor(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut sink = Sink::new();
    let outcome = run(cli.cmd, &mut sink);
    let written: std::io::Result<()> = match &cli.out {
        Some(path) => std::fs::File::create(path)
            .and_then(|mut f| sink.write(cli.format, &mut f).and_then(|()| f.flush())),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            sink.write(cli.format, &mut lock).and_then(|()| lock.flush())
        }
    };
    if let Err(e) = written {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return ExitCode::from(0);
        }
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
