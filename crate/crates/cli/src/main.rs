use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};
use conjugate_cli::experiments::{self, Context, CostUnits};
use conjugate_cli::{render, thread_count, Format, KList, Record};
use conjugate_core::BitString;

#[derive(Parser)]
#[command(
    name = "conjugate",
    version,
    about = "Conjugate-coding encryption laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    csv: bool,
    /// Record wall-clock time per row (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Encrypt and decrypt a message with a random key, and measure wrong-key agreement.
    EncryptDemo {
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value = "10110010")]
        message: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Trace distance between the bit-0 and bit-1 ciphertext states.
    Distance {
        #[arg(long, default_value = "1..6")]
        k: KList,
        /// Plaintext length; above 1 also tabulates multi-bit distances.
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Trace distance of the σ states.
    SigmaDistance {
        #[arg(long, default_value = "1..6")]
        k: KList,
        #[command(flatten)]
        common: Common,
    },
    /// Hadamard-mixing channel identity and Kraus completeness.
    ChannelCheck {
        #[arg(long, default_value = "1..4")]
        k: KList,
        #[command(flatten)]
        common: Common,
    },
    /// Breidbart-basis distance and a sampled parity-guessing experiment.
    Breidbart {
        #[arg(long, default_value = "1..4")]
        k: KList,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Scan of product measurement bases at a shared angle.
    Scan {
        #[arg(long, default_value = "1..4")]
        k: KList,
        #[arg(long, default_value_t = conjugate_core::attacks::DEFAULT_SCAN_GRID)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Eve's marginal under Alice's basis choice.
    Nosignal {
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 128)]
        povms: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Key recovery from known-structure plaintexts for both schemes.
    Unicity {
        #[arg(long, default_value = "2,4,6")]
        k: KList,
        #[arg(long = "N", default_value_t = 64)]
        sample_len: usize,
        #[arg(long = "L", default_value_t = 8)]
        bound: usize,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Cost estimates of the classical wrapper.
    Complexity {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 16)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        l: usize,
        #[arg(long, default_value_t = 1.0)]
        t1: f64,
        #[arg(long, default_value_t = 1.0)]
        t2: f64,
        #[arg(long, default_value_t = 1.0)]
        t3: f64,
        #[arg(long, default_value_t = 1.0)]
        t4: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Runs every acceptance criterion and prints a pass/fail table.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

fn formats(common: &Common) -> Vec<Format> {
    match (common.csv, common.json, &common.out) {
        (true, true, _) => vec![Format::Csv, Format::Json],
        (true, false, _) => vec![Format::Csv],
        (false, true, _) => vec![Format::Json],
        (false, false, Some(p)) if p.extension().is_some_and(|e| e == "json") => vec![Format::Json],
        (false, false, Some(_)) => vec![Format::Csv],
        (false, false, None) => vec![Format::Table],
    }
}

fn output_path(out: &Path, format: Format, both: bool) -> PathBuf {
    match (format, both) {
        (Format::Json, true) => out.with_extension("json"),
        _ => out.to_path_buf(),
    }
}

fn emit(records: &[Record], common: &Common) -> anyhow::Result<()> {
    let fmts = formats(common);
    let both = fmts.len() > 1;
    for f in fmts {
        let text = render(records, f)?;
        match &common.out {
            Some(out) => {
                let path = output_path(out, f, both);
                fs::write(&path, text)
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            None => print!("{text}"),
        }
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let ctx = |c: &Common| Context {
        seed: c.seed,
        timing: c.timing,
    };
    let (records, common) = match cli.command {
        Command::EncryptDemo {
            k,
            message,
            trials,
            common,
        } => {
            let m: BitString = message.parse().context("--message must be a 0/1 string")?;
            (
                experiments::encrypt_demo(&ctx(&common), k, &m, trials)?,
                common,
            )
        }
        Command::Distance { k, n, common } => {
            (experiments::distance(&ctx(&common), &k.0, n)?, common)
        }
        Command::SigmaDistance { k, common } => {
            (experiments::sigma_distance(&ctx(&common), &k.0)?, common)
        }
        Command::ChannelCheck { k, common } => {
            (experiments::channel_check(&ctx(&common), &k.0)?, common)
        }
        Command::Breidbart { k, trials, common } => {
            (experiments::breidbart(&ctx(&common), &k.0, trials)?, common)
        }
        Command::Scan { k, grid, common } => {
            (experiments::scan(&ctx(&common), &k.0, grid)?, common)
        }
        Command::Nosignal {
            trials,
            povms,
            common,
        } => (experiments::nosignal(&ctx(&common), trials, povms)?, common),
        Command::Unicity {
            k,
            sample_len,
            bound,
            runs,
            common,
        } => (
            experiments::unicity(&ctx(&common), &k.0, sample_len, bound, runs)?,
            common,
        ),
        Command::Complexity {
            n,
            k,
            l,
            t1,
            t2,
            t3,
            t4,
            common,
        } => (
            experiments::complexity(&ctx(&common), n, k, l, &CostUnits { t1, t2, t3, t4 })?,
            common,
        ),
        Command::Selftest { common } => {
            let report = experiments::selftest(&ctx(&common))?;
            print!("{}", report.table());
            if common.out.is_some() {
                emit(&report.records, &common)?;
            }
            return Ok(report.passed());
        }
    };
    emit(&records, &common)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match thread_count(std::env::var("CONJUGATE_THREADS").ok().as_deref()) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
