use clap::{Parser, Subcommand};
use hkc::{CliError, Outcome, Settings};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Heegner points, Kolyvagin classes and Sha elements for elliptic curves over Q.
#[derive(Parser, Debug)]
#[command(name = "hkc", version)]
struct Cli {
    /// Working precision for recognizing y_c; planned from a height bound when absent.
    #[arg(long, global = true)]
    precision_digits: Option<u32>,
    /// Number of q-expansion terms; planned when absent.
    #[arg(long, global = true)]
    terms: Option<usize>,
    /// Degree-1 places probed before a verdict is declared inconclusive.
    #[arg(long, global = true, default_value_t = 64)]
    place_budget: usize,
    #[arg(long, global = true, env = "HKC_CACHE_DIR", default_value = "hkc-cache")]
    cache_dir: PathBuf,
    /// Recompute y_c even when it is cached.
    #[arg(long, global = true)]
    force: bool,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Compute (or load) the Heegner point y_c and its minimal polynomial.
    Heegner { label: String, d: u64, c: u64 },
    /// Certify kappa_{c,m} != 0.
    Kolyvagin {
        label: String,
        d: u64,
        c: u64,
        p: u64,
        m: u32,
        /// Certificate path; defaults to the cache directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify a nonzero element of Sha(E/K)[p^m].
    Sha {
        label: String,
        d: u64,
        c: u64,
        p: u64,
        m: u32,
        /// Take the Selmer hypothesis as given.
        #[arg(long)]
        selmer_attested: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List Kolyvagin primes up to a bound.
    Scan { label: String, d: u64, p: u64, bound: u64 },
    /// Central derivatives L'(f, chi, 1) and the Zhang height of y_c.
    Lvalue { label: String, d: u64, c: u64 },
    /// Re-check a certificate file.
    Replay { certificate: PathBuf },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let settings = Settings {
        precision_digits: cli.precision_digits,
        terms: cli.terms,
        place_budget: cli.place_budget,
        cache_dir: cli.cache_dir,
        force: cli.force,
    };
    let mut log = std::io::stderr();
    match cli.cmd {
        Cmd::Heegner { label, d, c } => hkc::cmd_heegner(&label, d, c, &settings, &mut log),
        Cmd::Kolyvagin { label, d, c, p, m, out } => hkc::cmd_kolyvagin(&label, d, c, p, m, &settings, out.as_deref(), &mut log),
        Cmd::Sha { label, d, c, p, m, selmer_attested, out } => hkc::cmd_sha(&label, d, c, p, m, selmer_attested, &settings, out.as_deref(), &mut log),
        Cmd::Scan { label, d, p, bound } => hkc::cmd_scan(&label, d, p, bound),
        Cmd::Lvalue { label, d, c } => hkc::cmd_lvalue(&label, d, c),
        Cmd::Replay { certificate } => hkc::cmd_replay(&certificate),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("internal inconsistency: {e}");
            return ExitCode::from(4);
        }
    }
    match run(cli) {
        Ok(o) => {
            print!("{}", o.report);
            let _ = std::io::stdout().flush();
            if let Some((path, _)) = o.certificate {
                eprintln!("certificate: {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
