use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use gevrey_kam::cli_experiments::{run, Command, Config};
use gevrey_kam::Error;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Reduce,
    Gaps,
    Interval,
    Duality,
    Thickness,
    Sumset,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Reduce => Command::Reduce,
            Cmd::Gaps => Command::Gaps,
            Cmd::Interval => Command::Interval,
            Cmd::Duality => Command::Duality,
            Cmd::Thickness => Command::Thickness,
            Cmd::Sumset => Command::Sumset,
        }
    }
}

/// Gevrey KAM experiments: reduction traces, gap scans, interval spectra,
/// duality eigenfunctions and Cantor-set arithmetic.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    command: Cmd,
    /// flat key = value experiment file
    #[arg(long)]
    config: PathBuf,
    /// output directory, created if missing
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// worker threads; falls back to THREADS, then to the machine's parallelism
    #[arg(long)]
    threads: Option<usize>,
}

fn threads(flag: Option<usize>) -> Result<usize, String> {
    if let Some(n) = flag {
        return if n == 0 { Err("--threads must be positive".into()) } else { Ok(n) };
    }
    match std::env::var("THREADS") {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("THREADS = `{s}` is not a positive integer")),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let n = match threads(cli.threads) {
        Ok(n) => n,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cfg = match Config::load(cli.command.into(), &cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(&cfg, &cli.out)) {
        Ok(o) => {
            println!("{}", o.summary);
            for f in &o.files {
                println!("wrote {}", f.display());
            }
            match o.failure {
                None => ExitCode::SUCCESS,
                Some(f) => {
                    eprintln!("contract failed: {f}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
