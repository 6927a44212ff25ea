//! Command-line front end: `sample`, `tail`, `regime`, `regen`, `verify`.

mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{self, RegimeOptions};
use crate::engine::Model;
use crate::error::SimError;
use crate::VERSION;

pub use config::{
    parse_range, ArParams, EngineConfig, KernelConfig, RunConfig, RunSection, SkeletonConfig, SCHEMA_VERSION,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DEPTH: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;
pub const EXIT_OTHER: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "chainsim", version, about = "Exact sampling of chains of infinite order")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Perfect sample of a time window, as CSV plus a TOML record.
    Sample(Common),
    /// Empirical tail of the coalescence depth.
    Tail(Common),
    /// The A_k sequence and the regime it certifies.
    Regime(Common),
    /// Regeneration times and blocks of one sample.
    Regen(Common),
    /// Compatibility of perfect samples with the kernel.
    Verify(Common),
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Inclusive seed range.
    #[arg(long, value_name = "A..B")]
    seeds: Option<String>,
    /// Inclusive time window.
    #[arg(long, value_name = "M..N", allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, value_name = "R")]
    replicas: Option<u64>,
    /// Cap on how far into the past the search may probe.
    #[arg(long, value_name = "D")]
    max_depth: Option<u64>,
    #[arg(long, value_name = "T")]
    threads: Option<usize>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

impl Common {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(s) = self.seed {
            cfg.run.seed = s;
            cfg.run.seeds = None;
        }
        if let Some(r) = self.replicas {
            cfg.run.replicas = Some(r);
            cfg.run.seeds = None;
        }
        if let Some(s) = &self.seeds {
            cfg.run.seeds = Some(s.clone());
        }
        if let Some(w) = &self.window {
            cfg.run.window = w.clone();
        }
        if let Some(d) = self.max_depth {
            cfg.engine.max_steps = d;
        }
    }
}

#[derive(Debug)]
enum Failure {
    Sim(SimError),
    Io(String),
    Verification(usize),
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        Failure::Sim(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn exit_code(f: &Failure) -> i32 {
    match f {
        Failure::Sim(SimError::DepthExceeded { .. }) => EXIT_DEPTH,
        Failure::Sim(SimError::InternalInvariant(_)) | Failure::Io(_) => EXIT_OTHER,
        Failure::Sim(_) => EXIT_CONFIG,
        Failure::Verification(_) => EXIT_VERIFY,
    }
}

/// Output document: header, config echo and payload.
#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    schema_version: u32,
    version: &'static str,
    command: &'static str,
    report: &'a T,
    config: &'a RunConfig,
}

fn document<T: Serialize>(command: &'static str, cfg: &RunConfig, report: &T) -> String {
    toml::to_string(&Document {
        schema_version: SCHEMA_VERSION,
        version: VERSION,
        command,
        report,
        config: cfg,
    })
    .expect("report serializes")
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct BlockRow {
    start: i64,
    end: i64,
    len: u64,
    max_zeta: u64,
}

#[derive(Serialize)]
struct SampleRecord {
    seed: u64,
    window_start: i64,
    target: i64,
    lambda: i64,
    theta: i64,
    start: i64,
    depth: u64,
    ties: u64,
    blocks: Vec<BlockRow>,
}

/// Path of the TOML record written next to a sample file.
pub fn record_path(out: &Path) -> PathBuf {
    out.with_extension("toml")
}

fn cmd_sample(model: &Model, cfg: &RunConfig, out: Option<&Path>) -> Result<(), Failure> {
    let (m, n) = cfg.window()?;
    let seed = cfg.run.seed;
    let s = model.sample_window(seed, m, n)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "symbol", "depth"])?;
    for (k, (&a, &d)) in s.symbols.iter().zip(&s.depths).enumerate() {
        let present = model.kernel().present(a);
        w.write_record([(m + k as i64).to_string(), present.to_string(), d.to_string()])?;
    }
    let data = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    let text = String::from_utf8(data).map_err(|e| Failure::Io(e.to_string()))?;
    emit(out, &text)?;
    if let Some(p) = out {
        let r = &s.record;
        let rec = SampleRecord {
            seed,
            window_start: m,
            target: n,
            lambda: r.lambda,
            theta: r.theta,
            start: r.start,
            depth: r.depth(),
            ties: r.ties,
            blocks: r
                .blocks
                .iter()
                .map(|b| BlockRow {
                    start: b.start,
                    end: b.end,
                    len: b.len(),
                    max_zeta: b.max_zeta,
                })
                .collect(),
        };
        std::fs::write(record_path(p), document("sample", cfg, &rec))?;
    }
    Ok(())
}

fn run_command(command: &Command) -> Result<(), Failure> {
    let common = match command {
        Command::Sample(c) | Command::Tail(c) | Command::Regime(c) | Command::Regen(c) | Command::Verify(c) => c,
    };
    let mut cfg = RunConfig::load(&common.config)?;
    common.apply(&mut cfg);
    cfg.validate()?;
    let model = cfg.model()?;
    let out = common.out.as_deref();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = common.threads {
        if t == 0 {
            return Err(SimError::InvalidArgument("--threads must be positive".into()).into());
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| Failure::Io(e.to_string()))?;
    pool.install(|| match command {
        Command::Sample(_) => cmd_sample(&model, &cfg, out),
        Command::Tail(_) => {
            let r = analysis::estimate_tail(&model, cfg.seed_range()?, cfg.run.max_n, cfg.run.level)?;
            emit(out, &document("tail", &cfg, &r))
        }
        Command::Regime(_) => {
            let opts = RegimeOptions {
                shortcut: cfg.run.shortcut,
                samples: cfg.run.samples,
                seed: cfg.run.seed,
            };
            let r = analysis::a_sequence(&model, cfg.run.horizon, &opts)?;
            emit(out, &document("regime", &cfg, &r))
        }
        Command::Regen(_) => {
            let (m, n) = cfg.window()?;
            let r = analysis::extract_regeneration(&model, cfg.run.seed, m, n)?;
            emit(out, &document("regen", &cfg, &r))
        }
        Command::Verify(_) => {
            let r = analysis::compatibility_sweep(&model, cfg.seed_range()?, cfg.run.probe_depth)?;
            emit(out, &document("verify", &cfg, &r))?;
            match r.failures() {
                0 => Ok(()),
                k => Err(Failure::Verification(k)),
            }
        }
    })
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run_command(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            match &f {
                Failure::Sim(e) => eprintln!("error: {e}"),
                Failure::Io(e) => eprintln!("error: {e}"),
                Failure::Verification(k) => eprintln!("verification failed for {k} probes"),
            }
            exit_code(&f)
        }
    }
}
