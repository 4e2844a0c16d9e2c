use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use memetic_lab::experiment::{execute, ExperimentError, Format, Spec};

#[derive(Parser)]
#[command(name = "memlab", version, about = "Seeded memetic algorithm experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration for a number of replicates.
    Run(Opts),
    /// Sweep the local search depth on f_d.
    SweepDelta(Opts),
    /// Sweep the local search period on both race variants.
    SweepTau(Opts),
    /// Search race path lengths that separate tau from 2 tau.
    RaceCalibrate(Opts),
    /// Exhaustive landscape analyses.
    Stategraph(Opts),
    /// Check long k-path invariants.
    VerifyPaths(Opts),
}

#[derive(clap::Args)]
struct Opts {
    /// Config file, or an output file whose header should be replayed.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value = "csv", value_parser = ["csv", "jsonl", "both"])]
    format: String,
    #[arg(long)]
    replicates: Option<u64>,
    #[arg(long = "master-seed")]
    master_seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    workers: Option<usize>,
}

impl Command {
    fn split(self) -> (&'static str, Opts) {
        match self {
            Command::Run(o) => ("run", o),
            Command::SweepDelta(o) => ("sweep-delta", o),
            Command::SweepTau(o) => ("sweep-tau", o),
            Command::RaceCalibrate(o) => ("race-calibrate", o),
            Command::Stategraph(o) => ("stategraph", o),
            Command::VerifyPaths(o) => ("verify-paths", o),
        }
    }
}

fn load_spec(opts: &Opts) -> Result<Spec, ExperimentError> {
    let mut spec = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
            Spec::parse(&text)?
        }
        None => Spec::default(),
    };
    for s in &opts.set {
        spec.set(s)?;
    }
    if let Some(r) = opts.replicates {
        spec.set_value("replicates", &r.to_string())?;
    }
    if let Some(m) = opts.master_seed {
        spec.set_value("master_seed", &m.to_string())?;
    }
    Ok(spec)
}

fn main() -> ExitCode {
    let (command, opts) = Cli::parse().command.split();
    let spec = match load_spec(&opts) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("memlab: {e}");
            return ExitCode::from(1);
        }
    };
    let format = Format::from_name(&opts.format).expect("clap restricts the format");
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = opts.workers {
        pool = pool.num_threads(w);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("memlab: {e}");
            return ExitCode::from(1);
        }
    };
    let output = match pool.install(|| execute(command, &spec, format)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("memlab: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&opts.out) {
        eprintln!("memlab: {}: {e}", opts.out.display());
        return ExitCode::from(1);
    }
    for f in &output.files {
        let path = opts.out.join(&f.name);
        if let Err(e) = std::fs::write(&path, &f.contents) {
            eprintln!("memlab: {}: {e}", path.display());
            return ExitCode::from(1);
        }
        println!("{}", path.display());
    }
    for m in &output.messages {
        eprintln!("{m}");
    }
    ExitCode::from(output.status.exit_code() as u8)
}
