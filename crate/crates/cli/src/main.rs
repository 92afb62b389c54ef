//! Batch command line for image dehazing and Retinex enhancement.
//!
//! Exit codes: 0 on success, 1 for numeric failures, 2 for I/O failures,
//! and 64 for usage errors.

mod commands;
mod manifest;
mod methods;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use unveil_core::error::Error;

#[derive(Parser)]
#[command(
    name = "unveil",
    version,
    about = "Dehaze and enhance images, synthesize fog, and score the results"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enhance one image with a named method.
    Enhance(EnhanceArgs),
    /// Render synthetic fog over a clear image.
    Synth(SynthArgs),
    /// Score images against references and write a CSV report.
    Eval(EvalArgs),
    /// Rerun a recorded manifest for a bit-identical output.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct EnhanceArgs {
    /// Method name: dcp, he, ssr, msr, rsr, lrsr, kbr, hf, path, or a
    /// duality composition such as dehret:msr or retdeh:dcp.
    #[arg(short, long)]
    method: String,
    /// Method parameter override as key=value; repeatable.
    #[arg(short, long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Seed for stochastic methods; defaults to $UNVEIL_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Output bit depth, 8 or 16.
    #[arg(long, default_value_t = 8)]
    bits: u32,
    /// Input image (PNG, PGM, or PPM).
    input: PathBuf,
    /// Output image path.
    output: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Depth preset (ramp, corridor, steps) or a grayscale depth image path.
    #[arg(long, default_value = "ramp")]
    depth: String,
    /// Extinction coefficient.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Airlight color as one value or r,g,b, each in (0, 1].
    #[arg(long, default_value = "1.0")]
    airlight: String,
    /// Amplitude of the smooth transmission perturbation, in [0, 0.5].
    #[arg(long, default_value_t = 0.0)]
    amp: f64,
    /// Perturbation correlation length in pixels.
    #[arg(long, default_value_t = 32)]
    scale: usize,
    /// Seed for the perturbation noise; defaults to $UNVEIL_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Transmission map output path; defaults to the output with a _t suffix.
    #[arg(long)]
    transmission: Option<PathBuf>,
    /// Clear input image.
    input: PathBuf,
    /// Hazy output path, written as 16-bit PNG or PGM/PPM.
    output: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Reference image or directory of references.
    #[arg(long)]
    reference: PathBuf,
    /// Test image or directory, paired with references by file name.
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated methods to run on the test images before scoring;
    /// omitted means score the test images as they are.
    #[arg(long)]
    methods: Option<String>,
    /// Method parameter override as key=value; repeatable, single method only.
    #[arg(short, long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Seed for stochastic methods; defaults to $UNVEIL_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReplayArgs {
    /// Manifest file written by a previous run.
    manifest: PathBuf,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::Image(_) => 2,
        Error::InvalidParameter(_) => 64,
        Error::DimensionMismatch { .. } | Error::TooSmall { .. } => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 64 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.cmd {
        Cmd::Enhance(args) => commands::enhance(args),
        Cmd::Synth(args) => commands::synth(args),
        Cmd::Eval(args) => commands::eval(args),
        Cmd::Replay(args) => commands::replay(&args.manifest),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
