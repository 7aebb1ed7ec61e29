//! `secarp`: run secure-ARP scenarios and encode/decode protocol frames.
//!
//! Exit codes are stable: 0 success, 1 scenario assertion or verdict
//! failure, 2 usage/validation error, 3 frame decode error.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use secarp::protocol::Mode;
use secarp::scenarios::{
    builtin, builtin_names, compare, run_scenario, verify_expectations, Scenario,
};
use secarp::wire::{decode_frame, frame_hex, parse_hex};

mod frame_desc;
mod render;

const EXIT_ASSERTION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DECODE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "secarp",
    about = "Centralized secure ARP simulator and frame codec",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Run a builtin scenario by name, or a scenario JSON file by path.
    Run(RunArgs),
    /// Decode a hex frame and dump its fields.
    Decode(DecodeArgs),
    /// Encode a frame description (JSON) or a builtin sample to hex.
    Encode(EncodeArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Builtin name (see --list) or path to a scenario file.
    scenario: Option<String>,
    /// Simulation seed; falls back to SECARP_SEED, then the scenario's own.
    #[arg(long)]
    seed: Option<u64>,
    /// Protocol family to simulate.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Number of Monte Carlo trials (overrides the scenario).
    #[arg(long)]
    repeat: Option<u32>,
    /// Write the report as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the raw trace here (one record per line).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// List builtin scenario names and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct DecodeArgs {
    /// Hex text; omit to read --file or stdin.
    hex: Option<String>,
    /// Read hex from this file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    /// Path to a frame description (JSON).
    description: Option<PathBuf>,
    /// Emit a canonical sample frame instead.
    #[arg(long, value_name = "TYPE")]
    sample: Option<String>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "secure" => Ok(Mode::Secure),
        "baseline" => Ok(Mode::Baseline),
        other => Err(format!("mode must be secure|baseline, got {other:?}")),
    }
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        CliCommand::Run(args) => cmd_run(args),
        CliCommand::Decode(args) => cmd_decode(args),
        CliCommand::Encode(args) => cmd_encode(args),
    }
}

fn load_scenario(name_or_path: &str, mode: Option<Mode>) -> Result<Scenario, String> {
    let requested_mode = mode.unwrap_or(Mode::Secure);
    if builtin_names().contains(&name_or_path) {
        return builtin(name_or_path, requested_mode).ok_or_else(|| {
            format!(
                "builtin {name_or_path:?} has no {} variant",
                requested_mode.label()
            )
        });
    }
    let path = std::path::Path::new(name_or_path);
    if !path.exists() {
        return Err(format!(
            "{name_or_path:?} is neither a builtin ({}) nor a file",
            builtin_names().join(", ")
        ));
    }
    let text = std::fs::read_to_string(path).map_err(|e| format!("{name_or_path}: {e}"))?;
    let mut scenario: Scenario =
        serde_json::from_str(&text).map_err(|e| format!("{name_or_path}: {e}"))?;
    if let Some(mode) = mode {
        scenario.mode = mode;
    }
    Ok(scenario)
}

fn cmd_run(args: RunArgs) -> ExitCode {
    if args.list {
        for name in builtin_names() {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    let Some(name) = args.scenario.as_deref() else {
        return usage_error("missing scenario name or path (try --list)");
    };
    let mut scenario = match load_scenario(name, args.mode) {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    let env_seed = std::env::var("SECARP_SEED")
        .ok()
        .and_then(|s| s.parse().ok());
    if let Some(seed) = args.seed.or(env_seed) {
        scenario.seed = seed;
    }
    if let Some(repeat) = args.repeat {
        scenario.repeat = repeat;
    }

    let output = match run_scenario(&scenario) {
        Ok(output) => output,
        Err(secarp::scenarios::ScenarioError::Validation(msg)) => return usage_error(msg),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ASSERTION);
        }
    };

    print!("{}", render::report_text(&output.report));

    // Builtins that exist in both modes get the secure-versus-baseline
    // comparison alongside the secure run.
    let is_builtin = builtin_names().contains(&name);
    if is_builtin && scenario.mode == Mode::Secure {
        if let Some(mut baseline) = builtin(name, Mode::Baseline) {
            baseline.seed = scenario.seed;
            match run_scenario(&baseline) {
                Ok(base_out) => match compare(&output.report, &base_out.report) {
                    Ok(comparison) => {
                        println!("comparison against baseline:");
                        print!("{}", comparison.to_table_string());
                    }
                    Err(e) => eprintln!("comparison unavailable: {e}"),
                },
                Err(e) => eprintln!("baseline run failed: {e}"),
            }
        }
    }

    if let Some(path) = &args.out {
        let json = serde_json::to_string_pretty(&output.report).expect("report serializes");
        if let Err(e) = std::fs::write(path, json) {
            return usage_error(format!("{}: {e}", path.display()));
        }
    }
    if let Some(path) = &args.trace {
        if let Err(e) = std::fs::write(path, &output.trace) {
            return usage_error(format!("{}: {e}", path.display()));
        }
    }

    let failures = verify_expectations(&scenario, &output.report);
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for failure in failures {
            eprintln!("assertion failed: {failure}");
        }
        ExitCode::from(EXIT_ASSERTION)
    }
}

fn cmd_decode(args: DecodeArgs) -> ExitCode {
    let hex = match (args.hex, args.file) {
        (Some(hex), None) => hex,
        (None, Some(path)) => match std::fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) => return usage_error(format!("{}: {e}", path.display())),
        },
        (None, None) => {
            let mut text = String::new();
            if let Err(e) = std::io::stdin().read_to_string(&mut text) {
                return usage_error(format!("stdin: {e}"));
            }
            text
        }
        (Some(_), Some(_)) => return usage_error("give hex either inline or via --file, not both"),
    };
    let bytes = match parse_hex(&hex) {
        Ok(bytes) => bytes,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_DECODE);
        }
    };
    match decode_frame(&bytes) {
        Ok(frame) => {
            print!("{}", render::frame_text(&frame));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DECODE)
        }
    }
}

fn cmd_encode(args: EncodeArgs) -> ExitCode {
    let frame = match (args.description, args.sample) {
        (None, Some(name)) => match frame_desc::sample(&name) {
            Some(frame) => frame,
            None => {
                return usage_error(format!(
                    "unknown sample {name:?}; one of: {}",
                    frame_desc::SAMPLE_NAMES.join(", ")
                ))
            }
        },
        (Some(path), None) => {
            let text = match std::fs::read_to_string(&path) {
                Ok(text) => text,
                Err(e) => return usage_error(format!("{}: {e}", path.display())),
            };
            let desc: frame_desc::FrameDesc = match serde_json::from_str(&text) {
                Ok(desc) => desc,
                Err(e) => return usage_error(format!("{}: {e}", path.display())),
            };
            match desc.to_frame() {
                Ok(frame) => frame,
                Err(e) => return usage_error(e),
            }
        }
        _ => return usage_error("give exactly one of: a description file, or --sample TYPE"),
    };
    println!("{}", frame_hex(&frame));
    ExitCode::SUCCESS
}
