//! memory-sim: scenario runner CLI.
//!
//! Exit codes: 0 all targets met, 1 at least one target missed,
//! 2 usage or configuration error.

use std::env;
use std::path::PathBuf;
use std::process::ExitCode;

use memsim_cli::{check_all, run_scenario, Registry};

const USAGE: &str = "\
memory-sim - ensemble optical memory scenario runner

USAGE:
  memory-sim run <scenario> [--set key=value]... [--out dir]
  memory-sim list
  memory-sim check [--out dir]

SUBCOMMANDS:
  run    Run one scenario and verify its expected targets
  list   List registered scenarios
  check  Run every scenario with its shipped expectations

OPTIONS:
  --set key=value  Override a configuration key (repeatable; `run` only)
  --out dir        Output root (default: $MEMORY_SIM_OUT or ./out)

Artifacts are written to <out>/<scenario>/{data.csv,fit.txt,summary.txt}.
";

struct Cli {
    command: String,
    scenario: Option<String>,
    overrides: Vec<String>,
    out_root: PathBuf,
}

fn parse_args(args: &[String]) -> Result<Cli, String> {
    let mut command = None;
    let mut scenario = None;
    let mut overrides = Vec::new();
    let mut out_flag: Option<PathBuf> = None;

    let mut iter = args.iter().peekable();
    while let Some(arg) = iter.next() {
        match arg.as_str() {
            "--set" => {
                let value = iter.next().ok_or("--set expects key=value")?;
                overrides.push(value.clone());
            }
            "--out" => {
                let value = iter.next().ok_or("--out expects a directory")?;
                out_flag = Some(PathBuf::from(value));
            }
            "-h" | "--help" => return Err(String::new()),
            other if command.is_none() => command = Some(other.to_string()),
            other if command.as_deref() == Some("run") && scenario.is_none() => {
                scenario = Some(other.to_string())
            }
            other => return Err(format!("unexpected argument `{other}`")),
        }
    }

    let out_root = out_flag
        .or_else(|| env::var_os("MEMORY_SIM_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok(Cli {
        command: command.ok_or("missing subcommand")?,
        scenario,
        overrides,
        out_root,
    })
}

fn main() -> ExitCode {
    let args: Vec<String> = env::args().skip(1).collect();
    let cli = match parse_args(&args) {
        Ok(cli) => cli,
        Err(msg) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}\n");
            }
            eprint!("{USAGE}");
            return ExitCode::from(2);
        }
    };

    let registry = Registry::standard();
    match cli.command.as_str() {
        "list" => {
            print!("{}", registry.listing());
            ExitCode::SUCCESS
        }
        "run" => {
            let Some(name) = cli.scenario else {
                eprintln!("error: `run` expects a scenario name\n");
                eprint!("{USAGE}");
                return ExitCode::from(2);
            };
            if registry.get(&name).is_none() {
                eprintln!("error: unknown scenario `{name}`; registered scenarios:");
                for n in registry.names() {
                    eprintln!("  {n}");
                }
                return ExitCode::from(2);
            }
            match run_scenario(&registry, &name, &cli.overrides, &cli.out_root) {
                Ok(report) => {
                    for line in &report.target_lines {
                        println!("{line}");
                    }
                    println!(
                        "{}: {} (artifacts in {})",
                        report.scenario,
                        if report.passed { "pass" } else { "FAIL" },
                        report.out_dir.display()
                    );
                    if report.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(err) => {
                    eprintln!("error: {err}");
                    ExitCode::from(2)
                }
            }
        }
        "check" => match check_all(&registry, &cli.out_root) {
            Ok(reports) => {
                let mut all_passed = true;
                for report in &reports {
                    println!(
                        "{:24} {}",
                        report.scenario,
                        if report.passed { "pass" } else { "FAIL" }
                    );
                    all_passed &= report.passed;
                }
                if all_passed {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(err) => {
                eprintln!("error: {err}");
                ExitCode::from(2)
            }
        },
        other => {
            eprintln!("error: unknown subcommand `{other}`\n");
            eprint!("{USAGE}");
            ExitCode::from(2)
        }
    }
}
