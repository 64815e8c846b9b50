mod args;
mod commands;
mod config;
mod failure;
mod output;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use args::Cli;
use failure::Failure;

const THREADS_VAR: &str = "WEYL_LATTICE_THREADS";

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::validation(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::validation(format!("thread pool: {e}")))
}

fn real_main(argv: Vec<OsString>) -> Result<u8, Failure> {
    if matches!(argv.get(1).and_then(|a| a.to_str()), Some("--version" | "-V")) {
        println!("weyl-lattice {} conventions {}", env!("CARGO_PKG_VERSION"), weyl_lattice::conventions_hash());
        return Ok(0);
    }
    let names: Vec<String> = Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let argv = config::merge(argv, &names)?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(0);
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("bad arguments");
            return Err(Failure::validation(first.trim_start_matches("error: ")));
        }
    };
    configure_threads()?;
    commands::run(cli.command)
}

fn main() -> ExitCode {
    // Bad input must never surface as a panic; anything that slips through
    // is reported like a numeric failure.
    std::panic::set_hook(Box::new(|_| {}));
    let argv: Vec<OsString> = std::env::args_os().collect();
    let code = match std::panic::catch_unwind(|| real_main(argv)) {
        Ok(Ok(code)) => code,
        Ok(Err(f)) => {
            eprintln!("{}", f.to_line());
            f.exit_code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal error".into());
            let f = Failure::numeric(format!("internal error: {msg}"));
            eprintln!("{}", f.to_line());
            f.exit_code
        }
    };
    ExitCode::from(code)
}
