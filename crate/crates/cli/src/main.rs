use std::process::ExitCode;

use clap::Parser;
use pcut_cli::{emit, execute, exit, Args, ExecuteError, ExperimentConfig};

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { code(exit::CONFIG) } else { code(exit::OK) };
        }
    };
    let config = match ExperimentConfig::from_args(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return code(exit::CONFIG);
        }
    };
    let summary = match execute(&config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                ExecuteError::Config(_) => code(exit::CONFIG),
                _ => code(exit::RUNTIME),
            };
        }
    };
    if let Err(e) = emit(&summary, args.format, args.out.as_deref()) {
        eprintln!("error: {e}");
        return code(exit::RUNTIME);
    }
    code(exit::OK)
}
