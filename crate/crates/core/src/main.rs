use std::process::ExitCode;

use clap::Parser;
use macvlc::cli::{run, Cli, CliError};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let CliError::CheckFailed { report, .. } = &e {
                print!("{report}");
            }
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
