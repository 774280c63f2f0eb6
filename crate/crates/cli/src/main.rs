use std::process::ExitCode;

use clap::Parser;
use gaitforge::{configure_threads, run, Cli, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = configure_threads().and_then(|()| run(cli));
    match status {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(s @ Status::NotConverged) => {
            eprintln!("gaitforge: solver did not converge (see the JSON report)");
            ExitCode::from(s.exit_code())
        }
        Err(e) => {
            eprintln!("gaitforge: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
