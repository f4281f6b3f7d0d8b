use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use iscount_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(outcome.report.to_json().as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            if outcome.code != 0 {
                eprintln!("iscount: verification failed");
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("iscount: {e:#}");
            ExitCode::from(2)
        }
    }
}
