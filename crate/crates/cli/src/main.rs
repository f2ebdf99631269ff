use std::process::ExitCode;

use clap::Parser;
use infopower_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            println!("{}", out.stdout);
            if let Some(msg) = &out.diagnostic {
                eprintln!("{msg}");
            }
            ExitCode::from(out.exit_code)
        }
        Err(e) => {
            eprintln!("infopower: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
