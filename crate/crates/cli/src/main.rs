use std::io;
use std::process::ExitCode;

use clap::Parser;
use thompson_cli::{run, CommandConfig};

fn main() -> ExitCode {
    let config = CommandConfig::parse();
    match run(&config, &mut io::stdout().lock(), &mut io::stderr().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
