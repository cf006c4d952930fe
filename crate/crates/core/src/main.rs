use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use gaugeforge::cli::{self, Cli};

fn main() -> ExitCode {
    let args = Cli::parse();
    let (code, stdout, stderr) = cli::run(&args);
    print!("{stdout}");
    eprint!("{stderr}");
    let _ = std::io::stdout().flush();
    ExitCode::from(code as u8)
}
