use std::process::ExitCode;

use fockbell::cli::{main_with_args, CliError};

fn main() -> ExitCode {
    match main_with_args(std::env::args_os()) {
        Ok(_) => ExitCode::SUCCESS,
        Err(CliError::Info(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("fockbell: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
