use std::process::ExitCode;

fn main() -> ExitCode {
    zalcman::cli::run(std::env::args_os())
}
