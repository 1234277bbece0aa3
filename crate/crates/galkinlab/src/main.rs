use std::process::ExitCode;

fn main() -> ExitCode {
    galkinlab::cli::main_with_args(std::env::args_os())
}
