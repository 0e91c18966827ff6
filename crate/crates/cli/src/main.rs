use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(crossdecay_cli::run(std::env::args_os()))
}
