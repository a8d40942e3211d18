use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(fanin_frontend::run(std::env::args_os()))
}
