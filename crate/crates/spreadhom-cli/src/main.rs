use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(spreadhom_cli::run(std::env::args()) as u8)
}
