use std::process::ExitCode;

fn main() -> ExitCode {
    spdc_boson_cli::run(std::env::args_os())
}
