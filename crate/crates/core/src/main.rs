use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let status =
        tuf_costsim::cli::run_cli(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(status as u8)
}
