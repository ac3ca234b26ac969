use std::io::Write;
use std::process::ExitCode;

use egospec_cli::CliError;

fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match egospec_cli::run(std::env::args_os(), &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err @ CliError::Usage(_)) => {
            let code = err.exit_code();
            if let CliError::Usage(e) = err {
                let _ = e.print();
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
