use std::io::Write;
use std::process::ExitCode;

use catdiv_cli::CliError;

// A closed pipe (e.g. `| head`) is not an error worth reporting.
fn emit(mut out: impl Write, text: &str) {
    let _ = out.write_all(text.as_bytes());
}

fn main() -> ExitCode {
    match catdiv_cli::run(std::env::args().skip(1)) {
        Ok(report) => {
            emit(std::io::stdout(), &format!("{}\n", catdiv_cli::render(&report)));
            ExitCode::from(report.exit_code() as u8)
        }
        Err(CliError::Help(text)) => {
            emit(std::io::stdout(), &text);
            ExitCode::SUCCESS
        }
        Err(e) => {
            let json = serde_json::to_string_pretty(&e.to_json()).expect("errors serialize");
            emit(std::io::stderr(), &format!("{json}\n"));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
