use std::io::Write;
use std::process::ExitCode;

use xel::CliError;

fn main() -> ExitCode {
    match xel::run(std::env::args_os()) {
        Ok(out) => {
            if out.files.is_empty() {
                match serde_json::to_string_pretty(&out.report) {
                    Ok(s) => {
                        // a closed pipe (e.g. `| head`) is not an error worth reporting
                        let _ = writeln!(std::io::stdout(), "{s}");
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(3);
                    }
                }
            }
            for f in &out.files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Info(text)) => {
            let _ = write!(std::io::stdout(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
