use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use ssc_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            // a closed pipe (e.g. `| head`) is not an error
            let _ = writeln!(std::io::stdout(), "{}", output.render(cli.json));
            ExitCode::SUCCESS
        }
        Err(err) => {
            if cli.json {
                let report =
                    serde_json::json!({"error": err.to_string(), "exit_code": err.exit_code()});
                let _ = writeln!(std::io::stdout(), "{report}");
            } else {
                eprintln!("error: {err}");
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
