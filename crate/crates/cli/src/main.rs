use std::process::ExitCode;

use sl2_cli::{command, raw_config, run, CliError, RunConfig};

fn main() -> ExitCode {
    let matches = match command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let result = raw_config(sub)
        .and_then(|raw| RunConfig::from_raw(&raw))
        .and_then(|cfg| run(name, &cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sl2: {e}");
            ExitCode::from(CliError::exit_code(&e) as u8)
        }
    }
}
