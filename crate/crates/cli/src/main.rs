use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = approxlab_cli::Cli::parse();
    if let Err(e) = approxlab_cli::init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match approxlab_cli::run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            for path in &outcome.written {
                eprintln!("wrote {}", path.display());
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(trace) = approxlab_cli::write_trace(&cli, &e) {
                eprintln!("solver trace: {}", trace.display());
            }
            ExitCode::from(2)
        }
    }
}
