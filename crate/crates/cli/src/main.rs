use clap::Parser;
use incluso_cli::{run, Cli, RunError};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(&cli) {
        Ok(()) => {}
        Err(RunError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            std::process::exit(64);
        }
        Err(RunError::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            std::process::exit(2);
        }
        Err(RunError::Io(e)) => {
            eprintln!("io error: {e}");
            std::process::exit(1);
        }
    }
}
