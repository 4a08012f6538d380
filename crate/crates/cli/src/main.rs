use std::io::{self, BufWriter};
use std::process::ExitCode;

use clap::Parser;
use fkt_cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut out = BufWriter::new(io::stdout().lock());
    match run(&cli, &mut io::stdin().lock(), &mut out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("fkt: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
