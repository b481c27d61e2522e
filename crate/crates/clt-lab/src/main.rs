use clap::Parser;
use clt_lab::cli;

fn main() {
    let config = cli::CliArgs::parse().into_config();
    if let Err(e) = cli::run(&config) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
