use clap::Parser;
use maxalign_cli::{run, Cli, RunConfig};

fn main() {
    let config = RunConfig::from(Cli::parse());
    std::process::exit(run(&config));
}
