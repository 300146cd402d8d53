use clap::Parser;

use bdbound::cli::{run, Cli};

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    std::process::exit(run(&cli, &argv));
}
