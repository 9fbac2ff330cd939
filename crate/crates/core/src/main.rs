use clap::Parser;
use special_surfaces::cli::{run, RunConfig};

fn main() {
    let config = RunConfig::parse();
    let outcome = run(&config);
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    std::process::exit(outcome.code);
}
