use clap::Parser;

use annular_skein::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
