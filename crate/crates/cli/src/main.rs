use clap::Parser;

use charvol_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = charvol_cli::run(&cli) {
        eprintln!("charvol: {e}");
        std::process::exit(e.exit_code());
    }
}
