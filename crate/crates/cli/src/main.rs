use clap::Parser;
use driftlab_cli::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = driftlab_cli::run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
