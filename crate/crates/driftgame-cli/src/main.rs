use clap::Parser;

fn main() {
    let cli = driftgame_cli::cli::Cli::parse();
    if let Err(err) = driftgame_cli::dispatch(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
