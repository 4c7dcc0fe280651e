use clap::Parser;
use triphoton::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(summary) => print!("{summary}"),
        Err(e) => {
            eprintln!("triphoton: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
