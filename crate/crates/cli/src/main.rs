use clap::Parser;
use hnntree_cli::commands::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    let code = match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hnntree: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
