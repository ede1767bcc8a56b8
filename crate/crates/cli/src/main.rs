//! Command-line front end: TOML config in, CSV/SVG/JSON artifacts out.
//!
//! Exit codes: 0 success, 1 invalid input or configuration, 2 numerical
//! failure during an otherwise valid computation.

mod commands;
mod plot;

use clap::error::ErrorKind;
use clap::Parser;

fn main() {
    let cli = match commands::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return;
        }
        Err(e) => {
            eprint!("{e}");
            std::process::exit(1);
        }
    };
    if let Err(e) = commands::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(if e.is_validation() { 1 } else { 2 });
    }
}
