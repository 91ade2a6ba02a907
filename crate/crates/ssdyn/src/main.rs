use std::process::ExitCode;

use clap::Parser;
use ssdyn::cli::{run_cli, Cli};

fn main() -> ExitCode {
    match run_cli(Cli::parse()) {
        Ok(art) => {
            if !art.summary.is_empty() {
                print!("{}", art.summary);
                if !art.summary.ends_with('\n') {
                    println!();
                }
            }
            for f in &art.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ssdyn: {e}");
            ExitCode::FAILURE
        }
    }
}
