use std::process::ExitCode;

use clap::Parser;
use qpenal_core::cli::{run, RunConfig};

fn main() -> ExitCode {
    if let Some(n) = std::env::var("QPENAL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let config = RunConfig::parse();
    match run(&config) {
        Ok(summary) => {
            println!("{}", summary.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
