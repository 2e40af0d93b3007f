use std::process::ExitCode;

use clap::Parser;
use minktrace::cli::{run, CampaignConfig};
use minktrace::Error;

fn main() -> ExitCode {
    let config = CampaignConfig::parse();
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(&config) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e @ Error::InvalidArgument(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
