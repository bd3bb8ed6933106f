//! Running checks by name and rendering their reports.

use std::error::Error;

use ddverify::report::{render, Format};
use ddverify::runner::{run, RunConfig};

fn main() -> Result<(), Box<dyn Error>> {
    let cfg = RunConfig {
        samples: 100,
        ..RunConfig::default()
    };
    let reports = run("prop21", "heisenberg", cfg)?;
    print!("{}", render(&reports, Format::Json));
    let reports = run("all", "split_v4", cfg)?;
    print!("{}", render(&reports, Format::Csv));
    Ok(())
}
