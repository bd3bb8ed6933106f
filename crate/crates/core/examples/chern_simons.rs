//! The Chern-Simons cochain on N̄G and its edge, which transgresses to c₁(θ).

use std::error::Error;

use ddverify::chernsimons::{verify_thm41, verify_transgression};
use ddverify::models::{self, heisenberg, u2};
use ddverify::report::to_text;

fn main() -> Result<(), Box<dyn Error>> {
    for name in [heisenberg::NAME, u2::NAME] {
        let (model, theta) = models::smooth(name)?;
        let reports = [
            verify_thm41(&model, &theta, 200, 1e-6, 42)?,
            verify_transgression(&model, &theta, 200, 1e-10, 42)?,
        ];
        print!("{}", to_text(&reports));
    }
    Ok(())
}
