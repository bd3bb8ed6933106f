//! The Čech cocycle c_{αβγ} of a lifted bundle against the simplicial
//! cochain pulled back along the transition functions.

use std::error::Error;

use ddverify::cech::{dd_cech_cocycle, verify_thm31};
use ddverify::models;
use ddverify::report::to_text;
use ddverify::sampling::seeded;

fn main() -> Result<(), Box<dyn Error>> {
    let mut rng = seeded(3);
    for (bundle, model, theta) in models::bundle_suite()? {
        let cover = bundle.base();
        println!("{} over {} ({} open sets)", bundle.name(), cover.space().name(), cover.len());
        let cocycle = dd_cech_cocycle(&bundle, &model)?;
        let p = cover.sample_in(&[0, 1, 2], &mut rng)?;
        println!("  arg c_{{012}} at a sample point = {:+.6}", cocycle.phase([0, 1, 2], &p)?);
        if cover.len() >= 4 {
            let q = cover.sample_in(&[0, 1, 2, 3], &mut rng)?;
            println!("  δc on U_{{0123}} = {:+.2e}", cocycle.coboundary_phase([0, 1, 2, 3], &q)?);
        }
        print!("{}", to_text(&[verify_thm31(&bundle, &model, &theta, 200, 1e-6, 42)?]));
    }
    Ok(())
}
