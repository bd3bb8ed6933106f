//! U(2) → SO(3) with four quaternion patches: nonconstant comparison phases
//! and the cocycle checks.

use std::error::Error;

use ddverify::extension::{dd_cochain, verify_model, verify_prop21, verify_prop22};
use ddverify::models::u2;
use ddverify::report::to_text;
use ddverify::sampling::{sample_interior, seeded};
use ddverify::simplicial::verify_cocycle;

fn main() -> Result<(), Box<dyn Error>> {
    let model = u2::model()?;
    let theta = u2::connection(&model)?;
    let g = model.base();
    let mut rng = seeded(7);

    println!("patches: {}", model.cover().len());
    for _ in 0..5 {
        let g1 = sample_interior(g.space(), &mut rng)?;
        let g2 = sample_interior(g.space(), &mut rng)?;
        let patches = model.patch_triple(&g1, &g2)?;
        let c = model.comparison_element(patches, &g1, &g2)?;
        println!(
            "  patches (λ, λ′, λ″) = {patches:?}, arg c = {:+.6}",
            model.kernel_angle(&c)?
        );
    }

    let dd = dd_cochain(&model, &theta)?;
    let reports = [
        verify_model(&model, 100, 1e-8, 42)?,
        verify_prop21(&model, &theta, 200, 1e-6, 42)?,
        verify_prop22(&model, &theta, 200, 1e-6, 42)?,
        verify_cocycle(&dd, u2::NAME, 200, 1e-6, 42)?,
    ];
    print!("{}", to_text(&reports));
    Ok(())
}
