//! The Dixmier-Douady cochain c₁(θ) ⊕ −κ·ŝ*(δθ) of the Heisenberg extension
//! and the checks it passes.

use std::error::Error;

use ddverify::extension::{chern_form, dd_cochain, shat_delta_theta, verify_prop21, verify_prop22};
use ddverify::manifold::Point;
use ddverify::models::heisenberg;
use ddverify::report::to_text;
use ddverify::simplicial::verify_cocycle;

fn main() -> Result<(), Box<dyn Error>> {
    let model = heisenberg::model()?;
    let theta = heisenberg::connection(&model)?;

    let g = Point::new(0, vec![0.5, -1.0]);
    let c1 = chern_form(&model, &theta)?.evaluate(&g, &[vec![1.0, 0.0], vec![0.0, 1.0]])?;
    println!("c₁(θ)(∂x, ∂y) = {c1:.12}");

    let shat = shat_delta_theta(&model, &theta)?;
    let pair = Point::new(0, vec![1.0, 2.0, 3.0, 4.0]);
    for (k, name) in ["dx₁", "dy₁", "dx₂", "dy₂"].iter().enumerate() {
        let mut v = vec![0.0; 4];
        v[k] = 1.0;
        println!("ŝ*(δθ) at ((1,2),(3,4)), coefficient of {name}: {:.10}", shat.evaluate(&pair, &[v])?);
    }

    let dd = dd_cochain(&model, &theta)?;
    let reports = [
        verify_prop21(&model, &theta, 200, 1e-6, 42)?,
        verify_prop22(&model, &theta, 200, 1e-9, 42)?,
        verify_cocycle(&dd, heisenberg::NAME, 200, 1e-6, 42)?,
    ];
    print!("{}", to_text(&reports));
    Ok(())
}
