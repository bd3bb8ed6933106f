//! Face maps of the nerves NG and N̄G for the Heisenberg base ℝ², and the
//! comparison map γ.

use std::error::Error;

use ddverify::manifold::Point;
use ddverify::models::heisenberg;

fn show(p: &Point) -> String {
    format!("{:?}", p.coords)
}

fn main() -> Result<(), Box<dyn Error>> {
    let model = heisenberg::model()?;
    let (ng, nbar) = (model.ng(), model.nbar());

    let g1g2 = Point::new(0, vec![1.0, 2.0, 3.0, 4.0]);
    println!("NG(2) point (g₁, g₂) = {}", show(&g1g2));
    for (i, face) in ng.faces(2)?.iter().enumerate() {
        println!("  ε_{i} → {}", show(&face.eval(&g1g2)?));
    }

    let h = Point::new(0, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    println!("N̄G(2) point (h₀, h₁, h₂) = {}", show(&h));
    for (i, face) in nbar.faces(2)?.iter().enumerate() {
        println!("  ε̄_{i} → {}", show(&face.eval(&h)?));
    }
    println!("  γ → {}", show(&nbar.gamma(2)?.eval(&h)?));

    // ε_i∘γ = γ∘ε̄_i
    for i in 0..=2 {
        let lhs = ng.face(2, i)?.eval(&nbar.gamma(2)?.eval(&h)?)?;
        let rhs = nbar.gamma(1)?.eval(&nbar.face(2, i)?.eval(&h)?)?;
        println!("  ε_{i}∘γ = {}, γ∘ε̄_{i} = {}", show(&lhs), show(&rhs));
    }
    Ok(())
}
