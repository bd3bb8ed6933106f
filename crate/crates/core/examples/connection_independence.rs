//! Shifting θ by a basic form changes the cocycle by an explicit coboundary.

use std::error::Error;

use ddverify::extension::{connection_independence, CONNECTION_SIGN};
use ddverify::models;
use ddverify::report::to_text;

fn main() -> Result<(), Box<dyn Error>> {
    println!("dd(θ₀) − dd(θ₁) = {CONNECTION_SIGN:+}·D(κα), α = η*(θ₀ − θ₁)");
    for (model, theta0, theta1) in models::connection_pairs()? {
        println!("{}: θ₀ = {}, θ₁ = {}", model.name(), theta0.form().label(), theta1.form().label());
        print!("{}", to_text(&[connection_independence(&model, &theta0, &theta1, 200, 1e-6, 42)?]));
    }
    Ok(())
}
