//! Exterior derivative, wedge, pullback and cube integration on the plane.

use std::error::Error;

use ddverify::manifold::{
    cube_space, ext_derivative, integrate_cube, pullback, scale, wedge, ChartedSpace, FormField, Point, SmoothMap,
    DEFAULT_NODES, KAPPA,
};

fn main() -> Result<(), Box<dyn Error>> {
    let plane = ChartedSpace::euclidean("ℝ²", 2, 100.0, 2.0);
    let x_dy = FormField::new("x dy", 1, &plane, |p, v| Ok(p.coords[0] * v[0][1]));
    let p = Point::new(0, vec![0.3, 0.7]);
    let e = [vec![1.0, 0.0], vec![0.0, 1.0]];
    println!("d(x dy)(e₁, e₂) at (0.3, 0.7) = {:.12}", ext_derivative(&x_dy).evaluate(&p, &e)?);

    let dx = FormField::coordinate_differential(&plane, 0);
    let dy = FormField::coordinate_differential(&plane, 1);
    let area = wedge(&dx, &dy)?;
    println!("(dx∧dy)(e₁, e₂) = {}", area.evaluate(&p, &e)?);
    println!("(dx∧dx)(e₁, e₂) = {}", wedge(&dx, &dx)?.evaluate(&p, &e)?);

    // polar coordinates pull dx∧dy back to r dr∧dθ
    let target = plane.clone();
    let polar = SmoothMap::new("polar", plane.clone(), plane.clone(), move |q| {
        let (r, t) = (q.coords[0], q.coords[1]);
        Ok(target.point_at(0, vec![r * t.cos(), r * t.sin()]))
    });
    let q = Point::new(0, vec![1.5, 0.4]);
    println!("polar*(dx∧dy)(∂r, ∂θ) at r = 1.5: {:.10}", pullback(&polar, &area)?.evaluate(&q, &e)?);

    let square = SmoothMap::new("incl", cube_space(2), plane.clone(), |q| Ok(q.clone()));
    let integral = integrate_cube(&scale(KAPPA, &area), &square, DEFAULT_NODES)?;
    println!("∫ κ dx∧dy over [0,1]² = {:.15} (κ = {KAPPA:.15}), converged: {}", integral.value, integral.converged);
    Ok(())
}
