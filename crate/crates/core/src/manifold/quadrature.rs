use std::f64::consts::PI;
use std::sync::Arc;

use rand::RngCore;

use crate::error::{Error, Result};

use super::form::FormField;
use super::map::SmoothMap;
use super::space::{mat_vec, uniform, Chart, ChartedSpace, Point};

pub const DEFAULT_NODES: usize = 16;

/// Relative disagreement between two node counts above which the result is
/// flagged as unconverged.
const CONVERGENCE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubeIntegral {
    pub value: f64,
    /// False when doubling the node count moved the value beyond tolerance.
    pub converged: bool,
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// The parameter cube `[0,1]^q`, charted with some slack around it so that
/// differencing stencils at quadrature nodes stay inside the chart.
pub fn cube_space(q: usize) -> Arc<ChartedSpace> {
    ChartedSpace::builder(format!("I^{q}"), q)
        .chart(Chart::new(vec![-0.5; q], vec![1.5; q]))
        .sampler(Arc::new(move |rng: &mut dyn RngCore| {
            Point::new(0, (0..q).map(|_| uniform(rng, 0.0, 1.0)).collect())
        }))
        .build()
        .expect("cube atlas is well formed")
}

/// `∫_{[0,1]^q} σ*ω` by tensor-product Gauss–Legendre quadrature.
pub fn integrate_cube(omega: &FormField, sigma: &SmoothMap, nodes: usize) -> Result<CubeIntegral> {
    let q = omega.degree();
    if sigma.source().dim() != q {
        return Err(Error::contract(format!(
            "integrate_cube: parameter domain has dimension {}, form has degree {q}",
            sigma.source().dim()
        )));
    }
    if !sigma.target().same_as(omega.base()) {
        return Err(Error::contract("integrate_cube: σ does not land in the form's base"));
    }
    if q == 0 {
        let image = sigma.eval(&Point::new(0, vec![]))?;
        return Ok(CubeIntegral {
            value: omega.evaluate(&image, &[])?,
            converged: true,
        });
    }
    let coarse = tensor_quadrature(omega, sigma, nodes)?;
    let fine = tensor_quadrature(omega, sigma, 2 * nodes)?;
    Ok(CubeIntegral {
        value: coarse,
        converged: (coarse - fine).abs() <= CONVERGENCE_TOL * fine.abs().max(1.0),
    })
}

fn tensor_quadrature(omega: &FormField, sigma: &SmoothMap, n: usize) -> Result<f64> {
    let q = omega.degree();
    let (x, w) = gauss_legendre(n);
    let mut index = vec![0usize; q];
    let mut total = 0.0;
    loop {
        let u: Vec<f64> = index.iter().map(|&i| x[i]).collect();
        let weight: f64 = index.iter().map(|&i| w[i]).product();
        let p = Point::new(0, u);
        let jac = sigma.jacobian(&p)?;
        let frame: Vec<Vec<f64>> = (0..q)
            .map(|k| {
                let mut e = vec![0.0; q];
                e[k] = 1.0;
                mat_vec(&jac, &e)
            })
            .collect();
        total += weight * omega.evaluate(&sigma.eval(&p)?, &frame)?;
        // odometer increment
        let mut k = 0;
        loop {
            if k == q {
                return Ok(total);
            }
            index[k] += 1;
            if index[k] < n {
                break;
            }
            index[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::form::{ext_derivative, scale, wedge};

    #[test]
    fn weights_sum_to_one_and_integrate_polynomials() {
        for n in [1, 2, 5, 16, 32] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            // exact up to degree 2n-1
            let deg = 2 * n - 1;
            let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((integral - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn unit_square_area() {
        let plane = ChartedSpace::euclidean("R2", 2, 100.0, 2.0);
        let cube = cube_space(2);
        let sigma = SmoothMap::new("incl", cube, plane.clone(), |p| Ok(p.clone()));
        let area = wedge(
            &FormField::coordinate_differential(&plane, 0),
            &FormField::coordinate_differential(&plane, 1),
        )
        .unwrap();
        let r = integrate_cube(&area, &sigma, DEFAULT_NODES).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.converged);
        let kappa = -1.0 / (2.0 * PI);
        let r = integrate_cube(&scale(kappa, &area), &sigma, DEFAULT_NODES).unwrap();
        assert!((r.value - kappa).abs() < 1e-10);
    }

    #[test]
    fn circle_angle_form_integrates_to_two_pi() {
        let circle = ChartedSpace::builder("S1", 1)
            .chart(Chart::new(vec![-PI], vec![PI]))
            .periodic(0, 2.0 * PI)
            .sampler(Arc::new(|rng: &mut dyn RngCore| Point::new(0, vec![uniform(rng, -PI, PI)])))
            .build()
            .unwrap();
        let c2 = circle.clone();
        let sigma = SmoothMap::new("loop", cube_space(1), circle.clone(), move |p| {
            Ok(c2.point_at(0, vec![2.0 * PI * p.coords[0]]))
        });
        let dphi = FormField::coordinate_differential(&circle, 0);
        let r = integrate_cube(&dphi, &sigma, DEFAULT_NODES).unwrap();
        assert!((r.value - 2.0 * PI).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn zero_degree_evaluates_at_the_image_point() {
        let plane = ChartedSpace::euclidean("R2", 2, 100.0, 2.0);
        let f = FormField::new("x+y", 0, &plane, |p, _| Ok(p.coords[0] + p.coords[1]));
        let sigma = SmoothMap::new("pt", ChartedSpace::point(), plane.clone(), |_| Ok(Point::new(0, vec![1.5, 2.0])));
        let r = integrate_cube(&f, &sigma, 4).unwrap();
        assert_eq!(r.value, 3.5);
    }

    #[test]
    fn stokes_on_the_square() {
        let plane = ChartedSpace::euclidean("R2", 2, 100.0, 2.0);
        let omega = FormField::new("ω", 1, &plane, |p, v| {
            let (x, y) = (p.coords[0], p.coords[1]);
            Ok((x * y).sin() * v[0][0] + (x * x * y + y.exp()) * v[0][1])
        });
        let sigma = SmoothMap::new("incl", cube_space(2), plane.clone(), |p| Ok(p.clone()));
        let interior = integrate_cube(&ext_derivative(&omega), &sigma, DEFAULT_NODES).unwrap().value;
        let edge = |start: [f64; 2], dir: [f64; 2]| {
            SmoothMap::new("edge", cube_space(1), plane.clone(), move |p| {
                let t = p.coords[0];
                Ok(Point::new(0, vec![start[0] + t * dir[0], start[1] + t * dir[1]]))
            })
        };
        let boundary: f64 = [
            (edge([0.0, 0.0], [1.0, 0.0]), 1.0),
            (edge([1.0, 0.0], [0.0, 1.0]), 1.0),
            (edge([0.0, 1.0], [1.0, 0.0]), -1.0),
            (edge([0.0, 0.0], [0.0, 1.0]), -1.0),
        ]
        .iter()
        .map(|(e, sign)| sign * integrate_cube(&omega, e, DEFAULT_NODES).unwrap().value)
        .sum();
        assert!((interior - boundary).abs() < 1e-8, "{interior} vs {boundary}");
    }
}
