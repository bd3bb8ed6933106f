//! The Heisenberg extension `U(1) → Ĥ → ℝ²`.
//!
//! `Ĥ = U(1) × ℝ²` with coordinates `(φ, x, y)` and product
//! `(φ, x, y)(φ′, x′, y′) = (φ + φ′ + x y′, x + x′, y + y′)`. The global
//! section is `η(x, y) = (0, x, y)` and the connection is `θ = dφ + x dy`,
//! with `dθ = dx ∧ dy`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::RngCore;

use crate::error::Result;
use crate::extension::{circle, CentralExtensionModel, ConnectionForm, ExtensionParts, Patch};
use crate::manifold::{uniform, Chart, ChartedSpace, FormField, Point, SmoothMap};
use crate::simplicial::LieGroup;

pub const NAME: &str = "heisenberg";

/// Half-width of the coordinate boxes.
const BOX: f64 = 100.0;
/// Samples of `ℝ²` are drawn from `[-SPREAD, SPREAD]²`.
pub const SPREAD: f64 = 2.0;

fn plane() -> Result<LieGroup> {
    let g = ChartedSpace::euclidean("ℝ²", 2, BOX, SPREAD);
    let g2 = ChartedSpace::power(&g, 2);
    let (out, out_inv) = (g.clone(), g.clone());
    let multiply = SmoothMap::new("+", g2.clone(), g.clone(), move |p| {
        let c = &p.coords;
        Ok(out.point_at(0, vec![c[0] + c[2], c[1] + c[3]]))
    })
    .with_jacobian(|_| Ok(DMatrix::from_row_slice(2, 4, &[1., 0., 1., 0., 0., 1., 0., 1.])));
    let inverse = SmoothMap::new("−", g.clone(), g.clone(), move |p| {
        Ok(out_inv.point_at(0, vec![-p.coords[0], -p.coords[1]]))
    })
    .with_jacobian(|_| Ok(-DMatrix::identity(2, 2)));
    LieGroup::new(g.clone(), multiply, inverse, Point::new(0, vec![0.0, 0.0]))
}

fn heisenberg_space() -> Result<Arc<ChartedSpace>> {
    ChartedSpace::builder("Ĥ", 3)
        .chart(Chart::new(vec![-PI, -BOX, -BOX], vec![PI, BOX, BOX]))
        .periodic(0, 2.0 * PI)
        .sampler(Arc::new(|rng: &mut dyn RngCore| {
            Point::new(
                0,
                vec![uniform(rng, -PI, PI), uniform(rng, -SPREAD, SPREAD), uniform(rng, -SPREAD, SPREAD)],
            )
        }))
        .build()
}

fn heisenberg_group() -> Result<LieGroup> {
    let h = heisenberg_space()?;
    let h2 = ChartedSpace::power(&h, 2);
    let (out, out_inv) = (h.clone(), h.clone());
    let multiply = SmoothMap::new("·", h2, h.clone(), move |p| {
        let c = &p.coords;
        Ok(out.point_at(0, vec![c[0] + c[3] + c[1] * c[5], c[1] + c[4], c[2] + c[5]]))
    })
    .with_jacobian(|p| {
        let c = &p.coords;
        Ok(DMatrix::from_row_slice(
            3,
            6,
            &[1., c[5], 0., 1., 0., c[1], 0., 1., 0., 0., 1., 0., 0., 0., 1., 0., 0., 1.],
        ))
    });
    let inverse = SmoothMap::new("⁻¹", h.clone(), h.clone(), move |p| {
        let c = &p.coords;
        Ok(out_inv.point_at(0, vec![c[1] * c[2] - c[0], -c[1], -c[2]]))
    })
    .with_jacobian(|p| {
        let c = &p.coords;
        Ok(DMatrix::from_row_slice(3, 3, &[-1., c[2], c[1], 0., -1., 0., 0., 0., -1.]))
    });
    LieGroup::new(h, multiply, inverse, Point::new(0, vec![0.0; 3]))
}

pub fn model() -> Result<CentralExtensionModel> {
    let base = plane()?;
    let total = heisenberg_group()?;
    let (g, h) = (base.space().clone(), total.space().clone());
    let g_out = g.clone();
    let projection = SmoothMap::new("ρ", h.clone(), g.clone(), move |p| {
        Ok(g_out.point_at(0, vec![p.coords[1], p.coords[2]]))
    })
    .with_jacobian(|_| Ok(DMatrix::from_row_slice(2, 3, &[0., 1., 0., 0., 0., 1.])));
    let h_out = h.clone();
    let action = SmoothMap::new(
        "U(1)·",
        ChartedSpace::product(vec![circle(), h.clone()]),
        h.clone(),
        move |p| {
            let c = &p.coords;
            Ok(h_out.point_at(0, vec![c[0] + c[1], c[2], c[3]]))
        },
    )
    .with_jacobian(|_| Ok(DMatrix::from_row_slice(3, 4, &[1., 1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 1.])));
    let h_sec = h.clone();
    let section = SmoothMap::new("η", g.clone(), h.clone(), move |p| {
        Ok(h_sec.point_at(0, vec![0.0, p.coords[0], p.coords[1]]))
    })
    .with_jacobian(|_| Ok(DMatrix::from_row_slice(3, 2, &[0., 0., 1., 0., 0., 1.])));
    CentralExtensionModel::new(ExtensionParts {
        name: NAME.into(),
        base,
        total,
        projection,
        action,
        vertical: Arc::new(|_| vec![1.0, 0.0, 0.0]),
        cover: vec![Patch::new("ℝ²", Arc::new(|_| true), section)],
        kernel_phase: Arc::new(|x: &Point| Ok(x.coords[0])),
    })
}

/// `θ = dφ + x dy`.
pub fn connection(model: &CentralExtensionModel) -> Result<ConnectionForm> {
    let h = model.total().space();
    let curvature = FormField::new("dx∧dy", 2, h, |_, v| Ok(v[0][1] * v[1][2] - v[0][2] * v[1][1]))
        .with_exterior(FormField::zero(3, h));
    let theta = FormField::new("dφ + x dy", 1, h, |p, v| Ok(v[0][0] + p.coords[1] * v[0][2])).with_exterior(curvature);
    ConnectionForm::new(model, theta)
}

/// `β = y dx` on `ℝ²`, used to shift the connection by a basic form.
pub fn basic_shift(model: &CentralExtensionModel) -> FormField {
    let g = model.base().space();
    let d = FormField::new("−dx∧dy", 2, g, |_, v| Ok(v[0][1] * v[1][0] - v[0][0] * v[1][1]));
    FormField::new("y dx", 1, g, |p, v| Ok(p.coords[1] * v[0][0])).with_exterior(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{
        connection_independence, dd_cochain, shat_delta_theta, verify_connection, verify_model, verify_prop21,
        verify_prop22,
    };
    use crate::sampling::{sample_frames, seeded};
    use crate::simplicial::verify_cocycle;

    #[test]
    fn structure_and_connection_hold() {
        let m = model().unwrap();
        let theta = connection(&m).unwrap();
        let r = verify_model(&m, 50, 1e-9, 1).unwrap();
        assert!(r.pass, "{r:?}");
        let r = verify_connection(&m, &theta, 50, 1e-6, 2).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn shat_matches_the_hand_computation() {
        let m = model().unwrap();
        let s = shat_delta_theta(&m, &connection(&m).unwrap()).unwrap();
        let pts = sample_frames(m.base().square(), 30, 1, &mut seeded(3)).unwrap();
        for p in pts {
            let [x1, y1, _x2, y2] = [p.point.coords[0], p.point.coords[1], p.point.coords[2], p.point.coords[3]];
            let v = &p.frame[0];
            let expected = -y2 * v[0] - 2.0 * x1 * v[3] - p.point.coords[2] * v[1];
            let got = s.evaluate(&p.point, &p.frame).unwrap();
            assert!((got - expected).abs() < 1e-8, "{got} vs {expected} at {x1},{y1}");
        }
    }

    #[test]
    fn propositions_and_cocycle() {
        let m = model().unwrap();
        let theta = connection(&m).unwrap();
        let r21 = verify_prop21(&m, &theta, 40, 1e-6, 4).unwrap();
        let r22 = verify_prop22(&m, &theta, 40, 1e-6, 5).unwrap();
        let rc = verify_cocycle(&dd_cochain(&m, &theta).unwrap(), NAME, 40, 1e-6, 6).unwrap();
        eprintln!("{} {} {}", r21.max_residual, r22.max_residual, rc.max_residual);
        assert!(r21.pass && r22.pass && rc.pass, "{r21:?}\n{r22:?}\n{rc:?}");
        let shifted = theta.shifted_by(&m, &basic_shift(&m)).unwrap();
        let r23 = connection_independence(&m, &theta, &shifted, 40, 1e-6, 7).unwrap();
        eprintln!("{}", r23.max_residual);
        assert!(r23.pass, "{r23:?}");
    }
}
