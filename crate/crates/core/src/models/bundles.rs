//! Principal bundles presented by transition functions, with chosen lifts.
//!
//! Both bundles are coboundaries `g_{αβ} = h_α h_β⁻¹`; the lifts carry an
//! extra phase `e^{i w_{αβ}}`, which makes `c_{αβγ}` a nonconstant function.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::RngCore;

use crate::cech::{wrap_angle, BundleData, CoveredBase};
use crate::error::{Error, Result};
use crate::extension::{CentralExtensionModel, PointPredicate};
use crate::manifold::{uniform, Chart, ChartedSpace, Point, SmoothMap};
use crate::models::{heisenberg, u2};
use crate::quat::{axis_angle, conj, mul, Quat};

pub const SO3_NAME: &str = "so3_coboundary";
pub const TORUS_NAME: &str = "heisenberg_torus";

/// `U_α = {|q_α| > SO3_COVER}` on `SO(3)`.
pub const SO3_COVER: f64 = 0.25;

fn rotations() -> [Quat; 4] {
    [
        axis_angle([1.0, 0.0, 0.0], 0.4),
        axis_angle([0.0, 1.0, 0.0], 1.1),
        axis_angle([1.0, 1.0, 0.0], -0.7),
        axis_angle([0.3, -1.0, 2.0], 2.0),
    ]
}

fn lift_phase(a: usize, b: usize, q: &Quat) -> f64 {
    if a == b {
        return 0.0;
    }
    let w = 0.3 + 0.1 * (a + 2 * b) as f64;
    let v = 0.2 * (a as f64 - b as f64);
    w * q[a] * q[b] + v * q[0] * q[3]
}

fn expect_model(model: &CentralExtensionModel, name: &str) -> Result<()> {
    if model.name() == name {
        Ok(())
    } else {
        Err(Error::contract(format!("bundle needs the {name} extension, got {}", model.name())))
    }
}

/// The bundle `g_{αβ}(m) = m r_α r_β⁻¹ m⁻¹` over `SO(3)` with lifts
/// `ĥ_α ĥ_β⁻¹ e^{i w_{αβ}}`, `ĥ_α = q^{(α)} r_α` where `q^{(α)}` is the
/// representative of `m` with `q_α > 0`.
pub fn so3_coboundary(model: &CentralExtensionModel) -> Result<BundleData> {
    expect_model(model, u2::NAME)?;
    let m = u2::so3_space();
    let members: Vec<(String, PointPredicate)> = (0..4)
        .map(|k| {
            let pred: PointPredicate = Arc::new(move |p: &Point| u2::quat_at(p)[k].abs() > SO3_COVER);
            (format!("U{k}"), pred)
        })
        .collect();
    let base = CoveredBase::new(m.clone(), members)?;
    let r = rotations();
    let (g, h) = (model.base().space().clone(), model.total().space().clone());
    let mut transitions = Vec::new();
    let mut lifts = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            let rab = mul(&r[a], &conj(&r[b]));
            let g_out = g.clone();
            transitions.push(SmoothMap::new(format!("g{a}{b}"), m.clone(), g.clone(), move |p| {
                let q = u2::quat_at(p);
                Ok(u2::so3_point(&g_out, &mul(&mul(&q, &rab), &conj(&q))))
            }));
            let h_out = h.clone();
            lifts.push(SmoothMap::new(format!("ĝ{a}{b}"), m.clone(), h.clone(), move |p| {
                let q = u2::quat_at(p);
                let s = q[a].signum() * q[b].signum();
                let big = mul(&mul(&q, &rab), &conj(&q)).map(|x| s * x);
                Ok(u2::u2_point(&h_out, &big, lift_phase(a, b, &q)))
            }));
        }
    }
    Ok(BundleData::new(SO3_NAME, base, transitions, lifts)?.with_gauge_probe(|p| {
        let q = u2::quat_at(p);
        0.8 * q[0] * q[1] + 0.5 * q[2] * q[2]
    }))
}

/// The flat torus `(ℝ/2πℤ)²`.
pub fn torus() -> Arc<ChartedSpace> {
    ChartedSpace::builder("T²", 2)
        .chart(Chart::new(vec![-PI, -PI], vec![PI, PI]))
        .periodic(0, 2.0 * PI)
        .periodic(1, 2.0 * PI)
        .sampler(Arc::new(|rng: &mut dyn RngCore| Point::new(0, vec![uniform(rng, -PI, PI), uniform(rng, -PI, PI)])))
        .build()
        .expect("torus atlas is well formed")
}

fn torus_center(alpha: usize) -> f64 {
    2.0 * PI * alpha as f64 / 3.0
}

/// `h_α: U_α → ℝ²`, smooth on `U_α` through the local angle.
fn torus_h(alpha: usize, p: &Point) -> [f64; 2] {
    let phi = wrap_angle(p.coords[0] - torus_center(alpha));
    let y = p.coords[1];
    [0.5 * phi + 0.2 * y.sin(), 0.3 * phi * phi - 0.4 * y.cos()]
}

/// The Heisenberg-valued bundle `g_{αβ} = h_α − h_β` over `T²` with
/// `U_α = {cos(x − 2πα/3) > −0.7}` and lifts `η(g_{αβ})·e^{i w_{αβ}}`.
pub fn heisenberg_torus(model: &CentralExtensionModel) -> Result<BundleData> {
    expect_model(model, heisenberg::NAME)?;
    let t2 = torus();
    let members: Vec<(String, PointPredicate)> = (0..3)
        .map(|a| {
            let pred: PointPredicate = Arc::new(move |p: &Point| (p.coords[0] - torus_center(a)).cos() > -0.7);
            (format!("U{a}"), pred)
        })
        .collect();
    let base = CoveredBase::new(t2.clone(), members)?;
    let (g, h) = (model.base().space().clone(), model.total().space().clone());
    let mut transitions = Vec::new();
    let mut lifts = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            let g_out = g.clone();
            let diff = move |p: &Point| {
                let (ha, hb) = (torus_h(a, p), torus_h(b, p));
                [ha[0] - hb[0], ha[1] - hb[1]]
            };
            transitions.push(SmoothMap::new(format!("g{a}{b}"), t2.clone(), g.clone(), move |p| {
                Ok(g_out.point_at(0, diff(p).to_vec()))
            }));
            let h_out = h.clone();
            let w = if a == b { 0.0 } else { 0.2 + 0.15 * (2 * a + b) as f64 };
            lifts.push(SmoothMap::new(format!("ĝ{a}{b}"), t2.clone(), h.clone(), move |p| {
                let [x, y] = diff(p);
                let phase = w * (p.coords[0] + (b as f64) * p.coords[1]).sin();
                Ok(h_out.point_at(0, vec![phase, x, y]))
            }));
        }
    }
    BundleData::new(TORUS_NAME, base, transitions, lifts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::{verify_cech_forms, verify_thm31};

    #[test]
    fn both_bundles_satisfy_the_comparison() {
        let hm = heisenberg::model().unwrap();
        let um = u2::model().unwrap();
        let cases = [
            (heisenberg_torus(&hm).unwrap(), hm.clone(), heisenberg::connection(&hm).unwrap()),
            (so3_coboundary(&um).unwrap(), um.clone(), u2::connection(&um).unwrap()),
        ];
        for (bundle, model, theta) in cases {
            let r = verify_thm31(&bundle, &model, &theta, 30, 1e-6, 21).unwrap();
            for id in &r.breakdown {
                eprintln!("{} {} {:e}", bundle.name(), id.name, id.max);
            }
            assert!(r.pass, "{r:?}");
            let f = verify_cech_forms(&bundle, &model, &theta, 20, 1e-6, 22).unwrap();
            assert!(f.pass, "{f:?}");
        }
    }
}
