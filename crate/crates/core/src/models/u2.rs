//! `U(1) → U(2) → SO(3)`.
//!
//! `SO(3)` carries the four quaternion charts of [`crate::quat`]. `U(2)` is
//! `(S³ × U(1))/±1`, a pair `(q, t)` standing for `e^{it}·q` with
//! `(q, t) ~ (−q, t + π)`; chart `k` of `U(2)` keeps the representative with
//! `q_k > 0` and the angle `t`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::extension::{circle, CentralExtensionModel, ConnectionForm, ExtensionParts, Patch};
use crate::manifold::{uniform, Chart, ChartedSpace, FormField, Point, SmoothMap};
use crate::quat::{
    best_chart, chart_jacobian, chart_projection, conj, from_chart, in_chart, left_matrix, mul, random_unit,
    right_matrix, rotation, rotation_gradient, to_chart, Quat,
};
use crate::simplicial::LieGroup;

pub const NAME: &str = "u2_so3";

/// Patch `V_k` of the cover is `{|q_k| > COVER_THRESHOLD}`.
pub const COVER_THRESHOLD: f64 = 0.3;

const TAU_A: [f64; 4] = [0.7, -0.4, 0.5, 0.3];
const TAU_B: [f64; 4] = [0.9, 0.6, -0.8, 1.1];

/// The unit quaternion (with positive chart component) of a point of
/// `SO(3)` or `U(2)`.
pub fn quat_at(p: &Point) -> Quat {
    from_chart(p.chart, &p.coords[..3])
}

/// `dq` for a tangent vector whose first three entries are chart coordinates.
pub fn quat_velocity(p: &Point, v: &[f64]) -> Quat {
    let j = chart_jacobian(p.chart, &p.coords[..3]);
    let mut out = [0.0; 4];
    for (r, o) in out.iter_mut().enumerate() {
        *o = (0..3).map(|c| j[(r, c)] * v[c]).sum();
    }
    out
}

fn dot(a: &Quat, b: &Quat) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(chart, coordinates, flipped)` of `±q` in its best chart.
fn normalize(q: &Quat) -> (usize, Vec<f64>, bool) {
    let k = best_chart(q);
    let (v, flip) = to_chart(k, q).expect("best chart always admits the point");
    (k, v, flip)
}

fn sign(flip: bool) -> f64 {
    if flip {
        -1.0
    } else {
        1.0
    }
}

/// `±q` as a point of `SO(3)`.
pub fn so3_point(space: &ChartedSpace, q: &Quat) -> Point {
    let (k, v, _) = normalize(q);
    space.point_at(k, v)
}

/// `e^{it}·q` as a point of `U(2)`.
pub fn u2_point(space: &ChartedSpace, q: &Quat, t: f64) -> Point {
    let (k, mut v, flip) = normalize(q);
    v.push(t + if flip { PI } else { 0.0 });
    space.point_at(k, v)
}

/// `SO(3)` with four quaternion charts.
pub fn so3_space() -> Arc<ChartedSpace> {
    let mut b = ChartedSpace::builder("SO(3)", 3);
    for _ in 0..4 {
        b = b.chart(Chart::new(vec![-1.0; 3], vec![1.0; 3]).with_predicate(Arc::new(in_chart)));
    }
    b.transition(Arc::new(|p: &Point, target| {
        to_chart(target, &quat_at(p)).map(|(v, _)| v)
    }))
    .transition_jacobian(Arc::new(|p: &Point, target| {
        let (_, flip) = to_chart(target, &quat_at(p))?;
        Some(chart_projection(target, sign(flip)) * chart_jacobian(p.chart, &p.coords))
    }))
    .sampler(Arc::new(|rng: &mut dyn RngCore| {
        let (k, v, _) = normalize(&random_unit(rng));
        Point::new(k, v)
    }))
    .build()
    .expect("SO(3) atlas is well formed")
}

/// Quaternion product with analytic Jacobian, rows in the chart of the
/// product's best chart.
fn product_jacobian(p1: &Point, p2: &Point) -> (Quat, DMatrix<f64>) {
    let (q1, q2) = (quat_at(p1), quat_at(p2));
    let q = mul(&q1, &q2);
    let (k, _, flip) = normalize(&q);
    let left = right_matrix(&q2) * chart_jacobian(p1.chart, &p1.coords[..3]);
    let right = left_matrix(&q1) * chart_jacobian(p2.chart, &p2.coords[..3]);
    let mut both = DMatrix::zeros(4, 6);
    both.view_mut((0, 0), (4, 3)).copy_from(&left);
    both.view_mut((0, 3), (4, 3)).copy_from(&right);
    (q, chart_projection(k, sign(flip)) * both)
}

fn conj_jacobian(p: &Point) -> (Quat, DMatrix<f64>) {
    let q = conj(&quat_at(p));
    let (k, _, flip) = normalize(&q);
    let flip_rows = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&[1.0, -1.0, -1.0, -1.0]));
    let j = chart_projection(k, sign(flip)) * flip_rows * chart_jacobian(p.chart, &p.coords[..3]);
    (q, j)
}

pub fn so3_group() -> Result<LieGroup> {
    let g = so3_space();
    let g2 = ChartedSpace::power(&g, 2);
    let (gm, gi, g2m) = (g.clone(), g.clone(), g2.clone());
    let multiply = SmoothMap::new("·", g2.clone(), g.clone(), move |p| {
        let parts = g2m.split(p);
        let (k, v, _) = normalize(&mul(&quat_at(&parts[0]), &quat_at(&parts[1])));
        Ok(gm.point_at(k, v))
    })
    .with_jacobian(move |p| {
        let parts = g2.split(p);
        Ok(product_jacobian(&parts[0], &parts[1]).1)
    });
    let inverse = SmoothMap::new("⁻¹", g.clone(), g.clone(), move |p| {
        let (k, v, _) = normalize(&conj(&quat_at(p)));
        Ok(gi.point_at(k, v))
    })
    .with_jacobian(|p| Ok(conj_jacobian(p).1));
    LieGroup::new(g, multiply, inverse, Point::new(0, vec![0.0; 3]))
}

fn u2_space() -> Result<Arc<ChartedSpace>> {
    let mut b = ChartedSpace::builder("U(2)", 4);
    for _ in 0..4 {
        b = b.chart(
            Chart::new(vec![-1.0, -1.0, -1.0, -PI], vec![1.0, 1.0, 1.0, PI])
                .with_predicate(Arc::new(|c: &[f64]| in_chart(&c[..3]))),
        );
    }
    b.periodic(3, 2.0 * PI)
        .transition(Arc::new(|p: &Point, target| {
            let (mut v, flip) = to_chart(target, &quat_at(p))?;
            v.push(p.coords[3] + if flip { PI } else { 0.0 });
            Some(v)
        }))
        .transition_jacobian(Arc::new(|p: &Point, target| {
            let (_, flip) = to_chart(target, &quat_at(p))?;
            let block = chart_projection(target, sign(flip)) * chart_jacobian(p.chart, &p.coords[..3]);
            let mut j = DMatrix::zeros(4, 4);
            j.view_mut((0, 0), (3, 3)).copy_from(&block);
            j[(3, 3)] = 1.0;
            Some(j)
        }))
        .sampler(Arc::new(|rng: &mut dyn RngCore| {
            let (k, mut v, _) = normalize(&random_unit(rng));
            v.push(uniform(rng, -PI, PI));
            Point::new(k, v)
        }))
        .build()
}

fn u2_group() -> Result<LieGroup> {
    let h = u2_space()?;
    let h2 = ChartedSpace::power(&h, 2);
    let (hm, hi, h2m) = (h.clone(), h.clone(), h2.clone());
    let multiply = SmoothMap::new("·", h2.clone(), h.clone(), move |p| {
        let parts = h2m.split(p);
        let (k, mut v, flip) = normalize(&mul(&quat_at(&parts[0]), &quat_at(&parts[1])));
        v.push(parts[0].coords[3] + parts[1].coords[3] + if flip { PI } else { 0.0 });
        Ok(hm.point_at(k, v))
    })
    .with_jacobian(move |p| {
        let parts = h2.split(p);
        let (a, b) = (&parts[0], &parts[1]);
        let (_, block) = product_jacobian(a, b);
        let mut j = DMatrix::zeros(4, 8);
        j.view_mut((0, 0), (3, 3)).copy_from(&block.view((0, 0), (3, 3)));
        j.view_mut((0, 4), (3, 3)).copy_from(&block.view((0, 3), (3, 3)));
        j[(3, 3)] = 1.0;
        j[(3, 7)] = 1.0;
        Ok(j)
    });
    let inverse = SmoothMap::new("⁻¹", h.clone(), h.clone(), move |p| {
        let (k, mut v, flip) = normalize(&conj(&quat_at(p)));
        v.push(-p.coords[3] + if flip { PI } else { 0.0 });
        Ok(hi.point_at(k, v))
    })
    .with_jacobian(|p| {
        let (_, block) = conj_jacobian(p);
        let mut j = DMatrix::zeros(4, 4);
        j.view_mut((0, 0), (3, 3)).copy_from(&block);
        j[(3, 3)] = -1.0;
        Ok(j)
    });
    LieGroup::new(h, multiply, inverse, Point::new(0, vec![0.0; 4]))
}

fn tau(k: usize, q: &Quat) -> (f64, Quat) {
    let (i, j, l) = ((k + 1) % 4, (k + 2) % 4, (k + 3) % 4);
    let mut grad = [0.0; 4];
    grad[i] = TAU_A[k];
    grad[j] = TAU_B[k] * q[l];
    grad[l] = TAU_B[k] * q[j];
    (TAU_A[k] * q[i] + TAU_B[k] * q[j] * q[l], grad)
}

/// `η_k(g) = (q, τ_k(q))` with `q_k > 0`.
fn section(k: usize, g: &Arc<ChartedSpace>, h: &Arc<ChartedSpace>) -> SmoothMap {
    let out = h.clone();
    SmoothMap::new(format!("η{k}"), g.clone(), h.clone(), move |p| {
        let q = quat_at(p);
        let (mut v, flip) = to_chart(k, &q).ok_or_else(|| out.boundary(k))?;
        let s = sign(flip);
        v.push(tau(k, &q.map(|x| s * x)).0);
        Ok(out.point_at(k, v))
    })
    .with_jacobian(move |p| {
        let q = quat_at(p);
        let s = if q[k] < 0.0 { -1.0 } else { 1.0 };
        let dq = chart_jacobian(p.chart, &p.coords) * s;
        let (_, grad) = tau(k, &q.map(|x| s * x));
        let top = chart_projection(k, 1.0) * &dq;
        let mut j = DMatrix::zeros(4, 3);
        j.view_mut((0, 0), (3, 3)).copy_from(&top);
        for c in 0..3 {
            j[(3, c)] = (0..4).map(|r| grad[r] * dq[(r, c)]).sum();
        }
        Ok(j)
    })
}

pub fn model() -> Result<CentralExtensionModel> {
    let base = so3_group()?;
    let total = u2_group()?;
    let (g, h) = (base.space().clone(), total.space().clone());
    let g_out = g.clone();
    let projection = SmoothMap::new("ρ", h.clone(), g.clone(), move |p| {
        Ok(g_out.point_at(p.chart, p.coords[..3].to_vec()))
    })
    .with_jacobian(|_| Ok(DMatrix::identity(3, 4)));
    let h_out = h.clone();
    let act_src = ChartedSpace::product(vec![circle(), h.clone()]);
    let act_split = act_src.clone();
    let action = SmoothMap::new("U(1)·", act_src, h.clone(), move |p| {
        let parts = act_split.split(p);
        let mut v = parts[1].coords.clone();
        v[3] += parts[0].coords[0];
        Ok(h_out.point_at(parts[1].chart, v))
    })
    .with_jacobian(|_| {
        let mut j = DMatrix::zeros(4, 5);
        j[(3, 0)] = 1.0;
        for i in 0..4 {
            j[(i, i + 1)] = 1.0;
        }
        Ok(j)
    });
    let cover = (0..4)
        .map(|k| {
            Patch::new(
                format!("V{k}"),
                Arc::new(move |p: &Point| quat_at(p)[k].abs() > COVER_THRESHOLD),
                section(k, &g, &h),
            )
        })
        .collect();
    let h_ker = h.clone();
    CentralExtensionModel::new(ExtensionParts {
        name: NAME.into(),
        base,
        total,
        projection,
        action,
        vertical: Arc::new(|_| vec![0.0, 0.0, 0.0, 1.0]),
        cover,
        kernel_phase: Arc::new(move |x: &Point| {
            let x0 = h_ker.express(x, 0).ok_or_else(|| {
                Error::inconsistent(format!("{NAME}: kernel element outside the identity chart"))
            })?;
            Ok(x0.coords[3])
        }),
    })
}

/// `dR_ij` as a function of a point and a chart vector.
fn d_rotation(p: &Point, v: &[f64], i: usize, j: usize) -> f64 {
    dot(&rotation_gradient(&quat_at(p), i, j), &quat_velocity(p, v))
}

/// `θ₀ = dt + ρ*(R₀₁ dR₀₂)`.
pub fn connection(model: &CentralExtensionModel) -> Result<ConnectionForm> {
    let h = model.total().space();
    let curvature = FormField::new("dR₀₁∧dR₀₂", 2, h, |p, v| {
        Ok(d_rotation(p, &v[0], 0, 1) * d_rotation(p, &v[1], 0, 2)
            - d_rotation(p, &v[1], 0, 1) * d_rotation(p, &v[0], 0, 2))
    })
    .with_exterior(FormField::zero(3, h));
    let theta = FormField::new("dt + R₀₁ dR₀₂", 1, h, |p, v| {
        Ok(v[0][3] + rotation(&quat_at(p))[0][1] * d_rotation(p, &v[0], 0, 2))
    })
    .with_exterior(curvature);
    ConnectionForm::new(model, theta)
}

fn smootherstep(x: f64) -> (f64, f64) {
    let x = x.clamp(0.0, 1.0);
    (x * x * x * (x * (6.0 * x - 15.0) + 10.0), 30.0 * x * x * (x - 1.0) * (x - 1.0))
}

/// `β = f(q₀²)·R₁₀ dR₁₂` with `f` a smootherstep from 0.3 to 0.7.
pub fn basic_shift(model: &CentralExtensionModel) -> FormField {
    let g = model.base().space();
    let bump = |p: &Point| smootherstep((quat_at(p)[0].powi(2) - 0.3) / 0.4);
    let coefficient = move |p: &Point, v: &[f64]| {
        let q = quat_at(p);
        let (f, df) = bump(p);
        let r10 = rotation(&q)[1][0];
        let dq0 = quat_velocity(p, v)[0];
        df * 2.0 * q[0] * dq0 / 0.4 * r10 + f * d_rotation(p, v, 1, 0)
    };
    let d = FormField::new("d(f R₁₀)∧dR₁₂", 2, g, move |p, v| {
        Ok(coefficient(p, &v[0]) * d_rotation(p, &v[1], 1, 2) - coefficient(p, &v[1]) * d_rotation(p, &v[0], 1, 2))
    })
    .with_exterior(FormField::zero(3, g));
    FormField::new("f R₁₀ dR₁₂", 1, g, move |p, v| {
        Ok(bump(p).0 * rotation(&quat_at(p))[1][0] * d_rotation(p, &v[0], 1, 2))
    })
    .with_exterior(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{
        connection_independence, dd_cochain, patch_independence, verify_connection, verify_model, verify_prop21,
        verify_prop22,
    };
    use crate::manifold::ext_derivative;
    use crate::sampling::seeded;
    use crate::simplicial::verify_cocycle;

    #[test]
    fn charts_and_maps_are_consistent() {
        let m = model().unwrap();
        let mut rng = seeded(1);
        assert!(m.base().space().transition_roundtrip_residual(50, &mut rng) < 1e-13);
        assert!(m.total().space().transition_roundtrip_residual(50, &mut rng) < 1e-13);
        for map in [m.base().multiply(), m.base().inverse(), m.total().multiply(), m.total().inverse()] {
            for _ in 0..10 {
                let p = map.source().sample(&mut rng);
                let diff = (map.jacobian(&p).unwrap() - map.numeric_jacobian(&p).unwrap()).abs().max();
                assert!(diff < 1e-7, "{}: {diff}", map.name());
            }
        }
        for patch in m.cover() {
            let s = patch.section();
            let p = crate::sampling::sample_where(s.source(), &mut rng, "patch", |g| patch.contains(g)).unwrap();
            let diff = (s.jacobian(&p).unwrap() - s.numeric_jacobian(&p).unwrap()).abs().max();
            assert!(diff < 1e-7, "{}: {diff}", s.name());
        }
    }

    #[test]
    fn structure_and_connection_hold() {
        let m = model().unwrap();
        let theta = connection(&m).unwrap();
        let r = verify_model(&m, 50, 1e-9, 1).unwrap();
        assert!(r.pass, "{r:?}");
        let r = verify_connection(&m, &theta, 50, 1e-6, 2).unwrap();
        assert!(r.pass, "{r:?}");
        let r = patch_independence(&m, &theta, 30, 1e-6, 3).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn analytic_exteriors_match_differences() {
        let m = model().unwrap();
        let theta = connection(&m).unwrap();
        let beta = basic_shift(&m);
        let mut rng = seeded(9);
        for (form, space) in [(theta.form().clone(), m.total().space()), (beta, m.base().space())] {
            let inner = form.clone();
            let raw = FormField::new("raw", 1, space, move |p, v| inner.evaluate(p, v));
            let numeric = ext_derivative(&raw);
            let analytic = ext_derivative(&form);
            for s in crate::sampling::sample_frames(space, 20, 2, &mut rng).unwrap() {
                let a = analytic.evaluate(&s.point, &s.frame).unwrap();
                let b = numeric.evaluate(&s.point, &s.frame).unwrap();
                assert!((a - b).abs() < 1e-8, "{}: {a} vs {b}", form.label());
            }
        }
    }

    #[test]
    fn propositions_and_cocycle() {
        let m = model().unwrap();
        let theta = connection(&m).unwrap();
        let r21 = verify_prop21(&m, &theta, 30, 1e-6, 4).unwrap();
        let r22 = verify_prop22(&m, &theta, 30, 1e-6, 5).unwrap();
        let rc = verify_cocycle(&dd_cochain(&m, &theta).unwrap(), NAME, 30, 1e-6, 6).unwrap();
        eprintln!("{} {} {}", r21.max_residual, r22.max_residual, rc.max_residual);
        assert!(r21.pass && r22.pass && rc.pass, "{r21:?}\n{r22:?}\n{rc:?}");
        let shifted = theta.shifted_by(&m, &basic_shift(&m)).unwrap();
        let r23 = connection_independence(&m, &theta, &shifted, 30, 1e-6, 7).unwrap();
        eprintln!("{}", r23.max_residual);
        assert!(r23.pass, "{r23:?}");
    }
}
