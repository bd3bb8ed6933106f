//! A finite central extension seen as a 0-dimensional Lie group extension
//! by `U(1)`.
//!
//! `G` is discrete with one chart per element. `Ĝ = G × U(1)` has one
//! circle chart per element of `G` and product
//! `(g, φ)(g′, φ′) = (gg′, φ + φ′ + 2π c(g,g′)/n)`, where `c` is the section
//! cocycle; `η(g) = (g, 0)` and `θ = dφ`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::extension::{circle, CentralExtensionModel, ConnectionForm, ExtensionParts, Patch};
use crate::manifold::{uniform, Chart, ChartedSpace, FormField, Point, SmoothMap};
use crate::simplicial::LieGroup;

use super::finite::FiniteCentralExtension;

fn base_group(ext: &FiniteCentralExtension) -> Result<LieGroup> {
    let table = ext.base().clone();
    let n = table.order();
    let g = ChartedSpace::discrete(format!("G[{}]", ext.name()), n);
    let g2 = ChartedSpace::power(&g, 2);
    let t1 = table.clone();
    let multiply = SmoothMap::new("·", g2, g.clone(), move |p| Ok(Point::new(t1.mul(p.chart / n, p.chart % n), vec![])))
        .with_jacobian(|_| Ok(DMatrix::zeros(0, 0)));
    let t2 = table.clone();
    let inverse = SmoothMap::new("⁻¹", g.clone(), g.clone(), move |p| Ok(Point::new(t2.inv(p.chart), vec![])))
        .with_jacobian(|_| Ok(DMatrix::zeros(0, 0)));
    LieGroup::new(g, multiply, inverse, Point::new(table.identity(), vec![]))
}

fn total_group(ext: &FiniteCentralExtension) -> Result<LieGroup> {
    let table = ext.base().clone();
    let n = table.order();
    let cocycle = ext.section_cocycle()?;
    let turn = 2.0 * PI / ext.modulus() as f64;
    let mut builder = ChartedSpace::builder(format!("Ĝ[{}]", ext.name()), 1);
    for _ in 0..n {
        builder = builder.chart(Chart::new(vec![-PI], vec![PI]));
    }
    let h = builder
        .periodic(0, 2.0 * PI)
        .sampler(Arc::new(move |rng: &mut dyn RngCore| {
            Point::new((rng.next_u64() % n as u64) as usize, vec![uniform(rng, -PI, PI)])
        }))
        .build()?;
    let h2 = ChartedSpace::power(&h, 2);
    let (hm, t1, c1) = (h.clone(), table.clone(), cocycle.clone());
    let multiply = SmoothMap::new("·", h2, h.clone(), move |p| {
        let (a, b) = (p.chart / n, p.chart % n);
        let phase = p.coords[0] + p.coords[1] + turn * c1.get(&[a, b]) as f64;
        Ok(hm.point_at(t1.mul(a, b), vec![phase]))
    })
    .with_jacobian(|_| Ok(DMatrix::from_row_slice(1, 2, &[1.0, 1.0])));
    let (hi, t2) = (h.clone(), table.clone());
    let inverse = SmoothMap::new("⁻¹", h.clone(), h.clone(), move |p| {
        let a = p.chart;
        let b = t2.inv(a);
        Ok(hi.point_at(b, vec![-p.coords[0] - turn * cocycle.get(&[a, b]) as f64]))
    })
    .with_jacobian(|_| Ok(DMatrix::from_row_slice(1, 1, &[-1.0])));
    LieGroup::new(h, multiply, inverse, Point::new(table.identity(), vec![0.0]))
}

/// The 0-dimensional model of a finite extension and the connection `dφ`.
pub fn discrete_model(ext: &FiniteCentralExtension) -> Result<(CentralExtensionModel, ConnectionForm)> {
    let base = base_group(ext)?;
    let total = total_group(ext)?;
    let (g, h) = (base.space().clone(), total.space().clone());
    let projection = SmoothMap::new("ρ", h.clone(), g.clone(), |p| Ok(Point::new(p.chart, vec![])))
        .with_jacobian(|_| Ok(DMatrix::zeros(0, 1)));
    let act_src = ChartedSpace::product(vec![circle(), h.clone()]);
    let h_act = h.clone();
    let action = SmoothMap::new("U(1)·", act_src, h.clone(), move |p| {
        Ok(h_act.point_at(p.chart, vec![p.coords[0] + p.coords[1]]))
    })
    .with_jacobian(|_| Ok(DMatrix::from_row_slice(1, 2, &[1.0, 1.0])));
    let section = SmoothMap::new("η", g.clone(), h.clone(), |p| Ok(Point::new(p.chart, vec![0.0])))
        .with_jacobian(|_| Ok(DMatrix::zeros(1, 0)));
    let identity = ext.base().identity();
    let model = CentralExtensionModel::new(ExtensionParts {
        name: ext.name().to_string(),
        base,
        total,
        projection,
        action,
        vertical: Arc::new(|_| vec![1.0]),
        cover: vec![Patch::new("G", Arc::new(|_| true), section)],
        kernel_phase: Arc::new(move |x: &Point| {
            if x.chart != identity {
                return Err(Error::inconsistent(format!("kernel element lies over {} ≠ e", x.chart)));
            }
            Ok(x.coords[0])
        }),
    })?;
    let theta = FormField::new("dφ", 1, model.total().space(), |_, v| Ok(v[0][0]))
        .with_exterior(FormField::zero(2, model.total().space()));
    let theta = ConnectionForm::new(&model, theta)?;
    Ok((model, theta))
}
