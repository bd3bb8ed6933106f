use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::RngCore;

use crate::error::{Error, Result};

use super::DEFAULT_STEP;

pub type Predicate = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;
pub type TransitionFn = Arc<dyn Fn(&Point, usize) -> Option<Vec<f64>> + Send + Sync>;
pub type TransitionJacobianFn = Arc<dyn Fn(&Point, usize) -> Option<DMatrix<f64>> + Send + Sync>;
pub type SamplerFn = Arc<dyn Fn(&mut dyn RngCore) -> Point + Send + Sync>;

/// A point given by the chart it lives in and its coordinates there.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub chart: usize,
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(chart: usize, coords: Vec<f64>) -> Self {
        Point { chart, coords }
    }
}

/// An open coordinate box, optionally cut down by a membership predicate.
#[derive(Clone)]
pub struct Chart {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    inside: Option<Predicate>,
}

impl Chart {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Chart { lo, hi, inside: None }
    }

    pub fn with_predicate(mut self, inside: Predicate) -> Self {
        self.inside = Some(inside);
        self
    }
}

#[derive(Clone)]
struct Atlas {
    charts: Vec<Chart>,
    periods: Vec<Option<f64>>,
    transition: Option<TransitionFn>,
    transition_jacobian: Option<TransitionJacobianFn>,
    sampler: SamplerFn,
}

#[derive(Clone)]
enum Kind {
    Atlas(Atlas),
    Product {
        factors: Vec<Arc<ChartedSpace>>,
        periods: Vec<Option<f64>>,
    },
}

/// A manifold presented by a finite atlas of coordinate boxes.
///
/// Products are kept factorwise: a chart of `X × Y` is a pair of charts,
/// encoded mixed-radix with the last factor varying fastest, and the
/// coordinates are concatenated.
#[derive(Clone)]
pub struct ChartedSpace {
    name: String,
    dim: usize,
    kind: Kind,
}

impl fmt::Debug for ChartedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartedSpace")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("charts", &self.chart_count())
            .finish()
    }
}

pub struct AtlasBuilder {
    name: String,
    dim: usize,
    charts: Vec<Chart>,
    periods: Vec<Option<f64>>,
    transition: Option<TransitionFn>,
    transition_jacobian: Option<TransitionJacobianFn>,
    sampler: Option<SamplerFn>,
}

impl AtlasBuilder {
    pub fn chart(mut self, chart: Chart) -> Self {
        self.charts.push(chart);
        self
    }

    pub fn periodic(mut self, coord: usize, period: f64) -> Self {
        self.periods[coord] = Some(period);
        self
    }

    pub fn transition(mut self, f: TransitionFn) -> Self {
        self.transition = Some(f);
        self
    }

    pub fn transition_jacobian(mut self, f: TransitionJacobianFn) -> Self {
        self.transition_jacobian = Some(f);
        self
    }

    pub fn sampler(mut self, f: SamplerFn) -> Self {
        self.sampler = Some(f);
        self
    }

    pub fn build(self) -> Result<Arc<ChartedSpace>> {
        if self.charts.is_empty() {
            return Err(Error::contract(format!("{}: atlas has no charts", self.name)));
        }
        for (id, c) in self.charts.iter().enumerate() {
            if c.lo.len() != self.dim || c.hi.len() != self.dim {
                return Err(Error::contract(format!(
                    "{}: chart {id} box has wrong dimension",
                    self.name
                )));
            }
            if c.lo.iter().zip(&c.hi).any(|(l, h)| !(l < h)) {
                return Err(Error::contract(format!("{}: chart {id} box is empty", self.name)));
            }
        }
        let sampler = self
            .sampler
            .ok_or_else(|| Error::contract(format!("{}: atlas needs a sampler", self.name)))?;
        Ok(Arc::new(ChartedSpace {
            name: self.name,
            dim: self.dim,
            kind: Kind::Atlas(Atlas {
                charts: self.charts,
                periods: self.periods,
                transition: self.transition,
                transition_jacobian: self.transition_jacobian,
                sampler,
            }),
        }))
    }
}

impl ChartedSpace {
    pub fn builder(name: impl Into<String>, dim: usize) -> AtlasBuilder {
        AtlasBuilder {
            name: name.into(),
            dim,
            charts: Vec::new(),
            periods: vec![None; dim],
            transition: None,
            transition_jacobian: None,
            sampler: None,
        }
    }

    /// `ℝ^dim` as one chart `(-half_width, half_width)^dim`; samples are drawn
    /// from the smaller cube of half-width `sample_half_width`.
    pub fn euclidean(name: impl Into<String>, dim: usize, half_width: f64, sample_half_width: f64) -> Arc<Self> {
        let sampler: SamplerFn = Arc::new(move |rng: &mut dyn RngCore| {
            let coords = (0..dim)
                .map(|_| uniform(rng, -sample_half_width, sample_half_width))
                .collect();
            Point::new(0, coords)
        });
        Self::builder(name, dim)
            .chart(Chart::new(vec![-half_width; dim], vec![half_width; dim]))
            .sampler(sampler)
            .build()
            .expect("euclidean atlas is well formed")
    }

    /// The one-point manifold, level 0 of the nerve.
    pub fn point() -> Arc<Self> {
        Arc::new(ChartedSpace {
            name: "pt".into(),
            dim: 0,
            kind: Kind::Atlas(Atlas {
                charts: vec![Chart::new(vec![], vec![])],
                periods: vec![],
                transition: None,
                transition_jacobian: None,
                sampler: Arc::new(|_: &mut dyn RngCore| Point::new(0, vec![])),
            }),
        })
    }

    /// A finite set as a 0-dimensional manifold, one chart per element.
    pub fn discrete(name: impl Into<String>, n: usize) -> Arc<Self> {
        assert!(n > 0, "discrete space needs at least one point");
        Arc::new(ChartedSpace {
            name: name.into(),
            dim: 0,
            kind: Kind::Atlas(Atlas {
                charts: vec![Chart::new(vec![], vec![]); n],
                periods: vec![],
                transition: None,
                transition_jacobian: None,
                sampler: Arc::new(move |rng: &mut dyn RngCore| {
                    Point::new((rng.next_u64() % n as u64) as usize, vec![])
                }),
            }),
        })
    }

    pub fn product(factors: Vec<Arc<ChartedSpace>>) -> Arc<Self> {
        if factors.is_empty() {
            return Self::point();
        }
        let dim = factors.iter().map(|f| f.dim).sum();
        let name = factors.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join("×");
        let periods = factors.iter().flat_map(|f| f.periods()).collect();
        Arc::new(ChartedSpace {
            name,
            dim,
            kind: Kind::Product { factors, periods },
        })
    }

    /// `X^p`, with `X^0` the point.
    pub fn power(space: &Arc<ChartedSpace>, p: usize) -> Arc<Self> {
        if p == 0 {
            return Self::point();
        }
        if p == 1 {
            return space.clone();
        }
        let mut s = Self::product(vec![space.clone(); p]);
        if let Some(inner) = Arc::get_mut(&mut s) {
            inner.name = format!("{}^{p}", space.name);
        }
        s
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Two spaces are interchangeable when name and dimension agree.
    pub fn same_as(&self, other: &ChartedSpace) -> bool {
        self.dim == other.dim && self.name == other.name
    }

    pub fn factors(&self) -> Option<&[Arc<ChartedSpace>]> {
        match &self.kind {
            Kind::Product { factors, .. } => Some(factors),
            Kind::Atlas(_) => None,
        }
    }

    pub fn chart_count(&self) -> usize {
        match &self.kind {
            Kind::Atlas(a) => a.charts.len(),
            Kind::Product { factors, .. } => factors.iter().map(|f| f.chart_count()).product(),
        }
    }

    pub fn periods(&self) -> Vec<Option<f64>> {
        match &self.kind {
            Kind::Atlas(a) => a.periods.clone(),
            Kind::Product { periods, .. } => periods.clone(),
        }
    }

    fn period(&self, coord: usize) -> Option<f64> {
        match &self.kind {
            Kind::Atlas(a) => a.periods[coord],
            Kind::Product { periods, .. } => periods[coord],
        }
    }

    /// Splits a product point into its factor points.
    pub fn split(&self, p: &Point) -> Vec<Point> {
        match &self.kind {
            Kind::Atlas(_) => vec![p.clone()],
            Kind::Product { factors, .. } => {
                let mut out = Vec::with_capacity(factors.len());
                let mut chart = p.chart;
                let mut charts = vec![0; factors.len()];
                for (i, f) in factors.iter().enumerate().rev() {
                    let n = f.chart_count();
                    charts[i] = chart % n;
                    chart /= n;
                }
                let mut offset = 0;
                for (f, c) in factors.iter().zip(charts) {
                    out.push(Point::new(c, p.coords[offset..offset + f.dim].to_vec()));
                    offset += f.dim;
                }
                out
            }
        }
    }

    pub fn join(&self, parts: &[Point]) -> Point {
        match &self.kind {
            Kind::Atlas(_) => {
                debug_assert_eq!(parts.len(), 1);
                parts[0].clone()
            }
            Kind::Product { factors, .. } => {
                debug_assert_eq!(parts.len(), factors.len());
                let mut chart = 0;
                let mut coords = Vec::with_capacity(self.dim);
                for (f, part) in factors.iter().zip(parts) {
                    chart = chart * f.chart_count() + part.chart;
                    coords.extend_from_slice(&part.coords);
                }
                Point::new(chart, coords)
            }
        }
    }

    /// Reduces periodic coordinates into their fundamental domain.
    pub fn reduce(&self, p: &mut Point) {
        match &self.kind {
            Kind::Atlas(a) => {
                let chart = &a.charts[p.chart.min(a.charts.len() - 1)];
                for (i, x) in p.coords.iter_mut().enumerate() {
                    if let Some(period) = a.periods[i] {
                        *x = chart.lo[i] + (*x - chart.lo[i]).rem_euclid(period);
                    }
                }
            }
            Kind::Product { factors, .. } => {
                let mut parts = self.split(p);
                for (f, part) in factors.iter().zip(parts.iter_mut()) {
                    f.reduce(part);
                }
                *p = self.join(&parts);
            }
        }
    }

    /// Builds a point, reducing periodic coordinates.
    pub fn point_at(&self, chart: usize, coords: Vec<f64>) -> Point {
        let mut p = Point::new(chart, coords);
        self.reduce(&mut p);
        p
    }

    pub fn contains(&self, p: &Point) -> bool {
        if p.coords.len() != self.dim || p.chart >= self.chart_count() {
            return false;
        }
        match &self.kind {
            Kind::Atlas(a) => {
                let chart = &a.charts[p.chart];
                let in_box = p.coords.iter().enumerate().all(|(i, &x)| {
                    a.periods[i].is_some() || (x > chart.lo[i] && x < chart.hi[i])
                });
                in_box && chart.inside.as_ref().map_or(true, |f| f(&p.coords))
            }
            Kind::Product { factors, .. } => factors
                .iter()
                .zip(self.split(p))
                .all(|(f, part)| f.contains(&part)),
        }
    }

    /// `p + s·v` in the chart of `p`; leaving the chart is a boundary error.
    pub fn shifted(&self, p: &Point, v: &[f64], s: f64) -> Result<Point> {
        let coords = p.coords.iter().zip(v).map(|(x, dx)| x + s * dx).collect();
        let q = self.point_at(p.chart, coords);
        if self.contains(&q) {
            Ok(q)
        } else {
            Err(self.boundary(p.chart))
        }
    }

    pub(crate) fn boundary(&self, chart: usize) -> Error {
        Error::Boundary {
            space: self.name.clone(),
            chart,
        }
    }

    /// Difference `a - b` of coordinate `coord`, wrapped into `(-P/2, P/2]`
    /// for periodic coordinates.
    pub fn coord_delta(&self, coord: usize, a: f64, b: f64) -> f64 {
        let d = a - b;
        match self.period(coord) {
            Some(period) => d - period * (d / period).round(),
            None => d,
        }
    }

    /// Re-expresses `p` in `target` chart, if `p` lies in that chart.
    pub fn express(&self, p: &Point, target: usize) -> Option<Point> {
        if p.chart == target {
            return Some(p.clone());
        }
        match &self.kind {
            Kind::Atlas(a) => {
                let coords = (a.transition.as_ref()?)(p, target)?;
                let q = self.point_at(target, coords);
                self.contains(&q).then_some(q)
            }
            Kind::Product { factors, .. } => {
                let target_parts = self.split(&Point::new(target, vec![0.0; self.dim]));
                let parts = self
                    .split(p)
                    .iter()
                    .zip(factors)
                    .zip(&target_parts)
                    .map(|((part, f), t)| f.express(part, t.chart))
                    .collect::<Option<Vec<_>>>()?;
                Some(self.join(&parts))
            }
        }
    }

    /// Largest coordinate difference between `a` and `b`, read in a common
    /// chart; infinite when neither point can be moved to the other's chart.
    pub fn distance(&self, a: &Point, b: &Point) -> f64 {
        let (x, y) = match self.express(b, a.chart) {
            Some(b) => (a.clone(), b),
            None => match self.express(a, b.chart) {
                Some(a) => (a, b.clone()),
                None => return f64::INFINITY,
            },
        };
        (0..self.dim)
            .map(|i| self.coord_delta(i, x.coords[i], y.coords[i]).abs())
            .fold(0.0, f64::max)
    }

    /// Jacobian of the change of coordinates from `p.chart` to `target` at `p`.
    pub fn transition_jacobian(&self, p: &Point, target: usize) -> Result<DMatrix<f64>> {
        if p.chart == target {
            return Ok(DMatrix::identity(self.dim, self.dim));
        }
        match &self.kind {
            Kind::Atlas(a) => {
                if let Some(jac) = &a.transition_jacobian {
                    return jac(p, target).ok_or_else(|| self.boundary(target));
                }
                self.numeric_transition_jacobian(p, target)
            }
            Kind::Product { factors, .. } => {
                let target_parts = self.split(&Point::new(target, vec![0.0; self.dim]));
                let mut out = DMatrix::zeros(self.dim, self.dim);
                let mut offset = 0;
                for ((part, f), t) in self.split(p).iter().zip(factors).zip(&target_parts) {
                    let block = f.transition_jacobian(part, t.chart)?;
                    out.view_mut((offset, offset), (f.dim, f.dim)).copy_from(&block);
                    offset += f.dim;
                }
                Ok(out)
            }
        }
    }

    fn numeric_transition_jacobian(&self, p: &Point, target: usize) -> Result<DMatrix<f64>> {
        self.express(p, target).ok_or_else(|| self.boundary(target))?;
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            let mut e = vec![0.0; self.dim];
            e[j] = 1.0;
            let col = richardson_vec(DEFAULT_STEP, |s| {
                let plus = self.shifted(p, &e, s)?;
                let minus = self.shifted(p, &e, -s)?;
                let a = self.express(&plus, target).ok_or_else(|| self.boundary(target))?;
                let b = self.express(&minus, target).ok_or_else(|| self.boundary(target))?;
                Ok((0..self.dim)
                    .map(|i| self.coord_delta(i, a.coords[i], b.coords[i]) / (2.0 * s))
                    .collect())
            })?;
            for i in 0..self.dim {
                out[(i, j)] = col[i];
            }
        }
        Ok(out)
    }

    /// Re-expresses a point together with tangent vectors in another chart.
    pub fn to_chart(&self, p: &Point, vectors: &[Vec<f64>], target: usize) -> Result<(Point, Vec<Vec<f64>>)> {
        if p.chart == target {
            return Ok((p.clone(), vectors.to_vec()));
        }
        let q = self.express(p, target).ok_or_else(|| self.boundary(target))?;
        let jac = self.transition_jacobian(p, target)?;
        let vs = vectors.iter().map(|v| mat_vec(&jac, v)).collect();
        Ok((q, vs))
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> Point {
        match &self.kind {
            Kind::Atlas(a) => (a.sampler)(rng),
            Kind::Product { factors, .. } => {
                let parts: Vec<Point> = factors.iter().map(|f| f.sample(rng)).collect();
                self.join(&parts)
            }
        }
    }

    /// Largest round-trip error `chart a → chart b → chart a` over sampled
    /// points and every chart they can be moved to.
    pub fn transition_roundtrip_residual(&self, samples: usize, rng: &mut dyn RngCore) -> f64 {
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let p = self.sample(rng);
            for target in 0..self.chart_count() {
                let Some(q) = self.express(&p, target) else { continue };
                let Some(back) = self.express(&q, p.chart) else { continue };
                for i in 0..self.dim {
                    worst = worst.max(self.coord_delta(i, back.coords[i], p.coords[i]).abs());
                }
            }
        }
        worst
    }
}

pub(crate) fn uniform(rng: &mut dyn RngCore, lo: f64, hi: f64) -> f64 {
    let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    lo + (hi - lo) * u
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    debug_assert_eq!(m.ncols(), v.len());
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// One Richardson step on a central difference: `(4·D(h/2) − D(h)) / 3`.
pub(crate) fn richardson(h: f64, mut diff: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let coarse = diff(h)?;
    let fine = diff(h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

pub(crate) fn richardson_vec(h: f64, mut diff: impl FnMut(f64) -> Result<Vec<f64>>) -> Result<Vec<f64>> {
    let coarse = diff(h)?;
    let fine = diff(h / 2.0)?;
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn circle() -> Arc<ChartedSpace> {
        ChartedSpace::builder("S1", 1)
            .chart(Chart::new(vec![-std::f64::consts::PI], vec![std::f64::consts::PI]))
            .periodic(0, 2.0 * std::f64::consts::PI)
            .sampler(Arc::new(|rng: &mut dyn RngCore| Point::new(0, vec![uniform(rng, -3.0, 3.0)])))
            .build()
            .unwrap()
    }

    #[test]
    fn periodic_coordinates_reduce() {
        let s = circle();
        let p = s.point_at(0, vec![3.0 * std::f64::consts::PI]);
        assert!((p.coords[0] + std::f64::consts::PI).abs() < 1e-12);
        assert!((s.coord_delta(0, 3.1, -3.1) - (6.2 - 2.0 * std::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn product_split_join_roundtrip() {
        let d = ChartedSpace::discrete("D", 3);
        let r = ChartedSpace::euclidean("R", 2, 10.0, 1.0);
        let prod = ChartedSpace::product(vec![d.clone(), r.clone(), d.clone()]);
        assert_eq!(prod.chart_count(), 9);
        assert_eq!(prod.dim(), 2);
        let p = Point::new(7, vec![0.5, -0.25]);
        let parts = prod.split(&p);
        assert_eq!(parts[0].chart, 2);
        assert_eq!(parts[2].chart, 1);
        assert_eq!(prod.join(&parts), p);
    }

    #[test]
    fn shifting_out_of_the_box_is_a_boundary_error() {
        let r = ChartedSpace::euclidean("R", 1, 1.0, 0.5);
        let p = Point::new(0, vec![0.99995]);
        match r.shifted(&p, &[1.0], 1e-4) {
            Err(Error::Boundary { chart, .. }) => assert_eq!(chart, 0),
            other => panic!("expected boundary error, got {other:?}"),
        }
    }

    #[test]
    fn empty_box_is_rejected() {
        let err = ChartedSpace::builder("bad", 1)
            .chart(Chart::new(vec![1.0], vec![1.0]))
            .sampler(Arc::new(|_: &mut dyn RngCore| Point::new(0, vec![1.0])))
            .build();
        assert!(err.is_err());
    }

    #[test]
    fn power_zero_is_a_point() {
        let r = ChartedSpace::euclidean("R", 2, 10.0, 1.0);
        let p0 = ChartedSpace::power(&r, 0);
        assert_eq!(p0.dim(), 0);
        let p3 = ChartedSpace::power(&r, 3);
        assert_eq!(p3.dim(), 6);
        assert_eq!(p3.name(), "R^3");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(p3.contains(&p3.sample(&mut rng)));
    }
}
