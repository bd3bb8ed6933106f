//! The nerve `NG` of a Lie group, its universal-bundle analogue `N̄G`, and
//! the double complex of forms on their levels.
//!
//! `NG(p) = G^p` with faces
//! `ε_0(g_1,…,g_p) = (g_2,…,g_p)`, `ε_i = (…, g_i g_{i+1}, …)`,
//! `ε_p = (g_1,…,g_{p−1})`.
//! `N̄G(p) = G^{p+1}` with `ε̄_i` deleting the `i`-th entry (0-based) and
//! `γ(h_1,…,h_{p+1}) = (h_1 h_2^{−1}, …, h_p h_{p+1}^{−1})`.
//!
//! A bigraded cochain of total degree `n` has components `c_p ∈ Ω^{n−p}(X_p)`;
//! `D = d′ + d″` with `d′ = Σ (−1)^i ε_i*` and `d″ = (−1)^p d` on level `p`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::manifold::{ext_derivative, linear_combine, pullback, scale, ChartedSpace, FormField, Point, SmoothMap};
use crate::report::{ReportBuilder, Tolerance, VerificationReport};
use crate::sampling::{residuals, sample_frames, seeded, Sample};

/// Highest level that is ever materialized.
pub const MAX_LEVEL: usize = 4;

/// A Lie group presented on a charted space.
#[derive(Clone)]
pub struct LieGroup {
    space: Arc<ChartedSpace>,
    square: Arc<ChartedSpace>,
    multiply: SmoothMap,
    inverse: SmoothMap,
    identity: Point,
}

impl fmt::Debug for LieGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LieGroup({})", self.space.name())
    }
}

impl LieGroup {
    pub fn new(space: Arc<ChartedSpace>, multiply: SmoothMap, inverse: SmoothMap, identity: Point) -> Result<Self> {
        let square = ChartedSpace::power(&space, 2);
        if !multiply.source().same_as(&square) || !multiply.target().same_as(&space) {
            return Err(Error::contract(format!("{}: multiplication must map G×G → G", space.name())));
        }
        if !inverse.source().same_as(&space) || !inverse.target().same_as(&space) {
            return Err(Error::contract(format!("{}: inverse must map G → G", space.name())));
        }
        if !space.contains(&identity) {
            return Err(Error::contract(format!("{}: identity is not a point of G", space.name())));
        }
        Ok(LieGroup {
            space,
            square,
            multiply,
            inverse,
            identity,
        })
    }

    pub fn space(&self) -> &Arc<ChartedSpace> {
        &self.space
    }

    /// `G × G`, the source of the multiplication.
    pub fn square(&self) -> &Arc<ChartedSpace> {
        &self.square
    }

    pub fn multiply(&self) -> &SmoothMap {
        &self.multiply
    }

    pub fn inverse(&self) -> &SmoothMap {
        &self.inverse
    }

    pub fn identity(&self) -> &Point {
        &self.identity
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn pair(&self, a: &Point, b: &Point) -> Point {
        self.square.join(&[a.clone(), b.clone()])
    }

    pub fn mul(&self, a: &Point, b: &Point) -> Result<Point> {
        self.multiply.eval(&self.pair(a, b))
    }

    pub fn inv(&self, a: &Point) -> Result<Point> {
        self.inverse.eval(a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NerveKind {
    /// `NG`
    Nerve,
    /// `N̄G`
    Universal,
}

/// `NG` or `N̄G`, with levels `0..=MAX_LEVEL` built up front.
#[derive(Clone, Debug)]
pub struct SimplicialSpace {
    kind: NerveKind,
    group: Arc<LieGroup>,
    levels: Vec<Arc<ChartedSpace>>,
}

pub fn build_ng(group: &Arc<LieGroup>) -> SimplicialSpace {
    SimplicialSpace::new(NerveKind::Nerve, group)
}

pub fn build_nbar_g(group: &Arc<LieGroup>) -> SimplicialSpace {
    SimplicialSpace::new(NerveKind::Universal, group)
}

#[derive(Clone, Copy, Debug)]
enum Slot {
    Keep(usize),
    /// `g_j g_{j+1}`
    Product(usize),
    /// `h_j h_{j+1}^{−1}`
    Quotient(usize),
}

fn split_tuple(space: &ChartedSpace, n: usize, p: &Point) -> Vec<Point> {
    match n {
        0 => Vec::new(),
        1 => vec![p.clone()],
        _ => space.split(p),
    }
}

fn join_tuple(space: &ChartedSpace, parts: &[Point]) -> Point {
    match parts.len() {
        0 => Point::new(0, Vec::new()),
        1 => parts[0].clone(),
        _ => space.join(parts),
    }
}

/// A map `G^n → G^m` assembled from group operations on adjacent entries,
/// with its block Jacobian.
fn tuple_map(
    group: &Arc<LieGroup>,
    name: String,
    source: Arc<ChartedSpace>,
    n_in: usize,
    target: Arc<ChartedSpace>,
    slots: Vec<Slot>,
) -> SmoothMap {
    let d = group.dim();
    let (g1, src1, tgt1, slots1) = (group.clone(), source.clone(), target.clone(), slots.clone());
    let (g2, src2) = (group.clone(), source.clone());
    SmoothMap::new(name, source, target, move |p| {
        let parts = split_tuple(&src1, n_in, p);
        let out = slots1
            .iter()
            .map(|s| match *s {
                Slot::Keep(j) => Ok(parts[j].clone()),
                Slot::Product(j) => g1.mul(&parts[j], &parts[j + 1]),
                Slot::Quotient(j) => g1.mul(&parts[j], &g1.inv(&parts[j + 1])?),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(join_tuple(&tgt1, &out))
    })
    .with_jacobian(move |p| {
        let parts = split_tuple(&src2, n_in, p);
        let mut jac = DMatrix::zeros(slots.len() * d, n_in * d);
        for (k, s) in slots.iter().enumerate() {
            match *s {
                Slot::Keep(j) => {
                    for r in 0..d {
                        jac[(k * d + r, j * d + r)] = 1.0;
                    }
                }
                Slot::Product(j) => {
                    let jm = g2.multiply.jacobian(&g2.pair(&parts[j], &parts[j + 1]))?;
                    jac.view_mut((k * d, j * d), (d, 2 * d)).copy_from(&jm);
                }
                Slot::Quotient(j) => {
                    let b = g2.inv(&parts[j + 1])?;
                    let ji = g2.inverse.jacobian(&parts[j + 1])?;
                    let jm = g2.multiply.jacobian(&g2.pair(&parts[j], &b))?;
                    jac.view_mut((k * d, j * d), (d, d)).copy_from(&jm.columns(0, d));
                    let right = jm.columns(d, d) * ji;
                    jac.view_mut((k * d, (j + 1) * d), (d, d)).copy_from(&right);
                }
            }
        }
        Ok(jac)
    })
}

impl SimplicialSpace {
    fn new(kind: NerveKind, group: &Arc<LieGroup>) -> Self {
        let extra = usize::from(kind == NerveKind::Universal);
        let levels = (0..=MAX_LEVEL)
            .map(|p| ChartedSpace::power(group.space(), p + extra))
            .collect();
        SimplicialSpace {
            kind,
            group: group.clone(),
            levels,
        }
    }

    pub fn kind(&self) -> NerveKind {
        self.kind
    }

    pub fn group(&self) -> &Arc<LieGroup> {
        &self.group
    }

    /// Number of group entries in a point of level `p`.
    pub fn arity(&self, p: usize) -> usize {
        match self.kind {
            NerveKind::Nerve => p,
            NerveKind::Universal => p + 1,
        }
    }

    /// Lowest level carrying cochain components.
    pub fn min_level(&self) -> usize {
        match self.kind {
            NerveKind::Nerve => 1,
            NerveKind::Universal => 0,
        }
    }

    pub fn level(&self, p: usize) -> Result<&Arc<ChartedSpace>> {
        self.levels
            .get(p)
            .ok_or_else(|| Error::contract(format!("level {p} exceeds the materialized range 0..={MAX_LEVEL}")))
    }

    pub fn split(&self, p: usize, point: &Point) -> Result<Vec<Point>> {
        Ok(split_tuple(self.level(p)?, self.arity(p), point))
    }

    pub fn join(&self, p: usize, parts: &[Point]) -> Result<Point> {
        if parts.len() != self.arity(p) {
            return Err(Error::contract(format!(
                "level {p} points have {} entries, got {}",
                self.arity(p),
                parts.len()
            )));
        }
        Ok(join_tuple(self.level(p)?, parts))
    }

    /// The face `X_p → X_{p−1}` with index `i ∈ 0..=p`.
    pub fn face(&self, p: usize, i: usize) -> Result<SmoothMap> {
        if p == 0 || i > p {
            return Err(Error::contract(format!("no face ε_{i} on level {p}")));
        }
        let n = self.arity(p);
        let slots: Vec<Slot> = match self.kind {
            NerveKind::Nerve if i == 0 => (1..n).map(Slot::Keep).collect(),
            NerveKind::Nerve if i == p => (0..n - 1).map(Slot::Keep).collect(),
            NerveKind::Nerve => (0..i - 1)
                .map(Slot::Keep)
                .chain(std::iter::once(Slot::Product(i - 1)))
                .chain((i + 1..n).map(Slot::Keep))
                .collect(),
            NerveKind::Universal => (0..n).filter(|&j| j != i).map(Slot::Keep).collect(),
        };
        let bar = if self.kind == NerveKind::Universal { "̄" } else { "" };
        Ok(tuple_map(
            &self.group,
            format!("ε{bar}{i}"),
            self.level(p)?.clone(),
            n,
            self.level(p - 1)?.clone(),
            slots,
        ))
    }

    pub fn faces(&self, p: usize) -> Result<Vec<SmoothMap>> {
        (0..=p).map(|i| self.face(p, i)).collect()
    }

    /// `γ: N̄G(p) → NG(p)`.
    pub fn gamma(&self, p: usize) -> Result<SmoothMap> {
        if self.kind != NerveKind::Universal {
            return Err(Error::contract("γ is defined on N̄G only"));
        }
        Ok(tuple_map(
            &self.group,
            "γ".into(),
            self.level(p)?.clone(),
            p + 1,
            ChartedSpace::power(self.group.space(), p),
            (0..p).map(Slot::Quotient).collect(),
        ))
    }

    fn check_level(&self, p: usize, c: &FormField) -> Result<()> {
        let level = self.level(p)?;
        if !c.base().same_as(level) {
            return Err(Error::contract(format!(
                "{} lives on {}, not on level {p} ({})",
                c.label(),
                c.base().name(),
                level.name()
            )));
        }
        Ok(())
    }

    /// `d′c = Σ_{i=0}^{p+1} (−1)^i ε_i* c` for `c` on level `p`.
    pub fn d_prime(&self, p: usize, c: &FormField) -> Result<FormField> {
        self.check_level(p, c)?;
        let pulled = self
            .faces(p + 1)?
            .iter()
            .map(|f| pullback(f, c))
            .collect::<Result<Vec<_>>>()?;
        let signs: Vec<f64> = (0..pulled.len()).map(alternating).collect();
        Ok(linear_combine(&signs, &pulled)?.relabel(format!("d′({})", c.label())))
    }

    /// `d″c = (−1)^p dc` for `c` on level `p`.
    pub fn d_double_prime(&self, p: usize, c: &FormField) -> Result<FormField> {
        self.check_level(p, c)?;
        Ok(scale(alternating(p), &ext_derivative(c)).relabel(format!("d″({})", c.label())))
    }
}

pub(crate) fn alternating(i: usize) -> f64 {
    if i % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Forms `c_p ∈ Ω^{n−p}(X_p)`; absent components are zero.
#[derive(Clone, Debug)]
pub struct BigradedCochain {
    space: Arc<SimplicialSpace>,
    total: usize,
    components: BTreeMap<usize, FormField>,
}

impl BigradedCochain {
    pub fn new(space: &Arc<SimplicialSpace>, total: usize) -> Self {
        BigradedCochain {
            space: space.clone(),
            total,
            components: BTreeMap::new(),
        }
    }

    /// Adds (or replaces) the component on level `p`.
    pub fn with(mut self, p: usize, form: FormField) -> Result<Self> {
        if p < self.space.min_level() || p > self.total {
            return Err(Error::contract(format!(
                "no bidegree ({p}, {}) in total degree {}",
                self.total as isize - p as isize,
                self.total
            )));
        }
        if form.degree() != self.total - p {
            return Err(Error::contract(format!(
                "component on level {p} must have degree {}, {} has {}",
                self.total - p,
                form.label(),
                form.degree()
            )));
        }
        self.space.check_level(p, &form)?;
        self.components.insert(p, form);
        Ok(self)
    }

    pub fn space(&self) -> &Arc<SimplicialSpace> {
        &self.space
    }

    pub fn total_degree(&self) -> usize {
        self.total
    }

    pub fn component(&self, p: usize) -> Option<&FormField> {
        self.components.get(&p)
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, &FormField)> {
        self.components.iter().map(|(p, f)| (*p, f))
    }

    /// The cochain with the level-`p` component multiplied by `factor`.
    pub fn scaled_component(&self, p: usize, factor: f64) -> Self {
        let mut out = self.clone();
        if let Some(f) = out.components.get_mut(&p) {
            *f = scale(factor, f).relabel(format!("{factor}·{}", f.label()));
        }
        out
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &BigradedCochain, b: f64) -> Result<Self> {
        if self.total != other.total || self.space.kind != other.space.kind {
            return Err(Error::contract("cannot combine cochains of different type"));
        }
        let mut out = BigradedCochain::new(&self.space, self.total);
        let levels: std::collections::BTreeSet<usize> =
            self.components.keys().chain(other.components.keys()).copied().collect();
        for p in levels {
            let form = match (self.component(p), other.component(p)) {
                (Some(x), Some(y)) => linear_combine(&[a, b], &[x.clone(), y.clone()])?,
                (Some(x), None) => scale(a, x),
                (None, Some(y)) => scale(b, y),
                (None, None) => unreachable!(),
            };
            out = out.with(p, form)?;
        }
        Ok(out)
    }
}

/// Componentwise `D = d′ + d″`.
pub fn total_d(c: &BigradedCochain) -> Result<BigradedCochain> {
    let space = &c.space;
    let mut out = BigradedCochain::new(space, c.total + 1);
    let top = c.components.keys().max().map_or(0, |p| p + 1);
    for p in space.min_level()..=top.min(c.total + 1) {
        let mut terms = Vec::new();
        if p >= 1 {
            if let Some(prev) = c.component(p - 1) {
                terms.push(space.d_prime(p - 1, prev)?);
            }
        }
        if let Some(here) = c.component(p) {
            terms.push(space.d_double_prime(p, here)?);
        }
        if terms.is_empty() {
            continue;
        }
        let ones = vec![1.0; terms.len()];
        let label = format!("D^{{{p},{}}}", c.total + 1 - p);
        out = out.with(p, linear_combine(&ones, &terms)?.relabel(label))?;
    }
    Ok(out)
}

/// Samples for every component of `c`, drawn sequentially level by level.
pub fn component_samples(c: &BigradedCochain, samples: usize, rng: &mut dyn RngCore) -> Result<Vec<(usize, Vec<Sample>)>> {
    c.components()
        .map(|(p, f)| Ok((p, sample_frames(c.space.level(p)?, samples, f.degree(), rng)?)))
        .collect()
}

/// Max/mean of every component of `D(c)` at sampled frames.
pub fn verify_cocycle(c: &BigradedCochain, model: &str, samples: usize, tol: f64, seed: u64) -> Result<VerificationReport> {
    let dc = total_d(c)?;
    let mut rng = seeded(seed);
    let batches = component_samples(&dc, samples, &mut rng)?;
    let mut report = ReportBuilder::new("cocycle", model, samples, Some(seed), Tolerance::Numeric(tol));
    for (p, batch) in batches {
        let form = dc.component(p).expect("sampled component exists");
        let values = residuals(&batch, |s| form.evaluate(&s.point, &s.frame))?;
        report.identity(form.label().to_string(), &values);
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `(ℝ², +)`.
    pub(crate) fn plane_group() -> Arc<LieGroup> {
        let g = ChartedSpace::euclidean("R2", 2, 100.0, 2.0);
        let sq = ChartedSpace::power(&g, 2);
        let mul = SmoothMap::new("+", sq.clone(), g.clone(), |p| {
            let c = &p.coords;
            Ok(Point::new(0, vec![c[0] + c[2], c[1] + c[3]]))
        })
        .with_jacobian(|_| Ok(DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0])));
        let inv = SmoothMap::new("−", g.clone(), g.clone(), |p| Ok(Point::new(0, vec![-p.coords[0], -p.coords[1]])))
            .with_jacobian(|_| Ok(-DMatrix::identity(2, 2)));
        Arc::new(LieGroup::new(g, mul, inv, Point::new(0, vec![0.0, 0.0])).unwrap())
    }

    fn pt(c: &[f64]) -> Point {
        Point::new(0, c.to_vec())
    }

    #[test]
    fn nerve_faces_on_the_plane() {
        let ng = build_ng(&plane_group());
        let x = pt(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(ng.face(2, 1).unwrap().eval(&x).unwrap(), pt(&[4.0, 6.0]));
        assert_eq!(ng.face(2, 0).unwrap().eval(&x).unwrap(), pt(&[3.0, 4.0]));
        assert_eq!(ng.face(2, 2).unwrap().eval(&x).unwrap(), pt(&[1.0, 2.0]));
        assert_eq!(ng.face(1, 0).unwrap().eval(&pt(&[1.0, 2.0])).unwrap(), Point::new(0, vec![]));
    }

    #[test]
    fn gamma_and_bar_faces() {
        let nbar = build_nbar_g(&plane_group());
        let h = pt(&[1.0, 1.0, 0.0, 3.0]);
        assert_eq!(nbar.gamma(1).unwrap().eval(&h).unwrap(), pt(&[1.0, -2.0]));
        assert_eq!(nbar.face(1, 0).unwrap().eval(&h).unwrap(), pt(&[0.0, 3.0]));
        assert_eq!(nbar.face(1, 1).unwrap().eval(&h).unwrap(), pt(&[1.0, 1.0]));
    }

    #[test]
    fn product_face_jacobian_is_block_identity() {
        let ng = build_ng(&plane_group());
        let j = ng.face(2, 1).unwrap().jacobian(&pt(&[1.0, 2.0, 3.0, 4.0])).unwrap();
        let expected = DMatrix::from_row_slice(2, 4, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        assert_eq!(j, expected);
    }

    #[test]
    fn face_index_out_of_range_is_a_contract_error() {
        let ng = build_ng(&plane_group());
        assert!(matches!(ng.face(2, 3), Err(Error::Contract(_))));
        assert!(matches!(ng.face(0, 0), Err(Error::Contract(_))));
        assert!(matches!(ng.level(MAX_LEVEL + 1), Err(Error::Contract(_))));
    }

    #[test]
    fn constant_on_level_one_is_not_a_cocycle() {
        let ng = Arc::new(build_ng(&plane_group()));
        let one = FormField::constant(1.0, ng.level(1).unwrap());
        let c = BigradedCochain::new(&ng, 1).with(1, one).unwrap();
        let dc = total_d(&c).unwrap();
        let d2 = dc.component(2).unwrap();
        assert_eq!(d2.evaluate(&pt(&[0.1, 0.2, 0.3, 0.4]), &[]).unwrap(), 1.0);
        let r = verify_cocycle(&c, "plane", 20, 1e-6, 1).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn component_degree_is_checked() {
        let ng = Arc::new(build_ng(&plane_group()));
        let one = FormField::constant(1.0, ng.level(1).unwrap());
        assert!(BigradedCochain::new(&ng, 2).with(1, one.clone()).is_err());
        assert!(BigradedCochain::new(&ng, 1).with(0, FormField::constant(1.0, ng.level(0).unwrap())).is_err());
    }
}
