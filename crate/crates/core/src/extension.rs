//! Central extensions `1 → U(1) → Ĝ → G → 1` with a connection, and the
//! simplicial Dixmier–Douady cochain `c₁(θ) ⊕ −κ·ŝ*(δθ)` on `NG`.
//!
//! Forms are real: `θ` pairs to 1 with the generator of the circle action,
//! and `κ = −1/(2π)` stands in for `−1/(2πi)`.
//!
//! `ŝ*(δθ)` is evaluated on `ε₀⁻¹V_λ ∩ ε₁⁻¹V_λ′ ∩ ε₂⁻¹V_λ″ ⊂ G×G` as
//!
//! ```text
//! ε₀*(η_λ*θ) − ε₁*(η_λ′*θ) + ε₂*(η_λ″*θ) + s·d(arg c),
//! c(g₁,g₂) = η_λ″(g₁)·η_λ(g₂)·η_λ′(g₁g₂)⁻¹ ∈ ker ρ,
//! ```
//!
//! with `s = SECTION_PHASE_SIGN`.

use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::manifold::{
    angle_differential, ext_derivative, linear_combine, patchwise, pullback, scale, ChartedSpace, FormField, Point,
    SelectFn, SmoothMap, KAPPA,
};
use crate::report::{ReportBuilder, Tolerance, VerificationReport};
use crate::sampling::{residuals, sample_frames, sample_where, seeded, Sample};
use crate::simplicial::{build_nbar_g, build_ng, total_d, BigradedCochain, LieGroup, SimplicialSpace};

/// Coefficient of `d(arg c)` in `ŝ*(δθ)`.
pub const SECTION_PHASE_SIGN: f64 = -1.0;

/// `dd(θ₀) − dd(θ₁) = CONNECTION_SIGN · D(κα)`.
pub const CONNECTION_SIGN: f64 = -1.0;

/// Largest `|ρ(c) − e|` accepted for a value that should lie in `ker ρ`.
pub const KERNEL_TOL: f64 = 1e-8;

pub type PointPredicate = Arc<dyn Fn(&Point) -> bool + Send + Sync>;
pub type AngleFn = Arc<dyn Fn(&Point) -> Result<f64> + Send + Sync>;
pub type VectorField = Arc<dyn Fn(&Point) -> Vec<f64> + Send + Sync>;

/// An open set `V_λ ⊂ G` with a local section `η_λ: V_λ → Ĝ`.
#[derive(Clone)]
pub struct Patch {
    pub name: String,
    contains: PointPredicate,
    section: SmoothMap,
}

impl Patch {
    pub fn new(name: impl Into<String>, contains: PointPredicate, section: SmoothMap) -> Self {
        Patch {
            name: name.into(),
            contains,
            section,
        }
    }

    pub fn contains(&self, g: &Point) -> bool {
        (self.contains)(g)
    }

    pub fn section(&self) -> &SmoothMap {
        &self.section
    }
}

/// Everything needed to assemble a [`CentralExtensionModel`].
pub struct ExtensionParts {
    pub name: String,
    pub base: LieGroup,
    pub total: LieGroup,
    pub projection: SmoothMap,
    /// `U(1) × Ĝ → Ĝ`
    pub action: SmoothMap,
    /// Generator of the action, in the chart of the query point.
    pub vertical: VectorField,
    pub cover: Vec<Patch>,
    /// Angle of an element of `ker ρ`.
    pub kernel_phase: AngleFn,
}

#[derive(Clone)]
pub struct CentralExtensionModel {
    name: String,
    base: Arc<LieGroup>,
    total: Arc<LieGroup>,
    projection: SmoothMap,
    circle: Arc<ChartedSpace>,
    action: SmoothMap,
    vertical: VectorField,
    cover: Vec<Patch>,
    kernel_phase: AngleFn,
    ng: Arc<SimplicialSpace>,
    nbar: Arc<SimplicialSpace>,
}

impl fmt::Debug for CentralExtensionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CentralExtensionModel({}: {} → {}, {} patches)",
            self.name,
            self.total.space().name(),
            self.base.space().name(),
            self.cover.len()
        )
    }
}

/// `U(1)` as the circle `[−π, π)`.
pub fn circle() -> Arc<ChartedSpace> {
    use std::f64::consts::PI;
    ChartedSpace::builder("U(1)", 1)
        .chart(crate::manifold::Chart::new(vec![-PI], vec![PI]))
        .periodic(0, 2.0 * PI)
        .sampler(Arc::new(|rng: &mut dyn RngCore| {
            Point::new(0, vec![crate::manifold::uniform(rng, -PI, PI)])
        }))
        .build()
        .expect("circle atlas is well formed")
}

impl CentralExtensionModel {
    pub fn new(parts: ExtensionParts) -> Result<Self> {
        let circle = circle();
        let total_space = parts.total.space().clone();
        let base_space = parts.base.space().clone();
        if !parts.projection.source().same_as(&total_space) || !parts.projection.target().same_as(&base_space) {
            return Err(Error::contract(format!("{}: ρ must map Ĝ → G", parts.name)));
        }
        let act_src = ChartedSpace::product(vec![circle.clone(), total_space.clone()]);
        if !parts.action.source().same_as(&act_src) || !parts.action.target().same_as(&total_space) {
            return Err(Error::contract(format!("{}: the action must map U(1) × Ĝ → Ĝ", parts.name)));
        }
        if parts.cover.is_empty() {
            return Err(Error::contract(format!("{}: empty cover", parts.name)));
        }
        for patch in &parts.cover {
            let s = &patch.section;
            if !s.source().same_as(&base_space) || !s.target().same_as(&total_space) {
                return Err(Error::contract(format!("{}: section {} must map G → Ĝ", parts.name, patch.name)));
            }
        }
        let base = Arc::new(parts.base);
        Ok(CentralExtensionModel {
            ng: Arc::new(build_ng(&base)),
            nbar: Arc::new(build_nbar_g(&base)),
            name: parts.name,
            base,
            total: Arc::new(parts.total),
            projection: parts.projection,
            circle,
            action: parts.action,
            vertical: parts.vertical,
            cover: parts.cover,
            kernel_phase: parts.kernel_phase,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> &Arc<LieGroup> {
        &self.base
    }

    pub fn total(&self) -> &Arc<LieGroup> {
        &self.total
    }

    pub fn projection(&self) -> &SmoothMap {
        &self.projection
    }

    pub fn circle(&self) -> &Arc<ChartedSpace> {
        &self.circle
    }

    pub fn action(&self) -> &SmoothMap {
        &self.action
    }

    pub fn cover(&self) -> &[Patch] {
        &self.cover
    }

    pub fn ng(&self) -> &Arc<SimplicialSpace> {
        &self.ng
    }

    pub fn nbar(&self) -> &Arc<SimplicialSpace> {
        &self.nbar
    }

    pub fn vertical(&self, p: &Point) -> Vec<f64> {
        (self.vertical)(p)
    }

    /// Index of the first patch containing `g`.
    pub fn patch_of(&self, g: &Point) -> Result<usize> {
        self.cover.iter().position(|v| v.contains(g)).ok_or_else(|| Error::Coverage {
            space: self.base.space().name().to_string(),
            what: format!("chart {} at {:?}", g.chart, g.coords),
        })
    }

    /// All patches containing `g`.
    pub fn patches_at(&self, g: &Point) -> Vec<usize> {
        (0..self.cover.len()).filter(|&i| self.cover[i].contains(g)).collect()
    }

    pub fn section(&self, patch: usize, g: &Point) -> Result<Point> {
        self.cover[patch].section.eval(g)
    }

    /// `e^{iu}·x`.
    pub fn act(&self, u: f64, x: &Point) -> Result<Point> {
        let src = self.action.source();
        let arg = src.join(&[self.circle.point_at(0, vec![u]), x.clone()]);
        self.action.eval(&arg)
    }

    /// `|ρ(x) − e|` in the coordinates of `G`.
    pub fn kernel_defect(&self, x: &Point) -> Result<f64> {
        let image = self.projection.eval(x)?;
        Ok(self.base.space().distance(&image, self.base.identity()))
    }

    /// Angle of `x ∈ ker ρ`; a model-inconsistency error if `x` is not in
    /// the kernel.
    pub fn kernel_angle(&self, x: &Point) -> Result<f64> {
        let defect = self.kernel_defect(x)?;
        if !(defect <= KERNEL_TOL) {
            return Err(Error::inconsistent(format!(
                "{}: value expected in ker ρ is {defect:.3e} away from the identity",
                self.name
            )));
        }
        (self.kernel_phase)(x)
    }

    /// `c(g₁,g₂) = η_λ″(g₁)·η_λ(g₂)·η_λ′(g₁g₂)⁻¹` for fixed patches.
    pub fn comparison_element(&self, patches: [usize; 3], g1: &Point, g2: &Point) -> Result<Point> {
        let [l0, l1, l2] = patches;
        let t = &self.total;
        let prod = self.base.mul(g1, g2)?;
        let left = t.mul(&self.section(l2, g1)?, &self.section(l0, g2)?)?;
        t.mul(&left, &t.inv(&self.section(l1, &prod)?)?)
    }

    /// Patches `(λ, λ′, λ″)` holding `(g₂, g₁g₂, g₁)`.
    pub fn patch_triple(&self, g1: &Point, g2: &Point) -> Result<[usize; 3]> {
        Ok([self.patch_of(g2)?, self.patch_of(&self.base.mul(g1, g2)?)?, self.patch_of(g1)?])
    }

    fn triple_index(&self, t: [usize; 3]) -> usize {
        let n = self.cover.len();
        (t[0] * n + t[1]) * n + t[2]
    }
}

/// A connection 1-form on `Ĝ`.
#[derive(Clone, Debug)]
pub struct ConnectionForm {
    theta: FormField,
}

impl ConnectionForm {
    pub fn new(model: &CentralExtensionModel, theta: FormField) -> Result<Self> {
        if theta.degree() != 1 || !theta.base().same_as(model.total.space()) {
            return Err(Error::contract(format!(
                "{}: a connection is a 1-form on {}",
                theta.label(),
                model.total.space().name()
            )));
        }
        Ok(ConnectionForm { theta })
    }

    pub fn form(&self) -> &FormField {
        &self.theta
    }

    /// `θ + ρ*β`.
    pub fn shifted_by(&self, model: &CentralExtensionModel, beta: &FormField) -> Result<Self> {
        let basic = pullback(model.projection(), beta)?;
        let sum = linear_combine(&[1.0, 1.0], &[self.theta.clone(), basic])?;
        ConnectionForm::new(model, sum.relabel(format!("{} + ρ*({})", self.theta.label(), beta.label())))
    }
}

/// `η_λ*θ` for every patch.
fn section_pullbacks(model: &CentralExtensionModel, theta: &FormField) -> Result<Vec<FormField>> {
    model.cover.iter().map(|v| pullback(&v.section, theta)).collect()
}

fn patch_selector(model: &CentralExtensionModel) -> SelectFn {
    let m = model.clone();
    Arc::new(move |g: &Point| m.patch_of(g))
}

/// `κ·d(η_λ*θ)` on the patch `λ`.
pub fn chern_form_on(model: &CentralExtensionModel, theta: &ConnectionForm, patch: usize) -> Result<FormField> {
    let local = pullback(&model.cover[patch].section, &theta.theta)?;
    Ok(scale(KAPPA, &ext_derivative(&local)).relabel(format!("c₁ via {}", model.cover[patch].name)))
}

/// `c₁(θ)`, glued from `κ·d(η_λ*θ)` over the first patch containing the
/// query point.
pub fn chern_form(model: &CentralExtensionModel, theta: &ConnectionForm) -> Result<FormField> {
    let pieces = (0..model.cover.len())
        .map(|i| chern_form_on(model, theta, i))
        .collect::<Result<Vec<_>>>()?;
    patchwise("c₁(θ)", 2, model.base.space(), patch_selector(model), pieces)
}

/// The phase term `d(arg c)` for fixed patches, as a 1-form on `G×G`.
pub fn comparison_phase_form(model: &CentralExtensionModel, patches: [usize; 3]) -> FormField {
    let m = model.clone();
    let square = model.base.square().clone();
    let sq = square.clone();
    angle_differential(format!("d arg c{patches:?}"), &square, move |p| {
        let parts = sq.split(p);
        m.kernel_angle(&m.comparison_element(patches, &parts[0], &parts[1])?)
    })
}

/// `ŝ*(δθ)` with the patches held fixed.
pub fn shat_delta_theta_on(
    model: &CentralExtensionModel,
    theta: &ConnectionForm,
    patches: [usize; 3],
) -> Result<FormField> {
    let pulled = section_pullbacks(model, &theta.theta)?;
    shat_piece(model, &pulled, patches)
}

fn shat_piece(model: &CentralExtensionModel, pulled: &[FormField], patches: [usize; 3]) -> Result<FormField> {
    let faces = model.ng.faces(2)?;
    let terms = vec![
        pullback(&faces[0], &pulled[patches[0]])?,
        pullback(&faces[1], &pulled[patches[1]])?,
        pullback(&faces[2], &pulled[patches[2]])?,
        comparison_phase_form(model, patches),
    ];
    Ok(linear_combine(&[1.0, -1.0, 1.0, SECTION_PHASE_SIGN], &terms)?.relabel(format!("ŝ*(δθ){patches:?}")))
}

/// `ŝ*(δθ)` on `G×G`, patches chosen at the query point.
pub fn shat_delta_theta(model: &CentralExtensionModel, theta: &ConnectionForm) -> Result<FormField> {
    let n = model.cover.len();
    let pulled = section_pullbacks(model, &theta.theta)?;
    let mut pieces = Vec::with_capacity(n * n * n);
    for l0 in 0..n {
        for l1 in 0..n {
            for l2 in 0..n {
                pieces.push(shat_piece(model, &pulled, [l0, l1, l2])?);
            }
        }
    }
    let m = model.clone();
    let square = model.base.square().clone();
    let sq = square.clone();
    let select: SelectFn = Arc::new(move |p: &Point| {
        let parts = sq.split(p);
        Ok(m.triple_index(m.patch_triple(&parts[0], &parts[1])?))
    });
    patchwise("ŝ*(δθ)", 1, &square, select, pieces)
}

/// `c₁(θ)` on `NG(1)` and `−κ·ŝ*(δθ)` on `NG(2)`.
pub fn dd_cochain(model: &CentralExtensionModel, theta: &ConnectionForm) -> Result<BigradedCochain> {
    let c1 = chern_form(model, theta)?;
    let s = scale(-KAPPA, &shat_delta_theta(model, theta)?).relabel("−κ·ŝ*(δθ)");
    BigradedCochain::new(&model.ng, 3).with(1, c1)?.with(2, s)
}

/// `|a − b|` over samples.
pub(crate) fn difference_residuals(a: &FormField, b: &FormField, samples: &[Sample]) -> Result<Vec<f64>> {
    residuals(samples, |s| Ok(a.evaluate(&s.point, &s.frame)? - b.evaluate(&s.point, &s.frame)?))
}

pub fn verify_prop21(
    model: &CentralExtensionModel,
    theta: &ConnectionForm,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let c1 = chern_form(model, theta)?;
    let lhs = model.ng.d_prime(1, &c1)?;
    let rhs = scale(KAPPA, &ext_derivative(&shat_delta_theta(model, theta)?));
    let pts = sample_frames(model.ng.level(2)?, samples, 2, &mut seeded(seed))?;
    let mut report = ReportBuilder::new("prop21", model.name(), samples, Some(seed), Tolerance::Numeric(tol));
    report.identity("(ε₀*−ε₁*+ε₂*)c₁(θ) = κ·d(ŝ*(δθ))", &difference_residuals(&lhs, &rhs, &pts)?);
    Ok(report.finish())
}

pub fn verify_prop22(
    model: &CentralExtensionModel,
    theta: &ConnectionForm,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let alt = model.ng.d_prime(2, &shat_delta_theta(model, theta)?)?;
    let pts = sample_frames(model.ng.level(3)?, samples, 1, &mut seeded(seed))?;
    let values = residuals(&pts, |s| alt.evaluate(&s.point, &s.frame))?;
    let mut report = ReportBuilder::new("prop22", model.name(), samples, Some(seed), Tolerance::Numeric(tol));
    report.identity("(ε₀*−ε₁*+ε₂*−ε₃*)ŝ*(δθ) = 0", &values);
    Ok(report.finish())
}

/// Draws a point of `G` lying in at least two patches; `None` for a
/// single-patch cover.
pub(crate) fn sample_overlap(model: &CentralExtensionModel, rng: &mut dyn RngCore) -> Result<Option<Point>> {
    if model.cover.len() < 2 {
        return Ok(None);
    }
    let m = model.clone();
    sample_where(model.base.space(), rng, "a patch overlap", move |g| m.patches_at(g).len() >= 2).map(Some)
}

/// Patchwise `α = η_λ*(θ₀ − θ₁)` and its largest disagreement between
/// patches at sampled overlap points.
pub fn basic_difference(
    model: &CentralExtensionModel,
    theta0: &ConnectionForm,
    theta1: &ConnectionForm,
    samples: usize,
    rng: &mut dyn RngCore,
) -> Result<(FormField, Vec<f64>)> {
    let diff = linear_combine(&[1.0, -1.0], &[theta0.theta.clone(), theta1.theta.clone()])?;
    let pieces = section_pullbacks(model, &diff)?;
    let mut overlap = Vec::new();
    for _ in 0..samples {
        let Some(g) = sample_overlap(model, rng)? else { break };
        let frame = crate::manifold::random_frame(model.base.dim(), 1, rng);
        overlap.push(Sample { point: g, frame });
    }
    let ps = pieces.clone();
    let m = model.clone();
    let spread = residuals(&overlap, move |s| {
        let vals = m
            .patches_at(&s.point)
            .iter()
            .map(|&i| ps[i].evaluate(&s.point, &s.frame))
            .collect::<Result<Vec<_>>>()?;
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(hi - lo)
    })?;
    let alpha = patchwise("α", 1, model.base.space(), patch_selector(model), pieces)?;
    Ok((alpha, spread))
}

/// Checks `dd(θ₀) − dd(θ₁) = CONNECTION_SIGN·D(κα)` componentwise.
pub fn connection_independence(
    model: &CentralExtensionModel,
    theta0: &ConnectionForm,
    theta1: &ConnectionForm,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let mut rng = seeded(seed);
    let (alpha, spread) = basic_difference(model, theta0, theta1, samples, &mut rng)?;
    let worst = spread.iter().copied().fold(0.0, f64::max);
    if worst > tol {
        return Err(Error::inconsistent(format!(
            "{}: η_λ*(θ₀ − θ₁) differs between patches by {worst:.3e}",
            model.name
        )));
    }
    let diff = dd_cochain(model, theta0)?.combine(1.0, &dd_cochain(model, theta1)?, -1.0)?;
    let a = BigradedCochain::new(&model.ng, 2).with(1, scale(KAPPA, &alpha))?;
    let da = total_d(&a)?;
    let mut report = ReportBuilder::new("prop23", model.name(), samples, Some(seed), Tolerance::Numeric(tol));
    report.identity("α patch independence", &spread);
    for p in [1, 2] {
        let lhs = diff.component(p).expect("dd has levels 1 and 2");
        let rhs = scale(CONNECTION_SIGN, da.component(p).expect("D(κα) has levels 1 and 2"));
        let pts = sample_frames(model.ng.level(p)?, samples, 3 - p, &mut rng)?;
        report.identity(
            format!("dd(θ₀) − dd(θ₁) = −D(κα) on level {p}"),
            &difference_residuals(lhs, &rhs, &pts)?,
        );
    }
    Ok(report.finish())
}

/// Structural checks of a model: sections, homomorphism, centrality,
/// coverage and kernel membership of the comparison phase.
pub fn verify_model(model: &CentralExtensionModel, samples: usize, tol: f64, seed: u64) -> Result<VerificationReport> {
    let mut rng = seeded(seed);
    let g = model.base.space().clone();
    let gh = model.total.space().clone();
    let gs: Vec<Point> = (0..samples).map(|_| g.sample(&mut rng)).collect();
    let hs: Vec<(Point, Point, f64)> = (0..samples)
        .map(|_| (gh.sample(&mut rng), gh.sample(&mut rng), crate::manifold::uniform(&mut rng, -3.0, 3.0)))
        .collect();
    let pairs: Vec<(Point, Point)> = (0..samples).map(|_| (g.sample(&mut rng), g.sample(&mut rng))).collect();
    let mut report = ReportBuilder::new("model", model.name(), samples, Some(seed), Tolerance::Numeric(tol));

    let cover = residuals(&gs, |x| Ok(if model.patch_of(x).is_ok() { 0.0 } else { 1.0 }))?;
    report.identity("cover contains every sample", &cover);
    let sections = residuals(&gs, |x| {
        let mut worst: f64 = 0.0;
        for i in model.patches_at(x) {
            let back = model.projection.eval(&model.section(i, x)?)?;
            worst = worst.max(g.distance(&back, x));
        }
        Ok(worst)
    })?;
    report.identity("ρ∘η_λ = id", &sections);
    let hom = residuals(&hs, |(a, b, _)| {
        let lhs = model.projection.eval(&model.total.mul(a, b)?)?;
        let rhs = model.base.mul(&model.projection.eval(a)?, &model.projection.eval(b)?)?;
        Ok(g.distance(&lhs, &rhs))
    })?;
    report.identity("ρ(ab) = ρ(a)ρ(b)", &hom);
    let central = residuals(&hs, |(a, b, u)| {
        let t = &model.total;
        let left = t.mul(&model.act(*u, a)?, b)?;
        let right = t.mul(a, &model.act(*u, b)?)?;
        let outer = model.act(*u, &t.mul(a, b)?)?;
        Ok(gh.distance(&left, &outer).max(gh.distance(&right, &outer)))
    })?;
    report.identity("(u·a)b = a(u·b) = u·(ab)", &central);
    let kernel = residuals(&pairs, |(a, b)| {
        let c = model.comparison_element(model.patch_triple(a, b)?, a, b)?;
        model.kernel_defect(&c)
    })?;
    report.identity("c(g₁,g₂) ∈ ker ρ", &kernel);
    Ok(report.finish())
}

/// `θ(∂) = 1`, `R_u*θ = θ` and `ρ*c₁(θ) = κ·dθ`.
pub fn verify_connection(
    model: &CentralExtensionModel,
    theta: &ConnectionForm,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let mut rng = seeded(seed);
    let gh = model.total.space().clone();
    let pts = sample_frames(&gh, samples, 2, &mut rng)?;
    let shifts: Vec<f64> = (0..samples).map(|_| crate::manifold::uniform(&mut rng, -3.0, 3.0)).collect();
    let th = &theta.theta;
    let mut report = ReportBuilder::new("connection", model.name(), samples, Some(seed), Tolerance::Numeric(tol));
    let vertical = residuals(&pts, |s| Ok(th.evaluate(&s.point, &[model.vertical(&s.point)])? - 1.0))?;
    report.identity("θ(vertical) = 1", &vertical);
    let idx: Vec<usize> = (0..samples).collect();
    let invariance = residuals(&idx, |&i| {
        let s = &pts[i];
        let u = shifts[i];
        let m = model.clone();
        let shift = SmoothMap::new("R_u", gh.clone(), gh.clone(), move |x| m.act(u, x));
        let moved = pullback(&shift, th)?;
        Ok(moved.evaluate(&s.point, &s.frame[..1])? - th.evaluate(&s.point, &s.frame[..1])?)
    })?;
    report.identity("R_u*θ = θ", &invariance);
    let lhs = pullback(&model.projection, &chern_form(model, theta)?)?;
    let rhs = scale(KAPPA, &ext_derivative(th));
    report.identity("ρ*c₁(θ) = κ·dθ", &difference_residuals(&lhs, &rhs, &pts)?);
    Ok(report.finish())
}

/// Agreement of `c₁` and `ŝ*(δθ)` computed through different patches at
/// sampled overlap points.
pub fn patch_independence(
    model: &CentralExtensionModel,
    theta: &ConnectionForm,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let mut rng = seeded(seed);
    let n = model.cover.len();
    let c1: Vec<FormField> = (0..n).map(|i| chern_form_on(model, theta, i)).collect::<Result<_>>()?;
    let mut overlap = Vec::new();
    for _ in 0..samples {
        let Some(g) = sample_overlap(model, &mut rng)? else { break };
        let frame = crate::manifold::random_frame(model.base.dim(), 2, &mut rng);
        overlap.push(Sample { point: g, frame });
    }
    let spread_c1 = residuals(&overlap, |s| {
        let vals = model
            .patches_at(&s.point)
            .iter()
            .map(|&i| c1[i].evaluate(&s.point, &s.frame))
            .collect::<Result<Vec<_>>>()?;
        Ok(spread(&vals))
    })?;
    let sq = model.base.square().clone();
    let pts = sample_frames(&sq, samples, 1, &mut rng)?;
    let pulled = section_pullbacks(model, &theta.theta)?;
    let spread_s = residuals(&pts, |s| {
        let parts = sq.split(&s.point);
        let prod = model.base.mul(&parts[0], &parts[1])?;
        let mut vals = Vec::new();
        for l0 in model.patches_at(&parts[1]) {
            for l1 in model.patches_at(&prod) {
                for l2 in model.patches_at(&parts[0]) {
                    vals.push(shat_piece(model, &pulled, [l0, l1, l2])?.evaluate(&s.point, &s.frame)?);
                }
            }
        }
        Ok(spread(&vals))
    })?;
    let mut report = ReportBuilder::new("patches", model.name(), samples, Some(seed), Tolerance::Numeric(tol));
    report.identity("c₁ across patches", &spread_c1);
    report.identity("ŝ*(δθ) across patch triples", &spread_s);
    Ok(report.finish())
}

fn spread(vals: &[f64]) -> f64 {
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if vals.is_empty() {
        0.0
    } else {
        hi - lo
    }
}
