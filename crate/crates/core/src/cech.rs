//! Transition data of a principal `G`-bundle over a covered base, the Čech
//! cocycle `c_{αβγ} = ĝ_{βγ}ĝ_{αγ}⁻¹ĝ_{αβ}` of a choice of lifts, and its
//! comparison with the simplicial cocycle.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::extension::{
    chern_form, difference_residuals, shat_delta_theta, CentralExtensionModel, ConnectionForm, PointPredicate,
};
use crate::manifold::{angle_differential, ext_derivative, linear_combine, pullback, scale, ChartedSpace, FormField, Point, SmoothMap, KAPPA};
use crate::report::{ReportBuilder, Tolerance, VerificationReport};
use crate::sampling::{random_frame_sample, residuals, sample_where, seeded, Sample};

/// A manifold `M` with an open cover `{U_α}` given by membership tests.
#[derive(Clone)]
pub struct CoveredBase {
    space: Arc<ChartedSpace>,
    members: Vec<(String, PointPredicate)>,
}

impl CoveredBase {
    pub fn new(space: Arc<ChartedSpace>, members: Vec<(String, PointPredicate)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::contract(format!("{}: empty cover", space.name())));
        }
        Ok(CoveredBase { space, members })
    }

    pub fn space(&self) -> &Arc<ChartedSpace> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member_name(&self, alpha: usize) -> &str {
        &self.members[alpha].0
    }

    pub fn contains(&self, alpha: usize, p: &Point) -> bool {
        (self.members[alpha].1)(p)
    }

    /// A stencil-safe point of `U_{α₀…α_k}`.
    pub fn sample_in(&self, indices: &[usize], rng: &mut dyn RngCore) -> Result<Point> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::contract(format!("cover has {} members, no index {bad}", self.len())));
        }
        let what = format!(
            "U_{{{}}}",
            indices.iter().map(|&i| self.member_name(i)).collect::<Vec<_>>().join(",")
        );
        sample_where(&self.space, rng, &what, |p| indices.iter().all(|&i| self.contains(i, p)))
    }
}

/// Transitions `g_{αβ}: U_{αβ} → G` and lifts `ĝ_{αβ}: U_{αβ} → Ĝ`, stored
/// for every ordered pair.
#[derive(Clone)]
pub struct BundleData {
    name: String,
    base: CoveredBase,
    transitions: Vec<SmoothMap>,
    lifts: Vec<SmoothMap>,
    probe: ScalarFn,
}

pub type ScalarFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

impl BundleData {
    pub fn new(
        name: impl Into<String>,
        base: CoveredBase,
        transitions: Vec<SmoothMap>,
        lifts: Vec<SmoothMap>,
    ) -> Result<Self> {
        let name = name.into();
        let n = base.len();
        if transitions.len() != n * n || lifts.len() != n * n {
            return Err(Error::contract(format!("{name}: need one transition and one lift per ordered pair")));
        }
        for m in transitions.iter().chain(&lifts) {
            if !m.source().same_as(base.space()) {
                return Err(Error::contract(format!("{name}: {} is not defined on {}", m.name(), base.space().name())));
            }
        }
        Ok(BundleData {
            name,
            base,
            transitions,
            lifts,
            probe: Arc::new(|p: &Point| 0.7 * p.coords.iter().map(|x| x.sin()).sum::<f64>() + 0.3),
        })
    }

    /// Sets the phase function `u` used by the gauge-covariance check.
    pub fn with_gauge_probe(mut self, probe: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        self.probe = Arc::new(probe);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> &CoveredBase {
        &self.base
    }

    pub fn transition(&self, a: usize, b: usize) -> &SmoothMap {
        &self.transitions[a * self.base.len() + b]
    }

    pub fn lift(&self, a: usize, b: usize) -> &SmoothMap {
        &self.lifts[a * self.base.len() + b]
    }

    /// The same bundle with `ĝ_{αβ}` replaced by `e^{iu}·ĝ_{αβ}`.
    pub fn regauged(
        &self,
        model: &CentralExtensionModel,
        pair: (usize, usize),
        u: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let mut out = self.clone();
        let old = self.lift(pair.0, pair.1).clone();
        let m = model.clone();
        let idx = pair.0 * self.base.len() + pair.1;
        out.lifts[idx] = SmoothMap::new(
            format!("e^{{iu}}·{}", old.name()),
            old.source().clone(),
            old.target().clone(),
            move |p| m.act(u(p), &old.eval(p)?),
        );
        out
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// `c_{αβγ}` as an angle.
pub fn cech_phase(bundle: &BundleData, model: &CentralExtensionModel, t: [usize; 3], p: &Point) -> Result<f64> {
    let [a, b, c] = t;
    let tg = model.total();
    let bc = bundle.lift(b, c).eval(p)?;
    let ac = tg.inv(&bundle.lift(a, c).eval(p)?)?;
    let ab = bundle.lift(a, b).eval(p)?;
    model.kernel_angle(&tg.mul(&tg.mul(&bc, &ac)?, &ab)?)
}

/// The family `{c_{αβγ}}` of `U(1)`-valued functions on triple overlaps.
#[derive(Clone)]
pub struct CechCocycle {
    bundle: BundleData,
    model: CentralExtensionModel,
}

impl CechCocycle {
    pub fn phase(&self, t: [usize; 3], p: &Point) -> Result<f64> {
        cech_phase(&self.bundle, &self.model, t, p)
    }

    /// `arg(δc)_{αβγδ}` wrapped into `(−π, π]`.
    pub fn coboundary_phase(&self, q: [usize; 4], p: &Point) -> Result<f64> {
        let [a, b, c, d] = q;
        Ok(wrap_angle(
            self.phase([b, c, d], p)? - self.phase([a, c, d], p)? + self.phase([a, b, d], p)?
                - self.phase([a, b, c], p)?,
        ))
    }

    /// `d arg c_{αβγ}` on `M`.
    pub fn log_derivative(&self, t: [usize; 3]) -> FormField {
        let this = self.clone();
        angle_differential(format!("d arg c{t:?}"), self.bundle.base.space(), move |p| this.phase(t, p))
    }
}

pub fn dd_cech_cocycle(bundle: &BundleData, model: &CentralExtensionModel) -> Result<CechCocycle> {
    let n = bundle.base.len();
    for (i, m) in bundle.transitions.iter().enumerate() {
        if !m.target().same_as(model.base().space()) {
            return Err(Error::contract(format!("{}: g_{{{},{}}} does not land in G", bundle.name, i / n, i % n)));
        }
    }
    for (i, m) in bundle.lifts.iter().enumerate() {
        if !m.target().same_as(model.total().space()) {
            return Err(Error::contract(format!("{}: ĝ_{{{},{}}} does not land in Ĝ", bundle.name, i / n, i % n)));
        }
    }
    Ok(CechCocycle {
        bundle: bundle.clone(),
        model: model.clone(),
    })
}

/// `C_{2,1} = g_{αβ}*c₁(θ)` and `C_{1,2} = −κ·(g_{αβ}, g_{βγ})*ŝ*(δθ)`.
pub fn cech_de_rham_forms(
    bundle: &BundleData,
    model: &CentralExtensionModel,
    theta: &ConnectionForm,
    t: [usize; 3],
) -> Result<(FormField, FormField)> {
    let [a, b, c] = t;
    let c21 = pullback(bundle.transition(a, b), &chern_form(model, theta)?)?;
    let pair = SmoothMap::pair(bundle.transition(a, b), bundle.transition(b, c), model.base().square())?;
    let c12 = scale(-KAPPA, &pullback(&pair, &shat_delta_theta(model, theta)?)?);
    Ok((c21, c12))
}

fn distinct(n: usize, k: usize, rng: &mut dyn RngCore) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx.truncate(k);
    idx
}

/// `k` distinct cover indices (repeating when the cover is smaller) and a
/// sample of their overlap with a random frame of `degree` vectors.
fn overlap_samples(
    base: &CoveredBase,
    k: usize,
    degree: usize,
    samples: usize,
    rng: &mut dyn RngCore,
) -> Result<Vec<(Vec<usize>, Sample)>> {
    let n = base.len();
    (0..samples)
        .map(|_| {
            let mut idx = distinct(n, k.min(n), rng);
            while idx.len() < k {
                idx.push(idx[idx.len() % n]);
            }
            let point = base.sample_in(&idx, rng)?;
            Ok((idx, random_frame_sample(base.space(), point, degree, rng)))
        })
        .collect()
}

/// `ĝ*_{βγ}θ − ĝ*_{αγ}θ + ĝ*_{αβ}θ`.
fn cech_delta_theta(bundle: &BundleData, theta: &ConnectionForm, t: [usize; 3]) -> Result<FormField> {
    let [a, b, c] = t;
    let pulled = [(b, c), (a, c), (a, b)]
        .iter()
        .map(|&(x, y)| pullback(bundle.lift(x, y), theta.form()))
        .collect::<Result<Vec<_>>>()?;
    linear_combine(&[1.0, -1.0, 1.0], &pulled)
}

fn identity2_residuals(
    bundle: &BundleData,
    model: &CentralExtensionModel,
    theta: &ConnectionForm,
    batch: &[(Vec<usize>, Sample)],
) -> Result<Vec<f64>> {
    let cocycle = dd_cech_cocycle(bundle, model)?;
    let shat = shat_delta_theta(model, theta)?;
    residuals(batch, |(idx, s)| {
        let t = [idx[0], idx[1], idx[2]];
        let pair = SmoothMap::pair(bundle.transition(t[0], t[1]), bundle.transition(t[1], t[2]), model.base().square())?;
        let lhs = linear_combine(&[1.0, 1.0], &[pullback(&pair, &shat)?, cocycle.log_derivative(t)])?;
        let rhs = cech_delta_theta(bundle, theta, t)?;
        Ok(lhs.evaluate(&s.point, &s.frame)? - rhs.evaluate(&s.point, &s.frame)?)
    })
}

/// Bundle sanity, both identities of the Čech–de Rham comparison, the Čech
/// cocycle condition, and covariance under a change of one lift by `gauge`.
pub fn verify_thm31(
    bundle: &BundleData,
    model: &CentralExtensionModel,
    theta: &ConnectionForm,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let mut rng = seeded(seed);
    let base = &bundle.base;
    let g = model.base();
    let cocycle = dd_cech_cocycle(bundle, model)?;
    let mut report = ReportBuilder::new("thm31", bundle.name(), samples, Some(seed), Tolerance::Numeric(tol));

    let triples = overlap_samples(base, 3, 1, samples, &mut rng)?;
    report.identity(
        "g_{αβ}g_{βγ} = g_{αγ}",
        &residuals(&triples, |(idx, s)| {
            let (a, b, c) = (idx[0], idx[1], idx[2]);
            let lhs = g.mul(&bundle.transition(a, b).eval(&s.point)?, &bundle.transition(b, c).eval(&s.point)?)?;
            Ok(g.space().distance(&lhs, &bundle.transition(a, c).eval(&s.point)?))
        })?,
    );
    report.identity(
        "ρ∘ĝ_{αβ} = g_{αβ}",
        &residuals(&triples, |(idx, s)| {
            let (a, b) = (idx[0], idx[1]);
            let image = model.projection().eval(&bundle.lift(a, b).eval(&s.point)?)?;
            Ok(g.space().distance(&image, &bundle.transition(a, b).eval(&s.point)?))
        })?,
    );

    let pairs = overlap_samples(base, 2, 2, samples, &mut rng)?;
    let c1 = chern_form(model, theta)?;
    report.identity(
        "g*_{αβ}c₁(θ) = κ·d(ĝ*_{αβ}θ)",
        &residuals(&pairs, |(idx, s)| {
            let (a, b) = (idx[0], idx[1]);
            let lhs = pullback(bundle.transition(a, b), &c1)?;
            let rhs = scale(KAPPA, &ext_derivative(&pullback(bundle.lift(a, b), theta.form())?));
            Ok(lhs.evaluate(&s.point, &s.frame)? - rhs.evaluate(&s.point, &s.frame)?)
        })?,
    );
    report.identity(
        "(g_{αβ},g_{βγ})*ŝ*(δθ) + d arg c_{αβγ} = δ̌{ĝ*θ}",
        &identity2_residuals(bundle, model, theta, &triples)?,
    );

    let quads = overlap_samples(base, 4, 0, samples, &mut rng)?;
    report.identity(
        "δc = 1 on U_{αβγδ}",
        &residuals(&quads, |(idx, s)| cocycle.coboundary_phase([idx[0], idx[1], idx[2], idx[3]], &s.point))?,
    );

    let (a0, b0) = (0, 1.min(base.len() - 1));
    let probe = bundle.probe.clone();
    let gauge = move |p: &Point| probe(p);
    let moved = bundle.regauged(model, (a0, b0), gauge.clone());
    let moved_cocycle = dd_cech_cocycle(&moved, model)?;
    report.identity(
        "c′/c = δ̌u",
        &residuals(&triples, |(idx, s)| {
            let t = [idx[0], idx[1], idx[2]];
            let u = gauge(&s.point);
            let expected = [((t[1], t[2]), 1.0), ((t[0], t[2]), -1.0), ((t[0], t[1]), 1.0)]
                .iter()
                .filter(|(pair, _)| *pair == (a0, b0))
                .map(|(_, sign)| sign * u)
                .sum::<f64>();
            Ok(wrap_angle(moved_cocycle.phase(t, &s.point)? - cocycle.phase(t, &s.point)? - expected))
        })?,
    );
    report.identity(
        "identity 2 after regauging",
        &identity2_residuals(&moved, model, theta, &triples)?,
    );
    Ok(report.finish())
}

/// `C_{2,1} = g*_{αβ}c₁(θ)` against `κ·d(ĝ*_{αβ}θ)`.
pub fn verify_cech_forms(
    bundle: &BundleData,
    model: &CentralExtensionModel,
    theta: &ConnectionForm,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let mut rng = seeded(seed);
    let pairs = overlap_samples(&bundle.base, 2, 2, samples, &mut rng)?;
    let mut report = ReportBuilder::new("cech_forms", bundle.name(), samples, Some(seed), Tolerance::Numeric(tol));
    report.identity(
        "C_{2,1} = κ·d(ĝ*_{αβ}θ)",
        &residuals(&pairs, |(idx, s)| {
            let (c21, _) = cech_de_rham_forms(bundle, model, theta, [idx[0], idx[1], idx[1]])?;
            let rhs = scale(KAPPA, &ext_derivative(&pullback(bundle.lift(idx[0], idx[1]), theta.form())?));
            Ok(difference_residuals(&c21, &rhs, std::slice::from_ref(s))?[0])
        })?,
    );
    Ok(report.finish())
}
