//! The Chern–Simons cochain on `N̄G` and its edge restriction.
//!
//! On `N̄G(1) = G×G`, with `γ(h₁,h₂) = h₁h₂⁻¹`, the bundle
//! `ε̄₀*Ĝ ⊗ γ*Ĝ ⊗ (ε̄₁*Ĝ)⁻¹` is trivialized on patches by
//!
//! ```text
//! s̄*(δ̄θ) = ε̄₀*(η*θ) + γ*(η′*θ) − ε̄₁*(η″*θ) + s′·d(arg c̄),
//! c̄(h₁,h₂) = η′(h₁h₂⁻¹)·η(h₂)·η″(h₁)⁻¹ ∈ ker ρ,
//! ```
//!
//! where `η`, `η′`, `η″` are the sections of the patches holding `h₂`,
//! `h₁h₂⁻¹` and `h₁`.

use std::sync::Arc;

use crate::error::Result;
use crate::extension::{chern_form, dd_cochain, difference_residuals, shat_delta_theta, CentralExtensionModel, ConnectionForm};
use crate::manifold::{angle_differential, ext_derivative, linear_combine, patchwise, pullback, scale, FormField, Point, SelectFn, KAPPA};
use crate::report::{ReportBuilder, Tolerance, VerificationReport};
use crate::sampling::{residuals, sample_frames, seeded};
use crate::simplicial::{total_d, BigradedCochain};

/// Coefficient of `d(arg c̄)` in `s̄*(δ̄θ)`.
pub const BAR_PHASE_SIGN: f64 = -1.0;

/// `c̄(h₁,h₂)` for fixed patches `[η, η′, η″]`.
pub fn bar_comparison_element(
    model: &CentralExtensionModel,
    patches: [usize; 3],
    h1: &Point,
    h2: &Point,
) -> Result<Point> {
    let [l0, l1, l2] = patches;
    let (g, t) = (model.base(), model.total());
    let quotient = g.mul(h1, &g.inv(h2)?)?;
    let left = t.mul(&model.section(l1, &quotient)?, &model.section(l0, h2)?)?;
    t.mul(&left, &t.inv(&model.section(l2, h1)?)?)
}

/// Patches holding `(h₂, h₁h₂⁻¹, h₁)`.
pub fn bar_patch_triple(model: &CentralExtensionModel, h1: &Point, h2: &Point) -> Result<[usize; 3]> {
    let g = model.base();
    Ok([model.patch_of(h2)?, model.patch_of(&g.mul(h1, &g.inv(h2)?)?)?, model.patch_of(h1)?])
}

fn sbar_piece(model: &CentralExtensionModel, pulled: &[FormField], patches: [usize; 3]) -> Result<FormField> {
    let nbar = model.nbar();
    let level = nbar.level(1)?.clone();
    let m = model.clone();
    let split = level.clone();
    let phase = angle_differential(format!("d arg c̄{patches:?}"), &level, move |p| {
        let parts = split.split(p);
        m.kernel_angle(&bar_comparison_element(&m, patches, &parts[0], &parts[1])?)
    });
    let terms = vec![
        pullback(&nbar.face(1, 0)?, &pulled[patches[0]])?,
        pullback(&nbar.gamma(1)?, &pulled[patches[1]])?,
        pullback(&nbar.face(1, 1)?, &pulled[patches[2]])?,
        phase,
    ];
    Ok(linear_combine(&[1.0, 1.0, -1.0, BAR_PHASE_SIGN], &terms)?.relabel(format!("s̄*(δ̄θ){patches:?}")))
}

/// `s̄*(δ̄θ)` with the patches held fixed.
pub fn sbar_delta_theta_on(
    model: &CentralExtensionModel,
    theta: &ConnectionForm,
    patches: [usize; 3],
) -> Result<FormField> {
    let pulled = model
        .cover()
        .iter()
        .map(|v| pullback(v.section(), theta.form()))
        .collect::<Result<Vec<_>>>()?;
    sbar_piece(model, &pulled, patches)
}

/// `s̄*(δ̄θ)` on `N̄G(1)`, patches chosen at the query point.
pub fn sbar_delta_theta(model: &CentralExtensionModel, theta: &ConnectionForm) -> Result<FormField> {
    let n = model.cover().len();
    let pulled = model
        .cover()
        .iter()
        .map(|v| pullback(v.section(), theta.form()))
        .collect::<Result<Vec<_>>>()?;
    let mut pieces = Vec::with_capacity(n * n * n);
    for l0 in 0..n {
        for l1 in 0..n {
            for l2 in 0..n {
                pieces.push(sbar_piece(model, &pulled, [l0, l1, l2])?);
            }
        }
    }
    let level = model.nbar().level(1)?.clone();
    let m = model.clone();
    let split = level.clone();
    let select: SelectFn = Arc::new(move |p: &Point| {
        let parts = split.split(p);
        let [a, b, c] = bar_patch_triple(&m, &parts[0], &parts[1])?;
        Ok((a * n + b) * n + c)
    });
    patchwise("s̄*(δ̄θ)", 1, &level, select, pieces)
}

/// `c₁(θ)` on `N̄G(0)` and `−κ·s̄*(δ̄θ)` on `N̄G(1)`.
#[derive(Clone, Debug)]
pub struct CsCochain {
    cochain: BigradedCochain,
}

impl CsCochain {
    pub fn cochain(&self) -> &BigradedCochain {
        &self.cochain
    }

    /// The `(0,2)` component.
    pub fn edge(&self) -> &FormField {
        self.cochain.component(0).expect("CS cochain has an edge component")
    }
}

pub fn cs_cochain(model: &CentralExtensionModel, theta: &ConnectionForm) -> Result<CsCochain> {
    let sbar = scale(-KAPPA, &sbar_delta_theta(model, theta)?).relabel("−κ·s̄*(δ̄θ)");
    let cochain = BigradedCochain::new(model.nbar(), 2)
        .with(0, chern_form(model, theta)?)?
        .with(1, sbar)?;
    Ok(CsCochain { cochain })
}

/// `γ*` applied componentwise to a cochain on `NG`.
pub fn gamma_pullback(model: &CentralExtensionModel, c: &BigradedCochain) -> Result<BigradedCochain> {
    let nbar = model.nbar();
    let mut out = BigradedCochain::new(nbar, c.total_degree());
    for (p, form) in c.components() {
        out = out.with(p, pullback(&nbar.gamma(p)?, form)?)?;
    }
    Ok(out)
}

/// The edge restriction of the Chern–Simons cochain, a 2-form on `G`.
pub fn transgress(model: &CentralExtensionModel, theta: &ConnectionForm) -> Result<FormField> {
    Ok(cs_cochain(model, theta)?.edge().clone())
}

/// Largest `|ε_i(γ(x)) − γ(ε̄_i(x))|` over `i` at sampled points of `N̄G(2)`.
fn gamma_commutation(model: &CentralExtensionModel, samples: usize, rng: &mut dyn rand::RngCore) -> Result<Vec<f64>> {
    let (ng, nbar) = (model.ng(), model.nbar());
    let level = nbar.level(2)?;
    let pts: Vec<Point> = sample_frames(level, samples, 0, rng)?.into_iter().map(|s| s.point).collect();
    let target = ng.level(1)?.clone();
    let (g2, g1) = (nbar.gamma(2)?, nbar.gamma(1)?);
    let pairs: Vec<(crate::manifold::SmoothMap, crate::manifold::SmoothMap)> =
        (0..3).map(|i| Ok((ng.face(2, i)?, nbar.face(2, i)?))).collect::<Result<_>>()?;
    residuals(&pts, |x| {
        let mut worst: f64 = 0.0;
        for (e, ebar) in &pairs {
            let a = e.eval(&g2.eval(x)?)?;
            let b = g1.eval(&ebar.eval(x)?)?;
            worst = worst.max(target.distance(&a, &b));
        }
        Ok(worst)
    })
}

/// Both identities behind the Chern–Simons cochain, `ε_i∘γ = γ∘ε̄_i`, and
/// `D(CS) = γ*(DD)` level by level.
pub fn verify_thm41(
    model: &CentralExtensionModel,
    theta: &ConnectionForm,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let mut rng = seeded(seed);
    let nbar = model.nbar();
    let c1 = chern_form(model, theta)?;
    let sbar = sbar_delta_theta(model, theta)?;
    let mut report = ReportBuilder::new("thm41", model.name(), samples, Some(seed), Tolerance::Numeric(tol));

    let lhs1 = linear_combine(
        &[1.0, 1.0, -1.0],
        &[pullback(&nbar.face(1, 0)?, &c1)?, pullback(&nbar.gamma(1)?, &c1)?, pullback(&nbar.face(1, 1)?, &c1)?],
    )?;
    let rhs1 = scale(KAPPA, &ext_derivative(&sbar));
    let pts1 = sample_frames(nbar.level(1)?, samples, 2, &mut rng)?;
    report.identity("(ε̄₀*+γ*−ε̄₁*)c₁(θ) = κ·d(s̄*(δ̄θ))", &difference_residuals(&lhs1, &rhs1, &pts1)?);

    let lhs2 = nbar.d_prime(1, &sbar)?;
    let rhs2 = pullback(&nbar.gamma(2)?, &shat_delta_theta(model, theta)?)?;
    let pts2 = sample_frames(nbar.level(2)?, samples, 1, &mut rng)?;
    report.identity("(ε̄₀*−ε̄₁*+ε̄₂*)s̄*(δ̄θ) = γ*ŝ*(δθ)", &difference_residuals(&lhs2, &rhs2, &pts2)?);

    report.identity("ε_i∘γ = γ∘ε̄_i", &gamma_commutation(model, samples, &mut rng)?);

    let dcs = total_d(cs_cochain(model, theta)?.cochain())?;
    let pulled = gamma_pullback(model, &dd_cochain(model, theta)?)?;
    for p in 0..=2 {
        let level = nbar.level(p)?;
        let degree = 3 - p;
        if degree > level.dim() {
            continue;
        }
        let zero = FormField::zero(degree, level);
        let lhs = dcs.component(p).unwrap_or(&zero);
        let rhs = pulled.component(p).unwrap_or(&zero);
        let pts = sample_frames(level, samples, degree, &mut rng)?;
        report.identity(format!("D(CS) = γ*(DD) on level {p}"), &difference_residuals(lhs, rhs, &pts)?);
    }
    Ok(report.finish())
}

/// The edge of the Chern–Simons cochain against `c₁(θ)`.
pub fn verify_transgression(
    model: &CentralExtensionModel,
    theta: &ConnectionForm,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    let edge = transgress(model, theta)?;
    let c1 = chern_form(model, theta)?;
    let pts = sample_frames(model.base().space(), samples, 2, &mut seeded(seed))?;
    let mut report = ReportBuilder::new("transgress", model.name(), samples, Some(seed), Tolerance::Numeric(tol));
    report.identity("CS^{0,2} = c₁(θ)", &difference_residuals(&edge, &c1, &pts)?);
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{heisenberg, u2};

    #[test]
    fn identities_on_both_models() {
        for (m, theta) in [
            {
                let m = heisenberg::model().unwrap();
                let t = heisenberg::connection(&m).unwrap();
                (m, t)
            },
            {
                let m = u2::model().unwrap();
                let t = u2::connection(&m).unwrap();
                (m, t)
            },
        ] {
            let r = verify_thm41(&m, &theta, 30, 1e-6, 11).unwrap();
            for id in &r.breakdown {
                eprintln!("{} {} {:e}", m.name(), id.name, id.max);
            }
            let t = verify_transgression(&m, &theta, 30, 1e-10, 12).unwrap();
            assert!(t.pass, "{t:?}");
        }
    }
}
