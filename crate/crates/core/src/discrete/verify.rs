//! Exact checks on finite extensions: table laws, the `ℤ_n` class of the
//! section cocycle, and vanishing of the real class.

use num_rational::Rational64;

use crate::error::Result;
use crate::extension::dd_cochain;
use crate::simplicial::{total_d, BigradedCochain};
use crate::manifold::Point;
use crate::report::{ReportBuilder, Tolerance, VerificationReport};

use super::cohomology::{averaging_homotopy, coboundary_values, solve_elimination, solve_exhaustive, ModCochain};
use super::cohomology::{CoboundaryVerdict, EXHAUSTIVE_LIMIT};
use super::finite::FiniteCentralExtension;
use super::smooth::discrete_model;

fn indicator(fails: bool) -> f64 {
    if fails {
        1.0
    } else {
        0.0
    }
}

fn nonzero_count(values: &[u64]) -> f64 {
    values.iter().filter(|&&v| v != 0).count() as f64
}

fn rational_gap(a: &[Rational64], b: &[Rational64]) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            (*d.numer() as f64 / *d.denom() as f64).abs()
        })
        .collect()
}

/// Every group and extension law, with residual 1 for a violation.
pub fn verify_tables(ext: &FiniteCentralExtension) -> VerificationReport {
    let mut report = ReportBuilder::new("tables", ext.name(), ext.hat().order(), None, Tolerance::Exact);
    for (law, violation) in ext.violations() {
        let name = match &violation {
            Some(v) => format!("{law} (violated: {v})"),
            None => law.to_string(),
        };
        report.identity(name, &[indicator(violation.is_some())]);
    }
    report.finish()
}

/// A second section `ŝ′(g) = z^{b(g)} ŝ(g)` with `b(e) = 0`.
pub fn shifted_section(ext: &FiniteCentralExtension) -> (Vec<u64>, Vec<usize>) {
    let (g, h) = (ext.base(), ext.hat());
    let n = ext.modulus();
    let shift: Vec<u64> = (0..g.order())
        .map(|x| if x == g.identity() { 0 } else { ((x * x + 1) % n) as u64 })
        .collect();
    let section = (0..g.order())
        .map(|x| {
            let mut y = ext.section(x);
            for _ in 0..shift[x] {
                y = h.mul(ext.generator(), y);
            }
            y
        })
        .collect();
    (shift, section)
}

/// Decides the `ℤ_n` class of the section cocycle and checks every step.
pub fn verify_coboundary(ext: &FiniteCentralExtension) -> Result<VerificationReport> {
    let g = ext.base();
    let c = ext.section_cocycle()?;
    let mut report = ReportBuilder::new("coboundary", ext.name(), g.order().pow(2), None, Tolerance::Exact);
    report.identity("δc = 0 on G³", &[nonzero_count(c.coboundary(g).values())]);
    let eliminated = solve_elimination(&c, g)?;
    let verdict = if eliminated.is_trivial() { "trivial" } else { "nontrivial" };
    if g.order() <= EXHAUSTIVE_LIMIT {
        let exhaustive = solve_exhaustive(&c, g);
        report.identity(
            format!("exhaustive search agrees: class {verdict}"),
            &[indicator(exhaustive.is_trivial() != eliminated.is_trivial())],
        );
    } else {
        report.identity(format!("class {verdict}"), &[0.0]);
    }
    if let CoboundaryVerdict::Trivial(b) = &eliminated {
        let db = b.coboundary(g);
        let gap: Vec<u64> = c.values().iter().zip(db.values()).map(|(x, y)| u64::from(x != y)).collect();
        report.identity("δb = c for the witness", &[nonzero_count(&gap)]);
    }
    let (shift, section) = shifted_section(ext);
    let c2 = ext.with_section(section)?.section_cocycle()?;
    let b = ModCochain::new(1, g.order(), ext.modulus() as u64, shift);
    let m = ext.modulus() as u64;
    let moved: Vec<u64> = c2
        .values()
        .iter()
        .zip(c.values())
        .zip(b.coboundary(g).values())
        .map(|((x, y), z)| u64::from((x + m - y) % m != *z))
        .collect();
    report.identity("c(ŝ′) − c(ŝ) = δb", &[nonzero_count(&moved)]);
    Ok(report.finish())
}

fn exhaustive_components(c: &BigradedCochain, order: usize, label: impl Fn(usize, &str) -> String, report: &mut ReportBuilder) -> Result<()> {
    for (p, form) in c.components() {
        let frame = vec![Vec::new(); form.degree()];
        let values = (0..order.pow(p as u32))
            .map(|chart| form.evaluate(&Point::new(chart, vec![]), &frame))
            .collect::<Result<Vec<_>>>()?;
        report.identity(label(p, form.label()), &values);
    }
    Ok(())
}

/// The cochain `c₁(θ) ⊕ −κ·ŝ*(δθ)` and its total differential on the
/// 0-dimensional model, evaluated at every point.
pub fn exact_cocycle(ext: &FiniteCentralExtension) -> Result<VerificationReport> {
    let order = ext.base().order();
    let (model, theta) = discrete_model(ext)?;
    let dd = dd_cochain(&model, &theta)?;
    let mut report = ReportBuilder::new("cocycle", ext.name(), order.pow(3), None, Tolerance::Exact);
    exhaustive_components(&dd, order, |p, l| format!("{l} = 0 on G^{p}"), &mut report)?;
    exhaustive_components(&total_d(&dd)?, order, |p, l| format!("{l} = 0 on G^{p}"), &mut report)?;
    Ok(report.finish())
}

/// Exact checks that the real class vanishes.
///
/// The smooth cochain of the 0-dimensional model is identically zero. On the
/// cochain side `k = δc̃/n` is integral, `w = Hk` satisfies `δw = k` over `ℚ`,
/// and `c̃/n − w` is a real cocycle equal to `δ(H(c̃/n − w))`.
pub fn real_vanishing(ext: &FiniteCentralExtension) -> Result<VerificationReport> {
    let g = ext.base();
    let order = g.order();
    let n = ext.modulus() as i64;
    let mut report = ReportBuilder::new("real_vanishing", ext.name(), order.pow(2), None, Tolerance::Exact);

    let (model, theta) = discrete_model(ext)?;
    let dd = dd_cochain(&model, &theta)?;
    exhaustive_components(&dd, order, |p, _| format!("DD on G^{p} vanishes identically"), &mut report)?;

    let c = ext.section_cocycle()?;
    let lifted: Vec<Rational64> = c.lift().iter().map(|&v| Rational64::new(v, n)).collect();
    let zero = Rational64::from_integer(0);
    let k = coboundary_values(&lifted, 2, g, zero);
    let fractional: Vec<f64> = k.iter().map(|v| indicator(!v.is_integer())).collect();
    report.identity("k = δ(c̃/n) is integral", &fractional);

    let w = averaging_homotopy(&k, 3, g);
    report.identity("δ(Hk) = k over ℚ", &rational_gap(&coboundary_values(&w, 2, g, zero), &k));

    let real: Vec<Rational64> = lifted.iter().zip(&w).map(|(a, b)| a - b).collect();
    let b = averaging_homotopy(&real, 2, g);
    report.identity("c̃/n − Hk = δ(H(c̃/n − Hk)) over ℚ", &rational_gap(&coboundary_values(&b, 1, g, zero), &real));
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{FiniteGroupTable, is_coboundary};
    use std::path::PathBuf;

    fn fixture(name: &str) -> FiniteCentralExtension {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.ext"));
        FiniteCentralExtension::load(&path).unwrap()
    }

    #[test]
    fn z4_over_z2_is_nontrivial() {
        let ext = fixture("z4_over_z2");
        let c = ext.section_cocycle().unwrap();
        assert_eq!(c.get(&[1, 1]), 1);
        assert!(!is_coboundary(&c, ext.base()).unwrap().is_trivial());
        let r = verify_coboundary(&ext).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.breakdown.iter().any(|i| i.name.contains("nontrivial")));
    }

    #[test]
    fn q8_is_nontrivial_but_real_trivial() {
        let ext = fixture("q8_over_v4");
        assert!(!is_coboundary(&ext.section_cocycle().unwrap(), ext.base()).unwrap().is_trivial());
        let r = real_vanishing(&ext).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn split_extension_has_a_witness() {
        let ext = fixture("split_v4");
        let r = verify_coboundary(&ext).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.identity("δb = c for the witness").is_some());
        assert!(verify_tables(&ext).pass);
    }

    #[test]
    fn tables_report_names_the_violation() {
        let ext = fixture("z4_over_z2");
        let broken = ext.with_section(vec![1, 1]);
        let report = match broken {
            Ok(e) => verify_tables(&e),
            Err(_) => return,
        };
        assert!(!report.pass);
        assert!(report.breakdown.iter().any(|i| !i.pass && i.name.contains("violated")));
    }

    #[test]
    fn discrete_cocycle_is_exactly_zero() {
        for name in ["z4_over_z2", "q8_over_v4", "split_v4"] {
            let r = exact_cocycle(&fixture(name)).unwrap();
            assert!(r.pass, "{r:?}");
            assert!(r.breakdown.len() >= 2);
        }
    }

    #[test]
    fn cyclic_real_vanishing_uses_a_nonzero_k() {
        let g = FiniteGroupTable::cyclic(2);
        let ext = fixture("z4_over_z2");
        assert_eq!(ext.base(), &g);
        let r = real_vanishing(&ext).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
