//! Dispatch from `(check, model)` names to verification reports.

use std::fmt;

use crate::cech::verify_thm31;
use crate::chernsimons::{verify_thm41, verify_transgression};
use crate::discrete::{exact_cocycle, real_vanishing, verify_coboundary, verify_tables};
use crate::error::Error;
use crate::extension::{connection_independence, dd_cochain, verify_prop21, verify_prop22};
use crate::models::{self, ModelKind, CATALOG};
use crate::report::VerificationReport;
use crate::simplicial::verify_cocycle;

/// Every check name, in run order.
pub const CHECKS: [&str; 10] = [
    "prop21",
    "prop22",
    "cocycle",
    "prop23",
    "thm31",
    "thm41",
    "transgress",
    "coboundary",
    "real_vanishing",
    "tables",
];

pub const ALL: &str = "all";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            samples: 200,
            tol: 1e-6,
            seed: 42,
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    /// Unknown or incompatible names, or bad arguments.
    Usage(String),
    /// A model or its data failed a consistency check.
    Model(Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => 2,
            RunError::Model(_) => 3,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Usage(m) => write!(f, "usage: {m}"),
            RunError::Model(e) => write!(f, "model error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Model(e)
    }
}

/// Whether `check` makes sense on `model`.
pub fn applicable(check: &str, model: &str) -> bool {
    match models::kind(model) {
        Some(ModelKind::Smooth) => matches!(check, "prop21" | "prop22" | "cocycle" | "thm41" | "transgress"),
        Some(ModelKind::Bundle) => check == "thm31",
        Some(ModelKind::ConnectionPair) => check == "prop23",
        Some(ModelKind::Finite) => matches!(check, "cocycle" | "coboundary" | "real_vanishing" | "tables"),
        None => false,
    }
}

fn run_one(check: &str, model: &str, cfg: RunConfig) -> Result<Vec<VerificationReport>, RunError> {
    let RunConfig { samples, tol, seed } = cfg;
    let reports = match models::kind(model) {
        Some(ModelKind::Smooth) => {
            let (m, theta) = models::smooth(model)?;
            vec![match check {
                "prop21" => verify_prop21(&m, &theta, samples, tol, seed)?,
                "prop22" => verify_prop22(&m, &theta, samples, tol, seed)?,
                "cocycle" => verify_cocycle(&dd_cochain(&m, &theta)?, model, samples, tol, seed)?,
                "thm41" => verify_thm41(&m, &theta, samples, tol, seed)?,
                _ => verify_transgression(&m, &theta, samples, tol, seed)?,
            }]
        }
        Some(ModelKind::Bundle) => models::bundle_suite()?
            .iter()
            .map(|(b, m, theta)| verify_thm31(b, m, theta, samples, tol, seed))
            .collect::<Result<_, _>>()?,
        Some(ModelKind::ConnectionPair) => models::connection_pairs()?
            .iter()
            .map(|(m, t0, t1)| connection_independence(m, t0, t1, samples, tol, seed))
            .collect::<Result<_, _>>()?,
        Some(ModelKind::Finite) => {
            let ext = models::finite(model)?;
            if check != "tables" {
                if let Some(v) = ext.first_violation() {
                    return Err(Error::inconsistent(format!("{model}: {v}")).into());
                }
            }
            vec![match check {
                "cocycle" => exact_cocycle(&ext)?,
                "coboundary" => verify_coboundary(&ext)?,
                "real_vanishing" => real_vanishing(&ext)?,
                _ => verify_tables(&ext),
            }]
        }
        None => unreachable!("names are resolved before dispatch"),
    };
    Ok(reports)
}

/// Runs one `(check, model)` pair, either of which may be [`ALL`].
///
/// An explicit pair must be applicable; with `all`, inapplicable pairs are
/// skipped. Reports come back in catalog order, check order within a model.
pub fn run(check: &str, model: &str, cfg: RunConfig) -> Result<Vec<VerificationReport>, RunError> {
    if cfg.samples == 0 {
        return Err(RunError::Usage("--samples must be at least 1".into()));
    }
    if !(cfg.tol >= 0.0) {
        return Err(RunError::Usage(format!("--tol must be non-negative, got {}", cfg.tol)));
    }
    if check != ALL && !CHECKS.contains(&check) {
        return Err(RunError::Usage(format!("unknown check {check:?}; known: {}", CHECKS.join(", "))));
    }
    if model != ALL && models::kind(model).is_none() {
        return Err(RunError::Usage(format!("unknown model {model:?}; known: {}", CATALOG.join(", "))));
    }
    if check != ALL && model != ALL && !applicable(check, model) {
        return Err(RunError::Usage(format!("check {check} does not apply to model {model}")));
    }
    let mut reports = Vec::new();
    for m in CATALOG.iter().filter(|m| model == ALL || **m == model) {
        for c in CHECKS.iter().filter(|c| check == ALL || **c == check) {
            if applicable(c, m) {
                reports.extend(run_one(c, m, cfg)?);
            }
        }
    }
    if reports.is_empty() {
        return Err(RunError::Usage(format!("no check in {check:?} applies to {model:?}")));
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> RunConfig {
        RunConfig {
            samples: 20,
            ..RunConfig::default()
        }
    }

    #[test]
    fn names_are_resolved() {
        assert_eq!(run("prop99", "heisenberg", quick()).unwrap_err().exit_code(), 2);
        assert_eq!(run("prop21", "sl2", quick()).unwrap_err().exit_code(), 2);
        assert_eq!(run("thm31", "heisenberg", quick()).unwrap_err().exit_code(), 2);
        assert_eq!(run("prop21", "heisenberg", RunConfig { samples: 0, ..quick() }).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn every_check_has_a_model() {
        for c in CHECKS {
            assert!(CATALOG.iter().any(|m| applicable(c, m)), "{c}");
        }
    }

    #[test]
    fn finite_checks_are_exact() {
        let reports = run(ALL, "q8_over_v4", quick()).unwrap();
        assert_eq!(reports.len(), 4);
        assert!(reports.iter().all(|r| r.pass && r.seed.is_none()));
    }

    #[test]
    fn tolerance_below_the_floor_fails() {
        let r = run("prop21", "heisenberg", RunConfig { tol: 1e-15, ..quick() }).unwrap();
        assert!(!r[0].pass);
    }
}
