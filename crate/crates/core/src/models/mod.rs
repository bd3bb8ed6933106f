//! Concrete extensions, bundles and finite groups, with a name catalog.

pub mod bundles;
pub mod heisenberg;
pub mod u2;

use std::path::PathBuf;

use crate::cech::BundleData;
use crate::discrete::FiniteCentralExtension;
use crate::error::{Error, Result};
use crate::extension::{CentralExtensionModel, ConnectionForm};

/// Every name the command line accepts, in run order.
pub const CATALOG: [&str; 7] = [
    heisenberg::NAME,
    u2::NAME,
    bundles::SO3_NAME,
    "z4_over_z2",
    "q8_over_v4",
    "split_v4",
    CONNECTION_PAIR,
];

pub const CONNECTION_PAIR: &str = "connection_pair";

/// What a catalog name builds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    /// A Lie group extension with a connection.
    Smooth,
    /// Principal bundles with lifts, for the Čech comparison.
    Bundle,
    /// Two connections differing by a basic form.
    ConnectionPair,
    /// A finite central extension read from the fixtures.
    Finite,
}

pub fn kind(name: &str) -> Option<ModelKind> {
    match name {
        heisenberg::NAME | u2::NAME => Some(ModelKind::Smooth),
        bundles::SO3_NAME => Some(ModelKind::Bundle),
        CONNECTION_PAIR => Some(ModelKind::ConnectionPair),
        "z4_over_z2" | "q8_over_v4" | "split_v4" => Some(ModelKind::Finite),
        _ => None,
    }
}

fn unknown(name: &str) -> Error {
    Error::Precondition(format!("unknown model {name:?}; known: {}", CATALOG.join(", ")))
}

/// Environment variable that replaces the shipped fixtures directory.
pub const FIXTURES_ENV: &str = "DDVERIFY_FIXTURES";

/// Directory holding the group tables and extension files.
pub fn fixtures_dir() -> PathBuf {
    match std::env::var_os(FIXTURES_ENV) {
        Some(dir) => PathBuf::from(dir),
        None => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"),
    }
}

/// A smooth extension with its reference connection.
pub fn smooth(name: &str) -> Result<(CentralExtensionModel, ConnectionForm)> {
    let model = match name {
        heisenberg::NAME => heisenberg::model()?,
        u2::NAME => u2::model()?,
        _ => return Err(unknown(name)),
    };
    let theta = match name {
        heisenberg::NAME => heisenberg::connection(&model)?,
        _ => u2::connection(&model)?,
    };
    Ok((model, theta))
}

/// `θ₁ = θ₀ + ρ*β` on both smooth models.
pub fn connection_pairs() -> Result<Vec<(CentralExtensionModel, ConnectionForm, ConnectionForm)>> {
    [heisenberg::NAME, u2::NAME]
        .into_iter()
        .map(|name| {
            let (model, theta0) = smooth(name)?;
            let beta = match name {
                heisenberg::NAME => heisenberg::basic_shift(&model),
                _ => u2::basic_shift(&model),
            };
            let theta1 = theta0.shifted_by(&model, &beta)?;
            Ok((model, theta0, theta1))
        })
        .collect()
}

/// The shipped bundles: over `SO(3)` with structure group `SO(3)`, and over
/// the torus with structure group `ℝ²`.
pub fn bundle_suite() -> Result<Vec<(BundleData, CentralExtensionModel, ConnectionForm)>> {
    let (u2_model, u2_theta) = smooth(u2::NAME)?;
    let (h_model, h_theta) = smooth(heisenberg::NAME)?;
    Ok(vec![
        (bundles::so3_coboundary(&u2_model)?, u2_model, u2_theta),
        (bundles::heisenberg_torus(&h_model)?, h_model, h_theta),
    ])
}

pub fn finite(name: &str) -> Result<FiniteCentralExtension> {
    if kind(name) != Some(ModelKind::Finite) {
        return Err(unknown(name));
    }
    FiniteCentralExtension::load(&fixtures_dir().join(format!("{name}.ext")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_catalog_name_builds() {
        for name in CATALOG {
            match kind(name).unwrap() {
                ModelKind::Smooth => drop(smooth(name).unwrap()),
                ModelKind::Bundle => assert_eq!(bundle_suite().unwrap().len(), 2),
                ModelKind::ConnectionPair => assert_eq!(connection_pairs().unwrap().len(), 2),
                ModelKind::Finite => assert!(finite(name).unwrap().first_violation().is_none()),
            }
        }
        assert!(kind("sl2").is_none());
        assert!(smooth("sl2").is_err());
    }
}
