//! Residual reports and their JSON, CSV and text renderings.
//!
//! Floats are written with 17 significant digits so that a report parses
//! back to the identical value. Wall time is kept on the struct for callers
//! but left out of every rendering, which keeps output byte-stable.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    Numeric(f64),
    /// Exhaustive or exact-arithmetic check; only a zero residual passes.
    Exact,
}

impl Tolerance {
    pub fn admits(&self, residual: f64) -> bool {
        match self {
            Tolerance::Numeric(t) => residual <= *t,
            Tolerance::Exact => residual == 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityResidual {
    pub name: String,
    pub max: f64,
    pub mean: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub check: String,
    pub model: String,
    pub samples: usize,
    pub seed: Option<u64>,
    pub tol: Tolerance,
    pub max_residual: f64,
    pub mean_residual: f64,
    pub pass: bool,
    pub breakdown: Vec<IdentityResidual>,
    pub wall_time: Duration,
}

impl PartialEq for VerificationReport {
    fn eq(&self, other: &Self) -> bool {
        self.check == other.check
            && self.model == other.model
            && self.samples == other.samples
            && self.seed == other.seed
            && self.tol == other.tol
            && same_float(self.max_residual, other.max_residual)
            && same_float(self.mean_residual, other.mean_residual)
            && self.pass == other.pass
            && self.breakdown.len() == other.breakdown.len()
            && self.breakdown.iter().zip(&other.breakdown).all(|(a, b)| {
                a.name == b.name && same_float(a.max, b.max) && same_float(a.mean, b.mean) && a.pass == b.pass
            })
    }
}

fn same_float(a: f64, b: f64) -> bool {
    a == b || (a.is_nan() && b.is_nan())
}

impl VerificationReport {
    pub fn identity(&self, name: &str) -> Option<&IdentityResidual> {
        self.breakdown.iter().find(|r| r.name == name)
    }
}

/// Collects per-identity residuals and produces the report.
pub struct ReportBuilder {
    check: String,
    model: String,
    samples: usize,
    seed: Option<u64>,
    tol: Tolerance,
    started: Instant,
    breakdown: Vec<IdentityResidual>,
    sum: f64,
    count: usize,
}

impl ReportBuilder {
    pub fn new(check: impl Into<String>, model: impl Into<String>, samples: usize, seed: Option<u64>, tol: Tolerance) -> Self {
        ReportBuilder {
            check: check.into(),
            model: model.into(),
            samples,
            seed,
            tol,
            started: Instant::now(),
            breakdown: Vec::new(),
            sum: 0.0,
            count: 0,
        }
    }

    pub fn tol(&self) -> Tolerance {
        self.tol
    }

    pub fn identity(&mut self, name: impl Into<String>, residuals: &[f64]) -> &mut Self {
        let max = residuals.iter().fold(0.0_f64, |m, &r| if r.is_nan() || m.is_nan() { f64::NAN } else { m.max(r.abs()) });
        let total: f64 = residuals.iter().map(|r| r.abs()).sum();
        let mean = if residuals.is_empty() { 0.0 } else { total / residuals.len() as f64 };
        self.sum += total;
        self.count += residuals.len();
        self.breakdown.push(IdentityResidual {
            name: name.into(),
            max,
            mean,
            pass: self.tol.admits(max),
        });
        self
    }

    pub fn finish(self) -> VerificationReport {
        let max_residual = self
            .breakdown
            .iter()
            .fold(0.0_f64, |m, r| if r.max.is_nan() || m.is_nan() { f64::NAN } else { m.max(r.max) });
        let mean_residual = if self.count == 0 { 0.0 } else { self.sum / self.count as f64 };
        VerificationReport {
            pass: self.tol.admits(max_residual),
            check: self.check,
            model: self.model,
            samples: self.samples,
            seed: self.seed,
            tol: self.tol,
            max_residual,
            mean_residual,
            breakdown: self.breakdown,
            wall_time: self.started.elapsed(),
        }
    }
}

fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// A float written at 17 significant digits, or `null` when not finite.
struct Exact17(f64);

impl Serialize for Exact17 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(sig17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl Serialize for Tolerance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Tolerance::Numeric(t) => Exact17(*t).serialize(s),
            Tolerance::Exact => s.serialize_str("exact"),
        }
    }
}

impl Serialize for IdentityResidual {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("IdentityResidual", 4)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("max", &Exact17(self.max))?;
        st.serialize_field("mean", &Exact17(self.mean))?;
        st.serialize_field("pass", &self.pass)?;
        st.end()
    }
}

impl Serialize for VerificationReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("VerificationReport", 9)?;
        st.serialize_field("check", &self.check)?;
        st.serialize_field("model", &self.model)?;
        st.serialize_field("samples", &self.samples)?;
        st.serialize_field("seed", &self.seed)?;
        st.serialize_field("tol", &self.tol)?;
        st.serialize_field("max_residual", &Exact17(self.max_residual))?;
        st.serialize_field("mean_residual", &Exact17(self.mean_residual))?;
        st.serialize_field("pass", &self.pass)?;
        st.serialize_field("breakdown", &self.breakdown)?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TolRecord {
    Numeric(f64),
    Text(String),
}

#[derive(Deserialize)]
struct IdentityRecord {
    name: String,
    max: Option<f64>,
    mean: Option<f64>,
    pass: bool,
}

#[derive(Deserialize)]
struct ReportRecord {
    check: String,
    model: String,
    samples: usize,
    seed: Option<u64>,
    tol: TolRecord,
    max_residual: Option<f64>,
    mean_residual: Option<f64>,
    pass: bool,
    breakdown: Vec<IdentityRecord>,
}

impl<'de> Deserialize<'de> for VerificationReport {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ReportRecord::deserialize(d)?;
        let tol = match r.tol {
            TolRecord::Numeric(t) => Tolerance::Numeric(t),
            TolRecord::Text(t) if t == "exact" => Tolerance::Exact,
            TolRecord::Text(t) => return Err(serde::de::Error::custom(format!("unknown tolerance {t:?}"))),
        };
        Ok(VerificationReport {
            check: r.check,
            model: r.model,
            samples: r.samples,
            seed: r.seed,
            tol,
            max_residual: r.max_residual.unwrap_or(f64::NAN),
            mean_residual: r.mean_residual.unwrap_or(f64::NAN),
            pass: r.pass,
            breakdown: r
                .breakdown
                .into_iter()
                .map(|b| IdentityResidual {
                    name: b.name,
                    max: b.max.unwrap_or(f64::NAN),
                    mean: b.mean.unwrap_or(f64::NAN),
                    pass: b.pass,
                })
                .collect(),
            wall_time: Duration::ZERO,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format {other:?} (expected json, csv or text)")),
        }
    }
}

pub const CSV_HEADER: [&str; 8] = ["check", "model", "samples", "seed", "tol", "max_residual", "mean_residual", "pass"];

/// JSON array of reports, newline terminated.
pub fn to_json(reports: &[VerificationReport]) -> String {
    let mut out = serde_json::to_string_pretty(reports).expect("reports serialize");
    out.push('\n');
    out
}

pub fn to_csv(reports: &[VerificationReport]) -> String {
    let mut out = CSV_HEADER.join(",");
    out.push('\n');
    for r in reports {
        let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
        let tol = match r.tol {
            Tolerance::Numeric(t) => sig17(t),
            Tolerance::Exact => "exact".into(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.check,
            r.model,
            r.samples,
            seed,
            tol,
            sig17(r.max_residual),
            sig17(r.mean_residual),
            r.pass
        );
    }
    out
}

pub fn to_text(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        for b in &r.breakdown {
            let _ = writeln!(
                out,
                "{:<4} {}/{}: {}  max {:.3e}  mean {:.3e}",
                if b.pass { "ok" } else { "FAIL" },
                r.check,
                r.model,
                b.name,
                b.max,
                b.mean
            );
        }
    }
    out
}

pub fn render(reports: &[VerificationReport], format: Format) -> String {
    match format {
        Format::Json => to_json(reports),
        Format::Csv => to_csv(reports),
        Format::Text => to_text(reports),
    }
}

/// Writes the rendering to `path`, or to stdout when `path` is `None`.
pub fn emit(reports: &[VerificationReport], format: Format, path: Option<&Path>) -> Result<()> {
    let body = render(reports, format);
    match path {
        Some(p) => std::fs::write(p, body).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> VerificationReport {
        let mut b = ReportBuilder::new("prop21", "heisenberg", 3, Some(42), Tolerance::Numeric(1e-6));
        b.identity("lhs = rhs", &[1e-9, 3e-10, 0.1 + 0.2]);
        b.finish()
    }

    #[test]
    fn pass_tracks_max_against_tolerance() {
        let r = sample();
        assert!(!r.pass);
        assert_eq!(r.max_residual, 0.1 + 0.2);
        let mut b = ReportBuilder::new("x", "y", 1, None, Tolerance::Exact);
        b.identity("zero", &[0.0, -0.0]);
        assert!(b.finish().pass);
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let r = sample();
        let text = to_json(std::slice::from_ref(&r));
        let back: Vec<VerificationReport> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, vec![r]);
        assert!(text.contains("3.0000000000000004e-1"));
    }

    #[test]
    fn csv_header_is_fixed() {
        let csv = to_csv(&[sample()]);
        assert_eq!(csv.lines().next().unwrap(), "check,model,samples,seed,tol,max_residual,mean_residual,pass");
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn exact_tolerance_serializes_as_a_string() {
        let mut b = ReportBuilder::new("cocycle", "q8_over_v4", 0, None, Tolerance::Exact);
        b.identity("components", &[0.0]);
        let text = to_json(&[b.finish()]);
        assert!(text.contains("\"tol\": \"exact\""));
        assert!(text.contains("\"seed\": null"));
    }

    #[test]
    fn nan_residual_fails_and_serializes_as_null() {
        let mut b = ReportBuilder::new("c", "m", 1, Some(1), Tolerance::Numeric(1.0));
        b.identity("bad", &[f64::NAN]);
        let r = b.finish();
        assert!(!r.pass);
        assert!(to_json(&[r]).contains("\"max_residual\": null"));
    }
}
