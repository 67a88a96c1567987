//! Structured outcomes of verification runs, serializable for the CLI and
//! replayable from a saved report.

use crate::geometry::{GeometrySpec, TargetGeometry};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// The first failing case of a sweep, with enough data to re-run it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Counterexample {
    /// deterministic case identifier, stable across runs
    pub case: String,
    pub inputs: String,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub geometry: String,
    pub parameters: BTreeMap<String, String>,
    pub status: CheckStatus,
    pub cases_run: u64,
    pub first_counterexample: Option<Counterexample>,
    pub wall_time_ms: u128,
    /// hash of the generator order and the diagonal decomposition signs, so
    /// cross-version comparisons detect convention drift
    pub fingerprint: String,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

/// Canonical description of the sign conventions a geometry induces: basis
/// order and bidegrees, the diagonal decompositions of the unit and the
/// Todd class, and the generator-order version tag.
pub fn convention_fingerprint(specs: &[GeometrySpec]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"generator-order:v1;families=hol,top,pairhol,pairtop,lattice,formal;");
    for spec in specs {
        hasher.update(spec.to_string().as_bytes());
        hasher.update(b";");
        if let Ok(geom) = TargetGeometry::preset(spec) {
            for b in &geom.basis {
                hasher.update(format!("{}:{},{};", b.name, b.p, b.q).as_bytes());
            }
            for twist in [geom.unit(), geom.todd.clone()] {
                if let Ok(pairs) = geom.diagonal_kunneth(&twist) {
                    for p in pairs {
                        hasher.update(format!("{}|", p.left).as_bytes());
                        for c in &p.right.0 {
                            hasher.update(crate::rat::render_rat(c).as_bytes());
                            hasher.update(b",");
                        }
                    }
                }
            }
        }
    }
    let digest = hasher.finalize();
    digest.iter().take(12).map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fingerprint_stable_and_discriminating() {
        let a = convention_fingerprint(&[GeometrySpec::Curve(2)]);
        let b = convention_fingerprint(&[GeometrySpec::Curve(2)]);
        assert_eq!(a, b);
        let c = convention_fingerprint(&[GeometrySpec::P2]);
        assert_ne!(a, c);
    }

    #[test]
    fn report_round_trips_through_json() {
        let report = CheckReport {
            suite: "thaddeus".into(),
            geometry: "-".into(),
            parameters: [("g".to_string(), "2..6".to_string())]
                .into_iter()
                .collect(),
            status: CheckStatus::Pass,
            cases_run: 42,
            first_counterexample: None,
            wall_time_ms: 7,
            fingerprint: "abc".into(),
        };
        let text = serde_json::to_string(&report).unwrap();
        let back: CheckReport = serde_json::from_str(&text).unwrap();
        assert!(back.passed());
        assert_eq!(back.cases_run, 42);
    }
}
