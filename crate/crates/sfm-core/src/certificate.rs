//! Serialized optimality certificates.
//!
//! A certificate is self-contained: given only oracle access it can be
//! re-checked from scratch. It names the claimed minimizer X, a convex
//! combination of extreme bases (each with the ordering that regenerates it
//! by the greedy rule), the flow the solver ended with, and the duality gap
//! f(X) − x⁻(V). A gap below 1 proves optimality for integer-valued f.

use crate::base::{ConvexCombination, ExtremeBase};
use crate::flow::Flow;
use crate::oracle::GroundSet;
use crate::rational::{format_rational, format_rationals, Rational};
use crate::subset::Subset;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    /// Claimed minimizer, as ground-set labels.
    #[serde(rename = "X")]
    pub x_set: Vec<String>,
    /// Convex weights, one per base, as "p/q" strings.
    pub lambda: Vec<String>,
    pub bases: Vec<CertificateBase>,
    /// Flow matrix, row major: phi[u][v].
    pub phi: Vec<Vec<String>>,
    /// f(X) − x⁻(V).
    pub gap: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateBase {
    /// Linear ordering that regenerates y, as labels.
    pub ordering: Vec<String>,
    /// Base vector indexed like the ground set, as "p/q" strings.
    pub y: Vec<String>,
}

impl CertificateDoc {
    pub fn from_solver_state(
        ground: &GroundSet,
        minimizer: &Subset,
        combination: &ConvexCombination,
        phi: &Flow,
        gap: &Rational,
    ) -> CertificateDoc {
        let n = ground.size();
        let bases = combination
            .entries()
            .iter()
            .map(|e| base_to_doc(ground, &e.base))
            .collect();
        let lambda = combination
            .entries()
            .iter()
            .map(|e| format_rational(&e.lambda))
            .collect();
        let phi_rows = (0..n)
            .map(|u| (0..n).map(|v| format_rational(&phi.get(u, v))).collect())
            .collect();
        CertificateDoc {
            x_set: ground.subset_labels(minimizer),
            lambda,
            bases,
            phi: phi_rows,
            gap: format_rational(gap),
        }
    }
}

fn base_to_doc(ground: &GroundSet, base: &ExtremeBase) -> CertificateBase {
    CertificateBase {
        ordering: base
            .ordering()
            .as_slice()
            .iter()
            .map(|&v| ground.label(v).to_string())
            .collect(),
        y: format_rationals(base.y()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_with_stable_field_names() {
        let doc = CertificateDoc {
            x_set: vec!["a".into()],
            lambda: vec!["1".into()],
            bases: vec![CertificateBase {
                ordering: vec!["a".into(), "b".into()],
                y: vec!["-1".into(), "2".into()],
            }],
            phi: vec![
                vec!["0".into(), "1/2".into()],
                vec!["-1/2".into(), "0".into()],
            ],
            gap: "0".into(),
        };
        let json = serde_json::to_string(&doc).unwrap();
        assert!(json.contains("\"X\":[\"a\"]"));
        let back: CertificateDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
    }
}
