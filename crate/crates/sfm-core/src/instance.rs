//! Instance file formats.
//!
//! Explicit tables, coverage, matroid-rank and concave-cardinality instances
//! travel as JSON documents tagged by a "type" field; rational values may be
//! written as plain integers or as "p/q" strings. Cut instances use a line
//! format: `cut <n> <m> <directed|undirected>` followed by m lines `u v cap`.

use crate::error::SfmError;
use crate::oracle::FunctionFamily;
use crate::rational::{format_rational, parse_rational, Rational};
use num_traits::One;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatValue {
    Int(i64),
    Str(String),
}

impl RatValue {
    fn to_rational(&self) -> Result<Rational, SfmError> {
        match self {
            RatValue::Int(i) => Ok(crate::rational::rat_int(*i)),
            RatValue::Str(s) => parse_rational(s),
        }
    }

    fn from_rational(r: &Rational) -> RatValue {
        if r.denom().is_one() {
            if let Ok(i) = i64::try_from(r.numer().clone()) {
                return RatValue::Int(i);
            }
        }
        RatValue::Str(format_rational(r))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type")]
enum InstanceJson {
    #[serde(rename = "table")]
    Table {
        labels: Vec<String>,
        values: Vec<RatValue>,
    },
    #[serde(rename = "coverage")]
    Coverage {
        labels: Vec<String>,
        item_weights: Vec<RatValue>,
        covers: Vec<Vec<usize>>,
        costs: Vec<RatValue>,
    },
    #[serde(rename = "matroid")]
    Matroid {
        labels: Vec<String>,
        blocks: Vec<Vec<usize>>,
        caps: Vec<u64>,
    },
    #[serde(rename = "concave")]
    Concave {
        labels: Vec<String>,
        g: Vec<RatValue>,
        w: Vec<RatValue>,
    },
}

fn to_rationals(values: &[RatValue]) -> Result<Vec<Rational>, SfmError> {
    values.iter().map(|v| v.to_rational()).collect()
}

fn from_rationals(values: &[Rational]) -> Vec<RatValue> {
    values.iter().map(RatValue::from_rational).collect()
}

/// Parses either format, sniffing cut instances by their leading keyword.
pub fn parse_instance(text: &str) -> Result<FunctionFamily, SfmError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with("cut ") || trimmed.starts_with("cut\t") || trimmed == "cut" {
        return parse_cut_text(text);
    }
    let doc: InstanceJson = serde_json::from_str(text).map_err(|e| {
        SfmError::InvalidInput(format!(
            "line {} column {}: {}",
            e.line(),
            e.column(),
            e
        ))
    })?;
    match doc {
        InstanceJson::Table { labels, values } => Ok(FunctionFamily::ExplicitTable {
            labels,
            values: to_rationals(&values)?,
        }),
        InstanceJson::Coverage {
            labels,
            item_weights,
            covers,
            costs,
        } => Ok(FunctionFamily::Coverage {
            labels,
            item_weights: to_rationals(&item_weights)?,
            covers,
            costs: to_rationals(&costs)?,
        }),
        InstanceJson::Matroid {
            labels,
            blocks,
            caps,
        } => Ok(FunctionFamily::MatroidRank {
            labels,
            blocks,
            caps,
        }),
        InstanceJson::Concave { labels, g, w } => Ok(FunctionFamily::ConcaveCardinality {
            labels,
            g: to_rationals(&g)?,
            w: to_rationals(&w)?,
        }),
    }
}

fn parse_cut_text(text: &str) -> Result<FunctionFamily, SfmError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (header_no, header) = lines
        .next()
        .ok_or_else(|| SfmError::InvalidInput("empty cut instance".to_string()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "cut" {
        return Err(SfmError::InvalidInput(format!(
            "line {}: expected header `cut <n> <m> <directed|undirected>`",
            header_no + 1
        )));
    }
    let n: usize = fields[1].parse().map_err(|_| {
        SfmError::InvalidInput(format!("line {}: bad vertex count", header_no + 1))
    })?;
    let m: usize = fields[2].parse().map_err(|_| {
        SfmError::InvalidInput(format!("line {}: bad edge count", header_no + 1))
    })?;
    let directed = match fields[3] {
        "directed" => true,
        "undirected" => false,
        other => {
            return Err(SfmError::InvalidInput(format!(
                "line {}: expected directed or undirected, got {other:?}",
                header_no + 1
            )))
        }
    };
    let mut edges = Vec::with_capacity(m);
    for (line_no, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(SfmError::InvalidInput(format!(
                "line {}: expected `u v cap`",
                line_no + 1
            )));
        }
        let u: usize = parts[0].parse().map_err(|_| {
            SfmError::InvalidInput(format!("line {}: bad endpoint {:?}", line_no + 1, parts[0]))
        })?;
        let v: usize = parts[1].parse().map_err(|_| {
            SfmError::InvalidInput(format!("line {}: bad endpoint {:?}", line_no + 1, parts[1]))
        })?;
        let cap = parse_rational(parts[2]).map_err(|e| {
            SfmError::InvalidInput(format!("line {}: {e}", line_no + 1))
        })?;
        edges.push((u, v, cap));
    }
    if edges.len() != m {
        return Err(SfmError::InvalidInput(format!(
            "header announced {m} edges but {} followed",
            edges.len()
        )));
    }
    Ok(FunctionFamily::Cut {
        labels: (0..n).map(|i| format!("v{i}")).collect(),
        directed,
        edges,
    })
}

/// Canonical serialization; parsing it back yields an equal instance, and
/// equal instances serialize to identical bytes.
pub fn serialize_instance(family: &FunctionFamily) -> String {
    match family {
        FunctionFamily::Cut {
            labels,
            directed,
            edges,
        } => {
            let mut out = format!(
                "cut {} {} {}\n",
                labels.len(),
                edges.len(),
                if *directed { "directed" } else { "undirected" }
            );
            for (u, v, cap) in edges {
                out.push_str(&format!("{u} {v} {}\n", format_rational(cap)));
            }
            out
        }
        FunctionFamily::ExplicitTable { labels, values } => pretty(&InstanceJson::Table {
            labels: labels.clone(),
            values: from_rationals(values),
        }),
        FunctionFamily::Coverage {
            labels,
            item_weights,
            covers,
            costs,
        } => pretty(&InstanceJson::Coverage {
            labels: labels.clone(),
            item_weights: from_rationals(item_weights),
            covers: covers.clone(),
            costs: from_rationals(costs),
        }),
        FunctionFamily::MatroidRank {
            labels,
            blocks,
            caps,
        } => pretty(&InstanceJson::Matroid {
            labels: labels.clone(),
            blocks: blocks.clone(),
            caps: caps.clone(),
        }),
        FunctionFamily::ConcaveCardinality { labels, g, w } => pretty(&InstanceJson::Concave {
            labels: labels.clone(),
            g: from_rationals(g),
            w: from_rationals(w),
        }),
    }
}

fn pretty(doc: &InstanceJson) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("instances always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate, FamilyKind, GENERATOR_FAMILIES};
    use crate::rational::{rat, rat_int};

    #[test]
    fn parses_table_json_with_mixed_value_forms() {
        let text = r#"{"type":"table","labels":["a","b"],"values":[0,"-1",2,"1/1"]}"#;
        let fam = parse_instance(text).unwrap();
        match fam {
            FunctionFamily::ExplicitTable { labels, values } => {
                assert_eq!(labels, vec!["a", "b"]);
                assert_eq!(values, vec![rat_int(0), rat_int(-1), rat_int(2), rat_int(1)]);
            }
            other => panic!("wrong family {other:?}"),
        }
    }

    #[test]
    fn parses_cut_text() {
        let text = "cut 3 2 undirected\n0 1 5\n1 2 1/2\n";
        let fam = parse_instance(text).unwrap();
        match fam {
            FunctionFamily::Cut {
                labels,
                directed,
                edges,
            } => {
                assert_eq!(labels.len(), 3);
                assert!(!directed);
                assert_eq!(edges, vec![(0, 1, rat_int(5)), (1, 2, rat(1, 2))]);
            }
            other => panic!("wrong family {other:?}"),
        }
    }

    #[test]
    fn cut_parse_errors_carry_line_numbers() {
        let err = parse_instance("cut 2 1 undirected\n0 1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = parse_instance("cut 2 x undirected\n").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
        let err = parse_instance("cut 2 2 undirected\n0 1 1\n").unwrap_err();
        assert!(err.to_string().contains("announced"), "{err}");
    }

    #[test]
    fn json_parse_errors_carry_positions() {
        let err = parse_instance("{\"type\":\"table\",\n\"labels\":}").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = parse_instance(r#"{"type":"mystery"}"#).unwrap_err();
        assert!(matches!(err, SfmError::InvalidInput(_)));
    }

    #[test]
    fn every_generated_family_round_trips() {
        for kind in GENERATOR_FAMILIES {
            for seed in [0u64, 9] {
                let fam = generate(kind, 5, seed).unwrap();
                let text = serialize_instance(&fam);
                let back = parse_instance(&text).unwrap();
                assert_eq!(back, fam, "{kind:?}");
                // canonical: serializing again is byte-identical
                assert_eq!(serialize_instance(&back), text);
            }
        }
    }

    #[test]
    fn rational_capacities_round_trip_through_cut_text() {
        let fam = generate(FamilyKind::RationalCut, 4, 3).unwrap();
        let text = serialize_instance(&fam);
        assert_eq!(parse_instance(&text).unwrap(), fam);
    }
}
