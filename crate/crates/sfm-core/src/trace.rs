//! Solver event stream, recordable behind a flag. Events serialize to
//! line-delimited JSON with exact rationals as "p/q" strings.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    /// Start of a scaling phase, after δ was halved and φ clamped.
    Phase {
        index: u64,
        delta: String,
        z_neg: String,
    },
    /// One push on active pair (i, v) with successor u.
    Push {
        i: usize,
        u: usize,
        v: usize,
        alpha: String,
        exchange: String,
        saturating: bool,
        z_neg: String,
    },
    /// δ sent along an augmenting path.
    Augment {
        delta: String,
        path: Vec<usize>,
        z_neg: String,
    },
}

impl TraceEvent {
    pub fn z_neg(&self) -> &str {
        match self {
            TraceEvent::Phase { z_neg, .. }
            | TraceEvent::Push { z_neg, .. }
            | TraceEvent::Augment { z_neg, .. } => z_neg,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("trace events always serialize")
    }
}

pub type TraceSink<'a> = &'a mut dyn FnMut(TraceEvent);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn events_round_trip_as_json_lines() {
        let ev = TraceEvent::Augment {
            delta: "1/2".into(),
            path: vec![0, 2, 1],
            z_neg: "-3/2".into(),
        };
        let line = ev.to_json_line();
        assert!(line.starts_with("{\"event\":\"augment\""));
        let back: TraceEvent = serde_json::from_str(&line).unwrap();
        assert_eq!(back, ev);
    }
}
