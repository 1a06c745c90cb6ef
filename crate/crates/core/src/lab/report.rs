use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Outcome of the finite decision rule applied to a sampled sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    ConvergesToZero,
    BoundedAway(f64),
    Inconclusive,
}

impl Verdict {
    /// The sampled decision rule.
    ///
    /// `ConvergesToZero` when the last `⌈len/4⌉` samples are all below `tol`.
    /// Otherwise `BoundedAway(c)` when every sample is at least `c - tol`,
    /// where `c` is `floor` if given. Without a floor, `c` is the smallest
    /// sample, accepted only if it is above `tol` and already attained
    /// before the final window (a sequence still decreasing at the end is
    /// not called bounded). Anything else is `Inconclusive`.
    pub fn decide(values: &[f64], tol: f64, floor: Option<f64>) -> Self {
        if values.is_empty() {
            return Verdict::Inconclusive;
        }
        let window = values.len().div_ceil(4);
        let tail_start = values.len() - window;
        if values[tail_start..].iter().all(|v| v.abs() < tol) {
            return Verdict::ConvergesToZero;
        }
        let (c, settled) = match floor {
            Some(c) => (c, true),
            None => {
                let (pos, &min) = values
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .expect("nonempty");
                let head_min = values[..tail_start].iter().copied().fold(f64::INFINITY, f64::min);
                (min, min > tol && (pos < tail_start || head_min - min <= tol))
            }
        };
        if settled && values.iter().all(|v| *v >= c - tol) {
            Verdict::BoundedAway(c)
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn to_json(self) -> Value {
        match self {
            Verdict::ConvergesToZero => json!("ConvergesToZero"),
            Verdict::BoundedAway(c) => json!({ "BoundedAway": c }),
            Verdict::Inconclusive => json!("Inconclusive"),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ConvergesToZero => write!(f, "ConvergesToZero"),
            Verdict::BoundedAway(c) => write!(f, "BoundedAway({c})"),
            Verdict::Inconclusive => write!(f, "Inconclusive"),
        }
    }
}

/// A labelled sequence of seminorm samples with its verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct SeminormReport {
    pub label: String,
    pub samples: Vec<(usize, f64)>,
    pub verdict: Verdict,
}

impl SeminormReport {
    /// Panics unless the sample indices are strictly increasing.
    pub fn new(label: impl Into<String>, samples: Vec<(usize, f64)>, verdict: Verdict) -> Self {
        assert!(
            samples.windows(2).all(|w| w[0].0 < w[1].0),
            "sample indices must be strictly increasing"
        );
        Self {
            label: label.into(),
            samples,
            verdict,
        }
    }

    /// Builds a report whose verdict comes from [`Verdict::decide`].
    pub fn decided(label: impl Into<String>, samples: Vec<(usize, f64)>, tol: f64, floor: Option<f64>) -> Self {
        let values: Vec<f64> = samples.iter().map(|(_, v)| *v).collect();
        let verdict = Verdict::decide(&values, tol, floor);
        Self::new(label, samples, verdict)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|(_, v)| *v)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "label": self.label,
            "samples": self.samples.iter().map(|(n, v)| json!([n, v])).collect::<Vec<_>>(),
            "verdict": self.verdict.to_json(),
        })
    }

    /// `n,value` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(["n", "value"]).expect("in-memory write");
        for (n, v) in &self.samples {
            writer
                .write_record([n.to_string(), v.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decision_rule() {
        assert_eq!(Verdict::decide(&[1.0, 0.5, 0.0, 0.0], 1e-9, None), Verdict::ConvergesToZero);
        assert_eq!(Verdict::decide(&[1.0; 8], 1e-9, Some(1.0)), Verdict::BoundedAway(1.0));
        assert_eq!(Verdict::decide(&[0.5, 0.3, 0.4, 0.4], 1e-9, None), Verdict::BoundedAway(0.3));
        // still decreasing at the end
        assert_eq!(Verdict::decide(&[0.5, 0.25, 0.125, 0.0625], 1e-9, None), Verdict::Inconclusive);
        assert_eq!(Verdict::decide(&[1.0, 0.0, 1.0, 0.5], 1e-9, Some(1.0)), Verdict::Inconclusive);
        assert_eq!(Verdict::decide(&[], 1e-9, None), Verdict::Inconclusive);
    }

    #[test]
    fn serialization() {
        let r = SeminormReport::decided("x", vec![(1, 1.0), (2, 0.0)], 1e-9, None);
        assert_eq!(
            r.to_json(),
            json!({"label": "x", "samples": [[1, 1.0], [2, 0.0]], "verdict": "ConvergesToZero"})
        );
        assert_eq!(r.to_csv(), "n,value\n1,1\n2,0\n");
    }

    #[test]
    #[should_panic]
    fn rejects_unordered_samples() {
        SeminormReport::new("x", vec![(2, 0.0), (1, 0.0)], Verdict::Inconclusive);
    }
}
