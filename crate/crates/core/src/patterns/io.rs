//! Pattern descriptions and plot data.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{build_counterexample, gen_quasiperiodic, BigPatternSet, PatternSet};

/// JSON description of a pattern. Exactly one of the three forms is used:
/// `alpha` (with optional `beta`), `explicit_nodes`, or
/// `counterexample_levels`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit_nodes: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample_levels: Option<usize>,
}

pub enum BuiltPattern {
    Finite(PatternSet),
    Counterexample(BigPatternSet),
}

impl PatternSpec {
    pub fn build(&self, n_max: u64) -> Result<BuiltPattern> {
        let forms = [
            self.alpha.is_some(),
            self.explicit_nodes.is_some(),
            self.counterexample_levels.is_some(),
        ];
        if forms.iter().filter(|&&f| f).count() != 1 {
            return Err(Error::InvalidConfig(
                "pattern spec needs exactly one of alpha, explicit_nodes, counterexample_levels"
                    .into(),
            ));
        }
        if self.beta.is_some() && self.alpha.is_none() {
            return Err(Error::InvalidConfig("beta given without alpha".into()));
        }
        if let Some(alpha) = self.alpha {
            return gen_quasiperiodic(alpha, self.beta.unwrap_or(0.0), n_max)
                .map(BuiltPattern::Finite);
        }
        if let Some(nodes) = &self.explicit_nodes {
            return Ok(BuiltPattern::Finite(PatternSet::from_nodes(
                nodes.iter().copied(),
                n_max,
            )));
        }
        build_counterexample(self.counterexample_levels.expect("checked above"))
            .map(BuiltPattern::Counterexample)
    }
}

/// Rows `n,member` for `n = 0..=resolved`.
pub fn write_membership_csv<W: Write>(set: &PatternSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "member"])?;
    for n in 0..=set.resolved() {
        w.write_record([n.to_string(), u8::from(set.contains(n as i64)).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows `n,p,metric` at every member `n` with `p(n) ≥ 1`.
pub fn write_metric_csv<W: Write>(set: &PatternSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "p", "metric"])?;
    for (n, metric) in set.metric_series(set.resolved()) {
        w.write_record([
            n.to_string(),
            set.count_p(n).to_string(),
            metric.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_forms() {
        let spec: PatternSpec = serde_json::from_str(r#"{"alpha": 0.5, "beta": 0.25}"#).unwrap();
        match spec.build(20).unwrap() {
            BuiltPattern::Finite(s) => {
                assert_eq!(s.positive_nodes(), &[2, 4, 6, 8, 10, 12, 14, 16, 18, 20])
            }
            BuiltPattern::Counterexample(_) => panic!(),
        }
        let spec: PatternSpec = serde_json::from_str(r#"{"counterexample_levels": 4}"#).unwrap();
        assert!(matches!(
            spec.build(0).unwrap(),
            BuiltPattern::Counterexample(_)
        ));
        let spec: PatternSpec =
            serde_json::from_str(r#"{"alpha": 0.5, "explicit_nodes": [1]}"#).unwrap();
        assert!(spec.build(10).is_err());
        assert!(serde_json::from_str::<PatternSpec>(r#"{"gamma": 1}"#).is_err());
        assert!(PatternSpec::default().build(10).is_err());
    }

    #[test]
    fn membership_csv() {
        let set = PatternSet::from_nodes([2, 3], 4);
        let mut buf = Vec::new();
        write_membership_csv(&set, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,member\n0,1\n1,0\n2,1\n3,1\n4,0\n"
        );
    }
}
