//! Sets of switching nodes.
//!
//! A pattern is symmetric and always contains 0, so it is stored as the
//! increasing list `k₁ < k₂ < …` of its positive members. Counting follows
//! one convention throughout: `p(n)` is the number of members in `[1, n-1]`
//! and `q(n) = n - p(n)`.

mod counterexample;
mod io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::EventLog;

pub use counterexample::{build_counterexample, BigPatternSet, LevelSummary};
pub use io::{write_membership_csv, write_metric_csv, BuiltPattern, PatternSpec};

/// Symmetric node set known on `[-resolved, resolved]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSet {
    positive: Vec<u64>,
    resolved: u64,
}

impl PatternSet {
    /// Build from positive members (any order, duplicates and 0 ignored).
    /// Members beyond `resolved` are dropped.
    pub fn from_nodes(nodes: impl IntoIterator<Item = u64>, resolved: u64) -> Self {
        let mut positive: Vec<u64> = nodes
            .into_iter()
            .filter(|&n| n > 0 && n <= resolved)
            .collect();
        positive.sort_unstable();
        positive.dedup();
        Self { positive, resolved }
    }

    /// Nodes of a simulation. Only the range up to the largest switched node
    /// is resolved: a node past it may still switch later.
    pub fn from_log(log: &EventLog) -> Self {
        let resolved = log.events.iter().map(|e| e.node).max().unwrap_or(0);
        Self::from_nodes(log.nodes(), resolved)
    }

    pub fn positive_nodes(&self) -> &[u64] {
        &self.positive
    }

    pub fn resolved(&self) -> u64 {
        self.resolved
    }

    pub fn contains(&self, n: i64) -> bool {
        n == 0 || self.positive.binary_search(&n.unsigned_abs()).is_ok()
    }

    /// Members in `[1, n]`.
    pub fn prefix_count(&self, n: u64) -> u64 {
        self.positive.partition_point(|&k| k <= n) as u64
    }

    /// `p(n)`: members in `[1, n-1]`.
    pub fn count_p(&self, n: u64) -> u64 {
        self.prefix_count(n.saturating_sub(1))
    }

    /// `q(n) = n - p(n)`.
    pub fn count_q(&self, n: u64) -> u64 {
        n - self.count_p(n)
    }

    /// `k_i` for `i ≥ 1`.
    pub fn member_by_rank(&self, i: u64) -> Option<u64> {
        i.checked_sub(1)
            .and_then(|j| self.positive.get(j as usize).copied())
    }

    /// `sup_{|i| ≤ p(n)} |k_i/n - i/p(n)|` at a positive member `n`.
    pub fn quasi_uniformity_metric(&self, n: u64) -> Result<f64> {
        if n == 0 || !self.contains(n as i64) {
            return Err(Error::domain(
                "quasi_uniformity_metric",
                format!("{n} is not a positive member"),
            ));
        }
        let p = self.count_p(n);
        if p == 0 {
            return Err(Error::domain(
                "quasi_uniformity_metric",
                format!("p({n}) = 0"),
            ));
        }
        let (nf, pf) = (n as f64, p as f64);
        Ok(self.positive[..p as usize]
            .iter()
            .enumerate()
            .map(|(i, &k)| (k as f64 / nf - (i + 1) as f64 / pf).abs())
            .fold(0.0, f64::max))
    }

    /// Metric at every member `n ≤ upto` with `p(n) ≥ 1`.
    pub fn metric_series(&self, upto: u64) -> Vec<(u64, f64)> {
        self.positive
            .iter()
            .skip(1)
            .take_while(|&&n| n <= upto)
            .map(|&n| {
                (
                    n,
                    self.quasi_uniformity_metric(n).expect("member with p ≥ 1"),
                )
            })
            .collect()
    }
}

/// Members `n > 0` with `⌊nα + β⌋ > ⌊(n-1)α + β⌋`, up to `n_max`.
///
/// The `r`-th increment of `⌊nα + β⌋` happens at `n = ⌈(r - β)/α⌉`, so
/// members are generated by rank rather than by scanning.
pub fn gen_quasiperiodic(alpha: f64, beta: f64, n_max: u64) -> Result<PatternSet> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(
            "gen_quasiperiodic",
            format!("alpha = {alpha} not in (0, 1]"),
        ));
    }
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::domain(
            "gen_quasiperiodic",
            format!("beta = {beta} not in [0, 1)"),
        ));
    }
    let mut nodes = Vec::with_capacity((alpha * n_max as f64) as usize + 1);
    for r in 1u64.. {
        let mut n = ((r as f64 - beta) / alpha).ceil().max(1.0) as u64;
        // Guard the ceiling against rounding right at an integer.
        while n > 1 && floor_step(alpha, beta, n - 1) >= r as f64 {
            n -= 1;
        }
        while floor_step(alpha, beta, n) < r as f64 {
            n += 1;
        }
        if n > n_max {
            break;
        }
        nodes.push(n);
    }
    Ok(PatternSet::from_nodes(nodes, n_max))
}

fn floor_step(alpha: f64, beta: f64, n: u64) -> f64 {
    (n as f64 * alpha + beta).floor()
}

/// Whether every window `{j+1, …, j+p₁+p₂}` with `j_min ≤ j ≤ j_max`
/// contains exactly `p₁` members. Windows reaching past the resolved range
/// count as failures.
pub fn check_periodic_window(set: &PatternSet, p1: u64, p2: u64, j_min: u64, j_max: u64) -> bool {
    let width = p1 + p2;
    if p1 == 0 || j_max + width > set.resolved {
        return false;
    }
    (j_min..=j_max).all(|j| set.prefix_count(j + width) - set.prefix_count(j) == p1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(alpha: f64, beta: f64, n_max: u64) -> Vec<u64> {
        (1..=n_max)
            .filter(|&n| floor_step(alpha, beta, n) > floor_step(alpha, beta, n - 1))
            .collect()
    }

    #[test]
    fn counting() {
        let all = PatternSet::from_nodes(1..=50, 50);
        assert_eq!(all.count_p(10), 9);
        assert_eq!(all.count_q(10), 1);
        assert_eq!(all.count_p(1), 0);
        let even = gen_quasiperiodic(0.5, 0.25, 100).unwrap();
        assert_eq!(even.count_p(10), 4);
        assert!(even.contains(-4) && !even.contains(3) && even.contains(0));
    }

    #[test]
    fn generator_matches_floor_scan() {
        for (a, b) in [
            (0.5, 0.25),
            (2.0 / 3.0, 0.2),
            (2f64.sqrt() / 5.0, 0.8),
            (1.0, 0.5),
            (0.3, 0.0),
        ] {
            assert_eq!(
                gen_quasiperiodic(a, b, 3000).unwrap().positive_nodes(),
                brute(a, b, 3000)
            );
        }
        assert!(gen_quasiperiodic(0.0, 0.2, 10).is_err());
        assert!(gen_quasiperiodic(0.5, 1.0, 10).is_err());
    }

    #[test]
    fn metric_of_all_integers() {
        let all = PatternSet::from_nodes(1..=200, 200);
        let m = all.quasi_uniformity_metric(100).unwrap();
        let brute = (1..=99)
            .map(|i| (i as f64 / 100.0 - i as f64 / 99.0).abs())
            .fold(0.0, f64::max);
        assert!((m - brute).abs() < 1e-15);
        assert!(all.quasi_uniformity_metric(1).is_err());
        assert!(all.quasi_uniformity_metric(0).is_err());
    }

    #[test]
    fn first_member_has_zero_contribution() {
        let s = PatternSet::from_nodes([3, 7, 9], 10);
        assert!(s.quasi_uniformity_metric(3).is_err());
        let m = s.quasi_uniformity_metric(7).unwrap();
        assert!((m - (3.0f64 / 7.0 - 1.0).abs()).abs() < 1e-15);
    }

    #[test]
    fn windows() {
        let all = PatternSet::from_nodes(1..=100, 100);
        assert!(check_periodic_window(&all, 1, 0, 1, 90));
        let even = gen_quasiperiodic(0.5, 0.25, 100).unwrap();
        assert!(check_periodic_window(&even, 1, 1, 1, 90));
        assert!(!check_periodic_window(&even, 2, 0, 1, 90));
        let two_thirds = gen_quasiperiodic(2.0 / 3.0, 0.2, 300).unwrap();
        assert!(check_periodic_window(&two_thirds, 2, 1, 1, 290));
        assert!(!check_periodic_window(&even, 1, 1, 1, 99));
    }

    #[test]
    fn density_is_alpha() {
        for (a, b) in [(0.5, 0.25), (2.0 / 3.0, 0.2), (2f64.sqrt() / 5.0, 0.8)] {
            let s = gen_quasiperiodic(a, b, 5000).unwrap();
            let worst = (1..=5000u64)
                .map(|n| (s.count_p(n) as f64 - (a * n as f64).floor()).abs())
                .fold(0.0, f64::max);
            assert!(worst <= 2.0);
            assert!((s.count_p(5000) as f64 / 5000.0 - a).abs() <= 2.0 / 5000.0);
        }
    }
}
