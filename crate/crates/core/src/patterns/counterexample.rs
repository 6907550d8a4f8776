//! A pattern that is quasi-uniform although `p(n)/n` has no limit.
//!
//! The half-line is cut into blocks `(M_{j-1}, M_j]` of length `L_j`. Inside
//! block `j` the node `M_{j-1} + r` is a member iff
//! `⌊r p_j⌋ > ⌊(r-1) p_j⌋`, so the block holds `l_j = L_j p_j` members and
//! `m_j = l_1 + … + l_j`. The frequencies follow a triangular wave between
//! 1/3 and 2/3 with steps `±1/(j+3)` between `p_j` and `p_{j+1}`; lengths are
//! the smallest multiples of the denominator of `p_{j+1}` satisfying
//! `p_{j+1} L_{j+1} ≥ M_j (j+1)`. All arithmetic is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of uniformly spaced ranks added to the block boundaries when
/// sampling the quasi-uniformity metric.
const METRIC_GRID: u32 = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BigPatternSet {
    /// `p_1, …, p_J`.
    pub frequencies: Vec<BigRational>,
    /// `L_1, …, L_J`.
    pub lengths: Vec<BigInt>,
    /// `M_0 = 0, M_1, …, M_J`.
    pub block_ends: Vec<BigInt>,
    /// `m_0 = 0, m_1, …, m_J`.
    pub member_counts: Vec<BigInt>,
}

/// One row of the construction, in floating point for reporting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: usize,
    pub p: f64,
    /// `M_j` in decimal.
    pub block_end: String,
    /// `m_j / M_j`, which equals `p(M_j + 1)/M_j`.
    pub density: f64,
    /// Sampled quasi-uniformity metric at `n = M_j`.
    pub metric: f64,
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ceil_div(a: &BigRational) -> BigInt {
    a.ceil().to_integer()
}

pub fn build_counterexample(levels: usize) -> Result<BigPatternSet> {
    if levels < 2 {
        return Err(Error::InvalidConfig(format!(
            "levels must be >= 2, got {levels}"
        )));
    }
    let (lo, hi) = (ratio(1, 3), ratio(2, 3));
    let mut frequencies = Vec::with_capacity(levels);
    let mut p = lo.clone();
    let mut rising = true;
    for j in 1..=levels {
        if j > 1 {
            let step = ratio(1, j as i64 + 2);
            let mut next = if rising { &p + &step } else { &p - &step };
            if next > hi || next < lo {
                rising = !rising;
                next = if rising { &p + &step } else { &p - &step };
            }
            p = next;
        }
        frequencies.push(p.clone());
    }

    let mut lengths = Vec::with_capacity(levels);
    let mut block_ends = vec![BigInt::zero()];
    let mut member_counts = vec![BigInt::zero()];
    for (j, p) in frequencies.iter().enumerate() {
        let prev_end = block_ends.last().expect("M_0 present").clone();
        let need = BigRational::from_integer(&prev_end * BigInt::from(j + 1));
        let den = p.denom().clone();
        // Smallest k ≥ 1 with p·den·k ≥ need.
        let unit = p * BigRational::from_integer(den.clone());
        let k = ceil_div(&(need / &unit)).max(BigInt::one());
        let len = den * k;
        let members = (p * BigRational::from_integer(len.clone())).to_integer();
        block_ends.push(&prev_end + &len);
        let prev_count = member_counts.last().expect("m_0 present").clone();
        member_counts.push(prev_count + members);
        lengths.push(len);
    }
    Ok(BigPatternSet {
        frequencies,
        lengths,
        block_ends,
        member_counts,
    })
}

impl BigPatternSet {
    pub fn levels(&self) -> usize {
        self.frequencies.len()
    }

    /// Block `j ≥ 1` containing `n ≥ 1`, if constructed.
    fn block_of(&self, n: &BigInt) -> Option<usize> {
        let j = self.block_ends.partition_point(|m| m < n);
        (j >= 1 && j <= self.levels()).then_some(j)
    }

    pub fn contains(&self, n: &BigInt) -> bool {
        let n = n.abs();
        if n.is_zero() {
            return true;
        }
        let Some(j) = self.block_of(&n) else {
            return false;
        };
        let r = BigRational::from_integer(&n - &self.block_ends[j - 1]);
        let p = &self.frequencies[j - 1];
        (&r * p).floor() > ((r - BigRational::one()) * p).floor()
    }

    /// Members in `[1, n]`, for `0 ≤ n ≤ M_J`.
    pub fn prefix_count(&self, n: &BigInt) -> Result<BigInt> {
        if n.is_zero() {
            return Ok(BigInt::zero());
        }
        let j = self.block_of(n).ok_or_else(|| Error::RankOutOfRange {
            rank: n.to_string(),
            max: self.block_ends.last().expect("nonempty").to_string(),
        })?;
        let r = BigRational::from_integer(n - &self.block_ends[j - 1]);
        Ok(&self.member_counts[j - 1] + (r * &self.frequencies[j - 1]).floor().to_integer())
    }

    /// `p(n)`: members in `[1, n-1]`.
    pub fn count_p(&self, n: &BigInt) -> Result<BigInt> {
        self.prefix_count(&(n - BigInt::one()))
    }

    /// `k_i = M_s + ⌈ρ/p_{s+1}⌉` where `m_s < i ≤ m_{s+1}` and `ρ = i - m_s`.
    pub fn node_by_rank(&self, i: &BigInt) -> Result<BigInt> {
        let max = self.member_counts.last().expect("nonempty");
        if !i.is_positive() || i > max {
            return Err(Error::RankOutOfRange {
                rank: i.to_string(),
                max: max.to_string(),
            });
        }
        let s = self.member_counts.partition_point(|m| m < i) - 1;
        let rho = BigRational::from_integer(i - &self.member_counts[s]);
        Ok(&self.block_ends[s] + ceil_div(&(rho / &self.frequencies[s])))
    }

    /// `m_j / M_j`.
    pub fn density(&self, j: usize) -> f64 {
        BigRational::new(self.member_counts[j].clone(), self.block_ends[j].clone())
            .to_f64()
            .unwrap_or(f64::NAN)
    }

    /// Ranks at which the metric at `n = M_j` is sampled: the neighbours of
    /// every block boundary `m_s` and a uniform grid over `[1, p(M_j)]`.
    fn sample_ranks(&self, j: usize) -> Vec<BigInt> {
        let p = &self.member_counts[j] - BigInt::one();
        let one = BigInt::one();
        let mut ranks = Vec::new();
        for m in &self.member_counts[..=j] {
            for r in [m - &one, m.clone(), m + &one] {
                if r >= one && r <= p {
                    ranks.push(r);
                }
            }
        }
        for q in 0..=METRIC_GRID {
            let r = (&p * BigInt::from(q)).div_floor(&BigInt::from(METRIC_GRID));
            if r >= one {
                ranks.push(r);
            }
        }
        ranks.sort();
        ranks.dedup();
        ranks
    }

    /// Quasi-uniformity metric at `n = M_j` over the sampled ranks, evaluated
    /// exactly and rounded once.
    pub fn sampled_metric(&self, j: usize) -> Result<f64> {
        if j == 0 || j > self.levels() {
            return Err(Error::domain(
                "sampled_metric",
                format!("level {j} not constructed"),
            ));
        }
        let n = &self.block_ends[j];
        let p = &self.member_counts[j] - BigInt::one();
        if !p.is_positive() {
            return Err(Error::domain("sampled_metric", format!("p(M_{j}) = 0")));
        }
        let mut worst = BigRational::zero();
        for i in self.sample_ranks(j) {
            let k = self.node_by_rank(&i)?;
            let dev = (BigRational::new(k, n.clone()) - BigRational::new(i, p.clone())).abs();
            if dev > worst {
                worst = dev;
            }
        }
        Ok(worst.to_f64().unwrap_or(f64::NAN))
    }

    pub fn summary(&self) -> Result<Vec<LevelSummary>> {
        (1..=self.levels())
            .map(|j| {
                Ok(LevelSummary {
                    level: j,
                    p: self.frequencies[j - 1].to_f64().unwrap_or(f64::NAN),
                    block_end: self.block_ends[j].to_string(),
                    density: self.density(j),
                    metric: if self.member_counts[j] > BigInt::one() {
                        self.sampled_metric(j)?
                    } else {
                        f64::NAN
                    },
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_invariants() {
        let set = build_counterexample(10).unwrap();
        let (lo, hi) = (ratio(1, 3), ratio(2, 3));
        for j in 1..=10 {
            let p = &set.frequencies[j - 1];
            assert!(*p >= lo && *p <= hi);
            let l = p * BigRational::from_integer(set.lengths[j - 1].clone());
            assert!(l.is_integer());
            assert!(l >= BigRational::from_integer(&set.block_ends[j - 1] * BigInt::from(j)));
        }
        assert!(build_counterexample(1).is_err());
    }

    #[test]
    fn ranks_match_enumeration() {
        let set = build_counterexample(5).unwrap();
        let end = set.block_ends[5].to_u64().unwrap();
        let members: Vec<u64> = (1..=end)
            .filter(|&n| set.contains(&BigInt::from(n)))
            .collect();
        assert_eq!(members.len() as u64, set.member_counts[5].to_u64().unwrap());
        for (i, &k) in members.iter().enumerate() {
            assert_eq!(
                set.node_by_rank(&BigInt::from(i + 1)).unwrap(),
                BigInt::from(k)
            );
            let after = set.count_p(&BigInt::from(k + 1)).unwrap();
            assert_eq!(after, BigInt::from(i + 1));
        }
        for j in 1..=5 {
            assert!(set.contains(&set.block_ends[j]));
            assert_eq!(
                set.node_by_rank(&set.member_counts[j]).unwrap(),
                set.block_ends[j]
            );
        }
        assert!(set.node_by_rank(&BigInt::zero()).is_err());
        assert!(set.node_by_rank(&(&set.member_counts[5] + 1)).is_err());
    }

    #[test]
    fn density_is_prefix_ratio() {
        let set = build_counterexample(8).unwrap();
        for j in 1..=8 {
            let n = &set.block_ends[j];
            let p_next = set.count_p(&(n + 1)).unwrap();
            assert_eq!(p_next, set.member_counts[j]);
        }
    }
}
