//! The relay (non-ideal hysteresis with a single threshold at 0) and the
//! model parameters it is driven with.
//!
//! A relay outputs `h₁` while its input has stayed negative and `-h₂` from
//! the first moment the input reaches 0. It never switches back.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(h₁, h₂, c)` with `-h₂ ≤ 0 < 2c < h₁` enforced at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    h1: f64,
    h2: f64,
    c: f64,
}

#[derive(Deserialize)]
struct RawParams {
    h1: f64,
    h2: f64,
    c: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        ModelParams::new(r.h1, r.h2, r.c)
    }
}

impl ModelParams {
    pub fn new(h1: f64, h2: f64, c: f64) -> Result<Self> {
        if !(h1.is_finite() && h2.is_finite() && c.is_finite()) {
            return Err(Error::InvalidParams("parameters must be finite".into()));
        }
        if !(h2 >= 0.0 && c > 0.0 && 2.0 * c < h1) {
            return Err(Error::InvalidParams(format!(
                "need -h2 <= 0 < 2c < h1, got h1={h1}, h2={h2}, c={c}"
            )));
        }
        Ok(Self { h1, h2, c })
    }

    pub fn h1(&self) -> f64 {
        self.h1
    }
    pub fn h2(&self) -> f64 {
        self.h2
    }
    pub fn c(&self) -> f64 {
        self.c
    }

    /// `h₁ - 2c`, the initial growth rate of every node except the origin.
    pub fn drift(&self) -> f64 {
        self.h1 - 2.0 * self.c
    }

    /// `h₁ + h₂`, the size of the relay jump.
    pub fn jump(&self) -> f64 {
        self.h1 + self.h2
    }

    /// `h₁ / c`, the only combination the propagation constant depends on.
    pub fn lambda(&self) -> f64 {
        self.h1 / self.c
    }

    /// Earliest possible switching time of node `n`: `c n² / (h₁ - 2c)`.
    pub fn earliest_switch(&self, n: i64) -> f64 {
        let n = n as f64;
        self.c * n * n / self.drift()
    }

    /// Largest `|n|` that can switch by time `t`.
    pub fn reach(&self, t: f64) -> u64 {
        (t.max(0.0) * self.drift() / self.c).sqrt().floor() as u64
    }
}

/// Memory of one relay: whether (and when) it has switched.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RelayState {
    switch_time: Option<f64>,
    #[serde(skip)]
    last_time: Option<f64>,
}

impl RelayState {
    pub fn unswitched() -> Self {
        Self::default()
    }

    pub fn switched_at(t: f64) -> Self {
        Self {
            switch_time: Some(t),
            last_time: Some(t),
        }
    }

    pub fn is_switched(&self) -> bool {
        self.switch_time.is_some()
    }

    pub fn switch_time(&self) -> Option<f64> {
        self.switch_time
    }

    /// `h₁` before switching, `-h₂` after.
    pub fn output(&self, params: &ModelParams) -> f64 {
        if self.is_switched() {
            -params.h2()
        } else {
            params.h1()
        }
    }

    /// Feed one sample of the input. The first sample with `value ≥ 0`
    /// switches the relay at `time`; later samples are ignored.
    pub fn update(self, value: f64, time: f64) -> Result<Self> {
        if let Some(prev) = self.last_time {
            if time < prev {
                return Err(Error::NonMonotoneTime {
                    previous: prev,
                    requested: time,
                });
            }
        }
        let switch_time = match self.switch_time {
            Some(t) => Some(t),
            None if value >= 0.0 => Some(time),
            None => None,
        };
        Ok(Self {
            switch_time,
            last_time: Some(time),
        })
    }

    /// Initial relay state for node `n` under `u_n(0) = -c n²`: the origin
    /// starts on the threshold and is switched at time 0.
    pub fn initial(n: i64, _params: &ModelParams) -> Self {
        if n == 0 {
            Self::switched_at(0.0)
        } else {
            Self::unswitched()
        }
    }
}

/// Run a relay over a sampled trajectory and return its output at every
/// sample.
pub fn relay_outputs(params: &ModelParams, samples: &[(f64, f64)]) -> Result<Vec<f64>> {
    let mut state = RelayState::unswitched();
    samples
        .iter()
        .map(|&(t, v)| {
            state = state.update(v, t)?;
            Ok(state.output(params))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> ModelParams {
        ModelParams::new(1.0, 0.5, 0.1).unwrap()
    }

    #[test]
    fn condition_enforced() {
        assert!(ModelParams::new(1.0, 0.0, 0.1).is_ok());
        assert!(ModelParams::new(1.0, -0.1, 0.1).is_err());
        assert!(ModelParams::new(1.0, 0.0, 0.5).is_err());
        assert!(ModelParams::new(1.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(f64::NAN, 0.0, 0.1).is_err());
        let bad: std::result::Result<ModelParams, _> =
            serde_json::from_str(r#"{"h1":0.1,"h2":0.0,"c":0.1}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn outputs() {
        let params = p();
        assert_eq!(RelayState::unswitched().output(&params), 1.0);
        assert_eq!(RelayState::switched_at(2.0).output(&params), -0.5);
        let zero_h2 = ModelParams::new(1.0, 0.0, 0.1).unwrap();
        assert_eq!(RelayState::switched_at(2.0).output(&zero_h2), 0.0);
    }

    #[test]
    fn update_rules() {
        let s = RelayState::unswitched().update(-0.3, 5.0).unwrap();
        assert!(!s.is_switched());
        let s = RelayState::unswitched().update(0.0, 5.0).unwrap();
        assert_eq!(s.switch_time(), Some(5.0));
        let s = RelayState::switched_at(2.0).update(0.7, 5.0).unwrap();
        assert_eq!(s.switch_time(), Some(2.0));
        let s = RelayState::switched_at(2.0).update(-3.0, 6.0).unwrap();
        assert_eq!(s.switch_time(), Some(2.0));
        assert!(matches!(
            RelayState::unswitched()
                .update(-1.0, 3.0)
                .unwrap()
                .update(-1.0, 2.0),
            Err(Error::NonMonotoneTime { .. })
        ));
    }

    #[test]
    fn initial_states() {
        let params = p();
        assert_eq!(RelayState::initial(0, &params).switch_time(), Some(0.0));
        assert!(!RelayState::initial(7, &params).is_switched());
        assert!(!RelayState::initial(-1, &params).is_switched());
    }

    fn trajectory() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((0.01f64..2.0, -3.0f64..1.0), 2..40).prop_map(|steps| {
            let mut t = 0.0;
            steps
                .into_iter()
                .map(|(dt, v)| {
                    t += dt;
                    (t, v)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn rate_independent(samples in trajectory(), k in 0.1f64..10.0, p3 in 1.0f64..3.0) {
            let params = p();
            let base = relay_outputs(&params, &samples).unwrap();
            // Strictly increasing reparameterisation s ↦ k s^p3.
            let warped: Vec<(f64, f64)> =
                samples.iter().map(|&(t, v)| (k * t.powf(p3), v)).collect();
            prop_assert_eq!(base, relay_outputs(&params, &warped).unwrap());
        }

        #[test]
        fn at_most_one_jump(samples in trajectory()) {
            let params = p();
            let out = relay_outputs(&params, &samples).unwrap();
            let jumps = out.windows(2).filter(|w| w[0] != w[1]).count();
            prop_assert!(jumps <= 1);
            if jumps == 1 {
                let i = out.windows(2).position(|w| w[0] != w[1]).unwrap();
                prop_assert_eq!(out[i], params.h1());
                prop_assert_eq!(out[i + 1], -params.h2());
            }
        }
    }
}
