//! The discrete Green function of the 1-D lattice heat equation with a unit
//! source at the origin,
//!
//! ```text
//! Γ_n(t) = (1/π) ∫_0^π (1 - e^{-2t(1-cos θ)}) / (2(1 - cos θ)) · cos(nθ) dθ,   t ≥ 0,
//! ```
//!
//! with `Γ_n(t) = 0` for `t < 0`. Its time derivative is the heat kernel
//! `(1/π) ∫_0^π e^{-2t(1-cos θ)} cos(nθ) dθ = e^{-2t} I_n(2t)`.
//!
//! Both integrands are smooth and `2π`-periodic, so the composite trapezoid
//! rule on `[0, π]` converges spectrally. With `M` panels it returns exactly
//! `Σ_l Γ_{n + 2lM}(t)` (the Fourier coefficients alias), which is what
//! [`panels_for`] uses to pick a grid for the batched path.
//!
//! Caching: [`GreenEvaluator`] memoises point values behind an `RwLock`, so
//! concurrent readers never block each other and inserts are serialised.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenConfig {
    /// Panels on `[0, π]` before the first doubling.
    pub initial_panels: usize,
    /// Relative tolerance between successive doublings.
    pub rel_tol: f64,
    /// Absolute floor for the doubling test; matters only for values far
    /// below the rounding level of `Γ_0(t)`.
    pub abs_tol: f64,
    /// Doubling gives up beyond this many panels.
    pub max_panels: usize,
    /// Time quantisation of the cache key. `0.0` keys on the exact bits of `t`.
    pub cache_quantum: f64,
}

impl Default for GreenConfig {
    fn default() -> Self {
        Self {
            initial_panels: 64,
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_panels: 1 << 20,
            cache_quantum: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Value,
    Rate,
}

/// `1 - cos θ` without cancellation near `θ = 0`.
#[inline]
fn one_minus_cos(theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    2.0 * s * s
}

/// The Green integrand (without the `cos nθ` factor) and the heat-kernel
/// integrand at one node, sharing a single exponential.
#[inline]
fn kernels(t: f64, theta: f64) -> (f64, f64) {
    let w = one_minus_cos(theta);
    let x = 2.0 * t * w;
    let e = (-x).exp();
    let value = if w == 0.0 {
        t
    } else if x < 1e-3 {
        // (1 - e^{-x}) / (2w) = t (1 - x/2 + x²/6 - ...)
        t * (-libm::expm1(-x) / x)
    } else {
        -libm::expm1(-x) / (2.0 * w)
    };
    (value, e)
}

/// Cosine table `cos(π j / M)` for `j = 0..2M`, so that
/// `cos(n θ_j) = table[(n j) mod 2M]` exactly on the trapezoid nodes.
#[derive(Debug)]
pub struct CosTable {
    panels: usize,
    values: Vec<f64>,
}

impl CosTable {
    pub fn new(panels: usize) -> Self {
        let values = (0..2 * panels)
            .map(|j| (PI * j as f64 / panels as f64).cos())
            .collect();
        Self { panels, values }
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    #[inline]
    pub fn cos(&self, n: u64, j: usize) -> f64 {
        let period = 2 * self.panels as u64;
        self.values[((n % period) * j as u64 % period) as usize]
    }
}

/// Number of panels that makes the aliasing error negligible for every index
/// `|n| <= max_index` at every time up to `t_max`.
///
/// The aliased terms are `Γ_{2M - n}` and beyond. For `m ≥ 14√t + 40` they are
/// below `1e-20` (Gaussian regime `√t·f(14) ~ e^{-49}√t`, and faster than
/// `t^m / m!` in the lattice regime).
pub fn panels_for(t_max: f64, max_index: u64) -> usize {
    let reach = (14.0 * t_max.max(0.0).sqrt() + 40.0).ceil() as u64;
    let needed = (max_index + reach).div_ceil(2).max(64) as usize;
    needed.next_power_of_two()
}

/// Trapezoid sum `(1/M)[S_0/2 + Σ S_j cos(nθ_j) + S_M cos(nπ)/2]`.
#[inline]
pub fn cosine_sum(samples: &[f64], n: u64, table: &CosTable) -> f64 {
    let m = table.panels();
    debug_assert_eq!(samples.len(), m + 1);
    let mut acc = 0.5 * (samples[0] + samples[m] * table.cos(n, m));
    for (j, s) in samples.iter().enumerate().take(m).skip(1) {
        acc += s * table.cos(n, j);
    }
    acc / m as f64
}

/// Superposition of symmetric Green sources sampled on a common trapezoid
/// grid. A source at node `k > 0` stands for the pair `±k`; its spectral
/// weight is `2 cos(kθ)` since `Γ_{n-k} + Γ_{n+k}` has Fourier symbol
/// `2 cos(nθ) cos(kθ)`.
#[derive(Debug, Clone)]
pub struct Superposition {
    table: Arc<CosTable>,
    value: Vec<f64>,
    rate: Vec<f64>,
}

impl Superposition {
    /// `Σ_src w (Γ_{n-k}(τ) + Γ_{n+k}(τ))` (or `w Γ_n(τ)` for `k = 0`).
    pub fn value(&self, n: i64) -> f64 {
        cosine_sum(&self.value, n.unsigned_abs(), &self.table)
    }

    /// Same superposition with `Γ̇` in place of `Γ`.
    pub fn rate(&self, n: i64) -> f64 {
        cosine_sum(&self.rate, n.unsigned_abs(), &self.table)
    }

    pub fn panels(&self) -> usize {
        self.table.panels()
    }
}

/// One symmetric source: node `k ≥ 0`, elapsed time `τ`, weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Source {
    pub node: u64,
    pub elapsed: f64,
    pub weight: f64,
}

/// Accuracy-controlled evaluator for `Γ_n(t)` and its derivatives.
#[derive(Debug)]
pub struct GreenEvaluator {
    cfg: GreenConfig,
    cache: RwLock<HashMap<(u64, u64, Kind), f64>>,
    tables: RwLock<HashMap<usize, Arc<CosTable>>>,
}

impl Default for GreenEvaluator {
    fn default() -> Self {
        Self::new(GreenConfig::default()).expect("default config is valid")
    }
}

impl GreenEvaluator {
    pub fn new(cfg: GreenConfig) -> Result<Self> {
        if !(cfg.rel_tol > 0.0 && cfg.abs_tol >= 0.0) {
            return Err(Error::InvalidConfig(
                "green tolerances must be positive".into(),
            ));
        }
        if cfg.initial_panels < 2 || cfg.max_panels < cfg.initial_panels {
            return Err(Error::InvalidConfig(format!(
                "panel limits invalid: initial {} max {}",
                cfg.initial_panels, cfg.max_panels
            )));
        }
        if !(cfg.cache_quantum >= 0.0) {
            return Err(Error::InvalidConfig("cache_quantum must be >= 0".into()));
        }
        Ok(Self {
            cfg,
            cache: RwLock::new(HashMap::new()),
            tables: RwLock::new(HashMap::new()),
        })
    }

    pub fn config(&self) -> &GreenConfig {
        &self.cfg
    }

    /// Shared cosine table for `panels` panels.
    pub fn table(&self, panels: usize) -> Arc<CosTable> {
        if let Some(t) = self.tables.read().expect("table lock").get(&panels) {
            return t.clone();
        }
        let table = Arc::new(CosTable::new(panels));
        self.tables
            .write()
            .expect("table lock")
            .entry(panels)
            .or_insert(table)
            .clone()
    }

    fn cache_key(&self, t: f64) -> u64 {
        if self.cfg.cache_quantum > 0.0 {
            (t / self.cfg.cache_quantum).round() as i64 as u64
        } else {
            t.to_bits()
        }
    }

    fn cached(&self, n: u64, t: f64, kind: Kind) -> Result<f64> {
        let key = (n, self.cache_key(t), kind);
        if let Some(v) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let v = self.trapezoid(n, t, kind)?;
        self.cache.write().expect("cache lock").insert(key, v);
        Ok(v)
    }

    pub fn cache_len(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    /// Panel-doubling trapezoid for one index. Old nodes are reused.
    fn trapezoid(&self, n: u64, t: f64, kind: Kind) -> Result<f64> {
        let pick = |theta: f64| {
            let (v, r) = kernels(t, theta);
            match kind {
                Kind::Value => v,
                Kind::Rate => r,
            }
        };
        let mut m = self
            .cfg
            .initial_panels
            .max((n as usize + 1).next_power_of_two())
            .max(((2.0 * t.sqrt()).ceil() as usize).next_power_of_two());
        let step = PI / m as f64;
        let mut acc = 0.5 * (pick(0.0) + pick(PI) * if n.is_multiple_of(2) { 1.0 } else { -1.0 });
        for j in 1..m {
            let theta = j as f64 * step;
            acc += pick(theta) * (n as f64 * theta).cos();
        }
        let mut prev = acc / m as f64;
        while m < self.cfg.max_panels {
            let step = PI / (2 * m) as f64;
            for j in 0..m {
                let theta = (2 * j + 1) as f64 * step;
                acc += pick(theta) * (n as f64 * theta).cos();
            }
            m *= 2;
            let cur = acc / m as f64;
            if (cur - prev).abs() <= (self.cfg.rel_tol * cur.abs()).max(self.cfg.abs_tol) {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(Error::Accuracy {
            what: "green trapezoid",
            detail: format!(
                "no convergence for n={n}, t={t} within {} panels",
                self.cfg.max_panels
            ),
        })
    }

    /// `Γ_n(t)`; zero for `t ≤ 0`, symmetric in `n`.
    pub fn gamma(&self, n: i64, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        // Values below the rounding level of the integral can come out as
        // -1e-17 or so; the true value is positive.
        Ok(self.cached(n.unsigned_abs(), t, Kind::Value)?.max(0.0))
    }

    /// `Γ̇_n(t) = e^{-2t} I_n(2t)`. At `t = 0` this is the right limit `δ_{n0}`.
    pub fn gamma_dot(&self, n: i64, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::domain(
                "gamma_dot",
                format!("t must be >= 0, got {t}"),
            ));
        }
        if t == 0.0 {
            return Ok(if n == 0 { 1.0 } else { 0.0 });
        }
        Ok(self.cached(n.unsigned_abs(), t, Kind::Rate)?.max(0.0))
    }

    /// `∇Γ_n(t) = Γ_{n+1}(t) - Γ_n(t)`.
    pub fn grad_gamma(&self, n: i64, t: f64) -> Result<f64> {
        Ok(self.gamma(n + 1, t)? - self.gamma(n, t)?)
    }

    /// `∇Γ̇_n(t) = Γ̇_{n+1}(t) - Γ̇_n(t)`.
    pub fn grad_gamma_dot(&self, n: i64, t: f64) -> Result<f64> {
        Ok(self.gamma_dot(n + 1, t)? - self.gamma_dot(n, t)?)
    }

    /// `ΔΓ_n(t) = Γ_{n-1} - 2Γ_n + Γ_{n+1}`.
    pub fn laplacian(&self, n: i64, t: f64) -> Result<f64> {
        Ok(self.gamma(n - 1, t)? - 2.0 * self.gamma(n, t)? + self.gamma(n + 1, t)?)
    }

    /// Sample a weighted sum of symmetric sources on a common grid of
    /// `panels` panels (see [`panels_for`]). Sources with `τ ≤ 0` contribute
    /// nothing to the value and `δ`-like right limits to the rate.
    pub fn superpose(&self, sources: &[Source], panels: usize) -> Superposition {
        let table = self.table(panels);
        let step = PI / panels as f64;
        let mut value = vec![0.0; panels + 1];
        let mut rate = vec![0.0; panels + 1];
        for src in sources {
            if src.elapsed < 0.0 {
                continue;
            }
            let mult = if src.node == 0 { 1.0 } else { 2.0 };
            let w = src.weight * mult;
            for j in 0..=panels {
                let c = if src.node == 0 {
                    1.0
                } else {
                    table.cos(src.node, j)
                };
                let (v, r) = if src.elapsed == 0.0 {
                    (0.0, 1.0)
                } else {
                    kernels(src.elapsed, j as f64 * step)
                };
                value[j] += w * c * v;
                rate[j] += w * c * r;
            }
        }
        Superposition { table, value, rate }
    }
}
