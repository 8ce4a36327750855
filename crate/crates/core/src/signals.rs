//! Ornstein-Uhlenbeck alpha signals and their integrated gains.
//!
//! A signal follows `dx = kappa (xbar - x) dt + sqrt(eta) dZ`. The integrated gain
//! `g(t, x) = ∫_t^H E[x_s | x_t = x] ds` is the expected drift still to be harvested
//! until the horizon `H` (tomorrow's close, `2T`, unless stated otherwise).

use crate::error::{ensure, Error, Result};
use serde::{Deserialize, Serialize};

/// Minutes per day; the natural unit for reversion times and decision steps.
pub const MINUTES_PER_DAY: f64 = 1440.0;
/// Trading days per year used for annualization.
pub const TRADING_DAYS_PER_YEAR: f64 = 252.0;

/// Below this value of `kappa * elapsed` the exponential ratios switch to their series.
const SERIES_THRESHOLD: f64 = 1e-12;

/// `(1 - e^{-k tau}) / k`, continuous through `k = 0`.
pub(crate) fn decay_integral(k: f64, tau: f64) -> f64 {
    let kt = k * tau;
    if kt.abs() < SERIES_THRESHOLD {
        tau * (1.0 - 0.5 * kt)
    } else {
        -(-kt).exp_m1() / k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuParams {
    /// Mean-reversion rate, 1/day.
    pub kappa: f64,
    /// Long-run mean.
    pub xbar: f64,
    /// Diffusion variance rate per day.
    pub eta: f64,
}

impl OuParams {
    pub fn new(kappa: f64, xbar: f64, eta: f64) -> Result<Self> {
        let p = Self { kappa, xbar, eta };
        p.validate()?;
        Ok(p)
    }

    /// Unit-variance z-score process with the given mean-reversion time in minutes
    /// (`eta = 2 kappa`, `xbar = 0`).
    pub fn zscore_minutes(reversion_minutes: f64) -> Result<Self> {
        ensure(reversion_minutes > 0.0, "reversion_minutes", || {
            format!("must be positive, got {reversion_minutes}")
        })?;
        let kappa = MINUTES_PER_DAY / reversion_minutes;
        Self::new(kappa, 0.0, 2.0 * kappa)
    }

    /// Same law as `self` for the rescaled process `scale * x`.
    pub fn scaled(&self, scale: f64) -> Self {
        Self {
            kappa: self.kappa,
            xbar: self.xbar * scale,
            eta: self.eta * scale * scale,
        }
    }

    /// Deterministic (zero-volatility) copy.
    pub fn deterministic(&self) -> Self {
        Self { eta: 0.0, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.kappa.is_finite() && self.kappa >= 0.0, "kappa", || {
            format!("must be finite and non-negative, got {}", self.kappa)
        })?;
        ensure(self.eta.is_finite() && self.eta >= 0.0, "eta", || {
            format!("must be finite and non-negative, got {}", self.eta)
        })?;
        ensure(self.xbar.is_finite(), "xbar", || "must be finite".into())
    }

    /// `eta / (2 kappa)`; infinite for a driftless process with noise.
    pub fn stationary_variance(&self) -> f64 {
        if self.kappa > 0.0 {
            self.eta / (2.0 * self.kappa)
        } else if self.eta == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    /// Variance of `∫_0^tau x_s ds` for the stationary process.
    pub fn stationary_integral_variance(&self, tau: f64) -> f64 {
        let v = self.stationary_variance();
        let k = self.kappa;
        if k * tau < 1e-6 {
            return v * tau * tau;
        }
        2.0 * v / (k * k) * (k * tau - 1.0 + (-k * tau).exp())
    }
}

/// The intraday decision grid `t_open, t_open + dt, ..., T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    /// Day length (close to close), days.
    pub day_length: f64,
    pub t_open: f64,
    pub dt: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    /// Grid closing the session at `day_length` after `n_steps` steps of size `dt`.
    pub fn new(day_length: f64, dt: f64, n_steps: usize) -> Result<Self> {
        ensure(dt > 0.0 && dt.is_finite(), "dt", || {
            format!("must be positive, got {dt}")
        })?;
        ensure(n_steps >= 1, "n_steps", || "must be at least 1".into())?;
        let t_open = day_length - n_steps as f64 * dt;
        ensure(t_open > 0.0 && t_open < day_length, "n_steps", || {
            format!("session of {n_steps} steps of {dt} does not fit in a day of {day_length}")
        })?;
        Ok(Self {
            day_length,
            t_open,
            dt,
            n_steps,
        })
    }

    /// One-minute steps over a 390-minute session, `T = 1`.
    pub fn standard() -> Self {
        Self::new(1.0, 1.0 / MINUTES_PER_DAY, 390).expect("standard grid is valid")
    }

    /// `T`.
    pub fn close(&self) -> f64 {
        self.day_length
    }

    /// Tomorrow's close, `2T`: the horizon of the gain and of the risk term.
    pub fn horizon(&self) -> f64 {
        2.0 * self.day_length
    }

    /// Decision time of step `k` (for `k = n_steps` this is the close).
    pub fn time(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.day_length
        } else {
            self.t_open + k as f64 * self.dt
        }
    }

    /// Overnight gap from the previous close to the open.
    pub fn overnight(&self) -> f64 {
        self.t_open
    }

    /// Number of `dt` steps that fit in the overnight gap (rounded).
    pub fn overnight_steps(&self) -> usize {
        (self.t_open / self.dt).round().max(1.0) as usize
    }
}

/// Instantaneous signals seen by the trader.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SignalState {
    /// Slow intraday z-score.
    pub epsilon: f64,
    /// Fast z-score driving fill probabilities.
    pub epsilon_fast: f64,
    /// Daily drift.
    pub alpha_daily: f64,
}

/// Conditional law of `g(s, x_s)` given `x_t = x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Mean and variance of `x_s` given `x_t = x`.
pub fn ou_conditional_moments(p: &OuParams, x: f64, t: f64, s: f64) -> Result<(f64, f64)> {
    if s < t {
        return Err(Error::TimeOrder(format!("s = {s} precedes t = {t}")));
    }
    let tau = s - t;
    if tau.is_infinite() {
        return Ok((p.xbar, p.stationary_variance()));
    }
    let decay = (-p.kappa * tau).exp();
    let mean = if p.kappa == 0.0 {
        x
    } else {
        p.xbar + (x - p.xbar) * decay
    };
    Ok((mean, p.eta * decay_integral(2.0 * p.kappa, tau)))
}

/// Exact one-step sampler: `mean + sqrt(var) * z` over a step of length `dt`.
pub fn ou_step(p: &OuParams, x: f64, dt: f64, z: f64) -> Result<f64> {
    if dt <= 0.0 {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    let (m, v) = ou_conditional_moments(p, x, 0.0, dt)?;
    Ok(m + v.sqrt() * z)
}

/// Precomputed exact stepper for a fixed step size (used in the hot simulation loops).
#[derive(Debug, Clone, Copy)]
pub struct OuStepper {
    decay: f64,
    xbar: f64,
    sd: f64,
}

impl OuStepper {
    pub fn new(p: &OuParams, dt: f64) -> Result<Self> {
        let (_, v) = ou_conditional_moments(p, 0.0, 0.0, dt)?;
        if dt <= 0.0 {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        Ok(Self {
            decay: (-p.kappa * dt).exp(),
            xbar: p.xbar,
            sd: v.sqrt(),
        })
    }

    #[inline]
    pub fn step(&self, x: f64, z: f64) -> f64 {
        self.xbar + (x - self.xbar) * self.decay + self.sd * z
    }
}

/// Integrated gain `g(t, x)` up to `horizon_end`.
pub fn integrated_gain(p: &OuParams, x: f64, t: f64, horizon_end: f64) -> Result<f64> {
    if horizon_end < t {
        return Err(Error::TimeOrder(format!(
            "horizon_end = {horizon_end} precedes t = {t}"
        )));
    }
    let rem = horizon_end - t;
    Ok(p.xbar * rem + (x - p.xbar) * decay_integral(p.kappa, rem))
}

/// Conditional mean `M(s)` and variance `Σ²(s)` of `g(s, x_s)` given `x_t = x`.
pub fn gain_moments(p: &OuParams, x: f64, t: f64, s: f64, horizon_end: f64) -> Result<GainMoments> {
    if !(t <= s && s <= horizon_end) {
        return Err(Error::TimeOrder(format!(
            "need t <= s <= horizon_end, got t = {t}, s = {s}, horizon_end = {horizon_end}"
        )));
    }
    let (mx, vx) = ou_conditional_moments(p, x, t, s)?;
    let lever = decay_integral(p.kappa, horizon_end - s);
    Ok(GainMoments {
        mean: p.xbar * (horizon_end - s) + (mx - p.xbar) * lever,
        variance: vx * lever * lever,
    })
}

/// `max |D g + x|` over `points`, with `D = ∂t + kappa (xbar - x) ∂x + ½ eta ∂xx`
/// discretized by central differences of step `h`.
pub fn gain_pde_residual_of<G: Fn(f64, f64) -> f64>(p: &OuParams, points: &[(f64, f64)], h: f64, gain: G) -> f64 {
    points
        .iter()
        .map(|&(t, x)| {
            let g_t = (gain(t + h, x) - gain(t - h, x)) / (2.0 * h);
            let g_x = (gain(t, x + h) - gain(t, x - h)) / (2.0 * h);
            let g_xx = (gain(t, x + h) - 2.0 * gain(t, x) + gain(t, x - h)) / (h * h);
            let mu = p.kappa * (p.xbar - x);
            (g_t + mu * g_x + 0.5 * p.eta * g_xx + x).abs()
        })
        .fold(0.0, f64::max)
}

/// [`gain_pde_residual_of`] applied to the closed-form gain.
pub fn gain_pde_residual(p: &OuParams, points: &[(f64, f64)], horizon_end: f64, h: f64) -> f64 {
    gain_pde_residual_of(p, points, h, |t, x| {
        integrated_gain(p, x, t, horizon_end).unwrap_or(f64::NAN)
    })
}

/// Intraday alpha from its z-score: `x = beta sqrt(nu) epsilon`.
pub fn zscore_alpha(beta: f64, nu: f64, epsilon: f64) -> Result<f64> {
    ensure(nu >= 0.0, "nu", || format!("must be non-negative, got {nu}"))?;
    Ok(beta * nu.sqrt() * epsilon)
}

/// Risk aversion from the annualized Sharpe and volatility of the daily target.
pub fn calibrate_lambda(annual_sharpe: f64, annual_vol: f64) -> Result<f64> {
    ensure(annual_vol > 0.0, "annual_vol", || {
        format!("must be positive, got {annual_vol}")
    })?;
    Ok(annual_sharpe / annual_vol)
}

/// z-score loading from the annualized Sharpe of the ideal high-frequency position.
pub fn calibrate_beta(annual_sharpe: f64, day_length: f64) -> Result<f64> {
    ensure(day_length > 0.0, "day_length", || {
        format!("must be positive, got {day_length}")
    })?;
    Ok(annual_sharpe / (TRADING_DAYS_PER_YEAR * day_length).sqrt())
}


#[cfg(test)]
mod ks_tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    /// Two-sample Kolmogorov-Smirnov statistic.
    fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
        }
        d
    }

    #[test]
    fn many_small_steps_equal_one_big_step() {
        let p = OuParams::new(8.0, 0.2, 3.0).unwrap();
        let (x0, total, n_small) = (1.5, 0.25, 25);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 10_000;
        let one: Vec<f64> = (0..n)
            .map(|_| ou_step(&p, x0, total, StandardNormal.sample(&mut rng)).unwrap())
            .collect();
        let many: Vec<f64> = (0..n)
            .map(|_| {
                (0..n_small).fold(x0, |x, _| {
                    ou_step(&p, x, total / n_small as f64, StandardNormal.sample(&mut rng)).unwrap()
                })
            })
            .collect();
        // 1% critical value of the two-sample statistic: 1.628 * sqrt(2 / n).
        let crit = 1.628 * (2.0 / n as f64).sqrt();
        assert!(ks_statistic(one, many) < crit);
    }
}
