use crate::error::{ensure, Result};
use crate::policy::{GainRule, MarketParams, SignalModel};
use crate::signals::{OuParams, TimeGrid, TRADING_DAYS_PER_YEAR};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    DailyIdealNoCost,
    DailyIdealWithCost,
    HjbMarket,
    HjbMarketLimit,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [
        StrategyKind::DailyIdealNoCost,
        StrategyKind::DailyIdealWithCost,
        StrategyKind::HjbMarket,
        StrategyKind::HjbMarketLimit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::DailyIdealNoCost => "daily_ideal_no_cost",
            StrategyKind::DailyIdealWithCost => "daily_ideal_with_cost",
            StrategyKind::HjbMarket => "hjb_market",
            StrategyKind::HjbMarketLimit => "hjb_market_limit",
        }
    }
}

/// Daily alpha: AR(1) across days, constant within a day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DailySignal {
    pub reversion_days: f64,
    /// Target annualized Sharpe of the cost-free daily strategy.
    pub annual_sharpe: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_days: usize,
    pub seed: u64,
    pub tg: TimeGrid,
    /// `alpha_bar` is replaced by the daily alpha; `impact` must be 0 (jump mode).
    pub mp: MarketParams,
    /// z-score law of the slow intraday signal.
    pub ou_slow: OuParams,
    /// z-score law of the fast signal.
    pub ou_fast: OuParams,
    pub daily_signal: DailySignal,
    pub beta: f64,
    pub beta_tilde: f64,
    pub gain_rule: GainRule,
    pub strategies: Vec<StrategyKind>,
}

impl SimConfig {
    pub fn paper_defaults() -> Self {
        Self {
            n_days: 1260,
            seed: 1,
            tg: TimeGrid::standard(),
            mp: MarketParams::new(0.01, 0.01, 0.0, 37.4, 0.0).expect("valid defaults"),
            ou_slow: OuParams::zscore_minutes(30.0).expect("valid defaults"),
            ou_fast: OuParams::zscore_minutes(1.0).expect("valid defaults"),
            daily_signal: DailySignal {
                reversion_days: 10.0,
                annual_sharpe: 2.1,
            },
            beta: 1.0,
            beta_tilde: 13.0,
            gain_rule: GainRule::FastReversion,
            strategies: StrategyKind::ALL.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.n_days >= 1, "n_days", || "need at least one day".into())?;
        self.mp.validate()?;
        self.ou_slow.validate()?;
        self.ou_fast.validate()?;
        ensure(self.mp.impact == 0.0, "impact", || {
            "simulation runs in jump mode (K = 0)".into()
        })?;
        ensure(self.daily_signal.reversion_days > 0.0, "reversion_days", || {
            "must be positive".into()
        })?;
        let s = self.daily_sharpe();
        ensure(
            self.daily_signal.annual_sharpe >= 0.0 && 2.0 * s * s < 1.0,
            "annual_sharpe",
            || {
                format!(
                    "need 0 <= S and 2 (S/sqrt(252))^2 < 1, got {}",
                    self.daily_signal.annual_sharpe
                )
            },
        )?;
        ensure(self.beta.is_finite() && self.beta_tilde.is_finite(), "beta", || {
            "must be finite".into()
        })?;
        ensure(!self.strategies.is_empty(), "strategies", || "list is empty".into())
    }

    fn daily_sharpe(&self) -> f64 {
        self.daily_signal.annual_sharpe / TRADING_DAYS_PER_YEAR.sqrt()
    }

    /// Day-over-day autocorrelation of the daily alpha.
    pub fn daily_rho(&self) -> f64 {
        (-self.tg.day_length / self.daily_signal.reversion_days).exp()
    }

    /// Stationary sd of the daily alpha. Holding `q̄ = ᾱ/(λν)` for a day earns mean
    /// `σ² T/(λν)` and variance `(2σ⁴T² + σ² ν_eff T)/(λν)²`, where `ν_eff T` is the daily
    /// price variance from noise and intraday signals; solving for the daily Sharpe `s`
    /// gives `σ² = s² ν_eff / (T (1 - 2s²))`.
    pub fn alpha_daily_sd(&self) -> f64 {
        let t = self.tg.day_length;
        let nu = self.mp.nu;
        let slow = self.beta * self.beta * nu * self.ou_slow.stationary_integral_variance(t);
        let fast = self.beta_tilde * self.beta_tilde * nu * self.ou_fast.stationary_integral_variance(t);
        let nu_eff = nu + (slow + fast) / t;
        let s = self.daily_sharpe();
        (s * s * nu_eff / (t * (1.0 - 2.0 * s * s))).sqrt()
    }

    pub fn signal_model(&self) -> SignalModel {
        SignalModel {
            slow: self.ou_slow,
            beta: self.beta,
            fast_beta: self.beta_tilde,
            gain_rule: self.gain_rule,
        }
    }
}
