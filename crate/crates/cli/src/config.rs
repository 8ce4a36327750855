//! JSON run configuration. Every key carries its unit; every section and key is optional
//! and defaults to the reference parameters, so `{}` is a valid config.

use alpha_exec::policy::GainRule;
use alpha_exec::simulator::{DailySignal, SimConfig, StrategyKind};
use alpha_exec::{MarketParams, OuParams, Result, TimeGrid};
use serde::{Deserialize, Serialize};

const MINUTES_PER_DAY: f64 = 1440.0;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub time: TimeSection,
    pub simulate: SimulateSection,
    pub boundaries: BoundariesSection,
    pub exact_check: ExactCheckSection,
    pub oracle_compare: OracleSection,
}

impl Config {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Builds every derived parameter set so that invalid input is rejected before any
    /// command starts computing.
    pub fn validate(&self) -> Result<()> {
        let tg = self.time.grid()?;
        self.simulate.sim_config(&tg)?.validate()?;
        self.boundaries.market.params()?;
        self.boundaries.signals.slow()?;
        let ec = &self.exact_check;
        ec.deterministic.market.params()?;
        ec.deterministic.ou()?;
        ec.quadratic_cost.market.params()?;
        ec.quadratic_cost.signal.ou()?;
        OuParams::zscore_minutes(ec.gain_pde.reversion_minutes)?;
        let oc = &self.oracle_compare;
        for &k in &oc.deterministic.impact_sweep_price_day {
            oc.deterministic.market_with_impact(k)?;
        }
        oc.deterministic.ou()?;
        for &k in &oc.grid.impact_sweep_price_day {
            oc.grid.market_with_impact(k)?;
        }
        oc.grid.signal.ou()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSection {
    pub day_length_days: f64,
    pub step_minutes: f64,
    pub session_steps: usize,
}

impl Default for TimeSection {
    fn default() -> Self {
        Self {
            day_length_days: 1.0,
            step_minutes: 1.0,
            session_steps: 390,
        }
    }
}

impl TimeSection {
    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(
            self.day_length_days,
            self.step_minutes / MINUTES_PER_DAY,
            self.session_steps,
        )
    }
}

/// Price dynamics and costs. `alpha_bar` enters through the target position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MarketSection {
    pub variance_price2_per_day: f64,
    pub half_spread_price: f64,
    pub impact_price_day_per_share: f64,
    pub risk_aversion_per_price: f64,
    pub target_position_shares: f64,
}

impl Default for MarketSection {
    fn default() -> Self {
        Self {
            variance_price2_per_day: 0.01,
            half_spread_price: 0.01,
            impact_price_day_per_share: 0.0,
            risk_aversion_per_price: 37.4,
            target_position_shares: 0.0,
        }
    }
}

impl MarketSection {
    pub fn params(&self) -> Result<MarketParams> {
        MarketParams::with_target(
            self.variance_price2_per_day,
            self.half_spread_price,
            self.impact_price_day_per_share,
            self.risk_aversion_per_price,
            self.target_position_shares,
        )
    }
}

/// An Ornstein-Uhlenbeck alpha in price per day, parameterized by its reversion time and
/// stationary sd.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OuSection {
    pub reversion_minutes: f64,
    pub mean_price_per_day: f64,
    pub stationary_sd_price_per_day: f64,
}

impl Default for OuSection {
    fn default() -> Self {
        Self {
            reversion_minutes: 120.0,
            mean_price_per_day: 0.0,
            stationary_sd_price_per_day: 0.05,
        }
    }
}

impl OuSection {
    pub fn ou(&self) -> Result<OuParams> {
        let kappa = MINUTES_PER_DAY / self.reversion_minutes;
        let sd = self.stationary_sd_price_per_day;
        OuParams::new(kappa, self.mean_price_per_day, 2.0 * kappa * sd * sd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainRuleName {
    Exact,
    FastReversion,
}

impl From<GainRuleName> for GainRule {
    fn from(g: GainRuleName) -> Self {
        match g {
            GainRuleName::Exact => GainRule::Exact,
            GainRuleName::FastReversion => GainRule::FastReversion,
        }
    }
}

/// z-score signals: the slow one drives the gain, the fast one the fill probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SignalSection {
    pub slow_reversion_minutes: f64,
    pub fast_reversion_minutes: f64,
    pub slow_loading_beta: f64,
    pub fast_loading_beta_tilde: f64,
    pub gain_rule: GainRuleName,
}

impl Default for SignalSection {
    fn default() -> Self {
        Self {
            slow_reversion_minutes: 30.0,
            fast_reversion_minutes: 1.0,
            slow_loading_beta: 1.0,
            fast_loading_beta_tilde: 13.0,
            gain_rule: GainRuleName::FastReversion,
        }
    }
}

impl SignalSection {
    pub fn slow(&self) -> Result<OuParams> {
        OuParams::zscore_minutes(self.slow_reversion_minutes)
    }

    pub fn fast(&self) -> Result<OuParams> {
        OuParams::zscore_minutes(self.fast_reversion_minutes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub n_days: usize,
    pub seed: u64,
    pub market: MarketSection,
    pub signals: SignalSection,
    pub daily_reversion_days: f64,
    pub daily_annual_sharpe: f64,
    pub strategies: Vec<StrategyKind>,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self {
            n_days: 1260,
            seed: 1,
            market: MarketSection::default(),
            signals: SignalSection::default(),
            daily_reversion_days: 10.0,
            daily_annual_sharpe: 2.1,
            strategies: StrategyKind::ALL.to_vec(),
        }
    }
}

impl SimulateSection {
    pub fn sim_config(&self, tg: &TimeGrid) -> Result<SimConfig> {
        let mut mp = self.market.params()?;
        // The daily alpha replaces the static target.
        mp.alpha_bar = 0.0;
        Ok(SimConfig {
            n_days: self.n_days,
            seed: self.seed,
            tg: *tg,
            mp,
            ou_slow: self.signals.slow()?,
            ou_fast: self.signals.fast()?,
            daily_signal: DailySignal {
                reversion_days: self.daily_reversion_days,
                annual_sharpe: self.daily_annual_sharpe,
            },
            beta: self.signals.slow_loading_beta,
            beta_tilde: self.signals.fast_loading_beta_tilde,
            gain_rule: self.signals.gain_rule.into(),
            strategies: self.strategies.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundariesSection {
    pub market: MarketSection,
    pub signals: SignalSection,
    pub t_points: usize,
    /// Slow z-scores, evenly spaced on `[-z, z]`.
    pub slow_zscore_max: f64,
    pub slow_zscore_points: usize,
    /// Fast z-scores at which fill probabilities and limit edges are tabulated.
    pub fast_zscores: Vec<f64>,
}

impl Default for BoundariesSection {
    fn default() -> Self {
        Self {
            market: MarketSection::default(),
            signals: SignalSection::default(),
            t_points: 40,
            slow_zscore_max: 3.0,
            slow_zscore_points: 25,
            fast_zscores: vec![-2.0, 0.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeterministicSection {
    pub market: MarketSection,
    pub reversion_minutes: f64,
    pub start_position_shares: f64,
    pub start_signal_price_per_day: f64,
}

impl Default for DeterministicSection {
    fn default() -> Self {
        Self {
            market: MarketSection {
                half_spread_price: 0.1,
                impact_price_day_per_share: 1e-3,
                risk_aversion_per_price: 50.0,
                target_position_shares: 1.0,
                ..MarketSection::default()
            },
            reversion_minutes: 20.0,
            start_position_shares: 2.0,
            start_signal_price_per_day: -2.0,
        }
    }
}

impl DeterministicSection {
    pub fn ou(&self) -> Result<OuParams> {
        OuParams::new(MINUTES_PER_DAY / self.reversion_minutes, 0.0, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadCostSection {
    pub market: MarketSection,
    pub signal: OuSection,
    pub hjb_t_points: usize,
    pub hjb_x_points: usize,
    pub hjb_q_points: usize,
}

impl Default for QuadCostSection {
    fn default() -> Self {
        Self {
            market: MarketSection {
                half_spread_price: 0.0,
                impact_price_day_per_share: 0.05,
                risk_aversion_per_price: 50.0,
                target_position_shares: 1.0,
                ..MarketSection::default()
            },
            signal: OuSection {
                reversion_minutes: 120.0,
                mean_price_per_day: 0.01,
                stationary_sd_price_per_day: 0.01,
            },
            hjb_t_points: 50,
            hjb_x_points: 20,
            hjb_q_points: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GainPdeSection {
    pub reversion_minutes: f64,
    pub points: usize,
    pub seed: u64,
}

impl Default for GainPdeSection {
    fn default() -> Self {
        Self {
            reversion_minutes: 30.0,
            points: 1000,
            seed: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub euler_lagrange: f64,
    pub riccati: f64,
    pub hjb_quadratic_cost: f64,
    pub gain_pde: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            euler_lagrange: 1e-6,
            riccati: 1e-8,
            hjb_quadratic_cost: 1e-4,
            gain_pde: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExactCheckSection {
    pub deterministic: DeterministicSection,
    pub quadratic_cost: QuadCostSection,
    pub gain_pde: GainPdeSection,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetSweepSection {
    pub market: MarketSection,
    pub reversion_minutes: f64,
    pub start_position_shares: f64,
    pub start_signal_price_per_day: f64,
    pub impact_sweep_price_day: Vec<f64>,
    pub tolerance_shares: f64,
}

impl Default for DetSweepSection {
    fn default() -> Self {
        let d = DeterministicSection::default();
        Self {
            market: d.market,
            reversion_minutes: d.reversion_minutes,
            start_position_shares: d.start_position_shares,
            start_signal_price_per_day: d.start_signal_price_per_day,
            impact_sweep_price_day: vec![1e-4, 3e-4, 1e-3, 3e-3],
            tolerance_shares: 1e-3,
        }
    }
}

impl DetSweepSection {
    pub fn market_with_impact(&self, k: f64) -> Result<MarketParams> {
        MarketSection {
            impact_price_day_per_share: k,
            ..self.market.clone()
        }
        .params()
    }

    pub fn ou(&self) -> Result<OuParams> {
        OuParams::new(MINUTES_PER_DAY / self.reversion_minutes, 0.0, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSweepSection {
    pub market: MarketSection,
    pub signal: OuSection,
    pub impact_sweep_price_day: Vec<f64>,
    pub x_points: usize,
    pub q_points: usize,
    pub x_extent_sd: f64,
    /// Times at which boundaries are compared, besides the open.
    pub snapshot_times_days: Vec<f64>,
    /// Defaults to one q-grid spacing.
    pub tolerance_shares: Option<f64>,
}

impl Default for GridSweepSection {
    fn default() -> Self {
        Self {
            market: MarketSection {
                impact_price_day_per_share: 1.0,
                risk_aversion_per_price: 50.0,
                target_position_shares: 1.0,
                ..MarketSection::default()
            },
            signal: OuSection {
                reversion_minutes: 120.0,
                mean_price_per_day: 0.0,
                stationary_sd_price_per_day: 0.05,
            },
            impact_sweep_price_day: vec![1.0, 2.0, 4.0, 8.0],
            x_points: 81,
            q_points: 401,
            x_extent_sd: 4.0,
            snapshot_times_days: vec![0.85],
            tolerance_shares: None,
        }
    }
}

impl GridSweepSection {
    pub fn market_with_impact(&self, k: f64) -> Result<MarketParams> {
        MarketSection {
            impact_price_day_per_share: k,
            ..self.market.clone()
        }
        .params()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    pub deterministic: DetSweepSection,
    pub grid: GridSweepSection,
}
