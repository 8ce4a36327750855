use super::config::{SimConfig, StrategyKind};
use super::paths::{generate_paths, PathSet};
use super::pnl::{compute_sharpe, DailyRecord, PnLSeries};
use crate::error::{ensure, Result};
use crate::policy::{decide, Mode, SignalModel, Zone};
use crate::signals::SignalState;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Orders for one step: a market trade executed now and a resting limit order that
/// fills only if the next price move crosses the full spread.
#[derive(Debug, Clone, Copy, Default)]
struct Orders {
    market: f64,
    limit: f64,
}

/// Shared accounting loop: trades execute at the decision-time mid, market orders pay
/// `C`, filled limit orders earn `C`, the position is marked to mid at every step.
fn simulate<F>(paths: &PathSet, cfg: &SimConfig, charge_costs: bool, mut policy: F) -> Result<PnLSeries>
where
    F: FnMut(usize, usize, f64) -> Result<Orders>,
{
    let c = cfg.mp.half_spread;
    let mut q = 0.0;
    let mut records = Vec::with_capacity(paths.days.len());
    for (d, day) in paths.days.iter().enumerate() {
        let n = day.epsilon.len();
        ensure(day.price.len() == n + 1, "paths", || {
            "price needs one more entry than signals".into()
        })?;
        let close = day.price[n];
        let prev_close = day.price[0] - day.open_gap;
        let mut r = DailyRecord {
            close_to_close: q * (close - prev_close),
            gross: q * day.open_gap,
            ..Default::default()
        };
        for k in 0..n {
            let o = policy(d, k, q)?;
            let dp = day.price[k + 1] - day.price[k];
            let mut traded = 0.0;
            if o.market != 0.0 {
                traded += o.market;
                r.market_volume += o.market.abs();
                if charge_costs {
                    r.linear_costs += c * o.market.abs();
                }
            }
            let filled = (o.limit > 0.0 && dp <= -2.0 * c) || (o.limit < 0.0 && dp >= 2.0 * c);
            if filled {
                traded += o.limit;
                r.limit_volume += o.limit.abs();
                r.fills += 1;
                if charge_costs {
                    r.linear_costs -= c * o.limit.abs();
                }
            }
            q += traded;
            r.trade_to_close += traded * (close - day.price[k]);
            r.gross += q * dp;
        }
        r.net = r.gross - r.linear_costs - r.impact_costs;
        r.end_position = q;
        records.push(r);
    }
    Ok(PnLSeries { records })
}

fn state(paths: &PathSet, d: usize, k: usize) -> SignalState {
    let day = &paths.days[d];
    SignalState {
        epsilon: day.epsilon[k],
        epsilon_fast: day.epsilon_fast[k],
        alpha_daily: day.alpha_daily,
    }
}

/// Trades to `q̄_d = ᾱ_d/(λν)` at each open and holds; costs charged iff `with_costs`.
pub fn run_daily_strategy(paths: &PathSet, cfg: &SimConfig, with_costs: bool) -> Result<PnLSeries> {
    cfg.validate()?;
    let rr = cfg.mp.risk_rate();
    simulate(paths, cfg, with_costs, |d, k, q| {
        let market = if k == 0 {
            paths.days[d].alpha_daily / rr - q
        } else {
            0.0
        };
        Ok(Orders { market, limit: 0.0 })
    })
}

fn run_hjb(paths: &PathSet, cfg: &SimConfig, model: &SignalModel, mode: Mode) -> Result<PnLSeries> {
    cfg.validate()?;
    let tg = cfg.tg;
    simulate(paths, cfg, true, |d, k, q| {
        let dec = decide(tg.time(k), &state(paths, d, k), q, &cfg.mp, &tg, model, mode)?;
        let delta = dec.target - q;
        Ok(match dec.zone {
            Zone::BuyMarket | Zone::SellMarket => Orders {
                market: delta,
                limit: 0.0,
            },
            Zone::BuyLimit | Zone::SellLimit => Orders {
                market: 0.0,
                limit: delta,
            },
            Zone::MarketMake | Zone::NoTrade => Orders::default(),
        })
    })
}

/// Jump-mode market orders: trade to the nearer no-trade edge whenever outside the band.
pub fn run_hjb_market(paths: &PathSet, cfg: &SimConfig) -> Result<PnLSeries> {
    run_hjb(paths, cfg, &cfg.signal_model(), Mode::MarketOnly)
}

/// Jump mode with limit orders in the limit zones and market orders beyond `b̃±`.
pub fn run_hjb_limit(paths: &PathSet, cfg: &SimConfig) -> Result<PnLSeries> {
    run_hjb(paths, cfg, &cfg.signal_model(), Mode::MarketAndLimit)
}

pub fn run_strategy(paths: &PathSet, cfg: &SimConfig, kind: StrategyKind) -> Result<PnLSeries> {
    match kind {
        StrategyKind::DailyIdealNoCost => run_daily_strategy(paths, cfg, false),
        StrategyKind::DailyIdealWithCost => run_daily_strategy(paths, cfg, true),
        StrategyKind::HjbMarket => run_hjb_market(paths, cfg),
        StrategyKind::HjbMarketLimit => run_hjb_limit(paths, cfg),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyResult {
    pub kind: StrategyKind,
    /// `None` when the daily net P&L has zero variance.
    pub sharpe: Option<f64>,
    pub pnl: PnLSeries,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub n_days: usize,
    pub results: Vec<StrategyResult>,
}

impl ExperimentReport {
    pub fn result(&self, kind: StrategyKind) -> Option<&StrategyResult> {
        self.results.iter().find(|r| r.kind == kind)
    }
}

/// Runs every configured strategy on one shared path set.
pub fn run_experiment(cfg: &SimConfig) -> Result<ExperimentReport> {
    let paths = generate_paths(cfg)?;
    let results = cfg
        .strategies
        .iter()
        .map(|&kind| {
            let pnl = run_strategy(&paths, cfg, kind)?;
            Ok(StrategyResult {
                kind,
                sharpe: compute_sharpe(&pnl).ok(),
                pnl,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport {
        seed: cfg.seed,
        n_days: cfg.n_days,
        results,
    })
}

/// Independent experiments, one per seed, in parallel; output order follows `seeds`.
pub fn run_seeds(cfg: &SimConfig, seeds: &[u64]) -> Result<Vec<ExperimentReport>> {
    seeds
        .par_iter()
        .map(|&seed| run_experiment(&SimConfig { seed, ..cfg.clone() }))
        .collect()
}
