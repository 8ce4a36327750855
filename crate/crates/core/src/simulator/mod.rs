//! Monte Carlo market with an intraday slow signal, a fast signal and a daily alpha,
//! plus the four strategies and their P&L accounting.

mod config;
mod paths;
mod pnl;
mod strategies;

pub use config::{DailySignal, SimConfig, StrategyKind};
pub use paths::{generate_paths, DayPath, PathSet};
pub use pnl::{compute_sharpe, sharpe_standard_error, DailyRecord, PnLSeries};
pub use strategies::{
    run_daily_strategy, run_experiment, run_hjb_limit, run_hjb_market, run_seeds, run_strategy, ExperimentReport,
    StrategyResult,
};
