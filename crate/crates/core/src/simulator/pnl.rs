use crate::error::{Error, Result};
use crate::signals::TRADING_DAYS_PER_YEAR;
use serde::{Deserialize, Serialize};

/// One close-to-close day.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DailyRecord {
    /// Marked to mid.
    pub gross: f64,
    /// Half-spreads paid by market orders minus those earned by filled limit orders.
    pub linear_costs: f64,
    pub impact_costs: f64,
    pub net: f64,
    pub end_position: f64,
    pub market_volume: f64,
    pub limit_volume: f64,
    /// Yesterday's closing position times today's close-to-close move.
    pub close_to_close: f64,
    /// Today's trades marked from their execution mid to today's close.
    pub trade_to_close: f64,
    pub fills: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PnLSeries {
    pub records: Vec<DailyRecord>,
}

impl PnLSeries {
    pub fn cumulative_net(&self) -> Vec<f64> {
        self.records
            .iter()
            .scan(0.0, |acc, r| {
                *acc += r.net;
                Some(*acc)
            })
            .collect()
    }

    pub fn total_net(&self) -> f64 {
        self.records.iter().map(|r| r.net).sum()
    }
}

fn moments(pnl: &PnLSeries) -> Result<(f64, f64, usize)> {
    let n = pnl.records.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 days, got {n}")));
    }
    let mean = pnl.records.iter().map(|r| r.net).sum::<f64>() / n as f64;
    let var = pnl.records.iter().map(|r| (r.net - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok((mean, var.sqrt(), n))
}

/// `mean / sd · √252` of daily net P&L (unbiased sd).
pub fn compute_sharpe(pnl: &PnLSeries) -> Result<f64> {
    let (mean, sd, _) = moments(pnl)?;
    if sd.is_nan() || sd <= 1e-14 * (1.0 + mean.abs()) {
        return Err(Error::ZeroVariance);
    }
    Ok(mean / sd * TRADING_DAYS_PER_YEAR.sqrt())
}

/// Standard error of the annualized Sharpe under iid daily returns,
/// `√(252 (1 + s²/2) / n)` with `s` the daily Sharpe.
pub fn sharpe_standard_error(pnl: &PnLSeries) -> Result<f64> {
    let annual = compute_sharpe(pnl)?;
    let n = pnl.records.len() as f64;
    let s = annual / TRADING_DAYS_PER_YEAR.sqrt();
    Ok((TRADING_DAYS_PER_YEAR * (1.0 + 0.5 * s * s) / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(nets: &[f64]) -> PnLSeries {
        PnLSeries {
            records: nets
                .iter()
                .map(|&net| DailyRecord {
                    net,
                    gross: net,
                    ..Default::default()
                })
                .collect(),
        }
    }

    #[test]
    fn sharpe_examples() {
        assert!(matches!(compute_sharpe(&series(&[0.3; 10])), Err(Error::ZeroVariance)));
        assert_eq!(compute_sharpe(&series(&[1.0, -1.0, 1.0, -1.0])).unwrap(), 0.0);
        assert!(matches!(
            compute_sharpe(&series(&[1.0])),
            Err(Error::InsufficientData(_))
        ));
        let s = compute_sharpe(&series(&[1.0, 2.0, 3.0])).unwrap();
        assert!((s - 2.0 * 252f64.sqrt()).abs() < 1e-12);
        assert_eq!(series(&[1.0, 2.0, -0.5]).cumulative_net(), vec![1.0, 3.0, 2.5]);
    }
}
