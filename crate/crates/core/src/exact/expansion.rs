//! Leading terms of the `1/K` expansion `V = V0 + V1/K + ...` with linear costs.

use crate::error::{ensure, Error, Result};
use crate::normal::{lower_partial_expectation, upper_partial_expectation};
use crate::policy::{nt_boundaries, value_approx, MarketParams};
use crate::quad::{integrate, QuadConfig};
use crate::signals::{gain_moments, integrated_gain, OuParams, TimeGrid};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpansionOrder {
    Zero,
    One,
}

/// Expansion pieces at one `(t, x)`, with `q` placed on each leading boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTerms {
    /// `V0` at `q = q̄`.
    pub v0_exp: f64,
    /// `∂V1/∂q` at `(b₋⁽⁰⁾, b₊⁽⁰⁾)`.
    pub dv1_dq: (f64, f64),
    /// `(b₋⁽⁰⁾, b₊⁽⁰⁾)`.
    pub b0: (f64, f64),
    /// `(b₋⁽¹⁾, b₊⁽¹⁾)`, to be multiplied by `1/K`.
    pub b1: (f64, f64),
}

/// `∂V1/∂q = ½ ∫_t^T λν(2T - s) {E[(G - C - V0q)₊] - E[(V0q - C - G)₊]} ds` with
/// `G ~ N(M(s), Σ²(s))` and `V0q(s) = λν (2T - s)(q - q̄)`.
pub fn expansion_dv1_dq(t: f64, q: f64, x: f64, mp: &MarketParams, ou: &OuParams, tg: &TimeGrid) -> Result<f64> {
    dv1_dq_with(t, q, x, mp, ou, tg, QuadConfig::default())
}

pub(crate) fn dv1_dq_with(
    t: f64,
    q: f64,
    x: f64,
    mp: &MarketParams,
    ou: &OuParams,
    tg: &TimeGrid,
    cfg: QuadConfig,
) -> Result<f64> {
    ensure(t <= tg.close(), "t", || format!("must not exceed the close, got {t}"))?;
    let h = tg.horizon();
    let c = mp.half_spread;
    let y = q - mp.q_bar();
    let integrand = |s: f64| -> f64 {
        let curv = mp.risk_rate() * (h - s);
        let v0q = curv * y;
        // t ≤ s ≤ T < 2T always holds inside the integration range.
        let gm = gain_moments(ou, x, t, s, h).expect("ordered times");
        let sd = gm.variance.max(0.0).sqrt();
        let sell = upper_partial_expectation(gm.mean, sd, c + v0q);
        let buy = lower_partial_expectation(gm.mean, sd, v0q - c);
        0.5 * curv * (sell - buy)
    };
    let v = integrate(integrand, t, tg.close(), cfg)?;
    if !v.is_finite() {
        return Err(Error::NoConvergence(format!("non-finite slope correction at t = {t}")));
    }
    Ok(v)
}

/// All expansion terms at `(t, x)`.
pub fn expansion_terms(t: f64, x: f64, mp: &MarketParams, ou: &OuParams, tg: &TimeGrid) -> Result<ExpansionTerms> {
    expansion_terms_with(t, x, mp, ou, tg, QuadConfig::default())
}

pub(crate) fn expansion_terms_with(
    t: f64,
    x: f64,
    mp: &MarketParams,
    ou: &OuParams,
    tg: &TimeGrid,
    cfg: QuadConfig,
) -> Result<ExpansionTerms> {
    let g = integrated_gain(ou, x, t, tg.horizon())?;
    let (bm, bp) = nt_boundaries(t, g, mp, tg)?;
    let curv = mp.risk_rate() * (tg.horizon() - t);
    let dm = dv1_dq_with(t, bm, x, mp, ou, tg, cfg)?;
    let dp = dv1_dq_with(t, bp, x, mp, ou, tg, cfg)?;
    Ok(ExpansionTerms {
        v0_exp: value_approx(t, mp.q_bar(), mp, tg)?,
        dv1_dq: (dm, dp),
        b0: (bm, bp),
        b1: (-dm / curv, -dp / curv),
    })
}

/// `(b₋, b₊)` at the requested order.
pub fn expansion_boundary(
    t: f64,
    x: f64,
    mp: &MarketParams,
    ou: &OuParams,
    tg: &TimeGrid,
    order: ExpansionOrder,
) -> Result<(f64, f64)> {
    match order {
        ExpansionOrder::Zero => {
            let g = integrated_gain(ou, x, t, tg.horizon())?;
            nt_boundaries(t, g, mp, tg)
        }
        ExpansionOrder::One => {
            ensure(mp.impact > 0.0, "impact", || "order 1 requires K > 0".into())?;
            let e = expansion_terms(t, x, mp, ou, tg)?;
            Ok((e.b0.0 + e.b1.0 / mp.impact, e.b0.1 + e.b1.1 / mp.impact))
        }
    }
}
