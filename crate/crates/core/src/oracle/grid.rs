//! Explicit finite-difference solver for the market-order HJB equation
//! `V_t + κ(x̄ - x)V_x + ½η V_xx + ½λν(q - q̄)² + min_u [C|u| - g u + K u² + u V_q] = 0`
//! with `V(T, x, q) = ½λνT (q - q̄)²`.

use crate::error::{ensure, Error, Result};
use crate::policy::MarketParams;
use crate::signals::{integrated_gain, OuParams, TimeGrid};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_x: usize,
    pub n_q: usize,
    /// Half-width of the x axis in stationary standard deviations.
    pub x_extent_sd: f64,
    /// Half-width of the q axis around `q̄`; chosen from the band width when `None`.
    pub q_half_width: Option<f64>,
    /// Fixed time step; adaptive (a fraction `cfl_safety` of the stability bound) when `None`.
    pub dt: Option<f64>,
    pub cfl_safety: f64,
    /// Earliest time solved for.
    pub t_start: f64,
    /// Times at which the value is kept, besides `t_start` and `T`.
    pub snapshot_times: Vec<f64>,
}

impl GridSpec {
    pub fn new(n_x: usize, n_q: usize, t_start: f64) -> Self {
        Self {
            n_x,
            n_q,
            x_extent_sd: 5.0,
            q_half_width: None,
            dt: None,
            cfl_safety: 0.9,
            t_start,
            snapshot_times: Vec::new(),
        }
    }
}

/// Value snapshots on a tensor grid; `values[k]` is the `n_x × n_q` slice at `t_grid[k]`,
/// stored row-major in x.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridValue {
    pub t_grid: Vec<f64>,
    pub x_grid: Vec<f64>,
    pub q_grid: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub mp: MarketParams,
    pub ou: OuParams,
    pub horizon: f64,
    /// Time steps taken.
    pub steps: usize,
}

impl GridValue {
    pub fn value(&self, k: usize, i: usize, j: usize) -> f64 {
        self.values[k][i * self.q_grid.len() + j]
    }

    /// Index of the snapshot at time `t`, if any.
    pub fn snapshot_index(&self, t: f64) -> Option<usize> {
        self.t_grid
            .iter()
            .position(|&s| (s - t).abs() <= 1e-12 * (1.0 + t.abs()))
    }

    /// Grid-implied `(b₋, b₊)` at snapshot `k`, node `x_grid[i]`: the roots in `q` of
    /// `V_q - g - C` and `g - C - V_q`, with `V_q` at cell midpoints and linear
    /// interpolation. `None` where a root is not bracketed inside the grid.
    pub fn boundaries(&self, k: usize, i: usize) -> (Option<f64>, Option<f64>) {
        let t = self.t_grid[k];
        let g = integrated_gain(&self.ou, self.x_grid[i], t, self.horizon).unwrap_or(f64::NAN);
        let c = self.mp.half_spread;
        let hq = self.q_grid[1] - self.q_grid[0];
        let nq = self.q_grid.len();
        let mids: Vec<(f64, f64)> = (0..nq - 1)
            .map(|j| {
                let vq = (self.value(k, i, j + 1) - self.value(k, i, j)) / hq;
                (0.5 * (self.q_grid[j] + self.q_grid[j + 1]), vq)
            })
            .collect();
        let root = |level: f64| {
            mids.windows(2).find_map(|w| {
                let (q0, f0) = (w[0].0, w[0].1 - level);
                let (q1, f1) = (w[1].0, w[1].1 - level);
                if f0 <= 0.0 && f1 > 0.0 {
                    Some(q0 + (q1 - q0) * (-f0) / (f1 - f0))
                } else {
                    None
                }
            })
        };
        (root(g + c), root(g - c))
    }
}

struct Axes {
    x: Vec<f64>,
    q: Vec<f64>,
    hx: f64,
    hq: f64,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Solves backward from `T` to `spec.t_start`.
pub fn solve_hjb_grid(mp: &MarketParams, ou: &OuParams, tg: &TimeGrid, spec: &GridSpec) -> Result<GridValue> {
    mp.validate()?;
    ou.validate()?;
    ensure(mp.impact > 0.0, "impact", || "grid solver needs K > 0".into())?;
    ensure(spec.n_x >= 3 && spec.n_q >= 3, "grid", || {
        "need at least 3 nodes per axis".into()
    })?;
    ensure(spec.x_extent_sd > 0.0, "x_extent_sd", || "must be positive".into())?;
    ensure(spec.cfl_safety > 0.0 && spec.cfl_safety <= 1.0, "cfl_safety", || {
        "must lie in (0, 1]".into()
    })?;
    let close = tg.close();
    ensure(spec.t_start >= 0.0 && spec.t_start < close, "t_start", || {
        format!("must lie in [0, T), got {}", spec.t_start)
    })?;

    let rr = mp.risk_rate();
    let qb = mp.q_bar();
    let sd = ou.stationary_variance().sqrt();
    ensure(sd.is_finite(), "eta", || "needs a stationary signal".into())?;
    let gain_reach = integrated_gain(&ou.scaled(1.0), ou.xbar + spec.x_extent_sd * sd, close, tg.horizon())?.abs()
        + ou.xbar.abs() * tg.horizon();
    let half = spec
        .q_half_width
        .unwrap_or(5.0 * mp.half_spread / (rr * close) + 1.5 * gain_reach / (rr * close));
    ensure(half > 0.0, "q_half_width", || "must be positive".into())?;
    let axes = {
        let x = linspace(
            ou.xbar - spec.x_extent_sd * sd,
            ou.xbar + spec.x_extent_sd * sd,
            spec.n_x,
        );
        let q = linspace(qb - half, qb + half, spec.n_q);
        Axes {
            hx: x[1] - x[0],
            hq: q[1] - q[0],
            x,
            q,
        }
    };
    let (nx, nq) = (spec.n_x, spec.n_q);

    let mut v: Vec<f64> = (0..nx * nq)
        .map(|idx| {
            let y = axes.q[idx % nq] - qb;
            0.5 * rr * close * y * y
        })
        .collect();
    let mut snaps: Vec<f64> = spec
        .snapshot_times
        .iter()
        .copied()
        .filter(|&s| s > spec.t_start && s < close)
        .collect();
    snaps.sort_by(|a, b| b.total_cmp(a));
    snaps.dedup();
    let mut t_grid = vec![close];
    let mut values = vec![v.clone()];

    let mu_max = axes
        .x
        .iter()
        .map(|&x| (ou.kappa * (ou.xbar - x)).abs())
        .fold(0.0, f64::max);
    let mut t = close;
    let mut steps = 0usize;
    let mut next_snap = 0usize;
    let mut rates = vec![0.0; nx * nq];
    while t > spec.t_start + 1e-14 {
        let new = sweep(&v, &mut rates, t, mp, ou, tg, &axes, nx, nq);
        let u_max = rates.iter().fold(0.0_f64, |m, &u| m.max(u.abs()));
        let bound = 1.0 / (ou.eta / (axes.hx * axes.hx) + mu_max / axes.hx + u_max / axes.hq);
        let mut target = spec.t_start;
        if next_snap < snaps.len() {
            target = target.max(snaps[next_snap]);
        }
        let dt = match spec.dt {
            Some(dt) => {
                if dt > bound {
                    return Err(Error::CflViolation { dt, bound });
                }
                dt.min(t - target)
            }
            None => (spec.cfl_safety * bound).min(t - target),
        };
        for (vv, src) in v.iter_mut().zip(&new) {
            *vv += dt * src;
        }
        t -= dt;
        steps += 1;
        if (t - target).abs() <= 1e-14 {
            t = target;
            t_grid.push(t);
            values.push(v.clone());
            if next_snap < snaps.len() && target == snaps[next_snap] {
                next_snap += 1;
            }
        }
    }
    if *t_grid.last().unwrap_or(&close) != spec.t_start {
        t_grid.push(spec.t_start);
        values.push(v);
    }
    Ok(GridValue {
        t_grid,
        x_grid: axes.x,
        q_grid: axes.q,
        values,
        mp: *mp,
        ou: *ou,
        horizon: tg.horizon(),
        steps,
    })
}

/// Time derivative source `-V_t` at every node, filling the optimal rates.
#[allow(clippy::too_many_arguments)]
fn sweep(
    v: &[f64],
    rates: &mut [f64],
    t: f64,
    mp: &MarketParams,
    ou: &OuParams,
    tg: &TimeGrid,
    axes: &Axes,
    nx: usize,
    nq: usize,
) -> Vec<f64> {
    let (hx, hq) = (axes.hx, axes.hq);
    let rr = mp.risk_rate();
    let qb = mp.q_bar();
    let (c, k) = (mp.half_spread, mp.impact);
    let mut out = vec![0.0; nx * nq];
    out.par_chunks_mut(nq)
        .zip(rates.par_chunks_mut(nq))
        .enumerate()
        .for_each(|(i, (row, rrow))| {
            let x = axes.x[i];
            let g = integrated_gain(ou, x, t, tg.horizon()).unwrap_or(f64::NAN);
            let mu = ou.kappa * (ou.xbar - x);
            let at = |ii: usize, j: usize| v[ii * nq + j];
            for j in 0..nq {
                let c0 = at(i, j);
                // x terms: central where it is monotone, upwind otherwise; edges one-sided.
                let (up, dn) = (
                    if i + 1 < nx { Some(at(i + 1, j)) } else { None },
                    if i > 0 { Some(at(i - 1, j)) } else { None },
                );
                let lx = match (up, dn) {
                    (Some(u), Some(d)) => {
                        let diff = 0.5 * ou.eta * (u - 2.0 * c0 + d) / (hx * hx);
                        let drift = if mu.abs() * hx <= ou.eta {
                            mu * (u - d) / (2.0 * hx)
                        } else if mu > 0.0 {
                            mu * (u - c0) / hx
                        } else {
                            mu * (c0 - d) / hx
                        };
                        diff + drift
                    }
                    (Some(u), None) => mu.max(0.0) * (u - c0) / hx,
                    (None, Some(d)) => mu.min(0.0) * (c0 - d) / hx,
                    (None, None) => 0.0,
                };
                // q terms, upwinded by the direction of trading.
                let fwd = if j + 1 < nq {
                    (at(i, j + 1) - c0) / hq
                } else {
                    (c0 - at(i, j - 1)) / hq
                };
                let bwd = if j > 0 { (c0 - at(i, j - 1)) / hq } else { fwd };
                let buy = (g - c - fwd).max(0.0);
                let sell = (bwd - g - c).max(0.0);
                let (h, u) = if buy * buy >= sell * sell {
                    (-buy * buy / (4.0 * k), buy / (2.0 * k))
                } else {
                    (-sell * sell / (4.0 * k), -sell / (2.0 * k))
                };
                let y = axes.q[j] - qb;
                row[j] = lx + 0.5 * rr * y * y + h;
                rrow[j] = u;
            }
        });
    out
}
