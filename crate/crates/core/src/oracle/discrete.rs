//! Discrete-time deterministic execution problem.
//!
//! Positions are piecewise linear between decision times, so the running risk over a
//! step with end deviations `a, b` is exactly `½λν dt (a² + ab + b²) / 3`, and each
//! step's gain is the interval average of `g`.

use crate::error::{ensure, Error, Result};
use crate::policy::MarketParams;
use crate::signals::{decay_integral, OuParams, TimeGrid};
use serde::{Deserialize, Serialize};

const MAX_ITER: usize = 200_000;
const KKT_TOL: f64 = 1e-10;
const POLISH_EVERY: usize = 500;
const OBJ_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteProblem {
    pub n: usize,
    pub dt: f64,
    pub t0: f64,
    pub q0: f64,
    /// Per-step gains (interval averages).
    pub gains: Vec<f64>,
    pub mp: MarketParams,
    /// End of the risk horizon, `2T`.
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSolution {
    pub trades: Vec<f64>,
    /// `n + 1` positions starting at `q0`.
    pub positions: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Objective after every accepted iterate.
    pub objective_trace: Vec<f64>,
}

impl DiscreteProblem {
    /// Problem on the trading session `[t0, T]` split into `n` steps, for the
    /// deterministic signal `x0 e^{-κ(s - t0)}`.
    pub fn from_deterministic_signal(
        q0: f64,
        x0: f64,
        t0: f64,
        ou: &OuParams,
        mp: &MarketParams,
        tg: &TimeGrid,
        n: usize,
    ) -> Result<Self> {
        ensure(n >= 1, "n", || "need at least one step".into())?;
        let dt = (tg.close() - t0) / n as f64;
        let h = tg.horizon();
        let k = ou.kappa;
        // g(s) = x0 ∫_s^{2T} e^{-κ(r - t0)} dr; averaged over [s_i, s_i + dt].
        let gains = (0..n)
            .map(|i| {
                let s = t0 + i as f64 * dt;
                let e = (-k * (s - t0)).exp();
                let tail = (-k * (h - t0)).exp();
                // ∫_s^{s+dt} (e^{-κ(r-t0)} - e^{-κ(2T-t0)}) / κ dr, through κ = 0.
                let lead = e * decay_integral(k, dt) - tail * dt;
                if k == 0.0 {
                    x0 * (h - s - 0.5 * dt)
                } else {
                    x0 * lead / k / dt
                }
            })
            .collect();
        let prob = Self {
            n,
            dt,
            t0,
            q0,
            gains,
            mp: *mp,
            horizon: h,
        };
        prob.validate()?;
        Ok(prob)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.n >= 1, "n", || "need at least one step".into())?;
        ensure(self.gains.len() == self.n, "gains", || {
            format!("expected {} entries, got {}", self.n, self.gains.len())
        })?;
        ensure(self.dt > 0.0, "dt", || format!("must be positive, got {}", self.dt))?;
        ensure(self.mp.impact > 0.0 || self.mp.half_spread > 0.0, "impact", || {
            "need K > 0 or C > 0".into()
        })?;
        ensure(self.end_time() < self.horizon, "horizon", || {
            "must exceed the last step".into()
        })
    }

    pub fn end_time(&self) -> f64 {
        self.t0 + self.n as f64 * self.dt
    }

    fn terminal_weight(&self) -> f64 {
        self.mp.risk_rate() * (self.horizon - self.end_time())
    }

    fn positions(&self, trades: &[f64]) -> Vec<f64> {
        let mut q = Vec::with_capacity(self.n + 1);
        q.push(self.q0);
        for d in trades {
            q.push(q.last().copied().unwrap_or(self.q0) + d);
        }
        q
    }

    /// Objective of a trade sequence.
    pub fn objective(&self, trades: &[f64]) -> f64 {
        let mp = &self.mp;
        let qb = mp.q_bar();
        let q = self.positions(trades);
        let mut total = 0.0;
        for (i, &d) in trades.iter().enumerate() {
            let (a, b) = (q[i] - qb, q[i + 1] - qb);
            total += mp.half_spread * d.abs() - self.gains[i] * d + mp.impact * d * d / self.dt;
            total += 0.5 * mp.risk_rate() * self.dt * (a * a + a * b + b * b) / 3.0;
        }
        let y = q[self.n] - qb;
        total + 0.5 * self.terminal_weight() * y * y
    }

    /// Gradient of the smooth part (everything but `C|Δq|`) with respect to the trades.
    fn smooth_gradient(&self, trades: &[f64], out: &mut [f64]) {
        let mp = &self.mp;
        let qb = mp.q_bar();
        let n = self.n;
        let q = self.positions(trades);
        let w = 0.5 * mp.risk_rate() * self.dt / 3.0;
        // ∂/∂q_i of risk and terminal terms, i = 1..n.
        let mut running = 0.0;
        for i in (1..=n).rev() {
            let y = q[i] - qb;
            let left = (q[i - 1] - qb) + 2.0 * y;
            let mut dq = w * left;
            if i < n {
                dq += w * (2.0 * y + (q[i + 1] - qb));
            } else {
                dq += self.terminal_weight() * y;
            }
            running += dq;
            out[i - 1] = running - self.gains[i - 1] + 2.0 * mp.impact * trades[i - 1] / self.dt;
        }
    }

    /// Largest eigenvalue of the smooth Hessian in trade space, by power iteration.
    fn lipschitz(&self) -> f64 {
        let n = self.n;
        let zero_gain = DiscreteProblem {
            gains: vec![0.0; n],
            q0: self.mp.q_bar(),
            ..self.clone()
        };
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        let mut hv = vec![0.0; n];
        let mut lam = 0.0;
        for _ in 0..100 {
            zero_gain.smooth_gradient(&v, &mut hv);
            let norm = hv.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            lam = norm;
            for (a, b) in v.iter_mut().zip(&hv) {
                *a = b / norm;
            }
        }
        lam
    }
}

/// Minimizes the discrete objective over buy/sell parts `b, s ≥ 0` (`Δq = b - s`) with
/// monotone accelerated projected gradient.
pub fn solve_discrete_deterministic(prob: &DiscreteProblem) -> Result<DiscreteSolution> {
    prob.validate()?;
    let n = prob.n;
    let c = prob.mp.half_spread;
    // The split doubles the Hessian's top eigenvalue.
    let lip = 2.0 * prob.lipschitz() * 1.02;
    let step = 1.0 / lip;

    let mut buy = vec![0.0; n];
    let mut sell = vec![0.0; n];
    let mut yb = buy.clone();
    let mut ys = sell.clone();
    let mut grad = vec![0.0; n];
    let mut trades = vec![0.0; n];
    let mut momentum = 1.0_f64;
    let mut obj = prob.objective(&trades);
    let mut trace = vec![obj];

    let project = |yb: &[f64], ys: &[f64], grad: &[f64], nb: &mut Vec<f64>, ns: &mut Vec<f64>| {
        for i in 0..n {
            nb[i] = (yb[i] - step * (c + grad[i])).max(0.0);
            ns[i] = (ys[i] - step * (c - grad[i])).max(0.0);
        }
    };
    let mut nb = vec![0.0; n];
    let mut ns = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    for iter in 1..=MAX_ITER {
        for i in 0..n {
            tmp[i] = yb[i] - ys[i];
        }
        prob.smooth_gradient(&tmp, &mut grad);
        project(&yb, &ys, &grad, &mut nb, &mut ns);
        for i in 0..n {
            tmp[i] = nb[i] - ns[i];
        }
        let mut new_obj = prob.objective(&tmp);
        if new_obj > obj {
            // Restart from the last accepted point with a plain gradient step.
            momentum = 1.0;
            for i in 0..n {
                trades[i] = buy[i] - sell[i];
            }
            prob.smooth_gradient(&trades, &mut grad);
            project(&buy, &sell, &grad, &mut nb, &mut ns);
            for i in 0..n {
                tmp[i] = nb[i] - ns[i];
            }
            new_obj = prob.objective(&tmp);
            if new_obj > obj {
                new_obj = obj;
                nb.clone_from(&buy);
                ns.clone_from(&sell);
            }
        }
        let next = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        let beta = (momentum - 1.0) / next;
        momentum = next;
        for i in 0..n {
            yb[i] = nb[i] + beta * (nb[i] - buy[i]);
            ys[i] = ns[i] + beta * (ns[i] - sell[i]);
        }
        let change = obj - new_obj;
        std::mem::swap(&mut buy, &mut nb);
        std::mem::swap(&mut sell, &mut ns);
        obj = new_obj;
        trace.push(obj);

        for i in 0..n {
            trades[i] = buy[i] - sell[i];
        }
        let converged = change.abs() <= OBJ_TOL * (1.0 + obj.abs());
        if converged && kkt_violation(prob, &buy, &sell, &trades) < KKT_TOL {
            return Ok(DiscreteSolution {
                positions: prob.positions(&trades),
                trades,
                objective: obj,
                iterations: iter,
                objective_trace: trace,
            });
        }
        if converged || iter % POLISH_EVERY == 0 {
            if let Some(exact) = polish(prob, &trades) {
                let (b, s): (Vec<f64>, Vec<f64>) = exact.iter().map(|&d| (d.max(0.0), (-d).max(0.0))).unzip();
                if kkt_violation(prob, &b, &s, &exact) < KKT_TOL {
                    let objective = prob.objective(&exact);
                    return Ok(DiscreteSolution {
                        positions: prob.positions(&exact),
                        trades: exact,
                        objective,
                        iterations: iter,
                        objective_trace: trace,
                    });
                }
            }
        }
    }
    Err(Error::NoConvergence(format!(
        "projected gradient hit {MAX_ITER} iterations"
    )))
}

/// Exact minimizer on the face where each trade keeps its current sign (zero trades stay
/// zero); `None` if the linear system is singular or a sign flips.
fn polish(prob: &DiscreteProblem, trades: &[f64]) -> Option<Vec<f64>> {
    let active: Vec<usize> = (0..prob.n).filter(|&i| trades[i] != 0.0).collect();
    let m = active.len();
    let mut out = vec![0.0; prob.n];
    if m == 0 {
        return Some(out);
    }
    // The smooth part is quadratic: grad(d) = H d + grad(0).
    let mut g0 = vec![0.0; prob.n];
    prob.smooth_gradient(&out, &mut g0);
    let mut col = vec![0.0; prob.n];
    let mut unit = vec![0.0; prob.n];
    let mut h = vec![0.0; m * m];
    for (cj, &j) in active.iter().enumerate() {
        unit[j] = 1.0;
        prob.smooth_gradient(&unit, &mut col);
        unit[j] = 0.0;
        for (ci, &i) in active.iter().enumerate() {
            h[ci * m + cj] = col[i] - g0[i];
        }
    }
    let c = prob.mp.half_spread;
    let mut rhs: Vec<f64> = active.iter().map(|&i| -(g0[i] + c * trades[i].signum())).collect();
    let sol = solve_dense(&mut h, &mut rhs, m)?;
    for (ci, &i) in active.iter().enumerate() {
        if sol[ci].signum() != trades[i].signum() {
            return None;
        }
        out[i] = sol[ci];
    }
    Some(out)
}

/// Gaussian elimination with partial pivoting on a row-major `m × m` system.
fn solve_dense(a: &mut [f64], b: &mut [f64], m: usize) -> Option<Vec<f64>> {
    for col in 0..m {
        let piv = (col..m).max_by(|&x, &y| a[x * m + col].abs().total_cmp(&a[y * m + col].abs()))?;
        if a[piv * m + col].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for k in 0..m {
                a.swap(piv * m + k, col * m + k);
            }
            b.swap(piv, col);
        }
        let d = a[col * m + col];
        for r in col + 1..m {
            let f = a[r * m + col] / d;
            if f != 0.0 {
                for k in col..m {
                    a[r * m + k] -= f * a[col * m + k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; m];
    for r in (0..m).rev() {
        let mut acc = b[r];
        for k in r + 1..m {
            acc -= a[r * m + k] * x[k];
        }
        x[r] = acc / a[r * m + r];
    }
    Some(x)
}

/// Largest violation of the optimality conditions of the split problem.
fn kkt_violation(prob: &DiscreteProblem, buy: &[f64], sell: &[f64], trades: &[f64]) -> f64 {
    let mut grad = vec![0.0; prob.n];
    prob.smooth_gradient(trades, &mut grad);
    let c = prob.mp.half_spread;
    let part = |x: f64, gx: f64| if x > 0.0 { gx.abs() } else { (-gx).max(0.0) };
    (0..prob.n)
        .map(|i| part(buy[i], c + grad[i]).max(part(sell[i], c - grad[i])))
        .fold(0.0, f64::max)
}
