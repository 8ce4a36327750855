//! Zero-volatility signal `x(s) = x e^{-κ (s - t)}`: the optimal path solves the
//! Euler-Lagrange equation `-2K q̈ + ġ + λν (q - q̄) = 0` until it touches the no-trade
//! boundary with zero speed at the stopping time `t̂`.

use crate::error::{ensure, Error, Result};
use crate::policy::{nt_boundaries, MarketParams};
use crate::signals::{decay_integral, integrated_gain, OuParams, TimeGrid};
use serde::{Deserialize, Serialize};

/// Samples used to bracket the first boundary contact.
const SCAN_POINTS: usize = 4000;
/// `|q0 - b|` below which the start is treated as lying on the boundary.
const ON_BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Started above `b₋`, selling down to it.
    FromSell,
    /// Started below `b₊`, buying up to it.
    FromBuy,
}

impl Side {
    /// +1 for the sell side (cost enters as `+C`), -1 for the buy side.
    fn cost_sign(self) -> f64 {
        match self {
            Side::FromSell => 1.0,
            Side::FromBuy => -1.0,
        }
    }
}

/// Closed-form optimal path. Positions after `t_hat` are held constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetTrajectory {
    /// Integration constant multiplying `e^{sA}(1 - e^{-2(s-t)A})`.
    pub a: f64,
    pub t_hat: f64,
    /// `A = sqrt(λν / 2K)`, 1/day.
    pub decay_rate: f64,
    pub side: Side,
    pub t0: f64,
    pub q0: f64,
    pub x0: f64,
    /// Whether the held position stays inside the no-trade band until the close.
    pub stays_in_zone: bool,
    /// Whether the speed keeps the side's sign on `[t0, t̂]`; the closed form assumes it.
    pub monotone: bool,
    kappa: f64,
    q_bar: f64,
    impact: f64,
    risk_rate: f64,
    /// `-P'(τ̂) / A / (1 + e^{-2Aτ̂})`, the scaled homogeneous amplitude.
    amp: f64,
}

struct Particular {
    x0: f64,
    kappa: f64,
    rate: f64,
    q_bar: f64,
    q0: f64,
    impact: f64,
}

impl Particular {
    /// Returns `(P, P', P'')` at elapsed time `tau`.
    ///
    /// The signal term `x (e^{-Aτ} - e^{-κτ}) / (2Kκ² - λν)` is written as
    /// `x e^{-Aτ} L(κ - A, τ) / (2K (κ + A))`, which stays exact through `κ = A`.
    fn eval(&self, tau: f64) -> (f64, f64, f64) {
        let a = self.rate;
        let ea = (-a * tau).exp();
        let ek = (-self.kappa * tau).exp();
        let c = self.x0 / (2.0 * self.impact * (self.kappa + a));
        let lever = ea * decay_integral(self.kappa - a, tau);
        let sig = c * lever;
        let dsig = c * (ek - a * lever);
        let ddsig = c * (a * a * lever - (a + self.kappa) * ek);
        let d = self.q0 - self.q_bar;
        (sig + self.q_bar + d * ea, dsig - a * d * ea, ddsig + a * a * d * ea)
    }
}

impl DetTrajectory {
    fn particular(&self) -> Particular {
        Particular {
            x0: self.x0,
            kappa: self.kappa,
            rate: self.decay_rate,
            q_bar: self.q_bar,
            q0: self.q0,
            impact: self.impact,
        }
    }

    fn eval(&self, s: f64) -> (f64, f64, f64) {
        let tau = (s.min(self.t_hat) - self.t0).max(0.0);
        let tau_hat = self.t_hat - self.t0;
        let a = self.decay_rate;
        let (p, dp, ddp) = self.particular().eval(tau);
        let grow = (a * (tau - tau_hat)).exp();
        let shrink = (-a * (tau + tau_hat)).exp();
        let h = self.amp * (grow - shrink);
        let dh = self.amp * a * (grow + shrink);
        let (q, dq, ddq) = (p + h, dp + dh, ddp + a * a * h);
        if s > self.t_hat {
            (q, 0.0, 0.0)
        } else {
            (q, dq, ddq)
        }
    }

    /// `q(s)`, held at `q(t̂)` after the stopping time.
    pub fn position(&self, s: f64) -> f64 {
        self.eval(s).0
    }

    pub fn velocity(&self, s: f64) -> f64 {
        self.eval(s).1
    }

    /// Deterministic signal value at `s`.
    pub fn signal(&self, s: f64) -> f64 {
        self.x0 * (-self.kappa * (s - self.t0)).exp()
    }

    /// The deterministic gain `∫_s^{2T} x(r) dr` along the signal path.
    pub fn gain(&self, s: f64, tg: &TimeGrid) -> f64 {
        let det = OuParams {
            kappa: self.kappa,
            xbar: 0.0,
            eta: 0.0,
        };
        integrated_gain(&det, self.signal(s), s, tg.horizon()).unwrap_or(f64::NAN)
    }
}

/// Boundary value `b± = q̄ + (ĝ ∓ C) / (λν (2T - t̂))` reached on `side`.
pub fn det_boundary(t_hat: f64, g_hat: f64, mp: &MarketParams, tg: &TimeGrid, side: Side) -> Result<f64> {
    let (b_minus, b_plus) = nt_boundaries(t_hat, g_hat, mp, tg)?;
    Ok(match side {
        Side::FromSell => b_minus,
        Side::FromBuy => b_plus,
    })
}

/// Solves for the stopping time and integration constant of the optimal path from
/// `(t0, q0)` with deterministic signal `x0 e^{-κ (s - t0)}`.
///
/// `ou` must have `eta = 0` and `xbar = 0`.
pub fn det_trajectory_solve(
    q0: f64,
    x0: f64,
    t0: f64,
    mp: &MarketParams,
    tg: &TimeGrid,
    ou: &OuParams,
) -> Result<DetTrajectory> {
    ensure(mp.impact > 0.0, "impact", || "deterministic paths need K > 0".into())?;
    ensure(ou.eta == 0.0, "eta", || {
        format!("signal must be deterministic, got eta = {}", ou.eta)
    })?;
    ensure(ou.xbar == 0.0, "xbar", || "the closed form assumes xbar = 0".into())?;
    ensure(ou.kappa > 0.0, "kappa", || "the closed form needs kappa > 0".into())?;
    ensure(t0 >= 0.0 && t0 < tg.close(), "t0", || {
        format!("must lie before the close, got {t0}")
    })?;

    let rate = (mp.risk_rate() / (2.0 * mp.impact)).sqrt();
    let mut traj = DetTrajectory {
        a: 0.0,
        t_hat: t0,
        decay_rate: rate,
        side: Side::FromSell,
        t0,
        q0,
        x0,
        stays_in_zone: true,
        monotone: true,
        kappa: ou.kappa,
        q_bar: mp.q_bar(),
        impact: mp.impact,
        risk_rate: mp.risk_rate(),
        amp: 0.0,
    };

    let g0 = traj.gain(t0, tg);
    let (b_minus, b_plus) = nt_boundaries(t0, g0, mp, tg)?;
    let side = if q0 > b_minus + ON_BOUNDARY_TOL {
        Side::FromSell
    } else if q0 < b_plus - ON_BOUNDARY_TOL {
        Side::FromBuy
    } else if (q0 - b_minus).abs() <= ON_BOUNDARY_TOL {
        Side::FromSell
    } else if (q0 - b_plus).abs() <= ON_BOUNDARY_TOL {
        Side::FromBuy
    } else {
        return Err(Error::StartsInsideZone { q0, b_plus, b_minus });
    };
    traj.side = side;
    let sign = side.cost_sign();

    let part = traj.particular();
    let base = traj;
    let boundary = |tau: f64| -> f64 {
        let s = t0 + tau;
        let g = base.gain(s, tg);
        base.q_bar + (g + sign * mp.half_spread) / (mp.risk_rate() * (tg.horizon() - s))
    };
    // Position reached at τ̂ when the speed is zero there, minus the boundary.
    let contact = |tau: f64| -> f64 {
        let (p, dp, _) = part.eval(tau);
        p - dp * (rate * tau).tanh() / rate - boundary(tau)
    };

    let f0 = contact(0.0);
    if f0.abs() <= ON_BOUNDARY_TOL {
        traj.stays_in_zone = holds_inside(&traj, mp, tg);
        return Ok(traj);
    }
    let span = tg.close() - t0;
    let mut lo = 0.0;
    let mut hi = None;
    for i in 1..=SCAN_POINTS {
        let tau = span * i as f64 / SCAN_POINTS as f64;
        if contact(tau).signum() != f0.signum() {
            hi = Some(tau);
            break;
        }
        lo = tau;
    }
    let mut hi = hi.ok_or(Error::StoppingAfterClose {
        t: t0,
        close: tg.close(),
    })?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if contact(mid).signum() == f0.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau_hat = if contact(lo).abs() < contact(hi).abs() { lo } else { hi };
    let (_, dp_hat, _) = part.eval(tau_hat);
    traj.amp = -dp_hat / rate / (1.0 + (-2.0 * rate * tau_hat).exp());
    traj.t_hat = t0 + tau_hat;
    // a e^{sA}(1 - e^{-2(s-t)A}) = amp (e^{A(τ-τ̂)} - e^{-A(τ+τ̂)}) ⇒ a = amp e^{-A t̂}.
    traj.a = traj.amp * (-rate * traj.t_hat).exp();

    let residual = (traj.position(traj.t_hat) - boundary(tau_hat)).abs();
    if residual > 1e-9 || traj.velocity(traj.t_hat).abs() > 1e-9 {
        return Err(Error::NoConvergence(format!(
            "stopping conditions not met: position gap {residual:e}"
        )));
    }
    traj.stays_in_zone = holds_inside(&traj, mp, tg);
    traj.monotone = (0..400).all(|i| {
        let s = traj.t0 + (traj.t_hat - traj.t0) * i as f64 / 400.0;
        traj.velocity(s) * sign <= 1e-12
    });
    Ok(traj)
}

fn holds_inside(traj: &DetTrajectory, mp: &MarketParams, tg: &TimeGrid) -> bool {
    let q = traj.position(traj.t_hat);
    let n = 400;
    (0..=n).all(|i| {
        let s = traj.t_hat + (tg.close() - traj.t_hat) * i as f64 / n as f64;
        match nt_boundaries(s, traj.gain(s, tg), mp, tg) {
            Ok((bm, bp)) => q <= bm + 1e-9 && q >= bp - 1e-9,
            Err(_) => false,
        }
    })
}

/// `max |-2K q̈ + ġ + λν (q - q̄)|` along an arbitrary path, with `q̈` from the
/// fourth-order central stencil of step `h` and `ġ = -x(s)`.
pub fn euler_lagrange_residual_of<Q: Fn(f64) -> f64>(
    path: Q,
    signal: impl Fn(f64) -> f64,
    mp: &MarketParams,
    times: &[f64],
    h: f64,
) -> f64 {
    times
        .iter()
        .map(|&s| {
            let q = path(s);
            let qdd = (-path(s + 2.0 * h) + 16.0 * path(s + h) - 30.0 * q + 16.0 * path(s - h) - path(s - 2.0 * h))
                / (12.0 * h * h);
            (-2.0 * mp.impact * qdd - signal(s) + mp.risk_rate() * (q - mp.q_bar())).abs()
        })
        .fold(0.0, f64::max)
}

/// Euler-Lagrange residual of a solved trajectory on `times` (each within `[t0+2h, t̂-2h]`).
pub fn det_euler_lagrange_residual(traj: &DetTrajectory, mp: &MarketParams, times: &[f64], h: f64) -> f64 {
    euler_lagrange_residual_of(|s| traj.position(s), |s| traj.signal(s), mp, times, h)
}

/// Residual of the general-impact Euler-Lagrange equation
/// `∓ pK d/ds (±q̇)^{p-1} + ġ + λν (q - q̄) = 0` along a supplied path.
pub fn general_p_euler_lagrange_residual<Q: Fn(f64) -> f64>(
    path: Q,
    signal: impl Fn(f64) -> f64,
    side: Side,
    mp: &MarketParams,
    times: &[f64],
    h: f64,
) -> f64 {
    let p = mp.impact_exponent;
    // Buy side: upper signs; sell side: lower signs.
    let s_in = match side {
        Side::FromBuy => 1.0,
        Side::FromSell => -1.0,
    };
    let speed_term = |s: f64| {
        let qd = (path(s + h) - path(s - h)) / (2.0 * h);
        (s_in * qd).max(0.0).powf(p - 1.0)
    };
    times
        .iter()
        .map(|&s| {
            let d = (speed_term(s + h) - speed_term(s - h)) / (2.0 * h);
            (-s_in * p * mp.impact * d - signal(s) + mp.risk_rate() * (path(s) - mp.q_bar())).abs()
        })
        .fold(0.0, f64::max)
}
