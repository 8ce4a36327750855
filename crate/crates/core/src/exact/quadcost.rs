//! Quadratic costs only (`C = 0`): `V = V0(t,x) + V1(t,x) (q - q̄) + V2(t) (q - q̄)²`.

use crate::error::{ensure, Result};
use crate::policy::MarketParams;
use crate::quad::{integrate, QuadConfig};
use crate::signals::{decay_integral, integrated_gain, ou_conditional_moments, OuParams, TimeGrid};

/// Closed-form value with Feynman-Kac quadratures for the signal-dependent terms.
#[derive(Debug, Clone, Copy)]
pub struct QuadCostValue {
    pub mp: MarketParams,
    /// Law of the signal in drift units.
    pub ou: OuParams,
    pub tg: TimeGrid,
    /// `A = sqrt(λν / 2K)`.
    pub decay_rate: f64,
    pub quad: QuadConfig,
}

/// Builds the value function; rejects `C ≠ 0` and `K ≤ 0`.
pub fn quadcost_value(mp: &MarketParams, ou: &OuParams, tg: &TimeGrid) -> Result<QuadCostValue> {
    mp.validate()?;
    ou.validate()?;
    ensure(mp.half_spread == 0.0, "half_spread", || {
        format!("closed form requires C = 0, got {}", mp.half_spread)
    })?;
    ensure(mp.impact > 0.0, "impact", || "closed form requires K > 0".into())?;
    Ok(QuadCostValue {
        mp: *mp,
        ou: *ou,
        tg: *tg,
        decay_rate: (mp.risk_rate() / (2.0 * mp.impact)).sqrt(),
        quad: QuadConfig {
            abs_tol: 1e-15,
            rel_tol: 1e-11,
            max_intervals: 2000,
        },
    })
}

impl QuadCostValue {
    fn close(&self) -> f64 {
        self.tg.close()
    }

    /// `c = T A`, the terminal slope ratio.
    fn c(&self) -> f64 {
        self.close() * self.decay_rate
    }

    pub fn v2(&self, t: f64) -> f64 {
        let a = self.decay_rate;
        let th = (a * (self.close() - t)).tanh();
        let c = self.c();
        self.mp.impact * a * (th + c) / (1.0 + c * th)
    }

    /// `exp(-∫_t^s V2/K)`, for `t ≤ s ≤ T`.
    pub fn discount(&self, t: f64, s: f64) -> f64 {
        let a = self.decay_rate;
        let c = self.c();
        let n = |tau: f64| (1.0 + c) + (1.0 - c) * (-2.0 * a * tau).exp();
        (-a * (s - t)).exp() * n(self.close() - s) / n(self.close() - t)
    }

    /// `V1(t, x) = I0(t) + (x - x̄) I1(t)`; returns `(I0, I1)`.
    fn v1_affine(&self, t: f64) -> Result<(f64, f64)> {
        let (k, xbar, h) = (self.ou.kappa, self.ou.xbar, self.tg.horizon());
        let w = |s: f64| self.discount(t, s) * self.v2(s) / self.mp.impact;
        let i0 = if xbar == 0.0 {
            0.0
        } else {
            integrate(|s| w(s) * xbar * (h - s), t, self.close(), self.quad)?
        };
        let i1 = integrate(
            |s| w(s) * (-k * (s - t)).exp() * decay_integral(k, h - s),
            t,
            self.close(),
            self.quad,
        )?;
        Ok((i0, i1))
    }

    pub fn v1(&self, t: f64, x: f64) -> Result<f64> {
        let (i0, i1) = self.v1_affine(t)?;
        Ok(i0 + (x - self.ou.xbar) * i1)
    }

    /// `V0(t, x) = -(1/4K) ∫_t^T E[(g - V1)²(s, x_s)] ds`.
    pub fn v0(&self, t: f64, x: f64) -> Result<f64> {
        let (xbar, h) = (self.ou.xbar, self.tg.horizon());
        let failure = std::cell::RefCell::new(None);
        let integrand = |s: f64| -> f64 {
            let run = || -> Result<f64> {
                let (i0, i1) = self.v1_affine(s)?;
                let level = xbar * (h - s) - i0;
                let slope = decay_integral(self.ou.kappa, h - s) - i1;
                let (m, v) = ou_conditional_moments(&self.ou, x, t, s)?;
                let mean = level + slope * (m - xbar);
                Ok(mean * mean + slope * slope * v)
            };
            run().unwrap_or_else(|e| {
                failure.borrow_mut().get_or_insert(e);
                0.0
            })
        };
        let outer = QuadConfig {
            rel_tol: 1e-10,
            ..self.quad
        };
        let total = integrate(integrand, t, self.close(), outer)?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(-total / (4.0 * self.mp.impact))
    }

    /// `V(t, x, q)` for `t ≤ T`.
    pub fn value(&self, t: f64, x: f64, q: f64) -> Result<f64> {
        let y = q - self.mp.q_bar();
        Ok(self.v0(t, x)? + self.v1(t, x)? * y + self.v2(t) * y * y)
    }

    /// `max |V2' + ½λν - V2²/K|` with a five-point stencil of step `h`.
    pub fn riccati_residual(&self, times: &[f64], h: f64) -> f64 {
        times
            .iter()
            .map(|&t| {
                let d = (-self.v2(t + 2.0 * h) + 8.0 * self.v2(t + h) - 8.0 * self.v2(t - h) + self.v2(t - 2.0 * h))
                    / (12.0 * h);
                let v = self.v2(t);
                (d + 0.5 * self.mp.risk_rate() - v * v / self.mp.impact).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `max |V_t + κ(x̄ - x) V_x + ½η V_xx + ½λν (q - q̄)² - (g - V_q)²/4K|` by central
    /// differences with steps `(h_t, h_x, h_q)`.
    pub fn hjb_residual(&self, points: &[(f64, f64, f64)], steps: (f64, f64, f64)) -> Result<f64> {
        let (ht, hx, hq) = steps;
        let mut worst: f64 = 0.0;
        for &(t, x, q) in points {
            let v = |t: f64, x: f64, q: f64| self.value(t, x, q);
            let c = v(t, x, q)?;
            let vt = (v(t + ht, x, q)? - v(t - ht, x, q)?) / (2.0 * ht);
            let (up, dn) = (v(t, x + hx, q)?, v(t, x - hx, q)?);
            let vx = (up - dn) / (2.0 * hx);
            let vxx = (up - 2.0 * c + dn) / (hx * hx);
            let vq = (v(t, x, q + hq)? - v(t, x, q - hq)?) / (2.0 * hq);
            let g = integrated_gain(&self.ou, x, t, self.tg.horizon())?;
            let y = q - self.mp.q_bar();
            let r = vt
                + self.ou.kappa * (self.ou.xbar - x) * vx
                + 0.5 * self.ou.eta * vxx
                + 0.5 * self.mp.risk_rate() * y * y
                - (g - vq).powi(2) / (4.0 * self.mp.impact);
            worst = worst.max(r.abs());
        }
        Ok(worst)
    }
}

/// Optimal rate `u = (g - V1 - 2 V2 (q - q̄)) / 2K`.
pub fn quadcost_rate(t: f64, q: f64, x: f64, qcv: &QuadCostValue, mp: &MarketParams) -> Result<f64> {
    ensure(mp.half_spread == 0.0, "half_spread", || {
        format!("closed form requires C = 0, got {}", mp.half_spread)
    })?;
    let g = integrated_gain(&qcv.ou, x, t, qcv.tg.horizon())?;
    let dv = qcv.v1(t, x)? + 2.0 * qcv.v2(t) * (q - mp.q_bar());
    Ok((g - dv) / (2.0 * mp.impact))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::OuStepper;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn setup(xbar: f64) -> (MarketParams, OuParams, TimeGrid) {
        let mp = MarketParams::with_target(0.01, 0.0, 0.05, 50.0, 1.0).unwrap();
        let ou = OuParams::new(12.0, xbar, 24.0 * 0.01).unwrap();
        (mp, ou, TimeGrid::standard())
    }

    #[test]
    fn terminal_conditions() {
        let (mp, ou, tg) = setup(0.02);
        let v = quadcost_value(&mp, &ou, &tg).unwrap();
        assert!((v.v2(1.0) - 0.5 * mp.risk_rate()).abs() < 1e-15);
        assert_eq!(v.v1(1.0, 0.3).unwrap(), 0.0);
        assert_eq!(v.v0(1.0, 0.3).unwrap(), 0.0);
        for i in 0..100 {
            assert!(v.v2(i as f64 / 100.0) > 0.0);
        }
    }

    #[test]
    fn rejects_linear_costs() {
        let (_, ou, tg) = setup(0.0);
        let mp = MarketParams::with_target(0.01, 0.01, 0.05, 50.0, 1.0).unwrap();
        assert!(quadcost_value(&mp, &ou, &tg).is_err());
        let (mp0, _, _) = setup(0.0);
        let v = quadcost_value(&mp0, &ou, &tg).unwrap();
        assert!(quadcost_rate(0.7, 1.0, 0.0, &v, &mp).is_err());
    }

    #[test]
    fn zero_signal_v1_vanishes() {
        let (mp, ou, tg) = setup(0.0);
        let v = quadcost_value(&mp, &ou, &tg).unwrap();
        for &t in &[0.0, 0.73, 0.99] {
            assert_eq!(v.v1(t, 0.0).unwrap(), 0.0);
        }
        let u = quadcost_rate(0.8, 1.7, 0.0, &v, &mp).unwrap();
        assert!((u + v.v2(0.8) * 0.7 / mp.impact).abs() < 1e-12);
        let g = integrated_gain(&ou, 0.4, 0.8, 2.0).unwrap();
        let v1 = v.v1(0.8, 0.4).unwrap();
        // At q = q̄ the rate only depends on g - V1.
        let u = quadcost_rate(0.8, 1.0, 0.4, &v, &mp).unwrap();
        assert!((u - (g - v1) / (2.0 * mp.impact)).abs() < 1e-12);
    }

    #[test]
    fn discount_matches_quadrature() {
        let (mp, ou, tg) = setup(0.0);
        let v = quadcost_value(&mp, &ou, &tg).unwrap();
        let i = integrate(|s| v.v2(s) / mp.impact, 0.3, 0.9, QuadConfig::tight()).unwrap();
        assert!((v.discount(0.3, 0.9) - (-i).exp()).abs() < 1e-12);
    }

    #[test]
    fn riccati_and_hjb() {
        let (mp, ou, tg) = setup(0.01);
        let v = quadcost_value(&mp, &ou, &tg).unwrap();
        let times: Vec<f64> = (0..200).map(|i| 0.7 + 0.29 * i as f64 / 199.0).collect();
        assert!(v.riccati_residual(&times, 1e-4) < 1e-8);
        let sd = ou.stationary_variance().sqrt();
        let pts = [(0.75, sd, 0.2), (0.9, -sd, 2.0), (0.98, 0.3 * sd, 1.0)];
        let r = v.hjb_residual(&pts, (1e-4, 0.2 * sd, 0.5)).unwrap();
        assert!(r < 1e-4, "hjb residual {r:e}");
        // A wrong V2 breaks the equation.
        let mut off = v;
        off.decay_rate *= 1.01;
        assert!(off.riccati_residual(&times, 1e-4) > 1e-6);
    }

    /// Expected objective `E[∫(-g u + K u²) + ½λν ∫_t^{2T} (q - q̄)²]` of a feedback rule.
    fn objective<F: Fn(f64, f64, f64) -> f64>(rule: F, paths: usize) -> f64 {
        let (mp, ou, tg) = setup(0.0);
        let dt = 5.0 * tg.dt;
        let n = tg.n_steps / 5;
        let step = OuStepper::new(&ou, dt).unwrap();
        let x_sd = ou.stationary_variance().sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut total = 0.0;
        for _ in 0..paths {
            let z0: f64 = StandardNormal.sample(&mut rng);
            let mut x = x_sd * z0;
            let mut q = 0.0;
            let mut cost = 0.0;
            for k in 0..n {
                let t = tg.t_open + k as f64 * dt;
                let g = integrated_gain(&ou, x, t, tg.horizon()).unwrap();
                let u = rule(t, q, x);
                let y = q - mp.q_bar();
                cost += (-g * u + mp.impact * u * u + 0.5 * mp.risk_rate() * y * y) * dt;
                q += u * dt;
                let z: f64 = StandardNormal.sample(&mut rng);
                x = step.step(x, z);
            }
            let y = q - mp.q_bar();
            total += cost + 0.5 * mp.risk_rate() * tg.day_length * y * y;
        }
        total / paths as f64
    }

    #[test]
    fn optimal_rate_beats_constant_rates() {
        let (mp, ou, tg) = setup(0.0);
        let v = quadcost_value(&mp, &ou, &tg).unwrap();
        let best = objective(|t, q, x| quadcost_rate(t, q, x, &v, &mp).unwrap(), 1000);
        for &c in &[0.0, 1.0, 2.0, 2.5, 3.0, 4.0, 6.0] {
            let other = objective(|_, _, _| c, 1000);
            assert!(best < other, "constant {c}: {other} vs {best}");
        }
    }
}
