use super::config::SimConfig;
use crate::error::Result;
use crate::signals::OuStepper;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// One trading session, preceded by the overnight gap from the previous close.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayPath {
    pub alpha_daily: f64,
    /// Mid at every decision time and at the close (`n_steps + 1` entries).
    pub price: Vec<f64>,
    /// Slow and fast z-scores at each decision time.
    pub epsilon: Vec<f64>,
    pub epsilon_fast: Vec<f64>,
    /// Standard normal shocks of the session price steps.
    pub price_shocks: Vec<f64>,
    /// Mid at the open minus the previous close.
    pub open_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSet {
    pub days: Vec<DayPath>,
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Independent streams for the price, slow signal, fast signal and daily alpha.
fn streams(seed: u64) -> [ChaCha8Rng; 4] {
    std::array::from_fn(|i| {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        r.set_stream(i as u64 + 1);
        r
    })
}

/// Exact OU steps for both signals, Euler steps `ΔP = (ᾱ + x) dt + √(ν dt) z` for the
/// mid. The first day starts from the stationary laws after a simulated overnight gap.
pub fn generate_paths(cfg: &SimConfig) -> Result<PathSet> {
    cfg.validate()?;
    let tg = &cfg.tg;
    let dt = tg.dt;
    let nu = cfg.mp.nu;
    let slow = OuStepper::new(&cfg.ou_slow, dt)?;
    let fast = OuStepper::new(&cfg.ou_fast, dt)?;
    let sd_price = (nu * dt).sqrt();
    let (lb, lf) = (cfg.beta * nu.sqrt(), cfg.beta_tilde * nu.sqrt());
    let rho = cfg.daily_rho();
    let sigma = cfg.alpha_daily_sd();
    let [mut rp, mut rs, mut rf, mut ra] = streams(cfg.seed);

    let mut eps = cfg.ou_slow.stationary_variance().sqrt() * normal(&mut rs);
    let mut eps_f = cfg.ou_fast.stationary_variance().sqrt() * normal(&mut rf);
    let mut alpha = sigma * normal(&mut ra);
    let mut price = 0.0;
    let mut days = Vec::with_capacity(cfg.n_days);
    for _ in 0..cfg.n_days {
        // Overnight under yesterday's alpha.
        let prev_close = price;
        for _ in 0..tg.overnight_steps() {
            price += (alpha + lb * eps + lf * eps_f) * dt + sd_price * normal(&mut rp);
            eps = slow.step(eps, normal(&mut rs));
            eps_f = fast.step(eps_f, normal(&mut rf));
        }
        let open_gap = price - prev_close;
        alpha = rho * alpha + sigma * (1.0 - rho * rho).sqrt() * normal(&mut ra);

        let n = tg.n_steps;
        let mut day = DayPath {
            alpha_daily: alpha,
            price: Vec::with_capacity(n + 1),
            epsilon: Vec::with_capacity(n),
            epsilon_fast: Vec::with_capacity(n),
            price_shocks: Vec::with_capacity(n),
            open_gap,
        };
        day.price.push(price);
        for _ in 0..n {
            let z = normal(&mut rp);
            day.epsilon.push(eps);
            day.epsilon_fast.push(eps_f);
            day.price_shocks.push(z);
            price += (alpha + lb * eps + lf * eps_f) * dt + sd_price * z;
            day.price.push(price);
            eps = slow.step(eps, normal(&mut rs));
            eps_f = fast.step(eps_f, normal(&mut rf));
        }
        days.push(day);
    }
    Ok(PathSet { days })
}
