//! Optimal trading with alpha predictors under linear costs and temporary impact.
//!
//! The crate is organized bottom-up:
//!
//! * [`signals`]: Ornstein-Uhlenbeck alpha dynamics, integrated gains and calibration helpers.
//! * [`policy`]: the approximate value function, no-trade / limit / market boundaries and the
//!   zone classifier used by the live strategies.
//! * [`exact`]: the analytically tractable regimes (deterministic signal, zero linear cost,
//!   large impact expansion).
//! * [`oracle`]: brute-force optimizers used to validate [`exact`] and [`policy`].
//! * [`simulator`]: Monte Carlo paths, strategies and P&L accounting.
//!
//! Time is measured in days throughout, with the day length `T` defaulting to 1.

pub mod error;
pub mod exact;
pub mod normal;
pub mod oracle;
pub mod policy;
pub mod quad;
pub mod signals;
pub mod simulator;

pub use error::{Error, Result};
pub use policy::{Boundaries, MarketParams, Mode, Zone, ZoneDecision};
pub use signals::{GainMoments, OuParams, SignalState, TimeGrid};
