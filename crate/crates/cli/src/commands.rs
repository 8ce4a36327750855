use crate::config::Config;
use crate::output::Outputs;
use alpha_exec::exact::{det_euler_lagrange_residual, det_trajectory_solve, quadcost_value, ExpansionOrder};
use alpha_exec::oracle::{
    compare_boundaries, expansion_samples, solve_discrete_deterministic, solve_hjb_grid, DiscreteProblem, GridSpec,
};
use alpha_exec::policy::{fill_probability, limit_boundaries, SignalModel};
use alpha_exec::signals::gain_pde_residual;
use alpha_exec::simulator::{run_experiment, sharpe_standard_error};
use alpha_exec::{OuParams, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Files to write and whether every tolerance held.
pub struct CommandOutput {
    pub outputs: Outputs,
    pub within_tolerance: bool,
}

fn csv_err(e: csv::Error) -> alpha_exec::Error {
    alpha_exec::Error::InvalidParameter {
        name: "output",
        reason: e.to_string(),
    }
}

#[derive(Serialize)]
struct DayRow {
    date_index: usize,
    gross: f64,
    linear_cost: f64,
    impact_cost: f64,
    net: f64,
    cum_net: f64,
    position_close: f64,
}

#[derive(Serialize)]
struct StrategySummary {
    strategy: &'static str,
    annual_sharpe: Option<f64>,
    sharpe_standard_error: Option<f64>,
    total_net: f64,
    market_volume: f64,
    limit_volume: f64,
    limit_fills: u64,
}

#[derive(Serialize)]
struct SimulateSummary {
    seed: u64,
    n_days: usize,
    strategies: Vec<StrategySummary>,
}

pub fn simulate(cfg: &Config, format: Format) -> Result<CommandOutput> {
    let sc = cfg.simulate.sim_config(&cfg.time.grid()?)?;
    let report = run_experiment(&sc)?;
    let mut out = Outputs::default();
    let mut daily = serde_json::Map::new();
    let mut strategies = Vec::new();
    for r in &report.results {
        let cum = r.pnl.cumulative_net();
        let rows: Vec<DayRow> = r
            .pnl
            .records
            .iter()
            .zip(&cum)
            .enumerate()
            .map(|(d, (rec, &cum_net))| DayRow {
                date_index: d,
                gross: rec.gross,
                linear_cost: rec.linear_costs,
                impact_cost: rec.impact_costs,
                net: rec.net,
                cum_net,
                position_close: rec.end_position,
            })
            .collect();
        match format {
            Format::Csv => out
                .csv(&format!("daily_{}.csv", r.kind.name()), &rows)
                .map_err(csv_err)?,
            Format::Json => {
                daily.insert(
                    r.kind.name().to_string(),
                    serde_json::to_value(&rows).expect("rows serialize"),
                );
            }
        }
        strategies.push(StrategySummary {
            strategy: r.kind.name(),
            annual_sharpe: r.sharpe,
            sharpe_standard_error: r.sharpe.and(sharpe_standard_error(&r.pnl).ok()),
            total_net: r.pnl.total_net(),
            market_volume: r.pnl.records.iter().map(|d| d.market_volume).sum(),
            limit_volume: r.pnl.records.iter().map(|d| d.limit_volume).sum(),
            limit_fills: r.pnl.records.iter().map(|d| d.fills as u64).sum(),
        });
    }
    if format == Format::Json {
        out.json("daily.json", &daily);
    }
    out.json(
        "summary.json",
        &SimulateSummary {
            seed: report.seed,
            n_days: report.n_days,
            strategies,
        },
    );
    out.json("config.json", cfg);
    Ok(CommandOutput {
        outputs: out,
        within_tolerance: true,
    })
}

#[derive(Serialize)]
struct BoundaryRow {
    t_days: f64,
    slow_zscore: f64,
    fast_zscore: f64,
    gain_price: f64,
    p_plus: f64,
    p_minus: f64,
    b_tilde_plus: f64,
    b_plus: f64,
    b_minus: f64,
    b_tilde_minus: f64,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn boundaries(cfg: &Config, format: Format) -> Result<CommandOutput> {
    let tg = cfg.time.grid()?;
    let sec = &cfg.boundaries;
    let mp = sec.market.params()?;
    let model = SignalModel {
        slow: sec.signals.slow()?,
        beta: sec.signals.slow_loading_beta,
        fast_beta: sec.signals.fast_loading_beta_tilde,
        gain_rule: sec.signals.gain_rule.into(),
    };
    let mut rows = Vec::new();
    for t in linspace(tg.t_open, tg.close(), sec.t_points) {
        for z in linspace(-sec.slow_zscore_max, sec.slow_zscore_max, sec.slow_zscore_points) {
            let g = model.gain(t, z, mp.nu, &tg)?;
            for &fz in &sec.fast_zscores {
                let (p_plus, p_minus) = fill_probability(fz, model.fast_beta, &mp, &tg);
                let bd = limit_boundaries(t, g, p_plus, p_minus, &mp, &tg)?;
                rows.push(BoundaryRow {
                    t_days: t,
                    slow_zscore: z,
                    fast_zscore: fz,
                    gain_price: g,
                    p_plus,
                    p_minus,
                    b_tilde_plus: bd.b_tilde_plus,
                    b_plus: bd.b_plus,
                    b_minus: bd.b_minus,
                    b_tilde_minus: bd.b_tilde_minus,
                });
            }
        }
    }
    let mut out = Outputs::default();
    match format {
        Format::Csv => out.csv("boundaries.csv", &rows).map_err(csv_err)?,
        Format::Json => out.json("boundaries.json", &rows),
    }
    out.json("config.json", cfg);
    Ok(CommandOutput {
        outputs: out,
        within_tolerance: true,
    })
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    residual: f64,
    tolerance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct ExactReport {
    checks: Vec<Check>,
    all_pass: bool,
}

fn check(name: &'static str, residual: f64, tolerance: f64) -> Check {
    Check {
        name,
        residual,
        tolerance,
        pass: residual < tolerance,
    }
}

pub fn exact_check(cfg: &Config, format: Format) -> Result<CommandOutput> {
    let tg = cfg.time.grid()?;
    let sec = &cfg.exact_check;
    let tol = &sec.tolerances;
    let h = 1e-4 * tg.day_length;

    let det = &sec.deterministic;
    let mp = det.market.params()?;
    let tr = det_trajectory_solve(
        det.start_position_shares,
        det.start_signal_price_per_day,
        tg.t_open,
        &mp,
        &tg,
        &det.ou()?,
    )?;
    let el_times = linspace(tg.t_open + 3.0 * h, tr.t_hat - 3.0 * h, 200);
    let el = det_euler_lagrange_residual(&tr, &mp, &el_times, h);

    let qs = &sec.quadratic_cost;
    let qmp = qs.market.params()?;
    let qou = qs.signal.ou()?;
    let qc = quadcost_value(&qmp, &qou, &tg)?;
    let ric = qc.riccati_residual(&linspace(3.0 * h, tg.day_length - 3.0 * h, 1000), h);
    let sd = qou.stationary_variance().sqrt();
    let mut pts = Vec::with_capacity(qs.hjb_t_points * qs.hjb_x_points * qs.hjb_q_points);
    for t in linspace(tg.t_open, tg.close() - 20.0 * h, qs.hjb_t_points) {
        for x in linspace(qou.xbar - 3.0 * sd, qou.xbar + 3.0 * sd, qs.hjb_x_points) {
            for q in linspace(qmp.q_bar() - 2.0, qmp.q_bar() + 2.0, qs.hjb_q_points) {
                pts.push((t, x, q));
            }
        }
    }
    let hjb = qc.hjb_residual(&pts, (h, 0.2 * sd, 0.5))?;

    let gs = &sec.gain_pde;
    let zs = OuParams::zscore_minutes(gs.reversion_minutes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(gs.seed);
    let gpts: Vec<(f64, f64)> = (0..gs.points)
        .map(|_| {
            let t = rng.random_range(0.0..tg.close() - 10.0 * h);
            let z: f64 = rng.sample(StandardNormal);
            (t, 2.0 * z)
        })
        .collect();
    let gain = gain_pde_residual(&zs, &gpts, tg.horizon(), h);

    let checks = vec![
        check("euler_lagrange", el, tol.euler_lagrange),
        check("riccati", ric, tol.riccati),
        check("hjb_quadratic_cost", hjb, tol.hjb_quadratic_cost),
        check("gain_pde", gain, tol.gain_pde),
    ];
    let all_pass = checks.iter().all(|c| c.pass);
    let mut out = Outputs::default();
    if format == Format::Csv {
        out.csv("exact_check.csv", &checks).map_err(csv_err)?;
    }
    out.json("exact_check.json", &ExactReport { checks, all_pass });
    out.json("config.json", cfg);
    Ok(CommandOutput {
        outputs: out,
        within_tolerance: all_pass,
    })
}

#[derive(Serialize)]
struct DetRow {
    impact: f64,
    stopping_time_days: f64,
    stays_in_zone: bool,
    monotone: bool,
    sup_norm_shares: f64,
    tolerance_shares: f64,
    pass: bool,
}

#[derive(Serialize)]
struct GridRow {
    impact: f64,
    q_spacing_shares: f64,
    order0_sup_norm_shares: f64,
    order1_sup_norm_shares: f64,
    skipped_samples: usize,
    tolerance_shares: f64,
    pass: bool,
}

#[derive(Serialize)]
struct OracleReport {
    deterministic: Vec<DetRow>,
    grid: Vec<GridRow>,
    all_pass: bool,
}

pub fn oracle_compare(cfg: &Config, format: Format) -> Result<CommandOutput> {
    let tg = cfg.time.grid()?;
    let ds = &cfg.oracle_compare.deterministic;
    let ou = ds.ou()?;
    let (q0, x0) = (ds.start_position_shares, ds.start_signal_price_per_day);
    let mut det_rows = Vec::new();
    for &k in &ds.impact_sweep_price_day {
        let mp = ds.market_with_impact(k)?;
        let tr = det_trajectory_solve(q0, x0, tg.t_open, &mp, &tg, &ou)?;
        let prob = DiscreteProblem::from_deterministic_signal(q0, x0, tg.t_open, &ou, &mp, &tg, tg.n_steps)?;
        let sol = solve_discrete_deterministic(&prob)?;
        let sup = sol
            .positions
            .iter()
            .enumerate()
            .map(|(i, p)| (p - tr.position(tg.t_open + i as f64 * prob.dt)).abs())
            .fold(0.0, f64::max);
        det_rows.push(DetRow {
            impact: k,
            stopping_time_days: tr.t_hat,
            stays_in_zone: tr.stays_in_zone,
            monotone: tr.monotone,
            sup_norm_shares: sup,
            tolerance_shares: ds.tolerance_shares,
            pass: sup < ds.tolerance_shares,
        });
    }

    let gs = &cfg.oracle_compare.grid;
    let gou = gs.signal.ou()?;
    let sd = gou.stationary_variance().sqrt();
    let mut grid_rows = Vec::new();
    for &k in &gs.impact_sweep_price_day {
        let mp = gs.market_with_impact(k)?;
        let mut spec = GridSpec::new(gs.x_points, gs.q_points, tg.t_open);
        spec.x_extent_sd = gs.x_extent_sd;
        spec.snapshot_times = gs.snapshot_times_days.clone();
        let gv = solve_hjb_grid(&mp, &gou, &tg, &spec)?;
        let idx: Vec<usize> = (0..gv.x_grid.len())
            .filter(|&i| (gv.x_grid[i] - gou.xbar).abs() <= 2.0 * sd)
            .collect();
        let r0 = compare_boundaries(
            &gv,
            &expansion_samples(&gv, &idx, ExpansionOrder::Zero, &mp, &gou, &tg)?,
        );
        let r1 = compare_boundaries(&gv, &expansion_samples(&gv, &idx, ExpansionOrder::One, &mp, &gou, &tg)?);
        let dq = gv.q_grid[1] - gv.q_grid[0];
        let tolerance = gs.tolerance_shares.unwrap_or(dq);
        let skipped = r0.skipped + r1.skipped;
        grid_rows.push(GridRow {
            impact: k,
            q_spacing_shares: dq,
            order0_sup_norm_shares: r0.sup_norm,
            order1_sup_norm_shares: r1.sup_norm,
            skipped_samples: skipped,
            tolerance_shares: tolerance,
            pass: skipped == 0 && r1.sup_norm < tolerance,
        });
    }

    let all_pass = det_rows.iter().all(|r| r.pass) && grid_rows.iter().all(|r| r.pass);
    let mut out = Outputs::default();
    if format == Format::Csv {
        out.csv("oracle_deterministic.csv", &det_rows).map_err(csv_err)?;
        out.csv("oracle_grid.csv", &grid_rows).map_err(csv_err)?;
    }
    out.json(
        "oracle_compare.json",
        &OracleReport {
            deterministic: det_rows,
            grid: grid_rows,
            all_pass,
        },
    );
    out.json("config.json", cfg);
    Ok(CommandOutput {
        outputs: out,
        within_tolerance: all_pass,
    })
}
