//! Grid-implied versus analytic boundary comparison.

use super::grid::GridValue;
use crate::error::Result;
use crate::exact::{expansion_boundary, ExpansionOrder};
use crate::policy::MarketParams;
use crate::signals::{OuParams, TimeGrid};
use serde::{Deserialize, Serialize};

/// Analytic boundaries at one `(t, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample {
    pub t: f64,
    pub x: f64,
    pub b_minus: f64,
    pub b_plus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryComparison {
    pub t: f64,
    pub x: f64,
    pub grid_b_minus: f64,
    pub grid_b_plus: f64,
    pub analytic_b_minus: f64,
    pub analytic_b_plus: f64,
    /// Grid minus analytic.
    pub diff_b_minus: f64,
    pub diff_b_plus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub entries: Vec<BoundaryComparison>,
    pub sup_norm: f64,
    /// Samples not on a snapshot/node, or whose grid boundary is not bracketed.
    pub skipped: usize,
}

/// Compares grid boundaries with analytic samples placed on snapshot times and x nodes.
pub fn compare_boundaries(grid: &GridValue, analytic: &[BoundarySample]) -> BoundaryReport {
    let mut entries = Vec::new();
    let mut skipped = 0;
    for s in analytic {
        let k = grid.snapshot_index(s.t);
        let i = grid
            .x_grid
            .iter()
            .position(|&x| (x - s.x).abs() <= 1e-12 * (1.0 + x.abs()));
        let (Some(k), Some(i)) = (k, i) else {
            skipped += 1;
            continue;
        };
        let (Some(gm), Some(gp)) = grid.boundaries(k, i) else {
            skipped += 1;
            continue;
        };
        entries.push(BoundaryComparison {
            t: s.t,
            x: s.x,
            grid_b_minus: gm,
            grid_b_plus: gp,
            analytic_b_minus: s.b_minus,
            analytic_b_plus: s.b_plus,
            diff_b_minus: gm - s.b_minus,
            diff_b_plus: gp - s.b_plus,
        });
    }
    let sup_norm = entries
        .iter()
        .map(|e| e.diff_b_minus.abs().max(e.diff_b_plus.abs()))
        .fold(0.0, f64::max);
    BoundaryReport {
        entries,
        sup_norm,
        skipped,
    }
}

/// Expansion boundaries at every snapshot time (except `T`) and the given x nodes.
pub fn expansion_samples(
    grid: &GridValue,
    x_indices: &[usize],
    order: ExpansionOrder,
    mp: &MarketParams,
    ou: &OuParams,
    tg: &TimeGrid,
) -> Result<Vec<BoundarySample>> {
    let mut out = Vec::new();
    for &t in grid.t_grid.iter().filter(|&&t| t < tg.close()) {
        for &i in x_indices {
            let x = grid.x_grid[i];
            let (b_minus, b_plus) = expansion_boundary(t, x, mp, ou, tg, order)?;
            out.push(BoundarySample { t, x, b_minus, b_plus });
        }
    }
    Ok(out)
}
