//! Threshold optimization.
//!
//! With user 1's threshold fixed, `k_c(g2) = min_{i1} f_{i1,c}` is
//! nondecreasing in `g2` for `c = 1` and nonincreasing for `c = 2`, so
//! `d = min(k_1, k_2)` peaks where `k_1 >= k_2` first holds. The same holds one
//! level up for user 1 with `K_c = min_{i2} f_{c,i2}` evaluated at the inner
//! optimum. Both levels are bisections of the predicate `k_1 >= k_2`; when it
//! holds at 0 the optimum is 0, when it fails at 1 the optimum is 1.

use std::cell::Cell;

use super::{CellTable, ExponentEngine};
use crate::error::Result;
use crate::extreal::ExtReal;
use crate::model::{Class, User};
use crate::parallel::par_map;
use crate::search::{bisect_predicate, linspace, Boundary};

/// Slack by which a grid point must beat the bisection result to replace it.
pub const GRID_OVERRIDE_SLACK: f64 = 1e-6;

/// Diagnostics of one threshold optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace {
    pub solver: &'static str,
    /// Outcome of the outer bisection, when one ran.
    pub outer: Option<Boundary>,
    pub inner_iterations: usize,
    /// Number of threshold pairs at which all cells were evaluated.
    pub evaluations: usize,
    pub solver_gamma: [f64; 2],
    pub solver_value: ExtReal,
    pub grid_gamma: Option<[f64; 2]>,
    pub grid_value: Option<ExtReal>,
    /// The grid point beat the bisection result and was returned instead.
    pub grid_override: bool,
    /// Balance gaps for user 1 and user 2 at the returned thresholds.
    pub balance_gaps: [Option<f64>; 2],
}

impl SolverTrace {
    pub(crate) fn new(solver: &'static str, gamma: [f64; 2], value: ExtReal) -> Self {
        SolverTrace {
            solver,
            outer: None,
            inner_iterations: 0,
            evaluations: 0,
            solver_gamma: gamma,
            solver_value: value,
            grid_gamma: None,
            grid_value: None,
            grid_override: false,
            balance_gaps: [None, None],
        }
    }

    pub(crate) fn fixed(gamma: [f64; 2], value: ExtReal) -> Self {
        SolverTrace::new("fixed", gamma, value)
    }

    pub(crate) fn record_gaps(&mut self, table: &CellTable) {
        self.balance_gaps = [table.balance_gap(User::One), table.balance_gap(User::Two)];
    }
}

/// Picks the better end of a bracket; ties go to `lo`.
fn better(lo: (f64, CellTable), hi: (f64, CellTable)) -> (f64, CellTable) {
    if hi.1.d() > lo.1.d() {
        hi
    } else {
        lo
    }
}

/// Nested bisection without the grid cross-check.
pub fn nested_bisection(engine: &ExponentEngine) -> Result<([f64; 2], SolverTrace)> {
    let tol = engine.options().gamma_tol;
    let evaluations = Cell::new(0usize);
    let inner_iterations = Cell::new(0usize);
    let cells = |g: [f64; 2]| {
        evaluations.set(evaluations.get() + 1);
        engine.cells_at(g)
    };

    let inner = |g1: f64| -> Result<(f64, CellTable)> {
        let b = bisect_predicate(
            |g2| {
                let t = cells([g1, g2])?;
                Ok(t.k_user2(Class::One) >= t.k_user2(Class::Two))
            },
            tol,
        )?;
        Ok(match b {
            Boundary::AtZero => (0.0, cells([g1, 0.0])?),
            Boundary::AtOne => (1.0, cells([g1, 1.0])?),
            Boundary::Bracket { lo, hi, iterations } => {
                inner_iterations.set(inner_iterations.get() + iterations);
                better((lo, cells([g1, lo])?), (hi, cells([g1, hi])?))
            }
        })
    };

    let outer = bisect_predicate(
        |g1| {
            let (_, t) = inner(g1)?;
            Ok(t.k_user1(Class::One) >= t.k_user1(Class::Two))
        },
        tol,
    )?;
    let g1 = match outer {
        Boundary::AtZero => 0.0,
        Boundary::AtOne => 1.0,
        Boundary::Bracket { lo, hi, .. } => {
            let (_, tl) = inner(lo)?;
            let (_, th) = inner(hi)?;
            better((lo, tl), (hi, th)).0
        }
    };
    let (g2, table) = inner(g1)?;
    let gamma = [g1, g2];
    let mut trace = SolverTrace::new("nested-bisection", gamma, table.d());
    trace.outer = Some(outer);
    trace.inner_iterations = inner_iterations.get();
    trace.evaluations = evaluations.get();
    trace.record_gaps(&table);
    Ok((gamma, trace))
}

/// Best point of a coarse threshold grid after local refinements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridResult {
    pub gamma: [f64; 2],
    pub value: ExtReal,
    pub evaluations: usize,
}

/// Coarse `grid x grid` search over `[0, 1]^2` (corners included) followed by
/// `refinements` zooms, each `refine_factor` times finer, around the best point.
pub fn grid_search(engine: &ExponentEngine) -> Result<GridResult> {
    let opts = engine.options();
    let axis = linspace(0.0, 1.0, opts.grid);
    let points: Vec<[f64; 2]> = axis
        .iter()
        .flat_map(|&a| axis.iter().map(move |&b| [a, b]))
        .collect();
    let mut evaluations = 0;
    let mut best: Option<([f64; 2], ExtReal)> = None;
    let mut scan = |pts: &[[f64; 2]], best: &mut Option<([f64; 2], ExtReal)>| -> Result<()> {
        evaluations += pts.len();
        for (p, v) in pts
            .iter()
            .zip(par_map(pts, opts.jobs, |&p| engine.d_value(p)))
        {
            let v = v?;
            if best.is_none_or(|b| v > b.1) {
                *best = Some((*p, v));
            }
        }
        Ok(())
    };
    scan(&points, &mut best)?;

    let mut h = 1.0 / (opts.grid - 1) as f64;
    for _ in 0..opts.refinements {
        let step = h / opts.refine_factor as f64;
        let m = opts.refine_factor as i64;
        let centre = best.expect("grid is nonempty").0;
        let offsets: Vec<f64> = (-m..=m).map(|j| j as f64 * step).collect();
        let local: Vec<[f64; 2]> = offsets
            .iter()
            .flat_map(|&a| offsets.iter().map(move |&b| [a, b]))
            .map(|[a, b]| {
                [
                    (centre[0] + a).clamp(0.0, 1.0),
                    (centre[1] + b).clamp(0.0, 1.0),
                ]
            })
            .collect();
        scan(&local, &mut best)?;
        h = step;
    }
    let (gamma, value) = best.expect("grid is nonempty");
    Ok(GridResult {
        gamma,
        value,
        evaluations,
    })
}

fn exceeds(a: ExtReal, b: ExtReal, slack: f64) -> bool {
    match (a, b) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => x > y + slack,
        _ => a > b,
    }
}

/// Nested bisection cross-checked against [`grid_search`]; the grid point is
/// returned when it is better by more than [`GRID_OVERRIDE_SLACK`].
pub fn solve_thresholds(engine: &ExponentEngine) -> Result<([f64; 2], SolverTrace)> {
    let (mut gamma, mut trace) = nested_bisection(engine)?;
    let grid = grid_search(engine)?;
    trace.grid_gamma = Some(grid.gamma);
    trace.grid_value = Some(grid.value);
    trace.evaluations += grid.evaluations;
    if exceeds(grid.value, trace.solver_value, GRID_OVERRIDE_SLACK) {
        log::warn!(
            "grid point {:?} (d = {}) beats bisection result {:?} (d = {})",
            grid.gamma,
            grid.value,
            gamma,
            trace.solver_value
        );
        gamma = grid.gamma;
        trace.grid_override = true;
        trace.record_gaps(&engine.cells_at(gamma)?);
    }
    Ok((gamma, trace))
}
