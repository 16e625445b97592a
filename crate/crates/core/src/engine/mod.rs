//! Objective cells, class-pair aggregates and the achievable exponent.
//!
//! A cell is indexed by an error type and a class pair `(i1, i2)`. Its value
//! is the maximum over `rho` in `[0, 1]` of the channel function on the
//! appropriate channel minus the class source exponents. The exponent at a
//! threshold pair is the minimum over all twelve cells; the achievable
//! exponent maximizes that over the thresholds.

mod table;
mod threshold;

pub use table::{CellTable, ObjectiveCell, CLASS_PAIRS};
pub use threshold::{grid_search, nested_bisection, solve_thresholds, GridResult, SolverTrace};

use table::cell_index;

use crate::bounds::{self, LowerBound, UpperBound};
use crate::classexp::ClassExponents;
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::gallager::{
    induced_channel, mac_as_ptp, product_distribution, ErrorType, PreparedE0, SourceLogs,
};
use crate::model::{Class, SystemModel, User};
use crate::registry::ThresholdSolver;
use crate::search::{golden_section_max, linspace};

/// Numerical settings shared by the engine, the threshold solver and the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineOptions {
    /// Golden-section stopping width in `rho`.
    pub rho_tol: f64,
    /// Spacing of the guard grid scanned after each golden-section search.
    pub guard_step: f64,
    /// Bisection stopping width for thresholds.
    pub gamma_tol: f64,
    /// Points per axis of the coarse threshold grid.
    pub grid: usize,
    pub refinements: usize,
    pub refine_factor: usize,
    /// Sample count for the concave envelopes of the upper bound.
    pub hull_grid: usize,
    pub jobs: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            rho_tol: 1e-10,
            guard_step: 1e-3,
            gamma_tol: 1e-6,
            grid: 64,
            refinements: 2,
            refine_factor: 8,
            hull_grid: 1025,
            jobs: 1,
        }
    }
}

impl EngineOptions {
    fn guard_points(&self) -> usize {
        (1.0 / self.guard_step).round().max(1.0) as usize + 1
    }

    fn check(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain {
                    name,
                    value: v,
                    expected: "a positive finite number",
                })
            }
        };
        positive("rho_tol", self.rho_tol)?;
        positive("gamma_tol", self.gamma_tol)?;
        if !(self.guard_step > 0.0 && self.guard_step <= 1.0) {
            return Err(Error::Domain {
                name: "guard_step",
                value: self.guard_step,
                expected: "0 < step <= 1",
            });
        }
        for (name, v) in [("grid", self.grid), ("hull_grid", self.hull_grid)] {
            if v < 2 {
                return Err(Error::Domain {
                    name,
                    value: v as f64,
                    expected: "at least 2 points",
                });
            }
        }
        if self.refine_factor == 0 {
            return Err(Error::Domain {
                name: "refine_factor",
                value: 0.0,
                expected: "at least 1",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Curve {
    pub(crate) e0: PreparedE0,
    on_grid: Vec<f64>,
}

/// A model prepared for repeated evaluation: the twelve channel-function
/// curves and both source functions are tabulated on the guard grid once.
#[derive(Debug, Clone)]
pub struct ExponentEngine {
    model: SystemModel,
    opts: EngineOptions,
    rho_grid: Vec<f64>,
    curves: Vec<Curve>,
    logs: [SourceLogs; 2],
    es_grid: [Vec<f64>; 2],
}

/// Everything computed for one model.
#[derive(Debug, Clone)]
pub struct ExponentReport {
    pub exponent: f64,
    pub gamma_star: [f64; 2],
    pub cells: CellTable,
    pub lower: LowerBound,
    pub upper: UpperBound,
    pub trace: SolverTrace,
}

impl ExponentReport {
    /// `(E - E_L) / E_L`.
    pub fn gain_over_lower(&self) -> f64 {
        (self.exponent - self.lower.value) / self.lower.value
    }
}

/// The cell objective at fixed thresholds, as a function of `rho`.
pub struct CellObjective<'a> {
    engine: &'a ExponentEngine,
    tau: ErrorType,
    classes: [Class; 2],
    ce: [ClassExponents; 2],
}

impl CellObjective<'_> {
    pub fn eval(&self, rho: f64) -> ExtReal {
        let e = self.engine;
        let curve = &e.curves[cell_index(self.tau, self.classes[0], self.classes[1])];
        let mut v = ExtReal::Finite(curve.e0.eval(rho));
        for &u in varying_users(self.tau) {
            v = v - self.ce[u.index()].eval(self.classes[u.index()], rho);
        }
        if let Some(u) = self.tau.user().map(User::other) {
            v = v - self.ce[u.index()].eval(self.classes[u.index()], 0.0);
        }
        v
    }
}

fn varying_users(tau: ErrorType) -> &'static [User] {
    match tau {
        ErrorType::User1 => &[User::One],
        ErrorType::User2 => &[User::Two],
        ErrorType::Both => &User::BOTH,
    }
}

impl ExponentEngine {
    pub fn new(model: &SystemModel, opts: EngineOptions) -> Result<Self> {
        opts.check()?;
        let violations = model.validate();
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }
        let rho_grid = linspace(0.0, 1.0, opts.guard_points());
        let mac = mac_as_ptp(&model.channel);
        let mut curves = Vec::with_capacity(12);
        for tau in ErrorType::ALL {
            for (i1, i2) in CLASS_PAIRS {
                let classes = [i1, i2];
                let e0 = match tau.user() {
                    Some(u) => {
                        let o = u.other();
                        let ch = induced_channel(
                            &model.channel,
                            tau,
                            model.dist(o, classes[o.index()]),
                        )?;
                        PreparedE0::new(model.dist(u, classes[u.index()]), &ch)?
                    }
                    None => PreparedE0::new(
                        &product_distribution(model.dist(User::One, i1), model.dist(User::Two, i2)),
                        &mac,
                    )?,
                };
                let on_grid = rho_grid.iter().map(|&r| e0.eval(r)).collect();
                curves.push(Curve { e0, on_grid });
            }
        }
        let logs = [
            SourceLogs::new(&model.source1),
            SourceLogs::new(&model.source2),
        ];
        let es_grid = [0, 1].map(|k| rho_grid.iter().map(|&r| logs[k].e_s(r)).collect());
        Ok(ExponentEngine {
            model: model.clone(),
            opts,
            rho_grid,
            curves,
            logs,
            es_grid,
        })
    }

    pub fn with_defaults(model: &SystemModel) -> Result<Self> {
        Self::new(model, EngineOptions::default())
    }

    pub fn model(&self) -> &SystemModel {
        &self.model
    }

    pub fn options(&self) -> &EngineOptions {
        &self.opts
    }

    pub(crate) fn curve(&self, tau: ErrorType, i1: Class, i2: Class) -> &Curve {
        &self.curves[cell_index(tau, i1, i2)]
    }

    pub(crate) fn source_logs(&self, user: User) -> &SourceLogs {
        &self.logs[user.index()]
    }

    pub fn class_exponents(&self, gamma: [f64; 2]) -> Result<[ClassExponents; 2]> {
        Ok([
            ClassExponents::new(&self.model.source1, gamma[0])?,
            ClassExponents::new(&self.model.source2, gamma[1])?,
        ])
    }

    /// Golden-section search on `[0, 1]` followed by a scan of the guard grid;
    /// a better grid point triggers a local search around it.
    fn maximize(&self, f: impl Fn(f64) -> f64, f_grid: impl Fn(usize) -> f64) -> (f64, f64) {
        let tol = self.opts.rho_tol;
        let (mut rho, mut val) = golden_section_max(&f, 0.0, 1.0, tol);
        let (k, gv) = (0..self.rho_grid.len())
            .map(|k| (k, f_grid(k)))
            .fold((0, f64::NEG_INFINITY), |b, p| if p.1 > b.1 { p } else { b });
        if gv > val {
            let last = self.rho_grid.len() - 1;
            let lo = self.rho_grid[k.saturating_sub(1)];
            let hi = self.rho_grid[(k + 1).min(last)];
            let (r2, v2) = golden_section_max(&f, lo, hi, tol);
            (rho, val) = if v2 >= gv {
                (r2, v2)
            } else {
                (self.rho_grid[k], gv)
            };
        }
        (rho, val)
    }

    pub(crate) fn cell_with(
        &self,
        tau: ErrorType,
        i1: Class,
        i2: Class,
        ce: &[ClassExponents; 2],
    ) -> ObjectiveCell {
        let classes = [i1, i2];
        let varying = varying_users(tau);
        let fixed = tau.user().map(User::other);
        let cell = |value, rho_star| ObjectiveCell {
            tau,
            i1,
            i2,
            value,
            rho_star,
        };
        if varying
            .iter()
            .chain(fixed.iter())
            .any(|&u| ce[u.index()].is_minus_inf(classes[u.index()]))
        {
            return cell(ExtReal::PlusInf, 0.0);
        }
        let offset = fixed.map_or(0.0, |u| {
            ce[u.index()].eval(classes[u.index()], 0.0).to_f64()
        });
        let curve = &self.curves[cell_index(tau, i1, i2)];
        let f = |rho: f64| {
            curve.e0.eval(rho)
                - varying
                    .iter()
                    .map(|&u| ce[u.index()].eval(classes[u.index()], rho).to_f64())
                    .sum::<f64>()
                - offset
        };
        let f_grid = |k: usize| {
            let rho = self.rho_grid[k];
            curve.on_grid[k]
                - varying
                    .iter()
                    .map(|&u| {
                        let es = self.es_grid[u.index()][k];
                        ce[u.index()]
                            .eval_with_es(classes[u.index()], rho, || es)
                            .to_f64()
                    })
                    .sum::<f64>()
                - offset
        };
        let (rho, v) = self.maximize(f, f_grid);
        cell(ExtReal::Finite(v), rho)
    }

    /// One objective cell at the given thresholds.
    pub fn big_f(
        &self,
        tau: ErrorType,
        i1: Class,
        i2: Class,
        gamma: [f64; 2],
    ) -> Result<ObjectiveCell> {
        Ok(self.cell_with(tau, i1, i2, &self.class_exponents(gamma)?))
    }

    /// All twelve cells at the given thresholds.
    pub fn cells_at(&self, gamma: [f64; 2]) -> Result<CellTable> {
        let ce = self.class_exponents(gamma)?;
        let mut cells = Vec::with_capacity(12);
        for tau in ErrorType::ALL {
            for (i1, i2) in CLASS_PAIRS {
                cells.push(self.cell_with(tau, i1, i2, &ce));
            }
        }
        Ok(CellTable::new(cells))
    }

    pub fn little_f(&self, i1: Class, i2: Class, gamma: [f64; 2]) -> Result<ExtReal> {
        let ce = self.class_exponents(gamma)?;
        Ok(ErrorType::ALL
            .iter()
            .map(|&t| self.cell_with(t, i1, i2, &ce).value)
            .min()
            .expect("three error types"))
    }

    pub fn d_value(&self, gamma: [f64; 2]) -> Result<ExtReal> {
        Ok(self.cells_at(gamma)?.d())
    }

    /// The cell objective before maximization.
    pub fn objective(
        &self,
        tau: ErrorType,
        i1: Class,
        i2: Class,
        gamma: [f64; 2],
    ) -> Result<CellObjective<'_>> {
        Ok(CellObjective {
            engine: self,
            tau,
            classes: [i1, i2],
            ce: self.class_exponents(gamma)?,
        })
    }

    /// Cells with the plain source function and no term for the correctly
    /// decoded user.
    pub fn lower_cells(&self) -> CellTable {
        let mut cells = Vec::with_capacity(12);
        for tau in ErrorType::ALL {
            let varying = varying_users(tau);
            for (i1, i2) in CLASS_PAIRS {
                let curve = &self.curves[cell_index(tau, i1, i2)];
                let f = |rho: f64| {
                    curve.e0.eval(rho)
                        - varying
                            .iter()
                            .map(|&u| self.logs[u.index()].e_s(rho))
                            .sum::<f64>()
                };
                let f_grid = |k: usize| {
                    curve.on_grid[k]
                        - varying
                            .iter()
                            .map(|&u| self.es_grid[u.index()][k])
                            .sum::<f64>()
                };
                let (rho, v) = self.maximize(f, f_grid);
                cells.push(ObjectiveCell {
                    tau,
                    i1,
                    i2,
                    value: ExtReal::Finite(v),
                    rho_star: rho,
                });
            }
        }
        CellTable::new(cells)
    }

    /// Optimizes the thresholds with the default solver (or uses the model's
    /// fixed thresholds) and attaches both bounds.
    pub fn achievable_exponent(&self) -> Result<ExponentReport> {
        self.achievable_with(&crate::registry::NestedBisection)
    }

    pub fn achievable_with(&self, solver: &dyn ThresholdSolver) -> Result<ExponentReport> {
        let (gamma, trace) = match self.model.policy.gamma {
            Some(g) => {
                let value = self.d_value(g)?;
                (g, SolverTrace::fixed(g, value))
            }
            None => solver.solve(self)?,
        };
        let cells = self.cells_at(gamma)?;
        Ok(ExponentReport {
            exponent: cells.d().to_f64(),
            gamma_star: gamma,
            cells,
            lower: bounds::lower_bound(self),
            upper: bounds::upper_bound(self),
            trace,
        })
    }
}

pub fn big_f(
    tau: ErrorType,
    i1: Class,
    i2: Class,
    gamma: [f64; 2],
    model: &SystemModel,
) -> Result<ObjectiveCell> {
    ExponentEngine::with_defaults(model)?.big_f(tau, i1, i2, gamma)
}

pub fn little_f(i1: Class, i2: Class, gamma: [f64; 2], model: &SystemModel) -> Result<ExtReal> {
    ExponentEngine::with_defaults(model)?.little_f(i1, i2, gamma)
}

pub fn d_value(gamma: [f64; 2], model: &SystemModel) -> Result<ExtReal> {
    ExponentEngine::with_defaults(model)?.d_value(gamma)
}

pub fn achievable_exponent(model: &SystemModel) -> Result<ExponentReport> {
    ExponentEngine::with_defaults(model)?.achievable_exponent()
}
