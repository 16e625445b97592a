//! Named threshold solvers and exponent strategies, selectable at run time.

use crate::bounds;
use crate::engine::{self, CellTable, ExponentEngine, SolverTrace};
use crate::error::{Error, Result};

/// Chooses the threshold pair at which the exponent is evaluated.
pub trait ThresholdSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn solve(&self, engine: &ExponentEngine) -> Result<([f64; 2], SolverTrace)>;
}

/// Nested bisection on the balance conditions with a grid cross-check.
#[derive(Debug, Default, Clone, Copy)]
pub struct NestedBisection;

impl ThresholdSolver for NestedBisection {
    fn name(&self) -> &'static str {
        "nested-bisection"
    }
    fn summary(&self) -> &'static str {
        "bisection on the balance conditions, cross-checked on a refined grid"
    }
    fn solve(&self, engine: &ExponentEngine) -> Result<([f64; 2], SolverTrace)> {
        engine::solve_thresholds(engine)
    }
}

/// Refined grid search only.
#[derive(Debug, Default, Clone, Copy)]
pub struct GridSolver;

impl ThresholdSolver for GridSolver {
    fn name(&self) -> &'static str {
        "grid"
    }
    fn summary(&self) -> &'static str {
        "coarse threshold grid with local refinements"
    }
    fn solve(&self, engine: &ExponentEngine) -> Result<([f64; 2], SolverTrace)> {
        let g = engine::grid_search(engine)?;
        let mut trace = SolverTrace::new(self.name(), g.gamma, g.value);
        trace.evaluations = g.evaluations;
        trace.grid_gamma = Some(g.gamma);
        trace.grid_value = Some(g.value);
        trace.record_gaps(&engine.cells_at(g.gamma)?);
        Ok((g.gamma, trace))
    }
}

/// Best of the four thresholds in `{0, 1}^2`, i.e. one distribution per user.
#[derive(Debug, Default, Clone, Copy)]
pub struct CornerSolver;

impl ThresholdSolver for CornerSolver {
    fn name(&self) -> &'static str {
        "corners"
    }
    fn summary(&self) -> &'static str {
        "best corner of the threshold square"
    }
    fn solve(&self, engine: &ExponentEngine) -> Result<([f64; 2], SolverTrace)> {
        let mut best: Option<([f64; 2], CellTable)> = None;
        for g in [[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]] {
            let t = engine.cells_at(g)?;
            if best.as_ref().is_none_or(|(_, b)| t.d() > b.d()) {
                best = Some((g, t));
            }
        }
        let (g, t) = best.expect("four corners");
        let mut trace = SolverTrace::new(self.name(), g, t.d());
        trace.evaluations = 4;
        trace.record_gaps(&t);
        Ok((g, trace))
    }
}

/// A scalar exponent derived from a model.
pub trait ExponentStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn evaluate(&self, engine: &ExponentEngine, solver: &dyn ThresholdSolver) -> Result<f64>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Achievable;

impl ExponentStrategy for Achievable {
    fn name(&self) -> &'static str {
        "achievable"
    }
    fn summary(&self) -> &'static str {
        "exponent at the optimized thresholds"
    }
    fn evaluate(&self, engine: &ExponentEngine, solver: &dyn ThresholdSolver) -> Result<f64> {
        let gamma = match engine.model().policy.gamma {
            Some(g) => g,
            None => solver.solve(engine)?.0,
        };
        Ok(engine.d_value(gamma)?.to_f64())
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct LowerStrategy;

impl ExponentStrategy for LowerStrategy {
    fn name(&self) -> &'static str {
        "lower"
    }
    fn summary(&self) -> &'static str {
        "best single distribution per user"
    }
    fn evaluate(&self, engine: &ExponentEngine, _: &dyn ThresholdSolver) -> Result<f64> {
        Ok(bounds::lower_bound(engine).value)
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct UpperStrategy;

impl ExponentStrategy for UpperStrategy {
    fn name(&self) -> &'static str {
        "upper"
    }
    fn summary(&self) -> &'static str {
        "concave-envelope upper bound"
    }
    fn evaluate(&self, engine: &ExponentEngine, _: &dyn ThresholdSolver) -> Result<f64> {
        Ok(bounds::upper_bound(engine).value)
    }
}

pub struct Registry {
    solvers: Vec<Box<dyn ThresholdSolver>>,
    strategies: Vec<Box<dyn ExponentStrategy>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            solvers: Vec::new(),
            strategies: Vec::new(),
        }
    }

    pub fn with_defaults() -> Self {
        let mut r = Registry::empty();
        r.register_solver(Box::new(NestedBisection));
        r.register_solver(Box::new(GridSolver));
        r.register_solver(Box::new(CornerSolver));
        r.register_strategy(Box::new(Achievable));
        r.register_strategy(Box::new(LowerStrategy));
        r.register_strategy(Box::new(UpperStrategy));
        r
    }

    /// Later registrations under an existing name replace the earlier one.
    pub fn register_solver(&mut self, s: Box<dyn ThresholdSolver>) {
        self.solvers.retain(|x| x.name() != s.name());
        self.solvers.push(s);
    }

    pub fn register_strategy(&mut self, s: Box<dyn ExponentStrategy>) {
        self.strategies.retain(|x| x.name() != s.name());
        self.strategies.push(s);
    }

    pub fn solver_names(&self) -> Vec<&'static str> {
        self.solvers.iter().map(|s| s.name()).collect()
    }

    pub fn strategy_names(&self) -> Vec<&'static str> {
        self.strategies.iter().map(|s| s.name()).collect()
    }

    pub fn solver(&self, name: &str) -> Result<&dyn ThresholdSolver> {
        self.solvers
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "threshold solver",
                name: name.to_string(),
                available: self.solver_names().join(", "),
            })
    }

    pub fn strategy(&self, name: &str) -> Result<&dyn ExponentStrategy> {
        self.strategies
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "exponent strategy",
                name: name.to_string(),
                available: self.strategy_names().join(", "),
            })
    }
}

impl Default for Registry {
    fn default() -> Self {
        Registry::with_defaults()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paperex::build_paper_model;

    #[test]
    fn lookup_by_name() {
        let r = Registry::with_defaults();
        assert_eq!(r.solver_names(), ["nested-bisection", "grid", "corners"]);
        assert_eq!(r.strategy("upper").unwrap().name(), "upper");
        let err = r.solver("newton").err().unwrap().to_string();
        assert!(err.contains("newton") && err.contains("grid"), "{err}");
    }

    #[test]
    fn corners_reproduce_the_lower_bound() {
        let e = ExponentEngine::with_defaults(&build_paper_model()).unwrap();
        let r = Registry::with_defaults();
        let corner = r
            .strategy("achievable")
            .unwrap()
            .evaluate(&e, r.solver("corners").unwrap())
            .unwrap();
        let lower = r
            .strategy("lower")
            .unwrap()
            .evaluate(&e, r.solver("corners").unwrap())
            .unwrap();
        // at the corners every user sends with a single distribution
        assert!((corner - lower).abs() < 1e-9, "{corner} vs {lower}");
        let (_, trace) = r.solver("corners").unwrap().solve(&e).unwrap();
        assert_eq!(trace.evaluations, 4);
    }
}
