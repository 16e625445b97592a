//! Threshold-free bounds on the achievable exponent.
//!
//! The lower bound uses one input distribution per user for all messages. The
//! upper bound replaces the channel function by the upper concave envelope of
//! the best curve over the candidate distributions.

use crate::engine::{CellTable, ExponentEngine, CLASS_PAIRS};
use crate::gallager::ErrorType;
use crate::model::{Class, User};
use crate::search::{golden_section_max, linspace};

/// Piecewise-linear concave function on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    knots: Vec<(f64, f64)>,
}

impl Envelope {
    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Linear interpolation; constant extension outside the knot range.
    pub fn eval(&self, rho: f64) -> f64 {
        let k = &self.knots;
        let j = k.partition_point(|p| p.0 <= rho);
        if j == 0 {
            return k[0].1;
        }
        if j == k.len() {
            return k[k.len() - 1].1;
        }
        let (x0, y0) = k[j - 1];
        let (x1, y1) = k[j];
        y0 + (y1 - y0) * (rho - x0) / (x1 - x0)
    }

    /// Maximizes `envelope - g` for a convex `g`. The difference is concave,
    /// so the maximum lies on the segments adjacent to the best knot.
    pub fn maximize_minus(&self, g: impl Fn(f64) -> f64, tol: f64) -> (f64, f64) {
        let k = &self.knots;
        let (best, _) = k
            .iter()
            .enumerate()
            .map(|(j, &(x, y))| (j, y - g(x)))
            .fold((0, f64::NEG_INFINITY), |b, p| if p.1 > b.1 { p } else { b });
        let knot = (k[best].0, k[best].1 - g(k[best].0));
        let lo = k[best.saturating_sub(1)].0;
        let hi = k[(best + 1).min(k.len() - 1)].0;
        if hi <= lo {
            return knot;
        }
        let inner = golden_section_max(|x| self.eval(x) - g(x), lo, hi, tol);
        if inner.1 > knot.1 {
            inner
        } else {
            knot
        }
    }
}

/// Upper hull of points sorted by abscissa (monotone chain).
fn upper_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Upper concave envelope of the pointwise maximum of `curves` on `[0, 1]`,
/// built from `n` uniform samples plus one midpoint per hull segment.
pub fn concave_hull(curves: &[&dyn Fn(f64) -> f64], n: usize) -> Envelope {
    assert!(!curves.is_empty(), "concave_hull needs at least one curve");
    let top = |x: f64| {
        curves
            .iter()
            .map(|c| c(x))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut points: Vec<(f64, f64)> = linspace(0.0, 1.0, n.max(2))
        .into_iter()
        .map(|x| (x, top(x)))
        .collect();
    let hull = upper_hull(&points);
    points.extend(hull.windows(2).map(|w| {
        let x = 0.5 * (w[0].0 + w[1].0);
        (x, top(x))
    }));
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    points.dedup_by(|a, b| a.0 == b.0);
    Envelope {
        knots: upper_hull(&points),
    }
}

/// Best single-distribution exponent over the class pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    pub best: (Class, Class),
    pub table: CellTable,
}

pub fn lower_bound(engine: &ExponentEngine) -> LowerBound {
    let table = engine.lower_cells();
    let mut order = CLASS_PAIRS;
    order.sort();
    let mut best = (order[0], table.little_f(order[0].0, order[0].1));
    for &pair in &order[1..] {
        let v = table.little_f(pair.0, pair.1);
        if v > best.1 {
            best = (pair, v);
        }
    }
    LowerBound {
        value: best.1.to_f64(),
        best: best.0,
        table,
    }
}

/// One error type of the upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperCell {
    pub tau: ErrorType,
    pub value: f64,
    pub rho_star: f64,
    /// Class of the correctly decoded user that attains the maximum.
    pub other_class: Option<Class>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpperBound {
    pub value: f64,
    pub tau_star: ErrorType,
    pub table: [UpperCell; 3],
}

fn upper_cell(engine: &ExponentEngine, tau: ErrorType) -> UpperCell {
    let opts = engine.options();
    let n = opts.hull_grid;
    match tau.user() {
        Some(u) => {
            let logs = engine.source_logs(u);
            let mut best: Option<UpperCell> = None;
            for other in Class::ALL {
                let curve = |own: Class| {
                    let (i1, i2) = match u {
                        User::One => (own, other),
                        User::Two => (other, own),
                    };
                    &engine.curve(tau, i1, i2).e0
                };
                let (c1, c2) = (curve(Class::One), curve(Class::Two));
                let f1 = |r| c1.eval(r);
                let f2 = |r| c2.eval(r);
                let env = concave_hull(&[&f1, &f2], n);
                let (rho, value) = env.maximize_minus(|r| logs.e_s(r), opts.rho_tol);
                if best.is_none_or(|b| value > b.value) {
                    best = Some(UpperCell {
                        tau,
                        value,
                        rho_star: rho,
                        other_class: Some(other),
                    });
                }
            }
            best.expect("two classes")
        }
        None => {
            let fs: Vec<Box<dyn Fn(f64) -> f64 + '_>> = CLASS_PAIRS
                .iter()
                .map(|&(i1, i2)| {
                    let c = &engine.curve(tau, i1, i2).e0;
                    Box::new(move |r| c.eval(r)) as Box<dyn Fn(f64) -> f64>
                })
                .collect();
            let refs: Vec<&dyn Fn(f64) -> f64> = fs.iter().map(|b| b.as_ref()).collect();
            let env = concave_hull(&refs, n);
            let (l1, l2) = (engine.source_logs(User::One), engine.source_logs(User::Two));
            let (rho, value) = env.maximize_minus(|r| l1.e_s(r) + l2.e_s(r), opts.rho_tol);
            UpperCell {
                tau,
                value,
                rho_star: rho,
                other_class: None,
            }
        }
    }
}

pub fn upper_bound(engine: &ExponentEngine) -> UpperBound {
    let table = ErrorType::ALL.map(|t| upper_cell(engine, t));
    let best = table
        .iter()
        .fold(table[0], |b, c| if c.value < b.value { *c } else { b });
    UpperBound {
        value: best.value,
        tau_star: best.tau,
        table,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paperex::build_paper_model;

    #[test]
    fn hull_of_concave_curve_is_itself() {
        let f = |x: f64| (1.0 + x).ln() - 0.3 * x;
        let env = concave_hull(&[&f], 1025);
        for x in linspace(0.0, 1.0, 1025) {
            assert!((env.eval(x) - f(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn hull_of_two_lines_is_flat() {
        let a = |x: f64| x;
        let b = |x: f64| 1.0 - x;
        let env = concave_hull(&[&a, &b], 1025);
        assert_eq!(env.knots().len(), 2);
        for x in [0.0, 0.3, 0.5, 1.0] {
            assert!((env.eval(x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn envelope_maximization_on_a_kink() {
        let a = |x: f64| 2.0 * x;
        let b = |x: f64| 1.0 - x;
        let env = concave_hull(&[&a, &b], 5);
        let (rho, v) = env.maximize_minus(|_| 0.0, 1e-12);
        assert!(
            (rho - 1.0).abs() < 1e-9 && (v - 2.0).abs() < 1e-9,
            "{rho} {v}"
        );
    }

    #[test]
    fn example_bounds() {
        let e = ExponentEngine::with_defaults(&build_paper_model()).unwrap();
        let lo = lower_bound(&e);
        assert!((lo.value - 0.0989).abs() < 5e-5);
        assert_eq!(lo.best, (Class::Two, Class::One));
        let up = upper_bound(&e);
        let want = [0.1734, 0.2526, 0.1073];
        for (c, w) in up.table.iter().zip(want) {
            assert!((c.value - w).abs() < 5e-5, "{c:?}");
        }
        assert_eq!(up.tau_star, ErrorType::Both);
    }
}
