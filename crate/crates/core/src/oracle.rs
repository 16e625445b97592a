//! Brute-force reference evaluators.
//!
//! Nothing here calls into the log-domain routines, the golden-section search
//! or the threshold bisection used by the engine: powers are taken directly,
//! maxima come from exhaustive grids and the class exponents from minimizing
//! over the tilt parameter instead of solving for the switch point.

use crate::engine::ExponentEngine;
use crate::error::Result;
use crate::extreal::ExtReal;
use crate::gallager::PtpChannel;
use crate::model::Class;
use crate::parallel::par_map;

/// Exhaustive maximum over `n` uniform points of `[0, 1]`; the first maximizer wins.
pub fn grid_max_rho(objective: impl Fn(f64) -> f64, n: usize) -> (f64, f64) {
    assert!(n >= 2, "grid_max_rho needs at least two points");
    let mut best = (0.0, objective(0.0));
    for k in 1..n {
        let rho = k as f64 / (n - 1) as f64;
        let v = objective(rho);
        if v > best.1 {
            best = (rho, v);
        }
    }
    best
}

/// Centered difference `(f(x+h) - f(x-h)) / 2h`.
pub fn fd_derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// `(1+rho) log sum P^{1/(1+rho)}` with direct powers.
pub fn direct_e_s(rho: f64, probs: &[f64]) -> f64 {
    let s: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p.powf(1.0 / (1.0 + rho)))
        .sum();
    (1.0 + rho) * s.ln()
}

/// Double loop over outputs and inputs with direct powers.
pub fn direct_e_0(rho: f64, q: &[f64], ch: &PtpChannel) -> f64 {
    let mut total = 0.0;
    for y in 0..ch.nout {
        let mut inner = 0.0;
        for (x, &qx) in q.iter().enumerate() {
            let w = ch.w[x * ch.nout + y];
            if w > 0.0 {
                inner += qx * w.powf(1.0 / (1.0 + rho));
            }
        }
        total += inner.powf(1.0 + rho);
    }
    -total.ln()
}

/// `log sum_u P(u)^b`, shifted by the largest term.
fn log_tilted_sum(probs: &[f64], b: f64) -> f64 {
    let logs: Vec<f64> = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|p| b * p.ln())
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
}

/// Class source exponent as a minimization over the tilt `b`:
/// `min (1+rho) (log sum P^b - b log gamma) + log gamma`, over `b >= 1/(1+rho)`
/// for class 1 and `b <= 1/(1+rho)` for class 2.
pub fn es_class_by_lambda(class: Class, rho: f64, probs: &[f64], gamma: f64) -> ExtReal {
    match (gamma, class) {
        (0.0, Class::One) => return ExtReal::Finite(direct_e_s(rho, probs)),
        (0.0, Class::Two) => return ExtReal::MinusInf,
        (1.0, Class::One) => return ExtReal::MinusInf,
        (1.0, Class::Two) => return ExtReal::Finite(direct_e_s(rho, probs)),
        _ => {}
    }
    let lg = gamma.ln();
    let h = |b: f64| (1.0 + rho) * (log_tilted_sum(probs, b) - b * lg) + lg;
    let start = 1.0 / (1.0 + rho);
    let dir = match class {
        Class::One => 1.0,
        Class::Two => -1.0,
    };
    let mut span = 1.0;
    while h(start + dir * 2.0 * span) < h(start + dir * span) {
        span *= 2.0;
        if span > 1e7 {
            return ExtReal::MinusInf;
        }
    }
    let (mut a, mut b) = (0.0, 2.0 * span);
    for _ in 0..300 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if h(start + dir * m1) <= h(start + dir * m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    ExtReal::Finite(h(start + dir * 0.5 * (a + b)).min(h(start)))
}

/// `sum P^b log P / sum P^b - log gamma` at `b = 1/(1+rho)`, with direct powers.
pub fn tilted_residual(rho: f64, probs: &[f64], gamma: f64) -> f64 {
    let b = 1.0 / (1.0 + rho);
    let support = probs.iter().filter(|&&p| p > 0.0);
    let num: f64 = support.clone().map(|&p| p.powf(b) * p.ln()).sum();
    let den: f64 = support.map(|&p| p.powf(b)).sum();
    num / den - gamma.ln()
}

/// `d` on a uniform `n x n` threshold grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSweep {
    pub axis: Vec<f64>,
    /// Row-major, user 1's threshold major.
    pub values: Vec<ExtReal>,
    pub argmax: [f64; 2],
    pub max: ExtReal,
}

impl GammaSweep {
    pub fn at(&self, i: usize, j: usize) -> ExtReal {
        self.values[i * self.axis.len() + j]
    }
}

pub fn gamma_sweep(engine: &ExponentEngine, n: usize) -> Result<GammaSweep> {
    assert!(n >= 2, "gamma_sweep needs at least two points per axis");
    let axis: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
    let points: Vec<[f64; 2]> = axis
        .iter()
        .flat_map(|&a| axis.iter().map(move |&b| [a, b]))
        .collect();
    let values = par_map(&points, engine.options().jobs, |&p| engine.d_value(p))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let (k, max) = values.iter().enumerate().fold(
        (0, values[0]),
        |b, (k, &v)| if v > b.1 { (k, v) } else { b },
    );
    Ok(GammaSweep {
        argmax: points[k],
        axis,
        values,
        max,
    })
}
