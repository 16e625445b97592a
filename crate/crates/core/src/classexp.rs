//! Class-dependent source exponents.
//!
//! For a threshold `gamma`, class 1 follows `E_s(rho)` while
//! `1/(1+rho) >= 1/(1+rho_gamma)` and the tangent to `E_s` at `rho_gamma`
//! beyond it; class 2 is the complementary piecewise function. `rho_gamma`
//! solves `sum P^b log P / sum P^b = log gamma` with `b = 1/(1+rho_gamma)`.
//!
//! The equation is solved for `b` over the whole real line. The left side
//! increases from `log min P` (`b -> -inf`) to `log max P` (`b -> +inf`), so
//! thresholds below the geometric mean of the source give `b <= 0`, i.e.
//! `rho_gamma < -1` or infinite. The tangent is therefore evaluated in the
//! form `(1+rho) (log sum P^b - b log gamma) + log gamma`, which equals
//! `E_s(rho_gamma) + E_s'(rho_gamma) (rho - rho_gamma)` and stays finite for
//! every real `b`.

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::gallager::SourceLogs;
use crate::model::{Class, SourceSpec};

/// Residual required of an interior solution.
pub const RHO_GAMMA_RESIDUAL: f64 = 1e-10;
const MAX_ITERATIONS: usize = 200;
const BRACKET_LIMIT: f64 = 1e6;

/// Solution of the threshold equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoGamma {
    /// `gamma < min P`: every message is in class 1.
    BelowSupport,
    /// `gamma > max P`: every message is in class 2.
    AboveSupport,
    /// Root `beta = 1/(1+rho_gamma)`.
    Interior { beta: f64 },
}

impl RhoGamma {
    /// `rho_gamma = 1/beta - 1`; `+inf` at `beta = 0`.
    pub fn rho(&self) -> Option<f64> {
        match *self {
            RhoGamma::Interior { beta: 0.0 } => Some(f64::INFINITY),
            RhoGamma::Interior { beta } => Some(1.0 / beta - 1.0),
            _ => None,
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match *self {
            RhoGamma::Interior { beta } => Some(beta),
            _ => None,
        }
    }
}

/// `sum P^{1/(1+rho)} log P / sum P^{1/(1+rho)}`.
pub fn tilted_log_mean(rho: f64, src: &SourceSpec) -> Result<f64> {
    if !(rho > -1.0 && rho.is_finite()) {
        return Err(Error::Domain {
            name: "tilted_log_mean",
            value: rho,
            expected: "rho > -1",
        });
    }
    Ok(SourceLogs::new(src).tilted(1.0 / (1.0 + rho)).1)
}

pub fn solve_rho_gamma(gamma: f64, src: &SourceSpec) -> Result<RhoGamma> {
    solve(gamma, &SourceLogs::new(src), src)
}

fn solve(gamma: f64, logs: &SourceLogs, src: &SourceSpec) -> Result<RhoGamma> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain {
            name: "solve_rho_gamma",
            value: gamma,
            expected: "0 <= gamma <= 1",
        });
    }
    if gamma == 0.0 {
        return Ok(RhoGamma::BelowSupport);
    }
    if gamma == 1.0 {
        return Ok(RhoGamma::AboveSupport);
    }
    let lg = gamma.ln();
    let (lmin, lmax) = (src.min_prob().ln(), src.max_prob().ln());
    if lg < lmin {
        return Ok(RhoGamma::BelowSupport);
    }
    if lg > lmax {
        return Ok(RhoGamma::AboveSupport);
    }
    if lmin == lmax {
        // uniform source: the tilted mean is constant, any root works
        return Ok(RhoGamma::Interior { beta: 1.0 });
    }

    let f = |b: f64| logs.tilted(b).1 - lg;
    let (mut lo, mut hi) = (-1.0, 1.0);
    let (mut flo, mut fhi) = (f(lo), f(hi));
    while flo > 0.0 && lo > -BRACKET_LIMIT {
        hi = lo;
        fhi = flo;
        lo *= 2.0;
        flo = f(lo);
    }
    while fhi < 0.0 && hi < BRACKET_LIMIT {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = f(hi);
    }
    // gamma sitting on min P or max P: the root is at infinity
    if flo > 0.0 {
        return Ok(if flo.abs() < RHO_GAMMA_RESIDUAL {
            RhoGamma::Interior { beta: lo }
        } else {
            RhoGamma::BelowSupport
        });
    }
    if fhi < 0.0 {
        return Ok(if fhi.abs() < RHO_GAMMA_RESIDUAL {
            RhoGamma::Interior { beta: hi }
        } else {
            RhoGamma::AboveSupport
        });
    }

    let mut best = if flo.abs() < fhi.abs() {
        (lo, flo)
    } else {
        (hi, fhi)
    };
    for _ in 0..MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() < best.1.abs() {
            best = (mid, fm);
        }
        if fm.abs() < 1e-14 || mid <= lo || mid >= hi {
            break;
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.1.abs() < RHO_GAMMA_RESIDUAL {
        Ok(RhoGamma::Interior { beta: best.0 })
    } else {
        Err(Error::NonConvergence {
            iterations: MAX_ITERATIONS,
            lo,
            hi,
            residual: best.1,
        })
    }
}

/// Both class exponents of one source at one threshold, with the threshold
/// equation solved once.
#[derive(Debug, Clone)]
pub struct ClassExponents {
    logs: SourceLogs,
    gamma: f64,
    root: RhoGamma,
    /// `log sum P^b - b log gamma` at the root; the tangent is
    /// `(1+rho) * tangent_scale + log gamma`.
    tangent_scale: f64,
}

impl ClassExponents {
    pub fn new(src: &SourceSpec, gamma: f64) -> Result<Self> {
        let logs = SourceLogs::new(src);
        let root = solve(gamma, &logs, src)?;
        let tangent_scale = match root {
            RhoGamma::Interior { beta } => logs.log_power_sum(beta) - beta * gamma.ln(),
            _ => 0.0,
        };
        Ok(ClassExponents {
            logs,
            gamma,
            root,
            tangent_scale,
        })
    }

    pub fn root(&self) -> RhoGamma {
        self.root
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// True when the class exponent is `-inf` for every `rho`.
    pub fn is_minus_inf(&self, class: Class) -> bool {
        matches!(
            (self.root, class),
            (RhoGamma::BelowSupport, Class::Two) | (RhoGamma::AboveSupport, Class::One)
        )
    }

    pub fn eval(&self, class: Class, rho: f64) -> ExtReal {
        self.eval_with_es(class, rho, || self.logs.e_s(rho))
    }

    /// Same as [`ClassExponents::eval`] with `E_s(rho)` supplied by the caller.
    pub(crate) fn eval_with_es(&self, class: Class, rho: f64, es: impl FnOnce() -> f64) -> ExtReal {
        match (self.root, class) {
            (RhoGamma::BelowSupport, Class::One) | (RhoGamma::AboveSupport, Class::Two) => {
                ExtReal::Finite(es())
            }
            (RhoGamma::BelowSupport, Class::Two) | (RhoGamma::AboveSupport, Class::One) => {
                ExtReal::MinusInf
            }
            (RhoGamma::Interior { beta: root }, _) => {
                let beta = 1.0 / (1.0 + rho);
                let follows_es = match class {
                    Class::One => beta >= root,
                    Class::Two => beta < root,
                };
                if follows_es {
                    ExtReal::Finite(es())
                } else {
                    ExtReal::Finite((1.0 + rho) * self.tangent_scale + self.gamma.ln())
                }
            }
        }
    }
}

/// `E_{s,i}(rho, P, gamma)` as an extended real.
pub fn es_class(class: Class, rho: f64, src: &SourceSpec, gamma: f64) -> Result<ExtReal> {
    if !(rho > -1.0 && rho.is_finite()) {
        return Err(Error::Domain {
            name: "es_class",
            value: rho,
            expected: "rho > -1",
        });
    }
    Ok(ClassExponents::new(src, gamma)?.eval(class, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallager::{e_s, e_s_prime};

    fn src(p: &[f64]) -> SourceSpec {
        SourceSpec::new(p.to_vec()).unwrap()
    }

    #[test]
    fn tilted_mean_endpoints() {
        let s = src(&[0.2, 0.3, 0.5]);
        assert!((tilted_log_mean(0.0, &s).unwrap() + s.entropy()).abs() < 1e-15);
        let u = src(&[0.25; 4]);
        for rho in [-0.5, 0.0, 3.0] {
            assert!((tilted_log_mean(rho, &u).unwrap() + 4f64.ln()).abs() < 1e-15);
        }
        assert!(tilted_log_mean(-1.0, &s).is_err());
    }

    #[test]
    fn tilted_mean_decreases_with_rho() {
        // smaller tilt exponents flatten the weights toward the geometric mean
        let s = src(&[0.1, 0.3, 0.6]);
        let grid: Vec<f64> = (0..200).map(|k| -0.99 + k as f64 * 0.05).collect();
        for w in grid.windows(2) {
            assert!(tilted_log_mean(w[1], &s).unwrap() < tilted_log_mean(w[0], &s).unwrap());
        }
    }

    #[test]
    fn gamma_at_exp_minus_entropy_gives_rho_zero() {
        let s = src(&[0.25, 0.75]);
        let rg = solve_rho_gamma((-s.entropy()).exp(), &s).unwrap();
        assert!(rg.rho().unwrap().abs() < 1e-9, "{rg:?}");
    }

    #[test]
    fn degenerate_thresholds() {
        let s = src(&[0.25, 0.75]);
        assert_eq!(solve_rho_gamma(0.0, &s).unwrap(), RhoGamma::BelowSupport);
        assert_eq!(solve_rho_gamma(1.0, &s).unwrap(), RhoGamma::AboveSupport);
        assert_eq!(solve_rho_gamma(0.2, &s).unwrap(), RhoGamma::BelowSupport);
        assert_eq!(solve_rho_gamma(0.8, &s).unwrap(), RhoGamma::AboveSupport);
        assert!(solve_rho_gamma(1.2, &s).is_err());
    }

    #[test]
    fn back_substitution_residual() {
        let s = src(&[0.25, 0.75]);
        let rho = solve_rho_gamma(0.5, &s).unwrap().rho().unwrap();
        assert!((tilted_log_mean(rho, &s).unwrap() - 0.5f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn threshold_below_geometric_mean_has_nonpositive_beta() {
        let s = src(&[0.25, 0.75]);
        // geometric mean is sqrt(0.1875) ~ 0.433
        let rg = solve_rho_gamma(0.3, &s).unwrap();
        let beta = rg.beta().unwrap();
        assert!(beta < 0.0);
        let logs = SourceLogs::new(&s);
        assert!((logs.tilted(beta).1 - 0.3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn threshold_on_support_edge() {
        let s = src(&[0.25, 0.75]);
        let lo = solve_rho_gamma(0.25, &s).unwrap();
        let hi = solve_rho_gamma(0.75, &s).unwrap();
        assert!(lo.beta().unwrap() < -10.0, "{lo:?}");
        assert!(hi.beta().unwrap() > 10.0, "{hi:?}");
    }

    #[test]
    fn gamma_zero_conventions() {
        let s = src(&[0.028, 0.972]);
        for rho in [0.0, 0.4, 1.0] {
            assert_eq!(
                es_class(Class::One, rho, &s, 0.0).unwrap(),
                ExtReal::Finite(e_s(rho, &s).unwrap())
            );
            assert_eq!(
                es_class(Class::Two, rho, &s, 0.0).unwrap(),
                ExtReal::MinusInf
            );
            assert_eq!(
                es_class(Class::One, rho, &s, 1.0).unwrap(),
                ExtReal::MinusInf
            );
            assert_eq!(
                es_class(Class::Two, rho, &s, 1.0).unwrap(),
                ExtReal::Finite(e_s(rho, &s).unwrap())
            );
        }
    }

    #[test]
    fn classes_meet_at_tangency_point() {
        let s = src(&[0.25, 0.75]);
        let gamma = 0.525;
        let rho = solve_rho_gamma(gamma, &s).unwrap().rho().unwrap();
        assert!((0.0..1.0).contains(&rho), "{rho}");
        let a = es_class(Class::One, rho, &s, gamma)
            .unwrap()
            .finite()
            .unwrap();
        let b = es_class(Class::Two, rho, &s, gamma)
            .unwrap()
            .finite()
            .unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((a - e_s(rho, &s).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn tangent_branch_matches_direct_formula() {
        let s = src(&[0.25, 0.75]);
        // gamma = exp(tilted_log_mean(0.5)) to 25 digits
        let gamma = 0.524_995_983_575_613_8;
        let v = es_class(Class::One, 0.9, &s, gamma)
            .unwrap()
            .finite()
            .unwrap();
        let direct = e_s(0.5, &s).unwrap() + e_s_prime(0.5, &s).unwrap() * 0.4;
        assert!((v - direct).abs() < 1e-12, "{v} vs {direct}");
        // 50-digit value of the same expression
        assert!((v - 0.553_275_662_976_307_8).abs() < 1e-12);
    }
}
