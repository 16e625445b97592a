//! Gallager's source and channel functions and the point-to-point channels
//! seen by each error type.
//!
//! Natural logarithms throughout; sums of powers are evaluated as max-shifted
//! log-sum-exp in ascending symbol order. Zero probabilities are excluded from
//! every inner sum (`0^{1/(1+rho)} = 0`).

use crate::error::{Error, Result};
use crate::model::{InputDistribution, MacChannel, SourceSpec, User};

/// Which users are decoded in error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErrorType {
    User1,
    User2,
    Both,
}

impl ErrorType {
    pub const ALL: [ErrorType; 3] = [ErrorType::User1, ErrorType::User2, ErrorType::Both];

    /// The correctly decoded users; `None` is the empty set.
    pub fn complement(self) -> Option<ErrorType> {
        match self {
            ErrorType::User1 => Some(ErrorType::User2),
            ErrorType::User2 => Some(ErrorType::User1),
            ErrorType::Both => None,
        }
    }

    pub fn user(self) -> Option<User> {
        match self {
            ErrorType::User1 => Some(User::One),
            ErrorType::User2 => Some(User::Two),
            ErrorType::Both => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ErrorType::User1 => "{1}",
            ErrorType::User2 => "{2}",
            ErrorType::Both => "{1,2}",
        }
    }
}

impl From<User> for ErrorType {
    fn from(u: User) -> Self {
        match u {
            User::One => ErrorType::User1,
            User::Two => ErrorType::User2,
        }
    }
}

/// Single-input channel, `nin` rows of `nout` transition probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct PtpChannel {
    pub nin: usize,
    pub nout: usize,
    pub w: Vec<f64>,
}

impl PtpChannel {
    pub fn row(&self, x: usize) -> &[f64] {
        &self.w[x * self.nout..(x + 1) * self.nout]
    }
}

fn check_rho(name: &'static str, rho: f64) -> Result<()> {
    if rho > -1.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value: rho,
            expected: "rho > -1",
        })
    }
}

/// Log-probabilities of a source support with the tilted sums used by
/// `E_s`, its derivative and the threshold equation.
#[derive(Debug, Clone)]
pub(crate) struct SourceLogs {
    logp: Vec<f64>,
}

impl SourceLogs {
    pub(crate) fn new(src: &SourceSpec) -> Self {
        SourceLogs {
            logp: src
                .probs
                .iter()
                .filter(|&&p| p > 0.0)
                .map(|p| p.ln())
                .collect(),
        }
    }

    /// `(log S(beta), sum P^beta log P / S(beta))` with `S(beta) = sum P^beta`.
    pub(crate) fn tilted(&self, beta: f64) -> (f64, f64) {
        let m = self
            .logp
            .iter()
            .map(|l| beta * l)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut s = 0.0;
        let mut t = 0.0;
        for &l in &self.logp {
            let w = (beta * l - m).exp();
            s += w;
            t += w * l;
        }
        (m + s.ln(), t / s)
    }

    pub(crate) fn log_power_sum(&self, beta: f64) -> f64 {
        let m = self
            .logp
            .iter()
            .map(|l| beta * l)
            .fold(f64::NEG_INFINITY, f64::max);
        m + self
            .logp
            .iter()
            .map(|l| (beta * l - m).exp())
            .sum::<f64>()
            .ln()
    }

    pub(crate) fn e_s(&self, rho: f64) -> f64 {
        (1.0 + rho) * self.log_power_sum(1.0 / (1.0 + rho))
    }

    pub(crate) fn e_s_prime(&self, rho: f64) -> f64 {
        let beta = 1.0 / (1.0 + rho);
        let (l, t) = self.tilted(beta);
        l - beta * t
    }
}

/// Gallager's source function `(1+rho) log sum_u P(u)^{1/(1+rho)}`.
pub fn e_s(rho: f64, src: &SourceSpec) -> Result<f64> {
    check_rho("e_s", rho)?;
    Ok(SourceLogs::new(src).e_s(rho))
}

/// Analytic derivative of [`e_s`] in `rho`:
/// `log S(beta) - beta * sum P^beta log P / S(beta)` with `beta = 1/(1+rho)`.
pub fn e_s_prime(rho: f64, src: &SourceSpec) -> Result<f64> {
    check_rho("e_s_prime", rho)?;
    Ok(SourceLogs::new(src).e_s_prime(rho))
}

/// `E_0` for a fixed input law and channel, with the nonzero `(Q, W)` terms
/// gathered per output symbol so repeated evaluation in `rho` is cheap.
#[derive(Debug, Clone)]
pub struct PreparedE0 {
    /// `(log Q(x), log W(y|x))` for every `x` with both positive, grouped by `y`.
    terms: Vec<(f64, f64)>,
    offsets: Vec<usize>,
}

impl PreparedE0 {
    pub fn new(q: &InputDistribution, ch: &PtpChannel) -> Result<Self> {
        if q.len() != ch.nin {
            return Err(Error::Dimension(format!(
                "input distribution has {} symbols, channel has {} inputs",
                q.len(),
                ch.nin
            )));
        }
        let mut terms = Vec::new();
        let mut offsets = vec![0];
        for y in 0..ch.nout {
            for (x, &qx) in q.probs.iter().enumerate() {
                let w = ch.w[x * ch.nout + y];
                if qx > 0.0 && w > 0.0 {
                    terms.push((qx.ln(), w.ln()));
                }
            }
            if terms.len() > *offsets.last().unwrap() {
                offsets.push(terms.len());
            }
        }
        Ok(PreparedE0 { terms, offsets })
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let beta = 1.0 / (1.0 + rho);
        // running log-sum-exp over output symbols
        let mut outer_max = f64::NEG_INFINITY;
        let mut outer_sum = 0.0;
        for win in self.offsets.windows(2) {
            let group = &self.terms[win[0]..win[1]];
            let m = group
                .iter()
                .map(|(lq, lw)| lq + beta * lw)
                .fold(f64::NEG_INFINITY, f64::max);
            let s: f64 = group
                .iter()
                .map(|(lq, lw)| (lq + beta * lw - m).exp())
                .sum();
            let v = (1.0 + rho) * (m + s.ln());
            if v > outer_max {
                outer_sum = outer_sum * (outer_max - v).exp() + 1.0;
                outer_max = v;
            } else {
                outer_sum += (v - outer_max).exp();
            }
        }
        let s = outer_sum;
        -(outer_max + s.ln())
    }
}

/// Gallager's channel function `-log sum_y (sum_x Q(x) W(y|x)^{1/(1+rho)})^{1+rho}`,
/// defined here for `rho` in `[0, 1]`.
pub fn e_0(rho: f64, q: &InputDistribution, ch: &PtpChannel) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain {
            name: "e_0",
            value: rho,
            expected: "0 <= rho <= 1",
        });
    }
    Ok(PreparedE0::new(q, ch)?.eval(rho))
}

/// Channel from user `tau`'s input to `(x_other, y)` with the other user's
/// input averaged in: `W(y|x1,x2) Q(x_other)`. Output index is
/// `x_other * ny + y`.
pub fn induced_channel(
    ch: &MacChannel,
    tau: ErrorType,
    q_other: &InputDistribution,
) -> Result<PtpChannel> {
    let user = tau.user().ok_or(Error::JointErrorType("induced_channel"))?;
    let (nin, nother) = (ch.input_size(user), ch.input_size(user.other()));
    if q_other.len() != nother {
        return Err(Error::Dimension(format!(
            "q_other has {} symbols, user {} has {} inputs",
            q_other.len(),
            user.other().number(),
            nother
        )));
    }
    let nout = nother * ch.ny;
    let mut w = vec![0.0; nin * nout];
    for x in 0..nin {
        for (xo, &qo) in q_other.probs.iter().enumerate() {
            let row = match user {
                User::One => ch.row(x, xo),
                User::Two => ch.row(xo, x),
            };
            for (y, &p) in row.iter().enumerate() {
                w[x * nout + xo * ch.ny + y] = p * qo;
            }
        }
    }
    Ok(PtpChannel { nin, nout, w })
}

/// Joint law `Q1(x1) Q2(x2)` at index `x1 + n1 * x2`, matching channel rows.
pub fn product_distribution(q1: &InputDistribution, q2: &InputDistribution) -> InputDistribution {
    let probs = q2
        .probs
        .iter()
        .flat_map(|&b| q1.probs.iter().map(move |&a| a * b))
        .collect();
    InputDistribution { probs }
}

/// The MAC as a channel with input alphabet `X1 x X2`.
pub fn mac_as_ptp(ch: &MacChannel) -> PtpChannel {
    PtpChannel {
        nin: ch.n1 * ch.n2,
        nout: ch.ny,
        w: ch.w.clone(),
    }
}
